// Output writers: shortest round-trip number formatting, CSV quoting and
// layout, and the built-in SVG plotter.
#include <catch2/catch_amalgamated.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "photon_reader/io.hpp"

using namespace photon_reader;

namespace {

double parse_back(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  REQUIRE(res.ec == std::errc());
  return v;
}

}  // namespace

TEST_CASE("number formatting round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 4795.0, 1e-300, 1e300, 6.907755278982137,
                   -2.5, 0.0}) {
    CHECK(parse_back(io::format_double(v)) == v);
  }
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
  CHECK(io::format_double(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
  // Locale independence: period decimal separator, no grouping.
  CHECK(io::format_double(1234567.5).find(',') == std::string::npos);
  CHECK(io::format_double(0.5).find('.') != std::string::npos);
}

TEST_CASE("CSV escaping") {
  CHECK(io::csv_escape("plain") == "plain");
  CHECK(io::csv_escape("with,comma") == "\"with,comma\"");
  CHECK(io::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(io::csv_escape("line\nbreak") == "\"line\nbreak\"");
}

TEST_CASE("CSV writer layout: metadata above header above rows") {
  std::ostringstream os;
  io::CsvWriter csv(os);
  csv.metadata("alpha", "one");
  csv.metadata("beta", 2.5);
  csv.header({"x", "y"});
  csv.row({"1", "2"});
  csv.row({"3", "a,b"});
  CHECK(os.str() == "# alpha=one\n# beta=2.5\nx,y\n1,2\n3,\"a,b\"\n");
}

TEST_CASE("SVG plotter") {
  io::SvgPlot plot("title", "x", "y");
  plot.set_log_x(true);
  io::SvgSeries s;
  s.label = "curve";
  s.color = "#112233";
  for (double x : {0.001, 0.01, 0.1, 1.0}) s.points.emplace_back(x, 2.0 * x + 1.0);
  plot.add_series(std::move(s));
  io::SvgSeries dashed;
  dashed.label = "bound";
  dashed.color = "#445566";
  dashed.dashed = true;
  dashed.points = {{0.001, 3.0}, {1.0, 0.5}};
  plot.add_series(std::move(dashed));

  std::ostringstream os;
  plot.render(os);
  const std::string svg = os.str();
  CHECK(svg.starts_with("<svg"));
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("curve") != std::string::npos);
  CHECK(svg.find("bound") != std::string::npos);
  CHECK(svg.find("stroke-dasharray") != std::string::npos);
  CHECK(svg.find("nan") == std::string::npos);
  CHECK(svg.find("#112233") != std::string::npos);
}

TEST_CASE("SVG plotter survives degenerate inputs") {
  io::SvgPlot plot("t", "x", "y");
  io::SvgSeries s;
  s.label = "flat";
  s.color = "#000000";
  s.points = {{1.0, 5.0}, {2.0, 5.0}};  // zero y-range
  plot.add_series(std::move(s));
  std::ostringstream os;
  plot.render(os);
  CHECK(os.str().find("nan") == std::string::npos);
  CHECK(os.str().find("inf") == std::string::npos);
}
