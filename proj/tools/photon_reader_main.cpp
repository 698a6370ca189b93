// photon-reader: command-line front end for the photon_reader library.
//
// Flag precedence: command-line flags override --config file values, which
// override built-in defaults. Exit codes: 0 success, 1 runtime failure,
// 2 usage or configuration error.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "photon_reader/cli.hpp"

namespace {

using photon_reader::cli::RunConfig;

std::vector<photon_reader::transceivers::SchemeId> parse_scheme_list(const std::string& csv) {
  std::vector<photon_reader::transceivers::SchemeId> out;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) out.push_back(photon_reader::transceivers::parse_scheme(token));
  }
  if (out.empty()) throw std::invalid_argument("empty scheme list");
  return out;
}

// Applies config-file values to every field whose flag was not set on the
// command line. Unknown keys are rejected so typos fail loudly.
void apply_config_file(const std::string& path, RunConfig& cfg,
                       const std::map<std::string, CLI::Option*>& opts,
                       std::string& schemes_csv, std::string& format_str) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  nlohmann::json doc = nlohmann::json::parse(in);
  if (!doc.is_object()) throw std::invalid_argument("config file must be a JSON object");

  const auto unset = [&opts](const char* flag) {
    auto it = opts.find(flag);
    return it == opts.end() || it->second->count() == 0;
  };

  for (const auto& [key, value] : doc.items()) {
    if (key == "schemes") {
      if (!unset("--schemes")) continue;
      if (value.is_string()) {
        schemes_csv = value.get<std::string>();
      } else if (value.is_array()) {
        schemes_csv.clear();
        for (const auto& v : value) {
          if (!schemes_csv.empty()) schemes_csv += ',';
          schemes_csv += v.get<std::string>();
        }
      } else {
        throw std::invalid_argument("config: schemes must be a string or array of strings");
      }
    } else if (key == "ns_min") {
      if (unset("--ns-min")) cfg.ns_min = value.get<double>();
    } else if (key == "ns_max") {
      if (unset("--ns-max")) cfg.ns_max = value.get<double>();
    } else if (key == "ns_points") {
      if (unset("--ns-points")) cfg.ns_points = value.get<std::size_t>();
    } else if (key == "ns") {
      if (unset("--ns")) cfg.ns = value.get<double>();
    } else if (key == "m") {
      if (unset("--m")) cfg.m = value.get<std::size_t>();
    } else if (key == "kappa") {
      if (unset("--kappa")) cfg.kappa = value.get<double>();
    } else if (key == "kappas") {
      if (unset("--kappas")) cfg.kappas = value.get<std::vector<double>>();
    } else if (key == "k_copies") {
      if (unset("--k-copies")) cfg.k_copies = value.get<std::size_t>();
    } else if (key == "epsilon") {
      if (unset("--epsilon")) cfg.epsilon = value.get<double>();
    } else if (key == "pie") {
      if (unset("--pie")) {
        if (value.is_number()) {
          cfg.pies = {value.get<double>()};
        } else {
          cfg.pies = value.get<std::vector<double>>();
        }
      }
    } else if (key == "pie_min") {
      if (unset("--pie-min")) cfg.pie_min = value.get<double>();
    } else if (key == "pie_max") {
      if (unset("--pie-max")) cfg.pie_max = value.get<double>();
    } else if (key == "pie_points") {
      if (unset("--pie-points")) cfg.pie_points = value.get<std::size_t>();
    } else if (key == "trials") {
      if (unset("--trials")) cfg.trials = value.get<std::size_t>();
    } else if (key == "seed") {
      if (unset("--seed")) cfg.seed = value.get<std::uint64_t>();
    } else if (key == "psk_q_max") {
      if (unset("--psk-qmax")) cfg.psk_q_max = value.get<std::size_t>();
    } else if (key == "gm_m_max") {
      if (unset("--gm-mmax")) cfg.gm_m_max = value.get<std::uint64_t>();
    } else if (key == "out") {
      if (unset("--out")) cfg.out_path = value.get<std::string>();
    } else if (key == "format") {
      if (unset("--format")) format_str = value.get<std::string>();
    } else if (key == "deterministic") {
      if (unset("--deterministic")) cfg.deterministic = value.get<bool>();
    } else {
      throw std::invalid_argument("config: unknown key \"" + key + "\"");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"photon-reader: capacity, photon-information-efficiency, and error-exponent "
               "calculations for coherent-light pixel readout, with a linear-optics Monte Carlo "
               "simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string config_path;
  std::string schemes_csv;
  std::string format_str;

  std::map<std::string, CLI::Option*> opts;
  opts["--config"] = app.add_option("--config", config_path, "JSON config file (flags override)");
  opts["--schemes"] =
      app.add_option("--schemes", schemes_csv,
                     "comma-separated scheme list: ook_direct,bpsk_homodyne,bpsk_dolinar,"
                     "qubit_probe,holevo_unrestricted,bpsk_holevo,psk_holevo,gm_hadamard,w_state");
  opts["--ns-min"] = app.add_option("--ns-min", cfg.ns_min, "low end of the n_s sweep");
  opts["--ns-max"] = app.add_option("--ns-max", cfg.ns_max, "high end of the n_s sweep");
  opts["--ns-points"] = app.add_option("--ns-points", cfg.ns_points, "points in the n_s sweep");
  opts["--ns"] = app.add_option("--ns", cfg.ns,
                                "simulate: mean probe photons per pixel (0 = ln(1000)/m)");
  opts["--m"] = app.add_option("--m", cfg.m, "simulate: pixels per codeword (power of two)");
  opts["--kappa"] = app.add_option("--kappa", cfg.kappa, "channel transmissivity in (0,1]");
  opts["--kappas"] = app.add_option("--kappas", cfg.kappas, "budget: transmissivity list")
                         ->delimiter(',');
  opts["--k-copies"] =
      app.add_option("--k-copies", cfg.k_copies, "simulate: repeated probe copies (w_state)");
  opts["--epsilon"] = app.add_option("--epsilon", cfg.epsilon, "target word error probability");
  opts["--pie"] = app.add_option("--pie", cfg.pies, "target PIE values (bits/photon)")
                      ->delimiter(',');
  opts["--pie-min"] = app.add_option("--pie-min", cfg.pie_min, "exponent: low end of PIE grid");
  opts["--pie-max"] = app.add_option("--pie-max", cfg.pie_max, "exponent: high end of PIE grid");
  opts["--pie-points"] =
      app.add_option("--pie-points", cfg.pie_points, "exponent: points in PIE grid");
  opts["--trials"] = app.add_option("--trials", cfg.trials, "simulate: Monte Carlo trials");
  opts["--seed"] = app.add_option("--seed", cfg.seed, "master RNG seed");
  opts["--psk-qmax"] =
      app.add_option("--psk-qmax", cfg.psk_q_max, "largest PSK constellation in the sweep");
  opts["--gm-mmax"] =
      app.add_option("--gm-mmax", cfg.gm_m_max, "largest Hadamard block in the sweep");
  opts["--out"] = app.add_option("--out", cfg.out_path, "output path (default stdout)");
  opts["--format"] = app.add_option("--format", format_str, "csv | json | svg");
  opts["--deterministic"] = app.add_flag("--deterministic", cfg.deterministic,
                                         "suppress timestamps for byte-reproducible output");

  auto* sub_pie = app.add_subcommand("pie-curve", "PIE and capacity vs photons per pixel");
  auto* sub_tradeoff = app.add_subcommand("tradeoff", "bits/photon vs bits/pixel trade-off");
  auto* sub_simulate = app.add_subcommand("simulate", "Monte Carlo word-error simulation");
  auto* sub_exponent = app.add_subcommand("exponent", "error-exponent contour table");
  auto* sub_budget = app.add_subcommand("budget", "pixel budgets meeting a PIE target");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sub_pie->parsed()) cfg.command = photon_reader::cli::Command::kPieCurve;
    if (sub_tradeoff->parsed()) cfg.command = photon_reader::cli::Command::kTradeoff;
    if (sub_simulate->parsed()) cfg.command = photon_reader::cli::Command::kSimulate;
    if (sub_exponent->parsed()) cfg.command = photon_reader::cli::Command::kExponent;
    if (sub_budget->parsed()) cfg.command = photon_reader::cli::Command::kBudget;

    if (!config_path.empty()) apply_config_file(config_path, cfg, opts, schemes_csv, format_str);
    if (!schemes_csv.empty()) cfg.schemes = parse_scheme_list(schemes_csv);
    if (!format_str.empty()) {
      cfg.format = photon_reader::cli::parse_format(format_str);
      cfg.format_set = true;
    }
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "photon-reader: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "photon-reader: " << e.what() << "\n";
    return 2;
  }

  return photon_reader::cli::run(cfg);
}
