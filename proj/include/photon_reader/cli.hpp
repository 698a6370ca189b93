// Command implementations behind the photon-reader executable: curve sweeps,
// the Monte Carlo simulate command, exponent contour tables, and pixel-budget
// solvers, each emitting CSV (canonical), JSON, or SVG with the resolved
// configuration echoed into the output.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "photon_reader/core.hpp"
#include "photon_reader/dmc.hpp"
#include "photon_reader/exponents.hpp"
#include "photon_reader/io.hpp"
#include "photon_reader/montecarlo.hpp"
#include "photon_reader/optics.hpp"
#include "photon_reader/transceivers.hpp"

namespace photon_reader::cli {

using njson = nlohmann::ordered_json;

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr std::size_t kSimulateMaxBlock = std::size_t{1} << 20;

enum class Command { kPieCurve, kTradeoff, kSimulate, kExponent, kBudget };
enum class OutputFormat { kCsv, kJson, kSvg };

inline std::string_view command_name(Command c) {
  switch (c) {
    case Command::kPieCurve: return "pie-curve";
    case Command::kTradeoff: return "tradeoff";
    case Command::kSimulate: return "simulate";
    case Command::kExponent: return "exponent";
    case Command::kBudget: return "budget";
  }
  throw std::logic_error("command_name: unknown command");
}

inline Command parse_command(std::string_view s) {
  for (Command c : {Command::kPieCurve, Command::kTradeoff, Command::kSimulate,
                    Command::kExponent, Command::kBudget})
    if (command_name(c) == s) return c;
  throw std::invalid_argument("unknown command: " + std::string(s));
}

inline std::string_view format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::kCsv: return "csv";
    case OutputFormat::kJson: return "json";
    case OutputFormat::kSvg: return "svg";
  }
  throw std::logic_error("format_name: unknown format");
}

inline OutputFormat parse_format(std::string_view s) {
  for (OutputFormat f : {OutputFormat::kCsv, OutputFormat::kJson, OutputFormat::kSvg})
    if (format_name(f) == s) return f;
  throw std::invalid_argument("unknown format: " + std::string(s));
}

// Resolved run configuration; every output embeds the fields its command used.
struct RunConfig {
  Command command = Command::kPieCurve;
  std::vector<transceivers::SchemeId> schemes;  // empty = command default
  double ns_min = 1e-4;
  double ns_max = 10.0;
  std::size_t ns_points = 60;
  double ns = 0.0;          // simulate: probe photons per pixel; 0 = auto
  std::size_t m = 1024;     // simulate: pixels per codeword
  double kappa = 1.0;
  std::vector<double> kappas;  // budget: transmissivity list (empty = {kappa})
  std::size_t k_copies = 1;
  double epsilon = 1e-3;
  std::vector<double> pies = {5.0};  // budget / exponent-summary PIE targets
  double pie_min = 1.0;
  double pie_max = 12.0;
  std::size_t pie_points = 45;
  std::size_t trials = 100000;
  std::uint64_t seed = 1;
  std::size_t psk_q_max = 64;
  std::uint64_t gm_m_max = std::uint64_t{1} << 20;
  std::string out_path;  // empty = stdout
  OutputFormat format = OutputFormat::kCsv;
  bool format_set = false;  // whether the user chose a format explicitly
  bool deterministic = false;

  transceivers::SweepLimits sweep_limits() const { return {psk_q_max, gm_m_max}; }

  OutputFormat effective_format() const {
    if (format_set) return format;
    return command == Command::kSimulate ? OutputFormat::kJson : OutputFormat::kCsv;
  }
};

// ---------------------------------------------------------------------------
// Shared output helpers

namespace detail {

inline std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string join_schemes(const std::vector<transceivers::SchemeId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += transceivers::scheme_name(ids[i]);
  }
  return out;
}

inline void common_metadata(io::CsvWriter& csv, const RunConfig& cfg) {
  csv.metadata("version", kVersion);
  csv.metadata("command", command_name(cfg.command));
  if (!cfg.deterministic) csv.metadata("generated_at", iso_timestamp());
  csv.metadata("seed", std::to_string(cfg.seed));
}

inline njson config_json(const RunConfig& cfg, const std::vector<transceivers::SchemeId>& schemes) {
  njson j;
  j["version"] = std::string(kVersion);
  j["command"] = std::string(command_name(cfg.command));
  j["schemes"] = njson::array();
  for (auto s : schemes) j["schemes"].push_back(std::string(transceivers::scheme_name(s)));
  j["ns_min"] = cfg.ns_min;
  j["ns_max"] = cfg.ns_max;
  j["ns_points"] = cfg.ns_points;
  j["ns"] = cfg.ns;
  j["m"] = cfg.m;
  j["kappa"] = cfg.kappa;
  j["kappas"] = cfg.kappas.empty() ? std::vector<double>{cfg.kappa} : cfg.kappas;
  j["k_copies"] = cfg.k_copies;
  j["epsilon"] = cfg.epsilon;
  j["pie"] = cfg.pies;
  j["pie_min"] = cfg.pie_min;
  j["pie_max"] = cfg.pie_max;
  j["pie_points"] = cfg.pie_points;
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["psk_q_max"] = cfg.psk_q_max;
  j["gm_m_max"] = cfg.gm_m_max;
  j["format"] = std::string(format_name(cfg.effective_format()));
  j["deterministic"] = cfg.deterministic;
  return j;
}

inline std::string opt_cell(const std::optional<double>& v) {
  return v ? io::format_double(*v) : std::string();
}

inline std::string scheme_color(transceivers::SchemeId id) {
  using S = transceivers::SchemeId;
  switch (id) {
    case S::kOokDirect: return "#1f77b4";
    case S::kBpskHomodyne: return "#2ca02c";
    case S::kBpskDolinar: return "#d62728";
    case S::kQubitProbe: return "#e377c2";
    case S::kHolevoUnrestricted: return "#000000";
    case S::kBpskHolevo: return "#9467bd";
    case S::kPskHolevo: return "#8c564b";
    case S::kGmHadamard: return "#ff7f0e";
    case S::kWState: return "#17becf";
  }
  return "#555555";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Curve data shared by pie-curve and tradeoff

struct CurveRow {
  transceivers::SchemeId scheme;
  double ns_transmitted = 0.0;
  transceivers::TransceiverCurvePoint point;  // evaluated at detected photons
};

inline std::vector<transceivers::SchemeId> resolve_curve_schemes(const RunConfig& cfg) {
  std::vector<transceivers::SchemeId> schemes(cfg.schemes);
  if (schemes.empty())
    schemes.assign(transceivers::kAllSchemes.begin(), transceivers::kAllSchemes.end());
  if (cfg.kappa < 1.0) {
    std::vector<transceivers::SchemeId> kept;
    for (auto s : schemes) {
      const bool single_photon =
          s == transceivers::SchemeId::kQubitProbe || s == transceivers::SchemeId::kWState;
      if (!single_photon) {
        kept.push_back(s);
      } else if (!cfg.schemes.empty()) {
        throw std::invalid_argument(
            std::string("scheme ") + std::string(transceivers::scheme_name(s)) +
            " has no kappa-substitution curve; use the simulate/budget commands for lossy "
            "single-photon schemes");
      }
    }
    schemes = std::move(kept);
  }
  if (schemes.empty()) throw std::invalid_argument("no schemes to evaluate");
  return schemes;
}

inline std::vector<CurveRow> compute_curves(const RunConfig& cfg,
                                            const std::vector<transceivers::SchemeId>& schemes) {
  if (!(cfg.ns_min > 0.0) || !(cfg.ns_max >= cfg.ns_min) || cfg.ns_points == 0)
    throw std::invalid_argument("invalid n_s grid");
  const std::vector<double> grid = log_spaced(cfg.ns_min, cfg.ns_max, cfg.ns_points);
  const transceivers::LossModel loss{cfg.kappa};
  loss.validate();
  std::vector<CurveRow> rows;
  rows.reserve(schemes.size() * grid.size());
  for (auto scheme : schemes) {
    for (double n_s : grid) {
      if (!transceivers::scheme_defined_at(scheme, cfg.kappa * n_s)) continue;
      CurveRow row;
      row.scheme = scheme;
      row.ns_transmitted = n_s;
      row.point = (cfg.kappa == 1.0)
                      ? transceivers::capacity_point(scheme, n_s, cfg.sweep_limits())
                      : transceivers::apply_loss(scheme, n_s, loss, cfg.sweep_limits());
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

namespace detail {

inline njson curve_rows_json(const std::vector<CurveRow>& rows) {
  njson curves = njson::array();
  const transceivers::SchemeId* current = nullptr;
  for (const auto& row : rows) {
    if (curves.empty() || !current || *current != row.scheme) {
      njson c;
      c["scheme"] = std::string(transceivers::scheme_name(row.scheme));
      c["points"] = njson::array();
      curves.push_back(std::move(c));
    }
    current = &row.scheme;
    njson p;
    p["ns_transmitted"] = row.ns_transmitted;
    p["ns_detected"] = row.point.n_s;
    p["capacity_bits_per_pixel"] = row.point.capacity_bits_per_pixel;
    p["pie_bits_per_photon"] = row.point.pie_bits_per_photon;
    p["pie_unit"] = row.point.aux.pie_unit == transceivers::PieUnit::kPerDetectedPhoton
                        ? "per_detected_photon"
                        : "per_transmitted_photon";
    if (row.point.aux.on_fraction) p["on_fraction"] = *row.point.aux.on_fraction;
    if (row.point.aux.psk_order) p["psk_order"] = *row.point.aux.psk_order;
    if (row.point.aux.gm_block) p["gm_block"] = *row.point.aux.gm_block;
    if (row.point.aux.gm_block_estimate) p["gm_block_estimate"] = *row.point.aux.gm_block_estimate;
    p["sweep_truncated"] = row.point.aux.sweep_truncated;
    curves.back()["points"].push_back(std::move(p));
  }
  return curves;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// pie-curve

inline void cmd_pie_curve(const RunConfig& cfg, std::ostream& os) {
  const auto schemes = resolve_curve_schemes(cfg);
  const auto rows = compute_curves(cfg, schemes);
  const OutputFormat fmt = cfg.effective_format();

  if (fmt == OutputFormat::kCsv) {
    io::CsvWriter csv(os);
    detail::common_metadata(csv, cfg);
    csv.metadata("schemes", detail::join_schemes(schemes));
    csv.metadata("ns_min", cfg.ns_min);
    csv.metadata("ns_max", cfg.ns_max);
    csv.metadata("ns_points", static_cast<double>(cfg.ns_points));
    csv.metadata("kappa", cfg.kappa);
    csv.header({"scheme", "n_s", "n_s_detected", "capacity_bits_per_pixel",
                "pie_bits_per_photon", "pie_unit", "on_fraction", "psk_order", "gm_block",
                "gm_block_estimate", "sweep_truncated"});
    for (const auto& row : rows) {
      const auto& aux = row.point.aux;
      csv.row({std::string(transceivers::scheme_name(row.scheme)),
               io::format_double(row.ns_transmitted), io::format_double(row.point.n_s),
               io::format_double(row.point.capacity_bits_per_pixel),
               io::format_double(row.point.pie_bits_per_photon),
               aux.pie_unit == transceivers::PieUnit::kPerDetectedPhoton ? "per_detected_photon"
                                                                         : "per_transmitted_photon",
               detail::opt_cell(aux.on_fraction),
               aux.psk_order ? std::to_string(*aux.psk_order) : std::string(),
               aux.gm_block ? std::to_string(*aux.gm_block) : std::string(),
               detail::opt_cell(aux.gm_block_estimate), aux.sweep_truncated ? "1" : "0"});
    }
    return;
  }
  if (fmt == OutputFormat::kJson) {
    njson j;
    j["command"] = std::string(command_name(cfg.command));
    j["config"] = detail::config_json(cfg, schemes);
    j["results"]["curves"] = detail::curve_rows_json(rows);
    os << j.dump(2) << "\n";
    return;
  }
  io::SvgPlot plot("Photon information efficiency vs photons per pixel",
                   "mean photons per pixel n_s", "PIE (bits per photon)");
  plot.set_log_x(true);
  for (auto scheme : schemes) {
    io::SvgSeries s;
    s.label = std::string(transceivers::scheme_name(scheme));
    s.color = detail::scheme_color(scheme);
    s.dashed = scheme == transceivers::SchemeId::kHolevoUnrestricted;
    for (const auto& row : rows)
      if (row.scheme == scheme) s.points.emplace_back(row.ns_transmitted, row.point.pie_bits_per_photon);
    plot.add_series(std::move(s));
  }
  plot.render(os);
}

// ---------------------------------------------------------------------------
// tradeoff

inline void cmd_tradeoff(const RunConfig& cfg, std::ostream& os) {
  const auto schemes = resolve_curve_schemes(cfg);
  const auto rows = compute_curves(cfg, schemes);
  const OutputFormat fmt = cfg.effective_format();

  if (fmt == OutputFormat::kCsv) {
    io::CsvWriter csv(os);
    detail::common_metadata(csv, cfg);
    csv.metadata("schemes", detail::join_schemes(schemes));
    csv.metadata("ns_min", cfg.ns_min);
    csv.metadata("ns_max", cfg.ns_max);
    csv.metadata("ns_points", static_cast<double>(cfg.ns_points));
    csv.metadata("kappa", cfg.kappa);
    csv.header({"scheme", "n_s", "capacity_bits_per_pixel", "pie_bits_per_photon",
                "holevo_frontier_bits_per_pixel", "conventional"});
    for (const auto& row : rows) {
      csv.row({std::string(transceivers::scheme_name(row.scheme)),
               io::format_double(row.ns_transmitted),
               io::format_double(row.point.capacity_bits_per_pixel),
               io::format_double(row.point.pie_bits_per_photon),
               io::format_double(transceivers::holevo_g(row.point.n_s)),
               row.scheme == transceivers::SchemeId::kOokDirect ? "1" : "0"});
    }
    return;
  }
  if (fmt == OutputFormat::kJson) {
    njson j;
    j["command"] = std::string(command_name(cfg.command));
    j["config"] = detail::config_json(cfg, schemes);
    njson curves = detail::curve_rows_json(rows);
    for (auto& c : curves) {
      c["conventional"] =
          c["scheme"] == std::string(transceivers::scheme_name(transceivers::SchemeId::kOokDirect));
    }
    j["results"]["curves"] = std::move(curves);
    os << j.dump(2) << "\n";
    return;
  }
  io::SvgPlot plot("Photon efficiency vs encoding efficiency", "capacity (bits per pixel)",
                   "PIE (bits per photon)");
  plot.set_log_x(true);
  for (auto scheme : schemes) {
    io::SvgSeries s;
    s.label = std::string(transceivers::scheme_name(scheme));
    s.color = detail::scheme_color(scheme);
    s.dashed = scheme == transceivers::SchemeId::kHolevoUnrestricted;
    for (const auto& row : rows)
      if (row.scheme == scheme)
        s.points.emplace_back(row.point.capacity_bits_per_pixel, row.point.pie_bits_per_photon);
    plot.add_series(std::move(s));
  }
  plot.render(os);
}

// ---------------------------------------------------------------------------
// simulate

inline montecarlo::TrialPlan simulate_plan(const RunConfig& cfg) {
  optics::SimScheme sim = optics::SimScheme::kCoherentGm;
  if (!cfg.schemes.empty()) {
    if (cfg.schemes.size() != 1)
      throw std::invalid_argument("simulate takes exactly one scheme (gm_hadamard or w_state)");
    if (cfg.schemes[0] == transceivers::SchemeId::kGmHadamard)
      sim = optics::SimScheme::kCoherentGm;
    else if (cfg.schemes[0] == transceivers::SchemeId::kWState)
      sim = optics::SimScheme::kWState;
    else
      throw std::invalid_argument("simulate supports the gm_hadamard and w_state schemes only");
  }
  if (cfg.m > kSimulateMaxBlock)
    throw std::invalid_argument("simulate caps the block size at 2^20 pixels");
  montecarlo::TrialPlan plan;
  plan.scheme = sim;
  plan.m = cfg.m;
  plan.kappa = cfg.kappa;
  plan.k_copies = (sim == optics::SimScheme::kWState) ? cfg.k_copies : 1;
  // Default coherent operating point: M n_s = ln(1000), i.e. word error near 1e-3.
  plan.n_s = (sim == optics::SimScheme::kCoherentGm)
                 ? (cfg.ns > 0.0 ? cfg.ns : std::log(1000.0) / static_cast<double>(cfg.m))
                 : 0.0;
  plan.trials = cfg.trials;
  plan.master_seed = cfg.seed;
  plan.validate();
  return plan;
}

inline void cmd_simulate(const RunConfig& cfg, std::ostream& os) {
  const montecarlo::TrialPlan plan = simulate_plan(cfg);
  const montecarlo::ErrorEstimate est = montecarlo::estimate_word_error(plan);
  const double analytic_pe = montecarlo::analytic_word_error(plan);
  const double analytic_er = montecarlo::analytic_erasure_rate(plan);
  const double var_pe = analytic_pe * (1.0 - analytic_pe);
  const double var_er = analytic_er * (1.0 - analytic_er);
  const bool z_pe_defined = var_pe > 0.0;
  const bool z_er_defined = var_er > 0.0;
  const double z_pe = z_pe_defined ? montecarlo::z_score(est.p_e_hat, analytic_pe, est.trials) : 0.0;
  const double z_er =
      z_er_defined ? montecarlo::z_score(est.erasure_rate, analytic_er, est.trials) : 0.0;
  const char* scheme_label =
      plan.scheme == optics::SimScheme::kCoherentGm ? "gm_hadamard" : "w_state";

  const OutputFormat fmt = cfg.effective_format();
  if (fmt == OutputFormat::kSvg)
    throw std::invalid_argument("simulate emits csv or json, not svg");

  if (fmt == OutputFormat::kJson) {
    njson j;
    j["command"] = std::string(command_name(cfg.command));
    njson jc = detail::config_json(cfg, {});
    jc["schemes"] = njson::array({scheme_label});
    jc["ns"] = plan.n_s;
    jc["k_copies"] = plan.k_copies;
    if (!cfg.deterministic) jc["generated_at"] = detail::iso_timestamp();
    j["config"] = std::move(jc);
    njson r;
    r["scheme"] = scheme_label;
    r["m"] = plan.m;
    r["ns_per_pixel"] = plan.n_s;
    r["kappa"] = plan.kappa;
    r["k_copies"] = plan.k_copies;
    r["trials"] = est.trials;
    r["errors"] = est.errors;
    r["erasures"] = est.erasures;
    r["p_e_hat"] = est.p_e_hat;
    r["standard_error"] = est.standard_error;
    r["erasure_rate"] = est.erasure_rate;
    r["analytic_p_e"] = analytic_pe;
    r["analytic_erasure_rate"] = analytic_er;
    r["z_p_e"] = z_pe_defined ? njson(z_pe) : njson(nullptr);
    r["z_erasure"] = z_er_defined ? njson(z_er) : njson(nullptr);
    j["results"] = std::move(r);
    os << j.dump(2) << "\n";
    return;
  }

  io::CsvWriter csv(os);
  detail::common_metadata(csv, cfg);
  csv.metadata("scheme", scheme_label);
  csv.metadata("m", static_cast<double>(plan.m));
  csv.metadata("ns_per_pixel", plan.n_s);
  csv.metadata("kappa", plan.kappa);
  csv.metadata("k_copies", static_cast<double>(plan.k_copies));
  csv.header({"trials", "errors", "erasures", "p_e_hat", "standard_error", "erasure_rate",
              "analytic_p_e", "analytic_erasure_rate", "z_p_e", "z_erasure"});
  csv.row({std::to_string(est.trials), std::to_string(est.errors), std::to_string(est.erasures),
           io::format_double(est.p_e_hat), io::format_double(est.standard_error),
           io::format_double(est.erasure_rate), io::format_double(analytic_pe),
           io::format_double(analytic_er), z_pe_defined ? io::format_double(z_pe) : std::string(),
           z_er_defined ? io::format_double(z_er) : std::string()});
}

// ---------------------------------------------------------------------------
// exponent

struct ExponentSummary {
  double pie = 0.0;
  bool feasible = false;
  exponents::PieLineMinimum line_min;                      // when feasible
  std::optional<montecarlo::PixelBudgetResult> gm_budget;  // constructive comparisons
  std::optional<montecarlo::PixelBudgetResult> w_budget;
};

inline std::vector<ExponentSummary> exponent_summaries(const RunConfig& cfg) {
  std::vector<ExponentSummary> out;
  for (double pie : cfg.pies) {
    ExponentSummary s;
    s.pie = pie;
    try {
      s.line_min = exponents::min_pixels_for_pie(pie, cfg.epsilon);
      s.feasible = true;
    } catch (const std::runtime_error&) {
      s.feasible = false;
    }
    try {
      s.gm_budget = montecarlo::pixels_for_target(optics::SimScheme::kCoherentGm, pie, cfg.epsilon);
    } catch (const std::runtime_error&) {
    }
    try {
      s.w_budget = montecarlo::pixels_for_target(optics::SimScheme::kWState, pie, cfg.epsilon);
    } catch (const std::runtime_error&) {
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline void cmd_exponent(const RunConfig& cfg, std::ostream& os) {
  if (!(cfg.pie_min > 0.0) || !(cfg.pie_max >= cfg.pie_min) || cfg.pie_points == 0)
    throw std::invalid_argument("invalid pie grid");
  const auto table = exponents::exponent_contours(cfg.ns_min, cfg.ns_max, cfg.ns_points,
                                                  cfg.pie_min, cfg.pie_max, cfg.pie_points,
                                                  cfg.epsilon);
  const auto summaries = exponent_summaries(cfg);
  const OutputFormat fmt = cfg.effective_format();

  if (fmt == OutputFormat::kCsv) {
    io::CsvWriter csv(os);
    detail::common_metadata(csv, cfg);
    csv.metadata("epsilon", cfg.epsilon);
    csv.metadata("ns_min", cfg.ns_min);
    csv.metadata("ns_max", cfg.ns_max);
    csv.metadata("ns_points", static_cast<double>(cfg.ns_points));
    csv.metadata("pie_min", cfg.pie_min);
    csv.metadata("pie_max", cfg.pie_max);
    csv.metadata("pie_points", static_cast<double>(cfg.pie_points));
    for (const auto& s : summaries) {
      std::string v;
      if (s.feasible) {
        v = "m_ub_min=" + io::format_double(static_cast<double>(s.line_min.budget.m_ub)) +
            "; ns_at_min=" + io::format_double(s.line_min.n_s) +
            "; e_lb=" + io::format_double(s.line_min.e_lb);
      } else {
        v = "infeasible";
      }
      if (s.gm_budget) v += "; gm_pixels=" + std::to_string(s.gm_budget->m);
      if (s.w_budget)
        v += "; wstate_pixels=" + std::to_string(s.w_budget->m) +
             "; wstate_copies=" + std::to_string(s.w_budget->k_copies);
      csv.metadata("summary_pie_" + io::format_double(s.pie), v);
    }
    csv.header({"n_s", "pie", "rate_bits_per_pixel", "e_lb_nats", "m_ub", "boundary_pie"});
    for (std::size_t pi = 0; pi < table.pie_grid.size(); ++pi) {
      for (std::size_t ni = 0; ni < table.ns_grid.size(); ++ni) {
        const auto& pt = table.at(pi, ni);
        csv.row({io::format_double(pt.n_s), io::format_double(pt.pie),
                 io::format_double(pt.rate_bits), io::format_double(pt.e_lb),
                 io::format_double(pt.m_ub), io::format_double(table.boundary_pie[ni])});
      }
    }
    return;
  }

  if (fmt == OutputFormat::kJson) {
    njson j;
    j["command"] = std::string(command_name(cfg.command));
    j["config"] = detail::config_json(cfg, {});
    njson r;
    r["epsilon"] = table.epsilon;
    r["ns_grid"] = table.ns_grid;
    r["pie_grid"] = table.pie_grid;
    r["boundary_pie"] = table.boundary_pie;
    njson pts = njson::array();
    for (std::size_t pi = 0; pi < table.pie_grid.size(); ++pi) {
      njson row = njson::array();
      for (std::size_t ni = 0; ni < table.ns_grid.size(); ++ni) {
        const auto& pt = table.at(pi, ni);
        njson p;
        p["e_lb"] = pt.e_lb;
        p["m_ub"] = std::isfinite(pt.m_ub) ? njson(pt.m_ub) : njson(nullptr);
        row.push_back(std::move(p));
      }
      pts.push_back(std::move(row));
    }
    r["points"] = std::move(pts);
    njson sums = njson::array();
    for (const auto& s : summaries) {
      njson e;
      e["pie"] = s.pie;
      e["feasible"] = s.feasible;
      if (s.feasible) {
        e["m_ub_min"] = s.line_min.budget.m_ub;
        e["ns_at_min"] = s.line_min.n_s;
        e["rate_bits"] = s.line_min.rate_bits;
        e["e_lb"] = s.line_min.e_lb;
      }
      if (s.gm_budget) {
        e["gm_pixels"] = s.gm_budget->m;
        e["gm_ns_per_pixel"] = s.gm_budget->n_s_per_pixel;
      }
      if (s.w_budget) {
        e["wstate_pixels"] = s.w_budget->m;
        e["wstate_copies"] = s.w_budget->k_copies;
      }
      sums.push_back(std::move(e));
    }
    r["summaries"] = std::move(sums);
    j["results"] = std::move(r);
    os << j.dump(2) << "\n";
    return;
  }

  // SVG: constant-M_UB contours in the (n_s, PIE) plane plus the capacity
  // boundary. Contour vertices come from interpolating e_lb down each PIE
  // column to the level -ln(eps)/M_UB (e_lb is monotone in PIE).
  io::SvgPlot plot("Pixel-budget contours", "mean photons per pixel n_s", "PIE (bits per photon)");
  plot.set_log_x(true);
  const std::vector<double> levels = {1e3, 1e4, 1e5, 1e6, 1e8, 1e10};
  const std::vector<std::string> colors = {"#1f77b4", "#2ca02c", "#ff7f0e",
                                           "#d62728", "#9467bd", "#8c564b"};
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const double target_e = -std::log(table.epsilon) / levels[li];
    io::SvgSeries s;
    s.label = "M_UB=" + io::format_double(levels[li]);
    s.color = colors[li % colors.size()];
    for (std::size_t ni = 0; ni < table.ns_grid.size(); ++ni) {
      double prev_pie = 0.0, prev_e = -1.0;
      for (std::size_t pi = 0; pi < table.pie_grid.size(); ++pi) {
        const auto& pt = table.at(pi, ni);
        if (pi > 0 && prev_e >= target_e && pt.e_lb < target_e) {
          const double t = (prev_e - target_e) / (prev_e - pt.e_lb);
          s.points.emplace_back(table.ns_grid[ni], prev_pie + t * (pt.pie - prev_pie));
          break;
        }
        prev_pie = pt.pie;
        prev_e = pt.e_lb;
      }
    }
    if (!s.points.empty()) plot.add_series(std::move(s));
  }
  io::SvgSeries boundary;
  boundary.label = "capacity boundary";
  boundary.color = "#000000";
  boundary.dashed = true;
  for (std::size_t ni = 0; ni < table.ns_grid.size(); ++ni)
    boundary.points.emplace_back(table.ns_grid[ni],
                                 std::min(table.boundary_pie[ni], cfg.pie_max));
  plot.add_series(std::move(boundary));
  plot.render(os);
}

// ---------------------------------------------------------------------------
// budget

inline void cmd_budget(const RunConfig& cfg, std::ostream& os) {
  std::vector<optics::SimScheme> schemes;
  if (cfg.schemes.empty()) {
    schemes = {optics::SimScheme::kCoherentGm, optics::SimScheme::kWState};
  } else {
    for (auto s : cfg.schemes) {
      if (s == transceivers::SchemeId::kGmHadamard)
        schemes.push_back(optics::SimScheme::kCoherentGm);
      else if (s == transceivers::SchemeId::kWState)
        schemes.push_back(optics::SimScheme::kWState);
      else
        throw std::invalid_argument("budget supports the gm_hadamard and w_state schemes only");
    }
  }
  const std::vector<double> kappas = cfg.kappas.empty() ? std::vector<double>{cfg.kappa}
                                                        : cfg.kappas;
  if (cfg.pies.empty()) throw std::invalid_argument("budget needs at least one pie target");

  struct Row {
    std::string kind, scheme, status;
    double kappa = 1.0, pie_target = 0.0;
    montecarlo::PixelBudgetResult budget;
    exponents::PieLineMinimum line_min;
  };
  std::vector<Row> out_rows;
  for (double pie : cfg.pies) {
    for (double kappa : kappas) {
      for (auto scheme : schemes) {
        Row r;
        r.kind = "constructive";
        r.scheme = scheme == optics::SimScheme::kCoherentGm ? "gm_hadamard" : "w_state";
        r.kappa = kappa;
        r.pie_target = pie;
        try {
          r.budget = montecarlo::pixels_for_target(scheme, pie, cfg.epsilon, kappa);
          r.status = "ok";
        } catch (const std::exception&) {
          r.status = "infeasible";
        }
        out_rows.push_back(std::move(r));
      }
    }
    Row r;
    r.kind = "random_coding_floor";
    r.scheme = "bpsk_optimal_jdr";
    r.kappa = 1.0;
    r.pie_target = pie;
    try {
      r.line_min = exponents::min_pixels_for_pie(pie, cfg.epsilon);
      r.status = "ok";
    } catch (const std::exception&) {
      r.status = "infeasible";
    }
    out_rows.push_back(std::move(r));
  }

  const OutputFormat fmt = cfg.effective_format();
  if (fmt == OutputFormat::kSvg)
    throw std::invalid_argument("budget emits csv or json, not svg");

  if (fmt == OutputFormat::kCsv) {
    io::CsvWriter csv(os);
    detail::common_metadata(csv, cfg);
    csv.metadata("epsilon", cfg.epsilon);
    csv.header({"kind", "scheme", "kappa", "pie_target", "epsilon", "status", "m", "log2_m",
                "k_copies", "ns_per_pixel", "pie_achieved", "p_e_analytic"});
    for (const auto& r : out_rows) {
      std::vector<std::string> cells = {r.kind,
                                        r.scheme,
                                        io::format_double(r.kappa),
                                        io::format_double(r.pie_target),
                                        io::format_double(cfg.epsilon),
                                        r.status};
      if (r.status != "ok") {
        cells.insert(cells.end(), {"", "", "", "", "", ""});
      } else if (r.kind == "constructive") {
        cells.push_back(std::to_string(r.budget.m));
        cells.push_back(std::to_string(log2_exact(r.budget.m)));
        cells.push_back(std::to_string(r.budget.k_copies));
        cells.push_back(io::format_double(r.budget.n_s_per_pixel));
        cells.push_back(io::format_double(r.budget.pie));
        cells.push_back(io::format_double(r.budget.p_e));
      } else {
        cells.push_back(std::to_string(r.line_min.budget.m_ub));
        cells.push_back("");
        cells.push_back("");
        cells.push_back(io::format_double(r.line_min.n_s));
        cells.push_back(io::format_double(r.pie_target));
        cells.push_back(io::format_double(cfg.epsilon));
      }
      csv.row(cells);
    }
    return;
  }

  njson j;
  j["command"] = std::string(command_name(cfg.command));
  j["config"] = detail::config_json(cfg, {});
  njson rows = njson::array();
  for (const auto& r : out_rows) {
    njson e;
    e["kind"] = r.kind;
    e["scheme"] = r.scheme;
    e["kappa"] = r.kappa;
    e["pie_target"] = r.pie_target;
    e["epsilon"] = cfg.epsilon;
    e["status"] = r.status;
    if (r.status == "ok") {
      if (r.kind == "constructive") {
        e["m"] = r.budget.m;
        e["log2_m"] = log2_exact(r.budget.m);
        e["k_copies"] = r.budget.k_copies;
        e["ns_per_pixel"] = r.budget.n_s_per_pixel;
        e["pie_achieved"] = r.budget.pie;
        e["p_e_analytic"] = r.budget.p_e;
      } else {
        e["m_ub"] = r.line_min.budget.m_ub;
        e["ns_at_min"] = r.line_min.n_s;
        e["e_lb"] = r.line_min.e_lb;
      }
    }
    rows.push_back(std::move(e));
  }
  j["results"]["rows"] = std::move(rows);
  os << j.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// dispatch

inline void run_command(const RunConfig& cfg, std::ostream& os) {
  switch (cfg.command) {
    case Command::kPieCurve: return cmd_pie_curve(cfg, os);
    case Command::kTradeoff: return cmd_tradeoff(cfg, os);
    case Command::kSimulate: return cmd_simulate(cfg, os);
    case Command::kExponent: return cmd_exponent(cfg, os);
    case Command::kBudget: return cmd_budget(cfg, os);
  }
  throw std::logic_error("run_command: unknown command");
}

// Returns a process exit code: 0 on success, 1 on any failure.
inline int run(const RunConfig& cfg) {
  try {
    if (cfg.out_path.empty()) {
      run_command(cfg, std::cout);
      std::cout.flush();
    } else {
      std::ofstream os(cfg.out_path, std::ios::binary);
      if (!os) throw std::runtime_error("cannot open output path: " + cfg.out_path);
      run_command(cfg, os);
      if (!os) throw std::runtime_error("write failed: " + cfg.out_path);
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "photon-reader: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace photon_reader::cli
