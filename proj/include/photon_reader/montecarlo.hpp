// Monte Carlo verification layer: word-error estimation for the simulated
// transceivers, induced-channel estimation, analytic error laws, and pixel
// budgets for hitting a target PIE at a target word-error probability.
//
// Reproducibility contract: every trial draws from its own substream keyed by
// (master_seed, trial_index), and worker threads only partition the trial
// index space, so identical plans produce bit-identical estimates regardless
// of thread count. The cached fast paths below replicate the streaming
// pipeline draw for draw.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "photon_reader/core.hpp"
#include "photon_reader/optics.hpp"
#include "photon_reader/dmc.hpp"
#include "photon_reader/rng.hpp"

namespace photon_reader::montecarlo {

struct TrialPlan {
  optics::SimScheme scheme = optics::SimScheme::kCoherentGm;
  std::size_t m = 2;            // pixels per codeword, power of two
  double n_s = 0.0;             // coherent probe photons per pixel
  double kappa = 1.0;           // round-trip transmissivity
  std::size_t k_copies = 1;     // W-state transmissions per codeword
  std::size_t trials = 1;      // word-error: total trials; channel: trials per input
  std::uint64_t master_seed = 0;

  void validate() const {
    optics::ReadCycleParams rc{scheme, m, n_s, kappa};
    rc.validate();
    if (trials == 0) throw std::invalid_argument("TrialPlan: need at least one trial");
    if (k_copies == 0) throw std::invalid_argument("TrialPlan: k_copies must be >= 1");
    if (scheme == optics::SimScheme::kCoherentGm && k_copies != 1)
      throw std::invalid_argument("TrialPlan: k_copies applies to the W-state scheme only");
  }

  optics::ReadCycleParams read_cycle_params() const { return {scheme, m, n_s, kappa}; }
};

struct ErrorEstimate {
  double p_e_hat = 0.0;
  double standard_error = 0.0;  // binomial: sqrt(p(1-p)/trials)
  double erasure_rate = 0.0;    // no-click cycles (all K copies lost, for W state)
  std::uint64_t trials = 0;
  std::uint64_t errors = 0;
  std::uint64_t erasures = 0;
};

// ---------------------------------------------------------------------------
// Analytic laws the simulator is checked against

// Coherent Hadamard/Green Machine word error: all detected signal energy
// x = kappa * M * n_s lands on the correct output port, so the only failure
// is a no-click cycle resolved by a wrong guess.
inline double gm_word_error(std::size_t m, double n_s, double kappa = 1.0) {
  const double md = static_cast<double>(m);
  const double x = kappa * md * n_s;
  return (md - 1.0) / md * std::exp(-x);
}

// W-state word error with K transmissions: the receiver decodes from the
// first copy whose photon survives (that copy's click port is exact), so an
// error requires all K photons lost and then a wrong guess.
inline double wstate_word_error(std::size_t m, double kappa, std::size_t k_copies) {
  const double md = static_cast<double>(m);
  return (md - 1.0) / md * std::pow(1.0 - kappa, static_cast<double>(k_copies));
}

inline double analytic_word_error(const TrialPlan& plan) {
  return plan.scheme == optics::SimScheme::kCoherentGm
             ? gm_word_error(plan.m, plan.n_s, plan.kappa)
             : wstate_word_error(plan.m, plan.kappa, plan.k_copies);
}

inline double analytic_erasure_rate(const TrialPlan& plan) {
  if (plan.scheme == optics::SimScheme::kCoherentGm)
    return std::exp(-plan.kappa * static_cast<double>(plan.m) * plan.n_s);
  return std::pow(1.0 - plan.kappa, static_cast<double>(plan.k_copies));
}

// Gaussian z-score of an estimate against an analytic value, using the
// analytic binomial deviation. Zero when both variance and difference vanish.
inline double z_score(double p_hat, double p_true, std::uint64_t trials) {
  const double var = p_true * (1.0 - p_true) / static_cast<double>(trials);
  const double diff = p_hat - p_true;
  if (var <= 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return diff / std::sqrt(var);
}

// ---------------------------------------------------------------------------
// Deterministic threaded trial harness

namespace detail {

// Runs per_trial(index, rng, counts) for index in [0, trials), partitioned
// into contiguous chunks across the thread budget; partial counts merge in
// chunk order, so the total is schedule-independent.
template <class Counts, class PerTrial>
Counts run_trials(std::size_t trials, std::uint64_t master_seed, const PerTrial& per_trial) {
  const unsigned budget = thread_budget();
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(budget, std::max<std::size_t>(trials, 1)));
  if (workers <= 1) {
    Counts total{};
    for (std::size_t i = 0; i < trials; ++i) {
      std::mt19937_64 g = rng::substream(master_seed, i);
      per_trial(i, g, total);
    }
    return total;
  }
  std::vector<Counts> partials(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::size_t chunk = (trials + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      const std::size_t lo = std::min(trials, static_cast<std::size_t>(w) * chunk);
      const std::size_t hi = std::min(trials, lo + chunk);
      Counts local{};
      for (std::size_t i = lo; i < hi; ++i) {
        std::mt19937_64 g = rng::substream(master_seed, i);
        per_trial(i, g, local);
      }
      partials[w] = std::move(local);
    });
  }
  for (auto& th : pool) th.join();
  Counts total{};
  for (auto& p : partials) total += p;
  return total;
}

// Post-network state for one codeword (probe -> pattern -> loss -> butterfly),
// shared by the cached tables and the streaming path.
inline optics::ModeAmplitudes transmitted_state(const optics::ReadCycleParams& rc,
                                                std::size_t codeword) {
  optics::HadamardCodebook book(rc.m);
  optics::ModeAmplitudes st = (rc.scheme == optics::SimScheme::kCoherentGm)
                                  ? optics::coherent_probe(rc.m, rc.n_s)
                                  : optics::prepare_wstate(rc.m);
  optics::modulate_in_place(st, book.pattern(codeword));
  optics::apply_uniform_loss_in_place(st, rc.kappa);
  optics::green_machine_in_place(st);
  return st;
}

// Caching the per-codeword output statistics turns a trial into O(M) uniform
// draws with no interferometer work. Row j holds, per port k, the click
// probability 1 - exp(-|a_k|^2) (coherent) or the click mass |c_k|^2
// (single photon) — the exact doubles the streaming detectors would compute.
inline constexpr std::size_t kMaxCachedBlock = 2048;

inline std::vector<double> outcome_table(const optics::ReadCycleParams& rc) {
  const std::size_t m = rc.m;
  std::vector<double> table(m * m);
  for (std::size_t j = 0; j < m; ++j) {
    const optics::ModeAmplitudes st = transmitted_state(rc, j);
    for (std::size_t k = 0; k < m; ++k) {
      const double power = std::norm(st.amps[k]);
      table[j * m + k] =
          (rc.scheme == optics::SimScheme::kCoherentGm) ? -std::expm1(-power) : power;
    }
  }
  return table;
}

// Coherent detection from a click-probability row; draw-for-draw identical to
// optics::detect_coherent on the corresponding state.
template <class Row>
inline optics::DetectionOutcome detect_coherent_from_row(const Row& p_click, std::size_t m,
                                                         std::mt19937_64& g,
                                                         std::vector<std::uint32_t>& scratch) {
  scratch.clear();
  for (std::size_t k = 0; k < m; ++k)
    if (rng::uniform01(g) < p_click[k]) scratch.push_back(static_cast<std::uint32_t>(k));
  optics::DetectionOutcome out;
  if (scratch.size() == 1) {
    out.decoded = scratch[0];
  } else if (scratch.empty()) {
    out.was_erasure = true;
    out.decoded = rng::uniform_index(g, m);
  } else {
    out.decoded = scratch[rng::uniform_index(g, scratch.size())];
  }
  return out;
}

// Single-photon port draw from a click-mass row: port index, or m for
// erasure. Consumes exactly one uniform; the all-copies-lost guess is the
// caller's job. Identical cumulative sums to optics::detect_single_photon.
template <class Row>
inline std::size_t sample_port_or_erasure(const Row& mass, std::size_t m, std::mt19937_64& g) {
  const double u = rng::uniform01(g);
  double cum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    cum += mass[k];
    if (u < cum) return k;
  }
  return m;
}

struct WordErrorCounts {
  std::uint64_t errors = 0;
  std::uint64_t erasures = 0;
  WordErrorCounts& operator+=(const WordErrorCounts& o) {
    errors += o.errors;
    erasures += o.erasures;
    return *this;
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Word-error estimation

// Each trial draws a uniformly random codeword, runs one read cycle (K cycles
// for the W-state scheme, decoding from the first surviving photon), and
// counts decoding errors and no-click cycles.
inline ErrorEstimate estimate_word_error(const TrialPlan& plan) {
  plan.validate();
  const std::size_t m = plan.m;
  const auto rc = plan.read_cycle_params();
  const bool cached = m <= detail::kMaxCachedBlock;
  const std::vector<double> table = cached ? detail::outcome_table(rc) : std::vector<double>{};

  detail::WordErrorCounts counts;
  if (plan.scheme == optics::SimScheme::kCoherentGm) {
    counts = detail::run_trials<detail::WordErrorCounts>(
        plan.trials, plan.master_seed,
        [&](std::size_t, std::mt19937_64& g, detail::WordErrorCounts& c) {
          static thread_local std::vector<std::uint32_t> scratch;
          const std::size_t sent = rng::uniform_index(g, m);
          optics::DetectionOutcome out;
          if (cached) {
            out = detail::detect_coherent_from_row(table.data() + sent * m, m, g, scratch);
          } else {
            const optics::ModeAmplitudes st = detail::transmitted_state(rc, sent);
            out = optics::detect_coherent(st, g);
          }
          if (out.was_erasure) ++c.erasures;
          if (out.decoded != sent) ++c.errors;
        });
  } else {
    counts = detail::run_trials<detail::WordErrorCounts>(
        plan.trials, plan.master_seed,
        [&](std::size_t, std::mt19937_64& g, detail::WordErrorCounts& c) {
          const std::size_t sent = rng::uniform_index(g, m);
          const std::vector<double> row_storage =
              cached ? std::vector<double>{}
                     : [&] {
                         const optics::ModeAmplitudes st = detail::transmitted_state(rc, sent);
                         std::vector<double> r(m);
                         for (std::size_t k = 0; k < m; ++k) r[k] = std::norm(st.amps[k]);
                         return r;
                       }();
          const double* row = cached ? table.data() + sent * m : row_storage.data();
          std::size_t decoded = m;
          for (std::size_t copy = 0; copy < plan.k_copies && decoded == m; ++copy)
            decoded = detail::sample_port_or_erasure(row, m, g);
          if (decoded == m) {
            ++c.erasures;
            decoded = rng::uniform_index(g, m);
          }
          if (decoded != sent) ++c.errors;
        });
  }

  ErrorEstimate est;
  est.trials = plan.trials;
  est.errors = counts.errors;
  est.erasures = counts.erasures;
  const double t = static_cast<double>(plan.trials);
  est.p_e_hat = static_cast<double>(counts.errors) / t;
  est.erasure_rate = static_cast<double>(counts.erasures) / t;
  est.standard_error = std::sqrt(std::max(est.p_e_hat * (1.0 - est.p_e_hat), 0.0) / t);
  return est;
}

// ---------------------------------------------------------------------------
// Induced-channel estimation

// Empirical M x (M+1) transition matrix of one read cycle: plan.trials trials
// per input codeword; the last column is the no-click (erasure) outcome,
// recorded before any random-guess resolution. Multi-click coherent cycles
// record the resolved port, since that is a genuine (flagged) decode.
inline dmc::TransitionMatrix estimate_induced_channel(const TrialPlan& plan) {
  plan.validate();
  if (plan.trials < 100)
    throw std::invalid_argument("estimate_induced_channel: need >= 100 trials per input");
  const std::size_t m = plan.m;
  const std::size_t cols = m + 1;
  const auto rc = plan.read_cycle_params();
  const bool cached = m <= detail::kMaxCachedBlock;
  const std::vector<double> table = cached ? detail::outcome_table(rc) : std::vector<double>{};

  struct Counts {
    std::vector<std::uint64_t> c;
    Counts& operator+=(const Counts& o) {
      if (c.size() < o.c.size()) c.resize(o.c.size(), 0);
      for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
      return *this;
    }
  };

  const std::size_t total = m * plan.trials;
  Counts counts = detail::run_trials<Counts>(
      total, plan.master_seed, [&](std::size_t i, std::mt19937_64& g, Counts& c) {
        if (c.c.empty()) c.c.assign(m * cols, 0);
        static thread_local std::vector<std::uint32_t> scratch;
        const std::size_t sent = i / plan.trials;
        std::size_t col;
        if (plan.scheme == optics::SimScheme::kCoherentGm) {
          optics::DetectionOutcome out;
          if (cached) {
            out = detail::detect_coherent_from_row(table.data() + sent * m, m, g, scratch);
          } else {
            const optics::ModeAmplitudes st = detail::transmitted_state(rc, sent);
            out = optics::detect_coherent(st, g);
          }
          col = out.was_erasure ? m : out.decoded;
        } else {
          std::vector<double> row_storage;
          const double* row;
          if (cached) {
            row = table.data() + sent * m;
          } else {
            const optics::ModeAmplitudes st = detail::transmitted_state(rc, sent);
            row_storage.resize(m);
            for (std::size_t k = 0; k < m; ++k) row_storage[k] = std::norm(st.amps[k]);
            row = row_storage.data();
          }
          col = detail::sample_port_or_erasure(row, m, g);
        }
        ++c.c[sent * cols + col];
      });

  std::vector<double> w(m * cols);
  const double t = static_cast<double>(plan.trials);
  for (std::size_t i = 0; i < m * cols; ++i) w[i] = static_cast<double>(counts.c[i]) / t;
  return dmc::TransitionMatrix(m, cols, std::move(w));
}

// ---------------------------------------------------------------------------
// Pixel budgets

// Smallest power-of-two codeword length (and repetition count, for the
// W-state scheme) achieving PIE >= pie_target bits per detected photon with
// analytic word error <= epsilon, under round-trip transmissivity kappa.
struct PixelBudgetResult {
  optics::SimScheme scheme = optics::SimScheme::kCoherentGm;
  std::uint64_t m = 0;          // pixels per codeword
  std::uint64_t k_copies = 1;   // transmissions per codeword (1 for coherent)
  double n_s_per_pixel = 0.0;   // probe photons per pixel (1/M for W state)
  double pie = 0.0;             // achieved bits per detected photon
  double p_e = 0.0;             // analytic word-error probability
};

namespace detail {

// Solve (1 - e^{-x}) / x = r for x > 0; the left side decreases from 1 to 0.
inline double solve_click_efficiency(double r) {
  if (!(r > 0.0 && r < 1.0))
    throw std::domain_error("solve_click_efficiency: need r in (0, 1)");
  const auto f = [](double x) { return -std::expm1(-x) / x; };
  double lo = 1e-12, hi = 1.0;
  while (f(hi) > r) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > r ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

inline PixelBudgetResult pixels_for_target(optics::SimScheme scheme, double pie_target,
                                           double epsilon, double kappa = 1.0) {
  if (!(pie_target > 0.0)) throw std::domain_error("pixels_for_target: pie must be > 0");
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::domain_error("pixels_for_target: epsilon outside (0, 1]");
  if (!(kappa > 0.0 && kappa <= 1.0))
    throw std::domain_error("pixels_for_target: kappa outside (0, 1]");

  PixelBudgetResult out;
  out.scheme = scheme;
  for (unsigned mexp = 1; mexp <= 62; ++mexp) {
    const double log2m = static_cast<double>(mexp);
    const double md = std::ldexp(1.0, static_cast<int>(mexp));
    if (scheme == optics::SimScheme::kCoherentGm) {
      // Need (1 - e^{-x}) log2(M) / x = pie with x = kappa M n_s detected
      // photons per codeword, subject to word error (M-1)/M e^{-x} <= eps.
      if (!(log2m > pie_target)) continue;
      const double x = detail::solve_click_efficiency(pie_target / log2m);
      const double p_e = (md - 1.0) / md * std::exp(-x);
      if (p_e <= epsilon) {
        out.m = std::uint64_t{1} << mexp;
        out.k_copies = 1;
        out.n_s_per_pixel = x / (kappa * md);
        out.pie = pie_target;
        out.p_e = p_e;
        return out;
      }
    } else {
      // PIE = log2(M) / (kappa K) per detected photon; word error
      // (M-1)/M (1-kappa)^K <= eps. Smallest K meeting the error target,
      // feasible when it still meets the PIE target.
      const std::uint64_t k_max = static_cast<std::uint64_t>(log2m / (kappa * pie_target));
      if (k_max == 0) continue;
      std::uint64_t k_min = 1;
      if (kappa < 1.0) {
        const double ratio = epsilon * md / (md - 1.0);
        if (ratio < 1.0)
          k_min = static_cast<std::uint64_t>(std::ceil(std::log(ratio) / std::log1p(-kappa)));
        k_min = std::max<std::uint64_t>(k_min, 1);
      }
      if (k_min <= k_max) {
        out.m = std::uint64_t{1} << mexp;
        out.k_copies = k_min;
        out.n_s_per_pixel = 1.0 / md;
        out.pie = log2m / (kappa * static_cast<double>(k_min));
        out.p_e = (kappa < 1.0)
                      ? (md - 1.0) / md * std::pow(1.0 - kappa, static_cast<double>(k_min))
                      : 0.0;
        return out;
      }
    }
  }
  throw std::runtime_error("pixels_for_target: no feasible block length up to 2^62");
}

}  // namespace photon_reader::montecarlo
