// Random-coding error-exponent lower bounds for binary-phase coherent-state
// codes, and the pixel budgets they imply for hitting a target word-error
// probability at a given photon information efficiency.
//
// The codeword ensemble is i.i.d. binary phase with prior p on one symbol;
// the two letter states have Gram overlap gamma = e^{-2 n_s}. The Gallager
// functional for a pure-state binary ensemble reduces to a two-eigenvalue
// expression, maximized here over the Gallager parameter s in [0, 1] and the
// prior p in [0, 1].
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "photon_reader/core.hpp"
#include "photon_reader/dmc.hpp"

namespace photon_reader::exponents {

// Gram overlap <alpha|-alpha> of the two binary-phase letter states.
inline double gram_overlap(double n_s) {
  if (!(n_s >= 0.0)) throw std::domain_error("gram_overlap: n_s must be >= 0");
  return std::exp(-2.0 * n_s);
}

// Gallager E_0 in nats for the binary pure-state ensemble:
//   E_0(s, p) = -ln(l_+^{1+s} + l_-^{1+s}),
//   l_+- = 1/2 +- sqrt(1/4 - p (1-p) (1 - gamma^2)),
// the eigenvalues of the ensemble-average state. Concave in s for fixed p.
inline double e0_pure_binary(double s, double prior, double gamma) {
  if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("e0_pure_binary: s outside [0,1]");
  if (!(prior >= 0.0 && prior <= 1.0))
    throw std::domain_error("e0_pure_binary: prior outside [0,1]");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::domain_error("e0_pure_binary: gamma outside [0,1]");
  const double disc = std::max(0.25 - prior * (1.0 - prior) * (1.0 - gamma * gamma), 0.0);
  const double root = std::sqrt(disc);
  const double lp = 0.5 + root;
  const double lm = 0.5 - root;
  // With l_+ + l_- = 1, write the trace as 1 + sum_i l_i expm1(s ln l_i) and
  // take -log1p. Both expm1 terms are negative (no cancellation), so the
  // result keeps full relative precision as s -> 0, where the direct
  // pow/log form bottoms out at an absolute ~1e-16 noise floor. The sharp
  // zero crossing of the sphere-packing objective at the ensemble capacity
  // depends on this.
  double u = lp * std::expm1(s * std::log(lp));
  if (lm > 0.0) u += lm * std::expm1(s * std::log(lm));
  return -std::log1p(u);
}

struct ExponentBound {
  double n_s = 0.0;
  double rate_bits = 0.0;  // bits per pixel
  double e_lb = 0.0;       // exponent lower bound, nats per pixel
  double s_star = 0.0;     // maximizing Gallager parameter
  double p_star = 0.5;     // maximizing prior
};

namespace detail {

// Golden-section maximization of a unimodal f on [lo, hi] to argument
// tolerance tol. Returns (argmax, max).
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + kInvPhi * (b - a); f2 = f(x2);
    } else {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - kInvPhi * (b - a); f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

}  // namespace detail

// max over s in [0,1] and p in [0,1] of E_0(s, p) - s R, clamped at zero.
// E_0 is concave in s (golden section is exact there); the prior is handled
// by a symmetric coarse-to-fine grid. The optimum prior is 1/2 by the
// symmetry E_0(s, p) = E_0(s, 1-p), but the 2-D search is kept so that the
// symmetry is observed rather than assumed.
inline ExponentBound random_coding_bound(double n_s, double rate_bits) {
  if (!(n_s > 0.0)) throw std::domain_error("random_coding_bound: n_s must be > 0");
  if (!(rate_bits >= 0.0)) throw std::domain_error("random_coding_bound: rate must be >= 0");
  const double gamma = gram_overlap(n_s);
  const double rate_nats = rate_bits * kLn2;
  const auto best_s_for = [&](double p) {
    return detail::golden_max(
        [&](double s) { return e0_pure_binary(s, p, gamma) - s * rate_nats; }, 0.0, 1.0, 1e-10);
  };

  double best_val = -std::numeric_limits<double>::infinity();
  double best_p = 0.5, best_s = 0.0;
  const auto consider = [&](double p) {
    auto [s, v] = best_s_for(p);
    if (v > best_val) { best_val = v; best_p = p; best_s = s; }
  };
  for (int i = 1; i < 50; ++i) consider(0.02 * i);  // coarse pass over (0, 1)
  double half_width = 0.02;
  for (int round = 0; round < 6; ++round) {  // zoom to prior resolution 2e-8
    const double center = best_p;
    const double step = half_width / 10.0;
    for (int i = -10; i <= 10; ++i) {
      const double p = std::clamp(center + step * i, 0.0, 1.0);
      consider(p);
    }
    half_width = step;
  }

  ExponentBound out;
  out.n_s = n_s;
  out.rate_bits = rate_bits;
  if (best_val <= 0.0) {
    out.e_lb = 0.0;  // at or above the ensemble capacity the bound degenerates
    out.s_star = 0.0;
    out.p_star = best_p;
  } else {
    out.e_lb = best_val;
    out.s_star = best_s;
    out.p_star = best_p;
  }
  return out;
}

// Pixel budget implied by an exponent: smallest M with e^{-M e_lb} <= epsilon.
struct PixelBudget {
  std::uint64_t m_ub = 0;
  double epsilon = 0.0;
};

inline PixelBudget pixels_from_exponent(double e_lb, double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::domain_error("pixels_from_exponent: epsilon outside (0, 1]");
  if (!(e_lb > 0.0)) throw std::domain_error("pixels_from_exponent: exponent must be positive");
  const double m = std::ceil(-std::log(epsilon) / e_lb);
  return {static_cast<std::uint64_t>(std::max(m, 1.0)), epsilon};
}

// Minimum over n_s of the pixel budget along the fixed-PIE line R = pie * n_s:
// scans a log-spaced n_s grid, then refines around the best grid point with
// golden section on log(n_s). Throws if the exponent is zero everywhere on
// the line (PIE target above the ensemble's reach).
struct PieLineMinimum {
  PixelBudget budget;
  double n_s = 0.0;         // minimizing photon number
  double rate_bits = 0.0;   // pie * n_s at the minimizer
  double e_lb = 0.0;        // exponent at the minimizer
};

inline PieLineMinimum min_pixels_for_pie(double pie_target, double epsilon,
                                         double ns_lo = 1e-4, double ns_hi = 1.0,
                                         std::size_t grid_points = 120) {
  if (!(pie_target > 0.0)) throw std::domain_error("min_pixels_for_pie: pie must be > 0");
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::domain_error("min_pixels_for_pie: epsilon outside (0, 1]");
  if (grid_points < 3) throw std::invalid_argument("min_pixels_for_pie: need >= 3 grid points");
  const auto exponent_at = [&](double n_s) {
    return random_coding_bound(n_s, pie_target * n_s).e_lb;
  };
  const std::vector<double> grid = log_spaced(ns_lo, ns_hi, grid_points);
  std::size_t best_i = grid.size();
  double best_e = 0.0;
  std::vector<double> e_vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    e_vals[i] = exponent_at(grid[i]);
    if (e_vals[i] > best_e) { best_e = e_vals[i]; best_i = i; }
  }
  if (best_i == grid.size())
    throw std::runtime_error("min_pixels_for_pie: exponent is zero on the whole n_s range");
  const double lo = std::log(grid[best_i == 0 ? 0 : best_i - 1]);
  const double hi = std::log(grid[std::min(best_i + 1, grid.size() - 1)]);
  auto [lx, le] = detail::golden_max([&](double l) { return exponent_at(std::exp(l)); },
                                     lo, hi, 1e-8);
  const double n_best = std::exp(lx);
  const double e_best = std::max(le, best_e);
  PieLineMinimum out;
  out.n_s = (le >= best_e) ? n_best : grid[best_i];
  out.e_lb = e_best;
  out.rate_bits = pie_target * out.n_s;
  out.budget = (epsilon == 1.0) ? PixelBudget{1, epsilon} : pixels_from_exponent(e_best, epsilon);
  return out;
}

// Grid of exponent bounds over (n_s, pie) with the per-n_s capacity boundary
// pie_max(n_s) = H((1 + gamma)/2) / n_s. Points at or above the boundary get
// e_lb = 0 and an infinite pixel budget sentinel.
struct ContourPoint {
  double n_s = 0.0;
  double pie = 0.0;
  double rate_bits = 0.0;
  double e_lb = 0.0;
  double m_ub = 0.0;  // +inf when e_lb == 0
};

struct ContourTable {
  std::vector<double> ns_grid;
  std::vector<double> pie_grid;
  std::vector<double> boundary_pie;   // capacity/n_s for each ns_grid entry
  std::vector<ContourPoint> points;   // row-major: [pie index][ns index]
  double epsilon = 0.0;

  const ContourPoint& at(std::size_t pie_i, std::size_t ns_i) const {
    return points[pie_i * ns_grid.size() + ns_i];
  }
};

inline ContourTable exponent_contours(double ns_lo, double ns_hi, std::size_t ns_points,
                                      double pie_lo, double pie_hi, std::size_t pie_points,
                                      double epsilon) {
  if (!(epsilon > 0.0 && epsilon <= 1.0))
    throw std::domain_error("exponent_contours: epsilon outside (0, 1]");
  if (!(pie_lo > 0.0 && pie_hi >= pie_lo))
    throw std::domain_error("exponent_contours: bad pie range");
  ContourTable t;
  t.epsilon = epsilon;
  t.ns_grid = log_spaced(ns_lo, ns_hi, ns_points);
  t.pie_grid = lin_spaced(pie_lo, pie_hi, pie_points);
  t.boundary_pie.resize(ns_points);
  for (std::size_t i = 0; i < ns_points; ++i) {
    const double gamma = gram_overlap(t.ns_grid[i]);
    t.boundary_pie[i] = dmc::binary_entropy(0.5 * (1.0 + gamma)) / t.ns_grid[i];
  }
  t.points.resize(ns_points * pie_points);
  // Columns are independent pure computations: farm them out and write into
  // preassigned slots, so assembly order never affects the table.
  const auto fill_column = [&](std::size_t ns_i) {
    for (std::size_t pie_i = 0; pie_i < pie_points; ++pie_i) {
      ContourPoint& pt = t.points[pie_i * ns_points + ns_i];
      pt.n_s = t.ns_grid[ns_i];
      pt.pie = t.pie_grid[pie_i];
      pt.rate_bits = pt.pie * pt.n_s;
      pt.e_lb = random_coding_bound(pt.n_s, pt.rate_bits).e_lb;
      pt.m_ub = (pt.e_lb > 0.0)
                    ? static_cast<double>(pixels_from_exponent(pt.e_lb, epsilon).m_ub)
                    : std::numeric_limits<double>::infinity();
    }
  };
  const unsigned workers = std::min<unsigned>(thread_budget(), static_cast<unsigned>(ns_points));
  if (workers <= 1) {
    for (std::size_t i = 0; i < ns_points; ++i) fill_column(i);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < ns_points; i += workers) fill_column(i);
      });
    for (auto& th : pool) th.join();
  }
  return t;
}

}  // namespace photon_reader::exponents
