// Discrete-memoryless-channel toolkit: entropies, mutual information,
// closed-form capacities of the photon-click channels used by the reading
// schemes, and a Blahut-Arimoto optimizer with a certified optimality gap.
//
// Convention: probabilities are plain doubles, information quantities are in
// bits unless a name says otherwise.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "photon_reader/core.hpp"

namespace photon_reader::dmc {

// -p*log2(p) with the 0*log(0) = 0 convention. Probabilities below 1e-300
// are flushed to zero so entropy sums do not accumulate denormal noise.
inline double entropy_term(double p) {
  if (p < 1e-300) return 0.0;
  return -p * std::log2(p);
}

// Binary entropy H(x) in bits.
inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary_entropy: argument outside [0,1]");
  return entropy_term(x) + entropy_term(1.0 - x);
}

// Row-stochastic transition matrix W(y|x), row-major storage.
class TransitionMatrix {
 public:
  TransitionMatrix(std::size_t inputs, std::size_t outputs, std::vector<double> probs)
      : inputs_(inputs), outputs_(outputs), p_(std::move(probs)) {
    if (inputs_ == 0 || outputs_ == 0)
      throw std::invalid_argument("TransitionMatrix: empty alphabet");
    if (p_.size() != inputs_ * outputs_)
      throw std::invalid_argument("TransitionMatrix: size mismatch");
    for (std::size_t x = 0; x < inputs_; ++x) {
      double row_sum = 0.0;
      for (std::size_t y = 0; y < outputs_; ++y) {
        double w = (*this)(x, y);
        if (!(w >= 0.0 && w <= 1.0))
          throw std::invalid_argument("TransitionMatrix: entry outside [0,1]");
        row_sum += w;
      }
      if (std::abs(row_sum - 1.0) > 1e-12)
        throw std::invalid_argument("TransitionMatrix: row does not sum to 1");
    }
  }

  std::size_t inputs() const { return inputs_; }
  std::size_t outputs() const { return outputs_; }
  double operator()(std::size_t x, std::size_t y) const { return p_[x * outputs_ + y]; }
  const std::vector<double>& flat() const { return p_; }

 private:
  std::size_t inputs_;
  std::size_t outputs_;
  std::vector<double> p_;
};

// Probability vector over the input alphabet.
class InputDistribution {
 public:
  explicit InputDistribution(std::vector<double> probs) : p_(std::move(probs)) {
    if (p_.empty()) throw std::invalid_argument("InputDistribution: empty");
    double sum = 0.0;
    for (double v : p_) {
      if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("InputDistribution: entry outside [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12)
      throw std::invalid_argument("InputDistribution: does not sum to 1");
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t x) const { return p_[x]; }
  const std::vector<double>& probs() const { return p_; }

 private:
  std::vector<double> p_;
};

// I(X;Y) in bits for input px over channel ch; never negative.
inline double mutual_information(const TransitionMatrix& ch, const InputDistribution& px) {
  if (px.size() != ch.inputs())
    throw std::invalid_argument("mutual_information: alphabet mismatch");
  const std::size_t n = ch.inputs(), m = ch.outputs();
  std::vector<double> qy(m, 0.0);
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < m; ++y) qy[y] += px[x] * ch(x, y);
  double h_out = 0.0;
  for (std::size_t y = 0; y < m; ++y) h_out += entropy_term(qy[y]);
  double h_cond = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    if (px[x] == 0.0) continue;
    double hx = 0.0;
    for (std::size_t y = 0; y < m; ++y) hx += entropy_term(ch(x, y));
    h_cond += px[x] * hx;
  }
  return std::max(h_out - h_cond, 0.0);
}

struct CapacityResult {
  double capacity_bits;
  InputDistribution maximizer;
  std::size_t iterations;
  bool converged;
};

// Blahut-Arimoto with the standard lower/upper capacity bracket: at each
// iterate, I_lower = sum_x p_x D_x and I_upper = max_x D_x sandwich the true
// capacity, where D_x = D(W(.|x) || q) in nats. Terminates when the bracket
// width is at most tol_bits; the reported capacity is then within tol_bits of
// the true value. The update p_x <- p_x exp(D_x - max_x D_x) is overflow-safe.
inline CapacityResult blahut_arimoto(const TransitionMatrix& ch, double tol_bits = 1e-10,
                                     std::size_t max_iter = 100000) {
  if (!(tol_bits > 0.0)) throw std::invalid_argument("blahut_arimoto: tolerance must be positive");
  if (max_iter == 0) throw std::invalid_argument("blahut_arimoto: max_iter must be positive");
  const std::size_t n = ch.inputs(), m = ch.outputs();
  const double tol_nats = tol_bits * kLn2;
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  std::vector<double> q(m), d(n);
  double i_lower_nats = 0.0;
  for (std::size_t iter = 1; iter <= max_iter; ++iter) {
    std::fill(q.begin(), q.end(), 0.0);
    for (std::size_t x = 0; x < n; ++x)
      for (std::size_t y = 0; y < m; ++y) q[y] += p[x] * ch(x, y);
    double i_upper_nats = -std::numeric_limits<double>::infinity();
    i_lower_nats = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      double dx = 0.0;
      for (std::size_t y = 0; y < m; ++y) {
        double w = ch(x, y);
        if (w <= 0.0) continue;
        if (q[y] <= 0.0) { dx = std::numeric_limits<double>::infinity(); break; }
        dx += w * std::log(w / q[y]);
      }
      d[x] = dx;
      i_lower_nats += p[x] * dx;
      i_upper_nats = std::max(i_upper_nats, dx);
    }
    if (i_upper_nats - i_lower_nats <= tol_nats) {
      return {std::max(i_lower_nats, 0.0) / kLn2, InputDistribution(p), iter, true};
    }
    double norm = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      p[x] *= std::exp(d[x] - i_upper_nats);
      norm += p[x];
    }
    for (std::size_t x = 0; x < n; ++x) p[x] /= norm;
  }
  return {std::max(i_lower_nats, 0.0) / kLn2, InputDistribution(p), max_iter, false};
}

// Binary channel induced by on-off keying with shot-noise-limited direct
// detection: an "off" (dark) pixel never clicks; an "on" pixel clicks with
// probability 1 - exp(-n_s). Inputs {off, on}, outputs {no click, click}.
inline TransitionMatrix ook_direct_channel(double n_s) {
  if (!(n_s >= 0.0)) throw std::domain_error("ook_direct_channel: n_s must be >= 0");
  const double p_click = -std::expm1(-n_s);
  return TransitionMatrix(2, 2, {1.0, 0.0, 1.0 - p_click, p_click});
}

// Capacity-achieving fraction of "on" pixels for ook_direct_channel,
// p* = 1 / [(1-e^-n) (1 + 2^{H(e^-n)/(1-e^-n)})]. Tends to 1/e as n_s -> 0
// (returned exactly at n_s = 0 as the continuity limit) and 1/2 as n_s -> inf.
inline double optimal_on_fraction(double n_s) {
  if (!(n_s >= 0.0)) throw std::domain_error("optimal_on_fraction: n_s must be >= 0");
  if (n_s == 0.0) return 1.0 / std::numbers::e;
  const double miss = std::exp(-n_s);          // P(no click | on)
  const double eps = -std::expm1(-n_s);        // P(click | on)
  const double h = binary_entropy(miss);
  return 1.0 / (eps * (1.0 + std::exp2(h / eps)));
}

// Closed-form capacity of ook_direct_channel in bits per pixel, with the
// maximizing input distribution. Matches blahut_arimoto to its tolerance.
inline CapacityResult bac_capacity(double n_s) {
  if (!(n_s >= 0.0)) throw std::domain_error("bac_capacity: n_s must be >= 0");
  const double p_on = optimal_on_fraction(n_s);
  if (n_s == 0.0) return {0.0, InputDistribution({1.0 - p_on, p_on}), 0, true};
  const double eps = -std::expm1(-n_s);
  const double c = binary_entropy(p_on * eps) - p_on * binary_entropy(std::exp(-n_s));
  return {std::max(c, 0.0), InputDistribution({1.0 - p_on, p_on}), 0, true};
}

// Capacity of a binary symmetric channel with crossover q: 1 - H(q).
inline CapacityResult bsc_capacity(double crossover) {
  if (!(crossover >= 0.0 && crossover <= 1.0))
    throw std::domain_error("bsc_capacity: crossover outside [0,1]");
  return {1.0 - binary_entropy(crossover), InputDistribution({0.5, 0.5}), 0, true};
}

// M-ary erasure superchannel: input x maps to output x with probability
// 1 - p_erase and to the extra erasure symbol (column M) otherwise. This is
// the channel a single-photon codeword sees after lossy transmission.
inline TransitionMatrix erasure_superchannel(std::size_t m, double p_erase) {
  if (m < 2 || !is_power_of_two(m))
    throw std::invalid_argument("erasure_superchannel: m must be a power of two >= 2");
  if (!(p_erase >= 0.0 && p_erase <= 1.0))
    throw std::domain_error("erasure_superchannel: p_erase outside [0,1]");
  std::vector<double> w(m * (m + 1), 0.0);
  for (std::size_t x = 0; x < m; ++x) {
    w[x * (m + 1) + x] = 1.0 - p_erase;
    w[x * (m + 1) + m] = p_erase;
  }
  return TransitionMatrix(m, m + 1, std::move(w));
}

}  // namespace photon_reader::dmc
