// From-scratch linear-optics layer: mode amplitudes, pixel modulation,
// Sylvester-Hadamard codebooks, the Green Machine butterfly network, W-state
// preparation, uniform loss, and click detection for coherent and
// single-photon probes.
//
// States are tracked as per-mode complex amplitudes. For a coherent probe the
// entry is the coherent amplitude alpha_k (mean photons |alpha_k|^2); for a
// single-photon probe it is the one-photon wavefunction over modes (total
// probability sum |c_k|^2 <= 1, deficit = photon already lost).
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "photon_reader/core.hpp"
#include "photon_reader/rng.hpp"

namespace photon_reader::optics {

enum class StateKind { kCoherent, kSinglePhoton };

struct ModeAmplitudes {
  std::vector<std::complex<double>> amps;
  StateKind kind = StateKind::kCoherent;

  std::size_t modes() const { return amps.size(); }

  // Sum of |amplitude|^2: total mean photons (coherent) or total detection
  // probability (single photon).
  double total_power() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return s;
  }
};

// Coherent probe with n_s mean photons in each of m modes (amplitude sqrt(n_s)).
inline ModeAmplitudes coherent_probe(std::size_t m, double n_s) {
  if (m == 0) throw std::invalid_argument("coherent_probe: need at least one mode");
  if (!(n_s >= 0.0)) throw std::domain_error("coherent_probe: n_s must be >= 0");
  ModeAmplitudes st;
  st.kind = StateKind::kCoherent;
  st.amps.assign(m, std::complex<double>(std::sqrt(n_s), 0.0));
  return st;
}

// Single photon localized in one mode.
inline ModeAmplitudes single_photon_at(std::size_t m, std::size_t mode) {
  if (m == 0) throw std::invalid_argument("single_photon_at: need at least one mode");
  if (mode >= m) throw std::out_of_range("single_photon_at: mode index out of range");
  ModeAmplitudes st;
  st.kind = StateKind::kSinglePhoton;
  st.amps.assign(m, std::complex<double>(0.0, 0.0));
  st.amps[mode] = 1.0;
  return st;
}

// ---------------------------------------------------------------------------
// Pixel patterns (the "page" being read)

// Per-pixel reflection: amplitude transmissivity sqrt(eta) and phase theta,
// i.e. mode k picks up the factor sqrt(eta_k) * e^{i theta_k}. Phases live in
// the canonical half-open interval (0, 2*pi]; "no phase shift" is theta = 2*pi.
struct PixelPattern {
  std::vector<double> etas;    // power reflectivities, each in [0, 1]
  std::vector<double> thetas;  // phases, each in (0, 2*pi]

  std::size_t pixels() const { return etas.size(); }

  void validate() const {
    if (etas.empty() || etas.size() != thetas.size())
      throw std::invalid_argument("PixelPattern: eta/theta size mismatch or empty");
    for (double e : etas)
      if (!(e >= 0.0 && e <= 1.0))
        throw std::invalid_argument("PixelPattern: eta outside [0,1]");
    for (double t : thetas)
      if (!(t > 0.0 && t <= 2.0 * std::numbers::pi))
        throw std::invalid_argument("PixelPattern: theta outside (0, 2*pi]");
  }
};

// Apply a pixel pattern mode-by-mode.
inline void modulate_in_place(ModeAmplitudes& st, const PixelPattern& pattern) {
  pattern.validate();
  if (pattern.pixels() != st.modes())
    throw std::invalid_argument("modulate: pattern size does not match mode count");
  for (std::size_t k = 0; k < st.amps.size(); ++k)
    st.amps[k] *= std::polar(std::sqrt(pattern.etas[k]), pattern.thetas[k]);
}

inline ModeAmplitudes modulate(ModeAmplitudes st, const PixelPattern& pattern) {
  modulate_in_place(st, pattern);
  return st;
}

// ---------------------------------------------------------------------------
// Sylvester-Hadamard codebook

// Rows of the M x M Sylvester-Hadamard sign matrix, addressed lazily:
// H[j][k] = (-1)^popcount(j & k). Any two distinct rows agree in exactly M/2
// positions, and row 0 is all +1. Nothing is materialized, so codebooks for
// very large M cost nothing to hold.
class HadamardCodebook {
 public:
  explicit HadamardCodebook(std::size_t m) : m_(m) {
    if (m < 2 || !is_power_of_two(static_cast<std::uint64_t>(m)))
      throw std::invalid_argument("HadamardCodebook: m must be a power of two >= 2");
  }

  std::size_t size() const { return m_; }

  int sign(std::size_t row, std::size_t col) const {
    check_index(row);
    check_index(col);
    return (std::popcount(row & col) & 1u) ? -1 : +1;
  }

  std::vector<std::int8_t> row(std::size_t j) const {
    check_index(j);
    std::vector<std::int8_t> r(m_);
    for (std::size_t k = 0; k < m_; ++k) r[k] = static_cast<std::int8_t>(sign(j, k));
    return r;
  }

  // Binary-phase pixel pattern for codeword j: every pixel fully reflective,
  // phase 2*pi for '+' (the identity convention) and pi for '-'.
  PixelPattern pattern(std::size_t j) const {
    check_index(j);
    PixelPattern p;
    p.etas.assign(m_, 1.0);
    p.thetas.resize(m_);
    for (std::size_t k = 0; k < m_; ++k)
      p.thetas[k] = (sign(j, k) > 0) ? 2.0 * std::numbers::pi : std::numbers::pi;
    return p;
  }

 private:
  void check_index(std::size_t i) const {
    if (i >= m_) throw std::out_of_range("HadamardCodebook: index out of range");
  }
  std::size_t m_;
};

inline HadamardCodebook hadamard_codebook(std::size_t m) { return HadamardCodebook(m); }

// ---------------------------------------------------------------------------
// Green Machine butterfly network

// In-place unitary H_M / sqrt(M): log2(M) stages of pairwise couplers
// (a, b) -> (a + b, a - b), followed by a single 1/sqrt(M) normalization.
// Because the per-stage 1/sqrt(2) factors commute with everything, deferring
// them to one final scaling changes no mathematics and keeps the hot loop to
// additions. Acting on Hadamard codeword j (as phases on a uniform input) the
// network concentrates all input power onto output port j.
inline void green_machine_in_place(ModeAmplitudes& st) {
  const std::size_t m = st.modes();
  if (m == 0 || !is_power_of_two(static_cast<std::uint64_t>(m)))
    throw std::invalid_argument("green_machine: mode count must be a power of two");
  auto& a = st.amps;
  for (std::size_t half = 1; half < m; half <<= 1) {
    for (std::size_t block = 0; block < m; block += 2 * half) {
      for (std::size_t k = block; k < block + half; ++k) {
        const std::complex<double> u = a[k];
        const std::complex<double> v = a[k + half];
        a[k] = u + v;
        a[k + half] = u - v;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (auto& x : a) x *= scale;
}

inline ModeAmplitudes green_machine(ModeAmplitudes st) {
  green_machine_in_place(st);
  return st;
}

// W state over m modes: a single photon shared equally by every mode,
// produced by running the same butterfly (the log2(m)-stage splitter tree)
// on a photon injected into port 0 — the tree itself is exercised, the
// amplitudes are not assigned directly.
inline ModeAmplitudes prepare_wstate(std::size_t m) {
  if (m < 2 || !is_power_of_two(static_cast<std::uint64_t>(m)))
    throw std::invalid_argument("prepare_wstate: m must be a power of two >= 2");
  ModeAmplitudes st = single_photon_at(m, 0);
  green_machine_in_place(st);
  return st;
}

// Uniform pure-loss channel: every amplitude scales by sqrt(kappa). For a
// single-photon state the lost probability mass 1 - kappa becomes the
// no-detection (erasure) outcome.
inline void apply_uniform_loss_in_place(ModeAmplitudes& st, double kappa) {
  if (!(kappa > 0.0 && kappa <= 1.0))
    throw std::domain_error("apply_uniform_loss: kappa outside (0, 1]");
  if (kappa == 1.0) return;
  const double s = std::sqrt(kappa);
  for (auto& a : st.amps) a *= s;
}

inline ModeAmplitudes apply_uniform_loss(ModeAmplitudes st, double kappa) {
  apply_uniform_loss_in_place(st, kappa);
  return st;
}

// ---------------------------------------------------------------------------
// Detection

struct DetectionOutcome {
  std::vector<std::uint32_t> clicks;  // ports that clicked, ascending
  std::size_t decoded = 0;            // decoded codeword index in [0, M)
  bool was_erasure = false;           // no port clicked; decoded is a uniform guess
};

// Shot-noise-limited direct detection of a coherent state: port k clicks
// independently with probability 1 - exp(-|a_k|^2). Exactly one click decodes
// that port; several clicks decode uniformly among them; none is an erasure
// resolved by a uniform guess over all ports. Draw order (one uniform per
// port, then at most one resolution draw) is part of the reproducibility
// contract.
inline DetectionOutcome detect_coherent(const ModeAmplitudes& st, std::mt19937_64& g) {
  if (st.kind != StateKind::kCoherent)
    throw std::invalid_argument("detect_coherent: state is not coherent");
  DetectionOutcome out;
  const std::size_t m = st.modes();
  for (std::size_t k = 0; k < m; ++k) {
    const double p_click = -std::expm1(-std::norm(st.amps[k]));
    if (rng::uniform01(g) < p_click) out.clicks.push_back(static_cast<std::uint32_t>(k));
  }
  if (out.clicks.size() == 1) {
    out.decoded = out.clicks[0];
  } else if (out.clicks.empty()) {
    out.was_erasure = true;
    out.decoded = rng::uniform_index(g, m);
  } else {
    out.decoded = out.clicks[rng::uniform_index(g, out.clicks.size())];
  }
  return out;
}

// Ideal photon counting on a single-photon state: at most one port clicks,
// port k with probability |c_k|^2; with probability 1 - sum |c_k|^2 the
// photon was lost upstream and the outcome is an erasure resolved by a
// uniform guess. Draw order: one categorical uniform, plus one guess draw
// only on erasure.
inline DetectionOutcome detect_single_photon(const ModeAmplitudes& st, std::mt19937_64& g) {
  if (st.kind != StateKind::kSinglePhoton)
    throw std::invalid_argument("detect_single_photon: state is not single-photon");
  const std::size_t m = st.modes();
  const double total = st.total_power();
  if (total > 1.0 + 1e-9)
    throw std::logic_error("detect_single_photon: probability mass exceeds 1");
  DetectionOutcome out;
  const double u = rng::uniform01(g);
  double cum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    cum += std::norm(st.amps[k]);
    if (u < cum) {
      out.clicks.push_back(static_cast<std::uint32_t>(k));
      out.decoded = k;
      return out;
    }
  }
  out.was_erasure = true;
  out.decoded = rng::uniform_index(g, m);
  return out;
}

// ---------------------------------------------------------------------------
// One full read cycle: probe -> pixel pattern -> loss -> butterfly -> detector

enum class SimScheme { kCoherentGm, kWState };

struct ReadCycleParams {
  SimScheme scheme = SimScheme::kCoherentGm;
  std::size_t m = 2;       // pixels per codeword, power of two
  double n_s = 0.0;        // coherent probe photons per pixel (ignored for W state)
  double kappa = 1.0;      // round-trip transmissivity

  void validate() const {
    if (m < 2 || !is_power_of_two(static_cast<std::uint64_t>(m)))
      throw std::invalid_argument("ReadCycleParams: m must be a power of two >= 2");
    if (scheme == SimScheme::kCoherentGm && !(n_s >= 0.0))
      throw std::domain_error("ReadCycleParams: n_s must be >= 0");
    if (!(kappa > 0.0 && kappa <= 1.0))
      throw std::domain_error("ReadCycleParams: kappa outside (0, 1]");
  }
};

inline DetectionOutcome read_cycle(const ReadCycleParams& prm, std::size_t codeword,
                                   std::mt19937_64& g) {
  prm.validate();
  HadamardCodebook book(prm.m);
  ModeAmplitudes st = (prm.scheme == SimScheme::kCoherentGm)
                          ? coherent_probe(prm.m, prm.n_s)
                          : prepare_wstate(prm.m);
  modulate_in_place(st, book.pattern(codeword));
  apply_uniform_loss_in_place(st, prm.kappa);
  green_machine_in_place(st);
  return (prm.scheme == SimScheme::kCoherentGm) ? detect_coherent(st, g)
                                                : detect_single_photon(st, g);
}

}  // namespace photon_reader::optics
