// Capacity and photon-information-efficiency (PIE) formulas for the reading
// transceivers: structured receivers over binary phase/intensity modulation,
// their Holevo-limit counterparts, and the unrestricted Holevo bound.
//
// All capacities are in bits per pixel; PIE is bits per photon. A pixel is one
// binary (or Q-ary) phase cell interrogated with n_s mean photons.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "photon_reader/core.hpp"
#include "photon_reader/dmc.hpp"

namespace photon_reader::transceivers {

enum class SchemeId {
  kOokDirect,           // on-off keying, shot-noise direct detection
  kBpskHomodyne,        // binary phase keying, homodyne receiver
  kBpskDolinar,         // binary phase keying, Dolinar (minimum-error) receiver
  kQubitProbe,          // single dual-rail qubit probe, optimal measurement
  kHolevoUnrestricted,  // Holevo bound, unrestricted transmitter
  kBpskHolevo,          // Holevo limit of the binary-phase ensemble
  kPskHolevo,           // Holevo limit of Q-ary phase keying, best Q
  kGmHadamard,          // Hadamard-code coherent probe + Green Machine receiver
  kWState,              // single photon over M pixels (W-state transceiver)
};

inline constexpr std::array<SchemeId, 9> kAllSchemes = {
    SchemeId::kOokDirect,  SchemeId::kBpskHomodyne,      SchemeId::kBpskDolinar,
    SchemeId::kQubitProbe, SchemeId::kHolevoUnrestricted, SchemeId::kBpskHolevo,
    SchemeId::kPskHolevo,  SchemeId::kGmHadamard,         SchemeId::kWState,
};

inline std::string_view scheme_name(SchemeId id) {
  switch (id) {
    case SchemeId::kOokDirect: return "ook_direct";
    case SchemeId::kBpskHomodyne: return "bpsk_homodyne";
    case SchemeId::kBpskDolinar: return "bpsk_dolinar";
    case SchemeId::kQubitProbe: return "qubit_probe";
    case SchemeId::kHolevoUnrestricted: return "holevo_unrestricted";
    case SchemeId::kBpskHolevo: return "bpsk_holevo";
    case SchemeId::kPskHolevo: return "psk_holevo";
    case SchemeId::kGmHadamard: return "gm_hadamard";
    case SchemeId::kWState: return "w_state";
  }
  throw std::logic_error("scheme_name: unknown scheme");
}

inline SchemeId parse_scheme(std::string_view name) {
  for (SchemeId id : kAllSchemes)
    if (scheme_name(id) == name) return id;
  throw std::invalid_argument("unknown scheme: " + std::string(name));
}

// ---------------------------------------------------------------------------
// Elementary quantities

// g(x) = (1+x) log2(1+x) - x log2(x): entropy of a thermal state with mean
// photon number x, in bits. g(0) = 0.
inline double holevo_g(double x) {
  if (!(x >= 0.0)) throw std::domain_error("holevo_g: argument must be >= 0");
  if (x == 0.0) return 0.0;
  return (std::log1p(x) * (1.0 + x) - std::log(x) * x) / kLn2;
}

// Minimum-error (Helstrom) probability of discriminating the two equally
// likely binary-phase coherent states with n_s photons: overlap e^{-2 n_s}.
inline double bpsk_helstrom_error(double n_s) {
  if (!(n_s >= 0.0)) throw std::domain_error("bpsk_helstrom_error: n_s must be >= 0");
  const double overlap_sq = std::exp(-4.0 * n_s);
  return 0.5 * (1.0 - std::sqrt(1.0 - overlap_sq));
}

// Crossover probability of the homodyne receiver on the same pair.
inline double bpsk_homodyne_error(double n_s) {
  if (!(n_s >= 0.0)) throw std::domain_error("bpsk_homodyne_error: n_s must be >= 0");
  return 0.5 * std::erfc(std::sqrt(2.0 * n_s));
}

// Minimum-error probability for the single-qubit probe: the two reflected
// probe states have inner product 1 - 2 n_s, which can be driven to zero
// (orthogonal states, perfect discrimination) once n_s >= 1/2.
inline double qubit_probe_error(double n_s) {
  if (!(n_s >= 0.0)) throw std::domain_error("qubit_probe_error: n_s must be >= 0");
  if (n_s >= 0.5) return 0.0;
  const double inner = 1.0 - 2.0 * n_s;
  return 0.5 * (1.0 - std::sqrt(1.0 - inner * inner));
}

// ---------------------------------------------------------------------------
// Q-ary phase-keying output spectrum

// Eigenvalues of the average state of the uniform Q-ary phase-keyed coherent
// ensemble at n_s photons. Entry q (0-based; the formula's index is q+1) is
//   y_q = (1/Q) sum_k exp(-n_s (1 - cos(2 pi k / Q)))
//                     * cos(n_s sin(2 pi k / Q) - 2 pi k (q+1) / Q).
// These are the circulant-Gram-matrix eigenvalues divided by Q, so they form
// a probability vector; tiny negative round-off is clamped to zero and any
// violation beyond round-off level is reported as a logic error.
inline std::vector<double> psk_y_distribution(double n_s, std::size_t q_ary) {
  if (!(n_s >= 0.0)) throw std::domain_error("psk_y_distribution: n_s must be >= 0");
  if (q_ary < 2) throw std::invalid_argument("psk_y_distribution: need Q >= 2");
  const double q = static_cast<double>(q_ary);
  std::vector<double> y(q_ary, 0.0);
  for (std::size_t qi = 0; qi < q_ary; ++qi) {
    const double qq = static_cast<double>(qi + 1);
    double acc = 0.0;
    for (std::size_t k = 1; k <= q_ary; ++k) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(k) / q;
      acc += std::exp(-n_s * (1.0 - std::cos(phi))) *
             std::cos(n_s * std::sin(phi) - phi * qq);
    }
    y[qi] = acc / q;
  }
  double sum = 0.0;
  for (double& v : y) {
    if (v < 0.0) {
      if (v < -1e-9) throw std::logic_error("psk_y_distribution: negative eigenvalue");
      v = 0.0;  // round-off magnitude only
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) >= 1e-9)
    throw std::logic_error("psk_y_distribution: eigenvalues do not sum to 1");
  for (double& v : y) v /= sum;  // absorb the (tiny) round-off drift
  return y;
}

// ---------------------------------------------------------------------------
// Per-scheme capacities (bits per pixel)

inline double ook_direct_capacity(double n_s) { return dmc::bac_capacity(n_s).capacity_bits; }

inline double bpsk_homodyne_capacity(double n_s) {
  return dmc::bsc_capacity(bpsk_homodyne_error(n_s)).capacity_bits;
}

inline double bpsk_dolinar_capacity(double n_s) {
  return dmc::bsc_capacity(bpsk_helstrom_error(n_s)).capacity_bits;
}

inline double qubit_probe_capacity(double n_s) {
  if (n_s >= 0.5) return 1.0;  // orthogonal probe states: exactly one bit
  return dmc::bsc_capacity(qubit_probe_error(n_s)).capacity_bits;
}

inline double holevo_unrestricted_capacity(double n_s) { return holevo_g(n_s); }

// Holevo limit of the equally likely binary-phase ensemble:
// H((1 + e^{-2 n_s}) / 2).
inline double bpsk_holevo_capacity(double n_s) {
  if (!(n_s >= 0.0)) throw std::domain_error("bpsk_holevo_capacity: n_s must be >= 0");
  return dmc::binary_entropy(0.5 * (1.0 + std::exp(-2.0 * n_s)));
}

// Holevo quantity of the uniform Q-ary phase ensemble for one fixed Q.
inline double psk_holevo_capacity_q(double n_s, std::size_t q_ary) {
  double chi = 0.0;
  for (double y : psk_y_distribution(n_s, q_ary)) chi += dmc::entropy_term(y);
  return chi;
}

// Capacity of the single-photon W-state transceiver over M pixels, maximized
// over M: C = n_s log2(1 / n_s) with n_s = 1/M interpreted as photons per
// pixel. Defined for n_s in (0, 1/2].
inline double wstate_capacity(double n_s) {
  if (!(n_s > 0.0 && n_s <= 0.5)) throw std::domain_error("wstate_capacity: n_s outside (0, 1/2]");
  return -n_s * std::log2(n_s);
}

// ---------------------------------------------------------------------------
// Curve points: capacity + PIE + per-scheme sweep diagnostics

enum class PieUnit { kPerTransmittedPhoton, kPerDetectedPhoton };

struct SweepLimits {
  std::size_t psk_q_max = 64;         // largest PSK order swept (power of two)
  std::uint64_t gm_m_max = 1u << 20;  // largest Hadamard block swept (power of two)
};

struct CurveAux {
  std::optional<double> on_fraction;         // OOK: optimal fraction of "on" pixels
  std::optional<std::size_t> psk_order;      // PSK: best constellation size
  std::optional<std::uint64_t> gm_block;     // GM: best Hadamard block size
  std::optional<double> gm_block_estimate;   // GM: small-n_s closed-form estimate
  bool sweep_truncated = false;              // best value sat at the sweep limit
  PieUnit pie_unit = PieUnit::kPerTransmittedPhoton;
};

struct TransceiverCurvePoint {
  SchemeId scheme;
  double n_s;                     // mean photons per pixel (at the detector if lossy)
  double capacity_bits_per_pixel;
  double pie_bits_per_photon;
  CurveAux aux;
};

// Smallest/largest n_s for which a scheme's curve point is defined.
inline bool scheme_defined_at(SchemeId id, double n_s) {
  if (!(n_s > 0.0)) return false;
  if (id == SchemeId::kWState) return n_s <= 0.5;
  return true;
}

inline TransceiverCurvePoint capacity_point(SchemeId id, double n_s,
                                            const SweepLimits& limits = {}) {
  if (!(n_s > 0.0)) throw std::domain_error("capacity_point: n_s must be > 0");
  TransceiverCurvePoint pt{id, n_s, 0.0, 0.0, {}};
  switch (id) {
    case SchemeId::kOokDirect: {
      auto res = dmc::bac_capacity(n_s);
      pt.capacity_bits_per_pixel = res.capacity_bits;
      pt.aux.on_fraction = res.maximizer[1];
      break;
    }
    case SchemeId::kBpskHomodyne:
      pt.capacity_bits_per_pixel = bpsk_homodyne_capacity(n_s);
      break;
    case SchemeId::kBpskDolinar:
      pt.capacity_bits_per_pixel = bpsk_dolinar_capacity(n_s);
      break;
    case SchemeId::kQubitProbe:
      pt.capacity_bits_per_pixel = qubit_probe_capacity(n_s);
      break;
    case SchemeId::kHolevoUnrestricted:
      pt.capacity_bits_per_pixel = holevo_unrestricted_capacity(n_s);
      break;
    case SchemeId::kBpskHolevo:
      pt.capacity_bits_per_pixel = bpsk_holevo_capacity(n_s);
      break;
    case SchemeId::kPskHolevo: {
      if (limits.psk_q_max < 2 || !is_power_of_two(limits.psk_q_max))
        throw std::invalid_argument("capacity_point: psk_q_max must be a power of two >= 2");
      double best = -1.0;
      std::size_t best_q = 2;
      for (std::size_t q = 2; q <= limits.psk_q_max; q *= 2) {
        double chi = psk_holevo_capacity_q(n_s, q);
        if (chi > best) { best = chi; best_q = q; }
      }
      pt.capacity_bits_per_pixel = best;
      pt.aux.psk_order = best_q;
      pt.aux.sweep_truncated = (best_q == limits.psk_q_max);
      break;
    }
    case SchemeId::kGmHadamard: {
      if (limits.gm_m_max < 2 || !is_power_of_two(limits.gm_m_max))
        throw std::invalid_argument("capacity_point: gm_m_max must be a power of two >= 2");
      double best = -1.0;
      std::uint64_t best_m = 2;
      for (std::uint64_t m = 2; m <= limits.gm_m_max; m *= 2) {
        const double md = static_cast<double>(m);
        const double rate = std::log2(md) * (-std::expm1(-md * n_s)) / md;
        if (rate > best) { best = rate; best_m = m; }
      }
      pt.capacity_bits_per_pixel = best;
      pt.aux.gm_block = best_m;
      pt.aux.sweep_truncated = (best_m == limits.gm_m_max);
      if (n_s < 1.0)
        pt.aux.gm_block_estimate = -5.0 / (2.0 * n_s * std::log(n_s));
      break;
    }
    case SchemeId::kWState:
      pt.capacity_bits_per_pixel = wstate_capacity(n_s);
      break;
  }
  pt.pie_bits_per_photon = pt.capacity_bits_per_pixel / n_s;
  return pt;
}

// ---------------------------------------------------------------------------
// Propagation loss

// Round-trip transmissivity kappa in (0, 1]: a coherent probe with n_s
// transmitted photons per pixel arrives with kappa * n_s photons, and for
// every coherent-state scheme the lossy channel is exactly the lossless one
// at the detected photon number. Single-photon schemes see erasure instead
// and are handled by the Monte Carlo repetition protocol, not here.
struct LossModel {
  double kappa = 1.0;
  void validate() const {
    if (!(kappa > 0.0 && kappa <= 1.0))
      throw std::domain_error("LossModel: kappa outside (0, 1]");
  }
};

inline TransceiverCurvePoint apply_loss(SchemeId id, double n_s_transmitted,
                                        const LossModel& loss, const SweepLimits& limits = {}) {
  loss.validate();
  if (id == SchemeId::kQubitProbe || id == SchemeId::kWState)
    throw std::invalid_argument(
        "apply_loss: single-photon schemes are erasure channels under loss; "
        "use the Monte Carlo repetition protocol instead");
  if (loss.kappa == 1.0) return capacity_point(id, n_s_transmitted, limits);
  TransceiverCurvePoint pt = capacity_point(id, loss.kappa * n_s_transmitted, limits);
  pt.aux.pie_unit = PieUnit::kPerDetectedPhoton;  // PIE denominator: detected photons
  return pt;
}

}  // namespace photon_reader::transceivers
