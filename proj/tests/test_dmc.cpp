// Discrete memoryless channel layer: entropies, transition matrices, the
// iterative capacity solver with its certified bracket, and the on-off
// readout channel's closed-form capacity.
//
// Reference values were frozen from an independent high-precision computation
// (mpmath, 50 significant digits) and appear inline as literals.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "photon_reader/dmc.hpp"

using namespace photon_reader;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

dmc::TransitionMatrix bsc(double q) {
  return dmc::TransitionMatrix(2, 2, {1.0 - q, q, q, 1.0 - q});
}

// Binary erasure channel with erasure probability e: outputs {0, 1, erased}.
dmc::TransitionMatrix bec(double e) {
  return dmc::TransitionMatrix(2, 3, {1.0 - e, 0.0, e, 0.0, 1.0 - e, e});
}

double on_off_mutual_information(double n_s, double p_on) {
  return dmc::mutual_information(dmc::ook_direct_channel(n_s),
                                 dmc::InputDistribution({1.0 - p_on, p_on}));
}

}  // namespace

TEST_CASE("binary entropy: endpoints, symmetry, frozen midpoints") {
  CHECK(dmc::binary_entropy(0.0) == 0.0);
  CHECK(dmc::binary_entropy(1.0) == 0.0);
  CHECK(dmc::binary_entropy(0.5) == 1.0);
  // H(0.11) from the frozen reference table.
  CHECK_THAT(dmc::binary_entropy(0.11), WithinAbs(0.49991595816452799564, 1e-15));
  // H(1/e): the on-off channel's small-photon limit uses this value.
  CHECK_THAT(dmc::binary_entropy(1.0 / std::exp(1.0)),
             WithinAbs(0.94902994464016949495, 1e-15));
  for (double p : {0.01, 0.2, 0.37, 0.49}) {
    CHECK_THAT(dmc::binary_entropy(p), WithinAbs(dmc::binary_entropy(1.0 - p), 1e-15));
  }
}

TEST_CASE("entropy term: 0 log 0 convention and underflow guard") {
  CHECK(dmc::entropy_term(0.0) == 0.0);
  CHECK(dmc::entropy_term(1.0) == 0.0);
  CHECK(dmc::entropy_term(1e-301) == 0.0);
  CHECK_THAT(dmc::entropy_term(0.5), WithinAbs(0.5, 1e-15));
}

TEST_CASE("transition matrix validation") {
  CHECK_NOTHROW(bsc(0.11));
  CHECK_THROWS_AS(dmc::TransitionMatrix(2, 2, {0.6, 0.5, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(dmc::TransitionMatrix(2, 2, {1.2, -0.2, 0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(dmc::TransitionMatrix(2, 2, {0.5, 0.5, 0.5}), std::invalid_argument);
  const auto ch = bsc(0.11);
  CHECK(ch.inputs() == 2);
  CHECK(ch.outputs() == 2);
  CHECK(ch(0, 1) == 0.11);
}

TEST_CASE("input distribution validation") {
  CHECK_NOTHROW(dmc::InputDistribution({0.25, 0.75}));
  CHECK_THROWS_AS(dmc::InputDistribution({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(dmc::InputDistribution({1.5, -0.5}), std::invalid_argument);
}

TEST_CASE("mutual information: closed forms and structural properties") {
  SECTION("symmetric binary channel with uniform input: 1 - H(q)") {
    CHECK_THAT(dmc::mutual_information(bsc(0.11), dmc::InputDistribution({0.5, 0.5})),
               WithinAbs(0.50008404183547200436, 1e-14));
  }
  SECTION("noiseless channel: input entropy") {
    dmc::TransitionMatrix idc(2, 2, {1.0, 0.0, 0.0, 1.0});
    CHECK_THAT(dmc::mutual_information(idc, dmc::InputDistribution({0.3, 0.7})),
               WithinAbs(dmc::binary_entropy(0.3), 1e-14));
  }
  SECTION("identical rows carry no information") {
    dmc::TransitionMatrix flat(3, 2, {0.4, 0.6, 0.4, 0.6, 0.4, 0.6});
    CHECK_THAT(dmc::mutual_information(flat, dmc::InputDistribution({0.2, 0.3, 0.5})),
               WithinAbs(0.0, 1e-12));
  }
  SECTION("invariant under output-column permutation") {
    dmc::TransitionMatrix a(2, 3, {0.5, 0.3, 0.2, 0.1, 0.2, 0.7});
    dmc::TransitionMatrix b(2, 3, {0.2, 0.5, 0.3, 0.7, 0.1, 0.2});  // columns rotated
    const dmc::InputDistribution px({0.35, 0.65});
    CHECK_THAT(dmc::mutual_information(a, px),
               WithinAbs(dmc::mutual_information(b, px), 1e-15));
  }
}

TEST_CASE("capacity solver against closed forms (20-case corpus)") {
  std::size_t cases = 0;
  SECTION("symmetric binary channels: C = 1 - H(q)") {
    for (double q : {0.02, 0.11, 0.25, 0.4, 0.49}) {
      const auto res = dmc::blahut_arimoto(bsc(q));
      CHECK(res.converged);
      CHECK_THAT(res.capacity_bits, WithinAbs(1.0 - dmc::binary_entropy(q), 1e-9));
      ++cases;
    }
    CHECK(cases == 5);
  }
  SECTION("erasure channels: C = 1 - e") {
    for (double e : {0.05, 0.3, 0.5, 0.75, 0.97}) {
      const auto res = dmc::blahut_arimoto(bec(e));
      CHECK(res.converged);
      CHECK_THAT(res.capacity_bits, WithinAbs(1.0 - e, 1e-9));
      ++cases;
    }
    CHECK(cases == 5);
  }
  SECTION("on-off readout channels: closed form") {
    for (double n_s : {1e-4, 0.01, 0.1, 1.0, 10.0}) {
      const auto direct = dmc::bac_capacity(n_s);
      // The nearly-identical rows at n_s=1e-4 slow the iteration's linear
      // rate; ~2e5 steps are needed to certify the 1e-10-bit bracket there.
      const auto iterated = dmc::blahut_arimoto(dmc::ook_direct_channel(n_s), 1e-10, 2000000);
      CHECK(iterated.converged);
      CHECK_THAT(iterated.capacity_bits, WithinAbs(direct.capacity_bits, 1e-9));
      ++cases;
    }
    CHECK(cases == 5);
  }
  SECTION("larger-alphabet channels with known capacity") {
    // Noiseless M-ary channel: log2 M.
    for (std::size_t m : {3u, 4u, 8u}) {
      std::vector<double> w(m * m, 0.0);
      for (std::size_t i = 0; i < m; ++i) w[i * m + i] = 1.0;
      const auto res = dmc::blahut_arimoto(dmc::TransitionMatrix(m, m, std::move(w)));
      CHECK_THAT(res.capacity_bits, WithinAbs(std::log2(double(m)), 1e-9));
      ++cases;
    }
    // M-ary uniform erasure superchannel: (1 - p) log2 M.
    for (auto [m, p] : std::vector<std::pair<std::size_t, double>>{{4, 0.2}, {16, 0.63}}) {
      const auto res = dmc::blahut_arimoto(dmc::erasure_superchannel(m, p));
      CHECK_THAT(res.capacity_bits, WithinAbs((1.0 - p) * std::log2(double(m)), 1e-9));
      ++cases;
    }
    CHECK(cases == 5);
  }
}

TEST_CASE("capacity solver: certified bracket and KKT support test") {
  const auto ch = dmc::ook_direct_channel(0.05);
  const auto res = dmc::blahut_arimoto(ch, 1e-12);
  REQUIRE(res.converged);
  REQUIRE(res.maximizer.size() == 2);

  // The returned maximizer must dominate arbitrary test distributions.
  std::mt19937_64 g(42);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int i = 0; i < 25; ++i) {
    const double p = u(g);
    CHECK(res.capacity_bits >= on_off_mutual_information(0.05, p) - 1e-10);
  }

  // KKT: per-input divergence equals C on the support, is <= C off it.
  const double c_nats = res.capacity_bits * kLn2;
  for (std::size_t x = 0; x < 2; ++x) {
    double d = 0.0;
    for (std::size_t y = 0; y < ch.outputs(); ++y) {
      double qy = 0.0;
      for (std::size_t xp = 0; xp < 2; ++xp) qy += res.maximizer[xp] * ch(xp, y);
      if (ch(x, y) > 0.0) d += ch(x, y) * std::log(ch(x, y) / qy);
    }
    if (res.maximizer[x] > 1e-9) {
      CHECK_THAT(d, WithinAbs(c_nats, 1e-9));
    } else {
      CHECK(d <= c_nats + 1e-9);
    }
  }
}

TEST_CASE("capacity never exceeds the alphabet bound") {
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto [rows, cols] : std::vector<std::pair<std::size_t, std::size_t>>{
           {2, 2}, {2, 5}, {5, 2}, {4, 4}, {6, 3}}) {
    std::vector<double> w(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < cols; ++c) sum += (w[r * cols + c] = u(g) + 1e-3);
      for (std::size_t c = 0; c < cols; ++c) w[r * cols + c] /= sum;
    }
    const auto res = dmc::blahut_arimoto(dmc::TransitionMatrix(rows, cols, std::move(w)));
    CHECK(res.capacity_bits >= 0.0);
    CHECK(res.capacity_bits <= std::log2(double(std::min(rows, cols))) + 1e-12);
  }
}

TEST_CASE("on-off readout channel rows") {
  const auto ch = dmc::ook_direct_channel(0.3);
  CHECK(ch(0, 0) == 1.0);
  CHECK(ch(0, 1) == 0.0);
  CHECK_THAT(ch(1, 0), WithinRel(std::exp(-0.3), 1e-15));
  CHECK_THAT(ch(1, 1), WithinRel(-std::expm1(-0.3), 1e-15));
}

TEST_CASE("optimal on-pixel fraction: frozen anchors and limits") {
  // Frozen from the closed form evaluated at 50 digits.
  CHECK_THAT(dmc::optimal_on_fraction(1e-4), WithinAbs(0.3678843015896079, 1e-12));
  CHECK_THAT(dmc::optimal_on_fraction(10.0), WithinAbs(0.49989784011180777, 1e-12));
  // Limits: 1/e as n_s -> 0, 1/2 as n_s -> infinity.
  CHECK_THAT(dmc::optimal_on_fraction(0.0), WithinAbs(1.0 / std::exp(1.0), 1e-15));
  CHECK_THAT(dmc::optimal_on_fraction(1e-9), WithinAbs(1.0 / std::exp(1.0), 1e-6));
  CHECK_THAT(dmc::optimal_on_fraction(100.0), WithinAbs(0.5, 1e-6));
}

TEST_CASE("optimal on-pixel fraction satisfies first-order optimality") {
  for (double n_s : {0.01, 1.0, 10.0}) {
    const double p_star = dmc::optimal_on_fraction(n_s);
    const double h = 1e-6;
    const double deriv =
        (on_off_mutual_information(n_s, p_star + h) - on_off_mutual_information(n_s, p_star - h)) /
        (2.0 * h);
    CHECK_THAT(deriv, WithinAbs(0.0, 1e-6));
  }
}

TEST_CASE("on-off capacity closed form matches the solver across the sweep") {
  for (double n_s : {0.01, 0.1, 1.0, 10.0}) {
    const auto direct = dmc::bac_capacity(n_s);
    const auto iterated = dmc::blahut_arimoto(dmc::ook_direct_channel(n_s));
    CHECK_THAT(direct.capacity_bits, WithinAbs(iterated.capacity_bits, 1e-9));
    // The closed form's maximizer is the optimal on fraction.
    CHECK_THAT(direct.maximizer[1], WithinAbs(dmc::optimal_on_fraction(n_s), 1e-12));
  }
}

TEST_CASE("erasure superchannel shape and capacity") {
  const auto ch = dmc::erasure_superchannel(8, 0.3);
  REQUIRE(ch.inputs() == 8);
  REQUIRE(ch.outputs() == 9);
  for (std::size_t x = 0; x < 8; ++x) {
    CHECK(ch(x, x) == 0.7);
    CHECK(ch(x, 8) == 0.3);
  }
  CHECK_THAT(dmc::blahut_arimoto(ch).capacity_bits, WithinAbs(0.7 * 3.0, 1e-9));
}
