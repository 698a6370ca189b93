// Monte Carlo word-error harness: analytic laws, statistical agreement,
// reproducibility across thread counts, the induced discrete channel, and
// the pixel-budget solver.
#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "photon_reader/dmc.hpp"
#include "photon_reader/montecarlo.hpp"

using namespace photon_reader;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
namespace mc = photon_reader::montecarlo;

namespace {

mc::TrialPlan gm_plan(std::size_t m, double x, double kappa, std::size_t trials,
                      std::uint64_t seed) {
  mc::TrialPlan plan;
  plan.scheme = optics::SimScheme::kCoherentGm;
  plan.m = m;
  plan.n_s = x / (kappa * double(m));  // detected per-word energy = x
  plan.kappa = kappa;
  plan.trials = trials;
  plan.master_seed = seed;
  return plan;
}

mc::TrialPlan w_plan(std::size_t m, double kappa, std::size_t k, std::size_t trials,
                     std::uint64_t seed) {
  mc::TrialPlan plan;
  plan.scheme = optics::SimScheme::kWState;
  plan.m = m;
  plan.kappa = kappa;
  plan.k_copies = k;
  plan.trials = trials;
  plan.master_seed = seed;
  return plan;
}

struct ScopedThreadEnv {
  explicit ScopedThreadEnv(const char* v) { setenv("PHOTON_READER_THREADS", v, 1); }
  ~ScopedThreadEnv() { unsetenv("PHOTON_READER_THREADS"); }
};

}  // namespace

TEST_CASE("analytic word-error and erasure laws") {
  // Coherent pipeline: only failure mode is a no-click erasure followed by a
  // wrong uniform guess.
  CHECK_THAT(mc::gm_word_error(1024, std::log(1000.0) / 1024.0, 1.0),
             WithinRel((1023.0 / 1024.0) * 1e-3, 1e-12));
  CHECK_THAT(mc::gm_word_error(16, 0.05, 0.5),
             WithinRel((15.0 / 16.0) * std::exp(-0.5 * 16 * 0.05), 1e-12));
  // Single-photon pipeline: error only if all K copies are lost and the
  // guess is wrong.
  CHECK_THAT(mc::wstate_word_error(32, 1.0, 1), WithinAbs(0.0, 0.0));
  CHECK_THAT(mc::wstate_word_error(8, 0.6, 3), WithinRel((7.0 / 8.0) * 0.064, 1e-12));

  const auto plan = gm_plan(16, std::log(20.0), 1.0, 100, 1);
  CHECK_THAT(mc::analytic_word_error(plan), WithinRel((15.0 / 16.0) / 20.0, 1e-12));
  CHECK_THAT(mc::analytic_erasure_rate(plan), WithinRel(1.0 / 20.0, 1e-12));
}

TEST_CASE("z-score edge cases") {
  CHECK(mc::z_score(0.1, 0.1, 100) == 0.0);
  CHECK(mc::z_score(0.0, 0.0, 100) == 0.0);
  CHECK(std::isinf(mc::z_score(0.1, 0.0, 100)));
  CHECK_THAT(mc::z_score(0.12, 0.1, 100), WithinRel(0.02 / std::sqrt(0.09 / 100.0), 1e-12));
}

TEST_CASE("trial plan validation") {
  CHECK_NOTHROW(gm_plan(16, 1.0, 1.0, 10, 1).validate());
  CHECK_THROWS_AS(gm_plan(12, 1.0, 1.0, 10, 1).validate(), std::invalid_argument);
  auto zero_trials = gm_plan(16, 1.0, 1.0, 1, 1);
  zero_trials.trials = 0;
  CHECK_THROWS_AS(zero_trials.validate(), std::invalid_argument);
  auto coherent_copies = gm_plan(16, 1.0, 1.0, 10, 1);
  coherent_copies.k_copies = 3;
  CHECK_THROWS_AS(coherent_copies.validate(), std::invalid_argument);
  CHECK_NOTHROW(w_plan(16, 0.5, 3, 10, 1).validate());
}

TEST_CASE("estimator bookkeeping is self-consistent") {
  const auto est = mc::estimate_word_error(gm_plan(16, std::log(10.0), 1.0, 5000, 3));
  CHECK(est.trials == 5000);
  CHECK_THAT(est.p_e_hat, WithinRel(double(est.errors) / 5000.0, 1e-15));
  CHECK_THAT(est.erasure_rate, WithinRel(double(est.erasures) / 5000.0, 1e-15));
  CHECK_THAT(est.standard_error,
             WithinRel(std::sqrt(est.p_e_hat * (1.0 - est.p_e_hat) / 5000.0), 1e-12));
  CHECK(est.errors <= est.erasures);  // coherent: errors only via erasure guesses
}

TEST_CASE("word-error estimates match the analytic law across a 100-configuration sweep") {
  // Statistical gate: >= 99 of 100 fixed-seed configurations inside 4 sigma
  // for both the error and the erasure rate.
  int pass = 0, total = 0;
  auto tally = [&](const mc::TrialPlan& plan) {
    const auto est = mc::estimate_word_error(plan);
    const double pe = mc::analytic_word_error(plan);
    const double pr = mc::analytic_erasure_rate(plan);
    const double ze = mc::z_score(est.p_e_hat, pe, est.trials);
    const double zr = mc::z_score(est.erasure_rate, pr, est.trials);
    pass += (std::abs(ze) <= 4.0 && std::abs(zr) <= 4.0) ? 1 : 0;
    ++total;
  };
  std::uint64_t seed = 1000;
  for (std::size_t m : {2u, 4u, 8u, 16u, 32u}) {
    for (double x : {std::log(5.0), std::log(10.0), std::log(20.0), std::log(50.0),
                     std::log(100.0)}) {
      for (double kappa : {1.0, 0.7}) {
        tally(gm_plan(m, x, kappa, 2000, ++seed));
      }
    }
  }
  for (std::size_t m : {2u, 8u, 32u, 128u, 256u}) {
    for (double kappa : {0.3, 0.5, 0.7, 0.85, 0.95}) {
      for (std::size_t k : {1u, 2u}) {
        tally(w_plan(m, kappa, k, 2000, ++seed));
      }
    }
  }
  REQUIRE(total == 100);
  CHECK(pass >= 99);
}

TEST_CASE("large blocks stream without the outcome cache and still match") {
  const auto plan = gm_plan(4096, std::log(50.0), 1.0, 3000, 77);
  const auto est = mc::estimate_word_error(plan);
  CHECK(std::abs(mc::z_score(est.p_e_hat, mc::analytic_word_error(plan), est.trials)) <= 4.0);
  CHECK(std::abs(mc::z_score(est.erasure_rate, mc::analytic_erasure_rate(plan), est.trials)) <=
        4.0);
}

TEST_CASE("lossless single-photon reads are error-free") {
  for (std::size_t m : {2u, 32u, 256u}) {
    const auto est = mc::estimate_word_error(w_plan(m, 1.0, 1, 2000, 5));
    CHECK(est.errors == 0);
    CHECK(est.erasures == 0);
    CHECK(est.p_e_hat == 0.0);
  }
}

TEST_CASE("identical plans reproduce bit-identical estimates") {
  const auto plan = gm_plan(64, std::log(30.0), 0.9, 4000, 2026);
  const auto a = mc::estimate_word_error(plan);
  const auto b = mc::estimate_word_error(plan);
  CHECK(a.errors == b.errors);
  CHECK(a.erasures == b.erasures);
  CHECK(a.p_e_hat == b.p_e_hat);
  CHECK(a.standard_error == b.standard_error);
}

TEST_CASE("results are independent of the worker-thread budget") {
  const auto plan_gm = gm_plan(32, std::log(25.0), 0.8, 6000, 31);
  const auto plan_w = w_plan(64, 0.6, 2, 6000, 32);
  mc::ErrorEstimate one_gm, one_w;
  {
    ScopedThreadEnv env("1");
    one_gm = mc::estimate_word_error(plan_gm);
    one_w = mc::estimate_word_error(plan_w);
  }
  {
    ScopedThreadEnv env("3");
    const auto three_gm = mc::estimate_word_error(plan_gm);
    const auto three_w = mc::estimate_word_error(plan_w);
    CHECK(one_gm.errors == three_gm.errors);
    CHECK(one_gm.erasures == three_gm.erasures);
    CHECK(one_w.errors == three_w.errors);
    CHECK(one_w.erasures == three_w.erasures);
  }
  {
    ScopedThreadEnv env("255");
    const auto many_gm = mc::estimate_word_error(plan_gm);
    CHECK(one_gm.errors == many_gm.errors);
    CHECK(one_gm.erasures == many_gm.erasures);
  }
}

TEST_CASE("induced channel estimation") {
  // 256 trials per input is a power of two, so every count / trials is an
  // exact dyadic rational and each row sums to exactly 1.
  auto plan = gm_plan(8, std::log(4.0), 1.0, 256, 11);
  const auto ch = mc::estimate_induced_channel(plan);
  REQUIRE(ch.inputs() == 8);
  REQUIRE(ch.outputs() == 9);  // extra column: pre-resolution erasure
  for (std::size_t x = 0; x < 8; ++x) {
    double sum = 0.0;
    for (std::size_t y = 0; y < 9; ++y) sum += ch(x, y);
    CHECK(sum == 1.0);
    // Clicks land on the transmitted port; erasures fill column M.
    CHECK(ch(x, x) > 0.6);
    CHECK_THAT(ch(x, 8), WithinAbs(0.25, 4.0 * std::sqrt(0.25 * 0.75 / 256.0)));
  }
  SECTION("the induced channel feeds the capacity solver") {
    const auto res = dmc::blahut_arimoto(ch);
    CHECK(res.converged);
    CHECK(res.capacity_bits <= 3.0 + 1e-12);
    CHECK(res.capacity_bits > 1.0);  // erasures at 25% still leave most of log2(8)
  }
  SECTION("trial floor") {
    plan.trials = 99;
    CHECK_THROWS_AS(mc::estimate_induced_channel(plan), std::invalid_argument);
  }
}

TEST_CASE("pixel budgets: frozen operating points") {
  SECTION("coherent interferometer at 5 bits per photon") {
    const auto r = mc::pixels_for_target(optics::SimScheme::kCoherentGm, 5.0, 1e-3);
    CHECK(r.m == (std::uint64_t{1} << 35));
    CHECK(r.k_copies == 1);
    CHECK_THAT(r.pie, WithinAbs(5.0, 1e-9));
    CHECK(r.p_e <= 1e-3);
    CHECK_THAT(r.p_e, WithinRel(0.0009177590388083089, 1e-6));
  }
  SECTION("single-photon transceiver at 5 bits per photon, lossless") {
    const auto r = mc::pixels_for_target(optics::SimScheme::kWState, 5.0, 1e-3, 1.0);
    CHECK(r.m == 32);
    CHECK(r.k_copies == 1);
    CHECK(r.p_e == 0.0);
    CHECK_THAT(r.n_s_per_pixel, WithinRel(1.0 / 32.0, 1e-15));
  }
  SECTION("single-photon transceiver under heavy loss needs coherent-scale blocks") {
    const auto r = mc::pixels_for_target(optics::SimScheme::kWState, 5.0, 1e-3, 0.01);
    CHECK(r.m == (std::uint64_t{1} << 35));
    CHECK(r.k_copies == 688);
    CHECK(r.p_e <= 1e-3);
  }
  SECTION("single-shot feasibility boundary near unit transmissivity") {
    const auto edge = mc::pixels_for_target(optics::SimScheme::kWState, 5.0, 1e-3, 0.999);
    CHECK(edge.m == 32);
    CHECK(edge.k_copies == 1);
    const auto below = mc::pixels_for_target(optics::SimScheme::kWState, 5.0, 1e-3, 0.998);
    CHECK(below.m == 1024);
    CHECK(below.k_copies == 2);
  }
}

TEST_CASE("pixel budgets are monotone in the target") {
  SECTION("raising the efficiency target never shrinks the block") {
    std::uint64_t prev = 0;
    for (double pie : {2.0, 3.0, 4.0, 5.0, 6.0}) {
      const auto r = mc::pixels_for_target(optics::SimScheme::kCoherentGm, pie, 1e-3);
      CHECK(r.m >= prev);
      prev = r.m;
    }
    prev = 0;
    for (double pie : {2.0, 5.0, 8.0}) {
      const auto r = mc::pixels_for_target(optics::SimScheme::kWState, pie, 1e-3, 1.0);
      CHECK(r.m >= prev);
      prev = r.m;
    }
  }
  SECTION("lowering the error target never shrinks the block") {
    // PIE 3 keeps both targets feasible for the coherent scheme; at PIE 5 the
    // 1e-6 target needs log2(M) ~ 5 ln(1e6) ~ 69, beyond the 2^62 scan cap.
    const auto loose = mc::pixels_for_target(optics::SimScheme::kCoherentGm, 3.0, 1e-3);
    const auto tight = mc::pixels_for_target(optics::SimScheme::kCoherentGm, 3.0, 1e-6);
    CHECK(tight.m >= loose.m);
    const auto loose_w = mc::pixels_for_target(optics::SimScheme::kWState, 5.0, 1e-3, 0.6);
    const auto tight_w = mc::pixels_for_target(optics::SimScheme::kWState, 5.0, 1e-6, 0.6);
    CHECK(tight_w.m >= loose_w.m);
  }
  SECTION("parameter validation") {
    CHECK_THROWS_AS(mc::pixels_for_target(optics::SimScheme::kCoherentGm, -1.0, 1e-3),
                    std::domain_error);
    CHECK_THROWS_AS(mc::pixels_for_target(optics::SimScheme::kCoherentGm, 5.0, 0.0),
                    std::domain_error);
    CHECK_THROWS_AS(mc::pixels_for_target(optics::SimScheme::kWState, 5.0, 1e-3, 1.0001),
                    std::domain_error);
  }
}
