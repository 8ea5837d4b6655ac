#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kappaent/measures.hpp"
#include "kappaent/states.hpp"

using namespace kappaent;

TEST_CASE("kappa normalization on maximally entangled states", "[measures]") {
  for (Index m : {Index(2), Index(3), Index(4)}) {
    const PrimalKappaResult r = e_kappa_primal(max_entangled(m));
    REQUIRE(r.value_bits == Catch::Approx(std::log2(double(m))).margin(1e-6));
    REQUIRE(r.diagnostics.status == SdpStatus::Optimal);
  }
}

TEST_CASE("kappa vanishes exactly on PPT states", "[measures]") {
  const ConvexityTrio trio = convexity_trio();
  REQUIRE(e_kappa_primal(trio.rho2).value_bits == 0.0);
  REQUIRE(e_kappa_dual(trio.rho2).value_bits == 0.0);
}

TEST_CASE("kappa on the antisymmetric rank-two state", "[measures]") {
  const BipartiteOperator rv = antisym_rank2();
  const PrimalKappaResult primal = e_kappa_primal(rv);
  const DualKappaResult dual = e_kappa_dual(rv);
  REQUIRE(primal.value_bits == Catch::Approx(1.0).margin(1e-6));
  REQUIRE(dual.value_bits == Catch::Approx(1.0).margin(1e-6));
  REQUIRE(std::abs(primal.value_bits - dual.value_bits) <= 1e-6);

  // the optimizer S is feasible: S >= 0 and -S^TB <= rho^TB <= S^TB
  const CMat s_tb = partial_transpose(primal.optimizer_s).mat;
  const CMat r_tb = partial_transpose(rv).mat;
  REQUIRE(lambda_min(primal.optimizer_s.mat) >= -1e-7);
  REQUIRE(lambda_min(s_tb - r_tb) >= -1e-7);
  REQUIRE(lambda_min(s_tb + r_tb) >= -1e-7);

  // dual optimizers are feasible
  const CMat v_tb = partial_transpose(dual.optimizer_v).mat;
  const CMat w_tb = partial_transpose(dual.optimizer_w).mat;
  REQUIRE(lambda_min(v_tb) >= -1e-7);
  REQUIRE(lambda_min(w_tb) >= -1e-7);
  REQUIRE(herm_eig(dual.optimizer_v.mat + dual.optimizer_w.mat).eigenvalues.maxCoeff() <=
          1.0 + 1e-7);
}

TEST_CASE("kappa on the convexity average", "[measures]") {
  REQUIRE(e_kappa_primal(convexity_trio().average).value_bits ==
          Catch::Approx(std::log2(1.5)).margin(1e-6));
}

TEST_CASE("dual feasible point V=1, W=0 forces nonnegativity", "[measures]") {
  // any state: E_dual >= 0 since Tr rho(1-0) = 1
  for (const auto& rho : {convexity_trio().rho2, family_tau(0.5), random_state(2, 2, 4, 5)}) {
    REQUIRE(e_kappa_dual(rho).value_bits >= 0.0);
  }
}

TEST_CASE("log negativity", "[measures]") {
  // separable product state
  CMat m = CMat::Zero(4, 4);
  m(0, 0) = 1.0;
  REQUIRE(log_negativity(make_bipartite(m, 2, 2)) == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(log_negativity(antisym_rank2()) ==
          Catch::Approx(std::log2(1.0 + 1.0 / std::sqrt(2.0))).margin(1e-9));
  REQUIRE(log_negativity(monogamy_state().psi_ac) ==
          Catch::Approx(std::log2(1.5)).margin(1e-9));
}

TEST_CASE("z bound", "[measures]") {
  // binegative states: the max term vanishes and log2 Z = E_N
  for (Index m : {Index(2), Index(3), Index(4)}) {
    REQUIRE(z_bound(max_entangled(m)) ==
            Catch::Approx(std::log2(double(m))).margin(1e-9));
  }
  REQUIRE(z_bound(antisym_rank2()) ==
          Catch::Approx(std::log2(1.0 + 13.0 / (4.0 * std::sqrt(2.0)))).margin(1e-9));
  // two-qubit states are binegative, so log2 Z collapses to E_N
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const BipartiteOperator rho = random_state(2, 2, 2, s);
    REQUIRE(z_bound(rho) == Catch::Approx(log_negativity(rho)).margin(1e-9));
  }
}

TEST_CASE("binegativity condition", "[measures]") {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    REQUIRE(binegativity_holds(random_state(2, 2, 1 + (s % 4), s)));
  }
  REQUIRE(binegativity_holds(max_entangled(2)));
  REQUIRE(binegativity_holds(max_entangled(3)));
  REQUIRE_FALSE(binegativity_holds(antisym_rank2()));
}

TEST_CASE("one-shot bounds arithmetic", "[measures]") {
  const OneShotBounds at_zero = one_shot_bounds(0.0);
  REQUIRE_FALSE(at_zero.lower.has_value());
  REQUIRE(at_zero.upper == Catch::Approx(std::log2(3.0)).margin(1e-12));

  const OneShotBounds at_one = one_shot_bounds(1.0);
  REQUIRE(at_one.lower.has_value());
  REQUIRE(*at_one.lower == Catch::Approx(0.0).margin(1e-12));
  REQUIRE(at_one.upper == Catch::Approx(2.0).margin(1e-12));

  const OneShotBounds at_log3 = one_shot_bounds(std::log2(3.0));
  REQUIRE(*at_log3.lower == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(at_log3.upper == Catch::Approx(std::log2(5.0)).margin(1e-12));

  REQUIRE_THROWS_AS(one_shot_bounds(-0.1), std::invalid_argument);
}

TEST_CASE("witness extraction", "[measures]") {
  const WitnessResult bell = extract_witness(max_entangled(2));
  REQUIRE(bell.violation == Catch::Approx(-1.0).margin(1e-6));

  const WitnessResult ppt = extract_witness(convexity_trio().rho2);
  REQUIRE(ppt.violation == Catch::Approx(0.0).margin(1e-6));

  const WitnessResult avg = extract_witness(convexity_trio().average);
  REQUIRE(avg.violation == Catch::Approx(-0.5).margin(1e-6));

  // the witness certifies: nonnegative expectation on PPT states of equal shape
  const CMat w = avg.z.mat + CMat::Identity(4, 4);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    BipartiteOperator cand = random_state(2, 2, 4, 400 + s);
    // mix toward maximal mixedness until PPT
    const double lmin = lambda_min(partial_transpose(cand).mat);
    if (lmin < 0.0) {
      const double lam = std::min(1.0, 1.02 * (-lmin) / (-lmin + 0.25));
      cand = make_bipartite((1.0 - lam) * cand.mat + lam * CMat::Identity(4, 4) / 4.0, 2, 2);
    }
    REQUIRE((w * cand.mat).trace().real() >= -1e-7);
  }
}

TEST_CASE("additivity on small products", "[measures]") {
  const AdditivityReport bellbell = additivity_check(max_entangled(2), max_entangled(2));
  REQUIRE(bellbell.lhs == Catch::Approx(2.0).margin(1e-5));
  REQUIRE(bellbell.gap <= 1e-5);

  const AdditivityReport with_ppt = additivity_check(max_entangled(2), convexity_trio().rho2);
  REQUIRE(with_ppt.lhs == Catch::Approx(1.0).margin(1e-5));

  REQUIRE_THROWS_AS(additivity_check(max_entangled(4), max_entangled(3)),
                    std::invalid_argument);
}

TEST_CASE("measure report invariants across shapes", "[measures][property]") {
  for (const auto& rho : {max_entangled(2), antisym_rank2(), family_omega(0.4),
                          random_state(2, 3, 6, 21), random_state(3, 3, 5, 22),
                          random_state(2, 4, 8, 23)}) {
    const MeasureReport r = measure_report(rho);
    REQUIRE(r.e_kappa_dual <= r.e_kappa_primal + 1e-6);
    REQUIRE(r.e_n <= r.e_kappa_primal + 1e-6);
    REQUIRE(r.e_kappa_primal <= r.log2_z + 1e-6);
    REQUIRE(r.e_kappa_primal >= 0.0);
    const double dim_bound = std::log2(double(std::min(rho.dim_a, rho.dim_b)));
    REQUIRE(r.e_kappa_primal <= dim_bound + 1e-6);
    if (r.binegativity) REQUIRE(std::abs(r.e_kappa_primal - r.e_n) <= 1e-6);
    if (r.e_kappa_primal == 0.0) {
      REQUIRE_FALSE(r.one_shot_lower.has_value());
    } else {
      REQUIRE(r.one_shot_lower.has_value());
      REQUIRE(*r.one_shot_lower ==
              Catch::Approx(std::log2(std::exp2(r.e_kappa_primal) - 1.0)).margin(1e-9));
    }
    REQUIRE(r.one_shot_upper ==
            Catch::Approx(std::log2(std::exp2(r.e_kappa_primal) + 2.0)).margin(1e-9));
  }
}

TEST_CASE("two-qubit states collapse kappa onto log negativity", "[measures][property]") {
  for (std::uint64_t s = 1; s <= 25; ++s) {
    const BipartiteOperator rho = random_state(2, 2, 1 + (s % 4), 500 + s);
    REQUIRE(std::abs(e_kappa_primal(rho).value_bits - log_negativity(rho)) <= 1e-6);
  }
}

TEST_CASE("faithfulness both ways on a quick scan", "[measures][property]") {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    BipartiteOperator rho = random_state(2, 2, 4, 600 + s);
    const double lmin = lambda_min(partial_transpose(rho).mat);
    if (lmin < 0.0) {
      const double lam = std::min(1.0, 1.02 * (-lmin) / (-lmin + 0.25));
      rho = make_bipartite((1.0 - lam) * rho.mat + lam * CMat::Identity(4, 4) / 4.0, 2, 2);
    }
    REQUIRE(is_psd(partial_transpose(rho).mat, 1e-8));
    REQUIRE(e_kappa_primal(rho).value_bits <= 1e-6);
  }
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const BipartiteOperator rho = random_state(2, 2, 2, 700 + s);
    if (lambda_min(partial_transpose(rho).mat) > -1e-3) continue;
    REQUIRE(e_kappa_primal(rho).value_bits >= 1e-4);
  }
}

TEST_CASE("non-convexity and non-monogamy witnesses", "[measures]") {
  const ConvexityTrio trio = convexity_trio();
  const double gap_convex = e_kappa_primal(trio.average).value_bits -
                            0.5 * (e_kappa_primal(trio.rho1).value_bits +
                                   e_kappa_primal(trio.rho2).value_bits);
  REQUIRE(gap_convex == Catch::Approx(std::log2(1.5) - 0.5).margin(1e-6));
  REQUIRE(gap_convex > 0.0);

  const MonogamyState mono = monogamy_state();
  const double gap_mono = e_kappa_primal(mono.psi_ab).value_bits +
                          e_kappa_primal(mono.psi_ac).value_bits -
                          e_kappa_primal(mono.psi_a_bc).value_bits;
  REQUIRE(gap_mono == Catch::Approx(2.0 * std::log2(1.5) - 1.0).margin(1e-6));
  REQUIRE(gap_mono > 0.0);
}

TEST_CASE("separation of kappa from log negativity on sigma", "[measures]") {
  for (double p : {0.1, 0.5, 0.9}) {
    const BipartiteOperator s = family_sigma(p);
    REQUIRE(e_kappa_primal(s).value_bits - log_negativity(s) > 1e-4);
  }
  // endpoints coincide
  for (double p : {0.0, 1.0}) {
    const BipartiteOperator s = family_sigma(p);
    REQUIRE(std::abs(e_kappa_primal(s).value_bits - log_negativity(s)) <= 1e-6);
  }
}

TEST_CASE("invalid density matrices are rejected", "[measures]") {
  CMat m = CMat::Identity(4, 4);  // trace 4
  REQUIRE_THROWS_AS(e_kappa_primal(make_bipartite(m, 2, 2)), std::invalid_argument);
  CMat n = CMat::Zero(4, 4);
  n(0, 0) = 2.0;
  n(1, 1) = -1.0;
  REQUIRE_THROWS_AS(log_negativity(make_bipartite(n, 2, 2)), std::invalid_argument);
}
