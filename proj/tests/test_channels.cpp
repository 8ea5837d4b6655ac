#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kappaent/channels.hpp"
#include "kappaent/measures.hpp"
#include "kappaent/states.hpp"

using namespace kappaent;

TEST_CASE("feasibility search basics", "[channels]") {
  const ConvexityTrio trio = convexity_trio();

  // PPT state with m = 1: G = rho itself satisfies 0 <= rho^TB <= 2 rho^TB
  const auto g_ppt = feasibility_G(trio.rho2, 1);
  REQUIRE(g_ppt.has_value());
  REQUIRE(lambda_min(partial_transpose(*g_ppt).mat) >= -1e-8);

  // Phi^2 with m = 1 would force rho^TB >= 0: infeasible
  REQUIRE_FALSE(feasibility_G(max_entangled(2), 1).has_value());

  // rho_v with m = 2 is feasible since its exact cost is 1 bit
  const auto g_rv = feasibility_G(antisym_rank2(), 2);
  REQUIRE(g_rv.has_value());
  const CMat g_tb = partial_transpose(*g_rv).mat;
  const CMat r_tb = partial_transpose(antisym_rank2()).mat;
  REQUIRE(lambda_min(3.0 * g_tb - r_tb) >= -1e-7);
  REQUIRE(lambda_min(r_tb + g_tb) >= -1e-7);
  REQUIRE(std::abs(g_rv->mat.trace().real() - 1.0) <= 1e-9);
}

TEST_CASE("one-shot certification of named states", "[channels]") {
  SECTION("PPT input costs nothing") {
    const PreparationCertificate cert = one_shot_exact_cost(convexity_trio().rho2);
    REQUIRE(cert.m == 1);
    REQUIRE(cert.valid());
    REQUIRE(cert.e_kappa == 0.0);
    REQUIRE_FALSE(cert.sandwich_lower.has_value());
  }
  SECTION("maximally entangled states need their full Schmidt rank") {
    for (int d : {2, 3}) {
      const PreparationCertificate cert = one_shot_exact_cost(max_entangled(d));
      REQUIRE(cert.m == d);
      REQUIRE(cert.valid());
    }
  }
  SECTION("antisymmetric rank-two state costs one bit") {
    const PreparationCertificate cert = one_shot_exact_cost(antisym_rank2());
    REQUIRE(cert.m == 2);
    REQUIRE(cert.valid());
    REQUIRE(cert.prep_residual <= 1e-7);
    REQUIRE(cert.cp_lambda_min >= -1e-7);
    REQUIRE(cert.pptp_lambda_min >= -1e-7);
    // minimality: m - 1 = 1 is certifiably infeasible
    REQUIRE_FALSE(feasibility_G(antisym_rank2(), 1).has_value());
    // sandwich consistency and the monotonicity consequence
    const double log2m = std::log2(double(cert.m));
    REQUIRE(log2m >= *cert.sandwich_lower - 1e-6);
    REQUIRE(log2m <= cert.sandwich_upper + 1e-6);
    REQUIRE(cert.e_kappa <= log2m + 1e-6);
  }
}

TEST_CASE("measure-prepare channel action", "[channels]") {
  const BipartiteOperator rho = antisym_rank2();
  const PreparationCertificate cert = one_shot_exact_cost(rho);
  const int m = cert.m;

  // Phi^m prepares rho exactly
  const BipartiteOperator out = measure_prepare_apply(rho, cert.g, m, max_entangled(m));
  REQUIRE((out.mat - rho.mat).cwiseAbs().maxCoeff() < 1e-12);

  // a state orthogonal to Phi^m prepares G
  CMat orth = CMat::Zero(m * m, m * m);
  orth(1, 1) = 1.0;  // |01><01|
  const BipartiteOperator out_g =
      measure_prepare_apply(rho, cert.g, m, make_bipartite(orth, m, m));
  REQUIRE((out_g.mat - cert.g.mat).cwiseAbs().maxCoeff() < 1e-12);

  // maximally mixed input lands at the predicted convex mixture
  const double w = 1.0 / double(m * m);
  const BipartiteOperator mixed = measure_prepare_apply(
      rho, cert.g, m, make_bipartite(CMat::Identity(m * m, m * m) * w, m, m));
  const CMat expected = w * rho.mat + (1.0 - w) * cert.g.mat;
  REQUIRE((mixed.mat - expected).cwiseAbs().maxCoeff() < 1e-12);

  // trace preservation on a random input
  const BipartiteOperator rnd = random_state(m, m, m * m, 99);
  REQUIRE(measure_prepare_apply(rho, cert.g, m, rnd).mat.trace().real() ==
          Catch::Approx(1.0).margin(1e-12));

  REQUIRE_THROWS_AS(measure_prepare_apply(rho, cert.g, m, max_entangled(m + 1)),
                    std::invalid_argument);
}

TEST_CASE("choi matrix verification", "[channels]") {
  SECTION("PPT state with m = 1 has the trivial Choi matrix") {
    const BipartiteOperator rho = convexity_trio().rho2;
    const BipartiteOperator j = choi_matrix(rho, rho, 1);
    REQUIRE(j.dim_a == 1);
    REQUIRE((j.mat - rho.mat).cwiseAbs().maxCoeff() < 1e-14);
  }
  SECTION("a deliberately broken pair is flagged by the transposed Choi matrix") {
    // rho = Phi^3 with G = I/9 and m = 2 violates the preparation condition
    const BipartiteOperator g_bad =
        make_bipartite(CMat::Identity(9, 9) / 9.0, 3, 3);
    const BipartiteOperator j = choi_matrix(max_entangled(3), g_bad, 2);
    REQUIRE(lambda_min(j.mat) >= -1e-9);  // still a channel (CP holds)
    const double ppt_floor = lambda_min(choi_ppt_transform(j, 2, 3, 3));
    REQUIRE(ppt_floor < -1e-3);
  }
}

TEST_CASE("transposed channel prepares on the symmetric and antisymmetric branches",
          "[channels]") {
  const BipartiteOperator rho = antisym_rank2();
  const PreparationCertificate cert = one_shot_exact_cost(rho);
  const int m = cert.m;
  const double md = m;
  const CMat rho_tb = partial_transpose(rho).mat;
  const CMat g_tb = partial_transpose(cert.g).mat;
  const CMat sym_branch = (rho_tb + (md - 1.0) * g_tb) / md;
  const CMat anti_branch = ((md + 1.0) * g_tb - rho_tb) / md;

  auto transposed_apply = [&](const CMat& y) {
    const BipartiteOperator y_tb =
        partial_transpose(make_bipartite(y, m, m));
    const BipartiteOperator lam = measure_prepare_apply(rho, cert.g, m, y_tb);
    return partial_transpose(lam).mat;
  };

  const CMat sym = symmetric_projector(m);
  const CMat anti = antisymmetric_projector(m);
  const CMat on_sym = transposed_apply(sym);
  const CMat on_anti = transposed_apply(anti);
  REQUIRE((on_sym - sym.trace().real() * sym_branch).cwiseAbs().maxCoeff() < 1e-11);
  REQUIRE((on_anti - anti.trace().real() * anti_branch).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("isotropic twirl", "[channels]") {
  for (Index d : {Index(2), Index(3)}) {
    const BipartiteOperator phi = max_entangled(d);
    REQUIRE((isotropic_twirl(phi).mat - phi.mat).cwiseAbs().maxCoeff() < 1e-13);

    const BipartiteOperator mixed =
        make_bipartite(CMat::Identity(d * d, d * d) / double(d * d), d, d);
    REQUIRE((isotropic_twirl(mixed).mat - mixed.mat).cwiseAbs().maxCoeff() < 1e-13);
  }

  // |00><00| for d = 2 lands at (1/2) Phi + (1/2)(1 - Phi)/3
  CMat zz = CMat::Zero(4, 4);
  zz(0, 0) = 1.0;
  const CMat phi = max_entangled(2).mat;
  const CMat expected = 0.5 * phi + 0.5 * (CMat::Identity(4, 4) - phi) / 3.0;
  REQUIRE((isotropic_twirl(make_bipartite(zz, 2, 2)).mat - expected)
              .cwiseAbs().maxCoeff() < 1e-13);

  // output commutes with U (x) conj(U) invariants: twirl is idempotent
  const BipartiteOperator rnd = random_state(3, 3, 9, 31);
  const BipartiteOperator once = isotropic_twirl(rnd);
  REQUIRE((isotropic_twirl(once).mat - once.mat).cwiseAbs().maxCoeff() < 1e-12);
  REQUIRE(once.mat.trace().real() == Catch::Approx(1.0).margin(1e-12));

  REQUIRE_THROWS_AS(isotropic_twirl(make_bipartite(CMat::Identity(1, 1), 1, 1)),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(isotropic_twirl(make_bipartite(CMat::Identity(6, 6) / 6.0, 2, 3)),
                    std::invalid_argument);
}

TEST_CASE("twirl never increases the kappa measure", "[channels][property]") {
  for (Index d : {Index(2), Index(3)}) {
    for (std::uint64_t s = 1; s <= 5; ++s) {
      const BipartiteOperator rho = random_state(d, d, d * d, 800 + s);
      const double before = e_kappa_primal(rho).value_bits;
      const double after = e_kappa_primal(isotropic_twirl(rho)).value_bits;
      REQUIRE(after <= before + 1e-6);
    }
  }
}

TEST_CASE("certificates satisfy the full invariant battery", "[channels][property]") {
  for (const auto& rho : {max_entangled(2), antisym_rank2(), family_sigma(0.3),
                          convexity_trio().average}) {
    const PreparationCertificate cert = one_shot_exact_cost(rho);
    REQUIRE(cert.valid());
    REQUIRE(cert.g_lambda_min >= -1e-8);
    REQUIRE(std::abs(cert.g_trace_error) <= 1e-8);
    REQUIRE(cert.g_ppt_lambda_min >= -1e-8);
    const double log2m = std::log2(double(cert.m));
    if (cert.sandwich_lower) REQUIRE(log2m >= *cert.sandwich_lower - 1e-6);
    REQUIRE(log2m <= cert.sandwich_upper + 1e-6);
    REQUIRE(cert.e_kappa <= log2m + 1e-6);
    if (cert.m >= 2) {
      REQUIRE_FALSE(feasibility_G(rho, cert.m - 1).has_value());
    }
  }
}
