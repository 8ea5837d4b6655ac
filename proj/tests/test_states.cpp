#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kappaent/linalg.hpp"
#include "kappaent/states.hpp"

using namespace kappaent;

namespace {

void require_valid_density(const BipartiteOperator& rho) {
  REQUIRE(is_hermitian(rho.mat, 1e-10));
  REQUIRE(std::abs(rho.mat.trace().real() - 1.0) < 1e-10);
  REQUIRE(is_psd(rho.mat, 1e-10));
}

}  // namespace

TEST_CASE("max_entangled", "[states]") {
  const BipartiteOperator triv = max_entangled(1);
  REQUIRE(triv.dim() == 1);
  REQUIRE(triv.mat(0, 0) == Complex(1, 0));

  const BipartiteOperator bell = max_entangled(2);
  require_valid_density(bell);
  REQUIRE(std::log2(trace_norm(partial_transpose(bell).mat)) ==
          Catch::Approx(1.0).margin(1e-11));

  const BipartiteOperator phi4 = max_entangled(4);
  require_valid_density(phi4);
  REQUIRE((partial_trace(phi4, Subsystem::B) - CMat::Identity(4, 4) / 4.0)
              .cwiseAbs().maxCoeff() < 1e-13);
  // rank 1
  const RVec ev = herm_eig(phi4.mat).eigenvalues;
  REQUIRE(ev(ev.size() - 1) == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(ev(ev.size() - 2) == Catch::Approx(0.0).margin(1e-12));

  REQUIRE_THROWS_AS(max_entangled(0), std::invalid_argument);
}

TEST_CASE("antisym_rank2", "[states]") {
  const BipartiteOperator rv = antisym_rank2();
  REQUIRE(rv.dim_a == 3);
  REQUIRE(rv.dim_b == 3);
  require_valid_density(rv);
  REQUIRE(trace_norm(partial_transpose(rv).mat) ==
          Catch::Approx(1.0 + 1.0 / std::sqrt(2.0)).margin(1e-11));
  // rank two
  const RVec ev = herm_eig(rv.mat).eigenvalues;
  int nonzero = 0;
  for (Index i = 0; i < ev.size(); ++i) {
    if (ev(i) > 1e-10) ++nonzero;
  }
  REQUIRE(nonzero == 2);
  // supported inside the antisymmetric subspace
  const CMat sym = symmetric_projector(3);
  REQUIRE((sym * rv.mat * sym).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("sigma family", "[states]") {
  REQUIRE((family_sigma(0.5).mat - antisym_rank2().mat).cwiseAbs().maxCoeff() < 1e-14);

  // sigma_0 = |v2><v2| is maximally entangled of Schmidt rank 2
  const BipartiteOperator s0 = family_sigma(0.0);
  require_valid_density(s0);
  REQUIRE(std::log2(trace_norm(partial_transpose(s0).mat)) ==
          Catch::Approx(1.0).margin(1e-11));

  REQUIRE_THROWS_AS(family_sigma(-0.1), std::invalid_argument);
  REQUIRE_THROWS_AS(family_sigma(1.1), std::invalid_argument);
}

TEST_CASE("omega and tau families", "[states]") {
  for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    require_valid_density(family_omega(p));
    const BipartiteOperator tau = family_tau(p);
    require_valid_density(tau);
    REQUIRE(herm_eig(tau.mat).eigenvalues.minCoeff() >= 1.0 / 36.0 - 1e-12);
  }
  REQUIRE_THROWS_AS(family_omega(2.0), std::invalid_argument);
  REQUIRE_THROWS_AS(family_tau(-1e-9), std::invalid_argument);
}

TEST_CASE("families are Lipschitz in p", "[states][property]") {
  const double delta = 1e-6;
  for (double p : {0.1, 0.4, 0.8}) {
    for (auto family : {family_sigma, family_omega, family_tau}) {
      const double dist =
          trace_norm(family(p + delta).mat - family(p).mat);
      REQUIRE(dist <= 4.0 * delta);
    }
  }
}

TEST_CASE("convexity trio", "[states]") {
  const ConvexityTrio t = convexity_trio();
  require_valid_density(t.rho1);
  require_valid_density(t.rho2);
  require_valid_density(t.average);
  REQUIRE(std::log2(trace_norm(partial_transpose(t.rho1).mat)) ==
          Catch::Approx(1.0).margin(1e-11));
  REQUIRE(std::log2(trace_norm(partial_transpose(t.rho2).mat)) ==
          Catch::Approx(0.0).margin(1e-11));
  REQUIRE(std::log2(trace_norm(partial_transpose(t.average).mat)) ==
          Catch::Approx(std::log2(1.5)).margin(1e-11));
  REQUIRE((t.average.mat - 0.5 * (t.rho1.mat + t.rho2.mat)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("monogamy state", "[states]") {
  const MonogamyState m = monogamy_state();
  require_valid_density(m.psi_a_bc);
  require_valid_density(m.psi_ab);
  require_valid_density(m.psi_ac);
  REQUIRE(m.psi_a_bc.dim_a == 2);
  REQUIRE(m.psi_a_bc.dim_b == 4);

  // pure: Tr rho^2 = 1
  REQUIRE((m.psi_a_bc.mat * m.psi_a_bc.mat).trace().real() ==
          Catch::Approx(1.0).margin(1e-12));

  // Schmidt coefficients across A|BC are (1/sqrt2, 1/sqrt2)
  const RVec marg = herm_eig(partial_trace(m.psi_a_bc, Subsystem::A)).eigenvalues;
  REQUIRE(marg(0) == Catch::Approx(0.5).margin(1e-12));
  REQUIRE(marg(1) == Catch::Approx(0.5).margin(1e-12));

  REQUIRE(std::log2(trace_norm(partial_transpose(m.psi_a_bc).mat)) ==
          Catch::Approx(1.0).margin(1e-11));
  REQUIRE(std::log2(trace_norm(partial_transpose(m.psi_ab).mat)) ==
          Catch::Approx(std::log2(1.5)).margin(1e-11));
  REQUIRE(std::log2(trace_norm(partial_transpose(m.psi_ac).mat)) ==
          Catch::Approx(std::log2(1.5)).margin(1e-11));
}

TEST_CASE("random_state", "[states]") {
  const BipartiteOperator a = random_state(2, 3, 4, 12345);
  const BipartiteOperator b = random_state(2, 3, 4, 12345);
  REQUIRE((a.mat - b.mat).cwiseAbs().maxCoeff() == 0.0);
  require_valid_density(a);

  const BipartiteOperator pure = random_state(3, 3, 1, 7);
  REQUIRE((pure.mat * pure.mat).trace().real() == Catch::Approx(1.0).margin(1e-10));

  const BipartiteOperator other = random_state(2, 3, 4, 12346);
  REQUIRE((a.mat - other.mat).cwiseAbs().maxCoeff() > 1e-3);

  REQUIRE_THROWS_AS(random_state(2, 2, 0, 1), std::invalid_argument);
  REQUIRE_THROWS_AS(random_state(2, 2, 5, 1), std::invalid_argument);
}

TEST_CASE("every named constructor output validates", "[states][property]") {
  require_valid_density(max_entangled(2));
  require_valid_density(max_entangled(3));
  require_valid_density(max_entangled(4));
  require_valid_density(antisym_rank2());
  for (double p : {0.0, 0.3, 1.0}) {
    require_valid_density(family_sigma(p));
    require_valid_density(family_omega(p));
    require_valid_density(family_tau(p));
  }
  for (std::uint64_t s = 1; s <= 20; ++s) {
    require_valid_density(random_state(2, 2, 1 + (s % 4), s));
    require_valid_density(random_state(3, 3, 1 + (s % 9), s));
  }
}
