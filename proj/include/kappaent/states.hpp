#pragma once

// Constructors for every named state used by the toolkit, plus seeded random
// density matrices. All constructors return validated density matrices
// (Hermitian, PSD within 1e-10, unit trace within 1e-10).

#include <cmath>
#include <random>
#include <stdexcept>

#include "kappaent/linalg.hpp"

namespace kappaent {

/// Throws unless rho is a density matrix within the given tolerances.
inline void require_density_matrix(const BipartiteOperator& rho,
                                   double herm_tol = 1e-10, double psd_tol = 1e-10,
                                   double trace_tol = 1e-10) {
  if (rho.mat.rows() != rho.dim()) {
    throw std::invalid_argument("state: matrix side does not match declared dimensions");
  }
  if (!is_hermitian(rho.mat, herm_tol)) {
    throw std::invalid_argument("state: matrix is not Hermitian");
  }
  if (std::abs(rho.mat.trace().real() - 1.0) > trace_tol ||
      std::abs(rho.mat.trace().imag()) > trace_tol) {
    throw std::invalid_argument("state: trace differs from 1");
  }
  if (!is_psd(rho.mat, psd_tol)) {
    throw std::invalid_argument("state: matrix is not positive semidefinite");
  }
}

/// |ket><ket| as a d_a (x) d_b bipartite operator.
inline BipartiteOperator projector_state(const Eigen::VectorXcd& ket, Index dim_a,
                                         Index dim_b) {
  CMat m = ket * ket.adjoint();
  return make_bipartite(std::move(m), dim_a, dim_b);
}

/// Maximally entangled state of Schmidt rank d, (1/d) sum_ij |ii><jj|.
inline BipartiteOperator max_entangled(Index d) {
  if (d < 1) throw std::invalid_argument("max_entangled: d must be >= 1");
  CMat m = CMat::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) m(i * d + i, j * d + j) = 1.0 / static_cast<double>(d);
  }
  return BipartiteOperator{std::move(m), d, d};
}

inline Eigen::VectorXcd basis_ket(Index i, Index j, Index dim_a, Index dim_b) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim_a * dim_b);
  v(i * dim_b + j) = 1.0;
  return v;
}

// the two antisymmetric kets behind the rank-two 3x3 example family
inline Eigen::VectorXcd ket_v1() {
  return (basis_ket(0, 1, 3, 3) - basis_ket(1, 0, 3, 3)) / std::sqrt(2.0);
}
inline Eigen::VectorXcd ket_v2() {
  return (basis_ket(0, 2, 3, 3) - basis_ket(2, 0, 3, 3)) / std::sqrt(2.0);
}

/// Rank-two state on the 3x3 antisymmetric subspace,
/// (|v1><v1| + |v2><v2|)/2 with v1 = (|01>-|10>)/sqrt2, v2 = (|02>-|20>)/sqrt2.
inline BipartiteOperator antisym_rank2() {
  const Eigen::VectorXcd v1 = ket_v1();
  const Eigen::VectorXcd v2 = ket_v2();
  CMat m = 0.5 * (v1 * v1.adjoint() + v2 * v2.adjoint());
  return make_bipartite(std::move(m), 3, 3);
}

inline void require_unit_interval(double p, const char* who) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string(who) + ": parameter must lie in [0,1]");
  }
}

/// Rank-two two-qutrit family sigma_p = p|v1><v1| + (1-p)|v2><v2|.
inline BipartiteOperator family_sigma(double p) {
  require_unit_interval(p, "family_sigma");
  const Eigen::VectorXcd v1 = ket_v1();
  const Eigen::VectorXcd v2 = ket_v2();
  CMat m = p * (v1 * v1.adjoint()) + (1.0 - p) * (v2 * v2.adjoint());
  return make_bipartite(std::move(m), 3, 3);
}

/// Rank-three two-qutrit family
/// omega_p = (p/2)|u1><u1| + ((1-p)/2)|u2><u2| + (1/2)|u3><u3|
/// with u1 = |00>, u2 = (|02>+|20>)/sqrt2, u3 = (|12>+|21>)/sqrt2.
inline BipartiteOperator family_omega(double p) {
  require_unit_interval(p, "family_omega");
  const Eigen::VectorXcd u1 = basis_ket(0, 0, 3, 3);
  const Eigen::VectorXcd u2 = (basis_ket(0, 2, 3, 3) + basis_ket(2, 0, 3, 3)) / std::sqrt(2.0);
  const Eigen::VectorXcd u3 = (basis_ket(1, 2, 3, 3) + basis_ket(2, 1, 3, 3)) / std::sqrt(2.0);
  CMat m = 0.5 * p * (u1 * u1.adjoint()) + 0.5 * (1.0 - p) * (u2 * u2.adjoint()) +
           0.5 * (u3 * u3.adjoint());
  return make_bipartite(std::move(m), 3, 3);
}

/// Full-rank two-qutrit family
/// tau_p = (3p/4)|w1><w1| + (3(1-p)/4)|w2><w2| + (1/4)(I/9)
/// with w1 = (|00>+|12>+|21>)/sqrt3, w2 = (|02>+|20>)/sqrt2.
inline BipartiteOperator family_tau(double p) {
  require_unit_interval(p, "family_tau");
  const Eigen::VectorXcd w1 =
      (basis_ket(0, 0, 3, 3) + basis_ket(1, 2, 3, 3) + basis_ket(2, 1, 3, 3)) / std::sqrt(3.0);
  const Eigen::VectorXcd w2 = (basis_ket(0, 2, 3, 3) + basis_ket(2, 0, 3, 3)) / std::sqrt(2.0);
  CMat m = 0.75 * p * (w1 * w1.adjoint()) + 0.75 * (1.0 - p) * (w2 * w2.adjoint()) +
           (1.0 / 36.0) * CMat::Identity(9, 9);
  return make_bipartite(std::move(m), 3, 3);
}

struct ConvexityTrio {
  BipartiteOperator rho1;     // Bell state Phi^2
  BipartiteOperator rho2;     // (|00><00| + |11><11|)/2
  BipartiteOperator average;  // (rho1 + rho2)/2
};

/// The two-qubit trio witnessing non-convexity.
inline ConvexityTrio convexity_trio() {
  ConvexityTrio t;
  t.rho1 = max_entangled(2);
  CMat m = CMat::Zero(4, 4);
  m(0, 0) = 0.5;
  m(3, 3) = 0.5;
  t.rho2 = make_bipartite(std::move(m), 2, 2);
  t.average = make_bipartite(0.5 * (t.rho1.mat + t.rho2.mat), 2, 2);
  return t;
}

struct MonogamyState {
  BipartiteOperator psi_a_bc;  // cut A | BC, dims 2 x 4
  BipartiteOperator psi_ab;    // 2 x 2 marginal
  BipartiteOperator psi_ac;    // 2 x 2 marginal
};

/// Three-qubit pure state (|000> + |011> + sqrt2 |110>)/2 and the two-party
/// reductions witnessing non-monogamy.
inline MonogamyState monogamy_state() {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(8);
  psi(0) = 0.5;                  // |000>
  psi(3) = 0.5;                  // |011>
  psi(6) = std::sqrt(2.0) / 2.0; // |110>
  CMat full = psi * psi.adjoint();

  MonogamyState s;
  s.psi_a_bc = make_bipartite(full, 2, 4);
  // trace out C: view as (AB) x C
  BipartiteOperator ab_c = make_bipartite(full, 4, 2);
  s.psi_ab = make_bipartite(partial_trace(ab_c, Subsystem::A), 2, 2);
  // trace out B: reorder to (AC) x B first
  CMat reordered(8, 8);
  auto acb = [](Index a, Index b, Index c) { return (a * 2 + c) * 2 + b; };
  for (Index a = 0; a < 2; ++a)
    for (Index b = 0; b < 2; ++b)
      for (Index c = 0; c < 2; ++c)
        for (Index ap = 0; ap < 2; ++ap)
          for (Index bp = 0; bp < 2; ++bp)
            for (Index cp = 0; cp < 2; ++cp)
              reordered(acb(a, b, c), acb(ap, bp, cp)) =
                  full((a * 2 + b) * 2 + c, (ap * 2 + bp) * 2 + cp);
  BipartiteOperator ac_b = make_bipartite(std::move(reordered), 4, 2);
  s.psi_ac = make_bipartite(partial_trace(ac_b, Subsystem::A), 2, 2);
  return s;
}

/// Seeded random density matrix of the given rank (Ginibre construction
/// G G^dag / Tr). Identical seeds reproduce identical matrices.
inline BipartiteOperator random_state(Index dim_a, Index dim_b, Index rank,
                                      std::uint64_t seed) {
  const Index d = dim_a * dim_b;
  if (rank < 1 || rank > d) {
    throw std::invalid_argument("random_state: rank must lie in [1, dim_a*dim_b]");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat g(d, rank);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < rank; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re, im);
    }
  }
  CMat m = g * g.adjoint();
  m /= m.trace().real();
  return make_bipartite(hermitian_part(m), dim_a, dim_b);
}

}  // namespace kappaent
