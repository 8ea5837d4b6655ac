#pragma once

// Entanglement measures built on the embedded SDP solver: the kappa measure
// in primal and dual form, logarithmic negativity, the dimension-weighted
// Z upper bound, the binegativity condition, one-shot cost bounds, witness
// extraction and the additivity cross-check.
//
// SDP assembly convention: every complex Hermitian d x d operator enters the
// solver as its 2d x 2d real symmetric embedding; complex entrywise equality
// constraints are imposed through the d^2 Hermitian basis elements. The
// embedding doubles traces and inner products, and the factor 2 is divided
// out before any log2 is taken.

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "kappaent/linalg.hpp"
#include "kappaent/sdp.hpp"
#include "kappaent/states.hpp"

namespace kappaent {

/// Raised when the interior-point solver cannot certify optimality; carries
/// the solver status and final residuals.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(std::string what, const SdpSolution& sol)
      : std::runtime_error(std::move(what)), status(sol.status),
        primal_residual(sol.primal_residual), dual_residual(sol.dual_residual),
        gap(sol.gap), iterations(sol.iterations) {}

  SdpStatus status;
  double primal_residual;
  double dual_residual;
  double gap;
  int iterations;
};

struct SolveDiagnostics {
  SdpStatus status = SdpStatus::NumericalFailure;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
};

inline SolveDiagnostics diagnostics_of(const SdpSolution& sol) {
  return SolveDiagnostics{sol.status, sol.gap, sol.primal_residual,
                          sol.dual_residual, sol.iterations};
}

namespace detail {

// log2 values this close to zero collapse to exactly zero; faithfulness makes
// the exact value analytic and solver noise must not produce spurious sign
inline constexpr double kZeroClamp = 5e-7;

inline double clamp_log2(double v) {
  return std::abs(v) <= kZeroClamp ? 0.0 : v;
}

// Visits the d^2 Hermitian basis elements of a d x d space. The callback
// receives the basis matrix H (sparse: at most two nonzero entries).
template <typename F>
void for_each_hermitian_basis(Index d, F&& f) {
  CMat h = CMat::Zero(d, d);
  for (Index i = 0; i < d; ++i) {
    h(i, i) = 1.0;
    f(h);
    h(i, i) = 0.0;
  }
  for (Index i = 0; i < d; ++i) {
    for (Index j = i + 1; j < d; ++j) {
      h(i, j) = 1.0;
      h(j, i) = 1.0;
      f(h);
      h(i, j) = Complex(0.0, 1.0);
      h(j, i) = Complex(0.0, -1.0);
      f(h);
      h(i, j) = 0.0;
      h(j, i) = 0.0;
    }
  }
}

// Appends the nonzero upper-triangle entries of scale*embed(h) to a
// constraint, addressed at the given block.
inline void append_embedded_terms(const SdpProblem& p, SdpConstraint& c, int block,
                                  const CMat& h, double scale) {
  const Index d = h.rows();
  for (Index r = 0; r < d; ++r) {
    for (Index cc = 0; cc < d; ++cc) {
      const Complex v = h(r, cc);
      if (v == Complex(0.0, 0.0)) continue;
      // embed(h) = [[Re, -Im], [Im, Re]]; keep the upper-triangle representative
      if (v.real() != 0.0 && r <= cc) {
        p.add_term(c, block, static_cast<int>(r), static_cast<int>(cc), scale * v.real());
        p.add_term(c, block, static_cast<int>(d + r), static_cast<int>(d + cc),
                   scale * v.real());
      }
      if (v.imag() != 0.0) {
        // entry (d + r, cc) of the embedding carries Im h_{r,cc}
        const Index rr = d + r;
        if (cc <= rr) p.add_term(c, block, static_cast<int>(cc), static_cast<int>(rr),
                                 scale * v.imag());
      }
    }
  }
}

// <H, M> = Re Tr[H M] for Hermitian H (sparse basis element) and Hermitian M.
inline double herm_inner(const CMat& h, const CMat& m) {
  Complex s = 0.0;
  const Index d = h.rows();
  for (Index r = 0; r < d; ++r) {
    for (Index c = 0; c < d; ++c) {
      if (h(r, c) != Complex(0.0, 0.0)) s += h(r, c) * m(c, r);
    }
  }
  return s.real();
}

inline SdpSolution solve_or_throw(const SdpProblem& p, const SdpOptions& opts,
                                  const char* who) {
  SdpSolution sol = solve(p, opts);
  if (sol.status != SdpStatus::Optimal) {
    std::ostringstream os;
    os << who << ": solver returned " << to_string(sol.status) << " (" << sol.message
       << "), residuals primal " << sol.primal_residual << " dual " << sol.dual_residual;
    throw SolverFailure(os.str(), sol);
  }
  return sol;
}

}  // namespace detail

struct PrimalKappaResult {
  double value_bits = 0.0;           // E_kappa
  double objective_trace = 0.0;      // Tr S at the optimum
  BipartiteOperator optimizer_s;
  SolveDiagnostics diagnostics;
};

/// Standard-form assembly of the primal kappa program: three embedded PSD
/// blocks X1 = S, X2 = S^TB - rho^TB, X3 = S^TB + rho^TB tied by
/// Hermitian-basis equality constraints; objective Tr X1 = 2 Tr S.
inline SdpProblem assemble_kappa_primal(const BipartiteOperator& rho) {
  const Index d = rho.dim();
  const CMat rho_tb = partial_transpose(rho).mat;

  SdpProblem p;
  const int side = static_cast<int>(2 * d);
  p.block_sizes = {side, side, side};
  p.objective = {RMat::Identity(side, side), RMat::Zero(side, side), RMat::Zero(side, side)};

  detail::for_each_hermitian_basis(d, [&](const CMat& h) {
    const BipartiteOperator hb{h, rho.dim_a, rho.dim_b};
    const CMat h_tb = partial_transpose(hb).mat;
    const double t = detail::herm_inner(h, rho_tb);
    SdpConstraint c2;  // <H, X2> - <H^TB, S> = -<H, rho^TB>
    detail::append_embedded_terms(p, c2, 1, h, 1.0);
    detail::append_embedded_terms(p, c2, 0, h_tb, -1.0);
    c2.rhs = -2.0 * t;
    p.constraints.push_back(std::move(c2));
    SdpConstraint c3;  // <H, X3> - <H^TB, S> = +<H, rho^TB>
    detail::append_embedded_terms(p, c3, 2, h, 1.0);
    detail::append_embedded_terms(p, c3, 0, h_tb, -1.0);
    c3.rhs = 2.0 * t;
    p.constraints.push_back(std::move(c3));
  });
  return p;
}

/// Primal kappa measure: log2 inf { Tr S : -S^TB <= rho^TB <= S^TB, S >= 0 }.
inline PrimalKappaResult e_kappa_primal(const BipartiteOperator& rho,
                                        const SdpOptions& opts = SdpOptions{}) {
  require_density_matrix(rho, 1e-10, 1e-8, 1e-8);
  const CMat rho_tb = partial_transpose(rho).mat;
  const SdpProblem p = assemble_kappa_primal(rho);
  const SdpSolution sol = detail::solve_or_throw(p, opts, "e_kappa_primal");
  PrimalKappaResult out;
  out.optimizer_s = make_bipartite(decode_embedded(sol.x[0]), rho.dim_a, rho.dim_b);
  out.objective_trace = 0.5 * sol.x[0].trace();
  out.value_bits = detail::clamp_log2(std::log2(out.objective_trace));
  out.diagnostics = diagnostics_of(sol);

  const CMat s_tb = partial_transpose(out.optimizer_s).mat;
  const double viol = std::min(lambda_min(s_tb - rho_tb), lambda_min(s_tb + rho_tb));
  if (viol < -1e-7) {
    throw SolverFailure("e_kappa_primal: optimizer violates the operator inequalities", sol);
  }
  return out;
}

struct DualKappaResult {
  double value_bits = 0.0;
  BipartiteOperator optimizer_v;
  BipartiteOperator optimizer_w;
  SolveDiagnostics diagnostics;
};

/// Standard-form assembly of the dual kappa program over the PSD variables
/// P = V^TB, Q = W^TB and the slack R = 1 - V - W, coupled by
/// P^TB + Q^TB + R = 1; objective -2 Tr[rho^TB (P - Q)] (minimized).
inline SdpProblem assemble_kappa_dual(const BipartiteOperator& rho) {
  const Index d = rho.dim();
  const CMat rho_tb = partial_transpose(rho).mat;

  SdpProblem p;
  const int side = static_cast<int>(2 * d);
  p.block_sizes = {side, side, side};
  p.objective = {-embed_hermitian(rho_tb), embed_hermitian(rho_tb), RMat::Zero(side, side)};

  detail::for_each_hermitian_basis(d, [&](const CMat& h) {
    const BipartiteOperator hb{h, rho.dim_a, rho.dim_b};
    const CMat h_tb = partial_transpose(hb).mat;
    SdpConstraint c;  // <H^TB, P> + <H^TB, Q> + <H, R> = <H, 1>
    detail::append_embedded_terms(p, c, 0, h_tb, 1.0);
    detail::append_embedded_terms(p, c, 1, h_tb, 1.0);
    detail::append_embedded_terms(p, c, 2, h, 1.0);
    c.rhs = 2.0 * h.trace().real();
    p.constraints.push_back(std::move(c));
  });
  return p;
}

/// Dual kappa measure: log2 sup { Tr rho(V - W) : V + W <= 1, V^TB, W^TB >= 0 }.
inline DualKappaResult e_kappa_dual(const BipartiteOperator& rho,
                                    const SdpOptions& opts = SdpOptions{}) {
  require_density_matrix(rho, 1e-10, 1e-8, 1e-8);
  const SdpProblem p = assemble_kappa_dual(rho);
  const SdpSolution sol = detail::solve_or_throw(p, opts, "e_kappa_dual");
  const CMat p_opt = decode_embedded(sol.x[0]);
  const CMat q_opt = decode_embedded(sol.x[1]);
  DualKappaResult out;
  out.optimizer_v =
      partial_transpose(make_bipartite(p_opt, rho.dim_a, rho.dim_b));
  out.optimizer_w =
      partial_transpose(make_bipartite(q_opt, rho.dim_a, rho.dim_b));
  const double attained = -0.5 * sol.primal_objective;  // Tr rho (V - W)
  out.value_bits = detail::clamp_log2(std::log2(attained));
  out.diagnostics = diagnostics_of(sol);

  if (lambda_min(p_opt) < -1e-7 || lambda_min(q_opt) < -1e-7) {
    throw SolverFailure("e_kappa_dual: optimizer leaves the PPT cone", sol);
  }
  const CMat vw = out.optimizer_v.mat + out.optimizer_w.mat;
  if (herm_eig(vw).eigenvalues.maxCoeff() > 1.0 + 1e-7) {
    throw SolverFailure("e_kappa_dual: optimizer violates V + W <= 1", sol);
  }
  return out;
}

/// Logarithmic negativity log2 ||rho^TB||_1.
inline double log_negativity(const BipartiteOperator& rho) {
  require_density_matrix(rho, 1e-10, 1e-8, 1e-8);
  return std::max(0.0, std::log2(trace_norm(partial_transpose(rho).mat)));
}

/// log2 of Z(rho) = ||rho^TB||_1 + dim(rho) * max{0, -lambda_min(|rho^TB|^TB)},
/// the dimension-weighted upper bound on the exact preparation cost. Only
/// meaningful for finite-dimensional states, which is all this kernel handles.
inline double z_bound(const BipartiteOperator& rho) {
  require_density_matrix(rho, 1e-10, 1e-8, 1e-8);
  const BipartiteOperator rho_tb = partial_transpose(rho);
  const CMat abs_tb = abs_herm(rho_tb.mat);
  const double lmin =
      lambda_min(partial_transpose(make_bipartite(abs_tb, rho.dim_a, rho.dim_b)).mat);
  const double z = trace_norm(rho_tb.mat) +
                   static_cast<double>(rho.dim()) * std::max(0.0, -lmin);
  return std::log2(z);
}

/// Binegativity condition |rho^TB|^TB >= 0. When it holds the kappa measure
/// collapses onto the logarithmic negativity.
inline bool binegativity_holds(const BipartiteOperator& rho) {
  require_density_matrix(rho, 1e-10, 1e-8, 1e-8);
  const BipartiteOperator rho_tb = partial_transpose(rho);
  const CMat abs_tb = abs_herm(rho_tb.mat);
  return is_psd(partial_transpose(make_bipartite(abs_tb, rho.dim_a, rho.dim_b)).mat, 1e-9);
}

struct OneShotBounds {
  std::optional<double> lower;  // empty encodes -infinity
  double upper = 0.0;
};

/// Sandwich bounds log2(2^e - 1) <= one-shot cost <= log2(2^e + 2).
/// The lower bound degenerates to -infinity at e = 0.
inline OneShotBounds one_shot_bounds(double e_kappa) {
  if (e_kappa < 0.0) {
    throw std::invalid_argument("one_shot_bounds: e_kappa must be nonnegative");
  }
  OneShotBounds b;
  b.upper = std::log2(std::exp2(e_kappa) + 2.0);
  if (e_kappa > 0.0) b.lower = std::log2(std::exp2(e_kappa) - 1.0);
  return b;
}

struct WitnessResult {
  BipartiteOperator z;      // member of the witness cone; Z + 1 is the witness
  double violation = 0.0;   // Tr[(Z + 1) rho], negative iff rho is NPT
  double e_kappa_dual = 0.0;
};

/// Builds the operator Z = W - V from the dual optimizers, so that
/// Tr[(Z + 1) rho] = 1 - 2^{E_kappa_dual(rho)} and Tr[(Z + 1) sigma] >= 0
/// for every PPT sigma.
inline WitnessResult extract_witness(const BipartiteOperator& rho,
                                     const SdpOptions& opts = SdpOptions{}) {
  const DualKappaResult dual = e_kappa_dual(rho, opts);
  WitnessResult out;
  out.z = make_bipartite(dual.optimizer_w.mat - dual.optimizer_v.mat, rho.dim_a, rho.dim_b);
  const CMat witness = out.z.mat + CMat::Identity(rho.dim(), rho.dim());
  out.violation = (witness * rho.mat).trace().real();
  out.e_kappa_dual = dual.value_bits;
  const double predicted = 1.0 - std::exp2(dual.value_bits);
  if (std::abs(out.violation - predicted) > 1e-6) {
    throw std::runtime_error("extract_witness: violation disagrees with the dual value");
  }
  return out;
}

struct AdditivityReport {
  double lhs = 0.0;  // E_kappa of the reindexed tensor product
  double rhs = 0.0;  // sum of the factors' E_kappa
  double gap = 0.0;
};

/// Direct additivity check: solves the kappa program on rho (x) omega under
/// the merged AA'|BB' bipartition and compares with the sum of the parts.
inline AdditivityReport additivity_check(const BipartiteOperator& rho,
                                         const BipartiteOperator& omega,
                                         const SdpOptions& opts = SdpOptions{}) {
  if (rho.dim() * omega.dim() > 100) {
    throw std::invalid_argument("additivity_check: product dimension exceeds the solver budget");
  }
  const BipartiteOperator merged = tensor_bipartite(rho, omega);
  AdditivityReport r;
  r.lhs = e_kappa_primal(merged, opts).value_bits;
  r.rhs = e_kappa_primal(rho, opts).value_bits + e_kappa_primal(omega, opts).value_bits;
  r.gap = std::abs(r.lhs - r.rhs);
  return r;
}

/// Everything the toolkit computes for a single state.
struct MeasureReport {
  double e_kappa_primal = 0.0;
  double e_kappa_dual = 0.0;
  double e_n = 0.0;
  double log2_z = 0.0;
  std::optional<double> one_shot_lower;
  double one_shot_upper = 0.0;
  bool binegativity = false;
  SolveDiagnostics primal_diagnostics;
  SolveDiagnostics dual_diagnostics;
};

inline MeasureReport measure_report(const BipartiteOperator& rho,
                                    const SdpOptions& opts = SdpOptions{}) {
  MeasureReport r;
  const PrimalKappaResult primal = e_kappa_primal(rho, opts);
  const DualKappaResult dual = e_kappa_dual(rho, opts);
  r.e_kappa_primal = primal.value_bits;
  r.e_kappa_dual = dual.value_bits;
  r.e_n = log_negativity(rho);
  r.log2_z = z_bound(rho);
  const OneShotBounds b = one_shot_bounds(primal.value_bits);
  r.one_shot_lower = b.lower;
  r.one_shot_upper = b.upper;
  r.binegativity = binegativity_holds(rho);
  r.primal_diagnostics = primal.diagnostics;
  r.dual_diagnostics = dual.diagnostics;
  return r;
}

}  // namespace kappaent
