#pragma once

// Operational side of the toolkit: minimal-m feasibility search for the exact
// one-shot preparation cost, the measure-prepare channel that attains it, the
// isotropic twirl, and Choi-matrix verification that the preparation both is
// completely positive and completely preserves positivity of the partial
// transpose.

#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "kappaent/linalg.hpp"
#include "kappaent/measures.hpp"
#include "kappaent/sdp.hpp"
#include "kappaent/states.hpp"

namespace kappaent {

/// Raised when the integer scan over the sandwich window finds no feasible m,
/// which the theory excludes; carries the per-m feasibility residuals.
class IntegrityFailure : public std::runtime_error {
 public:
  IntegrityFailure(std::string what, std::vector<std::pair<int, double>> residuals)
      : std::runtime_error(std::move(what)), feasibility_residuals(std::move(residuals)) {}

  std::vector<std::pair<int, double>> feasibility_residuals;  // (m, optimal t)
};

struct FeasibilityProbe {
  double t_opt = 0.0;  // optimal perturbation; <= 1e-8 means feasible
  std::optional<BipartiteOperator> g;
  SolveDiagnostics diagnostics;
};

namespace detail {

// min t  s.t.  G >= 0, Tr G = 1,
//              (m+1) G^TB - rho^TB + t I >= 0,
//              rho^TB + (m-1) G^TB + t I >= 0,  t >= 0.
// Feasibility of the preparation condition is equivalent to optimal t = 0;
// an interior-point method needs the objective, and the 1e-8 threshold
// separates cleanly at this scale.
inline FeasibilityProbe feasibility_probe(const BipartiteOperator& rho, int m,
                                          const SdpOptions& opts) {
  if (m < 1) throw std::invalid_argument("feasibility_probe: m must be >= 1");
  const Index d = rho.dim();
  const CMat rho_tb = partial_transpose(rho).mat;
  const int side = static_cast<int>(2 * d);

  SdpProblem p;
  p.block_sizes = {side, side, side, 1};
  p.objective = {RMat::Zero(side, side), RMat::Zero(side, side), RMat::Zero(side, side),
                 RMat::Identity(1, 1)};

  for_each_hermitian_basis(d, [&](const CMat& h) {
    const BipartiteOperator hb{h, rho.dim_a, rho.dim_b};
    const CMat h_tb = partial_transpose(hb).mat;
    const double t_rho = herm_inner(h, rho_tb);
    const double tr_h = h.trace().real();
    SdpConstraint c1;  // <H, X1> - (m+1) <H^TB, G> - t <H, 1> = -<H, rho^TB>
    append_embedded_terms(p, c1, 1, h, 1.0);
    append_embedded_terms(p, c1, 0, h_tb, -(static_cast<double>(m) + 1.0));
    if (tr_h != 0.0) p.add_term(c1, 3, 0, 0, -2.0 * tr_h);
    c1.rhs = -2.0 * t_rho;
    p.constraints.push_back(std::move(c1));
    SdpConstraint c2;  // <H, X2> - (m-1) <H^TB, G> - t <H, 1> = +<H, rho^TB>
    append_embedded_terms(p, c2, 2, h, 1.0);
    if (m != 1) append_embedded_terms(p, c2, 0, h_tb, -(static_cast<double>(m) - 1.0));
    if (tr_h != 0.0) p.add_term(c2, 3, 0, 0, -2.0 * tr_h);
    c2.rhs = 2.0 * t_rho;
    p.constraints.push_back(std::move(c2));
  });
  SdpConstraint trace_one;
  for (Index i = 0; i < 2 * d; ++i) p.add_term(trace_one, 0, static_cast<int>(i),
                                               static_cast<int>(i), 1.0);
  trace_one.rhs = 2.0;
  p.constraints.push_back(std::move(trace_one));

  const SdpSolution sol = solve_or_throw(p, opts, "feasibility_probe");
  FeasibilityProbe out;
  out.t_opt = sol.x[3](0, 0);
  out.diagnostics = diagnostics_of(sol);
  if (out.t_opt <= 1e-8) {
    CMat g = decode_embedded(sol.x[0]);
    g /= g.trace().real();
    out.g = make_bipartite(std::move(g), rho.dim_a, rho.dim_b);
  }
  return out;
}

}  // namespace detail

/// Searches for a density operator G with
/// -(m-1) G^TB <= rho^TB <= (m+1) G^TB. Empty result means the condition is
/// certifiably infeasible for this m (optimal perturbation bounded away from
/// zero); solver breakdowns surface as SolverFailure instead.
inline std::optional<BipartiteOperator> feasibility_G(const BipartiteOperator& rho, int m,
                                                      const SdpOptions& opts = SdpOptions{}) {
  return detail::feasibility_probe(rho, m, opts).g;
}

/// Measure-prepare channel Lambda(X) = rho Tr[Phi^m X] + G Tr[(1 - Phi^m) X]
/// applied to an m (x) m input operator.
inline BipartiteOperator measure_prepare_apply(const BipartiteOperator& rho,
                                               const BipartiteOperator& g, int m,
                                               const BipartiteOperator& input) {
  if (input.dim_a != m || input.dim_b != m) {
    throw std::invalid_argument("measure_prepare_apply: input must be an m (x) m operator");
  }
  if (g.dim_a != rho.dim_a || g.dim_b != rho.dim_b) {
    throw std::invalid_argument("measure_prepare_apply: G and rho dimensions differ");
  }
  const CMat phi = max_entangled(m).mat;
  const Complex p_phi = (phi * input.mat).trace();
  const Complex p_rest = input.mat.trace() - p_phi;
  return make_bipartite(p_phi * rho.mat + p_rest * g.mat, rho.dim_a, rho.dim_b);
}

/// Choi matrix J = sum_ij |i><j| (x) Lambda(|i><j|) of the measure-prepare
/// channel, with the m^2-dimensional input factor first.
inline BipartiteOperator choi_matrix(const BipartiteOperator& rho,
                                     const BipartiteOperator& g, int m) {
  if (g.dim_a != rho.dim_a || g.dim_b != rho.dim_b) {
    throw std::invalid_argument("choi_matrix: G and rho dimensions differ");
  }
  const Index din = static_cast<Index>(m) * m;
  const Index dout = rho.dim();
  const CMat phi = max_entangled(m).mat;
  CMat j = CMat::Zero(din * dout, din * dout);
  for (Index i = 0; i < din; ++i) {
    for (Index k = 0; k < din; ++k) {
      // Tr[Phi |i><k|] = Phi(k, i)
      const Complex w_phi = phi(k, i);
      const Complex w_rest = (i == k ? Complex(1.0, 0.0) : Complex(0.0, 0.0)) - w_phi;
      j.block(i * dout, k * dout, dout, dout) = w_phi * rho.mat + w_rest * g.mat;
    }
  }
  return BipartiteOperator{std::move(j), din, dout};
}

/// Partial transpose of a Choi matrix over the pair (input B-half, output B),
/// i.e. the Choi matrix of T_B o Lambda o T_Bhat. PSD iff the channel
/// completely preserves positivity of the partial transpose.
inline CMat choi_ppt_transform(const BipartiteOperator& choi, int m, Index dim_a,
                               Index dim_b) {
  const std::vector<Index> dims = {static_cast<Index>(m), static_cast<Index>(m), dim_a, dim_b};
  const std::vector<bool> mask = {false, true, false, true};
  return partial_transpose_multi(choi.mat, dims, mask);
}

/// Isotropic twirl on d (x) d:
/// T(X) = Phi^d Tr[Phi^d X] + (1 - Phi^d)/(d^2 - 1) Tr[(1 - Phi^d) X].
inline BipartiteOperator isotropic_twirl(const BipartiteOperator& x) {
  if (x.dim_a != x.dim_b) {
    throw std::invalid_argument("isotropic_twirl: operator must live on d (x) d");
  }
  const Index d = x.dim_a;
  if (d < 2) throw std::invalid_argument("isotropic_twirl: d must be >= 2");
  const CMat phi = max_entangled(d).mat;
  const CMat rest = CMat::Identity(d * d, d * d) - phi;
  const Complex p_phi = (phi * x.mat).trace();
  const Complex p_rest = x.mat.trace() - p_phi;
  CMat out = p_phi * phi + (p_rest / static_cast<double>(d * d - 1)) * rest;
  return make_bipartite(std::move(out), d, d);
}

/// Verified artifacts of a one-shot exact preparation: the minimal Schmidt
/// rank m, the auxiliary state G, the channel's Choi matrix and all residuals.
struct PreparationCertificate {
  int m = 0;
  BipartiteOperator g;
  BipartiteOperator choi;
  double prep_residual = 0.0;       // trace distance of Lambda(Phi^m) from rho
  double cp_lambda_min = 0.0;       // lambda_min of the Choi matrix
  double pptp_lambda_min = 0.0;     // lambda_min of its (Bhat, B) transpose
  double g_trace_error = 0.0;
  double g_lambda_min = 0.0;
  double g_ppt_lambda_min = 0.0;
  double cond_upper_lambda_min = 0.0;  // lambda_min((m+1) G^TB - rho^TB)
  double cond_lower_lambda_min = 0.0;  // lambda_min(rho^TB + (m-1) G^TB)
  double e_kappa = 0.0;
  std::optional<double> sandwich_lower;
  double sandwich_upper = 0.0;

  bool valid() const {
    return g_lambda_min >= -1e-8 && std::abs(g_trace_error) <= 1e-8 &&
           g_ppt_lambda_min >= -1e-8 && cond_upper_lambda_min >= -1e-7 &&
           cond_lower_lambda_min >= -1e-7 && cp_lambda_min >= -1e-7 &&
           pptp_lambda_min >= -1e-7 && prep_residual <= 1e-7;
  }
};

/// Fills every residual of a certificate from scratch for given (rho, G, m).
inline void verify_certificate(const BipartiteOperator& rho, PreparationCertificate& cert) {
  const CMat rho_tb = partial_transpose(rho).mat;
  const CMat g_tb = partial_transpose(cert.g).mat;
  const double md = static_cast<double>(cert.m);
  cert.g_trace_error = cert.g.mat.trace().real() - 1.0;
  cert.g_lambda_min = lambda_min(cert.g.mat);
  cert.g_ppt_lambda_min = lambda_min(g_tb);
  cert.cond_upper_lambda_min = lambda_min((md + 1.0) * g_tb - rho_tb);
  cert.cond_lower_lambda_min = lambda_min(rho_tb + (md - 1.0) * g_tb);
  const BipartiteOperator prepared =
      measure_prepare_apply(rho, cert.g, cert.m, max_entangled(cert.m));
  cert.prep_residual = trace_distance(prepared.mat, rho.mat);
  cert.choi = choi_matrix(rho, cert.g, cert.m);
  cert.cp_lambda_min = lambda_min(cert.choi.mat);
  cert.pptp_lambda_min =
      lambda_min(choi_ppt_transform(cert.choi, cert.m, rho.dim_a, rho.dim_b));
}

/// Exact one-shot preparation cost: computes the kappa measure, scans the
/// integer window it pins down in ascending order, and returns the verified
/// certificate of the smallest feasible Schmidt rank.
inline PreparationCertificate one_shot_exact_cost(const BipartiteOperator& rho,
                                                  const SdpOptions& opts = SdpOptions{}) {
  require_density_matrix(rho, 1e-10, 1e-8, 1e-8);
  const double e_kappa = e_kappa_primal(rho, opts).value_bits;
  const OneShotBounds bounds = one_shot_bounds(e_kappa);
  const int lo = std::max(1, static_cast<int>(std::ceil(std::exp2(e_kappa) - 1.0 - 1e-6)));
  const int hi = static_cast<int>(std::floor(std::exp2(e_kappa) + 2.0 + 1e-6));

  std::vector<std::pair<int, double>> residuals;
  for (int m = lo; m <= hi; ++m) {
    FeasibilityProbe probe = detail::feasibility_probe(rho, m, opts);
    residuals.emplace_back(m, probe.t_opt);
    if (!probe.g) continue;
    PreparationCertificate cert;
    cert.m = m;
    cert.g = *std::move(probe.g);
    cert.e_kappa = e_kappa;
    cert.sandwich_lower = bounds.lower;
    cert.sandwich_upper = bounds.upper;
    verify_certificate(rho, cert);
    return cert;
  }
  std::ostringstream os;
  os << "one_shot_exact_cost: no feasible m in [" << lo << ", " << hi
     << "] although the sandwich guarantees one; residuals:";
  for (const auto& [m, t] : residuals) os << " m=" << m << " t=" << t;
  throw IntegrityFailure(os.str(), std::move(residuals));
}

}  // namespace kappaent
