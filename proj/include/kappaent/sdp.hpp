#pragma once

// Small dense semidefinite programming in block-diagonal standard form,
//
//   minimize    <C, X>
//   subject to  <A_k, X> = b_k   (k = 1..m)
//               X >= 0           (X block-diagonal, one PSD block per cone)
//
// solved with an infeasible-start primal-dual path-following interior-point
// method using Nesterov-Todd scaling and a Mehrotra predictor-corrector.
// Complex Hermitian data enters through the real symmetric embedding
// embed(H) = [[Re H, -Im H], [Im H, Re H]].
//
// The solver is deterministic: fixed iteration order, no randomized pivoting,
// so identical inputs and options reproduce bit-identical results.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kappaent/linalg.hpp"

namespace kappaent {

/// Real symmetric embedding of a Hermitian matrix. PSD iff the input is PSD;
/// every eigenvalue appears twice and the trace doubles.
inline RMat embed_hermitian(const CMat& h) {
  if (!is_hermitian(h)) {
    std::ostringstream os;
    os << "embed_hermitian: input not Hermitian, defect = " << hermiticity_defect(h);
    throw std::invalid_argument(os.str());
  }
  const Index d = h.rows();
  RMat out(2 * d, 2 * d);
  const RMat re = h.real();
  const RMat im = h.imag();
  out.topLeftCorner(d, d) = re;
  out.topRightCorner(d, d) = -im;
  out.bottomLeftCorner(d, d) = im;
  out.bottomRightCorner(d, d) = re;
  // symmetrize away representation round-off
  out = 0.5 * (out + out.transpose()).eval();
  return out;
}

/// Inverse of embed_hermitian: recovers the Hermitian matrix represented by
/// (the complex-structure part of) a symmetric 2d x 2d matrix.
inline CMat decode_embedded(const RMat& x) {
  if (x.rows() != x.cols() || x.rows() % 2 != 0) {
    throw std::invalid_argument("decode_embedded: expected even-sided square matrix");
  }
  const Index d = x.rows() / 2;
  RMat re = 0.5 * (x.topLeftCorner(d, d) + x.bottomRightCorner(d, d));
  RMat im = 0.5 * (x.bottomLeftCorner(d, d) - x.topRightCorner(d, d));
  CMat h = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
  return hermitian_part(h);
}

/// One coefficient of a symmetric constraint matrix: value at (row, col) and
/// mirrored at (col, row) of the named block. Entries are normalized to
/// row <= col.
struct SdpTerm {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct SdpConstraint {
  std::vector<SdpTerm> terms;
  double rhs = 0.0;
};

/// Block-diagonal SDP in equality standard form (minimization).
struct SdpProblem {
  std::vector<int> block_sizes;
  std::vector<RMat> objective;  // one symmetric matrix per block
  std::vector<SdpConstraint> constraints;

  int total_dimension() const {
    int n = 0;
    for (int s : block_sizes) n += s;
    return n;
  }

  void add_term(SdpConstraint& c, int block, int row, int col, double value) const {
    if (row > col) std::swap(row, col);
    c.terms.push_back(SdpTerm{block, row, col, value});
  }

  /// Structural validation. Throws on malformed data; returns human-readable
  /// diagnostics for conditions that are suspicious but not fatal (e.g. more
  /// constraints than the total cone dimension would normally support).
  std::vector<std::string> validate() const {
    if (objective.size() != block_sizes.size()) {
      throw std::invalid_argument("SdpProblem: one objective matrix required per block");
    }
    for (size_t j = 0; j < block_sizes.size(); ++j) {
      if (block_sizes[j] < 1) throw std::invalid_argument("SdpProblem: block size must be >= 1");
      if (objective[j].rows() != block_sizes[j] || objective[j].cols() != block_sizes[j]) {
        throw std::invalid_argument("SdpProblem: objective block has wrong size");
      }
      if ((objective[j] - objective[j].transpose()).cwiseAbs().maxCoeff() >
          1e-12 * (1.0 + objective[j].cwiseAbs().maxCoeff())) {
        throw std::invalid_argument("SdpProblem: objective block not symmetric");
      }
    }
    for (const SdpConstraint& c : constraints) {
      for (const SdpTerm& t : c.terms) {
        if (t.block < 0 || t.block >= static_cast<int>(block_sizes.size())) {
          throw std::invalid_argument("SdpProblem: constraint refers to unknown block");
        }
        if (t.row < 0 || t.col < t.row || t.col >= block_sizes[t.block]) {
          throw std::invalid_argument("SdpProblem: constraint entry out of range");
        }
      }
    }
    std::vector<std::string> notes;
    const long cone_dim = [this] {
      long n = 0;
      for (int s : block_sizes) n += static_cast<long>(s) * (s + 1) / 2;
      return n;
    }();
    if (static_cast<long>(constraints.size()) > cone_dim) {
      std::ostringstream os;
      os << "constraint count " << constraints.size()
         << " exceeds total cone dimension " << cone_dim;
      notes.push_back(os.str());
    }
    return notes;
  }
};

enum class SdpStatus { Optimal, Infeasible, MaxIterations, NumericalFailure };

inline const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::MaxIterations: return "MaxIterations";
    case SdpStatus::NumericalFailure: return "NumericalFailure";
  }
  return "?";
}

struct SdpOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  double step_fraction = 0.98;   // fraction-to-boundary
  std::ostream* trace = nullptr; // per-iteration log, if set
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalFailure;
  std::vector<RMat> x;  // primal blocks
  RVec y;               // dual multipliers
  std::vector<RMat> z;  // dual slack blocks
  double primal_objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double primal_residual = std::numeric_limits<double>::quiet_NaN();
  double dual_residual = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
  std::string message;
};

namespace detail {

inline double constraint_dot(const SdpConstraint& c, const std::vector<RMat>& x) {
  double s = 0.0;
  for (const SdpTerm& t : c.terms) {
    s += (t.row == t.col) ? t.value * x[t.block](t.row, t.row)
                          : 2.0 * t.value * x[t.block](t.row, t.col);
  }
  return s;
}

inline void add_scaled_constraint(std::vector<RMat>& acc, const SdpConstraint& c,
                                  double w) {
  for (const SdpTerm& t : c.terms) {
    acc[t.block](t.row, t.col) += w * t.value;
    if (t.row != t.col) acc[t.block](t.col, t.row) += w * t.value;
  }
}

// W A W for a sparse symmetric A: sum of scaled outer products of W columns.
inline void accumulate_waw(RMat& out, const RMat& w, const SdpConstraint& c, int block) {
  for (const SdpTerm& t : c.terms) {
    if (t.block != block) continue;
    if (t.row == t.col) {
      out.noalias() += t.value * w.col(t.row) * w.col(t.row).transpose();
    } else {
      out.noalias() += t.value * w.col(t.row) * w.col(t.col).transpose();
      out.noalias() += t.value * w.col(t.col) * w.col(t.row).transpose();
    }
  }
}

}  // namespace detail

/// Independent re-check of a solver result: recomputes equality residuals,
/// block eigenvalue floors and the duality gap from scratch.
struct CertificateReport {
  double max_equality_violation = 0.0;
  double min_primal_eigenvalue = 0.0;
  double min_dual_eigenvalue = 0.0;
  double recomputed_gap = 0.0;
  double max_dual_residual = 0.0;
};

inline CertificateReport check_certificate(const SdpProblem& p, const SdpSolution& s) {
  CertificateReport r;
  if (s.x.empty()) return r;
  for (size_t k = 0; k < p.constraints.size(); ++k) {
    const double v = detail::constraint_dot(p.constraints[k], s.x) - p.constraints[k].rhs;
    r.max_equality_violation = std::max(r.max_equality_violation, std::abs(v));
  }
  double primal = 0.0;
  r.min_primal_eigenvalue = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < p.block_sizes.size(); ++j) {
    primal += (p.objective[j].array() * s.x[j].array()).sum();
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (s.x[j] + s.x[j].transpose()));
    r.min_primal_eigenvalue = std::min(r.min_primal_eigenvalue, es.eigenvalues().minCoeff());
  }
  double dual = 0.0;
  if (s.y.size() == static_cast<Index>(p.constraints.size()) && !s.z.empty()) {
    std::vector<RMat> zc;  // C - A^T y, ignoring the stored Z
    for (int sz : p.block_sizes) zc.push_back(RMat::Zero(sz, sz));
    for (size_t j = 0; j < p.block_sizes.size(); ++j) zc[j] = p.objective[j];
    for (size_t k = 0; k < p.constraints.size(); ++k) {
      detail::add_scaled_constraint(zc, p.constraints[k], -s.y(static_cast<Index>(k)));
      dual += s.y(static_cast<Index>(k)) * p.constraints[k].rhs;
    }
    r.min_dual_eigenvalue = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < p.block_sizes.size(); ++j) {
      Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (zc[j] + zc[j].transpose()));
      r.min_dual_eigenvalue = std::min(r.min_dual_eigenvalue, es.eigenvalues().minCoeff());
      r.max_dual_residual = std::max(
          r.max_dual_residual, (zc[j] - s.z[j]).cwiseAbs().maxCoeff());
    }
  }
  r.recomputed_gap = primal - dual;
  return r;
}

/// Plain-text dump of a problem for cross-checking against external solvers.
/// Format: a "blocks" line with the block sides, then per block the dense
/// objective matrix (row per line), then one "constraint" line per equality
/// giving the rhs followed by "term <block> <row> <col> <value>" lines.
inline void dump_problem(const SdpProblem& p, std::ostream& os) {
  os << "blocks";
  for (int s : p.block_sizes) os << ' ' << s;
  os << '\n';
  os.precision(17);
  for (size_t j = 0; j < p.block_sizes.size(); ++j) {
    os << "objective " << j << '\n';
    for (int r = 0; r < p.block_sizes[j]; ++r) {
      for (int c = 0; c < p.block_sizes[j]; ++c) {
        os << p.objective[j](r, c) << (c + 1 == p.block_sizes[j] ? '\n' : ' ');
      }
    }
  }
  for (size_t k = 0; k < p.constraints.size(); ++k) {
    os << "constraint " << k << " rhs " << p.constraints[k].rhs << '\n';
    for (const SdpTerm& t : p.constraints[k].terms) {
      os << "  term " << t.block << ' ' << t.row << ' ' << t.col << ' ' << t.value << '\n';
    }
  }
}

namespace detail {

class InteriorPointSolver {
 public:
  InteriorPointSolver(const SdpProblem& p, const SdpOptions& opts)
      : p_(p), opts_(opts), nblocks_(p.block_sizes.size()),
        m_(static_cast<Index>(p.constraints.size())) {
    p_.validate();
    n_total_ = 0;
    for (int s : p_.block_sizes) n_total_ += s;
    b_.resize(m_);
    for (Index k = 0; k < m_; ++k) b_(k) = p_.constraints[static_cast<size_t>(k)].rhs;
    b_norm_ = b_.norm();
    c_norm_ = 0.0;
    for (const RMat& c : p_.objective) c_norm_ += c.squaredNorm();
    c_norm_ = std::sqrt(c_norm_);
    // constraints touching each block, for Schur assembly
    block_constraints_.resize(nblocks_);
    for (Index k = 0; k < m_; ++k) {
      std::vector<bool> seen(nblocks_, false);
      for (const SdpTerm& t : p_.constraints[static_cast<size_t>(k)].terms) {
        if (!seen[static_cast<size_t>(t.block)]) {
          seen[static_cast<size_t>(t.block)] = true;
          block_constraints_[static_cast<size_t>(t.block)].push_back(k);
        }
      }
    }
  }

  SdpSolution run() {
    SdpSolution sol;
    if (m_ == 0) {
      // no constraints: X = 0 is optimal for C >= 0; not needed by this
      // artifact, reject rather than guess
      sol.status = SdpStatus::NumericalFailure;
      sol.message = "problem has no equality constraints";
      return sol;
    }
    initialize();
    for (iter_ = 0; iter_ <= opts_.max_iter; ++iter_) {
      compute_residuals();
      if (opts_.trace) print_trace();
      if (converged()) {
        sol = pack(SdpStatus::Optimal, "converged");
        return sol;
      }
      if (diverged(sol)) return sol;
      if (iter_ == opts_.max_iter) break;
      if (!step(sol)) return sol;
      // conic weak duality on the new iterate: <X,Z> >= 0 must hold exactly
      // because both factors stay inside the cone
      if (inner_all(x_, z_) < 0) {
        sol = pack(SdpStatus::NumericalFailure, "weak duality violated: <X,Z> < 0");
        return sol;
      }
    }
    sol = pack(SdpStatus::MaxIterations, "iteration limit reached");
    return sol;
  }

 private:
  void initialize() {
    const double alpha = 1.0 + b_norm_;
    const double beta = 1.0 + c_norm_;
    x_.clear();
    z_.clear();
    for (int s : p_.block_sizes) {
      x_.push_back(alpha * RMat::Identity(s, s));
      z_.push_back(beta * RMat::Identity(s, s));
    }
    y_ = RVec::Zero(m_);
  }

  void compute_residuals() {
    rp_ = b_;
    for (Index k = 0; k < m_; ++k) {
      rp_(k) -= constraint_dot(p_.constraints[static_cast<size_t>(k)], x_);
    }
    rd_.assign(nblocks_, RMat());
    for (size_t j = 0; j < nblocks_; ++j) rd_[j] = p_.objective[j] - z_[j];
    for (Index k = 0; k < m_; ++k) {
      add_scaled_constraint(rd_, p_.constraints[static_cast<size_t>(k)], -y_(k));
    }
    primal_obj_ = 0.0;
    for (size_t j = 0; j < nblocks_; ++j) {
      primal_obj_ += (p_.objective[j].array() * x_[j].array()).sum();
    }
    dual_obj_ = b_.dot(y_);
    mu_ = inner_all(x_, z_) / static_cast<double>(n_total_);
    rp_norm_ = rp_.norm() / (1.0 + b_norm_);
    rd_norm_ = 0.0;
    for (const RMat& r : rd_) rd_norm_ += r.squaredNorm();
    rd_norm_ = std::sqrt(rd_norm_) / (1.0 + c_norm_);
  }

  bool converged() const {
    const double gap = std::abs(primal_obj_ - dual_obj_);
    return gap <= opts_.gap_tol * (1.0 + std::abs(primal_obj_)) &&
           rp_norm_ <= opts_.feas_tol && rd_norm_ <= opts_.feas_tol;
  }

  bool diverged(SdpSolution& sol) {
    // divergence test: an unbounded dual sequence that cannot restore primal
    // feasibility certifies primal infeasibility (and symmetrically)
    const double big = 1e8 * (1.0 + b_norm_ + c_norm_);
    if (dual_obj_ > big && rp_norm_ > opts_.feas_tol) {
      sol = pack(SdpStatus::Infeasible, "dual objective diverged, primal equalities unsatisfiable");
      return true;
    }
    if (primal_obj_ < -big && rd_norm_ > opts_.feas_tol) {
      sol = pack(SdpStatus::Infeasible, "primal objective diverged, dual constraints unsatisfiable");
      return true;
    }
    double xn = 0.0;
    for (const RMat& xb : x_) xn = std::max(xn, xb.cwiseAbs().maxCoeff());
    if (!(std::isfinite(mu_) && std::isfinite(primal_obj_) && std::isfinite(dual_obj_)) ||
        xn > 1e16) {
      sol = pack(SdpStatus::NumericalFailure, "iterates lost finiteness");
      return true;
    }
    return false;
  }

  // One predictor-corrector step. Returns false (with sol filled) on failure.
  bool step(SdpSolution& sol) {
    // Nesterov-Todd scaling per block: W = G G^T with
    // G^-1 X G^-T = G^T Z G = diag(lambda).
    std::vector<RMat> g(nblocks_), ginv(nblocks_), w(nblocks_);
    std::vector<RVec> lambda(nblocks_);
    for (size_t j = 0; j < nblocks_; ++j) {
      Eigen::LLT<RMat> lx(0.5 * (x_[j] + x_[j].transpose()));
      Eigen::LLT<RMat> lz(0.5 * (z_[j] + z_[j].transpose()));
      if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) {
        sol = pack(SdpStatus::NumericalFailure, "iterate left the cone (Cholesky failed)");
        return false;
      }
      const RMat lxm = lx.matrixL();
      const RMat lzm = lz.matrixL();
      Eigen::JacobiSVD<RMat> svd(lzm.transpose() * lxm,
                                 Eigen::ComputeThinU | Eigen::ComputeThinV);
      const RVec sv = svd.singularValues();
      if (sv.minCoeff() <= 0) {
        sol = pack(SdpStatus::NumericalFailure, "NT scaling broke down");
        return false;
      }
      const RVec si = sv.cwiseSqrt().cwiseInverse();
      g[j] = lxm * svd.matrixV() * si.asDiagonal();
      ginv[j] = si.asDiagonal() * svd.matrixU().transpose() * lzm.transpose();
      w[j] = g[j] * g[j].transpose();
      lambda[j] = sv;
    }

    // Schur complement M_kl = <A_k, W A_l W>
    RMat schur = RMat::Zero(m_, m_);
    for (size_t j = 0; j < nblocks_; ++j) {
      const auto& ks = block_constraints_[j];
      if (ks.empty()) continue;
      RMat u(p_.block_sizes[j], p_.block_sizes[j]);
      for (Index l : ks) {
        u.setZero();
        accumulate_waw(u, w[j], p_.constraints[static_cast<size_t>(l)], static_cast<int>(j));
        for (Index k : ks) {
          double s = 0.0;
          for (const SdpTerm& t : p_.constraints[static_cast<size_t>(k)].terms) {
            if (t.block != static_cast<int>(j)) continue;
            s += (t.row == t.col) ? t.value * u(t.row, t.row)
                                  : t.value * (u(t.row, t.col) + u(t.col, t.row));
          }
          schur(k, l) += s;
        }
      }
    }
    schur = 0.5 * (schur + schur.transpose()).eval();
    // the Schur complement turns singular as mu -> 0; graduated diagonal
    // regularization keeps the factorization alive without perturbing the
    // direction meaningfully
    Eigen::LLT<RMat> schur_llt(schur);
    if (schur_llt.info() != Eigen::Success) {
      const double scale = std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      for (double delta : {1e-14, 1e-12, 1e-10, 1e-8}) {
        schur_llt.compute(schur + delta * scale * RMat::Identity(m_, m_));
        if (schur_llt.info() == Eigen::Success) break;
      }
      if (schur_llt.info() != Eigen::Success) {
        sol = pack(SdpStatus::NumericalFailure, "Schur complement not positive definite");
        return false;
      }
    }

    // shared right-hand-side piece A(W Rd W)
    std::vector<RMat> wrdw(nblocks_);
    for (size_t j = 0; j < nblocks_; ++j) wrdw[j] = w[j] * rd_[j] * w[j];
    RVec a_wrdw(m_);
    for (Index k = 0; k < m_; ++k) {
      a_wrdw(k) = constraint_dot(p_.constraints[static_cast<size_t>(k)], wrdw);
    }

    // predictor (affine scaling): complementarity target 0, i.e. K = -X
    RVec rhs = b_ + a_wrdw;
    RVec dy_aff = schur_llt.solve(rhs);
    std::vector<RMat> dz_aff = apply_at_minus(rd_, dy_aff);
    std::vector<RMat> dx_aff(nblocks_);
    for (size_t j = 0; j < nblocks_; ++j) dx_aff[j] = -x_[j] - w[j] * dz_aff[j] * w[j];

    // scaled affine directions and boundary step lengths
    std::vector<RMat> dxs(nblocks_), dzs(nblocks_);
    double ap_aff = 1.0, ad_aff = 1.0;
    for (size_t j = 0; j < nblocks_; ++j) {
      dxs[j] = ginv[j] * dx_aff[j] * ginv[j].transpose();
      dzs[j] = g[j].transpose() * dz_aff[j] * g[j];
      ap_aff = std::min(ap_aff, boundary_step(lambda[j], dxs[j]));
      ad_aff = std::min(ad_aff, boundary_step(lambda[j], dzs[j]));
    }
    double mu_aff = 0.0;
    for (size_t j = 0; j < nblocks_; ++j) {
      mu_aff += ((x_[j] + ap_aff * dx_aff[j]).array() *
                 (z_[j] + ad_aff * dz_aff[j]).array()).sum();
    }
    mu_aff = std::max(0.0, mu_aff / static_cast<double>(n_total_));
    const double ratio = mu_ > 0 ? mu_aff / mu_ : 0.0;
    const double sigma = std::clamp(ratio * ratio * ratio, 0.0, 1.0);

    // corrector: target sigma*mu*I minus the Mehrotra second-order term
    std::vector<RMat> k_total(nblocks_);
    for (size_t j = 0; j < nblocks_; ++j) {
      const Index n = lambda[j].size();
      RMat rc = -0.5 * (dxs[j] * dzs[j] + dzs[j] * dxs[j]);
      rc.diagonal().array() += sigma * mu_;
      rc.diagonal().array() -= lambda[j].array().square();
      RMat d(n, n);  // inverse of the Jordan multiplication by diag(lambda)
      for (Index r = 0; r < n; ++r) {
        for (Index c = 0; c < n; ++c) d(r, c) = 2.0 * rc(r, c) / (lambda[j](r) + lambda[j](c));
      }
      k_total[j] = g[j] * d * g[j].transpose();
    }
    RVec a_k(m_);
    for (Index k = 0; k < m_; ++k) {
      a_k(k) = constraint_dot(p_.constraints[static_cast<size_t>(k)], k_total);
    }
    rhs = rp_ - a_k + a_wrdw;
    RVec dy = schur_llt.solve(rhs);
    std::vector<RMat> dz = apply_at_minus(rd_, dy);
    std::vector<RMat> dx(nblocks_);
    for (size_t j = 0; j < nblocks_; ++j) dx[j] = k_total[j] - w[j] * dz[j] * w[j];

    double ap = 1.0, ad = 1.0;
    for (size_t j = 0; j < nblocks_; ++j) {
      const RMat dxs2 = ginv[j] * dx[j] * ginv[j].transpose();
      const RMat dzs2 = g[j].transpose() * dz[j] * g[j];
      ap = std::min(ap, opts_.step_fraction * boundary_step(lambda[j], dxs2));
      ad = std::min(ad, opts_.step_fraction * boundary_step(lambda[j], dzs2));
    }
    ap = std::min(ap, 1.0);
    ad = std::min(ad, 1.0);
    if (ap < 1e-10 && ad < 1e-10) {
      sol = pack(SdpStatus::NumericalFailure, "step length collapsed");
      return false;
    }
    for (size_t j = 0; j < nblocks_; ++j) {
      x_[j] = 0.5 * ((x_[j] + ap * dx[j]) + (x_[j] + ap * dx[j]).transpose()).eval();
      z_[j] = 0.5 * ((z_[j] + ad * dz[j]) + (z_[j] + ad * dz[j]).transpose()).eval();
    }
    y_ += ad * dy;
    return true;
  }

  // Largest alpha with diag(lambda) + alpha*D >= 0, via the generalized
  // eigenvalue floor of D scaled by lambda^-1/2.
  static double boundary_step(const RVec& lambda, const RMat& d) {
    const RVec s = lambda.cwiseSqrt().cwiseInverse();
    const RMat t = s.asDiagonal() * d * s.asDiagonal();
    Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (t + t.transpose()));
    const double lmin = es.eigenvalues().minCoeff();
    if (lmin >= -1e-300) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
  }

  std::vector<RMat> apply_at_minus(const std::vector<RMat>& base, const RVec& dy) const {
    // returns base - A^T(dy)
    std::vector<RMat> out = base;
    for (Index k = 0; k < m_; ++k) {
      add_scaled_constraint(out, p_.constraints[static_cast<size_t>(k)], -dy(k));
    }
    return out;
  }

  static double inner_all(const std::vector<RMat>& a, const std::vector<RMat>& b) {
    double s = 0.0;
    for (size_t j = 0; j < a.size(); ++j) s += (a[j].array() * b[j].array()).sum();
    return s;
  }

  SdpSolution pack(SdpStatus status, const std::string& msg) const {
    SdpSolution sol;
    sol.status = status;
    sol.x = x_;
    sol.y = y_;
    sol.z = z_;
    sol.primal_objective = primal_obj_;
    sol.dual_objective = dual_obj_;
    sol.gap = primal_obj_ - dual_obj_;
    sol.primal_residual = rp_norm_;
    sol.dual_residual = rd_norm_;
    sol.iterations = iter_;
    sol.message = msg;
    return sol;
  }

  void print_trace() const {
    std::ostream& os = *opts_.trace;
    os << "iter " << iter_ << " primal " << primal_obj_ << " dual " << dual_obj_
       << " mu " << mu_ << " rp " << rp_norm_ << " rd " << rd_norm_ << '\n';
  }

  SdpProblem p_;
  SdpOptions opts_;
  size_t nblocks_;
  Index m_;
  Index n_total_ = 0;
  RVec b_;
  double b_norm_ = 0.0, c_norm_ = 0.0;
  std::vector<std::vector<Index>> block_constraints_;

  std::vector<RMat> x_, z_, rd_;
  RVec y_, rp_;
  double primal_obj_ = 0.0, dual_obj_ = 0.0, mu_ = 0.0;
  double rp_norm_ = 0.0, rd_norm_ = 0.0;
  int iter_ = 0;
};

}  // namespace detail

/// Solve a block-diagonal SDP in equality standard form. Non-Optimal statuses
/// carry the last iterate and residuals; garbage is never reported as Optimal.
inline SdpSolution solve(const SdpProblem& p, const SdpOptions& opts = SdpOptions{}) {
  detail::InteriorPointSolver solver(p, opts);
  return solver.run();
}

}  // namespace kappaent
