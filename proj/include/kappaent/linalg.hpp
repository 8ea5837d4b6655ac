#pragma once

// Dense complex linear algebra kernel for bipartite operators:
// Kronecker products, partial transpose/trace, Hermitian eigendecomposition,
// trace norm and PSD tests. All functions are pure and thread-safe.
//
// Index convention (fixed): the product basis |i>_A (x) |j>_B maps to
// row/column index i*dim_b + j. Subsystem A is the most significant index.

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace kappaent {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

/// A square complex operator together with the declared local dimensions.
struct BipartiteOperator {
  CMat mat;
  Index dim_a = 0;
  Index dim_b = 0;

  Index dim() const { return dim_a * dim_b; }
};

/// Checked constructor: requires mat square with side dim_a*dim_b.
inline BipartiteOperator make_bipartite(CMat mat, Index dim_a, Index dim_b) {
  if (dim_a < 1 || dim_b < 1) {
    throw std::invalid_argument("make_bipartite: local dimensions must be >= 1");
  }
  if (mat.rows() != mat.cols() || mat.rows() != dim_a * dim_b) {
    std::ostringstream os;
    os << "make_bipartite: matrix is " << mat.rows() << "x" << mat.cols()
       << " but dim_a*dim_b = " << dim_a * dim_b;
    throw std::invalid_argument(os.str());
  }
  return BipartiteOperator{std::move(mat), dim_a, dim_b};
}

/// Largest absolute deviation from Hermiticity, max_ij |X_ij - conj(X_ji)|.
inline double hermiticity_defect(const CMat& x) {
  return (x - x.adjoint()).cwiseAbs().maxCoeff();
}

/// Hermitian within the relative tolerance tol*(1 + max|X_ij|).
inline bool is_hermitian(const CMat& x, double tol = 1e-12) {
  if (x.rows() != x.cols()) return false;
  if (x.size() == 0) return true;
  return hermiticity_defect(x) <= tol * (1.0 + x.cwiseAbs().maxCoeff());
}

/// Exact Hermitian part (X + X^dag)/2.
inline CMat hermitian_part(const CMat& x) { return 0.5 * (x + x.adjoint()); }

/// Kronecker product a (x) b.
inline CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// Partial transpose on the B factor: out[(i,j),(k,l)] = in[(i,l),(k,j)].
/// Involution; preserves trace and Hermiticity.
inline BipartiteOperator partial_transpose(const BipartiteOperator& x) {
  const Index da = x.dim_a, db = x.dim_b;
  CMat out(x.mat.rows(), x.mat.cols());
  for (Index i = 0; i < da; ++i) {
    for (Index k = 0; k < da; ++k) {
      for (Index j = 0; j < db; ++j) {
        for (Index l = 0; l < db; ++l) {
          out(i * db + j, k * db + l) = x.mat(i * db + l, k * db + j);
        }
      }
    }
  }
  return BipartiteOperator{std::move(out), da, db};
}

enum class Subsystem : std::uint8_t { A, B };

/// Trace over the discarded subsystem; keeps the named one.
inline CMat partial_trace(const BipartiteOperator& x, Subsystem keep) {
  const Index da = x.dim_a, db = x.dim_b;
  if (keep == Subsystem::A) {
    CMat out = CMat::Zero(da, da);
    for (Index i = 0; i < da; ++i) {
      for (Index k = 0; k < da; ++k) {
        Complex s = 0.0;
        for (Index j = 0; j < db; ++j) s += x.mat(i * db + j, k * db + j);
        out(i, k) = s;
      }
    }
    return out;
  }
  CMat out = CMat::Zero(db, db);
  for (Index j = 0; j < db; ++j) {
    for (Index l = 0; l < db; ++l) {
      Complex s = 0.0;
      for (Index i = 0; i < da; ++i) s += x.mat(i * db + j, i * db + l);
      out(j, l) = s;
    }
  }
  return out;
}

/// Partial transpose over an arbitrary subset of tensor factors.
/// dims lists the factor dimensions (most significant first); transpose[s]
/// selects which factors get transposed. Used for the Choi-matrix PPT test.
inline CMat partial_transpose_multi(const CMat& x, const std::vector<Index>& dims,
                                    const std::vector<bool>& transpose) {
  Index total = 1;
  for (Index d : dims) total *= d;
  if (x.rows() != total || x.cols() != total || dims.size() != transpose.size()) {
    throw std::invalid_argument("partial_transpose_multi: dimension mismatch");
  }
  const int n = static_cast<int>(dims.size());
  std::vector<Index> row_idx(n), col_idx(n);
  CMat out(total, total);
  for (Index r = 0; r < total; ++r) {
    Index rr = r;
    for (int s = n - 1; s >= 0; --s) { row_idx[s] = rr % dims[s]; rr /= dims[s]; }
    for (Index c = 0; c < total; ++c) {
      Index cc = c;
      for (int s = n - 1; s >= 0; --s) { col_idx[s] = cc % dims[s]; cc /= dims[s]; }
      Index sr = 0, sc = 0;
      for (int s = 0; s < n; ++s) {
        const Index ri = transpose[s] ? col_idx[s] : row_idx[s];
        const Index ci = transpose[s] ? row_idx[s] : col_idx[s];
        sr = sr * dims[s] + ri;
        sc = sc * dims[s] + ci;
      }
      out(r, c) = x(sr, sc);
    }
  }
  return out;
}

struct HermEig {
  RVec eigenvalues;  // ascending
  CMat eigenvectors; // unitary, columns match eigenvalues
};

/// Dense Hermitian eigendecomposition h = U diag(lambda) U^dag.
/// Rejects input whose Hermiticity defect exceeds 1e-12*(1 + max|h_ij|).
inline HermEig herm_eig(const CMat& h) {
  if (h.rows() != h.cols()) {
    throw std::invalid_argument("herm_eig: matrix must be square");
  }
  if (!is_hermitian(h)) {
    std::ostringstream os;
    os << "herm_eig: symmetry violation, max |h_ij - conj(h_ji)| = "
       << hermiticity_defect(h);
    throw std::invalid_argument(os.str());
  }
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(h));
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("herm_eig: eigensolver did not converge");
  }
  return HermEig{es.eigenvalues(), es.eigenvectors()};
}

/// Smallest eigenvalue of a Hermitian matrix.
inline double lambda_min(const CMat& h) { return herm_eig(h).eigenvalues.minCoeff(); }

/// Trace norm. Hermitian input uses the eigenvalue route (sum of |lambda|);
/// general matrices fall back to singular values.
inline double trace_norm(const CMat& x) {
  if (x.rows() == x.cols() && is_hermitian(x)) {
    return herm_eig(x).eigenvalues.cwiseAbs().sum();
  }
  Eigen::BDCSVD<CMat> svd(x);
  return svd.singularValues().sum();
}

/// Trace distance (1/2)||a - b||_1 between Hermitian operators.
inline double trace_distance(const CMat& a, const CMat& b) {
  return 0.5 * trace_norm(hermitian_part(a - b));
}

/// PSD test: lambda_min(h) >= -tol*(1 + ||h||_inf), with ||h||_inf the
/// largest absolute eigenvalue.
inline bool is_psd(const CMat& h, double tol) {
  const RVec ev = herm_eig(h).eigenvalues;
  const double scale = ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
  const double lmin = ev.size() == 0 ? 0.0 : ev.minCoeff();
  return lmin >= -tol * (1.0 + scale);
}

/// Operator absolute value U|Lambda|U^dag; eigenvalues below 1e-12 in
/// magnitude are flushed to zero.
inline CMat abs_herm(const CMat& h) {
  HermEig eig = herm_eig(h);
  RVec a = eig.eigenvalues.cwiseAbs();
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) <= 1e-12) a(i) = 0.0;
  }
  return eig.eigenvectors * a.asDiagonal() * eig.eigenvectors.adjoint();
}

/// Swap (flip) operator F on d (x) d: F|i,j> = |j,i>.
inline BipartiteOperator swap_operator(Index d) {
  CMat f = CMat::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) f(i * d + j, j * d + i) = 1.0;
  }
  return BipartiteOperator{std::move(f), d, d};
}

/// Projector onto the symmetric subspace of d (x) d, (I + F)/2.
inline CMat symmetric_projector(Index d) {
  return 0.5 * (CMat::Identity(d * d, d * d) + swap_operator(d).mat);
}

/// Projector onto the antisymmetric subspace of d (x) d, (I - F)/2.
inline CMat antisymmetric_projector(Index d) {
  return 0.5 * (CMat::Identity(d * d, d * d) - swap_operator(d).mat);
}

/// Tensor product of two bipartite operators, reindexed to the merged
/// bipartition (A A')|(B B'): local dimensions multiply.
inline BipartiteOperator tensor_bipartite(const BipartiteOperator& x,
                                          const BipartiteOperator& y) {
  const Index da1 = x.dim_a, db1 = x.dim_b, da2 = y.dim_a, db2 = y.dim_b;
  const Index da = da1 * da2, db = db1 * db2;
  CMat out(da * db, da * db);
  auto merged = [da2, db1, db2, db](Index a1, Index a2, Index b1, Index b2) {
    return (a1 * da2 + a2) * db + (b1 * db2 + b2);
  };
  for (Index a1 = 0; a1 < da1; ++a1)
    for (Index b1 = 0; b1 < db1; ++b1)
      for (Index a1p = 0; a1p < da1; ++a1p)
        for (Index b1p = 0; b1p < db1; ++b1p) {
          const Complex xe = x.mat(a1 * db1 + b1, a1p * db1 + b1p);
          for (Index a2 = 0; a2 < da2; ++a2)
            for (Index b2 = 0; b2 < db2; ++b2)
              for (Index a2p = 0; a2p < da2; ++a2p)
                for (Index b2p = 0; b2p < db2; ++b2p) {
                  out(merged(a1, a2, b1, b2), merged(a1p, a2p, b1p, b2p)) =
                      xe * y.mat(a2 * db2 + b2, a2p * db2 + b2p);
                }
        }
  return BipartiteOperator{std::move(out), da, db};
}

}  // namespace kappaent
