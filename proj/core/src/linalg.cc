#include "qtopo/linalg.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qtopo/errors.h"

namespace qtopo {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a nonempty square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

}  // namespace

HermitianOperator::HermitianOperator(const CMatrix& m) {
  require_square(m, "HermitianOperator");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (defect > kHermitianTol * scale) {
    std::ostringstream os;
    os << "HermitianOperator: matrix is not Hermitian (defect " << defect << ")";
    throw DomainError(os.str());
  }
  m_ = 0.5 * (m + m.adjoint());
}

HermitianOperator HermitianOperator::zero(int n) {
  if (n < 1) throw DomainError("HermitianOperator::zero: n must be positive");
  return HermitianOperator(CMatrix::Zero(n, n), Unchecked{});
}

HermitianOperator HermitianOperator::identity(int n) {
  if (n < 1) throw DomainError("HermitianOperator::identity: n must be positive");
  return HermitianOperator(CMatrix::Identity(n, n), Unchecked{});
}

HermitianOperator HermitianOperator::from_real_coords(const RVector& coords, int n) {
  if (n < 1 || coords.size() != static_cast<Eigen::Index>(n) * n) {
    throw DimensionError("from_real_coords: coordinate vector has wrong length");
  }
  CMatrix m(n, n);
  for (int j = 0; j < n; ++j) m(j, j) = coords[j];
  int idx = n;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      const Complex z(coords[idx] / kSqrt2, coords[idx + 1] / kSqrt2);
      m(j, k) = z;
      m(k, j) = std::conj(z);
      idx += 2;
    }
  }
  return HermitianOperator(std::move(m), Unchecked{});
}

HermitianOperator HermitianOperator::projector(const CVector& v) {
  if (v.size() == 0) throw DimensionError("projector: empty vector");
  CMatrix m = v * v.adjoint();
  m = 0.5 * (m + m.adjoint());
  return HermitianOperator(std::move(m), Unchecked{});
}

RVector HermitianOperator::real_coords() const {
  const int n = dim();
  RVector out(static_cast<Eigen::Index>(n) * n);
  for (int j = 0; j < n; ++j) out[j] = m_(j, j).real();
  int idx = n;
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      out[idx] = kSqrt2 * m_(j, k).real();
      out[idx + 1] = kSqrt2 * m_(j, k).imag();
      idx += 2;
    }
  }
  return out;
}

RVector HermitianOperator::eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (dim() != o.dim()) throw DimensionError("HermitianOperator +: dimension mismatch");
  return HermitianOperator(m_ + o.m_, Unchecked{});
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  if (dim() != o.dim()) throw DimensionError("HermitianOperator -: dimension mismatch");
  return HermitianOperator(m_ - o.m_, Unchecked{});
}

HermitianOperator HermitianOperator::operator*(double s) const {
  return HermitianOperator(m_ * s, Unchecked{});
}

HermitianOperator& HermitianOperator::operator+=(const HermitianOperator& o) {
  if (dim() != o.dim()) throw DimensionError("HermitianOperator +=: dimension mismatch");
  m_ += o.m_;
  return *this;
}

DensityOperator::DensityOperator(HermitianOperator base) : base_(std::move(base)) {
  const double tr = base_.trace();
  if (std::abs(tr - 1.0) > kStateTraceTol) {
    std::ostringstream os;
    os << "DensityOperator: trace " << tr << " differs from 1";
    throw DomainError(os.str());
  }
  const double lmin = base_.eigenvalues()[0];
  if (lmin < -kStateEigenTol) {
    std::ostringstream os;
    os << "DensityOperator: negative eigenvalue " << lmin;
    throw DomainError(os.str());
  }
}

DensityOperator DensityOperator::pure(const CVector& psi) {
  const double nrm = psi.norm();
  if (nrm == 0.0) throw DomainError("DensityOperator::pure: zero vector");
  return DensityOperator(HermitianOperator::projector(psi / nrm));
}

DensityOperator DensityOperator::maximally_mixed(int n) {
  return DensityOperator(HermitianOperator::identity(n) * (1.0 / n));
}

UnitVector::UnitVector(CVector v) : v_(std::move(v)) {
  if (v_.size() == 0) throw DimensionError("UnitVector: empty vector");
  if (std::abs(v_.squaredNorm() - 1.0) > kUnitNormTol) {
    throw DomainError("UnitVector: squared norm differs from 1");
  }
}

UnitVector UnitVector::normalized(const CVector& v) {
  const double nrm = v.norm();
  if (v.size() == 0 || nrm == 0.0) throw DomainError("UnitVector::normalized: zero vector");
  return UnitVector(CVector(v / nrm));
}

double hs_inner(const HermitianOperator& a, const HermitianOperator& b) {
  if (a.dim() != b.dim()) throw DimensionError("hs_inner: dimension mismatch");
  // tr(ab) = sum_ij a_ij conj(b_ij) for Hermitian b
  return (a.matrix().array() * b.matrix().conjugate().array()).sum().real();
}

double hs_norm(const HermitianOperator& a) { return a.matrix().norm(); }

CVector gaussian_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / kSqrt2);
  CVector v(n);
  for (int i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    v[i] = Complex(re, im);
  }
  return v;
}

CMatrix ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0 / kSqrt2);
  CMatrix z(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      z(i, j) = Complex(re, im);
    }
  }
  return z;
}

HermitianOperator random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  RVector c(static_cast<Eigen::Index>(n) * n);
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = normal(rng);
  return HermitianOperator::from_real_coords(c, n);
}

CMatrix haar_unitary(int n, std::mt19937_64& rng) {
  if (n < 1) throw DomainError("haar_unitary: n must be positive");
  const CMatrix z = ginibre(n, n, rng);
  Eigen::HouseholderQR<CMatrix> qr(z);
  CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix& r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    const double a = std::abs(d);
    q.col(j) *= (a > 0.0) ? d / a : Complex(1.0, 0.0);
  }
  return q;
}

CMatrix haar_unitary(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return haar_unitary(n, rng);
}

SchmidtDecomposition schmidt_decompose(const UnitVector& alpha, int dA, int dB) {
  if (dA < 1 || dB < 1 || alpha.dim() != dA * dB) {
    throw DimensionError("schmidt_decompose: dim(alpha) must equal dA*dB");
  }
  // alpha = sum_ij C_ij e_i (x) f_j with C_ij = alpha[i*dB + j]
  CMatrix c(dA, dB);
  for (int i = 0; i < dA; ++i) {
    for (int j = 0; j < dB; ++j) c(i, j) = alpha.vector()[i * dB + j];
  }
  if (c.norm() == 0.0) throw DomainError("schmidt_decompose: zero vector");
  Eigen::JacobiSVD<CMatrix> svd(c, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  SchmidtDecomposition out;
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s[k] > kSchmidtCutoff) out.coefficients.push_back(s[k]);
  }
  out.rank = static_cast<int>(out.coefficients.size());
  // C = U S V^dagger, so alpha = sum_k s_k u_k (x) conj(v_k).
  out.left = svd.matrixU().leftCols(out.rank);
  out.right = svd.matrixV().leftCols(out.rank).conjugate();
  out.left_full = svd.matrixU();
  return out;
}

CMatrix partial_trace_first(const CVector& psi, int dA, int dB) {
  if (psi.size() != static_cast<Eigen::Index>(dA) * dB) {
    throw DimensionError("partial_trace_first: dimension mismatch");
  }
  CMatrix c(dA, dB);
  for (int i = 0; i < dA; ++i) {
    for (int j = 0; j < dB; ++j) c(i, j) = psi[i * dB + j];
  }
  // (rho_B)_{jj'} = sum_i C_ij conj(C_ij')
  return c.transpose() * c.conjugate();
}

std::vector<HermitianOperator> hermitian_basis(int n) {
  if (n < 1) throw DomainError("hermitian_basis: n must be positive");
  std::vector<HermitianOperator> basis;
  basis.reserve(static_cast<std::size_t>(n) * n);
  basis.push_back(HermitianOperator::identity(n) * (1.0 / std::sqrt(static_cast<double>(n))));
  // traceless diagonal, generalized Gell-Mann
  for (int l = 1; l < n; ++l) {
    CMatrix m = CMatrix::Zero(n, n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) m(j, j) = norm;
    m(l, l) = -static_cast<double>(l) * norm;
    basis.emplace_back(m);
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      CMatrix s = CMatrix::Zero(n, n);
      s(j, k) = s(k, j) = 1.0 / kSqrt2;
      basis.emplace_back(s);
      CMatrix a = CMatrix::Zero(n, n);
      a(j, k) = Complex(0.0, -1.0 / kSqrt2);
      a(k, j) = Complex(0.0, 1.0 / kSqrt2);
      basis.emplace_back(a);
    }
  }
  return basis;
}

CMatrix unitary_exp(const HermitianOperator& h, double t) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
  const CMatrix& v = es.eigenvectors();
  CVector phases(h.dim());
  for (int i = 0; i < h.dim(); ++i) phases[i] = std::polar(1.0, t * es.eigenvalues()[i]);
  return v * phases.asDiagonal() * v.adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

int numerical_rank(const CMatrix& m, double cutoff, bool relative) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  const RVector& s = svd.singularValues();
  const double thr = relative ? cutoff * std::max(1.0, s[0]) : cutoff;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > thr) ++rank;
  }
  return rank;
}

double unitarity_defect(const CMatrix& u) {
  require_square(u, "unitarity_defect");
  const CMatrix d = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

RMatrix orthonormal_range(const RMatrix& cols, double rel_cutoff) {
  if (cols.cols() == 0) return RMatrix(cols.rows(), 0);
  Eigen::BDCSVD<RMatrix> svd(cols, Eigen::ComputeThinU);
  const RVector& s = svd.singularValues();
  Eigen::Index rank = 0;
  const double thr = rel_cutoff * (s.size() > 0 ? s[0] : 0.0);
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > thr && s[i] > 0.0) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

RMatrix null_space(const RMatrix& m, double rel_cutoff) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0) return RMatrix::Identity(n, n);
  Eigen::BDCSVD<RMatrix> svd(m, Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  const double thr = rel_cutoff * (s.size() > 0 ? s[0] : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > thr && s[i] > 0.0) ++rank;
  }
  return svd.matrixV().rightCols(n - rank);
}

RMatrix coords_matrix(const std::vector<HermitianOperator>& ops) {
  if (ops.empty()) return RMatrix(0, 0);
  const int n = ops.front().dim();
  RMatrix out(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(ops.size()));
  for (std::size_t j = 0; j < ops.size(); ++j) {
    if (ops[j].dim() != n) throw DimensionError("coords_matrix: mixed dimensions");
    out.col(static_cast<Eigen::Index>(j)) = ops[j].real_coords();
  }
  return out;
}

}  // namespace qtopo
