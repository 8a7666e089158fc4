#pragma once

// Dense complex linear algebra over C^n and over the real inner-product space
// H(C^n) of Hermitian operators with the Hilbert-Schmidt inner product.

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace qtopo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kStateEigenTol = 1e-10;
inline constexpr double kStateTraceTol = 1e-10;
inline constexpr double kUnitNormTol = 1e-12;
inline constexpr double kSchmidtCutoff = 1e-10;

// A Hermitian n x n matrix. Construction checks A = A^dagger to 1e-12 relative
// to the largest entry and stores the exactly symmetrized matrix.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const CMatrix& m);

  static HermitianOperator zero(int n);
  static HermitianOperator identity(int n);
  // Inverse of real_coords().
  static HermitianOperator from_real_coords(const RVector& coords, int n);
  static HermitianOperator projector(const CVector& v);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMatrix& matrix() const { return m_; }

  // Isometric coordinates in R^{n^2}: diagonal entries, then sqrt(2) Re and
  // sqrt(2) Im of each upper-triangular entry. Euclidean dot = hs_inner.
  RVector real_coords() const;

  double trace() const { return m_.trace().real(); }
  RVector eigenvalues() const;  // ascending

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;
  HermitianOperator& operator+=(const HermitianOperator& o);

 private:
  struct Unchecked {};
  HermitianOperator(CMatrix m, Unchecked) : m_(std::move(m)) {}
  CMatrix m_;
};

inline HermitianOperator operator*(double s, const HermitianOperator& h) { return h * s; }

// Positive semidefinite, unit trace.
class DensityOperator {
 public:
  DensityOperator() = default;
  explicit DensityOperator(HermitianOperator base);
  explicit DensityOperator(const CMatrix& m) : DensityOperator(HermitianOperator(m)) {}

  static DensityOperator pure(const CVector& psi);
  static DensityOperator maximally_mixed(int n);

  int dim() const { return base_.dim(); }
  const HermitianOperator& op() const { return base_; }
  const CMatrix& matrix() const { return base_.matrix(); }

 private:
  HermitianOperator base_;
};

class UnitVector {
 public:
  UnitVector() = default;
  explicit UnitVector(CVector v);
  // Rescales a nonzero vector to unit norm.
  static UnitVector normalized(const CVector& v);

  int dim() const { return static_cast<int>(v_.size()); }
  const CVector& vector() const { return v_; }

 private:
  CVector v_;
};

struct SchmidtDecomposition {
  std::vector<double> coefficients;  // descending, all > kSchmidtCutoff
  CMatrix left;                      // dA x r, columns e_i
  CMatrix right;                     // dB x r, columns f_i
  CMatrix left_full;                 // dA x dA unitary whose first r columns are e_i
  int rank = 0;
};

double hs_inner(const HermitianOperator& a, const HermitianOperator& b);
double hs_norm(const HermitianOperator& a);

// Haar-distributed unitary: Ginibre matrix, Householder QR, then the phases of
// diag(R) are moved into Q so the triangular factor has positive diagonal.
CMatrix haar_unitary(int n, std::uint64_t seed);
CMatrix haar_unitary(int n, std::mt19937_64& rng);

// Standard complex Gaussian vector / matrix (E|z|^2 = 1).
CVector gaussian_vector(int n, std::mt19937_64& rng);
CMatrix ginibre(int rows, int cols, std::mt19937_64& rng);
// Random Hermitian matrix with i.i.d. Gaussian real coordinates.
HermitianOperator random_hermitian(int n, std::mt19937_64& rng);

SchmidtDecomposition schmidt_decompose(const UnitVector& alpha, int dA, int dB);

// Reduced operator on the second factor of |psi><psi| for psi in C^dA (x) C^dB.
CMatrix partial_trace_first(const CVector& psi, int dA, int dB);

// Orthonormal basis of H(C^n); element 0 is 1/sqrt(n), the rest are traceless.
std::vector<HermitianOperator> hermitian_basis(int n);

// exp(i t H) for Hermitian H.
CMatrix unitary_exp(const HermitianOperator& h, double t);

CMatrix kron(const CMatrix& a, const CMatrix& b);

// Number of singular values above cutoff * max(1, largest singular value) if
// relative, else above the absolute cutoff.
int numerical_rank(const CMatrix& m, double cutoff, bool relative = false);

double unitarity_defect(const CMatrix& u);  // ||U^dagger U - 1||_op

// Orthonormal basis (columns) of the range of `cols`, singular values below
// cutoff * largest treated as zero.
RMatrix orthonormal_range(const RMatrix& cols, double rel_cutoff);
// Orthonormal basis of the null space of `m` (columns).
RMatrix null_space(const RMatrix& m, double rel_cutoff);

// Real coordinate matrix whose columns are the real_coords of each operator.
RMatrix coords_matrix(const std::vector<HermitianOperator>& ops);

}  // namespace qtopo
