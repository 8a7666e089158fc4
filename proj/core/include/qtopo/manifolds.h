#pragma once

// State manifolds: fixed-spectrum orbits, invariant states of a unitary
// group, Bob-unitary orbits of a bipartite pure state, and the k-copy map.

#include <cstdint>
#include <vector>

#include "qtopo/linalg.h"
#include "qtopo/opsys.h"
#include "qtopo/seeds.h"
#include "qtopo/topo_bounds.h"

namespace qtopo {

inline constexpr double kSpectrumSumTol = 1e-12;
inline constexpr double kMultiplicityTol = 1e-9;
inline constexpr int kMaxTensorDim = 1024;

// Eigenvalues s_1 >= ... >= s_n >= 0 summing to 1, grouped into multiplicities.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> values);
  static Spectrum pure(int n);
  static Spectrum uniform(int n);

  int n() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  // Sizes of the groups of equal eigenvalues, in order of descending value.
  const std::vector<int>& multiplicities() const { return mult_; }
  int max_multiplicity() const;
  // n minus the largest multiplicity.
  int rank_parameter() const { return n() - max_multiplicity(); }
  FlagPartition partition() const;
  RMatrix diagonal() const;

 private:
  std::vector<double> values_;
  std::vector<int> mult_;
};

// A bipartite unit vector alpha in C^dA (x) C^dB with its Schmidt data.
class BobOrbitSpec {
 public:
  BobOrbitSpec(const UnitVector& alpha, int dA, int dB);
  // sum_i lambda_i e_i (x) f_i with e_i, f_i the first r columns of the given unitaries.
  static BobOrbitSpec from_schmidt(const std::vector<double>& lambda, const CMatrix& e_basis,
                                   const CMatrix& f_basis);
  static BobOrbitSpec maximally_entangled(int n);

  int dA() const { return dA_; }
  int dB() const { return dB_; }
  int rank() const { return schmidt_.rank; }
  const UnitVector& alpha() const { return alpha_; }
  const std::vector<double>& lambda() const { return schmidt_.coefficients; }
  const CMatrix& e() const { return schmidt_.left; }        // dA x r
  const CMatrix& f() const { return schmidt_.right; }       // dB x r
  const CMatrix& e_full() const { return schmidt_.left_full; }
  // dB x dB unitary whose first r columns are f_i.
  const CMatrix& f_full() const { return f_full_; }
  // P_alpha = sum_i lambda_i |e_i><f_i|, dA x dB.
  const CMatrix& p_alpha() const { return p_alpha_; }
  // Transpose of an operator on A taken in the Schmidt basis e.
  CMatrix transpose_a(const CMatrix& o) const;

 private:
  UnitVector alpha_;
  int dA_;
  int dB_;
  SchmidtDecomposition schmidt_;
  CMatrix f_full_;
  CMatrix p_alpha_;
};

struct SymmetryGroup {
  std::vector<CMatrix> generators;
  int n = 0;
  SymmetryGroup(int n_, std::vector<CMatrix> gens);
};

// Orthonormal tangent frame at a point of a unitary orbit together with
// Hermitian generators g_j with d/dt state(exp(i t g_j) U)|_{t=0} = frame column j.
struct TangentFrame {
  RMatrix frame;
  std::vector<HermitianOperator> generators;
};

// States (1_A (x) U) rho0 (1_A (x) U)^dagger for U in U(dB). With dA = 1 this is
// the fixed-spectrum orbit of rho0.
class UnitaryOrbit {
 public:
  UnitaryOrbit(HermitianOperator base, int dA, int dB, int manifold_dim);
  static UnitaryOrbit fixed_spectrum(const Spectrum& s);
  static UnitaryOrbit bob(const BobOrbitSpec& spec);

  int hilbert_dim() const { return dA_ * dB_; }
  int acting_dim() const { return dB_; }
  int dimension() const { return manifold_dim_; }
  const HermitianOperator& base() const { return base_; }

  HermitianOperator state(const CMatrix& u) const;
  CMatrix sample(Rng& rng) const { return haar_unitary(dB_, rng); }
  // exp(i scale H) U with H a random Hermitian matrix of unit Hilbert-Schmidt norm.
  CMatrix nearby(const CMatrix& u, double scale, Rng& rng) const;
  CMatrix move(const CMatrix& u, const HermitianOperator& g, double t) const;
  TangentFrame tangent(const CMatrix& u) const;

 private:
  HermitianOperator base_;
  int dA_;
  int dB_;
  int manifold_dim_;
};

DensityOperator sample_fixed_spectrum(const Spectrum& s, std::uint64_t seed);
// i[h_a, rho] over a traceless Hermitian basis, orthonormalized.
std::vector<HermitianOperator> tangent_basis_fixed_spectrum(const DensityOperator& rho, const Spectrum& s);

DensityOperator bob_state(const BobOrbitSpec& spec, const CMatrix& u);
// tr((O (x) U S U^dagger) |alpha><alpha|), computed directly.
double lemtr_lhs(const BobOrbitSpec& spec, const HermitianOperator& o, const HermitianOperator& s,
                 const CMatrix& u);
// tr((P_alpha U)^dagger O^T (P_alpha U) S).
double lemtr_rhs(const BobOrbitSpec& spec, const HermitianOperator& o, const HermitianOperator& s,
                 const CMatrix& u);
std::vector<HermitianOperator> bob_tangent_basis(const BobOrbitSpec& spec, const CMatrix& u);

// Orthonormal basis of the Hermitian part of the commutant; the complex
// commutant is its complex span.
std::vector<HermitianOperator> commutant(const SymmetryGroup& g);
Povm invariant_state_povm(const SymmetryGroup& g);

// A block of the commutant decomposition: M(size) (x) 1_copies.
struct BlockType {
  int size;
  int copies;
};
// Each component lists one multiset of eigenvalues per block (descending)
// such that the union of `copies` copies of each equals the spectrum.
using SpectrumComponent = std::vector<std::vector<double>>;
std::vector<SpectrumComponent> enumerate_components(const std::vector<BlockType>& blocks, const Spectrum& s);
// The flag partitions (multiplicities within each block) of a component.
std::vector<FlagPartition> component_partitions(const SpectrumComponent& c);

DensityOperator tensor_power(const DensityOperator& rho, int k);
CMatrix tensor_power_matrix(const CMatrix& m, int k);
// sum_i rho^{(x) i-1} (x) v (x) rho^{(x) k-i}
CMatrix kcopy_differential(const CMatrix& rho, const CMatrix& v, int k);

// eta = sum_t coeff_t * symmetrized product of basis elements sigma_{idx_t}.
struct SymTensorTerm {
  double coeff;
  std::vector<int> indices;
};
// tr(eta (sum_i x_i sigma_i)^{(x) k}) with sigma = hermitian_basis(n).
double kcopy_poly_eval(const std::vector<SymTensorTerm>& eta, const RVector& x, int n);

}  // namespace qtopo
