#include "qtopo/manifolds.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include <Eigen/SVD>

#include "qtopo/errors.h"

namespace qtopo {

namespace {

// Groups sorted-descending values into runs closer than kMultiplicityTol.
std::vector<int> group_runs(const std::vector<double>& v) {
  std::vector<int> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0 && std::abs(v[i - 1] - v[i]) <= kMultiplicityTol) {
      ++out.back();
    } else {
      out.push_back(1);
    }
  }
  return out;
}

CMatrix commutator_i(const CMatrix& h, const CMatrix& rho) {
  return Complex(0.0, 1.0) * (h * rho - rho * h);
}

// Orthonormal frame of the span of coordinate columns, with the matching
// combination coefficients: frame = cols * coeff.
struct RangeWithCoeffs {
  RMatrix frame;
  RMatrix coeff;
};

constexpr double kAbsoluteRankFloor = 1e-12;

RangeWithCoeffs range_with_coeffs(const RMatrix& cols, double rel_cutoff) {
  if (cols.cols() == 0) return {RMatrix(cols.rows(), 0), RMatrix(0, 0)};
  Eigen::JacobiSVD<RMatrix> svd(cols, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  // The absolute floor keeps round-off from counting as tangent directions at
  // points with a trivial orbit.
  const double thr = std::max(rel_cutoff * (s.size() ? s[0] : 0.0), kAbsoluteRankFloor);
  Eigen::Index rank = 0;
  while (rank < s.size() && s[rank] > thr) ++rank;
  RangeWithCoeffs out;
  out.frame = svd.matrixU().leftCols(rank);
  out.coeff = svd.matrixV().leftCols(rank) * s.head(rank).cwiseInverse().asDiagonal();
  return out;
}

std::vector<HermitianOperator> ops_from_columns(const RMatrix& m, int n) {
  std::vector<HermitianOperator> out;
  out.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(HermitianOperator::from_real_coords(m.col(j), n));
  return out;
}

}  // namespace

Spectrum::Spectrum(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw DomainError("Spectrum: empty");
  std::sort(values_.begin(), values_.end(), std::greater<>());
  if (values_.back() < 0.0) throw DomainError("Spectrum: negative eigenvalue");
  const double sum = std::accumulate(values_.begin(), values_.end(), 0.0);
  if (std::abs(sum - 1.0) > kSpectrumSumTol * std::max<double>(1.0, static_cast<double>(values_.size()))) {
    std::ostringstream os;
    os << "Spectrum: eigenvalues sum to " << sum;
    throw DomainError(os.str());
  }
  mult_ = group_runs(values_);
}

Spectrum Spectrum::pure(int n) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  v[0] = 1.0;
  return Spectrum(v);
}

Spectrum Spectrum::uniform(int n) { return Spectrum(std::vector<double>(static_cast<std::size_t>(n), 1.0 / n)); }

int Spectrum::max_multiplicity() const { return *std::max_element(mult_.begin(), mult_.end()); }

FlagPartition Spectrum::partition() const { return FlagPartition(std::vector<Int>(mult_.begin(), mult_.end())); }

RMatrix Spectrum::diagonal() const {
  RVector d(n());
  for (int i = 0; i < n(); ++i) d[i] = values_[static_cast<std::size_t>(i)];
  return d.asDiagonal();
}

BobOrbitSpec::BobOrbitSpec(const UnitVector& alpha, int dA, int dB)
    : alpha_(alpha), dA_(dA), dB_(dB), schmidt_(schmidt_decompose(alpha, dA, dB)) {
  const int r = schmidt_.rank;
  Eigen::HouseholderQR<CMatrix> qr(schmidt_.right);
  f_full_ = qr.householderQ() * CMatrix::Identity(dB, dB);
  f_full_.leftCols(r) = schmidt_.right;
  p_alpha_ = CMatrix::Zero(dA, dB);
  for (int i = 0; i < r; ++i) {
    p_alpha_ += schmidt_.coefficients[static_cast<std::size_t>(i)] * schmidt_.left.col(i) * schmidt_.right.col(i).adjoint();
  }
}

BobOrbitSpec BobOrbitSpec::from_schmidt(const std::vector<double>& lambda, const CMatrix& e_basis,
                                        const CMatrix& f_basis) {
  const int r = static_cast<int>(lambda.size());
  if (r < 1 || e_basis.cols() < r || f_basis.cols() < r) throw DimensionError("from_schmidt: too few basis vectors");
  const int dA = static_cast<int>(e_basis.rows());
  const int dB = static_cast<int>(f_basis.rows());
  CVector a = CVector::Zero(static_cast<Eigen::Index>(dA) * dB);
  for (int i = 0; i < r; ++i) a += lambda[static_cast<std::size_t>(i)] * kron(e_basis.col(i), f_basis.col(i));
  return BobOrbitSpec(UnitVector::normalized(a), dA, dB);
}

BobOrbitSpec BobOrbitSpec::maximally_entangled(int n) {
  const CMatrix id = CMatrix::Identity(n, n);
  return from_schmidt(std::vector<double>(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n))), id, id);
}

CMatrix BobOrbitSpec::transpose_a(const CMatrix& o) const {
  const CMatrix& e = schmidt_.left_full;
  return e * (e.adjoint() * o * e).transpose() * e.adjoint();
}

SymmetryGroup::SymmetryGroup(int n_, std::vector<CMatrix> gens) : generators(std::move(gens)), n(n_) {
  if (n < 1) throw DomainError("SymmetryGroup: n must be positive");
  for (const auto& g : generators) {
    if (g.rows() != n || g.cols() != n) throw DimensionError("SymmetryGroup: generator has wrong size");
    if (unitarity_defect(g) > 1e-10) throw DomainError("SymmetryGroup: generator is not unitary");
  }
}

UnitaryOrbit::UnitaryOrbit(HermitianOperator base, int dA, int dB, int manifold_dim)
    : base_(std::move(base)), dA_(dA), dB_(dB), manifold_dim_(manifold_dim) {
  if (base_.dim() != dA * dB) throw DimensionError("UnitaryOrbit: base state has wrong dimension");
}

UnitaryOrbit UnitaryOrbit::fixed_spectrum(const Spectrum& s) {
  const HermitianOperator d(CMatrix(s.diagonal().cast<Complex>()));
  return UnitaryOrbit(d, 1, s.n(), static_cast<int>(flag_dim(s.partition())));
}

UnitaryOrbit UnitaryOrbit::bob(const BobOrbitSpec& spec) {
  const int r = spec.rank();
  return UnitaryOrbit(HermitianOperator::projector(spec.alpha().vector()), spec.dA(), spec.dB(),
                      2 * spec.dB() * r - r * r - 1);
}

HermitianOperator UnitaryOrbit::state(const CMatrix& u) const {
  if (u.rows() != dB_ || u.cols() != dB_) throw DimensionError("UnitaryOrbit::state: unitary has wrong size");
  const CMatrix k = dA_ == 1 ? u : kron(CMatrix::Identity(dA_, dA_), u);
  return HermitianOperator(CMatrix(k * base_.matrix() * k.adjoint()));
}

CMatrix UnitaryOrbit::nearby(const CMatrix& u, double scale, Rng& rng) const {
  HermitianOperator h = random_hermitian(dB_, rng);
  h = h * (1.0 / hs_norm(h));
  return unitary_exp(h, scale) * u;
}

CMatrix UnitaryOrbit::move(const CMatrix& u, const HermitianOperator& g, double t) const {
  return unitary_exp(g, t) * u;
}

TangentFrame UnitaryOrbit::tangent(const CMatrix& u) const {
  const CMatrix rho = state(u).matrix();
  const std::vector<HermitianOperator> basis = hermitian_basis(dB_);
  const int N = hilbert_dim();
  RMatrix cols(static_cast<Eigen::Index>(N) * N, static_cast<Eigen::Index>(basis.size()) - 1);
  const CMatrix id_a = CMatrix::Identity(dA_, dA_);
  for (std::size_t a = 1; a < basis.size(); ++a) {
    const CMatrix h = dA_ == 1 ? basis[a].matrix() : kron(id_a, basis[a].matrix());
    cols.col(static_cast<Eigen::Index>(a) - 1) = HermitianOperator(commutator_i(h, rho)).real_coords();
  }
  const RangeWithCoeffs rc = range_with_coeffs(cols, 1e-9);
  TangentFrame tf;
  tf.frame = rc.frame;
  for (Eigen::Index j = 0; j < rc.coeff.cols(); ++j) {
    HermitianOperator g = HermitianOperator::zero(dB_);
    for (std::size_t a = 1; a < basis.size(); ++a) g += basis[a] * rc.coeff(static_cast<Eigen::Index>(a) - 1, j);
    tf.generators.push_back(g);
  }
  return tf;
}

DensityOperator sample_fixed_spectrum(const Spectrum& s, std::uint64_t seed) {
  const CMatrix u = haar_unitary(s.n(), seed);
  const CMatrix d = s.diagonal().cast<Complex>();
  return DensityOperator(CMatrix(u * d * u.adjoint()));
}

std::vector<HermitianOperator> tangent_basis_fixed_spectrum(const DensityOperator& rho, const Spectrum& s) {
  const int n = rho.dim();
  if (n != s.n()) throw DimensionError("tangent_basis_fixed_spectrum: dimension mismatch");
  const RVector ev = rho.op().eigenvalues();  // ascending
  for (int i = 0; i < n; ++i) {
    if (std::abs(ev[n - 1 - i] - s.values()[static_cast<std::size_t>(i)]) > 1e-8) {
      throw DomainError("tangent_basis_fixed_spectrum: state is not on the orbit of the spectrum");
    }
  }
  const std::vector<HermitianOperator> basis = hermitian_basis(n);
  RMatrix cols(static_cast<Eigen::Index>(n) * n, static_cast<Eigen::Index>(basis.size()) - 1);
  for (std::size_t a = 1; a < basis.size(); ++a) {
    cols.col(static_cast<Eigen::Index>(a) - 1) =
        HermitianOperator(commutator_i(basis[a].matrix(), rho.matrix())).real_coords();
  }
  return ops_from_columns(range_with_coeffs(cols, 1e-9).frame, n);
}

DensityOperator bob_state(const BobOrbitSpec& spec, const CMatrix& u) {
  if (u.rows() != spec.dB() || u.cols() != spec.dB()) throw DimensionError("bob_state: unitary has wrong size");
  const int dA = spec.dA();
  const int dB = spec.dB();
  CMatrix c(dA, dB);
  for (int i = 0; i < dA; ++i) {
    for (int j = 0; j < dB; ++j) c(i, j) = spec.alpha().vector()[i * dB + j];
  }
  const CMatrix b = c * u.transpose();
  CVector beta(static_cast<Eigen::Index>(dA) * dB);
  for (int i = 0; i < dA; ++i) {
    for (int j = 0; j < dB; ++j) beta[i * dB + j] = b(i, j);
  }
  return DensityOperator::pure(beta);
}

double lemtr_lhs(const BobOrbitSpec& spec, const HermitianOperator& o, const HermitianOperator& s,
                 const CMatrix& u) {
  if (o.dim() != spec.dA() || s.dim() != spec.dB()) throw DimensionError("lemtr_lhs: dimension mismatch");
  const CMatrix op = kron(o.matrix(), u * s.matrix() * u.adjoint());
  const CVector& a = spec.alpha().vector();
  return (a.adjoint() * op * a)(0, 0).real();
}

double lemtr_rhs(const BobOrbitSpec& spec, const HermitianOperator& o, const HermitianOperator& s,
                 const CMatrix& u) {
  if (o.dim() != spec.dA() || s.dim() != spec.dB()) throw DimensionError("lemtr_rhs: dimension mismatch");
  const CMatrix pu = spec.p_alpha() * u;
  return (pu.adjoint() * spec.transpose_a(o.matrix()) * pu * s.matrix()).trace().real();
}

std::vector<HermitianOperator> bob_tangent_basis(const BobOrbitSpec& spec, const CMatrix& u) {
  const UnitaryOrbit orbit = UnitaryOrbit::bob(spec);
  return ops_from_columns(orbit.tangent(u).frame, orbit.hilbert_dim());
}

std::vector<HermitianOperator> commutant(const SymmetryGroup& g) {
  const int n = g.n;
  const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;
  if (g.generators.empty()) return hermitian_basis(n);
  RMatrix stacked(n2 * static_cast<Eigen::Index>(g.generators.size()), n2);
  for (std::size_t k = 0; k < g.generators.size(); ++k) {
    const CMatrix& u = g.generators[k];
    for (Eigen::Index a = 0; a < n2; ++a) {
      const HermitianOperator b = HermitianOperator::from_real_coords(RVector::Unit(n2, a), n);
      const HermitianOperator img(CMatrix(u * b.matrix() * u.adjoint() - b.matrix()));
      stacked.block(static_cast<Eigen::Index>(k) * n2, a, n2, 1) = img.real_coords();
    }
  }
  return ops_from_columns(null_space(stacked, 1e-9), n);
}

Povm invariant_state_povm(const SymmetryGroup& g) {
  return system_to_povm(OperatorSystem::from_span(g.n, commutant(g)));
}

std::vector<SpectrumComponent> enumerate_components(const std::vector<BlockType>& blocks, const Spectrum& s) {
  int total = 0;
  for (const auto& b : blocks) {
    if (b.size < 1 || b.copies < 1) throw DomainError("enumerate_components: block sizes must be positive");
    total += b.size * b.copies;
  }
  if (total != s.n()) throw DimensionError("enumerate_components: blocks do not fill the spectrum dimension");

  std::vector<double> distinct;
  std::vector<int> remaining;
  {
    std::size_t pos = 0;
    for (int m : s.multiplicities()) {
      distinct.push_back(s.values()[pos]);
      remaining.push_back(m);
      pos += static_cast<std::size_t>(m);
    }
  }
  const std::size_t nv = distinct.size();
  std::vector<SpectrumComponent> out;
  // counts[b][v]: how many times value v appears in block b's multiset.
  std::vector<std::vector<int>> counts(blocks.size(), std::vector<int>(nv, 0));

  std::function<void(std::size_t, std::size_t, int)> rec = [&](std::size_t b, std::size_t v, int left) {
    if (b == blocks.size()) {
      for (int r : remaining) {
        if (r != 0) return;
      }
      SpectrumComponent comp;
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        std::vector<double> ms;
        for (std::size_t w = 0; w < nv; ++w) ms.insert(ms.end(), static_cast<std::size_t>(counts[i][w]), distinct[w]);
        comp.push_back(std::move(ms));
      }
      out.push_back(std::move(comp));
      return;
    }
    if (v == nv) {
      if (left == 0) rec(b + 1, 0, b + 1 < blocks.size() ? blocks[b + 1].size : 0);
      return;
    }
    const int c = blocks[b].copies;
    const int max_x = std::min(left, remaining[v] / c);
    for (int x = max_x; x >= 0; --x) {
      counts[b][v] = x;
      remaining[v] -= x * c;
      rec(b, v + 1, left - x);
      remaining[v] += x * c;
    }
    counts[b][v] = 0;
  };
  if (!blocks.empty()) rec(0, 0, blocks[0].size);
  return out;
}

std::vector<FlagPartition> component_partitions(const SpectrumComponent& c) {
  std::vector<FlagPartition> out;
  for (const auto& ms : c) {
    std::vector<double> sorted = ms;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::vector<int> runs = group_runs(sorted);
    out.emplace_back(std::vector<Int>(runs.begin(), runs.end()));
  }
  return out;
}

CMatrix tensor_power_matrix(const CMatrix& m, int k) {
  if (k < 1) throw DomainError("tensor_power: k must be positive");
  double total = 1.0;
  for (int i = 0; i < k; ++i) total *= static_cast<double>(m.rows());
  if (total > kMaxTensorDim) throw DomainError("tensor_power: dimension^k exceeds the size cap");
  CMatrix out = m;
  for (int i = 1; i < k; ++i) out = kron(out, m);
  return out;
}

DensityOperator tensor_power(const DensityOperator& rho, int k) {
  return DensityOperator(tensor_power_matrix(rho.matrix(), k));
}

CMatrix kcopy_differential(const CMatrix& rho, const CMatrix& v, int k) {
  if (rho.rows() != v.rows() || rho.cols() != v.cols()) throw DimensionError("kcopy_differential: shape mismatch");
  if (k < 1) throw DomainError("kcopy_differential: k must be positive");
  CMatrix total;
  for (int i = 1; i <= k; ++i) {
    CMatrix term = i > 1 ? kron(tensor_power_matrix(rho, i - 1), v) : v;
    if (k > i) term = kron(term, tensor_power_matrix(rho, k - i));
    total = i == 1 ? term : CMatrix(total + term);
  }
  return total;
}

double kcopy_poly_eval(const std::vector<SymTensorTerm>& eta, const RVector& x, int n) {
  const std::vector<HermitianOperator> basis = hermitian_basis(n);
  if (x.size() != static_cast<Eigen::Index>(basis.size())) throw DimensionError("kcopy_poly_eval: x has wrong length");
  if (eta.empty()) return 0.0;
  const std::size_t k = eta.front().indices.size();
  if (k == 0) throw DomainError("kcopy_poly_eval: empty index tuple");
  CMatrix xm = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < basis.size(); ++i) xm += x[static_cast<Eigen::Index>(i)] * basis[i].matrix();
  const CMatrix xk = tensor_power_matrix(xm, static_cast<int>(k));

  CMatrix eta_m = CMatrix::Zero(xk.rows(), xk.cols());
  for (const auto& t : eta) {
    if (t.indices.size() != k) throw DomainError("kcopy_poly_eval: terms of different degree");
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    CMatrix sym = CMatrix::Zero(xk.rows(), xk.cols());
    int count = 0;
    do {
      CMatrix prod;
      for (std::size_t j = 0; j < k; ++j) {
        const int idx = t.indices[static_cast<std::size_t>(perm[j])];
        if (idx < 0 || idx >= static_cast<int>(basis.size())) throw DomainError("kcopy_poly_eval: index out of range");
        prod = j == 0 ? basis[static_cast<std::size_t>(idx)].matrix() : kron(prod, basis[static_cast<std::size_t>(idx)].matrix());
      }
      sym += prod;
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    eta_m += (t.coeff / count) * sym;
  }
  return (eta_m * xk).trace().real();
}

}  // namespace qtopo
