#include "qtopo/opsys.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include "qtopo/errors.h"

namespace qtopo {

namespace {

double op_norm(const RMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<RMatrix> svd(m);
  return svd.singularValues()[0];
}

double op_norm(const HermitianOperator& h) {
  return h.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

Povm::Povm(std::vector<HermitianOperator> effects) : effects_(std::move(effects)) {
  if (effects_.empty()) throw DomainError("Povm: no effects");
  const int n = effects_.front().dim();
  CMatrix sum = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < effects_.size(); ++i) {
    if (effects_[i].dim() != n) throw DimensionError("Povm: effects of different dimension");
    const double lmin = effects_[i].eigenvalues()[0];
    if (lmin < -kPovmEigenTol) {
      std::ostringstream os;
      os << "Povm: effect " << i << " has negative eigenvalue " << lmin;
      throw DomainError(os.str());
    }
    sum += effects_[i].matrix();
  }
  const double sum_defect = (sum - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (sum_defect > kPovmSumTol) {
    std::ostringstream os;
    os << "Povm: effects sum to the identity only within " << sum_defect;
    throw DomainError(os.str());
  }
  const RMatrix c = coords();
  Eigen::SelfAdjointEigenSolver<RMatrix> gram(c * c.transpose(), Eigen::EigenvaluesOnly);
  if (gram.eigenvalues()[0] <= kPovmGramTol) {
    std::ostringstream os;
    os << "Povm: effects are linearly dependent (Gram eigenvalue " << gram.eigenvalues()[0] << ")";
    throw DomainError(os.str());
  }
}

RMatrix Povm::coords() const {
  const int n2 = n() * n();
  RMatrix c(size(), n2);
  for (int i = 0; i < size(); ++i) c.row(i) = effects_[static_cast<std::size_t>(i)].real_coords().transpose();
  return c;
}

RVector identity_coords(int n) {
  RVector e = RVector::Zero(static_cast<Eigen::Index>(n) * n);
  e.head(n).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  return e;
}

OperatorSystem OperatorSystem::from_coords(int n, const RMatrix& generator_coords) {
  if (n < 1) throw DomainError("OperatorSystem: n must be positive");
  const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;
  if (generator_coords.cols() > 0 && generator_coords.rows() != n2) {
    throw DimensionError("OperatorSystem: generator coordinates have wrong length");
  }
  const RVector e = identity_coords(n);
  RMatrix q(n2, 1);
  q.col(0) = e;
  if (generator_coords.cols() == 0) return OperatorSystem(n, q);

  const double scale = generator_coords.colwise().norm().maxCoeff();
  const RMatrix residual = generator_coords - e * (e.transpose() * generator_coords);
  Eigen::BDCSVD<RMatrix> svd(residual, Eigen::ComputeThinU);
  const RVector& s = svd.singularValues();
  const double thr = kSpanCutoff * std::max(scale, s.size() ? s[0] : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s[i] > thr) ++rank;
  }
  rank = std::min<Eigen::Index>(rank, n2 - 1);
  q.conservativeResize(n2, 1 + rank);
  q.rightCols(rank) = svd.matrixU().leftCols(rank);
  return OperatorSystem(n, q);
}

OperatorSystem OperatorSystem::from_span(int n, const std::vector<HermitianOperator>& generators) {
  for (const auto& g : generators) {
    if (g.dim() != n) throw DimensionError("OperatorSystem: generator dimension mismatch");
  }
  return from_coords(n, coords_matrix(generators));
}

OperatorSystem OperatorSystem::full(int n) {
  if (n < 1) throw DomainError("OperatorSystem: n must be positive");
  return OperatorSystem(n, coords_matrix(hermitian_basis(n)));
}

OperatorSystem OperatorSystem::trivial(int n) { return from_coords(n, RMatrix(0, 0)); }

std::vector<HermitianOperator> OperatorSystem::basis() const {
  std::vector<HermitianOperator> out;
  out.reserve(static_cast<std::size_t>(dimension()));
  for (Eigen::Index j = 0; j < q_.cols(); ++j) {
    out.push_back(HermitianOperator::from_real_coords(q_.col(j), n_));
  }
  return out;
}

RMatrix OperatorSystem::complement() const {
  const Eigen::Index n2 = q_.rows();
  const Eigen::Index d = q_.cols();
  if (d == n2) return RMatrix(n2, 0);
  Eigen::HouseholderQR<RMatrix> qr(q_);
  const RMatrix full = qr.householderQ() * RMatrix::Identity(n2, n2);
  return full.rightCols(n2 - d);
}

MeasurementRecord measure(const Povm& p, const DensityOperator& rho) {
  if (p.n() != rho.dim()) throw DimensionError("measure: dimension mismatch");
  MeasurementRecord rec;
  rec.outcomes.reserve(static_cast<std::size_t>(p.size()));
  for (const auto& e : p.effects()) rec.outcomes.push_back(hs_inner(e, rho.op()));
  return rec;
}

RVector measure_linear(const Povm& p, const HermitianOperator& a) {
  if (p.n() != a.dim()) throw DimensionError("measure_linear: dimension mismatch");
  RVector out(p.size());
  for (int i = 0; i < p.size(); ++i) out[i] = hs_inner(p[i], a);
  return out;
}

OperatorSystem povm_to_system(const Povm& p) {
  return OperatorSystem::from_span(p.n(), p.effects());
}

Povm system_to_povm(const OperatorSystem& sigma) {
  const int n = sigma.n();
  const int d = sigma.dimension();
  if (d < 1) throw DomainError("system_to_povm: empty system");
  if (d == 1) return Povm({HermitianOperator::identity(n)});

  const std::vector<HermitianOperator> basis = sigma.basis();
  HermitianOperator s = HermitianOperator::zero(n);
  for (int j = 1; j < d; ++j) s += basis[static_cast<std::size_t>(j)];
  const HermitianOperator s_over_d = s * (1.0 / d);

  // P_i = 1/d + c A_i with A_i = F_i - S/d for i < d and A_d = -S/d.
  std::vector<HermitianOperator> a;
  a.reserve(static_cast<std::size_t>(d));
  for (int j = 1; j < d; ++j) a.push_back(basis[static_cast<std::size_t>(j)] - s_over_d);
  a.push_back(s_over_d * -1.0);

  double c_max = std::numeric_limits<double>::infinity();
  for (const auto& ai : a) {
    const double lmin = ai.eigenvalues()[0];
    if (lmin < 0.0) c_max = std::min(c_max, (1.0 / d) / -lmin);
  }
  const double c = 0.5 * c_max;
  const HermitianOperator base = HermitianOperator::identity(n) * (1.0 / d);
  std::vector<HermitianOperator> effects;
  effects.reserve(a.size());
  for (const auto& ai : a) effects.push_back(base + ai * c);
  return Povm(std::move(effects));
}

HermitianOperator project(const OperatorSystem& sigma, const HermitianOperator& a) {
  if (sigma.n() != a.dim()) throw DimensionError("project: dimension mismatch");
  return HermitianOperator::from_real_coords(sigma.project_coords(a.real_coords()), a.dim());
}

double system_distance(const OperatorSystem& sigma, const OperatorSystem& tau) {
  if (sigma.n() != tau.n()) throw DimensionError("system_distance: dimension mismatch");
  const RMatrix& q1 = sigma.coords();
  const RMatrix& q2 = tau.coords();
  const RMatrix diff = q1 * q1.transpose() - q2 * q2.transpose();
  Eigen::SelfAdjointEigenSolver<RMatrix> es(diff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double max_principal_angle(const OperatorSystem& sigma, const OperatorSystem& tau) {
  if (sigma.n() != tau.n()) throw DimensionError("max_principal_angle: dimension mismatch");
  if (sigma.dimension() != tau.dimension()) return std::acos(0.0);
  const RMatrix& q1 = sigma.coords();
  const RMatrix& q2 = tau.coords();
  const RMatrix resid = q2 - q1 * (q1.transpose() * q2);
  return std::asin(std::min(1.0, op_norm(resid)));
}

RMatrix random_rotation_generator(int n, std::uint64_t seed) {
  const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RMatrix a(n2, n2);
  for (Eigen::Index j = 0; j < n2; ++j) {
    for (Eigen::Index i = 0; i < n2; ++i) a(i, j) = normal(rng);
  }
  const RVector e = identity_coords(n);
  const RMatrix p = RMatrix::Identity(n2, n2) - e * e.transpose();
  RMatrix g = p * (a - a.transpose()) * p;
  const double nrm = op_norm(g);
  if (nrm > 0.0) g /= nrm;
  return g;
}

RMatrix rotation_matrix(const RMatrix& generator, double t) {
  if (generator.rows() != generator.cols()) throw DimensionError("rotation_matrix: generator not square");
  const double asym = (generator + generator.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, generator.cwiseAbs().maxCoeff())) {
    throw DomainError("rotation_matrix: generator is not antisymmetric");
  }
  const RMatrix scaled = generator * t;
  return scaled.exp();
}

RMatrix plane_rotation(const RVector& u, const RVector& v) {
  const Eigen::Index dim = u.size();
  if (v.size() != dim) throw DimensionError("plane_rotation: dimension mismatch");
  const RVector un = u.normalized();
  const RVector vn = v.normalized();
  const double c = std::clamp(un.dot(vn), -1.0, 1.0);
  RVector w = vn - c * un;
  const double s = w.norm();
  RMatrix r = RMatrix::Identity(dim, dim);
  if (s < 1e-15) return r;
  w /= s;
  r += (c - 1.0) * (un * un.transpose() + w * w.transpose()) + s * (w * un.transpose() - un * w.transpose());
  return r;
}

OperatorSystem apply_rotation(const OperatorSystem& sigma, const RMatrix& rotation) {
  const Eigen::Index n2 = sigma.coords().rows();
  if (rotation.rows() != n2 || rotation.cols() != n2) {
    throw DimensionError("apply_rotation: rotation has wrong size");
  }
  const RVector e = identity_coords(sigma.n());
  if ((rotation * e - e).norm() > 1e-10) {
    throw DomainError("apply_rotation: rotation does not fix the identity");
  }
  const RMatrix rotated = rotation * sigma.coords();
  return OperatorSystem::from_coords(sigma.n(), rotated.rightCols(rotated.cols() - 1));
}

OperatorSystem rotate_system(const OperatorSystem& sigma, const RMatrix& generator, double t) {
  const Eigen::Index n2 = sigma.coords().rows();
  if (generator.rows() != n2 || generator.cols() != n2) {
    throw DimensionError("rotate_system: generator has wrong size");
  }
  const RVector e = identity_coords(sigma.n());
  if ((generator * e).norm() > 1e-10 * std::max(1.0, generator.cwiseAbs().maxCoeff())) {
    throw DomainError("rotate_system: generator does not fix the identity");
  }
  if (t == 0.0) return sigma;
  return apply_rotation(sigma, rotation_matrix(generator, t));
}

double povm_deviation(const Povm& p, const Povm& q) {
  if (p.size() != q.size() || p.n() != q.n()) throw DimensionError("povm_deviation: shape mismatch");
  return op_norm(RMatrix(p.coords() - q.coords()));
}

Povm perturb_povm(const Povm& p, double eps, std::uint64_t seed) {
  if (eps < 0.0) throw DomainError("perturb_povm: eps must be nonnegative");
  if (eps == 0.0) return p;
  const int n = p.n();
  const int m = p.size();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const HermitianOperator id = HermitianOperator::identity(n);

  // Smoothing P_i -> a (P_i + eta/(m sqrt n) 1), a = sqrt n / (sqrt n + eta), keeps the sum at 1.
  auto smooth = [&](double eta) {
    const double a = sqrt_n / (sqrt_n + eta);
    std::vector<HermitianOperator> out;
    out.reserve(static_cast<std::size_t>(m));
    for (const auto& e : p.effects()) out.push_back((e + id * (eta / (m * sqrt_n))) * a);
    return out;
  };
  auto deviation = [&](const std::vector<HermitianOperator>& qs) {
    RMatrix d(m, static_cast<Eigen::Index>(n) * n);
    for (int i = 0; i < m; ++i) d.row(i) = (p[i] - qs[static_cast<std::size_t>(i)]).real_coords().transpose();
    return op_norm(d);
  };

  double eta = eps;
  std::vector<HermitianOperator> qs = smooth(eta);
  for (int it = 0; it < 80 && deviation(qs) > 0.5 * eps; ++it) {
    eta *= 0.5;
    qs = smooth(eta);
  }
  if (deviation(qs) > 0.5 * eps) throw DomainError("perturb_povm: smoothing cannot meet the requested eps");

  if (m > 1) {
    std::mt19937_64 rng(seed);
    std::vector<HermitianOperator> h;
    HermitianOperator mean = HermitianOperator::zero(n);
    for (int i = 0; i < m; ++i) {
      h.push_back(random_hermitian(n, rng));
      mean += h.back();
    }
    mean = mean * (1.0 / m);
    RMatrix dc(m, static_cast<Eigen::Index>(n) * n);
    double scale = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      auto& hi = h[static_cast<std::size_t>(i)];
      hi = hi - mean;
      dc.row(i) = hi.real_coords().transpose();
      const double margin = qs[static_cast<std::size_t>(i)].eigenvalues()[0];
      const double hn = op_norm(hi);
      if (hn > 0.0) scale = std::min(scale, 0.5 * margin / hn);
    }
    const double dn = op_norm(dc);
    if (dn > 0.0) scale = std::min(scale, 0.5 * eps / dn);
    if (!std::isfinite(scale) || scale < 0.0) scale = 0.0;
    for (int i = 0; i < m; ++i) {
      qs[static_cast<std::size_t>(i)] += h[static_cast<std::size_t>(i)] * scale;
    }
  }
  try {
    return Povm(std::move(qs));
  } catch (const DomainError& e) {
    throw DomainError(std::string("perturb_povm: positivity unrecoverable: ") + e.what());
  }
}

}  // namespace qtopo
