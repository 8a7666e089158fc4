#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "qtopo/constructions.h"
#include "qtopo/errors.h"
#include "qtopo/seeds.h"

namespace qtopo {

namespace {

constexpr double kLeadingRelTol = 1e-9;
constexpr int kMaxRefinementSteps = 30;

void check_m(const Up2Measurement& meas, const CVector& m) {
  if (m.size() != static_cast<Eigen::Index>(meas.n) * meas.r) throw DimensionError("up2: M vector has wrong length");
}

// Real Jacobian of (Re G, Im G) with respect to (Re M, Im M).
RMatrix g_jacobian(const Up2Measurement& meas, const CVector& m) {
  const Eigen::Index nm = m.size();
  const int ng = meas.num_g();
  RMatrix j = RMatrix::Zero(2 * ng, 2 * nm);
  const Complex i1(0.0, 1.0);
  for (int k = 0; k < ng; ++k) {
    for (const auto& [a1, b1] : meas.pairs[static_cast<std::size_t>(k)]) {
      const Eigen::Index a = a1 - 1;
      const Eigen::Index b = b1 - 1;
      const Complex d_xa = std::conj(m[b]);
      const Complex d_ya = i1 * std::conj(m[b]);
      const Complex d_xb = m[a];
      const Complex d_yb = -i1 * m[a];
      j(k, a) += d_xa.real();
      j(ng + k, a) += d_xa.imag();
      j(k, nm + a) += d_ya.real();
      j(ng + k, nm + a) += d_ya.imag();
      j(k, b) += d_xb.real();
      j(ng + k, b) += d_xb.imag();
      j(k, nm + b) += d_yb.real();
      j(ng + k, nm + b) += d_yb.imag();
    }
  }
  return j;
}

RVector stack(const CVector& g) {
  RVector v(2 * g.size());
  v << g.real(), g.imag();
  return v;
}

}  // namespace

int Up2Measurement::outcome_length() const {
  int len = 0;
  for (std::size_t k = 0; k < pairs.size(); ++k) len += real_only[k] ? 1 : 2;
  return len;
}

Up2Measurement bob_up2_build(const BobOrbitSpec& spec) {
  Up2Measurement meas{spec, spec.dB(), spec.rank(), {}, {}};
  const int n = meas.n;
  const int nr = n * meas.r;
  for (int k = 1; k <= nr + n - 1; ++k) {
    std::vector<std::pair<int, int>> pk;
    for (int a = 1; a <= std::min(n, (k + 1) / 2); ++a) {
      const int b = k + 1 - a;
      if (b <= nr) pk.emplace_back(a, b);
    }
    meas.real_only.push_back(pk.size() == 1 && pk.front().first == pk.front().second);
    meas.pairs.push_back(std::move(pk));
  }
  return meas;
}

CVector up2_m_vector(const Up2Measurement& meas, const CMatrix& u) {
  if (u.rows() != meas.n || u.cols() != meas.n) throw DimensionError("up2_m_vector: U must be dB x dB");
  const CMatrix& f = meas.spec.f_full();
  const CMatrix uf = f.adjoint() * u * f;
  CVector m(static_cast<Eigen::Index>(meas.n) * meas.r);
  for (int i = 0; i < meas.r; ++i) {
    for (int j = 0; j < meas.n; ++j) m[i * meas.n + j] = uf(i, j);
  }
  return m;
}

CVector up2_g_values(const Up2Measurement& meas, const CVector& m) {
  check_m(meas, m);
  CVector g = CVector::Zero(meas.num_g());
  for (int k = 0; k < meas.num_g(); ++k) {
    for (const auto& [a, b] : meas.pairs[static_cast<std::size_t>(k)]) g[k] += m[a - 1] * std::conj(m[b - 1]);
  }
  return g;
}

RVector up2_outcomes_from_g(const Up2Measurement& meas, const CVector& g) {
  if (g.size() != meas.num_g()) throw DimensionError("up2_outcomes_from_g: wrong number of G values");
  RVector out(meas.outcome_length());
  Eigen::Index pos = 0;
  for (int k = 0; k < meas.num_g(); ++k) out[pos++] = g[k].real();
  for (int k = 0; k < meas.num_g(); ++k) {
    if (!meas.real_only[static_cast<std::size_t>(k)]) out[pos++] = g[k].imag();
  }
  return out;
}

CVector up2_g_from_outcomes(const Up2Measurement& meas, const RVector& outcomes) {
  if (outcomes.size() != meas.outcome_length()) throw DimensionError("up2_g_from_outcomes: wrong outcome length");
  CVector g(meas.num_g());
  Eigen::Index pos = 0;
  for (int k = 0; k < meas.num_g(); ++k) g[k] = Complex(outcomes[pos++], 0.0);
  for (int k = 0; k < meas.num_g(); ++k) {
    if (!meas.real_only[static_cast<std::size_t>(k)]) g[k] = Complex(g[k].real(), outcomes[pos++]);
  }
  return g;
}

RVector bob_up2_values(const Up2Measurement& meas, const CMatrix& u) {
  return up2_outcomes_from_g(meas, up2_g_values(meas, up2_m_vector(meas, u)));
}

std::vector<HermitianOperator> bob_up2_operators(const Up2Measurement& meas) {
  const BobOrbitSpec& spec = meas.spec;
  const int n = meas.n;
  const int dim = spec.dA() * n;
  auto basis_vec = [&](int a1) {
    const int i = (a1 - 1) / n;
    const int j = (a1 - 1) % n;
    return CVector(kron(spec.e().col(i), spec.f_full().col(j)));
  };
  std::vector<CMatrix> a_ops;
  for (int k = 0; k < meas.num_g(); ++k) {
    CMatrix a = CMatrix::Zero(dim, dim);
    for (const auto& [a1, b1] : meas.pairs[static_cast<std::size_t>(k)]) {
      const double scale = spec.lambda()[static_cast<std::size_t>((a1 - 1) / n)] * spec.lambda()[static_cast<std::size_t>((b1 - 1) / n)];
      a += basis_vec(a1) * basis_vec(b1).adjoint() / scale;
    }
    a_ops.push_back(a);
  }
  std::vector<HermitianOperator> ops;
  for (const auto& a : a_ops) ops.emplace_back(CMatrix(0.5 * (a + a.adjoint())));
  for (std::size_t k = 0; k < a_ops.size(); ++k) {
    if (meas.real_only[k]) continue;
    const CMatrix& a = a_ops[k];
    ops.emplace_back(CMatrix((a - a.adjoint()) / Complex(0.0, 2.0)));
  }
  return ops;
}

OperatorSystem bob_up2_system(const Up2Measurement& meas) {
  return OperatorSystem::from_span(meas.spec.dA() * meas.n, bob_up2_operators(meas));
}

Up2Reconstruction bob_up2_reconstruct(const Up2Measurement& meas, const RVector& outcomes) {
  const CVector g = up2_g_from_outcomes(meas, outcomes);
  const int n = meas.n;
  const int nr = n * meas.r;
  const double gmax = g.cwiseAbs().maxCoeff();
  if (!(gmax > 0.0)) throw DomainError("bob_up2_reconstruct: all outcomes vanish");
  const double tau = kLeadingRelTol * gmax;

  int lead = 0;
  for (int a = 1; a <= n; ++a) {
    if (std::abs(g[2 * a - 2]) > tau) {
      lead = a;
      break;
    }
  }
  if (lead == 0) throw DomainError("bob_up2_reconstruct: no leading entry found");

  Up2Reconstruction rec;
  rec.leading_index = lead;
  // First row by the recursion (at most n steps).
  CVector m = CVector::Zero(nr);
  m[lead - 1] = std::sqrt(std::max(0.0, g[2 * lead - 2].real()));
  for (int l = lead; l <= n - 1; ++l) {
    const int k = lead + l;
    Complex acc = g[k - 1];
    for (int a = lead + 1; a <= std::min(n, (k + 1) / 2); ++a) acc -= m[a - 1] * std::conj(m[k - a]);
    m[l] = std::conj(acc / m[lead - 1]);
  }
  // Remaining rows: with the first row fixed, G_k for k > n is linear in
  // conj(M_b), b > n, and the full convolution system is overdetermined.
  if (nr > n) {
    const int rows = meas.num_g() - n;
    CMatrix a_mat = CMatrix::Zero(rows, nr - n);
    CVector rhs(rows);
    for (int k = n + 1; k <= meas.num_g(); ++k) {
      Complex known = g[k - 1];
      for (const auto& [a1, b1] : meas.pairs[static_cast<std::size_t>(k - 1)]) {
        if (b1 > n) {
          a_mat(k - n - 1, b1 - n - 1) += m[a1 - 1];
        } else {
          known -= m[a1 - 1] * std::conj(m[b1 - 1]);
        }
      }
      rhs[k - n - 1] = known;
    }
    const CVector tail = a_mat.colPivHouseholderQr().solve(rhs);
    for (int b = n; b < nr; ++b) m[b] = std::conj(tail[b - n]);
  }

  const RVector target = stack(g);
  for (int step = 0; step < kMaxRefinementSteps; ++step) {
    const RVector res = stack(up2_g_values(meas, m)) - target;
    const RMatrix jac = g_jacobian(meas, m);
    Eigen::CompleteOrthogonalDecomposition<RMatrix> cod(jac);
    cod.setThreshold(1e-12);
    const RVector delta = cod.solve(-res);
    CVector m2 = m;
    for (int a = 0; a < nr; ++a) m2[a] += Complex(delta[a], delta[nr + a]);
    const double r_old = res.norm();
    const double r_new = (stack(up2_g_values(meas, m2)) - target).norm();
    if (!(r_new < r_old)) break;
    m = m2;
    rec.refinement_steps = step + 1;
    if (delta.norm() < 1e-15) break;
  }
  rec.m = m;
  rec.residual = (up2_g_values(meas, m) - g).norm();
  return rec;
}

double phase_aligned_error(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw DimensionError("phase_aligned_error: size mismatch");
  const Complex ip = b.dot(a);
  const Complex phase = std::abs(ip) > 0.0 ? ip / std::abs(ip) : Complex(1.0, 0.0);
  return (a - phase * b).norm();
}

CMatrix planted_zero_unitary(const BobOrbitSpec& spec, int zeros, std::uint64_t seed) {
  const int n = spec.dB();
  if (zeros < 0 || zeros >= n) throw DomainError("planted_zero_unitary: zeros must be in [0, dB)");
  Rng rng(seed);
  CVector u = gaussian_vector(n, rng);
  u.head(zeros).setZero();
  u.normalize();
  CMatrix start = ginibre(n, n, rng);
  start.col(0) = u.conjugate();
  Eigen::HouseholderQR<CMatrix> qr(start);
  CMatrix v = qr.householderQ() * CMatrix::Identity(n, n);
  const Complex ph = v.col(0).dot(u.conjugate());
  v.col(0) *= ph / std::abs(ph);
  const CMatrix uf = v.adjoint();
  return spec.f_full() * uf * spec.f_full().adjoint();
}

CMatrix up2_unitary_from_m(const Up2Measurement& meas, const CVector& m) {
  check_m(meas, m);
  if (meas.r != meas.n) throw DomainError("up2_unitary_from_m: needs full Schmidt rank");
  CMatrix uf(meas.n, meas.n);
  for (int i = 0; i < meas.n; ++i) {
    for (int j = 0; j < meas.n; ++j) uf(i, j) = m[i * meas.n + j];
  }
  return meas.spec.f_full() * uf * meas.spec.f_full().adjoint();
}

}  // namespace qtopo
