#include "qtopo/constructions.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qtopo/errors.h"
#include "qtopo/parallel.h"
#include "qtopo/seeds.h"

namespace qtopo {

namespace {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Sorted-by-magnitude eigen data of X = sum_a y_a B_a.
struct EigenData {
  RVector values;                   // by descending |value|
  std::vector<Eigen::Index> order;  // column index into vectors
  CMatrix vectors;
};

EigenData eigen_by_magnitude(const CMatrix& x) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(x);
  EigenData d;
  const RVector& ev = es.eigenvalues();
  d.order.resize(static_cast<std::size_t>(ev.size()));
  std::iota(d.order.begin(), d.order.end(), 0);
  std::stable_sort(d.order.begin(), d.order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return std::abs(ev[a]) > std::abs(ev[b]); });
  d.values.resize(ev.size());
  for (std::size_t i = 0; i < d.order.size(); ++i) d.values[static_cast<Eigen::Index>(i)] = ev[d.order[i]];
  d.vectors = es.eigenvectors();
  return d;
}

struct Objective {
  const std::vector<CMatrix>& basis;
  int n;
  int k;  // 2r; singular values with 0-based index >= k enter the objective

  CMatrix assemble(const RVector& y) const {
    CMatrix x = CMatrix::Zero(n, n);
    for (std::size_t a = 0; a < basis.size(); ++a) x += y[static_cast<Eigen::Index>(a)] * basis[a];
    return x;
  }

  // Returns f = sum_{j>=k} lambda_j^2 and sets sv = |lambda_k| and grad.
  double eval(const RVector& y, double& sv, RVector* grad) const {
    const EigenData d = eigen_by_magnitude(assemble(y));
    double f = 0.0;
    for (Eigen::Index j = k; j < d.values.size(); ++j) f += d.values[j] * d.values[j];
    sv = k < d.values.size() ? std::abs(d.values[k]) : 0.0;
    if (grad) {
      grad->setZero(static_cast<Eigen::Index>(basis.size()));
      for (Eigen::Index j = k; j < d.values.size(); ++j) {
        const CVector u = d.vectors.col(d.order[static_cast<std::size_t>(j)]);
        for (std::size_t a = 0; a < basis.size(); ++a) {
          (*grad)[static_cast<Eigen::Index>(a)] += 2.0 * d.values[j] * (u.adjoint() * basis[a] * u)(0, 0).real();
        }
      }
    }
    return f;
  }
};

struct RestartResult {
  double sv = std::numeric_limits<double>::infinity();
  RVector y;
};

RestartResult descend(const Objective& obj, RVector y, int max_iter) {
  RestartResult best;
  double sv = 0.0;
  RVector g;
  double f = obj.eval(y, sv, &g);
  best.sv = sv;
  best.y = y;
  double t = 1.0;
  for (int it = 0; it < max_iter; ++it) {
    g -= g.dot(y) * y;
    const double gn2 = g.squaredNorm();
    if (gn2 < 1e-32 || f < 1e-32) break;
    bool accepted = false;
    t = std::min(1.0, 4.0 * t);
    while (t > 1e-16) {
      RVector y2 = (y - t * g).normalized();
      double sv2 = 0.0;
      RVector g2;
      const double f2 = obj.eval(y2, sv2, &g2);
      if (sv2 < best.sv) {
        best.sv = sv2;
        best.y = y2;
      }
      if (f2 <= f - 1e-4 * t * gn2) {
        y = y2;
        f = f2;
        g = g2;
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  return best;
}

// Surface points of the cube [-1,1]^c with `side` points per edge, normalized.
double grid_minimum(const Objective& obj, int c) {
  int side = 2;
  while (std::pow(side + 1, c) < 2e5) ++side;
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(static_cast<std::size_t>(c), 0);
  RVector y(c);
  while (true) {
    bool on_surface = false;
    for (int a = 0; a < c; ++a) {
      y[a] = -1.0 + 2.0 * idx[static_cast<std::size_t>(a)] / (side - 1);
      if (idx[static_cast<std::size_t>(a)] == 0 || idx[static_cast<std::size_t>(a)] == side - 1) on_surface = true;
    }
    if (on_surface) {
      double sv = 0.0;
      obj.eval(y.normalized(), sv, nullptr);
      best = std::min(best, sv);
    }
    int a = 0;
    while (a < c && ++idx[static_cast<std::size_t>(a)] == side) idx[static_cast<std::size_t>(a++)] = 0;
    if (a == c) break;
  }
  return best;
}

std::string certification_text(const CertificationReport& rep) {
  std::ostringstream os;
  os << "passed=" << rep.passed << ";r=" << rep.r << ";complement_dim=" << rep.complement_dim
     << ";min_sv=" << fmt17(rep.min_singular_value) << ";threshold=" << fmt17(rep.threshold)
     << ";restarts=" << rep.restarts << ";grid=" << rep.grid_checked << ";grid_min=" << fmt17(rep.grid_min);
  for (Eigen::Index i = 0; i < rep.witness.size(); ++i) os << ";" << fmt17(rep.witness[i]);
  return os.str();
}

RMatrix orthonormal_cols(const RMatrix& m, double rel_cutoff) { return orthonormal_range(m, rel_cutoff); }

// Traceless Hermitian part of the antidiagonal Vandermonde subspace avoiding rank <= k.
RMatrix vandermonde_complement(int n, int k) {
  std::vector<HermitianOperator> gens;
  for (int d = 0; d <= 2 * n - 2; ++d) {
    const int i0 = std::max(0, d - n + 1);
    const int i1 = std::min(d, n - 1);
    const int len = i1 - i0 + 1;
    if (len <= k) continue;
    for (int p = 0; p < len - k; ++p) {
      CMatrix e = CMatrix::Zero(n, n);
      for (int b = 0; b < len; ++b) {
        const double node = b - (len - 1) / 2.0;
        e(i0 + b, d - i0 - b) = std::pow(node, p);
      }
      gens.emplace_back(CMatrix(0.5 * (e + e.adjoint())));
      const CMatrix ie = Complex(0.0, 1.0) * e;
      gens.emplace_back(CMatrix(0.5 * (ie + ie.adjoint())));
    }
  }
  if (gens.empty()) return RMatrix(static_cast<Eigen::Index>(n) * n, 0);
  const RMatrix herm = orthonormal_cols(coords_matrix(gens), 1e-10);
  const RVector e = identity_coords(n);
  return orthonormal_cols(herm - e * (e.transpose() * herm), 1e-10);
}

RMatrix random_complement(int n, int c, std::uint64_t seed) {
  const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  RMatrix g(n2, c);
  for (Eigen::Index j = 0; j < c; ++j) {
    for (Eigen::Index i = 0; i < n2; ++i) g(i, j) = normal(rng);
  }
  const RVector e = identity_coords(n);
  return orthonormal_cols(g - e * (e.transpose() * g), 1e-10);
}

OperatorSystem system_from_complement(int n, const RMatrix& complement) {
  if (complement.cols() == 0) return OperatorSystem::full(n);
  return OperatorSystem::from_coords(n, null_space(complement.transpose(), 1e-10));
}

bool all_distinct(const std::vector<double>& v, double tol) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (std::abs(v[i] - v[j]) <= tol) return false;
    }
  }
  return true;
}

}  // namespace

std::string mode_name(RankBoundedMode m) {
  return m == RankBoundedMode::kVandermonde ? "vandermonde" : "random-certified";
}

RankBoundedMode parse_mode(const std::string& name) {
  if (name == "vandermonde") return RankBoundedMode::kVandermonde;
  if (name == "random-certified" || name == "random") return RankBoundedMode::kRandomCertified;
  throw DomainError("unknown construction mode '" + name + "'");
}

CertificationReport certify_complement(const OperatorSystem& sigma, int r, const CertifyOptions& opts) {
  if (r < 0) throw DomainError("certify_complement: r must be nonnegative");
  CertificationReport rep;
  rep.r = r;
  const int n = sigma.n();
  const RMatrix comp = sigma.complement();
  rep.complement_dim = static_cast<int>(comp.cols());
  if (rep.complement_dim == 0) {
    rep.passed = true;
    rep.min_singular_value = std::numeric_limits<double>::infinity();
    rep.digest = fnv1a_hex(certification_text(rep));
    return rep;
  }
  std::vector<CMatrix> basis;
  for (Eigen::Index j = 0; j < comp.cols(); ++j) basis.push_back(HermitianOperator::from_real_coords(comp.col(j), n).matrix());
  const Objective obj{basis, n, 2 * r};
  const int c = rep.complement_dim;

  if (2 * r + 1 > n) {
    // Every element has rank <= n <= 2r.
    rep.passed = false;
    rep.min_singular_value = 0.0;
    rep.witness = comp.col(0);
    rep.digest = fnv1a_hex(certification_text(rep));
    return rep;
  }

  const int restarts = c == 1 ? 1 : std::max(1, opts.restarts);
  std::vector<RestartResult> results(static_cast<std::size_t>(restarts));
  parallel_for(results.size(), opts.threads, [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(opts.seed, i));
    std::normal_distribution<double> normal(0.0, 1.0);
    RVector y(c);
    for (int a = 0; a < c; ++a) y[a] = normal(rng);
    results[i] = descend(obj, y.normalized(), c == 1 ? 0 : opts.max_iterations);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (results[i].sv < results[best].sv) best = i;
  }
  rep.restarts = restarts;
  rep.min_singular_value = results[best].sv;
  rep.witness = comp * results[best].y;
  if (n <= 3 && c <= 4) {
    rep.grid_checked = true;
    rep.grid_min = grid_minimum(obj, c);
  }
  rep.passed = rep.min_singular_value > rep.threshold && (!rep.grid_checked || rep.grid_min > rep.threshold);
  rep.digest = fnv1a_hex(certification_text(rep));
  return rep;
}

int rank_bounded_dimension(int n, int r) {
  if (n < 1 || r < 0) throw DomainError("rank_bounded_dimension: invalid n or r");
  if (2 * r >= n) return n * n;
  return 4 * r * (n - r) + 1;
}

ConstructedSystem rank_bounded_system(const RankBoundedSystemSpec& spec) {
  if (spec.n < 2) throw DomainError("rank_bounded_system: n must be at least 2");
  if (spec.r < 1) throw DomainError("rank_bounded_system: r must be at least 1");
  const int n = spec.n;
  const int target = rank_bounded_dimension(n, spec.r);
  const int c = n * n - target;
  ConstructedSystem out;
  out.tag = "certified";
  if (c == 0) {
    out.system = OperatorSystem::full(n);
    out.certification = certify_complement(out.system, spec.r, spec.certify);
    out.attempts = 1;
    return out;
  }
  if (spec.mode == RankBoundedMode::kVandermonde) {
    RMatrix comp = vandermonde_complement(n, 2 * spec.r);
    if (comp.cols() < c) throw CertificationError("rank_bounded_system: Vandermonde complement is too small");
    comp = comp.leftCols(c).eval();
    out.system = system_from_complement(n, comp);
    out.certification = certify_complement(out.system, spec.r, spec.certify);
    out.attempts = 1;
    if (!out.certification.passed) throw CertificationError("rank_bounded_system: Vandermonde system failed certification");
    return out;
  }
  for (int attempt = 0; attempt < std::max(1, spec.max_attempts); ++attempt) {
    out.system = system_from_complement(n, random_complement(n, c, derive_seed(spec.seed, static_cast<std::uint64_t>(attempt))));
    CertifyOptions co = spec.certify;
    co.seed = derive_seed(spec.certify.seed ^ spec.seed, 1000 + static_cast<std::uint64_t>(attempt));
    out.certification = certify_complement(out.system, spec.r, co);
    out.attempts = attempt + 1;
    if (out.certification.passed) return out;
  }
  throw CertificationError("rank_bounded_system: no certified system within the attempt limit");
}

ConstructedSystem fixed_spectrum_system(const Spectrum& s, RankBoundedMode mode, std::uint64_t seed,
                                        const CertifyOptions& certify) {
  const int r = s.rank_parameter();
  if (r == 0) {
    ConstructedSystem out;
    out.system = OperatorSystem::trivial(s.n());
    out.certification.passed = true;
    out.certification.r = 0;
    out.certification.complement_dim = s.n() * s.n() - 1;
    out.certification.min_singular_value = std::numeric_limits<double>::infinity();
    out.certification.digest = fnv1a_hex("point-orbit;n=" + std::to_string(s.n()));
    out.tag = "certified";
    out.attempts = 0;
    return out;
  }
  RankBoundedSystemSpec spec;
  spec.n = s.n();
  spec.r = r;
  spec.mode = mode;
  spec.seed = seed;
  spec.certify = certify;
  return rank_bounded_system(spec);
}

std::vector<CVector> phase_retrieval_frame(int d, std::uint64_t seed) {
  if (d < 1) throw DomainError("phase_retrieval_frame: d must be positive");
  if (d == 1) return {};
  const int count = 4 * d - 4;
  for (std::uint64_t attempt = 0; attempt < 16; ++attempt) {
    std::mt19937_64 rng(derive_seed(seed, attempt));
    std::vector<CVector> frame;
    for (int b = 0; b < count; ++b) frame.push_back(gaussian_vector(d, rng).normalized());
    auto outcomes = [&](const CVector& x) {
      RVector q(count);
      for (int b = 0; b < count; ++b) q[b] = std::norm(frame[static_cast<std::size_t>(b)].dot(x));
      return q;
    };
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 400; ++t) {
      const CVector x = gaussian_vector(d, rng).normalized();
      const CVector y = t % 2 == 0 ? CVector(gaussian_vector(d, rng).normalized())
                                   : CVector((x + 1e-3 * gaussian_vector(d, rng)).normalized());
      const double dist = (x * x.adjoint() - y * y.adjoint()).norm();
      if (dist < 1e-8) continue;
      worst = std::min(worst, (outcomes(x) - outcomes(y)).norm() / dist);
    }
    if (worst > 1e-7) return frame;
  }
  throw CertificationError("phase_retrieval_frame: no injective frame found");
}

Up1System bob_up1_system(const BobOrbitSpec& spec, const Up1Options& opts) {
  const int r = spec.rank();
  const int dA = spec.dA();
  const int dB = spec.dB();
  const std::vector<double>& lambda = spec.lambda();
  Up1System s;
  s.weights.assign(static_cast<std::size_t>(r), 1.0);
  if (!all_distinct(lambda, 1e-9)) {
    if (!opts.allow_reweight) throw DomainError("bob_up1_system: repeated Schmidt coefficients and reweighting disabled");
    s.reweighted = true;
    for (int i = 0; i < r; ++i) s.weights[static_cast<std::size_t>(i)] = i + 1.0;
  }
  double norm = 0.0;
  for (int i = 0; i < r; ++i) norm += lambda[static_cast<std::size_t>(i)] * lambda[static_cast<std::size_t>(i)] * s.weights[static_cast<std::size_t>(i)];
  for (auto& w : s.weights) w /= norm;
  for (int i = 0; i < r; ++i) {
    s.effective_spectrum.push_back(lambda[static_cast<std::size_t>(i)] * lambda[static_cast<std::size_t>(i)] * s.weights[static_cast<std::size_t>(i)]);
  }
  if (!all_distinct(s.effective_spectrum, 1e-9)) throw DomainError("bob_up1_system: effective spectrum is degenerate");

  s.o_w = CMatrix::Zero(dA, dA);
  CVector u = CVector::Zero(dA);
  for (int i = 0; i < r; ++i) {
    s.o_w += s.weights[static_cast<std::size_t>(i)] * spec.e().col(i) * spec.e().col(i).adjoint();
    u += spec.e().col(i) / lambda[static_cast<std::size_t>(i)];
  }
  s.o_v_scale = u.norm();
  u /= s.o_v_scale;
  s.o_v = u * u.adjoint();

  std::vector<double> eff = s.effective_spectrum;
  eff.resize(static_cast<std::size_t>(dB), 0.0);
  const ConstructedSystem b_sys = fixed_spectrum_system(Spectrum(eff), opts.mode, derive_seed(opts.seed, 1), opts.certify);
  s.stage1_certification = b_sys.certification;
  s.stage1_full = b_sys.system.is_full();
  const std::vector<HermitianOperator> b_basis = b_sys.system.basis();
  s.stage1_b.assign(b_basis.begin() + 1, b_basis.end());
  s.frame = phase_retrieval_frame(dB, derive_seed(opts.seed, 2));

  for (const auto& f : s.stage1_b) s.operators.emplace_back(CMatrix(kron(s.o_w, f.matrix())));
  s.stage1_count = static_cast<int>(s.operators.size());
  for (const auto& v : s.frame) s.operators.emplace_back(CMatrix(kron(s.o_v, v * v.adjoint())));
  s.system = OperatorSystem::from_span(dA * dB, s.operators);
  s.actual_dimension = s.system.dimension() - 1;
  s.formula_dimension = upper_bob_up1(dB, r);
  return s;
}

OperatorSystem bob_up1_stage1_system(const Up1System& s, const BobOrbitSpec& spec) {
  const std::vector<HermitianOperator> ops(s.operators.begin(), s.operators.begin() + s.stage1_count);
  return OperatorSystem::from_span(spec.dA() * spec.dB(), ops);
}

RVector bob_up1_values(const Up1System& s, const BobOrbitSpec& spec, const CMatrix& u) {
  const DensityOperator rho = bob_state(spec, u);
  RVector v(static_cast<Eigen::Index>(s.operators.size()));
  for (std::size_t j = 0; j < s.operators.size(); ++j) v[static_cast<Eigen::Index>(j)] = hs_inner(s.operators[j], rho.op());
  return v;
}

Up1Reconstruction bob_up1_reconstruct(const Up1System& s, const BobOrbitSpec& spec, const RVector& values,
                                      std::uint64_t seed) {
  const int dB = spec.dB();
  const int r = spec.rank();
  if (!s.stage1_full || r != dB) {
    throw DomainError("bob_up1_reconstruct: needs full Schmidt rank and a full stage-one system");
  }
  if (values.size() != static_cast<Eigen::Index>(s.operators.size())) throw DimensionError("bob_up1_reconstruct: wrong number of values");

  // Stage one: the effective operator X = U diag(lambda_i^2 w_i) U^dagger, trace 1.
  CMatrix x = CMatrix::Identity(dB, dB) / static_cast<double>(dB);
  for (int a = 0; a < s.stage1_count; ++a) x += values[a] * s.stage1_b[static_cast<std::size_t>(a)].matrix();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(0.5 * (x + x.adjoint())));
  std::vector<int> by_value(static_cast<std::size_t>(r));
  std::iota(by_value.begin(), by_value.end(), 0);
  std::sort(by_value.begin(), by_value.end(),
            [&](int a, int b) { return s.effective_spectrum[static_cast<std::size_t>(a)] < s.effective_spectrum[static_cast<std::size_t>(b)]; });
  std::vector<CVector> xs(static_cast<std::size_t>(r));
  for (int pos = 0; pos < r; ++pos) xs[static_cast<std::size_t>(by_value[static_cast<std::size_t>(pos)])] = es.eigenvectors().col(pos);

  // Stage two: relative phases z_i from |<s_b| sum_i z_i x_i>|^2 / scale^2.
  const int nb = static_cast<int>(s.frame.size());
  CMatrix c(nb, r);
  for (int b = 0; b < nb; ++b) {
    for (int i = 0; i < r; ++i) c(b, i) = s.frame[static_cast<std::size_t>(b)].dot(xs[static_cast<std::size_t>(i)]);
  }
  const double scale2 = s.o_v_scale * s.o_v_scale;
  const RVector q = values.tail(nb);
  auto residual = [&](const RVector& theta, RMatrix* jac) {
    CVector z(r);
    z[0] = 1.0;
    for (int i = 1; i < r; ++i) z[i] = std::polar(1.0, theta[i - 1]);
    const CVector a = c * z;
    RVector res(nb);
    for (int b = 0; b < nb; ++b) res[b] = std::norm(a[b]) / scale2 - q[b];
    if (jac) {
      jac->resize(nb, r - 1);
      for (int b = 0; b < nb; ++b) {
        for (int i = 1; i < r; ++i) {
          (*jac)(b, i - 1) = 2.0 * (std::conj(a[b]) * Complex(0.0, 1.0) * z[i] * c(b, i)).real() / scale2;
        }
      }
    }
    return res;
  };

  Up1Reconstruction best;
  best.residual = std::numeric_limits<double>::infinity();
  RVector best_theta = RVector::Zero(r - 1);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  for (int start = 0; start < 64 && best.residual > 1e-13; ++start) {
    RVector theta(r - 1);
    for (int i = 0; i < r - 1; ++i) theta[i] = angle(rng);
    double mu = 1e-3;
    RMatrix jac;
    RVector res = residual(theta, &jac);
    for (int it = 0; it < 200 && r > 1; ++it) {
      const RMatrix jtj = jac.transpose() * jac;
      const RVector jtr = jac.transpose() * res;
      const RMatrix damped = jtj + mu * RMatrix(jtj.diagonal().asDiagonal()) + 1e-15 * RMatrix::Identity(r - 1, r - 1);
      const RVector step = damped.ldlt().solve(-jtr);
      RMatrix jac2;
      const RVector res2 = residual(theta + step, &jac2);
      if (res2.norm() < res.norm()) {
        theta += step;
        res = res2;
        jac = jac2;
        mu = std::max(mu / 3.0, 1e-12);
        if (step.norm() < 1e-15) break;
      } else {
        mu *= 4.0;
        if (mu > 1e12) break;
      }
    }
    if (res.norm() < best.residual) {
      best.residual = res.norm();
      best_theta = theta;
    }
  }
  CMatrix urec = CMatrix::Zero(dB, dB);
  for (int i = 0; i < r; ++i) {
    const Complex z = i == 0 ? Complex(1.0, 0.0) : std::polar(1.0, best_theta[i - 1]);
    urec += z * xs[static_cast<std::size_t>(i)] * spec.f().col(i).adjoint();
  }
  best.u = urec;
  return best;
}

}  // namespace qtopo
