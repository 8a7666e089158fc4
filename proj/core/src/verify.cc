#include "qtopo/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>
#include <json.hpp>

#include "qtopo/errors.h"
#include "qtopo/parallel.h"
#include "qtopo/seeds.h"

namespace qtopo {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ||pi_sigma(x)|| / ||x|| for real coordinates x; negative when x is too short.
double ratio(const OperatorSystem& sigma, const RVector& x) {
  const double nx = x.norm();
  if (nx < kPairSkipDistance) return -1.0;
  return sigma.reduce(x).norm() / nx;
}

struct PointGeometry {
  double sv = 1.0;         // smallest singular value of pi on the tangent space
  double steepness = 0.0;  // ||(1 - pi) T||_op
  RVector worst;           // unit tangent coordinates (frame basis) of the worst direction
};

PointGeometry point_geometry(const OperatorSystem& sigma, const TangentFrame& tf) {
  PointGeometry g;
  if (tf.frame.cols() == 0) return g;
  const RMatrix p = sigma.coords().transpose() * tf.frame;
  Eigen::JacobiSVD<RMatrix> svd(p, Eigen::ComputeFullV);
  const Eigen::Index k = tf.frame.cols();
  const RVector& s = svd.singularValues();
  g.sv = s.size() < k ? 0.0 : s[k - 1];
  g.worst = svd.matrixV().col(k - 1);
  const RMatrix perp = tf.frame - sigma.coords() * p;
  g.steepness = Eigen::JacobiSVD<RMatrix>(perp).singularValues()[0];
  return g;
}

HermitianOperator combine(const std::vector<HermitianOperator>& gens, const RVector& c, int n) {
  HermitianOperator g = HermitianOperator::zero(n);
  for (std::size_t j = 0; j < gens.size(); ++j) g += gens[j] * c[static_cast<Eigen::Index>(j)];
  return g;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

nlohmann::ordered_json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

PairSampler orbit_pair_sampler(const UnitaryOrbit& orbit, double local_scale) {
  return [orbit, local_scale](std::size_t index, Rng& rng) {
    const CMatrix u = orbit.sample(rng);
    if (index % 2 == 0) return StatePair{orbit.state(u), orbit.state(orbit.sample(rng))};
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double s = local_scale * std::pow(10.0, -2.0 * unif(rng));
    return StatePair{orbit.state(u), orbit.state(orbit.nearby(u, s, rng))};
  };
}

PairSampler rank_bounded_pair_sampler(int n, int r, double local_scale) {
  if (n < 1 || r < 1 || r > n) throw DomainError("rank_bounded_pair_sampler: need 1 <= r <= n");
  return [n, r, local_scale](std::size_t index, Rng& rng) {
    auto state = [](const CMatrix& g) {
      const CMatrix m = g * g.adjoint();
      return HermitianOperator(CMatrix(m / m.trace().real()));
    };
    const CMatrix g = ginibre(n, r, rng);
    if (index % 2 == 0) return StatePair{state(g), state(ginibre(n, r, rng))};
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double s = local_scale * std::pow(10.0, -2.0 * unif(rng)) * g.norm();
    const CMatrix d = ginibre(n, r, rng);
    return StatePair{state(g), state(CMatrix(g + s * d / d.norm()))};
  };
}

VerificationReport check_injectivity(const OperatorSystem& sigma, const PairSampler& sampler, int pairs,
                                     const VerifyOptions& opts, double threshold) {
  const auto t0 = Clock::now();
  VerificationReport rep;
  rep.check = "injectivity";
  rep.seed = opts.seed;
  rep.samples_requested = pairs;
  rep.threshold = threshold;
  std::vector<double> ratios(static_cast<std::size_t>(std::max(0, pairs)), -1.0);
  parallel_for(ratios.size(), opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(opts.seed, i));
    const StatePair p = sampler(i, rng);
    if (p.a.dim() != sigma.n() || p.b.dim() != sigma.n()) throw DimensionError("check_injectivity: state dimension mismatch");
    ratios[i] = ratio(sigma, (p.a - p.b).real_coords());
  });
  rep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] < 0.0) continue;
    ++rep.samples_used;
    if (ratios[i] < rep.min_ratio) {
      rep.min_ratio = ratios[i];
      rep.worst_index = static_cast<int>(i);
    }
  }
  if (rep.samples_used == 0) throw DomainError("check_injectivity: sampler produced no distinct pairs");
  rep.passed = rep.min_ratio > threshold;
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

VerificationReport check_immersion(const OperatorSystem& sigma, const UnitaryOrbit& orbit, int points,
                                   const VerifyOptions& opts, const std::vector<CMatrix>& anchors,
                                   double threshold) {
  const auto t0 = Clock::now();
  if (sigma.n() != orbit.hilbert_dim()) throw DimensionError("check_immersion: dimension mismatch");
  VerificationReport rep;
  rep.check = "immersion";
  rep.seed = opts.seed;
  rep.threshold = threshold;
  const std::size_t total = static_cast<std::size_t>(std::max(0, points)) + anchors.size();
  rep.samples_requested = static_cast<int>(total);
  std::vector<PointGeometry> geo(total);
  parallel_for(total, opts.threads, [&](std::size_t i) {
    CMatrix u;
    if (i < static_cast<std::size_t>(points)) {
      Rng rng(derive_seed(opts.seed, i));
      u = orbit.sample(rng);
    } else {
      u = anchors[i - static_cast<std::size_t>(points)];
    }
    geo[i] = point_geometry(sigma, orbit.tangent(u));
  });
  rep.min_tangent_sv = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < total; ++i) {
    ++rep.samples_used;
    if (geo[i].sv < rep.min_tangent_sv) {
      rep.min_tangent_sv = geo[i].sv;
      rep.worst_index = static_cast<int>(i);
    }
    rep.max_steepness = std::max(rep.max_steepness, geo[i].steepness);
  }
  rep.passed = total > 0 && rep.min_tangent_sv > threshold;
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

VerificationReport stability_probe(const OperatorSystem& sigma, const UnitaryOrbit& orbit, const StabilityOptions& so,
                                   const VerifyOptions& opts) {
  const auto t0 = Clock::now();
  if (!(so.delta > 0.0)) throw DomainError("stability_probe: delta must be positive");
  if (sigma.n() != orbit.hilbert_dim()) throw DimensionError("stability_probe: dimension mismatch");
  VerificationReport rep;
  rep.check = "stability";
  rep.seed = opts.seed;
  rep.threshold = so.threshold;
  rep.samples_requested = so.rotations;
  const int n = sigma.n();
  // ||1 - exp(tG)||_op = 2 sin(t/2) for unit-norm G.
  const double angle = 2.0 * std::asin(std::min(1.0, so.delta / 2.0));
  const PairSampler sampler = orbit_pair_sampler(orbit);

  std::vector<double> worst(static_cast<std::size_t>(std::max(0, so.rotations)), 1.0);
  for (std::size_t t = 0; t < worst.size(); ++t) {
    const RMatrix g = random_rotation_generator(n, derive_seed(opts.seed, 2 * t));
    const OperatorSystem rotated = rotate_system(sigma, g, angle);
    VerifyOptions inner = opts;
    inner.seed = derive_seed(opts.seed, 2 * t + 1);
    worst[t] = check_injectivity(rotated, sampler, so.pairs, inner, so.threshold).min_ratio;
  }
  rep.random_rotation_min_ratio = worst.empty() ? 1.0 : *std::min_element(worst.begin(), worst.end());
  rep.samples_used = static_cast<int>(worst.size());

  // Adversarial rotation: tilt sigma so that it becomes orthogonal to the
  // chord gamma(t) - gamma(0) along the least-visible tangent direction.
  const std::size_t npoints = static_cast<std::size_t>(std::max(0, so.points)) + so.anchors.size();
  struct Attempt {
    bool found = false;
    double ratio = 1.0;
    double angle = 0.0;
  };
  std::vector<Attempt> attempts(npoints);
  parallel_for(npoints, opts.threads, [&](std::size_t i) {
    CMatrix u;
    if (i < static_cast<std::size_t>(so.points)) {
      Rng rng(derive_seed(opts.seed ^ 0x5eedULL, i));
      u = orbit.sample(rng);
    } else {
      u = so.anchors[i - static_cast<std::size_t>(so.points)];
    }
    const TangentFrame tf = orbit.tangent(u);
    if (tf.frame.cols() == 0) return;
    const PointGeometry pg = point_geometry(sigma, tf);
    const HermitianOperator gen = combine(tf.generators, pg.worst, orbit.acting_dim());
    const RVector x0 = orbit.state(u).real_coords();
    for (double t = 1e-1; t > 1e-9; t *= 0.5) {
      const RVector chord = orbit.state(orbit.move(u, gen, t)).real_coords() - x0;
      if (chord.norm() < kPairSkipDistance) break;
      const RVector d = chord.normalized();
      const RVector d_perp = d - sigma.project_coords(d);
      if (d_perp.norm() < 1e-12) continue;
      const RVector v = d_perp.normalized();
      const double theta = std::acos(std::clamp(d.dot(v), -1.0, 1.0));
      if (theta <= angle) {
        const RMatrix rot = plane_rotation(d, v);
        const OperatorSystem tilted = apply_rotation(sigma, RMatrix(rot.transpose()));
        attempts[i] = {true, ratio(tilted, chord), theta};
        return;
      }
    }
  });
  for (const auto& a : attempts) {
    if (a.found && (!rep.adversarial_witness || a.ratio < rep.adversarial_ratio)) {
      rep.adversarial_witness = true;
      rep.adversarial_ratio = a.ratio;
      rep.adversarial_angle = a.angle;
    }
  }
  rep.min_ratio = rep.random_rotation_min_ratio;
  if (rep.adversarial_witness) rep.min_ratio = std::min(rep.min_ratio, rep.adversarial_ratio);
  rep.passed = rep.min_ratio > so.threshold;
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

VerificationReport separation_probe(const OperatorSystem& sigma, const UnitaryOrbit& orbit,
                                    const SeparationOptions& so, const VerifyOptions& opts) {
  const auto t0 = Clock::now();
  if (so.eps.empty()) throw DomainError("separation_probe: empty eps list");
  for (std::size_t i = 0; i < so.eps.size(); ++i) {
    if (!(so.eps[i] > 0.0) || (i > 0 && so.eps[i] > so.eps[i - 1])) {
      throw DomainError("separation_probe: eps values must be positive and descending");
    }
  }
  if (sigma.n() != orbit.hilbert_dim()) throw DimensionError("separation_probe: dimension mismatch");
  VerificationReport rep;
  rep.check = "separation";
  rep.seed = opts.seed;
  rep.eps = so.eps;
  const double ball = so.ball_factor * so.eps.front();
  rep.threshold = ball;
  const std::size_t npoints = static_cast<std::size_t>(std::max(0, so.pairs)) + so.anchors.size();
  rep.samples_requested = static_cast<int>(npoints * so.eps.size());

  // Per point: base state, worst tangent generator and a random generator.
  struct PointData {
    CMatrix u;
    HermitianOperator worst_gen;
    double worst_speed = 1.0;
    HermitianOperator random_gen;
    double random_speed = 1.0;
  };
  std::vector<PointData> pts(npoints);
  parallel_for(npoints, opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(opts.seed, i));
    PointData& p = pts[i];
    p.u = i < static_cast<std::size_t>(so.pairs) ? orbit.sample(rng) : so.anchors[i - static_cast<std::size_t>(so.pairs)];
    const TangentFrame tf = orbit.tangent(p.u);
    const HermitianOperator rho = orbit.state(p.u);
    HermitianOperator h = random_hermitian(orbit.acting_dim(), rng);
    p.random_gen = h * (1.0 / hs_norm(h));
    const double step = 1e-7;
    p.random_speed = (orbit.state(orbit.move(p.u, p.random_gen, step)) - rho).real_coords().norm() / step;
    if (tf.frame.cols() > 0) {
      const PointGeometry pg = point_geometry(sigma, tf);
      p.worst_gen = combine(tf.generators, pg.worst, orbit.acting_dim());
    } else {
      p.worst_gen = p.random_gen;
      p.worst_speed = p.random_speed;
    }
  });

  const double inf = std::numeric_limits<double>::infinity();
  for (double e : so.eps) {
    const double target = 0.5 * so.ball_factor * e;
    std::vector<double> inv(2 * npoints, 0.0);
    std::vector<int> used(2 * npoints, 0);
    parallel_for(2 * npoints, opts.threads, [&](std::size_t j) {
      const PointData& p = pts[j / 2];
      const bool worst = j % 2 == 0;
      const HermitianOperator& g = worst ? p.worst_gen : p.random_gen;
      const double speed = worst ? p.worst_speed : p.random_speed;
      if (!(speed > 0.0)) return;
      const RVector x = (orbit.state(orbit.move(p.u, g, target / speed)) - orbit.state(p.u)).real_coords();
      const double dist = x.norm();
      if (dist < 1e-14 || dist > ball) return;
      used[j] = 1;
      const double proj = sigma.reduce(x).norm();
      inv[j] = proj > 0.0 ? dist / proj : inf;
    });
    double mx = 0.0;
    for (std::size_t j = 0; j < inv.size(); ++j) {
      if (used[j]) {
        mx = std::max(mx, inv[j]);
        ++rep.samples_used;
      }
    }
    rep.c_est.push_back(2.0 * mx);
  }
  const double largest = rep.c_est.front();
  const double smallest = rep.c_est.back();
  const double med = median(rep.c_est);
  const double mx = *std::max_element(rep.c_est.begin(), rep.c_est.end());
  rep.min_ratio = mx > 0.0 ? 2.0 / mx : 0.0;
  // "passed" records the bounded-constant regime.
  rep.passed = std::isfinite(mx) && med > 0.0 && mx / med <= 1.2 && smallest < 10.0 * largest;
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

double povm_min_gain(const Povm& p) {
  const int n = p.n();
  const RVector e = identity_coords(n);
  const RMatrix basis = null_space(RMatrix(e.transpose()), 1e-12);
  const RMatrix h = p.coords() * basis;
  const RVector s = Eigen::JacobiSVD<RMatrix>(h).singularValues();
  return s.size() == 0 ? 0.0 : s[s.size() - 1];
}

VerificationReport noise_ball_check(const Povm& p, const UnitaryOrbit& orbit, double eps, double c, int trials,
                                    const VerifyOptions& opts) {
  const auto t0 = Clock::now();
  if (!(eps > 0.0) || !(c > 0.0)) throw DomainError("noise_ball_check: eps and C must be positive");
  if (p.n() != orbit.hilbert_dim()) throw DimensionError("noise_ball_check: dimension mismatch");
  VerificationReport rep;
  rep.check = "noise_ball";
  rep.seed = opts.seed;
  rep.eps = {eps};
  rep.c_est = {c};
  rep.threshold = c * eps;
  rep.samples_requested = trials;
  std::vector<int> inside(static_cast<std::size_t>(std::max(0, trials)), 0);
  std::vector<int> violated(inside.size(), 0);
  parallel_for(inside.size(), opts.threads, [&](std::size_t i) {
    Rng rng(derive_seed(opts.seed, i));
    const CMatrix u = orbit.sample(rng);
    CMatrix v;
    if (i % 2 == 0) {
      v = orbit.sample(rng);
    } else {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const double lo = std::log(0.01 * eps);
      const double hi = std::log(4.0 * c * eps);
      v = orbit.nearby(u, std::exp(lo + (hi - lo) * unif(rng)), rng);
    }
    const HermitianOperator d = orbit.state(u) - orbit.state(v);
    if (measure_linear(p, d).norm() < 2.0 * eps) {
      inside[i] = 1;
      violated[i] = d.real_coords().norm() > c * eps ? 1 : 0;
    }
  });
  for (std::size_t i = 0; i < inside.size(); ++i) {
    rep.samples_used += inside[i];
    if (violated[i]) {
      if (rep.violations == 0) rep.worst_index = static_cast<int>(i);
      ++rep.violations;
    }
  }
  rep.passed = rep.violations == 0;
  rep.wall_time_s = seconds_since(t0);
  return rep;
}

std::string report_to_json(const VerificationReport& rep, bool include_timing) {
  nlohmann::ordered_json j;
  j["check"] = rep.check;
  j["status"] = rep.status;
  j["passed"] = rep.passed;
  j["seed"] = rep.seed;
  j["samples_requested"] = rep.samples_requested;
  j["samples_used"] = rep.samples_used;
  j["threshold"] = number(rep.threshold);
  j["min_ratio"] = number(rep.min_ratio);
  j["min_tangent_sv"] = number(rep.min_tangent_sv);
  j["max_steepness"] = number(rep.max_steepness);
  nlohmann::ordered_json eps = nlohmann::ordered_json::array();
  nlohmann::ordered_json cs = nlohmann::ordered_json::array();
  for (double e : rep.eps) eps.push_back(number(e));
  for (double c : rep.c_est) cs.push_back(number(c));
  j["eps"] = eps;
  j["c_est"] = cs;
  j["violations"] = rep.violations;
  j["worst_index"] = rep.worst_index;
  if (rep.check == "stability") {
    j["random_rotation_min_ratio"] = number(rep.random_rotation_min_ratio);
    j["adversarial_witness"] = rep.adversarial_witness;
    j["adversarial_ratio"] = number(rep.adversarial_ratio);
    j["adversarial_angle"] = number(rep.adversarial_angle);
  }
  if (include_timing) j["timing"] = {{"wall_time_s", rep.wall_time_s}};
  return j.dump(1);
}

std::string report_summary(const VerificationReport& rep) {
  std::ostringstream os;
  os.precision(6);
  os << rep.check << ": " << (rep.passed ? "pass" : "fail") << " (" << rep.status << ", " << rep.samples_used << "/"
     << rep.samples_requested << " samples, seed " << rep.seed << ")\n";
  if (rep.check == "injectivity" || rep.check == "stability") os << "  min ratio " << rep.min_ratio << "\n";
  if (rep.check == "immersion") {
    os << "  min tangent singular value " << rep.min_tangent_sv << "\n";
    os << "  steepness l " << rep.max_steepness << "\n";
  }
  if (rep.check == "stability") {
    os << "  random rotations min ratio " << rep.random_rotation_min_ratio << "\n";
    os << "  adversarial witness " << (rep.adversarial_witness ? "found" : "none");
    if (rep.adversarial_witness) os << " (ratio " << rep.adversarial_ratio << ", angle " << rep.adversarial_angle << ")";
    os << "\n";
  }
  if (rep.check == "separation") {
    for (std::size_t i = 0; i < rep.eps.size(); ++i) os << "  eps " << rep.eps[i] << "  C_est " << rep.c_est[i] << "\n";
  }
  if (rep.check == "noise_ball") os << "  violations " << rep.violations << "\n";
  os << "  threshold " << rep.threshold << "\n";
  return os.str();
}

}  // namespace qtopo
