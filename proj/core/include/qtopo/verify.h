#pragma once

// Sampling probes for completeness, immersion, stability and separation of
// measurements restricted to a state manifold. Results are evidence with
// explicit sample counts, never proofs.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qtopo/linalg.h"
#include "qtopo/manifolds.h"
#include "qtopo/opsys.h"

namespace qtopo {

inline constexpr double kInjectivityThreshold = 1e-7;
inline constexpr double kImmersionThreshold = 1e-6;
inline constexpr double kPairSkipDistance = 1e-8;

struct VerificationReport {
  std::string check;
  std::string status = "evidence";
  std::uint64_t seed = 0;
  int samples_requested = 0;
  int samples_used = 0;
  double min_ratio = 1.0;          // min ||pi(rho - rho')|| / ||rho - rho'||
  double min_tangent_sv = 1.0;     // min smallest singular value on tangent spaces
  double max_steepness = 0.0;      // l = max ||pi o pi_T - pi_T||_op
  std::vector<double> eps;
  std::vector<double> c_est;
  double threshold = 0.0;
  bool passed = false;
  int violations = 0;
  int worst_index = -1;
  // Stability probe: worst ratio over random rotations and the adversarial
  // collision, if one was constructed within the allowed rotation size.
  double random_rotation_min_ratio = 1.0;
  bool adversarial_witness = false;
  double adversarial_ratio = 1.0;
  double adversarial_angle = 0.0;
  double wall_time_s = 0.0;
};

struct VerifyOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct StatePair {
  HermitianOperator a;
  HermitianOperator b;
};
// Produces pair `index` from a generator seeded for that index.
using PairSampler = std::function<StatePair(std::size_t index, Rng& rng)>;

// Even indices: independent Haar points. Odd indices: the second point is
// exp(i s H) U with s log-uniform in [local_scale / 100, local_scale].
PairSampler orbit_pair_sampler(const UnitaryOrbit& orbit, double local_scale = 1e-2);
// Density operators G G^dagger / tr(G G^dagger) with G a complex Gaussian n x r
// matrix; odd indices perturb G by a relative amount up to local_scale.
PairSampler rank_bounded_pair_sampler(int n, int r, double local_scale = 1e-2);

VerificationReport check_injectivity(const OperatorSystem& sigma, const PairSampler& sampler, int pairs,
                                     const VerifyOptions& opts = {}, double threshold = kInjectivityThreshold);

// Sampled points plus the given anchor unitaries (evaluated after the samples).
VerificationReport check_immersion(const OperatorSystem& sigma, const UnitaryOrbit& orbit, int points,
                                   const VerifyOptions& opts = {}, const std::vector<CMatrix>& anchors = {},
                                   double threshold = kImmersionThreshold);

struct StabilityOptions {
  double delta = 1e-3;  // ||1 - O||_op bound
  int rotations = 10;
  int pairs = 200;
  int points = 10;      // points searched for an adversarial collision
  std::vector<CMatrix> anchors;
  double threshold = kInjectivityThreshold;
};
VerificationReport stability_probe(const OperatorSystem& sigma, const UnitaryOrbit& orbit, const StabilityOptions& so,
                                   const VerifyOptions& opts = {});

struct SeparationOptions {
  std::vector<double> eps{1e-3, 3e-4, 1e-4, 3e-5, 1e-5};  // descending
  int pairs = 40;
  double ball_factor = 10.0;  // ball scale = ball_factor * max eps
  std::vector<CMatrix> anchors;
};
VerificationReport separation_probe(const OperatorSystem& sigma, const UnitaryOrbit& orbit,
                                    const SeparationOptions& so, const VerifyOptions& opts = {});

VerificationReport noise_ball_check(const Povm& p, const UnitaryOrbit& orbit, double eps, double c, int trials,
                                    const VerifyOptions& opts = {});

// Smallest singular value of h_P on traceless Hermitian operators.
double povm_min_gain(const Povm& p);

std::string report_to_json(const VerificationReport& rep, bool include_timing = true);
std::string report_summary(const VerificationReport& rep);

}  // namespace qtopo
