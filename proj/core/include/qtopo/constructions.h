#pragma once

// Explicit measurement schemes: rank-bounded / fixed-spectrum operator
// systems, the two-stage Bob-orbit scheme and the quadratic G_k scheme with
// its reconstruction recursion.

#include <cstdint>
#include <string>
#include <vector>

#include "qtopo/linalg.h"
#include "qtopo/manifolds.h"
#include "qtopo/opsys.h"
#include "qtopo/topo_bounds.h"

namespace qtopo {

inline constexpr double kCertifyThreshold = 1e-6;

enum class RankBoundedMode { kRandomCertified, kVandermonde };
std::string mode_name(RankBoundedMode m);
RankBoundedMode parse_mode(const std::string& name);

struct CertifyOptions {
  int restarts = 200;
  int max_iterations = 300;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct CertificationReport {
  bool passed = false;
  int r = 0;
  int complement_dim = 0;
  // Minimum found of the (2r+1)-th largest singular value over unit
  // complement elements; +inf when the complement is {0}.
  double min_singular_value = 0.0;
  double threshold = kCertifyThreshold;
  int restarts = 0;
  bool grid_checked = false;
  double grid_min = 0.0;
  RVector witness;  // real coordinates of the minimizer
  std::string digest;
};

CertificationReport certify_complement(const OperatorSystem& sigma, int r, const CertifyOptions& opts = {});

struct RankBoundedSystemSpec {
  int n = 2;
  int r = 1;
  RankBoundedMode mode = RankBoundedMode::kRandomCertified;
  std::uint64_t seed = 0;
  int max_attempts = 8;
  CertifyOptions certify;
};

struct ConstructedSystem {
  OperatorSystem system;
  CertificationReport certification;
  std::string tag;  // "certified"
  int attempts = 0;
};

// Target dimension: n^2 if 2r >= n, else 4r(n-r)+1.
int rank_bounded_dimension(int n, int r);
ConstructedSystem rank_bounded_system(const RankBoundedSystemSpec& spec);
// Delegates to rank_bounded_system with r = n - largest multiplicity; the
// uniform spectrum gives the trivial system.
ConstructedSystem fixed_spectrum_system(const Spectrum& s, RankBoundedMode mode = RankBoundedMode::kRandomCertified,
                                        std::uint64_t seed = 0, const CertifyOptions& certify = {});

// Unit vectors s_b in C^d whose projectors |s_b><s_b| determine a pure state
// up to phase; 4d-4 of them, accepted after a sampled injectivity check.
std::vector<CVector> phase_retrieval_frame(int d, std::uint64_t seed);

struct Up1Options {
  std::uint64_t seed = 0;
  bool allow_reweight = true;
  RankBoundedMode mode = RankBoundedMode::kRandomCertified;
  CertifyOptions certify;
};

struct Up1System {
  OperatorSystem system;  // on C^dA (x) C^dB
  // Outcome operators in order: O_w (x) F_a, then O_v (x) S_b.
  std::vector<HermitianOperator> operators;
  int stage1_count = 0;
  std::vector<HermitianOperator> stage1_b;  // F_a on B
  std::vector<CVector> frame;               // s_b on B
  std::vector<double> weights;              // w_i; all 1 unless reweighted
  bool reweighted = false;
  CMatrix o_w;
  CMatrix o_v;
  double o_v_scale = 1.0;  // ||sum_i e_i / lambda_i||
  std::vector<double> effective_spectrum;  // lambda_i^2 w_i, i <= r
  bool stage1_full = false;
  CertificationReport stage1_certification;
  int actual_dimension = 0;  // system.dimension() - 1
  Int formula_dimension = 0;
};

Up1System bob_up1_system(const BobOrbitSpec& spec, const Up1Options& opts = {});
// Stage-one-only variant, used to exhibit the diagonal-phase degeneracy.
OperatorSystem bob_up1_stage1_system(const Up1System& s, const BobOrbitSpec& spec);
RVector bob_up1_values(const Up1System& s, const BobOrbitSpec& spec, const CMatrix& u);

struct Up1Reconstruction {
  CMatrix u;
  double residual = 0.0;
};
// Requires a full stage-one system (e.g. full Schmidt rank with simple
// effective spectrum).
Up1Reconstruction bob_up1_reconstruct(const Up1System& s, const BobOrbitSpec& spec, const RVector& values,
                                      std::uint64_t seed = 0);

struct Up2Measurement {
  BobOrbitSpec spec;
  int n = 0;  // dB
  int r = 0;
  // pairs[k-1] lists (a, b), 1-based, a <= min(n, b), a + b = k + 1, b <= n r.
  std::vector<std::vector<std::pair<int, int>>> pairs;
  std::vector<bool> real_only;  // G_k is a single pure square
  int num_g() const { return static_cast<int>(pairs.size()); }
  int outcome_length() const;
};

Up2Measurement bob_up2_build(const BobOrbitSpec& spec);
// M_{n(i-1)+j} = <f_i|U|f_j>, i <= r.
CVector up2_m_vector(const Up2Measurement& meas, const CMatrix& u);
CVector up2_g_values(const Up2Measurement& meas, const CVector& m);
RVector up2_outcomes_from_g(const Up2Measurement& meas, const CVector& g);
CVector up2_g_from_outcomes(const Up2Measurement& meas, const RVector& outcomes);
RVector bob_up2_values(const Up2Measurement& meas, const CMatrix& u);

// Hermitian operators H_j with tr(H_j bob_state(spec, U^dagger)) = outcome j.
std::vector<HermitianOperator> bob_up2_operators(const Up2Measurement& meas);
OperatorSystem bob_up2_system(const Up2Measurement& meas);

struct Up2Reconstruction {
  CVector m;
  int leading_index = 0;  // 1-based m with M_m the first nonzero entry
  double residual = 0.0;  // ||G(m_rec) - G_obs||
  int refinement_steps = 0;
};

Up2Reconstruction bob_up2_reconstruct(const Up2Measurement& meas, const RVector& outcomes);
// min over phi of ||a - e^{i phi} b||.
double phase_aligned_error(const CVector& a, const CVector& b);
// Unitary whose first row in the f-basis has zeros in positions 1..zeros,
// otherwise Haar-like.
CMatrix planted_zero_unitary(const BobOrbitSpec& spec, int zeros, std::uint64_t seed);
// For r = dB: U = sum_ij M_{n(i-1)+j} |f_i><f_j|.
CMatrix up2_unitary_from_m(const Up2Measurement& meas, const CVector& m);

}  // namespace qtopo
