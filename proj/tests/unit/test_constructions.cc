#include <gtest/gtest.h>

#include "qtopo/constructions.h"
#include "qtopo/errors.h"
#include "qtopo/verify.h"

namespace qtopo {
namespace {

CertifyOptions quick(std::uint64_t seed = 0) {
  CertifyOptions o;
  o.restarts = 48;
  o.seed = seed;
  return o;
}

RankBoundedSystemSpec rb(int n, int r, std::uint64_t seed = 0) {
  RankBoundedSystemSpec s;
  s.n = n;
  s.r = r;
  s.seed = seed;
  s.certify = quick();
  return s;
}

TEST(RankBounded, TargetDimensions) {
  EXPECT_EQ(rank_bounded_dimension(4, 1), 13);
  EXPECT_EQ(rank_bounded_dimension(5, 2), 25);
  EXPECT_EQ(rank_bounded_dimension(3, 1), 9);
  EXPECT_EQ(rank_bounded_dimension(6, 1), 21);
  EXPECT_EQ(rank_bounded_dimension(6, 2), 33);
  EXPECT_THROW(rank_bounded_dimension(0, 1), DomainError);
}

TEST(RankBounded, ModeNames) {
  EXPECT_EQ(parse_mode(mode_name(RankBoundedMode::kVandermonde)), RankBoundedMode::kVandermonde);
  EXPECT_EQ(parse_mode("random-certified"), RankBoundedMode::kRandomCertified);
  EXPECT_THROW(parse_mode("magic"), DomainError);
}

TEST(RankBounded, RandomSystemsCertifyAcrossSeeds) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    for (auto [n, r] : std::vector<std::pair<int, int>>{{4, 1}, {5, 1}, {6, 2}}) {
      const ConstructedSystem c = rank_bounded_system(rb(n, r, seed));
      EXPECT_EQ(c.system.dimension(), rank_bounded_dimension(n, r));
      EXPECT_TRUE(c.certification.passed);
      EXPECT_EQ(c.tag, "certified");
      EXPECT_GT(c.certification.min_singular_value, kCertifyThreshold);
      EXPECT_EQ(c.certification.complement_dim, n * n - rank_bounded_dimension(n, r));
    }
  }
}

TEST(RankBounded, FullSystemWhenTwoRAtLeastN) {
  const ConstructedSystem c = rank_bounded_system(rb(3, 2));
  EXPECT_TRUE(c.system.is_full());
  EXPECT_TRUE(c.certification.passed);
  EXPECT_TRUE(std::isinf(c.certification.min_singular_value));
}

TEST(RankBounded, VandermondeCertifies) {
  for (int n = 4; n <= 6; ++n) {
    RankBoundedSystemSpec s = rb(n, 1);
    s.mode = RankBoundedMode::kVandermonde;
    const ConstructedSystem c = rank_bounded_system(s);
    EXPECT_EQ(c.system.dimension(), rank_bounded_dimension(n, 1));
    EXPECT_TRUE(c.certification.passed);
  }
}

TEST(Certify, PlantedLowRankDirectionFails) {
  const int n = 4;
  RMatrix comp(n * n, 3);
  CMatrix e = CMatrix::Zero(n, n);
  e(0, 0) = 1.0;
  e(1, 1) = -1.0;
  comp.col(0) = HermitianOperator(e).real_coords();
  Rng rng(5);
  const RVector id = identity_coords(n);
  for (int j = 1; j < 3; ++j) {
    RVector g = random_hermitian(n, rng).real_coords();
    comp.col(j) = g - id * id.dot(g);
  }
  const OperatorSystem sigma = OperatorSystem::from_coords(n, null_space(comp.transpose(), 1e-10));
  ASSERT_EQ(sigma.dimension(), 13);
  const CertificationReport rep = certify_complement(sigma, 1, quick());
  EXPECT_FALSE(rep.passed);
  EXPECT_LT(rep.min_singular_value, kCertifyThreshold);
  const HermitianOperator w = HermitianOperator::from_real_coords(rep.witness, n);
  EXPECT_LE(numerical_rank(w.matrix(), 1e-5, true), 2);
  EXPECT_LT(std::abs(w.trace()), 1e-9);
}

TEST(Certify, TooSmallNFailsWithWitness) {
  const OperatorSystem sigma = OperatorSystem::trivial(2);
  const CertificationReport rep = certify_complement(sigma, 1);
  EXPECT_FALSE(rep.passed);
  EXPECT_EQ(rep.witness.size(), 4);
  EXPECT_TRUE(certify_complement(OperatorSystem::full(3), 1).passed);
  EXPECT_THROW(certify_complement(sigma, -1), DomainError);
}

TEST(Certify, DigestIndependentOfThreads) {
  const ConstructedSystem c = rank_bounded_system(rb(4, 1, 9));
  CertifyOptions a = quick(3);
  CertifyOptions b = a;
  b.threads = 4;
  const CertificationReport ra = certify_complement(c.system, 1, a);
  const CertificationReport rb4 = certify_complement(c.system, 1, b);
  EXPECT_EQ(ra.digest, rb4.digest);
  EXPECT_EQ(ra.min_singular_value, rb4.min_singular_value);
  EXPECT_NE(ra.digest, certify_complement(c.system, 1, quick(4)).digest);
}

TEST(RankBounded, SeparatesLowRankStates) {
  const ConstructedSystem c = rank_bounded_system(rb(4, 1));
  VerifyOptions vo;
  vo.seed = 2;
  const VerificationReport rep = check_injectivity(c.system, rank_bounded_pair_sampler(4, 1), 400, vo);
  EXPECT_TRUE(rep.passed);
  EXPECT_GT(rep.min_ratio, kInjectivityThreshold);
}

TEST(FixedSpectrum, Dimensions) {
  EXPECT_EQ(fixed_spectrum_system(Spectrum::pure(4), RankBoundedMode::kRandomCertified, 0, quick()).system.dimension(), 13);
  const ConstructedSystem u = fixed_spectrum_system(Spectrum::uniform(4));
  EXPECT_EQ(u.system.dimension(), 1);
  EXPECT_TRUE(u.certification.passed);
  EXPECT_EQ(fixed_spectrum_system(Spectrum({0.5, 0.3, 0.2}), RankBoundedMode::kRandomCertified, 0, quick()).system.dimension(), 9);
}

TEST(Frame, SizeAndNormalization) {
  for (int d = 2; d <= 4; ++d) {
    const auto f = phase_retrieval_frame(d, 7);
    ASSERT_EQ(static_cast<int>(f.size()), 4 * d - 4);
    for (const auto& v : f) EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  }
  EXPECT_TRUE(phase_retrieval_frame(1, 0).empty());
  EXPECT_THROW(phase_retrieval_frame(0, 0), DomainError);
}

TEST(Up1, MaximallyEntangledIsReweighted) {
  const BobOrbitSpec spec = BobOrbitSpec::maximally_entangled(3);
  Up1Options o;
  o.certify = quick();
  const Up1System s = bob_up1_system(spec, o);
  EXPECT_TRUE(s.reweighted);
  double sum = 0.0;
  for (double v : s.effective_spectrum) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  EXPECT_EQ(s.formula_dimension, 15);
  EXPECT_EQ(s.actual_dimension, 16);
  o.allow_reweight = false;
  EXPECT_THROW(bob_up1_system(spec, o), DomainError);
}

TEST(Up1, ValuesMatchOperatorsAndReconstruct) {
  const BobOrbitSpec spec = BobOrbitSpec::from_schmidt({0.8, 0.5, 0.33166247903554}, haar_unitary(3, 1), haar_unitary(3, 2));
  Up1Options o;
  o.certify = quick();
  o.seed = 4;
  const Up1System s = bob_up1_system(spec, o);
  EXPECT_FALSE(s.reweighted);
  ASSERT_TRUE(s.stage1_full);
  for (std::uint64_t seed = 10; seed < 14; ++seed) {
    const CMatrix u = haar_unitary(3, seed);
    const RVector v = bob_up1_values(s, spec, u);
    const Up1Reconstruction rec = bob_up1_reconstruct(s, spec, v, seed);
    EXPECT_LT(rec.residual, 1e-9);
    EXPECT_LT((bob_state(spec, rec.u).matrix() - bob_state(spec, u).matrix()).norm(), 1e-6);
  }
}

TEST(Up1, StageOneAloneMissesDiagonalPhases) {
  const BobOrbitSpec spec = BobOrbitSpec::from_schmidt({0.8, 0.5, 0.33166247903554}, haar_unitary(3, 1), haar_unitary(3, 2));
  Up1Options o;
  o.certify = quick();
  const Up1System s = bob_up1_system(spec, o);
  const CMatrix u = haar_unitary(3, 20);
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = std::polar(1.0, 0.9);
  d(2, 2) = std::polar(1.0, -1.7);
  const CMatrix u2 = u * spec.f_full() * d * spec.f_full().adjoint();
  const RVector a = bob_up1_values(s, spec, u);
  const RVector b = bob_up1_values(s, spec, u2);
  EXPECT_LT((a.head(s.stage1_count) - b.head(s.stage1_count)).norm(), 1e-12);
  EXPECT_GT((bob_state(spec, u).matrix() - bob_state(spec, u2).matrix()).norm(), 0.1);
  EXPECT_GT((a - b).norm(), 1e-3);
}

}  // namespace
}  // namespace qtopo
