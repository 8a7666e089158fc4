#include <gtest/gtest.h>

#include "qtopo/constructions.h"
#include "qtopo/errors.h"

namespace qtopo {
namespace {

BobOrbitSpec spec_of(int dA, int dB, int r, std::uint64_t seed) {
  std::vector<double> lambda;
  for (int i = 0; i < r; ++i) lambda.push_back(1.0 / (1.0 + 0.4 * i));
  return BobOrbitSpec::from_schmidt(lambda, haar_unitary(dA, seed), haar_unitary(dB, seed + 1));
}

TEST(Up2, OutcomeLengths) {
  for (int n = 2; n <= 9; ++n) {
    for (int r = 1; r <= std::min(n, 4); ++r) {
      const Up2Measurement m = bob_up2_build(spec_of(r, n, r, 3));
      const int expect = r == 1 ? 4 * n - 4 : 2 * n * r + 2 * n - 3;
      EXPECT_EQ(m.outcome_length(), expect) << n << "," << r;
      EXPECT_EQ(m.num_g(), n * r + n - 1);
    }
  }
  // Schmidt rank 5 on C^9: the printed 105.
  std::vector<double> lambda(5, 1.0);
  lambda[1] = 0.9;
  lambda[2] = 0.8;
  lambda[3] = 0.7;
  lambda[4] = 0.6;
  EXPECT_EQ(bob_up2_build(BobOrbitSpec::from_schmidt(lambda, CMatrix::Identity(5, 5), CMatrix::Identity(9, 9))).outcome_length(), 105);
}

TEST(Up2, PairsFollowIndexRule) {
  const Up2Measurement m = bob_up2_build(spec_of(2, 3, 2, 1));
  for (int k = 1; k <= m.num_g(); ++k) {
    for (const auto& [a, b] : m.pairs[static_cast<std::size_t>(k - 1)]) {
      EXPECT_EQ(a + b, k + 1);
      EXPECT_LE(a, std::min(3, b));
      EXPECT_LE(b, 6);
    }
  }
}

TEST(Up2, IdentityPattern) {
  const Up2Measurement m = bob_up2_build(spec_of(2, 3, 2, 5));
  const CVector mv = up2_m_vector(m, CMatrix::Identity(3, 3));
  EXPECT_NEAR(std::abs(mv[0] - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(mv[4] - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(mv.norm(), std::sqrt(2.0), 1e-12);
  const CVector g = up2_g_values(m, mv);
  EXPECT_NEAR(std::abs(g[0] - 1.0), 0.0, 1e-12);
  // G_k collects M_a conj(M_b) with a + b = k + 1; only (1,1), (1,5) and (5,5) survive.
  for (int k = 1; k <= m.num_g(); ++k) {
    const Complex expect = k == 1 ? 1.0 : (k == 5 ? 1.0 : 0.0);
    EXPECT_NEAR(std::abs(g[k - 1] - expect), 0.0, 1e-12) << k;
  }
}

TEST(Up2, OperatorsReproduceValues) {
  for (int r = 1; r <= 3; ++r) {
    const BobOrbitSpec spec = spec_of(3, 3, r, 10 + r);
    const Up2Measurement m = bob_up2_build(spec);
    const auto ops = bob_up2_operators(m);
    ASSERT_EQ(static_cast<int>(ops.size()), m.outcome_length());
    const CMatrix u = haar_unitary(3, 40 + r);
    const RVector v = bob_up2_values(m, u);
    const DensityOperator rho = bob_state(spec, u.adjoint());
    for (std::size_t j = 0; j < ops.size(); ++j) EXPECT_NEAR(hs_inner(ops[j], rho.op()), v[static_cast<Eigen::Index>(j)], 1e-12);
  }
}

TEST(Up2, GlobalPhaseInvariance) {
  const Up2Measurement m = bob_up2_build(spec_of(2, 4, 2, 7));
  const CMatrix u = haar_unitary(4, 8);
  EXPECT_LT((bob_up2_values(m, u) - bob_up2_values(m, std::polar(1.0, 1.1) * u)).norm(), 1e-12);
}

TEST(Up2, RoundTrip) {
  for (int n = 2; n <= 6; ++n) {
    for (int r : {1, 2, n}) {
      if (r > n) continue;
      const Up2Measurement m = bob_up2_build(spec_of(r, n, r, static_cast<std::uint64_t>(7 * n + r)));
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const CMatrix u = haar_unitary(n, 100 + seed);
        const CVector truth = up2_m_vector(m, u);
        const Up2Reconstruction rec = bob_up2_reconstruct(m, bob_up2_values(m, u));
        EXPECT_LT(phase_aligned_error(rec.m, truth), 1e-8) << n << "," << r;
        EXPECT_EQ(rec.leading_index, 1);
      }
    }
  }
}

TEST(Up2, PlantedLeadingZeros) {
  const BobOrbitSpec spec = spec_of(3, 5, 3, 2);
  const Up2Measurement m = bob_up2_build(spec);
  for (int z = 0; z < 5; ++z) {
    const CMatrix u = planted_zero_unitary(spec, z, 50 + z);
    EXPECT_LT(unitarity_defect(u), 1e-12);
    const CVector truth = up2_m_vector(m, u);
    for (int j = 0; j < z; ++j) EXPECT_LT(std::abs(truth[j]), 1e-12);
    const Up2Reconstruction rec = bob_up2_reconstruct(m, bob_up2_values(m, u));
    EXPECT_EQ(rec.leading_index, z + 1);
    EXPECT_LT(phase_aligned_error(rec.m, truth), 1e-8);
  }
  EXPECT_THROW(planted_zero_unitary(spec, 5, 1), DomainError);
}

TEST(Up2, FullRankUnitaryFromM) {
  const BobOrbitSpec spec = spec_of(3, 3, 3, 20);
  const Up2Measurement m = bob_up2_build(spec);
  const CMatrix u = haar_unitary(3, 21);
  const Up2Reconstruction rec = bob_up2_reconstruct(m, bob_up2_values(m, u));
  const CMatrix back = up2_unitary_from_m(m, rec.m);
  EXPECT_LT((bob_state(spec, back.adjoint()).matrix() - bob_state(spec, u.adjoint()).matrix()).norm(), 1e-8);
  EXPECT_THROW(up2_unitary_from_m(bob_up2_build(spec_of(2, 3, 2, 1)), CVector::Zero(6)), DomainError);
}

TEST(Up2, DifferentialHasFullRankOnTangentSpace) {
  for (auto [n, r] : std::vector<std::pair<int, int>>{{3, 1}, {3, 2}, {4, 2}, {3, 3}}) {
    const BobOrbitSpec spec = spec_of(r, n, r, static_cast<std::uint64_t>(n + 10 * r));
    const Up2Measurement m = bob_up2_build(spec);
    const UnitaryOrbit orbit = UnitaryOrbit::bob(spec);
    const CMatrix u = haar_unitary(n, 77);
    const RMatrix frame = orbit.tangent(u.adjoint()).frame;
    const auto ops = bob_up2_operators(m);
    RMatrix h(frame.rows(), static_cast<Eigen::Index>(ops.size()));
    for (std::size_t j = 0; j < ops.size(); ++j) h.col(static_cast<Eigen::Index>(j)) = ops[j].real_coords();
    const RMatrix jac = h.transpose() * frame;
    Eigen::JacobiSVD<RMatrix> svd(jac);
    EXPECT_EQ(frame.cols(), orbit.dimension());
    EXPECT_GT(svd.singularValues()[orbit.dimension() - 1], 1e-6) << n << "," << r;
  }
}

TEST(Up2, RejectsBadInput) {
  const Up2Measurement m = bob_up2_build(spec_of(2, 3, 2, 1));
  EXPECT_THROW(bob_up2_reconstruct(m, RVector::Zero(m.outcome_length())), DomainError);
  EXPECT_THROW(bob_up2_reconstruct(m, RVector::Zero(3)), DimensionError);
  EXPECT_THROW(up2_m_vector(m, CMatrix::Identity(2, 2)), DimensionError);
}

}  // namespace
}  // namespace qtopo
