#include <gtest/gtest.h>

#include "qtopo/errors.h"
#include "qtopo/opsys.h"
#include "qtopo/seeds.h"

namespace qtopo {
namespace {

Povm computational_basis(int n) {
  std::vector<HermitianOperator> e;
  for (int i = 0; i < n; ++i) {
    CMatrix m = CMatrix::Zero(n, n);
    m(i, i) = 1.0;
    e.emplace_back(m);
  }
  return Povm(e);
}

OperatorSystem random_system(int n, int extra, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<HermitianOperator> gens;
  for (int i = 0; i < extra; ++i) gens.push_back(random_hermitian(n, rng));
  return OperatorSystem::from_span(n, gens);
}

TEST(PovmTest, Validation) {
  EXPECT_NO_THROW(computational_basis(3));
  CMatrix half = CMatrix::Identity(2, 2) * 0.5;
  EXPECT_THROW(Povm({HermitianOperator(half)}), DomainError);  // does not sum to 1
  CMatrix neg = CMatrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  CMatrix rest = CMatrix::Identity(2, 2) - neg;
  EXPECT_THROW(Povm({HermitianOperator(neg), HermitianOperator(rest)}), DomainError);
  // Linearly dependent effects.
  EXPECT_THROW(Povm({HermitianOperator(half), HermitianOperator(half)}), DomainError);
  EXPECT_EQ(computational_basis(4).dimension(), 3);
}

TEST(SystemTest, ContainsIdentityAndComplementIsOrthogonal) {
  for (int n = 1; n <= 4; ++n) {
    const OperatorSystem s = random_system(n, std::min(3, n * n - 1), 100 + n);
    EXPECT_NEAR(std::abs(s.coords().col(0).dot(identity_coords(n))), 1.0, 1e-12);
    const RMatrix c = s.complement();
    EXPECT_EQ(s.dimension() + c.cols(), n * n);
    if (c.cols() > 0) EXPECT_LT((s.coords().transpose() * c).norm(), 1e-12);
  }
  EXPECT_EQ(OperatorSystem::full(3).dimension(), 9);
  EXPECT_EQ(OperatorSystem::trivial(3).dimension(), 1);
}

TEST(SystemTest, PovmRoundTrip) {
  for (int n = 2; n <= 4; ++n) {
    for (int extra : {0, 2, n * n - 1}) {
      const OperatorSystem s = random_system(n, extra, 7 * n + extra);
      const Povm p = system_to_povm(s);
      EXPECT_EQ(p.dimension() + 1, s.dimension());
      EXPECT_LT(system_distance(povm_to_system(p), s), 1e-9);
    }
  }
}

TEST(Measure, ProbabilitiesSumToOne) {
  const Povm p = system_to_povm(random_system(3, 4, 5));
  const DensityOperator rho = DensityOperator::pure(CVector::Ones(3));
  const MeasurementRecord rec = measure(p, rho);
  double s = 0.0;
  for (double v : rec.outcomes) {
    EXPECT_GE(v, -1e-12);
    s += v;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
  Rng rng(1);
  const HermitianOperator a = random_hermitian(3, rng);
  const HermitianOperator b = random_hermitian(3, rng);
  EXPECT_LT((measure_linear(p, a + 2.0 * b) - measure_linear(p, a) - 2.0 * measure_linear(p, b)).norm(), 1e-12);
}

TEST(Rotations, OperatorNormDistanceAndIdentity) {
  const RMatrix g = random_rotation_generator(3, 4);
  for (double delta : {1e-3, 0.1, 0.5}) {
    const double t = 2.0 * std::asin(delta / 2.0);
    const RMatrix o = rotation_matrix(g, t);
    EXPECT_LT((o.transpose() * o - RMatrix::Identity(9, 9)).norm(), 1e-12);
    const double dist = Eigen::JacobiSVD<RMatrix>(RMatrix::Identity(9, 9) - o).singularValues()[0];
    EXPECT_NEAR(dist, delta, 1e-10);
    EXPECT_LT((o * identity_coords(3) - identity_coords(3)).norm(), 1e-12);
  }
  const OperatorSystem s = random_system(3, 3, 2);
  const OperatorSystem r = rotate_system(s, g, 0.01);
  EXPECT_EQ(r.dimension(), s.dimension());
  EXPECT_GT(system_distance(r, s), 0.0);
  EXPECT_LT(system_distance(r, s), 0.02);
}

TEST(Rotations, PlaneRotation) {
  const RVector e = identity_coords(2);
  RVector u = RVector::Zero(4), v = RVector::Zero(4);
  u[3] = 1.0;
  v[0] = 1.0 / std::sqrt(2.0);
  v[1] = -1.0 / std::sqrt(2.0);
  const RMatrix r = plane_rotation(u, v);
  EXPECT_LT((r * u - v).norm(), 1e-14);
  EXPECT_LT((r * e - e).norm(), 1e-14);
  EXPECT_LT((r.transpose() * r - RMatrix::Identity(4, 4)).norm(), 1e-14);
}

TEST(Distance, Symmetric) {
  const OperatorSystem a = random_system(3, 3, 1);
  const OperatorSystem b = random_system(3, 3, 2);
  EXPECT_NEAR(system_distance(a, b), system_distance(b, a), 1e-12);
  EXPECT_NEAR(system_distance(a, a), 0.0, 1e-12);
  EXPECT_NEAR(max_principal_angle(a, a), 0.0, 1e-6);
  EXPECT_NEAR(max_principal_angle(a, OperatorSystem::full(3)), M_PI / 2, 1e-12);
}

TEST(Perturb, StaysWithinEpsAndPositive) {
  const Povm p = computational_basis(3);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (double eps : {1e-4, 1e-2, 0.2}) {
      const Povm q = perturb_povm(p, eps, seed);
      EXPECT_LE(povm_deviation(p, q), eps * (1 + 1e-12));
      EXPECT_EQ(q.size(), p.size());
      for (const auto& e : q.effects()) EXPECT_GE(e.eigenvalues()[0], -1e-10);
    }
  }
  EXPECT_EQ(povm_deviation(p, perturb_povm(p, 0.0, 1)), 0.0);
  EXPECT_THROW(perturb_povm(p, -1.0, 1), DomainError);
}

}  // namespace
}  // namespace qtopo
