#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtopo/linalg.h"

namespace qtopo {

inline constexpr double kPovmEigenTol = 1e-10;
inline constexpr double kPovmSumTol = 1e-9;
inline constexpr double kPovmGramTol = 1e-9;
inline constexpr double kSpanCutoff = 1e-10;

// Effects P_1..P_m on C^n: positive semidefinite, summing to the identity and
// linearly independent. dimension() = m - 1.
class Povm {
 public:
  Povm() = default;
  explicit Povm(std::vector<HermitianOperator> effects);

  int n() const { return effects_.empty() ? 0 : effects_.front().dim(); }
  int size() const { return static_cast<int>(effects_.size()); }
  int dimension() const { return size() - 1; }
  const std::vector<HermitianOperator>& effects() const { return effects_; }
  const HermitianOperator& operator[](int i) const { return effects_[static_cast<std::size_t>(i)]; }

  // Rows are real_coords of the effects; this is the matrix of h_P.
  RMatrix coords() const;

 private:
  std::vector<HermitianOperator> effects_;
};

// Real part sigma^R of an operator system, stored as an orthonormal basis in
// real coordinates. Column 0 is always the normalized identity.
class OperatorSystem {
 public:
  OperatorSystem() = default;

  // Real span of the generators together with the identity.
  static OperatorSystem from_span(int n, const std::vector<HermitianOperator>& generators);
  // Same, with generators given as real coordinate columns.
  static OperatorSystem from_coords(int n, const RMatrix& generator_coords);
  static OperatorSystem full(int n);
  static OperatorSystem trivial(int n);

  int n() const { return n_; }
  int dimension() const { return static_cast<int>(q_.cols()); }
  bool is_full() const { return dimension() == n_ * n_; }

  // n^2 x dimension, orthonormal columns.
  const RMatrix& coords() const { return q_; }
  std::vector<HermitianOperator> basis() const;
  // Orthonormal basis of the orthogonal complement, n^2 x (n^2 - dimension).
  RMatrix complement() const;

  RVector project_coords(const RVector& x) const { return q_ * (q_.transpose() * x); }
  // Coordinates of the projection in the system's own basis.
  RVector reduce(const RVector& x) const { return q_.transpose() * x; }

 private:
  OperatorSystem(int n, RMatrix q) : n_(n), q_(std::move(q)) {}
  int n_ = 0;
  RMatrix q_;
};

struct MeasurementRecord {
  std::vector<double> outcomes;
  std::string system_id;
  std::uint64_t seed = 0;
  int copies = 1;
};

MeasurementRecord measure(const Povm& p, const DensityOperator& rho);
// h_P applied to an arbitrary Hermitian operator.
RVector measure_linear(const Povm& p, const HermitianOperator& a);

OperatorSystem povm_to_system(const Povm& p);
Povm system_to_povm(const OperatorSystem& sigma);

HermitianOperator project(const OperatorSystem& sigma, const HermitianOperator& a);

// ||pi_sigma - pi_tau||_op on H(C^n).
double system_distance(const OperatorSystem& sigma, const OperatorSystem& tau);
// Largest principal angle between the spans (radians); pi/2 for unequal dimensions.
double max_principal_angle(const OperatorSystem& sigma, const OperatorSystem& tau);

// Unit vector of the identity direction in real coordinates.
RVector identity_coords(int n);

// Random antisymmetric n^2 x n^2 generator annihilating the identity
// direction, normalized to unit operator norm.
RMatrix random_rotation_generator(int n, std::uint64_t seed);
// exp(tG) for antisymmetric G.
RMatrix rotation_matrix(const RMatrix& generator, double t);
// Rotation in the plane of unit vectors u, v (both orthogonal to the identity)
// taking u to v; the identity on the orthogonal complement of that plane.
RMatrix plane_rotation(const RVector& u, const RVector& v);

OperatorSystem rotate_system(const OperatorSystem& sigma, const RMatrix& generator, double t);
OperatorSystem apply_rotation(const OperatorSystem& sigma, const RMatrix& rotation);

// sup over unit Hermitian v of ||(h_P - h_Q) v||.
double povm_deviation(const Povm& p, const Povm& q);

// Smooths toward the maximally mixed state, then adds a random zero-sum
// Hermitian perturbation; the returned POVM deviates from p by at most eps.
Povm perturb_povm(const Povm& p, double eps, std::uint64_t seed);

}  // namespace qtopo
