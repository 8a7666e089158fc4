#pragma once

// Closed-form immersion/embedding bounds for complex flag manifolds and
// projective Stiefel manifolds, and the dimensions of the measurement schemes
// that realize matching upper bounds. Exact integer arithmetic throughout.

#include <cstdint>
#include <string>
#include <vector>

namespace qtopo {

using Int = std::int64_t;

// Parts n_1..n_k of a flag U(n)/U(n_1)x...xU(n_k).
struct FlagPartition {
  std::vector<Int> parts;

  explicit FlagPartition(std::vector<Int> p);
  Int n() const;
  Int largest() const;
  std::string to_string() const;  // "5,1,1"
};

// Bob-orbit of a Schmidt-rank-k vector: the projective Stiefel manifold PW_{n,k}.
struct StiefelParams {
  Int n;
  Int k;
  StiefelParams(Int n_, Int k_);
};

struct UpperBound {
  std::string construction;
  Int dimension;
  std::string note;  // empty unless the value is a documented variant
};

enum class DescriptorKind { kPartition, kStiefel, kProduct };

struct BoundReport {
  DescriptorKind kind = DescriptorKind::kPartition;
  std::string descriptor;
  Int manifold_dim = 0;
  // Largest D such that the manifold cannot be immersed in R^D.
  Int max_non_immersion_dim = 0;
  Int max_non_embedding_dim = 0;
  std::vector<UpperBound> upper_bounds;
  std::vector<std::string> provenance;

  Int min_immersion_dim() const { return max_non_immersion_dim + 1; }
  const UpperBound* find_upper(const std::string& name) const;
};

Int alpha(Int n);             // binary digit sum
Int alpha1(Int n);            // sum of alpha(i), 0 <= i < n
Int beta(Int n, Int k);       // alpha1(n) - alpha1(k) - alpha1(n-k)
int binom_parity(Int n, Int k);  // C(n,k) mod 2 by Lucas

Int flag_dim(const FlagPartition& p);
BoundReport flag_bounds(const FlagPartition& p);
BoundReport flag_product_bounds(const std::vector<FlagPartition>& ps);

Int cap_n(const StiefelParams& s);
Int sigma(const StiefelParams& s);
// Same value computed by inverting (1+x)^{nk} in GF(2)[[x]].
Int sigma_series_oracle(const StiefelParams& s);

Int stiefel_dim(const StiefelParams& s);
BoundReport stiefel_bounds(const StiefelParams& s);

// r = n minus the largest multiplicity of the spectrum.
Int upper_fixed_spectrum(Int n, Int r);
Int upper_bob_up1(Int n, Int r);
// n^2 + 4n - 5 for 2r >= n; the formula value otherwise.
Int upper_bob_up1_table_variant(Int n, Int r);
Int upper_bob_up2(Int n, Int r);

}  // namespace qtopo
