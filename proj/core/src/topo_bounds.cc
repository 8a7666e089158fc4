#include "qtopo/topo_bounds.h"

#include <algorithm>
#include <bit>
#include <sstream>

#include "qtopo/errors.h"

namespace qtopo {

namespace {

void require_range(Int n, Int k, const char* what) {
  if (n < 0 || k < 0 || k > n) {
    std::ostringstream os;
    os << what << ": need 0 <= k <= n, got n=" << n << " k=" << k;
    throw DomainError(os.str());
  }
}

// All subset sums of the parts.
std::vector<bool> subset_sums(const FlagPartition& p) {
  const Int n = p.n();
  std::vector<bool> reach(static_cast<std::size_t>(n + 1), false);
  reach[0] = true;
  for (Int part : p.parts) {
    for (Int s = n; s >= part; --s) {
      if (reach[static_cast<std::size_t>(s - part)]) reach[static_cast<std::size_t>(s)] = true;
    }
  }
  return reach;
}

// max over subset sums m of 4m(n-m) - 2 beta(n,m); smallest maximizing m.
std::pair<Int, Int> flag_term(const FlagPartition& p) {
  const Int n = p.n();
  const std::vector<bool> reach = subset_sums(p);
  Int best = 0;
  Int best_m = 0;
  bool first = true;
  for (Int m = 0; m <= n; ++m) {
    if (!reach[static_cast<std::size_t>(m)]) continue;
    const Int v = 4 * m * (n - m) - 2 * beta(n, m);
    if (first || v > best) {
      best = v;
      best_m = m;
      first = false;
    }
  }
  return {best, best_m};
}

}  // namespace

FlagPartition::FlagPartition(std::vector<Int> p) : parts(std::move(p)) {
  if (parts.empty()) throw DomainError("FlagPartition: needs at least one part");
  for (Int x : parts) {
    if (x < 1) throw DomainError("FlagPartition: parts must be positive");
  }
}

Int FlagPartition::n() const {
  Int s = 0;
  for (Int x : parts) s += x;
  return s;
}

Int FlagPartition::largest() const { return *std::max_element(parts.begin(), parts.end()); }

std::string FlagPartition::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < parts.size(); ++i) os << (i ? "," : "") << parts[i];
  return os.str();
}

StiefelParams::StiefelParams(Int n_, Int k_) : n(n_), k(k_) {
  if (k < 1 || k > n) {
    std::ostringstream os;
    os << "StiefelParams: need 1 <= k <= n, got n=" << n << " k=" << k;
    throw DomainError(os.str());
  }
}

const UpperBound* BoundReport::find_upper(const std::string& name) const {
  for (const auto& u : upper_bounds) {
    if (u.construction == name) return &u;
  }
  return nullptr;
}

Int alpha(Int n) {
  if (n < 0) throw DomainError("alpha: n must be nonnegative");
  return std::popcount(static_cast<std::uint64_t>(n));
}

Int alpha1(Int n) {
  if (n < 0) throw DomainError("alpha1: n must be nonnegative");
  Int s = 0;
  for (Int i = 0; i < n; ++i) s += alpha(i);
  return s;
}

Int beta(Int n, Int k) {
  require_range(n, k, "beta");
  return alpha1(n) - alpha1(k) - alpha1(n - k);
}

int binom_parity(Int n, Int k) {
  require_range(n, k, "binom_parity");
  return (static_cast<std::uint64_t>(k) & static_cast<std::uint64_t>(n - k)) == 0 ? 1 : 0;
}

Int flag_dim(const FlagPartition& p) {
  const Int n = p.n();
  Int d = n * n;
  for (Int x : p.parts) d -= x * x;
  return d;
}

Int upper_fixed_spectrum(Int n, Int r) {
  if (r < 1 || r > n - 1) throw DomainError("upper_fixed_spectrum: need 1 <= r <= n-1");
  return 2 * r < n ? 4 * r * (n - r) - 1 : n * n - 1;
}

Int upper_bob_up1(Int n, Int r) {
  if (r < 1 || r > n) throw DomainError("upper_bob_up1: need 1 <= r <= n");
  return 2 * r < n ? 4 * r * (n - r) - 1 + 4 * n - 5 : n * n - 1 + 4 * n - 5;
}

Int upper_bob_up1_table_variant(Int n, Int r) {
  if (r < 1 || r > n) throw DomainError("upper_bob_up1_table_variant: need 1 <= r <= n");
  return 2 * r < n ? upper_bob_up1(n, r) : n * n + 4 * n - 5;
}

Int upper_bob_up2(Int n, Int r) {
  if (r < 1 || r > n) throw DomainError("upper_bob_up2: need 1 <= r <= n");
  return 2 * n * r + 2 * n - 3;
}

BoundReport flag_bounds(const FlagPartition& p) {
  BoundReport rep;
  rep.kind = DescriptorKind::kPartition;
  rep.descriptor = p.to_string();
  rep.manifold_dim = flag_dim(p);
  const auto [term, m] = flag_term(p);
  rep.max_non_immersion_dim = term - 1;
  rep.max_non_embedding_dim = term;
  const Int n = p.n();
  const Int r = n - p.largest();
  rep.upper_bounds.push_back({"fixed_spectrum_povm", r == 0 ? 0 : upper_fixed_spectrum(n, r), ""});
  std::ostringstream os;
  os << "non-immersion: 4m(n-m)-2beta(n,m)-1 maximized over subset sums m of the parts (m=" << m << ")";
  rep.provenance.push_back(os.str());
  rep.provenance.push_back("non-embedding: 4m(n-m)-2beta(n,m)");
  rep.provenance.push_back("fixed_spectrum_povm: 4r(n-r)-1 for r<n/2, n^2-1 otherwise, r = n - largest part");
  return rep;
}

BoundReport flag_product_bounds(const std::vector<FlagPartition>& ps) {
  if (ps.empty()) throw DomainError("flag_product_bounds: empty product");
  BoundReport rep;
  rep.kind = DescriptorKind::kProduct;
  Int term = 0;
  std::ostringstream desc;
  std::ostringstream ms;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    desc << (i ? ";" : "") << ps[i].to_string();
    rep.manifold_dim += flag_dim(ps[i]);
    const auto [t, m] = flag_term(ps[i]);
    term += t;
    ms << (i ? "," : "") << m;
  }
  rep.descriptor = desc.str();
  rep.max_non_immersion_dim = term - 1;
  rep.max_non_embedding_dim = term;
  rep.provenance.push_back("non-immersion: sum over factors of 4m_i(n_i-m_i)-2beta(n_i,m_i), minus 1 (m=" +
                           ms.str() + ")");
  return rep;
}

Int cap_n(const StiefelParams& s) {
  for (Int i = s.n - s.k + 1; i <= s.n; ++i) {
    if (binom_parity(s.n, i)) return i;
  }
  return s.n;  // unreachable: C(n,n) = 1
}

Int sigma(const StiefelParams& s) {
  const Int cap = cap_n(s);
  const Int nk = s.n * s.k;
  Int best = 0;
  for (Int i = 0; i < cap; ++i) {
    if (binom_parity(nk + i - 1, i)) best = i;
  }
  return 2 * best;
}

Int sigma_series_oracle(const StiefelParams& s) {
  const Int cap = cap_n(s);
  const std::size_t len = static_cast<std::size_t>(cap);
  using Poly = std::vector<std::uint8_t>;
  auto mul = [len](const Poly& a, const Poly& b) {
    Poly c(len, 0);
    for (std::size_t i = 0; i < len; ++i) {
      if (!a[i]) continue;
      for (std::size_t j = 0; i + j < len; ++j) c[i + j] ^= b[j];
    }
    return c;
  };
  // (1+x)^{nk} truncated, by square and multiply.
  Poly result(len, 0);
  result[0] = 1;
  Poly base(len, 0);
  base[0] = 1;
  if (len > 1) base[1] = 1;
  for (Int e = s.n * s.k; e > 0; e >>= 1) {
    if (e & 1) result = mul(result, base);
    base = mul(base, base);
  }
  // Inverse: b_0 = 1, b_j = sum_{i=1..j} a_i b_{j-i} over GF(2).
  Poly inv(len, 0);
  inv[0] = 1;
  for (std::size_t j = 1; j < len; ++j) {
    std::uint8_t acc = 0;
    for (std::size_t i = 1; i <= j; ++i) acc ^= static_cast<std::uint8_t>(result[i] & inv[j - i]);
    inv[j] = acc;
  }
  Int top = 0;
  for (std::size_t j = 0; j < len; ++j) {
    if (inv[j]) top = static_cast<Int>(j);
  }
  return 2 * top;
}

Int stiefel_dim(const StiefelParams& s) { return 2 * s.n * s.k - s.k * s.k - 1; }

BoundReport stiefel_bounds(const StiefelParams& s) {
  BoundReport rep;
  rep.kind = DescriptorKind::kStiefel;
  rep.descriptor = std::to_string(s.n) + "," + std::to_string(s.k);
  rep.manifold_dim = stiefel_dim(s);
  rep.max_non_immersion_dim = (2 * s.n - s.k) * s.k - 1 + sigma(s);
  rep.max_non_embedding_dim = rep.max_non_immersion_dim + 1;
  rep.upper_bounds.push_back({"bob_up1", upper_bob_up1(s.n, s.k), ""});
  if (2 * s.k >= s.n) {
    rep.upper_bounds.push_back({"bob_up1_table_variant", upper_bob_up1_table_variant(s.n, s.k), "table_variant"});
  }
  rep.upper_bounds.push_back({"bob_up2", upper_bob_up2(s.n, s.k), ""});
  rep.provenance.push_back("non-immersion: (2n-k)k-1+sigma(n,k)");
  rep.provenance.push_back("sigma(n,k) = 2 max{0<=i<N(n,k): C(nk+i-1,i) odd}, N(n,k) = min{n-k<i<=n: C(n,i) odd}");
  rep.provenance.push_back("bob_up1: 4r(n-r)-1+4n-5 for r<n/2, n^2-1+4n-5 otherwise");
  rep.provenance.push_back("bob_up2: 2nr+2n-3");
  return rep;
}

}  // namespace qtopo
