// Acceptance suite: one PASS/FAIL line per criterion, with pinned tolerances
// and time limits. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.h"
#include "oracles.h"
#include "qtopo/constructions.h"
#include "qtopo/manifolds.h"
#include "qtopo/seeds.h"
#include "qtopo/serialize.h"
#include "qtopo/tables.h"
#include "qtopo/topo_bounds.h"
#include "qtopo/verify.h"

namespace {

using namespace qtopo;
namespace fs = std::filesystem;

const std::string kDataDir = QTOPO_TEST_DATA_DIR;

struct Outcome {
  bool ok = true;
  std::string detail;
};

// Collects the first few failure messages of a criterion.
class Checker {
 public:
  void expect(bool cond, const std::string& what) {
    if (cond) return;
    ok_ = false;
    if (++failures_ <= 3) msgs_ << (failures_ > 1 ? "; " : "") << what;
  }
  void note(const std::string& s) { notes_ << (notes_.tellp() > 0 ? ", " : "") << s; }
  Outcome done() const {
    std::string d = notes_.str();
    if (!ok_) d = "failures=" + std::to_string(failures_) + ": " + msgs_.str() + (d.empty() ? "" : " | " + d);
    return {ok_, d};
  }

 private:
  bool ok_ = true;
  int failures_ = 0;
  std::ostringstream msgs_;
  std::ostringstream notes_;
};

std::string num(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

unsigned worker_threads() { return std::max(1u, std::min(8u, std::thread::hardware_concurrency())); }

TableDiff diff_against_golden(TableId id) { return reproduce_table(id, load_golden(golden_path(kDataDir, id))); }

Outcome wn1_table() {
  Checker c;
  const std::vector<Int> expect{2, 6, 6, 14, 14, 14, 14, 30, 30, 30, 30, 30, 30, 30, 30, 62};
  for (Int n = 2; n <= 17; ++n) {
    const Int got = stiefel_bounds(StiefelParams(n, 1)).max_non_immersion_dim;
    c.expect(got == expect[static_cast<std::size_t>(n - 2)], "n=" + std::to_string(n) + " got " + std::to_string(got));
  }
  const TableDiff d = diff_against_golden(TableId::kWn1);
  c.expect(d.ok() && d.matched == 16, "golden diff: " + std::to_string(d.mismatched) + " mismatches");
  c.note(std::to_string(d.matched) + " cells exact, " + std::to_string(d.reference_only) + " reference-only");
  return c.done();
}

Outcome flag_table() {
  Checker c;
  const TableDiff d = diff_against_golden(TableId::kFlag);
  c.expect(d.ok() && d.matched == 12, "golden diff: " + std::to_string(d.mismatched) + " mismatches");
  const BoundReport r = flag_bounds(FlagPartition({5, 1, 1}));
  c.expect(r.manifold_dim == 22 && r.min_immersion_dim() == 34 && r.find_upper("fixed_spectrum_povm")->dimension == 39,
           "anchor (5,1,1) is not 22/34;39");
  c.note(std::to_string(d.matched) + "/12 triples exact");
  return c.done();
}

Outcome stiefel_table() {
  Checker c;
  const TableDiff d = diff_against_golden(TableId::kStiefel);
  int exact = 0, variant = 0;
  for (const auto& cell : d.cells) {
    if (cell.status == CellStatus::kReferenceOnly) continue;
    const Int n = std::stoll(cell.row), r = std::stoll(cell.col);
    if (2 * r < n) {
      c.expect(cell.status == CellStatus::kMatch, cell.row + "," + cell.col + " expected exact match");
      exact += cell.status == CellStatus::kMatch;
    } else {
      c.expect(cell.status == CellStatus::kMatch || cell.status == CellStatus::kMatchTableVariant,
               cell.row + "," + cell.col + " expected variant match");
      variant += cell.status == CellStatus::kMatchTableVariant;
      exact += cell.status == CellStatus::kMatch;
    }
  }
  c.expect(d.ok() && d.compared() == 14, "golden diff: " + std::to_string(d.mismatched) + " mismatches");
  auto anchor = [&](Int n, Int r, Int dim, Int lower, Int up2) {
    const BoundReport b = stiefel_bounds(StiefelParams(n, r));
    c.expect(b.manifold_dim == dim && b.max_non_immersion_dim == lower && b.find_upper("bob_up2")->dimension == up2,
             "anchor " + std::to_string(n) + "," + std::to_string(r));
  };
  anchor(9, 5, 64, 70, 105);
  anchor(65, 17, 1920, 2014, 2337);
  auto up1 = [&](Int n, Int r, Int v) {
    c.expect(stiefel_bounds(StiefelParams(n, r)).find_upper("bob_up1")->dimension == v,
             "up1 anchor " + std::to_string(n) + "," + std::to_string(r));
  };
  up1(17, 5, 302);
  up1(65, 17, 3518);
  up1(129, 17, 8126);
  c.note(std::to_string(exact) + " exact, " + std::to_string(variant) + " via n^2+4n-5 variant");
  return c.done();
}

Outcome wnk_table() {
  Checker c;
  const TableDiff d = diff_against_golden(TableId::kWnk);
  c.expect(d.ok() && d.matched == 77, "golden diff: " + std::to_string(d.mismatched) + " mismatches");
  const std::vector<Int> row5{14, 19, 22, 23, 24};
  for (Int k = 1; k <= 5; ++k) {
    c.expect(stiefel_bounds(StiefelParams(5, k)).max_non_immersion_dim == row5[static_cast<std::size_t>(k - 1)],
             "n=5 k=" + std::to_string(k));
  }
  c.expect(stiefel_bounds(StiefelParams(10, 2)).max_non_immersion_dim == 51, "n=10 k=2");
  c.note(std::to_string(d.matched) + "/77 cells exact");
  return c.done();
}

Outcome cross_oracles() {
  Checker c;
  int sigma_cases = 0;
  for (Int n = 1; n <= 64; ++n) {
    for (Int k = 1; k <= n; ++k) {
      const StiefelParams p(n, k);
      c.expect(sigma(p) == sigma_series_oracle(p), "sigma " + std::to_string(n) + "," + std::to_string(k));
      ++sigma_cases;
    }
  }
  const auto rows = oracle::pascal(300);
  int parity_cases = 0;
  for (Int n = 0; n <= 300; ++n) {
    for (Int k = 0; k <= n; ++k) {
      c.expect(binom_parity(n, k) == oracle::parity(rows[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)]),
               "parity " + std::to_string(n) + "," + std::to_string(k));
      ++parity_cases;
    }
  }
  c.note(std::to_string(sigma_cases) + " sigma cases, " + std::to_string(parity_cases) + " parity cases");
  return c.done();
}

Outcome trace_identity() {
  Checker c;
  constexpr double kTol = 1e-10;
  Rng rng(derive_seed(2024, 6));
  std::uniform_int_distribution<int> dim(1, 6);
  double worst = 0.0;
  for (int t = 0; t < 1000; ++t) {
    const int dA = dim(rng), dB = dim(rng);
    const BobOrbitSpec spec(UnitVector::normalized(gaussian_vector(dA * dB, rng)), dA, dB);
    const HermitianOperator o = random_hermitian(dA, rng);
    const HermitianOperator s = random_hermitian(dB, rng);
    const CMatrix u = haar_unitary(dB, rng);
    const double err = std::abs(lemtr_lhs(spec, o, s, u) - lemtr_rhs(spec, o, s, u));
    worst = std::max(worst, err);
    c.expect(err <= kTol, "instance " + std::to_string(t) + " error " + num(err));
  }
  c.note("max |LHS-RHS| " + num(worst) + " over 1000 instances");
  return c.done();
}

Outcome up2_roundtrip() {
  Checker c;
  constexpr double kTol = 1e-8;
  std::vector<std::pair<int, int>> shapes;
  for (int n = 1; n <= 8; ++n)
    for (int r = 1; r <= n; ++r) shapes.emplace_back(n, r);
  Rng rng(derive_seed(2024, 7));
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  double worst = 0.0;
  int planted = 0;
  for (int t = 0; t < 500; ++t) {
    const auto [n, r] = shapes[static_cast<std::size_t>(t) % shapes.size()];
    std::vector<double> lambda;
    for (int i = 0; i < r; ++i) lambda.push_back(unif(rng));
    const BobOrbitSpec spec = BobOrbitSpec::from_schmidt(lambda, haar_unitary(r, rng), haar_unitary(n, rng));
    const Up2Measurement meas = bob_up2_build(spec);
    CMatrix u;
    if (t % 4 == 3 && n > 1) {
      const int zeros = 1 + (t / 4) % (n - 1);
      u = planted_zero_unitary(spec, zeros, derive_seed(7, static_cast<std::uint64_t>(t)));
      ++planted;
    } else {
      u = haar_unitary(n, rng);
    }
    const CVector truth = up2_m_vector(meas, u);
    try {
      const Up2Reconstruction rec = bob_up2_reconstruct(meas, bob_up2_values(meas, u));
      const double err = phase_aligned_error(rec.m, truth);
      worst = std::max(worst, err);
      c.expect(err <= kTol, "n=" + std::to_string(n) + " r=" + std::to_string(r) + " error " + num(err));
    } catch (const std::exception& e) {
      c.expect(false, "n=" + std::to_string(n) + " r=" + std::to_string(r) + " threw " + e.what());
    }
  }
  c.note("max error " + num(worst) + " over 500 unitaries (" + std::to_string(planted) + " planted)");
  return c.done();
}

// All compositions of n, as multiplicity profiles.
void compositions(int n, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (n == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = 1; p <= n; ++p) {
    cur.push_back(p);
    compositions(n - p, cur, out);
    cur.pop_back();
  }
}

Outcome tangent_geometry() {
  Checker c;
  constexpr double kCutoff = 1e-8;
  int spectra = 0, elements = 0, diffs = 0;
  for (int n = 1; n <= 6; ++n) {
    std::vector<std::vector<int>> profiles;
    std::vector<int> cur;
    compositions(n, cur, profiles);
    for (const auto& prof : profiles) {
      // Distinct values per group, descending, normalized.
      std::vector<double> v;
      double level = static_cast<double>(prof.size());
      for (int m : prof) {
        v.insert(v.end(), static_cast<std::size_t>(m), level);
        level -= 1.0;
      }
      double total = 0.0;
      for (double x : v) total += x;
      for (double& x : v) x /= total;
      const Spectrum s(v);
      const int rmax = *std::max_element(prof.begin(), prof.end());
      const int bound = 2 * (n - rmax);
      Int expect_dim = static_cast<Int>(n) * n;
      for (int m : prof) expect_dim -= static_cast<Int>(m) * m;
      const std::uint64_t seed = derive_seed(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(spectra));
      const DensityOperator rho = sample_fixed_spectrum(s, seed);
      const auto basis = tangent_basis_fixed_spectrum(rho, s);
      c.expect(static_cast<Int>(basis.size()) == expect_dim, "tangent count for n=" + std::to_string(n));
      for (const auto& t : basis) {
        c.expect(numerical_rank(t.matrix(), kCutoff, true) <= bound, "tangent element rank");
        ++elements;
      }
      for (int j = 0; j < 5; ++j) {
        const DensityOperator other = sample_fixed_spectrum(s, derive_seed(seed, 100 + static_cast<std::uint64_t>(j)));
        const CMatrix d = rho.matrix() - other.matrix();
        if (d.norm() > 1e-12) c.expect(numerical_rank(d, kCutoff, true) <= bound, "orbit difference rank");
        ++diffs;
      }
      ++spectra;
    }
  }
  c.note(std::to_string(spectra) + " spectra, " + std::to_string(elements) + " tangent elements, " +
         std::to_string(diffs) + " differences");
  return c.done();
}

Outcome construction_separation() {
  Checker c;
  VerifyOptions vo;
  vo.seed = 9;
  vo.threads = worker_threads();
  std::ostringstream summary;
  auto run = [&](const std::string& name, const OperatorSystem& sys, const PairSampler& sampler, const UnitaryOrbit* orbit) {
    const VerificationReport inj = check_injectivity(sys, sampler, 10000, vo);
    c.expect(inj.passed && inj.min_ratio > kInjectivityThreshold, name + " injectivity " + num(inj.min_ratio));
    summary << (summary.tellp() > 0 ? ", " : "") << name << " inj " << num(inj.min_ratio);
    if (orbit) {
      const VerificationReport imm = check_immersion(sys, *orbit, 100, vo);
      c.expect(imm.passed && imm.min_tangent_sv > kImmersionThreshold, name + " immersion " + num(imm.min_tangent_sv));
      summary << " imm " << num(imm.min_tangent_sv);
    }
  };

  RankBoundedSystemSpec rb;
  rb.n = 4;
  rb.r = 1;
  rb.certify.threads = worker_threads();
  const ConstructedSystem rbs = rank_bounded_system(rb);
  c.expect(rbs.system.dimension() == 13 && rbs.certification.passed, "rank-bounded(4,1) construction");
  const UnitaryOrbit pure4 = UnitaryOrbit::fixed_spectrum(Spectrum::pure(4));
  run("rank-bounded(4,1)", rbs.system, rank_bounded_pair_sampler(4, 1), &pure4);

  Up1Options o1;
  o1.seed = 3;
  o1.certify.threads = worker_threads();
  const BobOrbitSpec s1 = BobOrbitSpec::from_schmidt({0.8, 0.5, 0.33166247903554}, haar_unitary(3, 31), haar_unitary(3, 32));
  const UnitaryOrbit orbit1 = UnitaryOrbit::bob(s1);
  run("up1(3,3)", bob_up1_system(s1, o1).system, orbit_pair_sampler(orbit1), &orbit1);
  const BobOrbitSpec s1m = BobOrbitSpec::maximally_entangled(3);
  const UnitaryOrbit orbit1m = UnitaryOrbit::bob(s1m);
  run("up1(max-ent 3)", bob_up1_system(s1m, o1).system, orbit_pair_sampler(orbit1m), &orbit1m);
  const BobOrbitSpec s1b = BobOrbitSpec::from_schmidt({0.9, 0.43588989435407}, haar_unitary(2, 33), haar_unitary(4, 34));
  const UnitaryOrbit orbit1b = UnitaryOrbit::bob(s1b);
  run("up1(2,4)", bob_up1_system(s1b, o1).system, orbit_pair_sampler(orbit1b), &orbit1b);

  for (auto [n, r] : std::vector<std::pair<int, int>>{{4, 2}, {5, 1}, {6, 3}}) {
    std::vector<double> lambda;
    for (int i = 0; i < r; ++i) lambda.push_back(1.0 / (1.0 + 0.5 * i));
    const BobOrbitSpec spec = BobOrbitSpec::from_schmidt(lambda, haar_unitary(r, 40 + n), haar_unitary(n, 50 + n));
    const UnitaryOrbit orbit = UnitaryOrbit::bob(spec);
    // The up2 operators read the state at U^dagger, and the orbit is closed under inversion.
    run("up2(" + std::to_string(n) + "," + std::to_string(r) + ")", bob_up2_system(bob_up2_build(spec)), orbit_pair_sampler(orbit),
        &orbit);
  }
  c.note(summary.str());
  return c.done();
}

OperatorSystem planted_non_immersive(const UnitaryOrbit& orbit, int n) {
  const RMatrix dir = orbit.tangent(CMatrix::Identity(n, n)).frame.col(0);
  return OperatorSystem::from_coords(n, null_space(RMatrix(dir.transpose()), 1e-10));
}

Outcome stability_dichotomy() {
  Checker c;
  VerifyOptions vo;
  vo.seed = 10;
  vo.threads = worker_threads();
  SeparationOptions so;

  const UnitaryOrbit mixed3 = UnitaryOrbit::fixed_spectrum(Spectrum({0.5, 0.3, 0.2}));
  const VerificationReport full = separation_probe(OperatorSystem::full(3), mixed3, so, vo);
  double full_dev = 0.0;
  for (double v : full.c_est) full_dev = std::max(full_dev, std::abs(v - 2.0));
  c.expect(full_dev <= 1e-9, "full system |C_est - 2| = " + num(full_dev));

  const UnitaryOrbit pure3 = UnitaryOrbit::fixed_spectrum(Spectrum::pure(3));
  SeparationOptions planted_opts = so;
  planted_opts.anchors = {CMatrix::Identity(3, 3)};
  const VerificationReport planted = separation_probe(planted_non_immersive(pure3, 3), pure3, planted_opts, vo);
  const double growth = planted.c_est.back() / planted.c_est.front();
  c.expect(growth >= 10.0, "planted growth " + num(growth));

  RankBoundedSystemSpec rb;
  rb.n = 4;
  rb.r = 1;
  rb.certify.threads = worker_threads();
  const UnitaryOrbit pure4 = UnitaryOrbit::fixed_spectrum(Spectrum::pure(4));
  const VerificationReport emb = separation_probe(rank_bounded_system(rb).system, pure4, so, vo);
  std::vector<double> sorted = emb.c_est;
  std::sort(sorted.begin(), sorted.end());
  const double spread = sorted.back() / sorted[sorted.size() / 2];
  c.expect(spread <= 1.2, "embedding max/median " + num(spread));

  c.note("full dev " + num(full_dev) + ", planted C " + num(planted.c_est.front()) + " -> " + num(planted.c_est.back()) +
         ", embedding max/median " + num(spread));
  return c.done();
}

Outcome kcopy_differential_check() {
  Checker c;
  constexpr double kTol = 1e-6;
  constexpr double kStep = 1e-5;
  Rng rng(derive_seed(2024, 11));
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + t % 3;
    const CMatrix g = ginibre(n, n, rng);
    const CMatrix rho = g * g.adjoint() / (g * g.adjoint()).trace().real();
    const CMatrix v = random_hermitian(n, rng).matrix();
    for (int k = 1; k <= 3; ++k) {
      const CMatrix fd =
          (oracle::tensor_power_naive(rho + kStep * v, k) - oracle::tensor_power_naive(rho - kStep * v, k)) / (2 * kStep);
      const CMatrix exact = kcopy_differential(rho, v, k);
      const double rel = (exact - fd).norm() / std::max(exact.norm(), 1e-300);
      worst = std::max(worst, rel);
      c.expect(rel <= kTol, "k=" + std::to_string(k) + " n=" + std::to_string(n) + " rel " + num(rel));
    }
  }
  c.note("max relative error " + num(worst) + " over 100 (rho, v) x k<=3");
  return c.done();
}

std::string strip_timing(std::string s) {
  for (auto a = s.find("\"timing\""); a != std::string::npos; a = s.find("\"timing\"")) {
    auto b = s.find('}', a);
    // Also drop the separator before the key.
    auto comma = s.rfind(',', a);
    s.erase(comma, b - comma + 1);
  }
  return s;
}

Outcome determinism() {
  Checker c;
  const fs::path dir = fs::temp_directory_path() / "qtopo_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string m = (dir / "m.json").string();
  const std::string up2 = (dir / "up2.json").string();
  auto cli_run = [&](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return std::make_pair(code, strip_timing(out.str()));
  };
  const std::vector<std::vector<std::string>> commands{
      {"--format", "structured", "construct", "--model", "rank-bounded", "--n", "4", "--r", "1", "--seed", "5", "--out", m},
      {"--format", "structured", "verify", "--measurement", m, "--pairs", "500", "--points", "20", "--seed", "6"},
      {"--format", "structured", "construct", "--model", "bob-up2", "--n", "4", "--r", "2", "--seed", "8", "--out", up2},
      {"--format", "structured", "reconstruct", "--measurement", up2, "--simulate", "--planted-zeros", "1", "--seed", "9"},
  };
  int compared = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const auto a = cli_run(commands[i]);
    const std::string doc_a = i == 0 ? read_file(m) : "";
    const auto b = cli_run(commands[i]);
    const std::string doc_b = i == 0 ? read_file(m) : "";
    c.expect(a.first == cli::kOk && b.first == cli::kOk, "command " + std::to_string(i) + " exit " + std::to_string(a.first));
    c.expect(a.second == b.second, "command " + std::to_string(i) + " output differs");
    c.expect(doc_a == doc_b, "command " + std::to_string(i) + " document differs");
    ++compared;
  }
  fs::remove_all(dir);
  c.note(std::to_string(compared) + " commands byte-identical after removing timing");
  return c.done();
}

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Outcome()> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "wn1 table", 1.0, wn1_table},
      {2, "flag table", 1.0, flag_table},
      {3, "stiefel table", 5.0, stiefel_table},
      {4, "wnk table", 5.0, wnk_table},
      {5, "sigma and parity cross-oracles", 10.0, cross_oracles},
      {6, "trace identity", 10.0, trace_identity},
      {7, "up2 round trip", 60.0, up2_roundtrip},
      {8, "tangent geometry", 30.0, tangent_geometry},
      {9, "construction separation", 300.0, construction_separation},
      {10, "stability dichotomy", 120.0, stability_dichotomy},
      {11, "k-copy differential", 30.0, kcopy_differential_check},
      {12, "CLI determinism", 60.0, determinism},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.limit_s) {
      o.ok = false;
      o.detail += " | over time limit " + num(cr.limit_s) + " s";
    }
    failed += o.ok ? 0 : 1;
    std::printf("%s [%2d] %-32s %8.3f s (limit %g s)  %s\n", o.ok ? "PASS" : "FAIL", cr.id, cr.name.c_str(), secs,
                cr.limit_s, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
