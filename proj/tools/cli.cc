#include "cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtopo/constructions.h"
#include "qtopo/errors.h"
#include "qtopo/manifolds.h"
#include "qtopo/serialize.h"
#include "qtopo/tables.h"
#include "qtopo/topo_bounds.h"
#include "qtopo/verify.h"

#ifndef QTOPO_DEFAULT_DATA_DIR
#define QTOPO_DEFAULT_DATA_DIR "data/tables/v1"
#endif

namespace qtopo::cli {

namespace {

using json = nlohmann::ordered_json;

struct UsageError : Error {
  using Error::Error;
};

std::string fmt6(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

Int parse_int(const std::string& s) {
  std::size_t pos = 0;
  Int v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("not an integer: '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("not an integer: '" + s + "'");
  return v;
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("not a number: '" + s + "'");
  return v;
}

std::vector<Int> parse_int_list(const std::string& s) {
  std::vector<Int> out;
  for (const auto& t : split(s, ',')) out.push_back(parse_int(t));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) out.push_back(parse_double(t));
  if (out.empty()) throw UsageError("empty list");
  return out;
}

json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

json complex_list(const CVector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
  return a;
}

// Flat key/value output in the three formats.
class Emitter {
 public:
  Emitter(std::string format, std::string command) : format_(std::move(format)) {
    doc_["config"] = {{"command", command}};
    if (format_ == "text" || format_ == "csv") lines_.push_back("# qtopo " + command);
    if (format_ == "csv") lines_.push_back("key,value");
  }
  void put(const std::string& key, const json& value) {
    doc_[key] = value;
    if (format_ == "structured") return;
    std::string text;
    if (value.is_number_float()) {
      text = fmt6(value.get<double>());
    } else if (value.is_string()) {
      text = value.get<std::string>();
    } else {
      text = value.dump();
    }
    lines_.push_back(format_ == "csv" ? key + "," + text : key + " " + text);
  }
  void put_structured_only(const std::string& key, const json& value) { doc_[key] = value; }
  void raw_line(const std::string& line) {
    if (format_ != "structured") lines_.push_back(line);
  }
  void flush(std::ostream& out) const {
    if (format_ == "structured") {
      out << doc_.dump(1) << "\n";
      return;
    }
    for (const auto& l : lines_) out << l << "\n";
  }
  json& doc() { return doc_; }

 private:
  std::string format_;
  json doc_;
  std::vector<std::string> lines_;
};

std::string join_args(const std::vector<std::string>& args) {
  std::string s;
  for (const auto& a : args) {
    if (!s.empty()) s += " ";
    s += a;
  }
  return s;
}

// --- bounds -------------------------------------------------------------

struct BoundsArgs {
  std::string partition;
  std::string product;
  std::string stiefel;
};

int cmd_bounds(const BoundsArgs& a, Emitter& em) {
  const int given = !a.partition.empty() + !a.product.empty() + !a.stiefel.empty();
  if (given != 1) throw UsageError("bounds: give exactly one of --partition, --product, --stiefel");
  BoundReport rep;
  if (!a.partition.empty()) {
    rep = flag_bounds(FlagPartition(parse_int_list(a.partition)));
  } else if (!a.product.empty()) {
    std::vector<FlagPartition> ps;
    for (const auto& f : split(a.product, ';')) ps.emplace_back(parse_int_list(f));
    rep = flag_product_bounds(ps);
  } else {
    const std::vector<Int> nk = parse_int_list(a.stiefel);
    if (nk.size() != 2) throw UsageError("--stiefel expects n,k");
    rep = stiefel_bounds(StiefelParams(nk[0], nk[1]));
  }
  const char* kind = rep.kind == DescriptorKind::kPartition ? "partition"
                     : rep.kind == DescriptorKind::kStiefel ? "stiefel"
                                                            : "product";
  em.put("kind", kind);
  em.put("descriptor", rep.descriptor);
  em.put("manifold_dim", rep.manifold_dim);
  em.put("max_non_immersion_dim", rep.max_non_immersion_dim);
  em.put("min_immersion_dim", rep.min_immersion_dim());
  em.put("max_non_embedding_dim", rep.max_non_embedding_dim);
  json ub = json::array();
  for (const auto& u : rep.upper_bounds) {
    ub.push_back({{"construction", u.construction}, {"dimension", u.dimension}, {"note", u.note}});
    em.raw_line(std::string("upper ") + u.construction + " " + std::to_string(u.dimension) +
                (u.note.empty() ? "" : " (" + u.note + ")"));
  }
  em.put_structured_only("upper_bounds", ub);
  json prov = json::array();
  for (const auto& p : rep.provenance) {
    prov.push_back(p);
    em.raw_line("note " + p);
  }
  em.put_structured_only("notes", prov);
  return kOk;
}

// --- tables -------------------------------------------------------------

struct TablesArgs {
  std::string which = "all";
  std::string data_dir = QTOPO_DEFAULT_DATA_DIR;
  bool bless = false;
  bool verbose = false;
};

int cmd_tables(const TablesArgs& a, const std::string& format, const std::string& command, std::ostream& out,
               std::ostream& err) {
  std::vector<TableId> ids;
  if (a.which == "all") {
    ids = all_tables();
  } else {
    for (const auto& w : split(a.which, ',')) ids.push_back(parse_table_id(w));
  }
  if (a.bless) {
    for (TableId id : ids) {
      const std::string path = golden_path(a.data_dir, id);
      std::optional<GoldenTable> prev;
      if (std::filesystem::exists(path)) prev = load_golden(path);
      write_file(path, format_golden(compute_table(id), prev ? &*prev : nullptr));
      out << "blessed " << path << "\n";
    }
    return kOk;
  }
  std::vector<TableDiff> diffs;
  for (TableId id : ids) {
    const std::string path = golden_path(a.data_dir, id);
    if (!std::filesystem::exists(path)) {
      err << "missing golden file " << path << "\n";
      return kUsageError;
    }
    diffs.push_back(reproduce_table(id, load_golden(path)));
  }
  bool ok = true;
  for (const auto& d : diffs) ok = ok && d.ok();

  if (format == "structured") {
    json doc;
    doc["config"] = {{"command", command}};
    doc["ok"] = ok;
    json tabs = json::array();
    for (const auto& d : diffs) {
      json t;
      t["table"] = table_name(d.id);
      t["compared"] = d.compared();
      t["matched"] = d.matched;
      t["matched_table_variant"] = d.matched_variant;
      t["mismatched"] = d.mismatched;
      t["reference_only"] = d.reference_only;
      json cells = json::array();
      for (const auto& c : d.cells) {
        cells.push_back({{"row", c.row}, {"col", c.col}, {"expected", c.expected}, {"computed", c.computed},
                         {"status", status_name(c.status)}});
      }
      t["cells"] = cells;
      tabs.push_back(t);
    }
    doc["tables"] = tabs;
    out << doc.dump(1) << "\n";
  } else if (format == "csv") {
    out << "# qtopo " << command << "\n";
    out << "table,row,col,expected,computed,status\n";
    for (const auto& d : diffs) {
      for (const auto& c : d.cells) {
        out << table_name(d.id) << "," << c.row << "," << c.col << "," << c.expected << "," << c.computed << ","
            << status_name(c.status) << "\n";
      }
    }
  } else {
    out << "# qtopo " << command << "\n";
    for (const auto& d : diffs) {
      out << table_name(d.id) << ": " << d.matched + d.matched_variant << "/" << d.compared() << " match";
      if (d.matched_variant > 0) out << " (" << d.matched_variant << " via table_variant n^2+4n-5)";
      if (d.reference_only > 0) out << ", " << d.reference_only << " reference-only";
      out << (d.ok() ? "" : ", MISMATCH") << "\n";
      for (const auto& c : d.cells) {
        const bool show = a.verbose || (c.status != CellStatus::kMatch && c.status != CellStatus::kMatchTableVariant &&
                                        c.status != CellStatus::kReferenceOnly);
        if (!show) continue;
        out << "  " << c.row << " " << c.col << " expected=" << (c.expected.empty() ? "-" : c.expected)
            << " computed=" << (c.computed.empty() ? "-" : c.computed) << " " << status_name(c.status) << "\n";
      }
    }
  }
  return ok ? kOk : kCheckFailed;
}

// --- shared model parameters ---------------------------------------------

struct ModelArgs {
  std::string model;
  int n = 0;
  int r = 0;
  int da = 0;
  std::string spectrum;
  std::string alpha;
  std::string mode = "random-certified";
  int restarts = 200;
  std::string out;
};

std::vector<double> normalized_schmidt(std::vector<double> lambda) {
  double s = 0.0;
  for (double l : lambda) {
    if (!(l > 0.0)) throw UsageError("Schmidt coefficients must be positive");
    s += l * l;
  }
  for (double& l : lambda) l /= std::sqrt(s);
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  return lambda;
}

BobOrbitSpec bob_spec_from_params(const json& p) {
  const int dA = p.at("dA").get<int>();
  const int dB = p.at("n").get<int>();
  const auto lambda = p.at("lambda").get<std::vector<double>>();
  const std::uint64_t seed = p.at("basis_seed").get<std::uint64_t>();
  return BobOrbitSpec::from_schmidt(lambda, haar_unitary(dA, derive_seed(seed, 11)), haar_unitary(dB, derive_seed(seed, 12)));
}

// Spectrum with r distinct nonzero eigenvalues; its orbit consists of rank-r states.
Spectrum rank_profile_spectrum(int n, int r) {
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  const double total = r * (r + 1) / 2.0;
  for (int i = 0; i < r; ++i) v[static_cast<std::size_t>(i)] = (r - i) / total;
  return Spectrum(v);
}

json certification_json(const CertificationReport& c) {
  return {{"passed", c.passed},
          {"r", c.r},
          {"complement_dim", c.complement_dim},
          {"min_singular_value", number(c.min_singular_value)},
          {"threshold", c.threshold},
          {"restarts", c.restarts},
          {"grid_checked", c.grid_checked},
          {"digest", c.digest}};
}

int cmd_construct(const ModelArgs& a, std::uint64_t seed, unsigned threads, Emitter& em) {
  CertifyOptions co;
  co.restarts = a.restarts;
  co.seed = seed;
  co.threads = threads;
  const RankBoundedMode mode = parse_mode(a.mode);
  json params;
  params["model"] = a.model;
  OperatorSystem sys;
  em.put("model", a.model);

  if (a.model == "rank-bounded" || a.model == "fixed-spectrum") {
    ConstructedSystem cs;
    if (a.model == "rank-bounded") {
      if (a.n < 2 || a.r < 1) throw UsageError("rank-bounded needs --n >= 2 and --r >= 1");
      RankBoundedSystemSpec spec;
      spec.n = a.n;
      spec.r = a.r;
      spec.mode = mode;
      spec.seed = seed;
      spec.certify = co;
      cs = rank_bounded_system(spec);
      params["n"] = a.n;
      params["r"] = a.r;
    } else {
      if (a.spectrum.empty()) throw UsageError("fixed-spectrum needs --spectrum");
      const Spectrum s(parse_double_list(a.spectrum));
      cs = fixed_spectrum_system(s, mode, seed, co);
      params["n"] = s.n();
      params["r"] = s.rank_parameter();
      params["spectrum"] = s.values();
    }
    params["mode"] = mode_name(mode);
    params["attempts"] = cs.attempts;
    params["certification"] = certification_json(cs.certification);
    sys = cs.system;
    em.put("n", params["n"]);
    em.put("r", params["r"]);
    em.put("mode", mode_name(mode));
    em.put("dimension", sys.dimension());
    em.put("complement_dimension", cs.certification.complement_dim);
    em.put("certification", cs.certification.passed ? "pass" : "fail");
    em.put("certification_min_singular_value", number(cs.certification.min_singular_value));
    em.put("certification_digest", cs.certification.digest);
    em.put("tag", cs.tag);
  } else if (a.model == "bob-up1" || a.model == "bob-up2") {
    if (a.n < 1 || a.r < 1 || a.r > a.n) throw UsageError("bob models need --n >= --r >= 1");
    std::vector<double> lambda = a.alpha.empty() ? std::vector<double>(static_cast<std::size_t>(a.r), 1.0)
                                                 : parse_double_list(a.alpha);
    if (static_cast<int>(lambda.size()) != a.r) throw UsageError("--alpha must list exactly r Schmidt coefficients");
    lambda = normalized_schmidt(lambda);
    const int dA = a.da > 0 ? a.da : a.r;
    if (dA < a.r) throw UsageError("--da must be at least r");
    params["n"] = a.n;
    params["r"] = a.r;
    params["dA"] = dA;
    params["lambda"] = lambda;
    params["basis_seed"] = seed;
    const BobOrbitSpec spec = bob_spec_from_params(params);
    em.put("n", a.n);
    em.put("r", a.r);
    em.put("dA", dA);
    em.put("manifold_dim", 2 * a.n * a.r - a.r * a.r - 1);
    if (a.model == "bob-up1") {
      Up1Options uo;
      uo.seed = seed;
      uo.mode = mode;
      uo.certify = co;
      const Up1System s = bob_up1_system(spec, uo);
      sys = s.system;
      params["reweighted"] = s.reweighted;
      params["weights"] = s.weights;
      params["actual_dimension"] = s.actual_dimension;
      params["formula_dimension"] = s.formula_dimension;
      params["stage1_certification"] = certification_json(s.stage1_certification);
      em.put("reweighted", s.reweighted);
      em.put("dimension", s.actual_dimension);
      em.put("formula_dimension", s.formula_dimension);
      em.put("stage1_certification_digest", s.stage1_certification.digest);
    } else {
      const Up2Measurement meas = bob_up2_build(spec);
      sys = bob_up2_system(meas);
      params["outcome_length"] = meas.outcome_length();
      em.put("outcome_length", meas.outcome_length());
      em.put("dimension", sys.dimension() - 1);
    }
  } else {
    throw UsageError("unknown model '" + a.model + "' (rank-bounded, fixed-spectrum, bob-up1, bob-up2)");
  }

  DocumentMeta meta;
  meta.seed = seed;
  meta.construction = a.model;
  meta.params_json = params.dump();
  const std::string doc = write_document(sys, meta);
  if (!a.out.empty()) {
    write_file(a.out, doc);
    em.put("written", a.out);
  } else {
    em.put_structured_only("document", json::parse(doc));
  }
  return kOk;
}

// --- verify -------------------------------------------------------------

struct VerifyArgs {
  std::string measurement;
  int pairs = 1000;
  int points = 100;
  std::string out;
};

struct LoadedMeasurement {
  MeasurementDocument doc;
  json params;
  OperatorSystem system;
};

LoadedMeasurement load_measurement(const std::string& path) {
  if (!std::filesystem::exists(path)) throw Error("cannot open " + path);
  LoadedMeasurement m;
  m.doc = parse_document(read_file(path));
  m.params = json::parse(m.doc.meta.params_json);
  if (!m.params.contains("model")) throw SchemaError("measurement document lacks construction parameters");
  m.system = document_to_system(m.doc);
  return m;
}

int cmd_verify(const VerifyArgs& a, std::uint64_t seed, unsigned threads, const std::string& format,
               const std::string& command, std::ostream& out) {
  const LoadedMeasurement m = load_measurement(a.measurement);
  const std::string model = m.params["model"].get<std::string>();
  VerifyOptions vo;
  vo.seed = seed;
  vo.threads = threads;
  std::optional<UnitaryOrbit> orbit;
  PairSampler sampler;
  if (model == "rank-bounded") {
    const int n = m.params["n"].get<int>();
    const int r = m.params["r"].get<int>();
    sampler = rank_bounded_pair_sampler(n, std::min(r, n));
    orbit = UnitaryOrbit::fixed_spectrum(rank_profile_spectrum(n, std::min(r, n)));
  } else if (model == "fixed-spectrum") {
    orbit = UnitaryOrbit::fixed_spectrum(Spectrum(m.params["spectrum"].get<std::vector<double>>()));
    sampler = orbit_pair_sampler(*orbit);
  } else if (model == "bob-up1" || model == "bob-up2") {
    orbit = UnitaryOrbit::bob(bob_spec_from_params(m.params));
    sampler = orbit_pair_sampler(*orbit);
  } else {
    throw SchemaError("unknown construction '" + model + "' in measurement document");
  }
  if (orbit->hilbert_dim() != m.system.n()) throw SchemaError("document dimension does not match its parameters");
  std::vector<VerificationReport> reps;
  reps.push_back(check_injectivity(m.system, sampler, a.pairs, vo));
  if (orbit->dimension() > 0) reps.push_back(check_immersion(m.system, *orbit, a.points, vo));
  bool ok = true;
  for (const auto& r : reps) ok = ok && r.passed;

  json doc;
  doc["config"] = {{"command", command}};
  doc["measurement"] = a.measurement;
  doc["model"] = model;
  doc["passed"] = ok;
  json arr = json::array();
  for (const auto& r : reps) arr.push_back(json::parse(report_to_json(r)));
  doc["reports"] = arr;
  if (!a.out.empty()) write_file(a.out, doc.dump(1) + "\n");

  if (format == "structured") {
    out << doc.dump(1) << "\n";
  } else if (format == "csv") {
    out << "# qtopo " << command << "\n";
    out << "check,passed,samples,min_ratio,min_tangent_sv,max_steepness,threshold\n";
    for (const auto& r : reps) {
      out << r.check << "," << r.passed << "," << r.samples_used << "," << fmt6(r.min_ratio) << ","
          << fmt6(r.min_tangent_sv) << "," << fmt6(r.max_steepness) << "," << fmt6(r.threshold) << "\n";
    }
  } else {
    out << "# qtopo " << command << "\n";
    out << "model " << model << "\n";
    for (const auto& r : reps) out << report_summary(r);
    out << (ok ? "pass" : "fail") << "\n";
  }
  return ok ? kOk : kCheckFailed;
}

// --- reconstruct ----------------------------------------------------------

struct ReconstructArgs {
  std::string measurement;
  std::string outcomes;
  bool simulate = false;
  int planted_zeros = 0;
  std::string write_outcomes;
};

int cmd_reconstruct(const ReconstructArgs& a, std::uint64_t seed, Emitter& em) {
  const LoadedMeasurement m = load_measurement(a.measurement);
  if (m.params["model"] != "bob-up2") throw UsageError("reconstruct supports bob-up2 measurements");
  if (a.simulate == !a.outcomes.empty()) throw UsageError("reconstruct: give exactly one of --outcomes, --simulate");
  const BobOrbitSpec spec = bob_spec_from_params(m.params);
  const Up2Measurement meas = bob_up2_build(spec);
  RVector outcomes;
  std::optional<CMatrix> truth;
  if (a.simulate) {
    truth = a.planted_zeros > 0 ? planted_zero_unitary(spec, a.planted_zeros, seed) : haar_unitary(meas.n, seed);
    outcomes = bob_up2_values(meas, *truth);
    if (!a.write_outcomes.empty()) {
      json od;
      od["kind"] = "outcomes";
      od["construction"] = "bob-up2";
      od["values"] = std::vector<double>(outcomes.data(), outcomes.data() + outcomes.size());
      write_file(a.write_outcomes, od.dump(1) + "\n");
    }
  } else {
    if (!std::filesystem::exists(a.outcomes)) throw Error("cannot open " + a.outcomes);
    json od;
    try {
      od = json::parse(read_file(a.outcomes));
    } catch (const json::exception& e) {
      throw SchemaError(std::string("outcome document: ") + e.what());
    }
    if (!od.contains("values") || !od["values"].is_array()) throw SchemaError("outcome document lacks 'values'");
    const auto v = od["values"].get<std::vector<double>>();
    outcomes = Eigen::Map<const RVector>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  const Up2Reconstruction rec = bob_up2_reconstruct(meas, outcomes);
  em.put("outcome_length", meas.outcome_length());
  em.put("leading_index", rec.leading_index);
  em.put("residual", number(rec.residual));
  em.put("refinement_steps", rec.refinement_steps);
  em.put_structured_only("m", complex_list(rec.m));
  for (Eigen::Index i = 0; i < rec.m.size(); ++i) {
    em.raw_line("M" + std::to_string(i + 1) + " " + fmt6(rec.m[i].real()) + " " + fmt6(rec.m[i].imag()));
  }
  const auto& lam = spec.lambda();
  const bool max_ent = meas.r == meas.n && std::all_of(lam.begin(), lam.end(), [&](double l) {
                         return std::abs(l - lam.front()) <= 1e-12;
                       });
  if (max_ent) {
    const CMatrix u = up2_unitary_from_m(meas, rec.m);
    json rows = json::array();
    for (Eigen::Index i = 0; i < u.rows(); ++i) rows.push_back(complex_list(u.row(i).transpose()));
    em.put_structured_only("unitary", rows);
    em.put("unitarity_defect", number(unitarity_defect(u)));
  }
  int code = kOk;
  if (truth) {
    const double e = phase_aligned_error(rec.m, up2_m_vector(meas, *truth));
    em.put("phase_aligned_error", number(e));
    em.put("tolerance", 1e-8);
    if (!(e <= 1e-8)) code = kCheckFailed;
  }
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Immersion bounds and measurement constructions for quantum state manifolds", "qtopo"};
  app.require_subcommand(1);
  std::string format = "text";
  unsigned threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv", "structured"}));
  app.add_option("--threads", threads, "Worker threads")->check(CLI::Range(1u, 256u));

  BoundsArgs ba;
  auto* bounds = app.add_subcommand("bounds", "Immersion and embedding bounds");
  bounds->add_option("--partition", ba.partition, "Flag partition, e.g. 5,1,1");
  bounds->add_option("--product", ba.product, "Product of flags, e.g. '2,1;3,1'");
  bounds->add_option("--stiefel", ba.stiefel, "Projective Stiefel n,k");

  TablesArgs ta;
  auto* tables = app.add_subcommand("tables", "Reproduce the bound tables against golden files");
  tables->add_option("--which", ta.which, "wn1, wnk, flag, stiefel or all");
  tables->add_option("--data-dir", ta.data_dir, "Directory of golden files");
  tables->add_flag("--bless", ta.bless, "Rewrite the golden files from computed values");
  tables->add_flag("--verbose", ta.verbose, "List every cell");

  ModelArgs ma;
  auto* construct = app.add_subcommand("construct", "Build a certified measurement");
  construct->add_option("--model", ma.model, "rank-bounded, fixed-spectrum, bob-up1 or bob-up2")->required();
  construct->add_option("--n", ma.n, "Hilbert space dimension (dB for bob models)");
  construct->add_option("--r", ma.r, "Rank bound or Schmidt rank");
  construct->add_option("--da", ma.da, "First-factor dimension for bob models (default r)");
  construct->add_option("--spectrum", ma.spectrum, "Eigenvalues for fixed-spectrum");
  construct->add_option("--alpha", ma.alpha, "Schmidt coefficients for bob models (normalized)");
  construct->add_option("--mode", ma.mode, "random-certified or vandermonde");
  construct->add_option("--restarts", ma.restarts, "Certification restarts")->check(CLI::PositiveNumber);
  construct->add_option("--out", ma.out, "Measurement document path");
  construct->add_option("--seed", seed, "Seed");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Sampling checks of injectivity and immersion");
  verify->add_option("--measurement", va.measurement, "Measurement document")->required();
  verify->add_option("--pairs", va.pairs, "State pairs")->check(CLI::PositiveNumber);
  verify->add_option("--points", va.points, "Tangent-space points")->check(CLI::NonNegativeNumber);
  verify->add_option("--out", va.out, "Report path");
  verify->add_option("--seed", seed, "Seed");

  ReconstructArgs ra;
  auto* reconstruct = app.add_subcommand("reconstruct", "Recover M from bob-up2 outcomes");
  reconstruct->add_option("--measurement", ra.measurement, "bob-up2 measurement document")->required();
  reconstruct->add_option("--outcomes", ra.outcomes, "Outcome document");
  reconstruct->add_flag("--simulate", ra.simulate, "Generate outcomes from a seeded Haar unitary");
  reconstruct->add_option("--planted-zeros", ra.planted_zeros, "Leading zeros in the simulated first row");
  reconstruct->add_option("--write-outcomes", ra.write_outcomes, "Save simulated outcomes");
  reconstruct->add_option("--seed", seed, "Seed");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }

  const std::string command = join_args(args);
  try {
    if (*tables) return cmd_tables(ta, format, command, out, err);
    if (*verify) return cmd_verify(va, seed, threads, format, command, out);
    Emitter em(format, command);
    int code = kOk;
    if (*bounds) {
      code = cmd_bounds(ba, em);
    } else if (*construct) {
      code = cmd_construct(ma, seed, threads, em);
    } else {
      code = cmd_reconstruct(ra, seed, em);
    }
    em.flush(out);
    return code;
  } catch (const CertificationError& e) {
    err << "certification failed: " << e.what() << "\n";
    return kCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed document: " << e.what() << "\n";
    return kUsageError;
  }
}

}  // namespace qtopo::cli
