#include "qtopo/serialize.h"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qtopo/errors.h"

namespace qtopo {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json matrix_to_json(const CMatrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const ordered_json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw SchemaError("matrix must have n rows");
  CMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) throw SchemaError("matrix row must have n entries");
    for (int c = 0; c < n; ++c) {
      const auto& z = row[static_cast<std::size_t>(c)];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number()) {
        throw SchemaError("complex entries must be [re, im] pairs");
      }
      m(r, c) = Complex(z[0].get<double>(), z[1].get<double>());
    }
  }
  return m;
}

}  // namespace

std::string write_document(const MeasurementDocument& doc) {
  ordered_json j;
  j["kind"] = doc.kind;
  j["n"] = doc.n;
  ordered_json mats = ordered_json::array();
  for (const auto& m : doc.matrices) mats.push_back(matrix_to_json(m));
  j["matrices"] = std::move(mats);
  ordered_json meta;
  meta["seed"] = doc.meta.seed;
  meta["construction"] = doc.meta.construction;
  try {
    meta["params"] = ordered_json::parse(doc.meta.params_json.empty() ? "{}" : doc.meta.params_json);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("meta params are not valid JSON: ") + e.what());
  }
  j["meta"] = std::move(meta);
  return j.dump(1) + "\n";
}

std::string write_document(const Povm& p, const DocumentMeta& meta) {
  MeasurementDocument doc{"povm", p.n(), {}, meta};
  for (const auto& e : p.effects()) doc.matrices.push_back(e.matrix());
  return write_document(doc);
}

std::string write_document(const OperatorSystem& sigma, const DocumentMeta& meta) {
  MeasurementDocument doc{"operator_system", sigma.n(), {}, meta};
  for (const auto& b : sigma.basis()) doc.matrices.push_back(b.matrix());
  return write_document(doc);
}

MeasurementDocument parse_document(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("document is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("document must be an object");
  for (const char* key : {"kind", "n", "matrices", "meta"}) {
    if (!j.contains(key)) throw SchemaError(std::string("document lacks field '") + key + "'");
  }
  MeasurementDocument doc;
  if (!j["kind"].is_string()) throw SchemaError("kind must be a string");
  doc.kind = j["kind"].get<std::string>();
  if (doc.kind != "povm" && doc.kind != "operator_system") throw SchemaError("unknown kind '" + doc.kind + "'");
  if (!j["n"].is_number_integer() || j["n"].get<int>() < 1) throw SchemaError("n must be a positive integer");
  doc.n = j["n"].get<int>();
  if (!j["matrices"].is_array() || j["matrices"].empty()) throw SchemaError("matrices must be a nonempty array");
  for (const auto& m : j["matrices"]) doc.matrices.push_back(matrix_from_json(m, doc.n));
  const auto& meta = j["meta"];
  if (!meta.is_object()) throw SchemaError("meta must be an object");
  if (meta.contains("seed")) {
    if (!meta["seed"].is_number_unsigned() && !meta["seed"].is_number_integer()) throw SchemaError("seed must be an integer");
    doc.meta.seed = meta["seed"].get<std::uint64_t>();
  }
  if (meta.contains("construction")) doc.meta.construction = meta["construction"].get<std::string>();
  doc.meta.params_json = meta.contains("params") ? meta["params"].dump() : "{}";
  return doc;
}

Povm document_to_povm(const MeasurementDocument& doc) {
  if (doc.kind != "povm") throw SchemaError("expected a povm document");
  std::vector<HermitianOperator> effects;
  try {
    for (const auto& m : doc.matrices) effects.emplace_back(m);
    return Povm(std::move(effects));
  } catch (const DomainError& e) {
    throw SchemaError(std::string("invalid POVM: ") + e.what());
  }
}

OperatorSystem document_to_system(const MeasurementDocument& doc) {
  std::vector<HermitianOperator> ops;
  try {
    for (const auto& m : doc.matrices) ops.emplace_back(m);
  } catch (const DomainError& e) {
    throw SchemaError(std::string("invalid operator: ") + e.what());
  }
  return OperatorSystem::from_span(doc.n, ops);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw Error("write to '" + path + "' failed");
}

}  // namespace qtopo
