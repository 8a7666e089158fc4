#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qtopo/linalg.h"
#include "qtopo/opsys.h"

namespace qtopo {

struct DocumentMeta {
  std::uint64_t seed = 0;
  std::string construction;
  // A JSON object, stored verbatim.
  std::string params_json = "{}";
};

// {"kind", "n", "matrices", "meta"} in that order. Each matrix is n rows of
// n [re, im] pairs.
struct MeasurementDocument {
  std::string kind;  // "povm" or "operator_system"
  int n = 0;
  std::vector<CMatrix> matrices;
  DocumentMeta meta;
};

std::string write_document(const Povm& p, const DocumentMeta& meta);
std::string write_document(const OperatorSystem& sigma, const DocumentMeta& meta);
std::string write_document(const MeasurementDocument& doc);

// Throws SchemaError on malformed input.
MeasurementDocument parse_document(const std::string& text);

Povm document_to_povm(const MeasurementDocument& doc);
// Accepts both kinds; a POVM document yields the span of its effects.
OperatorSystem document_to_system(const MeasurementDocument& doc);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace qtopo
