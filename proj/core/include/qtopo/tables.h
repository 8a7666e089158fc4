#pragma once

// Reproduction of the four published bound tables and a cell-by-cell diff
// against golden copies stored as text files.
//
// Golden file format: '#' starts a comment; one "table <name>" line; then one
// cell per line, "<row> <column> <value> [reference-only]".
//
// Conventions applied when comparing:
//   wn1      value = max non-immersion dimension of PW_{n,1}
//   wnk      column label r means Schmidt rank k = r - 1
//   flag     row l, column k is the partition (l, 1 x k); the value is
//            "dim/min immersion dim;fixed-spectrum upper bound"
//   stiefel  row n, column r; "dim/max non-immersion;up1;up2", where up1 for
//            2r >= n may match the n^2+4n-5 table variant

#include <string>
#include <vector>

namespace qtopo {

enum class TableId { kWn1, kWnk, kFlag, kStiefel };

TableId parse_table_id(const std::string& name);  // throws DomainError
std::string table_name(TableId id);
std::vector<TableId> all_tables();

struct TableCell {
  std::string row;
  std::string col;
  std::string value;
  std::string alt_value;  // accepted variant, empty if none
  bool reference_only = false;
};

struct ComputedTable {
  TableId id;
  std::vector<TableCell> cells;
};

ComputedTable compute_table(TableId id);

struct GoldenTable {
  TableId id;
  std::vector<std::string> header_comments;
  std::vector<TableCell> cells;
};

std::string golden_path(const std::string& data_dir, TableId id);
// Throws Error if the file is missing, SchemaError if malformed.
GoldenTable load_golden(const std::string& path);
GoldenTable parse_golden(const std::string& text);
// Golden text for a computed table; reference-only cells and header comments
// are carried over from `previous` when given.
std::string format_golden(const ComputedTable& t, const GoldenTable* previous);

enum class CellStatus { kMatch, kMatchTableVariant, kMismatch, kReferenceOnly, kMissingComputed, kMissingGolden };
std::string status_name(CellStatus s);

struct CellDiff {
  std::string row;
  std::string col;
  std::string expected;
  std::string computed;
  CellStatus status;
};

struct TableDiff {
  TableId id;
  std::vector<CellDiff> cells;
  int matched = 0;
  int matched_variant = 0;
  int mismatched = 0;
  int reference_only = 0;
  int compared() const { return matched + matched_variant + mismatched; }
  bool ok() const { return mismatched == 0; }
};

TableDiff diff_table(const ComputedTable& computed, const GoldenTable& golden);
TableDiff reproduce_table(TableId id, const GoldenTable& golden);

}  // namespace qtopo
