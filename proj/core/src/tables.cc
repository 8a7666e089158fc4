#include "qtopo/tables.h"

#include <map>
#include <sstream>

#include "qtopo/errors.h"
#include "qtopo/serialize.h"
#include "qtopo/topo_bounds.h"

namespace qtopo {

namespace {

std::string str(Int v) { return std::to_string(v); }

void add(ComputedTable& t, Int row, Int col, std::string value, std::string alt = {}) {
  t.cells.push_back({str(row), str(col), std::move(value), std::move(alt), false});
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> default_header(TableId id) {
  switch (id) {
    case TableId::kWn1:
      return {"lower bounds on the immersion dimension of CP^{n-1} = PW_{n,1}, n = 2..17",
              "cell: <n> lower <max non-immersion dim>",
              "cells marked reference-only are literature upper bounds (Milgram), never computed"};
    case TableId::kWnk:
      return {"lower bounds on the immersion dimension of PW_{n,k}",
              "cell: <n> <column label r> <max non-immersion dim>, Schmidt rank k = r - 1"};
    case TableId::kFlag:
      return {"bounds for U(l+k)/U(l)xU(1)^k",
              "cell: <l> <k> <dim>/<min immersion dim>;<fixed-spectrum POVM dimension>"};
    case TableId::kStiefel:
      return {"dimension, lower bound and scheme dimensions for PW_{n,r}",
              "cell: <n> <r> <dim>/<max non-immersion dim>;<up1>;<up2>",
              "up1 entries with 2r >= n are printed as n^2+4n-5"};
  }
  return {};
}

}  // namespace

TableId parse_table_id(const std::string& name) {
  if (name == "wn1") return TableId::kWn1;
  if (name == "wnk") return TableId::kWnk;
  if (name == "flag") return TableId::kFlag;
  if (name == "stiefel") return TableId::kStiefel;
  throw DomainError("unknown table '" + name + "' (expected wn1, wnk, flag or stiefel)");
}

std::string table_name(TableId id) {
  switch (id) {
    case TableId::kWn1: return "wn1";
    case TableId::kWnk: return "wnk";
    case TableId::kFlag: return "flag";
    case TableId::kStiefel: return "stiefel";
  }
  return "?";
}

std::vector<TableId> all_tables() { return {TableId::kWn1, TableId::kWnk, TableId::kFlag, TableId::kStiefel}; }

std::string status_name(CellStatus s) {
  switch (s) {
    case CellStatus::kMatch: return "match";
    case CellStatus::kMatchTableVariant: return "match_table_variant";
    case CellStatus::kMismatch: return "mismatch";
    case CellStatus::kReferenceOnly: return "reference_only";
    case CellStatus::kMissingComputed: return "missing_computed";
    case CellStatus::kMissingGolden: return "missing_golden";
  }
  return "?";
}

ComputedTable compute_table(TableId id) {
  ComputedTable t{id, {}};
  switch (id) {
    case TableId::kWn1:
      for (Int n = 2; n <= 17; ++n) {
        t.cells.push_back({str(n), "lower", str(stiefel_bounds(StiefelParams(n, 1)).max_non_immersion_dim), {}, false});
      }
      break;
    case TableId::kWnk:
      for (Int n = 2; n <= 12; ++n) {
        for (Int k = 1; k <= n; ++k) add(t, n, k + 1, str(stiefel_bounds(StiefelParams(n, k)).max_non_immersion_dim));
      }
      break;
    case TableId::kFlag:
      for (Int l = 5; l <= 10; ++l) {
        const Int kmax = 2 + (l - 5) / 2;
        for (Int k = 2; k <= kmax; ++k) {
          std::vector<Int> parts{l};
          parts.insert(parts.end(), static_cast<std::size_t>(k), 1);
          const BoundReport rep = flag_bounds(FlagPartition(parts));
          add(t, l, k,
              str(rep.manifold_dim) + "/" + str(rep.min_immersion_dim()) + ";" +
                  str(rep.find_upper("fixed_spectrum_povm")->dimension));
        }
      }
      break;
    case TableId::kStiefel:
      for (Int n : {5, 9, 17, 65, 129}) {
        for (Int r : {5, 9, 17, 65}) {
          if (r > n) continue;
          const BoundReport rep = stiefel_bounds(StiefelParams(n, r));
          const std::string head = str(rep.manifold_dim) + "/" + str(rep.max_non_immersion_dim) + ";";
          const std::string tail = ";" + str(rep.find_upper("bob_up2")->dimension);
          const std::string value = head + str(rep.find_upper("bob_up1")->dimension) + tail;
          std::string alt;
          if (const UpperBound* v = rep.find_upper("bob_up1_table_variant")) alt = head + str(v->dimension) + tail;
          add(t, n, r, value, alt);
        }
      }
      break;
  }
  return t;
}

std::string golden_path(const std::string& data_dir, TableId id) {
  return data_dir + "/" + table_name(id) + ".txt";
}

GoldenTable parse_golden(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  bool have_id = false;
  GoldenTable g{TableId::kWn1, {}, {}};
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string body = line;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      body = line.substr(0, hash);
      if (!have_id && g.cells.empty() && split_ws(body).empty()) {
        std::string c = line.substr(hash + 1);
        if (!c.empty() && c.front() == ' ') c.erase(0, 1);
        g.header_comments.push_back(c);
      }
    }
    const std::vector<std::string> tok = split_ws(body);
    if (tok.empty()) continue;
    if (tok[0] == "table") {
      if (tok.size() != 2 || have_id) throw SchemaError("golden line " + std::to_string(lineno) + ": bad table line");
      g.id = parse_table_id(tok[1]);
      have_id = true;
      continue;
    }
    if (!have_id) throw SchemaError("golden line " + std::to_string(lineno) + ": cell before table line");
    if (tok.size() < 3 || tok.size() > 4 || (tok.size() == 4 && tok[3] != "reference-only")) {
      throw SchemaError("golden line " + std::to_string(lineno) + ": expected <row> <col> <value> [reference-only]");
    }
    g.cells.push_back({tok[0], tok[1], tok[2], {}, tok.size() == 4});
  }
  if (!have_id) throw SchemaError("golden file has no table line");
  return g;
}

GoldenTable load_golden(const std::string& path) { return parse_golden(read_file(path)); }

std::string format_golden(const ComputedTable& t, const GoldenTable* previous) {
  std::ostringstream os;
  const std::vector<std::string> header =
      previous && !previous->header_comments.empty() ? previous->header_comments : default_header(t.id);
  for (const auto& h : header) os << "# " << h << "\n";
  os << "table " << table_name(t.id) << "\n";
  for (const auto& c : t.cells) {
    // A blessed file records the printed convention, so variants win.
    os << c.row << " " << c.col << " " << (c.alt_value.empty() ? c.value : c.alt_value) << "  # blessed\n";
  }
  if (previous) {
    for (const auto& c : previous->cells) {
      if (c.reference_only) os << c.row << " " << c.col << " " << c.value << " reference-only  # literature constant\n";
    }
  }
  return os.str();
}

TableDiff diff_table(const ComputedTable& computed, const GoldenTable& golden) {
  if (computed.id != golden.id) throw DomainError("diff_table: table ids differ");
  TableDiff d;
  d.id = computed.id;
  std::map<std::pair<std::string, std::string>, const TableCell*> by_key;
  for (const auto& c : computed.cells) by_key[{c.row, c.col}] = &c;
  std::map<std::pair<std::string, std::string>, bool> seen;
  for (const auto& g : golden.cells) {
    if (g.reference_only) {
      d.cells.push_back({g.row, g.col, g.value, "", CellStatus::kReferenceOnly});
      ++d.reference_only;
      continue;
    }
    seen[{g.row, g.col}] = true;
    auto it = by_key.find({g.row, g.col});
    if (it == by_key.end()) {
      d.cells.push_back({g.row, g.col, g.value, "", CellStatus::kMissingComputed});
      ++d.mismatched;
      continue;
    }
    const TableCell& c = *it->second;
    CellStatus st = CellStatus::kMismatch;
    if (c.value == g.value) {
      st = CellStatus::kMatch;
      ++d.matched;
    } else if (!c.alt_value.empty() && c.alt_value == g.value) {
      st = CellStatus::kMatchTableVariant;
      ++d.matched_variant;
    } else {
      ++d.mismatched;
    }
    d.cells.push_back({g.row, g.col, g.value, c.value, st});
  }
  for (const auto& c : computed.cells) {
    if (!seen.count({c.row, c.col})) {
      d.cells.push_back({c.row, c.col, "", c.value, CellStatus::kMissingGolden});
      ++d.mismatched;
    }
  }
  return d;
}

TableDiff reproduce_table(TableId id, const GoldenTable& golden) { return diff_table(compute_table(id), golden); }

}  // namespace qtopo
