#include <gtest/gtest.h>

#include "qtopo/errors.h"
#include "qtopo/tables.h"

namespace qtopo {
namespace {

const std::string kDataDir = QTOPO_TEST_DATA_DIR;

TEST(Tables, IdsRoundTrip) {
  for (TableId id : all_tables()) EXPECT_EQ(parse_table_id(table_name(id)), id);
  EXPECT_THROW(parse_table_id("wn2"), DomainError);
}

TEST(Tables, CellCounts) {
  EXPECT_EQ(compute_table(TableId::kWn1).cells.size(), 16u);
  EXPECT_EQ(compute_table(TableId::kWnk).cells.size(), 77u);
  EXPECT_EQ(compute_table(TableId::kFlag).cells.size(), 12u);
  EXPECT_EQ(compute_table(TableId::kStiefel).cells.size(), 14u);
}

TEST(Tables, ShippedGoldensMatch) {
  for (TableId id : all_tables()) {
    const TableDiff d = reproduce_table(id, load_golden(golden_path(kDataDir, id)));
    EXPECT_TRUE(d.ok()) << table_name(id);
    EXPECT_EQ(d.compared(), static_cast<int>(compute_table(id).cells.size()));
  }
  const TableDiff wn1 = reproduce_table(TableId::kWn1, load_golden(golden_path(kDataDir, TableId::kWn1)));
  EXPECT_EQ(wn1.reference_only, 16);
}

TEST(Tables, CorruptedCellIsReported) {
  GoldenTable g = load_golden(golden_path(kDataDir, TableId::kStiefel));
  for (auto& c : g.cells) {
    if (c.row == "9" && c.col == "5") c.value = "64/71;112;105";
  }
  const TableDiff d = reproduce_table(TableId::kStiefel, g);
  EXPECT_FALSE(d.ok());
  EXPECT_EQ(d.mismatched, 1);
  int found = 0;
  for (const auto& c : d.cells) {
    if (c.status == CellStatus::kMismatch) {
      EXPECT_EQ(c.row, "9");
      EXPECT_EQ(c.col, "5");
      EXPECT_EQ(c.expected, "64/71;112;105");
      EXPECT_EQ(c.computed, "64/70;111;105");
      ++found;
    }
  }
  EXPECT_EQ(found, 1);
}

TEST(Tables, MissingCellsAreMismatches) {
  GoldenTable g = load_golden(golden_path(kDataDir, TableId::kFlag));
  g.cells.pop_back();
  g.cells.push_back({"99", "2", "1/1;1", {}, false});
  const TableDiff d = reproduce_table(TableId::kFlag, g);
  EXPECT_EQ(d.mismatched, 2);
}

TEST(Tables, BlessRoundTripKeepsReferenceCells) {
  const GoldenTable before = load_golden(golden_path(kDataDir, TableId::kWn1));
  const std::string text = format_golden(compute_table(TableId::kWn1), &before);
  const GoldenTable after = parse_golden(text);
  EXPECT_EQ(after.header_comments, before.header_comments);
  int ref = 0;
  for (const auto& c : after.cells) ref += c.reference_only;
  EXPECT_EQ(ref, 16);
  EXPECT_TRUE(reproduce_table(TableId::kWn1, after).ok());
  const GoldenTable st = parse_golden(format_golden(compute_table(TableId::kStiefel), nullptr));
  EXPECT_TRUE(reproduce_table(TableId::kStiefel, st).ok());
}

TEST(Tables, ParseErrors) {
  EXPECT_THROW(parse_golden("# only a comment\n"), SchemaError);
  EXPECT_THROW(parse_golden("1 2 3\ntable wn1\n"), SchemaError);
  EXPECT_THROW(parse_golden("table wn1\n1 2\n"), SchemaError);
  EXPECT_THROW(parse_golden("table wn1\n1 2 3 extra\n"), SchemaError);
  EXPECT_THROW(parse_golden("table wn1\ntable wn1\n"), SchemaError);
  EXPECT_THROW(parse_golden("table nope\n"), DomainError);
  EXPECT_THROW(load_golden("/nonexistent/qtopo/wn1.txt"), Error);
}

}  // namespace
}  // namespace qtopo
