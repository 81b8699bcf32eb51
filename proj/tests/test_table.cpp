#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "bod/error.hpp"
#include "bod/table.hpp"
#include "support.hpp"

using namespace bod;
using bod::testing::paper_datasets;
using bod::testing::paper_table;

namespace {

Errc error_code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected bod::Error");
  return Errc::Io;
}

}  // namespace

TEST_CASE("parse_dataset reads the location table") {
  const auto ds = parse_dataset(
      "Near Urban,Criminal Free\n26,5\n35,2\n45,3\n9,2\n6,4\n47,7\n", "location");
  CHECK(ds.name == "location");
  CHECK(ds.attributes == std::vector<std::string>{"Near Urban", "Criminal Free"});
  REQUIRE(ds.row_count() == 6);
  CHECK(ds.rows[0] == std::vector<double>{26, 5});
  CHECK(ds.rows[5] == std::vector<double>{47, 7});
}

TEST_CASE("parse_dataset minimal input and whitespace") {
  const auto ds = parse_dataset("Tax\n90", "policies");
  CHECK(ds.attributes.size() == 1);
  CHECK(ds.row_count() == 1);

  const auto padded = parse_dataset("\xEF\xBB\xBF a , b \r\n 1.5 , 2e1 \r\n\r\n", "p");
  CHECK(padded.attributes == std::vector<std::string>{"a", "b"});
  CHECK(padded.rows[0] == std::vector<double>{1.5, 20.0});

  std::istringstream in("x\n3\n");
  CHECK(parse_dataset(in, "s").rows[0][0] == 3.0);
}

TEST_CASE("parse_dataset errors") {
  CHECK(error_code_of([] { parse_dataset("Tax\n0\n", "p"); }) == Errc::NonPositiveValue);
  CHECK(error_code_of([] { parse_dataset("Tax\n-4\n", "p"); }) == Errc::NonPositiveValue);
  CHECK(error_code_of([] { parse_dataset("", "p"); }) == Errc::EmptyInput);
  CHECK(error_code_of([] { parse_dataset("Tax\n", "p"); }) == Errc::EmptyInput);
  CHECK(error_code_of([] { parse_dataset("Tax\nabc\n", "p"); }) == Errc::NonNumericCell);
  CHECK(error_code_of([] { parse_dataset("Tax\n12x\n", "p"); }) == Errc::NonNumericCell);
  CHECK(error_code_of([] { parse_dataset("Tax\ninf\n", "p"); }) == Errc::NonNumericCell);
  CHECK(error_code_of([] { parse_dataset("a,b\n1\n", "p"); }) == Errc::MissingCell);
  CHECK(error_code_of([] { parse_dataset("a,b\n1,\n", "p"); }) == Errc::MissingCell);
  CHECK(error_code_of([] { parse_dataset("a,b\n1,2,3\n", "p"); }) == Errc::MissingCell);
  CHECK(error_code_of([] { parse_dataset("a,a\n1,2\n", "p"); }) == Errc::DuplicateAttribute);
}

TEST_CASE("parse errors name the offending cell") {
  try {
    parse_dataset("a,b\n1,2\n3,zz\n", "d");
    FAIL("no throw");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("'b'") != std::string::npos);
  }
}

TEST_CASE("augment concatenates the example datasets") {
  const auto table = augment(paper_datasets());
  CHECK(table.column_count() == 5);
  CHECK(table.tuple_count() == 6);
  std::vector<std::string> names;
  for (const auto& c : table.columns()) names.push_back(c.qualified_name);
  CHECK(names == std::vector<std::string>{"location.Near Urban", "location.Criminal Free",
                                          "policies.Tax", "home_values.Size", "home_values.Age"});
  CHECK(table.columns()[3].column_index == 3);
  CHECK(table.partitions()[2].first_column == 3);
  CHECK(table.raw()(2, 4) == 95.0);
  CHECK(table.find_column("home_values", "Age") == 4);
  CHECK(table.find_column("policies", "Age") == AugmentedTable::npos);
}

TEST_CASE("augment of a single one-attribute dataset is the identity") {
  const std::vector<Dataset> one{{"p", {"Tax"}, {{90}, {20}}}};
  const auto table = augment(one);
  CHECK(table.column_count() == 1);
  CHECK(table.raw()(0, 0) == 90.0);
  CHECK(table.raw()(1, 0) == 20.0);
  CHECK(total_utility(table, 1) == doctest::Approx(20.0 / 90.0));
  CHECK(total_utility(table, 1) == table.scaled()(1, 0));
}

TEST_CASE("augment errors") {
  CHECK(error_code_of([] { augment(std::vector<Dataset>{}); }) == Errc::NoDatasets);

  std::vector<Dataset> mismatched{{"a", {"x"}, {{1}, {2}, {3}, {4}, {5}, {6}}},
                                  {"b", {"y"}, {{1}, {2}, {3}, {4}, {5}}}};
  try {
    augment(mismatched);
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RowCountMismatch);
    CHECK(std::string(e.what()).find("a=6 b=5") != std::string::npos);
  }

  std::vector<Dataset> same_name{{"a", {"x"}, {{1}}}, {"a", {"y"}, {{1}}}};
  CHECK(error_code_of([&] { augment(same_name); }) == Errc::DuplicateAttribute);

  std::vector<Dataset> ambiguous{{"a.b", {"c"}, {{1}}}, {"a", {"b.c"}, {{1}}}};
  CHECK(error_code_of([&] { augment(ambiguous); }) == Errc::DuplicateAttribute);

  std::vector<Dataset> bad_value{{"a", {"x"}, {{1}, {0}}}};
  CHECK(error_code_of([&] { augment(bad_value); }) == Errc::NonPositiveValue);
}

TEST_CASE("scale_columns reproduces the scaled example table") {
  const auto table = paper_table();
  // Scaled table as printed, two decimals.
  const double printed[6][5] = {{0.55, 0.71, 1, 0.75, 1},     {0.74, 0.29, 0.22, 0.65, 0.8},
                                {0.96, 0.43, 0.87, 1, 0.63},  {0.19, 0.29, 0.51, 0.85, 0.33},
                                {0.13, 0.57, 0.72, 0.9, 0.17}, {1, 1, 0.33, 0.73, 0.5}};
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 5; ++c) {
      CHECK(std::abs(table->scaled()(r, c) - printed[r][c]) <= 0.01);
    }
  }
  CHECK(table->scaled()(0, 2) == 1.0);  // House 1 Tax

  // Full-precision House 3 row, computed independently from the raw table.
  const double house3[5] = {0.957446808510638, 0.428571428571429, 0.866666666666667, 1.0,
                            0.633333333333333};
  for (std::size_t c = 0; c < 5; ++c) {
    CHECK(std::abs(table->scaled()(2, c) - house3[c]) < 1e-9);
  }
  CHECK(std::abs(total_utility(*table, 2) - 3.886018237082067) < 1e-9);
}

TEST_CASE("total_utility matches the printed sums") {
  const auto table = paper_table();
  const double printed[6] = {4.01, 2.7, 3.89, 2.17, 2.49, 3.56};
  const double exact[6] = {4.017477203647417, 2.702617359000338, 3.886018237082067,
                           2.171648091860858, 2.487977034785545, 3.5583333333333336};
  for (TupleId id = 0; id < 6; ++id) {
    CHECK(std::abs(total_utility(*table, id) - printed[id]) <= 0.01);
    CHECK(std::abs(total_utility(*table, id) - exact[id]) < 1e-9);
  }
  CHECK_THROWS_AS(total_utility(*table, 6), Error);
}

TEST_CASE("tied column maxima all scale to one") {
  const std::vector<Dataset> ds{{"a", {"x"}, {{5}, {5}, {2}}}};
  const auto table = augment(ds);
  CHECK(table.scaled()(0, 0) == 1.0);
  CHECK(table.scaled()(1, 0) == 1.0);
  CHECK(table.scaled()(2, 0) == 0.4);
}

TEST_CASE("table properties over random instances") {
  std::mt19937_64 rng(20240611);
  for (int trial = 0; trial < 300; ++trial) {
    const auto datasets = bod::testing::random_datasets(rng);
    const auto table = augment(datasets);
    const auto& scaled = table.scaled();
    const std::size_t d = table.column_count();

    // Range, and every column reaches exactly one.
    for (std::size_t c = 0; c < d; ++c) {
      bool has_one = false;
      for (std::size_t r = 0; r < table.tuple_count(); ++r) {
        REQUIRE(scaled(r, c) > 0.0);
        REQUIRE(scaled(r, c) <= 1.0);
        has_one = has_one || scaled(r, c) == 1.0;
      }
      REQUIRE(has_one);
    }

    // Idempotence.
    REQUIRE(scale_columns(scaled, column_maxima(scaled)) == scaled);

    // Order preservation.
    for (std::size_t c = 0; c < d; ++c) {
      for (std::size_t a = 0; a < table.tuple_count(); ++a) {
        for (std::size_t b = 0; b < table.tuple_count(); ++b) {
          REQUIRE((table.raw()(a, c) < table.raw()(b, c)) == (scaled(a, c) < scaled(b, c)));
        }
      }
    }

    // Concatenation round-trip.
    for (std::size_t p = 0; p < datasets.size(); ++p) {
      const auto back = project_partition(table, p);
      REQUIRE(back.name == datasets[p].name);
      REQUIRE(back.attributes == datasets[p].attributes);
      REQUIRE(back.rows == datasets[p].rows);
    }

    for (TupleId id = 0; id < table.tuple_count(); ++id) {
      const double u = total_utility(table, id);
      REQUIRE(u > 0.0);
      REQUIRE(u <= static_cast<double>(d));
    }
  }
}

TEST_CASE("write_subset_csv emits raw values and six-decimal utility") {
  const auto table = paper_table();
  std::ostringstream os;
  write_subset_csv(os, *table, TupleSubset{{2, 5}});
  CHECK(os.str() ==
        "tuple_id,location.Near Urban,location.Criminal Free,policies.Tax,home_values.Size,"
        "home_values.Age,utility\n"
        "2,45,3,78,2000,95,3.886018\n"
        "5,47,7,30,1450,75,3.558333\n");
}

TEST_CASE("table_digest tracks content") {
  const auto a = augment(paper_datasets());
  auto changed = paper_datasets();
  CHECK(table_digest(a) == table_digest(augment(changed)));
  CHECK(table_digest(a).size() == 16);
  changed[1].rows[3][0] = 47;
  CHECK(table_digest(a) != table_digest(augment(changed)));
  auto renamed = paper_datasets();
  renamed[1].attributes[0] = "Taxes";
  CHECK(table_digest(a) != table_digest(augment(renamed)));
}
