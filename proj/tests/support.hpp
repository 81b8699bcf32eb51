#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "bod/engine.hpp"
#include "bod/table.hpp"

namespace bod::testing {

// Worked housing example: location (Near Urban, Criminal Free), policies
// (Tax), home_values (Size, Age); six houses.
inline std::vector<Dataset> paper_datasets() {
  return {
      {"location", {"Near Urban", "Criminal Free"}, {{26, 5}, {35, 2}, {45, 3}, {9, 2}, {6, 4}, {47, 7}}},
      {"policies", {"Tax"}, {{90}, {20}, {78}, {46}, {65}, {30}}},
      {"home_values",
       {"Size", "Age"},
       {{1500, 150}, {1300, 120}, {2000, 95}, {1700, 50}, {1800, 25}, {1450, 75}}},
  };
}

inline std::shared_ptr<const AugmentedTable> paper_table() {
  return std::make_shared<const AugmentedTable>(augment(paper_datasets()));
}

inline RoundChoice paper_round1() {
  return {{{"location", "Near Urban"}, {"policies", "Tax"}, {"home_values", "Size"}}};
}

inline RoundChoice paper_round2() {
  return {{{"location", "Criminal Free"}, {"home_values", "Age"}}};
}

struct Instance {
  std::vector<Dataset> datasets;
  std::shared_ptr<const AugmentedTable> table;
  std::vector<RoundChoice> choices;  // a complete random ranking
};

// 2-4 datasets, at most `max_columns` attributes in total, 1..max_tuples rows.
// Half of the instances draw from [1,10] so exact ties are common.
inline std::vector<Dataset> random_datasets(std::mt19937_64& rng, std::size_t max_tuples = 50,
                                            std::size_t max_columns = 8) {
  auto pick = [&rng](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  const std::size_t n_datasets = pick(2, 4);
  const std::size_t total = pick(n_datasets, std::max(n_datasets, max_columns));
  std::vector<std::size_t> widths(n_datasets, 1);
  for (std::size_t extra = total - n_datasets; extra > 0; --extra) ++widths[pick(0, n_datasets - 1)];

  const std::size_t rows = pick(1, max_tuples);
  const int hi = pick(0, 1) == 0 ? 10 : 1000;
  std::vector<Dataset> out;
  for (std::size_t k = 0; k < n_datasets; ++k) {
    Dataset ds;
    ds.name = "t" + std::to_string(k);
    for (std::size_t a = 0; a < widths[k]; ++a) ds.attributes.push_back("c" + std::to_string(a));
    ds.rows.assign(rows, std::vector<double>(widths[k]));
    for (auto& row : ds.rows) {
      for (auto& v : row) v = static_cast<double>(pick(1, hi));
    }
    out.push_back(std::move(ds));
  }
  return out;
}

inline std::vector<RoundChoice> random_ranking(std::mt19937_64& rng, const AugmentedTable& table) {
  std::vector<std::vector<std::string>> remaining;
  for (const auto& part : table.partitions()) {
    remaining.push_back(part.attributes);
    std::shuffle(remaining.back().begin(), remaining.back().end(), rng);
  }
  std::vector<RoundChoice> out;
  while (true) {
    RoundChoice choice;
    for (std::size_t p = 0; p < remaining.size(); ++p) {
      if (remaining[p].empty()) continue;
      choice.selections.emplace(table.partitions()[p].name, remaining[p].back());
      remaining[p].pop_back();
    }
    if (choice.selections.empty()) break;
    out.push_back(std::move(choice));
  }
  return out;
}

inline Instance random_instance(std::mt19937_64& rng, std::size_t max_tuples = 50,
                                std::size_t max_columns = 8) {
  Instance inst;
  inst.datasets = random_datasets(rng, max_tuples, max_columns);
  inst.table = std::make_shared<const AugmentedTable>(augment(inst.datasets));
  inst.choices = random_ranking(rng, *inst.table);
  return inst;
}

inline Session run_all(const std::shared_ptr<const AugmentedTable>& table,
                       const std::vector<RoundChoice>& choices) {
  Session session(table);
  for (const auto& c : choices) session.submit_round(c);
  return session;
}

}  // namespace bod::testing
