#include "bod/table.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iterator>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "bod/error.hpp"

namespace bod {

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view ws = " \t\r\n\v\f";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

std::string describe_cell(const std::string& dataset, std::size_t data_row,
                          const std::string& attribute) {
  std::ostringstream os;
  os << "dataset '" << dataset << "', row " << data_row << ", column '" << attribute << "'";
  return os.str();
}

void check_cell(double value, const std::string& dataset, std::size_t data_row,
                const std::string& attribute) {
  if (!std::isfinite(value)) {
    throw Error(Errc::NonNumericCell,
                "non-finite value at " + describe_cell(dataset, data_row, attribute));
  }
  if (value <= 0.0) {
    throw Error(Errc::NonPositiveValue, "value " + format_number(value) +
                                            " is not strictly positive at " +
                                            describe_cell(dataset, data_row, attribute));
  }
}

}  // namespace

Dataset parse_dataset(std::string_view source, std::string name) {
  if (source.starts_with("\xEF\xBB\xBF")) source.remove_prefix(3);

  Dataset ds;
  ds.name = std::move(name);
  bool have_header = false;
  std::size_t data_row = 0;

  std::size_t pos = 0;
  while (pos <= source.size()) {
    auto eol = source.find('\n', pos);
    if (eol == std::string_view::npos) eol = source.size();
    const std::string_view line = source.substr(pos, eol - pos);
    pos = eol + 1;
    if (trim(line).empty()) continue;

    const auto cells = split_cells(line);
    if (!have_header) {
      std::set<std::string_view> seen;
      for (auto cell : cells) {
        if (cell.empty()) {
          throw Error(Errc::EmptyInput, "dataset '" + ds.name + "' has an empty attribute name");
        }
        if (!seen.insert(cell).second) {
          throw Error(Errc::DuplicateAttribute, "dataset '" + ds.name +
                                                    "' declares attribute '" +
                                                    std::string(cell) + "' twice");
        }
        ds.attributes.emplace_back(cell);
      }
      have_header = true;
      continue;
    }

    ++data_row;
    if (cells.size() != ds.attributes.size()) {
      std::ostringstream os;
      os << "dataset '" << ds.name << "', row " << data_row << " has " << cells.size()
         << " cells, expected " << ds.attributes.size();
      throw Error(Errc::MissingCell, os.str());
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
      const auto cell = cells[c];
      if (cell.empty()) {
        throw Error(Errc::MissingCell,
                    "empty cell at " + describe_cell(ds.name, data_row, ds.attributes[c]));
      }
      double value = 0.0;
      const auto* begin = cell.data();
      const auto* end = cell.data() + cell.size();
      if (*begin == '+') ++begin;
      const auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc{} || ptr != end) {
        throw Error(Errc::NonNumericCell, "cannot parse '" + std::string(cell) + "' at " +
                                              describe_cell(ds.name, data_row, ds.attributes[c]));
      }
      check_cell(value, ds.name, data_row, ds.attributes[c]);
      row.push_back(value);
    }
    ds.rows.push_back(std::move(row));
  }

  if (!have_header) throw Error(Errc::EmptyInput, "dataset '" + ds.name + "' has no header");
  if (ds.rows.empty()) throw Error(Errc::EmptyInput, "dataset '" + ds.name + "' has no data rows");
  return ds;
}

Dataset parse_dataset(std::istream& source, std::string name) {
  std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  return parse_dataset(std::string_view(text), std::move(name));
}

void validate_dataset(const Dataset& dataset) {
  if (dataset.attributes.empty()) {
    throw Error(Errc::EmptyInput, "dataset '" + dataset.name + "' has no attributes");
  }
  if (dataset.rows.empty()) {
    throw Error(Errc::EmptyInput, "dataset '" + dataset.name + "' has no data rows");
  }
  std::set<std::string_view> seen;
  for (const auto& a : dataset.attributes) {
    if (a.empty()) {
      throw Error(Errc::EmptyInput, "dataset '" + dataset.name + "' has an empty attribute name");
    }
    if (!seen.insert(a).second) {
      throw Error(Errc::DuplicateAttribute,
                  "dataset '" + dataset.name + "' declares attribute '" + a + "' twice");
    }
  }
  for (std::size_t r = 0; r < dataset.rows.size(); ++r) {
    const auto& row = dataset.rows[r];
    if (row.size() != dataset.attributes.size()) {
      std::ostringstream os;
      os << "dataset '" << dataset.name << "', row " << r + 1 << " has " << row.size()
         << " cells, expected " << dataset.attributes.size();
      throw Error(Errc::MissingCell, os.str());
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      check_cell(row[c], dataset.name, r + 1, dataset.attributes[c]);
    }
  }
}

std::vector<double> column_maxima(const Matrix& raw) {
  std::vector<double> out(raw.cols(), 0.0);
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < raw.cols(); ++c) out[c] = std::max(out[c], raw(r, c));
  }
  return out;
}

Matrix scale_columns(const Matrix& raw, std::span<const double> col_max) {
  Matrix scaled(raw.rows(), raw.cols());
  for (std::size_t r = 0; r < raw.rows(); ++r) {
    for (std::size_t c = 0; c < raw.cols(); ++c) scaled(r, c) = raw(r, c) / col_max[c];
  }
  return scaled;
}

AugmentedTable augment(std::span<const Dataset> datasets) {
  if (datasets.empty()) throw Error(Errc::NoDatasets, "at least one dataset is required");

  for (const auto& ds : datasets) validate_dataset(ds);

  const std::size_t rows = datasets.front().row_count();
  if (std::any_of(datasets.begin(), datasets.end(),
                  [rows](const Dataset& ds) { return ds.row_count() != rows; })) {
    std::ostringstream os;
    os << "datasets must have equal row counts:";
    for (const auto& ds : datasets) os << " " << ds.name << "=" << ds.row_count();
    throw Error(Errc::RowCountMismatch, os.str());
  }

  AugmentedTable table;
  std::set<std::string> names;
  std::set<std::string> qualified;
  for (const auto& ds : datasets) {
    if (!names.insert(ds.name).second) {
      throw Error(Errc::DuplicateAttribute, "dataset name '" + ds.name + "' used twice");
    }
    DatasetPartition part{ds.name, ds.attributes, table.columns_.size()};
    for (const auto& attr : ds.attributes) {
      ColumnRef ref{ds.name, attr, ds.name + "." + attr, table.columns_.size()};
      if (!qualified.insert(ref.qualified_name).second) {
        throw Error(Errc::DuplicateAttribute,
                    "qualified column name '" + ref.qualified_name + "' is ambiguous");
      }
      table.columns_.push_back(std::move(ref));
    }
    table.partitions_.push_back(std::move(part));
  }

  const std::size_t d = table.columns_.size();
  table.raw_ = Matrix(rows, d);
  for (const auto& part : table.partitions_) {
    const auto& ds = *std::find_if(datasets.begin(), datasets.end(),
                                   [&](const Dataset& x) { return x.name == part.name; });
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < part.width(); ++c) {
        table.raw_(r, part.first_column + c) = ds.rows[r][c];
      }
    }
  }

  table.col_max_ = column_maxima(table.raw_);
  table.scaled_ = scale_columns(table.raw_, table.col_max_);
  table.utility_.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    double sum = 0.0;
    for (double v : table.scaled_.row(r)) sum += v;
    table.utility_[r] = sum;
  }
  return table;
}

std::size_t AugmentedTable::find_dataset(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < partitions_.size(); ++i) {
    if (partitions_[i].name == name) return i;
  }
  return npos;
}

std::size_t AugmentedTable::find_column(std::string_view dataset,
                                        std::string_view attribute) const noexcept {
  const auto p = find_dataset(dataset);
  if (p == npos) return npos;
  const auto& part = partitions_[p];
  for (std::size_t i = 0; i < part.width(); ++i) {
    if (part.attributes[i] == attribute) return part.first_column + i;
  }
  return npos;
}

double total_utility(const AugmentedTable& table, TupleId id) {
  if (id >= table.tuple_count()) {
    throw Error(Errc::UnknownTuple, "tuple " + std::to_string(id) + " does not exist");
  }
  return table.utility(id);
}

Dataset project_partition(const AugmentedTable& table, std::size_t partition) {
  const auto& part = table.partitions().at(partition);
  Dataset ds{part.name, part.attributes, {}};
  ds.rows.reserve(table.tuple_count());
  for (std::size_t r = 0; r < table.tuple_count(); ++r) {
    const auto row = table.raw().row(r).subspan(part.first_column, part.width());
    ds.rows.emplace_back(row.begin(), row.end());
  }
  return ds;
}

void write_subset_csv(std::ostream& out, const AugmentedTable& table, const TupleSubset& subset) {
  out << "tuple_id";
  for (const auto& col : table.columns()) out << ',' << col.qualified_name;
  out << ",utility\n";
  char buf[64];
  for (TupleId id : subset.tuple_ids) {
    out << id;
    for (double v : table.raw().row(id)) out << ',' << format_number(v);
    std::snprintf(buf, sizeof buf, "%.6f", total_utility(table, id));
    out << ',' << buf << '\n';
  }
}

std::string table_digest(const AugmentedTable& table) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  auto mix_u64 = [&mix](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(v >> (8 * i)));
  };
  mix_u64(table.tuple_count());
  mix_u64(table.column_count());
  for (const auto& col : table.columns()) {
    for (char ch : col.qualified_name) mix(static_cast<unsigned char>(ch));
    mix(0);
  }
  for (std::size_t r = 0; r < table.tuple_count(); ++r) {
    for (double v : table.raw().row(r)) mix_u64(std::bit_cast<std::uint64_t>(v));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

}  // namespace bod
