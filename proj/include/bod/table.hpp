#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bod {

using TupleId = std::size_t;

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// One named source relation. Rows hold strictly positive finite values.
struct Dataset {
  std::string name;
  std::vector<std::string> attributes;
  std::vector<std::vector<double>> rows;

  std::size_t row_count() const noexcept { return rows.size(); }
};

struct ColumnRef {
  std::string dataset_name;
  std::string attribute;
  std::string qualified_name;  // "dataset.attribute"
  std::size_t column_index = 0;
};

/// Contiguous block of augmented columns contributed by one dataset.
struct DatasetPartition {
  std::string name;
  std::vector<std::string> attributes;
  std::size_t first_column = 0;

  std::size_t width() const noexcept { return attributes.size(); }
};

struct TupleSubset {
  std::vector<TupleId> tuple_ids;

  std::size_t size() const noexcept { return tuple_ids.size(); }
  bool empty() const noexcept { return tuple_ids.empty(); }
  bool operator==(const TupleSubset&) const = default;
};

/// Horizontal concatenation of several datasets with every column divided by
/// its maximum. Immutable once built; construct through augment().
class AugmentedTable {
 public:
  std::size_t tuple_count() const noexcept { return raw_.rows(); }
  std::size_t column_count() const noexcept { return columns_.size(); }

  const std::vector<ColumnRef>& columns() const noexcept { return columns_; }
  const std::vector<DatasetPartition>& partitions() const noexcept { return partitions_; }
  const Matrix& raw() const noexcept { return raw_; }
  const Matrix& scaled() const noexcept { return scaled_; }
  const std::vector<double>& col_max() const noexcept { return col_max_; }

  /// Index into partitions(), or npos.
  std::size_t find_dataset(std::string_view name) const noexcept;

  /// Column index of `attribute` within dataset `dataset`, or npos.
  std::size_t find_column(std::string_view dataset, std::string_view attribute) const noexcept;

  /// Sum of a tuple's scaled cells in column order; precomputed.
  double utility(TupleId id) const noexcept { return utility_[id]; }

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  friend AugmentedTable augment(std::span<const Dataset> datasets);

  std::vector<ColumnRef> columns_;
  std::vector<DatasetPartition> partitions_;
  Matrix raw_;
  Matrix scaled_;
  std::vector<double> col_max_;
  std::vector<double> utility_;
};

/// Parses CSV text with a header record of attribute names followed by
/// numeric records. Blank lines are ignored; cells are whitespace-trimmed.
Dataset parse_dataset(std::string_view source, std::string name);
Dataset parse_dataset(std::istream& source, std::string name);

/// Checks the Dataset invariants, throwing the matching Error.
void validate_dataset(const Dataset& dataset);

/// Column-wise maxima of a matrix.
std::vector<double> column_maxima(const Matrix& raw);

/// Divides every cell by its column maximum. No rounding is applied.
Matrix scale_columns(const Matrix& raw, std::span<const double> col_max);

AugmentedTable augment(std::span<const Dataset> datasets);

/// Equal-weight sum of the tuple's scaled values; throws UnknownTuple.
double total_utility(const AugmentedTable& table, TupleId id);

/// Raw rows of one partition, in the original dataset layout.
Dataset project_partition(const AugmentedTable& table, std::size_t partition);

/// Writes tuple_id, every raw column (qualified names) and the utility
/// (6 decimals) for each tuple of the subset, in subset order.
void write_subset_csv(std::ostream& out, const AugmentedTable& table, const TupleSubset& subset);

/// 64-bit FNV-1a over column names and raw cell bit patterns, as 16 hex chars.
std::string table_digest(const AugmentedTable& table);

/// Shortest decimal text that round-trips to `value`.
std::string format_number(double value);

}  // namespace bod
