#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "json.hpp"

#include "bod/engine.hpp"
#include "bod/table.hpp"

namespace bod {

/// Draws uniformly from [lo, hi] using Lemire's multiply-shift with
/// rejection, so the sequence depends only on the mt19937_64 output stream
/// (which the standard fixes bit-for-bit) and not on the library's
/// distribution implementation.
std::uint64_t uniform_uint(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi);

/// Uniform double in (0, 1].
double uniform_open01(std::mt19937_64& rng);

struct SynthConfig {
  std::size_t n_datasets = 3;
  std::vector<std::size_t> attrs_per_dataset{3, 3, 3};
  std::size_t n_tuples = 10000;
  std::uint64_t value_min = 1;
  std::uint64_t value_max = 1000;
  std::uint64_t seed = 0;

  std::size_t total_attributes() const;
  std::size_t widest_dataset() const;

  /// Throws InvalidConfig.
  void validate() const;
};

/// Spreads `d` attributes over `n_datasets` as evenly as possible, with the
/// earlier datasets taking the remainder: (7, 3) -> {3, 2, 2}.
std::vector<std::size_t> split_attributes(std::size_t d, std::size_t n_datasets);

/// Datasets "ds1".."dsN" with attributes "a1".."aK"; every cell an
/// independent uniform integer draw. Fully determined by config.seed.
std::vector<Dataset> generate_synthetic(const SynthConfig& config);

/// Hidden linear preference used in place of a human.
struct SimulatedUser {
  std::vector<double> weights;  // one per augmented column, all > 0

  static SimulatedUser random(std::size_t columns, std::uint64_t seed);
  static SimulatedUser uniform(std::size_t columns);
};

/// Picks, for each pending dataset, its unranked attribute of highest weight
/// (first listed on ties). Throws SessionFinished.
RoundChoice simulate_ranking(const SimulatedUser& user, const Session& session);

struct BenchRow {
  std::size_t n_datasets = 0;
  std::size_t d = 0;
  std::size_t n_tuples = 0;
  std::uint64_t seed = 0;
  std::size_t rep = 0;
  std::size_t rounds = 0;
  std::size_t questions = 0;
  double elapsed_ms = 0.0;
  std::size_t survivors = 0;
};

struct BenchAggregate {
  std::size_t config_index = 0;
  std::size_t d = 0;
  std::size_t n_tuples = 0;
  double min_ms = 0.0;
  double median_ms = 0.0;
  double max_ms = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<BenchAggregate> aggregates;

  double max_elapsed_ms() const;
  void write_csv(std::ostream& out) const;
  nlohmann::json to_json() const;
};

/// Runs one complete simulated session per (config, repetition). Repetition
/// r uses seed config.seed + r. Only augmentation and the session rounds are
/// timed.
BenchReport run_benchmark(std::span<const SynthConfig> sweep, std::size_t repetitions);

/// Sweep over total attribute counts d_min..d_max, split across n_datasets.
std::vector<SynthConfig> attribute_sweep(std::size_t n_datasets, std::size_t n_tuples,
                                         std::size_t d_min, std::size_t d_max,
                                         std::uint64_t seed);

/// Sweep over tuple counts at fixed d.
std::vector<SynthConfig> tuple_sweep(std::size_t n_datasets, std::size_t d,
                                     std::span<const std::size_t> tuples, std::uint64_t seed);

}  // namespace bod
