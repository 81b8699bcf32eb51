#include "bod/synth.hpp"

#include <algorithm>
#include <chrono>
#include <ostream>

#include "bod/error.hpp"

namespace bod {

namespace {
__extension__ using u128 = unsigned __int128;
}  // namespace

std::uint64_t uniform_uint(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  const std::uint64_t range = hi - lo + 1;
  if (range == 0) return rng();
  u128 m = static_cast<u128>(rng()) * range;
  auto low = static_cast<std::uint64_t>(m);
  if (low < range) {
    const std::uint64_t threshold = (0 - range) % range;
    while (low < threshold) {
      m = static_cast<u128>(rng()) * range;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return lo + static_cast<std::uint64_t>(m >> 64);
}

double uniform_open01(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

std::size_t SynthConfig::total_attributes() const {
  std::size_t d = 0;
  for (auto n : attrs_per_dataset) d += n;
  return d;
}

std::size_t SynthConfig::widest_dataset() const {
  return attrs_per_dataset.empty()
             ? 0
             : *std::max_element(attrs_per_dataset.begin(), attrs_per_dataset.end());
}

void SynthConfig::validate() const {
  if (n_datasets == 0) throw Error(Errc::InvalidConfig, "n_datasets must be positive");
  if (attrs_per_dataset.size() != n_datasets) {
    throw Error(Errc::InvalidConfig, "attrs_per_dataset must list one count per dataset");
  }
  if (std::find(attrs_per_dataset.begin(), attrs_per_dataset.end(), 0u) !=
      attrs_per_dataset.end()) {
    throw Error(Errc::InvalidConfig, "every dataset needs at least one attribute");
  }
  if (n_tuples == 0) throw Error(Errc::InvalidConfig, "n_tuples must be positive");
  if (value_min < 1) throw Error(Errc::InvalidConfig, "value_min must be at least 1");
  if (value_min > value_max) throw Error(Errc::InvalidConfig, "value_min exceeds value_max");
}

std::vector<std::size_t> split_attributes(std::size_t d, std::size_t n_datasets) {
  if (n_datasets == 0 || d < n_datasets) {
    throw Error(Errc::InvalidConfig, "cannot split " + std::to_string(d) + " attributes over " +
                                         std::to_string(n_datasets) + " datasets");
  }
  std::vector<std::size_t> out(n_datasets, d / n_datasets);
  for (std::size_t i = 0; i < d % n_datasets; ++i) ++out[i];
  return out;
}

std::vector<Dataset> generate_synthetic(const SynthConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.seed);
  std::vector<Dataset> out;
  out.reserve(config.n_datasets);
  for (std::size_t k = 0; k < config.n_datasets; ++k) {
    Dataset ds;
    ds.name = "ds" + std::to_string(k + 1);
    for (std::size_t a = 0; a < config.attrs_per_dataset[k]; ++a) {
      ds.attributes.push_back("a" + std::to_string(a + 1));
    }
    ds.rows.assign(config.n_tuples, std::vector<double>(ds.attributes.size()));
    for (auto& row : ds.rows) {
      for (auto& cell : row) {
        cell = static_cast<double>(uniform_uint(rng, config.value_min, config.value_max));
      }
    }
    out.push_back(std::move(ds));
  }
  return out;
}

SimulatedUser SimulatedUser::random(std::size_t columns, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SimulatedUser user;
  user.weights.resize(columns);
  for (auto& w : user.weights) w = uniform_open01(rng);
  return user;
}

SimulatedUser SimulatedUser::uniform(std::size_t columns) {
  return SimulatedUser{std::vector<double>(columns, 1.0)};
}

RoundChoice simulate_ranking(const SimulatedUser& user, const Session& session) {
  const auto& table = session.table();
  RoundChoice choice;
  for (const auto& pending : session.pending_datasets()) {
    const std::string* best = nullptr;
    double best_weight = 0.0;
    for (const auto& attr : pending.attributes) {
      const double w = user.weights.at(table.find_column(pending.name, attr));
      if (best == nullptr || w > best_weight) {
        best = &attr;
        best_weight = w;
      }
    }
    choice.selections.emplace(pending.name, *best);
  }
  return choice;
}

double BenchReport::max_elapsed_ms() const {
  double m = 0.0;
  for (const auto& row : rows) m = std::max(m, row.elapsed_ms);
  return m;
}

void BenchReport::write_csv(std::ostream& out) const {
  out << "n_datasets,d,n_tuples,seed,rep,rounds,questions,elapsed_ms,survivors\n";
  for (const auto& r : rows) {
    out << r.n_datasets << ',' << r.d << ',' << r.n_tuples << ',' << r.seed << ',' << r.rep << ','
        << r.rounds << ',' << r.questions << ',' << format_number(r.elapsed_ms) << ','
        << r.survivors << '\n';
  }
}

nlohmann::json BenchReport::to_json() const {
  nlohmann::json j{{"rows", nlohmann::json::array()}, {"aggregates", nlohmann::json::array()}};
  for (const auto& r : rows) {
    j["rows"].push_back({{"n_datasets", r.n_datasets},
                         {"d", r.d},
                         {"n_tuples", r.n_tuples},
                         {"seed", r.seed},
                         {"rep", r.rep},
                         {"rounds", r.rounds},
                         {"questions", r.questions},
                         {"elapsed_ms", r.elapsed_ms},
                         {"survivors", r.survivors}});
  }
  for (const auto& a : aggregates) {
    j["aggregates"].push_back({{"config_index", a.config_index},
                               {"d", a.d},
                               {"n_tuples", a.n_tuples},
                               {"min_ms", a.min_ms},
                               {"median_ms", a.median_ms},
                               {"max_ms", a.max_ms}});
  }
  j["max_elapsed_ms"] = max_elapsed_ms();
  return j;
}

BenchReport run_benchmark(std::span<const SynthConfig> sweep, std::size_t repetitions) {
  using clock = std::chrono::steady_clock;
  BenchReport report;
  if (repetitions == 0) return report;

  for (std::size_t ci = 0; ci < sweep.size(); ++ci) {
    const auto& base = sweep[ci];
    base.validate();
    std::vector<double> times;
    for (std::size_t rep = 0; rep < repetitions; ++rep) {
      SynthConfig config = base;
      config.seed = base.seed + rep;
      const auto datasets = generate_synthetic(config);
      const auto user =
          SimulatedUser::random(config.total_attributes(), config.seed ^ 0x9E3779B97F4A7C15ULL);

      const auto start = clock::now();
      auto table = std::make_shared<const AugmentedTable>(augment(datasets));
      Session session(table);
      while (!session.finished()) session.submit_round(simulate_ranking(user, session));
      const auto result = session.finish();
      const auto stop = clock::now();

      BenchRow row;
      row.n_datasets = config.n_datasets;
      row.d = config.total_attributes();
      row.n_tuples = config.n_tuples;
      row.seed = config.seed;
      row.rep = rep;
      row.rounds = session.round();
      row.questions = session.questions_asked();
      row.elapsed_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      row.survivors = result.size();
      times.push_back(row.elapsed_ms);
      report.rows.push_back(row);
    }
    std::sort(times.begin(), times.end());
    const std::size_t n = times.size();
    const double median = n % 2 == 1 ? times[n / 2] : 0.5 * (times[n / 2 - 1] + times[n / 2]);
    report.aggregates.push_back(
        {ci, base.total_attributes(), base.n_tuples, times.front(), median, times.back()});
  }
  return report;
}

std::vector<SynthConfig> attribute_sweep(std::size_t n_datasets, std::size_t n_tuples,
                                         std::size_t d_min, std::size_t d_max,
                                         std::uint64_t seed) {
  if (d_min > d_max) throw Error(Errc::InvalidConfig, "d_min exceeds d_max");
  std::vector<SynthConfig> out;
  for (std::size_t d = d_min; d <= d_max; ++d) {
    SynthConfig c;
    c.n_datasets = n_datasets;
    c.attrs_per_dataset = split_attributes(d, n_datasets);
    c.n_tuples = n_tuples;
    c.seed = seed;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<SynthConfig> tuple_sweep(std::size_t n_datasets, std::size_t d,
                                     std::span<const std::size_t> tuples, std::uint64_t seed) {
  std::vector<SynthConfig> out;
  for (auto n : tuples) {
    SynthConfig c;
    c.n_datasets = n_datasets;
    c.attrs_per_dataset = split_attributes(d, n_datasets);
    c.n_tuples = n;
    c.seed = seed;
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace bod
