#include "bod/engine.hpp"

#include <algorithm>
#include <set>

#include "bod/error.hpp"

namespace bod {

const char* to_string(SessionStatus status) {
  return status == SessionStatus::Finished ? "Finished" : "AwaitingRanking";
}

std::size_t max_rounds(const AugmentedTable& table) {
  std::size_t rounds = 0;
  for (const auto& part : table.partitions()) rounds = std::max(rounds, part.width());
  return rounds;
}

std::vector<std::size_t> resolve_choice(const AugmentedTable& table,
                                        const std::vector<std::vector<std::size_t>>& ranked,
                                        const RoundChoice& choice) {
  for (const auto& [dataset, attribute] : choice.selections) {
    if (table.find_dataset(dataset) == AugmentedTable::npos) {
      throw Error(Errc::InvalidChoice, "unknown dataset '" + dataset + "'");
    }
  }

  std::vector<std::size_t> chosen;
  const auto& parts = table.partitions();
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& part = parts[p];
    const bool exhausted = ranked[p].size() == part.width();
    const auto it = choice.selections.find(part.name);
    if (exhausted) {
      if (it != choice.selections.end()) {
        throw Error(Errc::InvalidChoice,
                    "dataset '" + part.name + "' has no unranked attributes left");
      }
      continue;
    }
    if (it == choice.selections.end()) {
      throw Error(Errc::InvalidChoice, "missing selection for dataset '" + part.name + "'");
    }
    const auto column = table.find_column(part.name, it->second);
    if (column == AugmentedTable::npos) {
      throw Error(Errc::InvalidChoice,
                  "unknown attribute '" + it->second + "' in dataset '" + part.name + "'");
    }
    if (std::find(ranked[p].begin(), ranked[p].end(), column) != ranked[p].end()) {
      throw Error(Errc::InvalidChoice, "attribute '" + it->second + "' of dataset '" +
                                           part.name + "' was already ranked");
    }
    chosen.push_back(column);
  }
  return chosen;
}

TupleSubset rank_by_utility(const AugmentedTable& table, const TupleSubset& subset) {
  TupleSubset out = subset;
  std::stable_sort(out.tuple_ids.begin(), out.tuple_ids.end(), [&](TupleId a, TupleId b) {
    const double ua = table.utility(a);
    const double ub = table.utility(b);
    if (ua != ub) return ua > ub;
    return a < b;
  });
  return out;
}

Session::Session(std::shared_ptr<const AugmentedTable> table)
    : table_(std::move(table)), ranked_(table_->partitions().size()) {
  alive_.tuple_ids.resize(table_->tuple_count());
  for (TupleId id = 0; id < table_->tuple_count(); ++id) alive_.tuple_ids[id] = id;
}

std::size_t Session::questions_asked() const noexcept {
  return cumulative_.size();
}

std::vector<PendingDataset> Session::pending_datasets() const {
  if (finished()) throw Error(Errc::SessionFinished, "session is finished");
  std::vector<PendingDataset> out;
  const auto& parts = table_->partitions();
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const auto& part = parts[p];
    PendingDataset pending{part.name, {}};
    for (std::size_t i = 0; i < part.width(); ++i) {
      const auto col = part.first_column + i;
      if (std::find(ranked_[p].begin(), ranked_[p].end(), col) == ranked_[p].end()) {
        pending.attributes.push_back(part.attributes[i]);
      }
    }
    if (!pending.attributes.empty()) out.push_back(std::move(pending));
  }
  return out;
}

const RoundResult& Session::submit_round(const RoundChoice& choice) {
  if (finished()) throw Error(Errc::SessionFinished, "session is finished");
  const auto chosen = resolve_choice(*table_, ranked_, choice);

  std::vector<std::size_t> cumulative = cumulative_;
  cumulative.insert(cumulative.end(), chosen.begin(), chosen.end());
  std::sort(cumulative.begin(), cumulative.end());

  const AugmentedTable& table = *table_;
  const Matrix& scaled = table.scaled();

  // Alive ids are ascending, so keeping the first of equal candidates breaks
  // the final tie by lowest id.
  TupleId pivot = alive_.tuple_ids.front();
  double best_partial = -1.0;
  double best_total = -1.0;
  for (TupleId id : alive_.tuple_ids) {
    double partial = 0.0;
    for (std::size_t c : cumulative) partial += scaled(id, c);
    const double total = table.utility(id);
    if (partial > best_partial || (partial == best_partial && total > best_total)) {
      pivot = id;
      best_partial = partial;
      best_total = total;
    }
  }

  RoundResult result;
  result.round_index = history_.size() + 1;
  result.choices = choice;
  result.cumulative_columns = cumulative;
  result.pivot_tuple = pivot;
  result.y_min = best_partial;
  result.y_max = best_total;
  for (TupleId id : alive_.tuple_ids) {
    const double u = table.utility(id);
    if (result.y_min <= u && u <= result.y_max) {
      result.survivors.tuple_ids.push_back(id);
    } else {
      result.eliminated.tuple_ids.push_back(id);
    }
  }

  const auto& parts = table.partitions();
  for (std::size_t column : chosen) {
    for (std::size_t p = 0; p < parts.size(); ++p) {
      if (column >= parts[p].first_column && column < parts[p].first_column + parts[p].width()) {
        ranked_[p].push_back(column);
      }
    }
  }
  cumulative_ = std::move(cumulative);
  alive_ = result.survivors;
  history_.push_back(std::move(result));
  if (cumulative_.size() == table.column_count()) status_ = SessionStatus::Finished;
  return history_.back();
}

TupleSubset Session::finish() {
  status_ = SessionStatus::Finished;
  return rank_by_utility(*table_, alive_);
}

std::vector<RoundResult> replay_oracle(const AugmentedTable& table,
                                       std::span<const RoundChoice> choices) {
  const std::size_t n = table.tuple_count();
  const std::size_t d = table.column_count();
  const Matrix& scaled = table.scaled();

  auto total_of = [&](TupleId id) {
    double sum = 0.0;
    for (std::size_t c = 0; c < d; ++c) sum += scaled(id, c);
    return sum;
  };

  // Columns ranked up to and including each round.
  std::vector<std::set<std::size_t>> ranked_through;
  {
    std::vector<std::vector<std::size_t>> ranked(table.partitions().size());
    std::set<std::size_t> acc;
    for (const auto& choice : choices) {
      if (acc.size() == table.column_count()) {
        throw Error(Errc::SessionFinished, "every attribute is already ranked");
      }
      for (std::size_t col : resolve_choice(table, ranked, choice)) {
        acc.insert(col);
        for (std::size_t p = 0; p < table.partitions().size(); ++p) {
          if (table.columns()[col].dataset_name == table.partitions()[p].name) {
            ranked[p].push_back(col);
          }
        }
      }
      ranked_through.push_back(acc);
    }
  }

  std::vector<RoundResult> out;
  for (std::size_t k = 0; k < choices.size(); ++k) {
    std::vector<TupleId> alive(n);
    for (TupleId id = 0; id < n; ++id) alive[id] = id;

    RoundResult result;
    for (std::size_t j = 0; j <= k; ++j) {
      const auto& columns = ranked_through[j];
      auto partial_of = [&](TupleId id) {
        double sum = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          if (columns.count(c) != 0) sum += scaled(id, c);
        }
        return sum;
      };
      auto beats = [&](TupleId a, TupleId b) {
        const double pa = partial_of(a), pb = partial_of(b);
        if (pa != pb) return pa > pb;
        const double ta = total_of(a), tb = total_of(b);
        if (ta != tb) return ta > tb;
        return a < b;
      };

      TupleId pivot = alive.front();
      for (TupleId candidate : alive) {
        bool unbeaten = true;
        for (TupleId other : alive) {
          if (other != candidate && beats(other, candidate)) {
            unbeaten = false;
            break;
          }
        }
        if (unbeaten) {
          pivot = candidate;
          break;
        }
      }

      const double y_min = partial_of(pivot);
      const double y_max = total_of(pivot);
      std::vector<TupleId> kept;
      std::vector<TupleId> dropped;
      for (TupleId id : alive) {
        const double u = total_of(id);
        (y_min <= u && u <= y_max ? kept : dropped).push_back(id);
      }

      if (j == k) {
        result.round_index = k + 1;
        result.choices = choices[k];
        result.cumulative_columns.assign(columns.begin(), columns.end());
        result.pivot_tuple = pivot;
        result.y_min = y_min;
        result.y_max = y_max;
        result.survivors.tuple_ids = kept;
        result.eliminated.tuple_ids = dropped;
      }
      alive = std::move(kept);
    }
    out.push_back(std::move(result));
  }
  return out;
}

}  // namespace bod
