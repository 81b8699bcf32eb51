#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bod/table.hpp"

namespace bod {

/// One attribute name per dataset that still has unranked attributes.
struct RoundChoice {
  std::map<std::string, std::string> selections;

  bool operator==(const RoundChoice&) const = default;
};

struct RoundResult {
  std::size_t round_index = 0;  // 1-based
  RoundChoice choices;
  std::vector<std::size_t> cumulative_columns;  // ascending column indices
  TupleId pivot_tuple = 0;
  double y_min = 0.0;  // pivot's sum over the cumulative ranked columns
  double y_max = 0.0;  // pivot's total utility
  TupleSubset survivors;
  TupleSubset eliminated;

  bool operator==(const RoundResult&) const = default;
};

struct PendingDataset {
  std::string name;
  std::vector<std::string> attributes;  // unranked, in original order

  bool operator==(const PendingDataset&) const = default;
};

enum class SessionStatus { AwaitingRanking, Finished };

const char* to_string(SessionStatus status);

/// The round-by-round filtering state machine. Each round the caller names
/// one unranked attribute per pending dataset; the tuple maximizing the sum
/// over every attribute ranked so far becomes the pivot, and only alive tuples
/// whose total utility lies within [pivot partial sum, pivot total] survive.
///
/// Single writer: calls on one Session must be serialized by the caller.
class Session {
 public:
  explicit Session(std::shared_ptr<const AugmentedTable> table);

  const AugmentedTable& table() const noexcept { return *table_; }
  const std::shared_ptr<const AugmentedTable>& table_ptr() const noexcept { return table_; }

  SessionStatus status() const noexcept { return status_; }
  bool finished() const noexcept { return status_ == SessionStatus::Finished; }
  std::size_t round() const noexcept { return history_.size(); }
  const TupleSubset& alive() const noexcept { return alive_; }
  const std::vector<RoundResult>& history() const noexcept { return history_; }

  /// Column indices ranked so far, per dataset partition, in ranking order.
  const std::vector<std::vector<std::size_t>>& ranked_columns() const noexcept { return ranked_; }

  /// Total attribute selections made across all rounds.
  std::size_t questions_asked() const noexcept;

  /// Throws SessionFinished once the session is over.
  std::vector<PendingDataset> pending_datasets() const;

  /// Throws SessionFinished or InvalidChoice; the session is unchanged on error.
  const RoundResult& submit_round(const RoundChoice& choice);

  /// Marks the session finished and returns the alive tuples ordered by
  /// descending utility, ties by ascending id. Idempotent.
  TupleSubset finish();

 private:
  std::shared_ptr<const AugmentedTable> table_;
  SessionStatus status_ = SessionStatus::AwaitingRanking;
  TupleSubset alive_;
  std::vector<std::vector<std::size_t>> ranked_;
  std::vector<std::size_t> cumulative_;  // sorted
  std::vector<RoundResult> history_;
};

inline Session start_session(std::shared_ptr<const AugmentedTable> table) {
  return Session(std::move(table));
}

/// Longest dataset width; the number of rounds of a complete session.
std::size_t max_rounds(const AugmentedTable& table);

/// Resolves a choice against the per-partition ranked columns. Returns the
/// chosen column indices in partition order or throws InvalidChoice.
std::vector<std::size_t> resolve_choice(const AugmentedTable& table,
                                        const std::vector<std::vector<std::size_t>>& ranked,
                                        const RoundChoice& choice);

/// Recomputes every round from scratch with a naive scan and no incremental
/// state. Used to cross-check the interactive engine.
std::vector<RoundResult> replay_oracle(const AugmentedTable& table,
                                       std::span<const RoundChoice> choices);

/// Alive tuples ordered by descending utility, ties by ascending id.
TupleSubset rank_by_utility(const AugmentedTable& table, const TupleSubset& subset);

}  // namespace bod
