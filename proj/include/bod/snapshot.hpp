#pragma once

#include <memory>
#include <span>
#include <vector>

#include "json.hpp"

#include "bod/engine.hpp"
#include "bod/table.hpp"

namespace bod {

using json = nlohmann::json;

json choice_to_json(const RoundChoice& choice);
RoundChoice choice_from_json(const json& j);

/// Accepts a JSON array of {dataset: attribute} objects.
std::vector<RoundChoice> choices_from_json(const json& j);

/// {round_index, choices, pivot, y_min, y_max, survivors}
json round_to_json(const RoundResult& round);
json history_to_json(std::span<const RoundResult> history);

/// {table_digest, round, status, ranked_columns, alive, history}
json session_snapshot(const Session& session);

/// Rebuilds a session by replaying the recorded choices through the engine.
/// Throws DigestMismatch if the snapshot was taken over a different table and
/// InvalidSnapshot if the replayed state disagrees with the recorded one.
Session restore_session(std::shared_ptr<const AugmentedTable> table, const json& snapshot);

json datasets_to_json(std::span<const Dataset> datasets);
std::vector<Dataset> datasets_from_json(const json& j);

}  // namespace bod
