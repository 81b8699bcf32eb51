#include "bod/snapshot.hpp"

#include "bod/error.hpp"

namespace bod {

json choice_to_json(const RoundChoice& choice) {
  json j = json::object();
  for (const auto& [dataset, attribute] : choice.selections) j[dataset] = attribute;
  return j;
}

RoundChoice choice_from_json(const json& j) {
  if (!j.is_object()) {
    throw Error(Errc::InvalidChoice, "a round choice must be an object of dataset: attribute");
  }
  RoundChoice choice;
  for (const auto& [dataset, attribute] : j.items()) {
    if (!attribute.is_string()) {
      throw Error(Errc::InvalidChoice, "selection for dataset '" + dataset + "' must be a string");
    }
    choice.selections.emplace(dataset, attribute.get<std::string>());
  }
  return choice;
}

std::vector<RoundChoice> choices_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::InvalidChoice, "choices must be a JSON array");
  std::vector<RoundChoice> out;
  for (const auto& item : j) out.push_back(choice_from_json(item));
  return out;
}

json round_to_json(const RoundResult& round) {
  return json{{"round_index", round.round_index},
              {"choices", choice_to_json(round.choices)},
              {"pivot", round.pivot_tuple},
              {"y_min", round.y_min},
              {"y_max", round.y_max},
              {"survivors", round.survivors.tuple_ids}};
}

json history_to_json(std::span<const RoundResult> history) {
  json j = json::array();
  for (const auto& round : history) j.push_back(round_to_json(round));
  return j;
}

json session_snapshot(const Session& session) {
  const auto& table = session.table();
  json ranked = json::object();
  for (std::size_t p = 0; p < table.partitions().size(); ++p) {
    json names = json::array();
    for (std::size_t col : session.ranked_columns()[p]) {
      names.push_back(table.columns()[col].attribute);
    }
    ranked[table.partitions()[p].name] = std::move(names);
  }
  return json{{"table_digest", table_digest(table)},
              {"round", session.round()},
              {"status", to_string(session.status())},
              {"ranked_columns", std::move(ranked)},
              {"alive", session.alive().tuple_ids},
              {"history", history_to_json(session.history())}};
}

Session restore_session(std::shared_ptr<const AugmentedTable> table, const json& snapshot) {
  try {
    const auto digest = snapshot.at("table_digest").get<std::string>();
    if (digest != table_digest(*table)) {
      throw Error(Errc::DigestMismatch, "snapshot digest " + digest +
                                            " does not match table digest " +
                                            table_digest(*table));
    }
    Session session(std::move(table));
    for (const auto& entry : snapshot.at("history")) {
      session.submit_round(choice_from_json(entry.at("choices")));
    }
    if (snapshot.at("status").get<std::string>() == "Finished") session.finish();

    if (session_snapshot(session) != snapshot) {
      throw Error(Errc::InvalidSnapshot, "snapshot state does not match its replayed history");
    }
    return session;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidSnapshot, std::string("malformed snapshot: ") + e.what());
  }
}

json datasets_to_json(std::span<const Dataset> datasets) {
  json out = json::array();
  for (const auto& ds : datasets) {
    out.push_back(json{{"name", ds.name}, {"attributes", ds.attributes}, {"rows", ds.rows}});
  }
  return out;
}

std::vector<Dataset> datasets_from_json(const json& j) {
  try {
    std::vector<Dataset> out;
    for (const auto& item : j) {
      Dataset ds;
      ds.name = item.at("name").get<std::string>();
      ds.attributes = item.at("attributes").get<std::vector<std::string>>();
      ds.rows = item.at("rows").get<std::vector<std::vector<double>>>();
      validate_dataset(ds);
      out.push_back(std::move(ds));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(Errc::InvalidSnapshot, std::string("malformed dataset document: ") + e.what());
  }
}

}  // namespace bod
