#include "bod/service.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "bod/error.hpp"

namespace bod {

namespace fs = std::filesystem;

namespace {

std::string new_session_id() {
  static std::mutex mutex;
  static std::random_device device;
  std::lock_guard lock(mutex);
  std::ostringstream os;
  os << std::hex;
  for (int i = 0; i < 4; ++i) {
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(device()));
    os << buf;
  }
  return os.str();
}

std::int64_t to_epoch_ms(std::chrono::system_clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

std::shared_ptr<const AugmentedTable> build_table(const std::vector<Dataset>& datasets) {
  return std::make_shared<const AugmentedTable>(augment(datasets));
}

int status_for(Errc code) {
  switch (code) {
    case Errc::UnknownSession:
    case Errc::SessionDeleted:
      return 404;
    case Errc::SessionFinished:
      return 409;
    case Errc::Io:
      return 500;
    default:
      return 400;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code,
                const std::string& message) {
  send_json(res, status, json{{"error", {{"code", code}, {"message", message}}}});
}

template <typename Handler>
auto guarded(Handler handler) {
  return [handler](const httplib::Request& req, httplib::Response& res) {
    try {
      handler(req, res);
    } catch (const Error& e) {
      spdlog::debug("{} {} -> {}: {}", req.method, req.path, to_string(e.code()), e.what());
      send_error(res, status_for(e.code()), to_string(e.code()), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, "InvalidJson", e.what());
    } catch (const std::exception& e) {
      spdlog::error("{} {} failed: {}", req.method, req.path, e.what());
      send_error(res, 500, "Internal", e.what());
    }
  };
}

std::vector<Dataset> datasets_from_request(const httplib::Request& req) {
  std::vector<Dataset> out;
  if (req.is_multipart_form_data()) {
    for (const auto& [field, file] : req.files) {
      std::string name = file.filename.empty() ? field : fs::path(file.filename).stem().string();
      out.push_back(parse_dataset(std::string_view(file.content), std::move(name)));
    }
  } else {
    const auto body = json::parse(req.body);
    for (const auto& item : body.at("datasets")) {
      out.push_back(parse_dataset(std::string_view(item.at("csv").get_ref<const std::string&>()),
                                  item.at("name").get<std::string>()));
    }
  }
  if (out.empty()) throw Error(Errc::NoDatasets, "request carries no datasets");
  return out;
}

json describe_datasets(const AugmentedTable& table) {
  json out = json::array();
  for (const auto& part : table.partitions()) {
    out.push_back({{"name", part.name}, {"attributes", part.attributes}});
  }
  return out;
}

json pending_to_json(const Session& session) {
  json out = json::array();
  if (session.finished()) return out;
  for (const auto& p : session.pending_datasets()) {
    out.push_back({{"name", p.name}, {"attributes", p.attributes}});
  }
  return out;
}

}  // namespace

SessionStore::SessionStore(std::optional<fs::path> snapshot_dir)
    : snapshot_dir_(std::move(snapshot_dir)) {
  if (snapshot_dir_) fs::create_directories(*snapshot_dir_);
}

std::shared_ptr<SessionEntry> SessionStore::create(std::vector<Dataset> datasets) {
  auto table = build_table(datasets);
  auto entry = std::make_shared<SessionEntry>(new_session_id(), std::move(datasets),
                                              Session(std::move(table)),
                                              std::chrono::system_clock::now());
  {
    std::unique_lock lock(mutex_);
    sessions_.emplace(entry->id, entry);
  }
  std::lock_guard entry_lock(entry->mutex);
  persist(*entry);
  return entry;
}

std::shared_ptr<SessionEntry> SessionStore::get(const std::string& id) const {
  std::shared_lock lock(mutex_);
  if (auto it = sessions_.find(id); it != sessions_.end()) return it->second;
  if (deleted_.count(id) != 0) throw Error(Errc::SessionDeleted, "session " + id + " was deleted");
  throw Error(Errc::UnknownSession, "no session with id " + id);
}

void SessionStore::remove(const std::string& id) {
  std::unique_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) {
    if (deleted_.count(id) != 0) throw Error(Errc::SessionDeleted, "session " + id + " was deleted");
    throw Error(Errc::UnknownSession, "no session with id " + id);
  }
  sessions_.erase(it);
  deleted_.insert(id);
  if (snapshot_dir_) {
    std::error_code ec;
    fs::remove(*snapshot_dir_ / (id + ".json"), ec);
  }
}

json entry_document(const SessionEntry& entry) {
  return json{{"session_id", entry.id},
              {"created_at_ms", to_epoch_ms(entry.created_at)},
              {"datasets", datasets_to_json(entry.datasets)},
              {"session", session_snapshot(entry.session)}};
}

void SessionStore::persist(const SessionEntry& entry) const {
  if (!snapshot_dir_) return;
  const auto target = *snapshot_dir_ / (entry.id + ".json");
  const auto tmp = *snapshot_dir_ / (entry.id + ".json.tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::Io, "cannot write snapshot " + tmp.string());
    out << entry_document(entry).dump(2);
  }
  fs::rename(tmp, target);
}

std::vector<std::string> SessionStore::load_snapshots() {
  std::vector<std::string> rejected;
  if (!snapshot_dir_) return rejected;
  for (const auto& file : fs::directory_iterator(*snapshot_dir_)) {
    if (file.path().extension() != ".json") continue;
    try {
      std::ifstream in(file.path());
      const auto doc = json::parse(in);
      auto datasets = datasets_from_json(doc.at("datasets"));
      auto session = restore_session(build_table(datasets), doc.at("session"));
      const auto created = std::chrono::system_clock::time_point(
          std::chrono::milliseconds(doc.at("created_at_ms").get<std::int64_t>()));
      auto entry = std::make_shared<SessionEntry>(doc.at("session_id").get<std::string>(),
                                                  std::move(datasets), std::move(session),
                                                  created);
      std::unique_lock lock(mutex_);
      sessions_[entry->id] = std::move(entry);
    } catch (const std::exception& e) {
      const auto message = file.path().filename().string() + ": " + e.what();
      spdlog::warn("rejected snapshot {}", message);
      rejected.push_back(message);
    }
  }
  return rejected;
}

std::size_t SessionStore::size() const {
  std::shared_lock lock(mutex_);
  return sessions_.size();
}

json session_view(const SessionEntry& entry, std::size_t preview_limit) {
  const auto& session = entry.session;
  const auto& table = session.table();
  const auto ranked = rank_by_utility(table, session.alive());

  json preview = json::array();
  for (std::size_t i = 0; i < ranked.size() && i < preview_limit; ++i) {
    const TupleId id = ranked.tuple_ids[i];
    const auto row = table.raw().row(id);
    preview.push_back({{"tuple_id", id},
                       {"values", std::vector<double>(row.begin(), row.end())},
                       {"utility", table.utility(id)}});
  }

  json columns = json::array();
  for (const auto& col : table.columns()) columns.push_back(col.qualified_name);

  auto snapshot = session_snapshot(session);
  snapshot.erase("alive");
  snapshot["session_id"] = entry.id;
  snapshot["tuple_count"] = table.tuple_count();
  snapshot["max_rounds"] = max_rounds(table);
  snapshot["datasets"] = describe_datasets(table);
  snapshot["columns"] = std::move(columns);
  snapshot["pending_datasets"] = pending_to_json(session);
  snapshot["survivor_count"] = session.alive().size();
  snapshot["survivor_preview"] = std::move(preview);
  return snapshot;
}

struct HttpService::Impl {
  explicit Impl(ServiceOptions opts) : options(std::move(opts)), store(options.snapshot_dir) {}

  ServiceOptions options;
  SessionStore store;
  httplib::Server server;

  void routes();
};

void HttpService::Impl::routes() {
  server.set_payload_max_length(options.max_payload_bytes);
  if (options.assets_dir) server.set_mount_point("/", options.assets_dir->string());

  server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const char* code = res.status == 413 ? "PayloadTooLarge"
                       : res.status == 404 ? "NotFound"
                                           : "HttpError";
    send_error(res, res.status, code, httplib::status_message(res.status));
  });

  server.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
    auto entry = store.create(datasets_from_request(req));
    std::lock_guard lock(entry->mutex);
    const auto& table = entry->session.table();
    spdlog::info("created session {} ({} tuples, d={})", entry->id, table.tuple_count(),
                 table.column_count());
    send_json(res, 201,
              json{{"session_id", entry->id},
                   {"datasets", describe_datasets(table)},
                   {"tuple_count", table.tuple_count()},
                   {"max_rounds", max_rounds(table)}});
  }));

  server.Get(R"(/api/sessions/([^/]+))",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto entry = store.get(req.matches[1]);
               std::lock_guard lock(entry->mutex);
               send_json(res, 200, session_view(*entry, options.preview_limit));
             }));

  server.Post(R"(/api/sessions/([^/]+)/rounds)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto entry = store.get(req.matches[1]);
                const auto body = json::parse(req.body);
                const auto choice = choice_from_json(body.at("choices"));
                std::lock_guard lock(entry->mutex);
                const auto& result = entry->session.submit_round(choice);
                store.persist(*entry);

                const auto& table = entry->session.table();
                json cumulative = json::array();
                for (auto c : result.cumulative_columns) {
                  cumulative.push_back(table.columns()[c].qualified_name);
                }
                auto out = round_to_json(result);
                out["eliminated"] = result.eliminated.tuple_ids;
                out["survivor_count"] = result.survivors.size();
                out["eliminated_count"] = result.eliminated.size();
                out["cumulative_columns"] = std::move(cumulative);
                out["status"] = to_string(entry->session.status());
                out["round"] = entry->session.round();
                send_json(res, 200, out);
              }));

  server.Post(R"(/api/sessions/([^/]+)/finish)",
              guarded([this](const httplib::Request& req, httplib::Response& res) {
                auto entry = store.get(req.matches[1]);
                std::lock_guard lock(entry->mutex);
                const auto result = entry->session.finish();
                store.persist(*entry);
                json utilities = json::array();
                for (auto id : result.tuple_ids) utilities.push_back(entry->session.table().utility(id));
                send_json(res, 200, json{{"tuples", result.tuple_ids}, {"utilities", utilities}});
              }));

  server.Get(R"(/api/sessions/([^/]+)/export)",
             guarded([this](const httplib::Request& req, httplib::Response& res) {
               auto entry = store.get(req.matches[1]);
               std::lock_guard lock(entry->mutex);
               const auto& session = entry->session;
               std::ostringstream csv;
               write_subset_csv(csv, session.table(), rank_by_utility(session.table(), session.alive()));
               res.status = 200;
               res.set_content(csv.str(), "text/csv");
             }));

  server.Delete(R"(/api/sessions/([^/]+))",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  store.remove(req.matches[1]);
                  res.status = 204;
                }));
}

HttpService::HttpService(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {
  impl_->store.load_snapshots();
  impl_->routes();
}

HttpService::~HttpService() = default;

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpService::listen() { return impl_->server.listen_after_bind(); }

void HttpService::stop() { impl_->server.stop(); }

void HttpService::wait_until_ready() const { impl_->server.wait_until_ready(); }

SessionStore& HttpService::store() { return impl_->store; }

}  // namespace bod
