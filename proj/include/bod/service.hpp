#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "bod/engine.hpp"
#include "bod/snapshot.hpp"
#include "bod/table.hpp"

namespace bod {

/// One live session plus the datasets it was built from. `mutex` serializes
/// every operation on the session.
struct SessionEntry {
  SessionEntry(std::string id_, std::vector<Dataset> datasets_, Session session_,
               std::chrono::system_clock::time_point created_)
      : id(std::move(id_)),
        datasets(std::move(datasets_)),
        session(std::move(session_)),
        created_at(created_) {}

  const std::string id;
  const std::vector<Dataset> datasets;
  Session session;
  const std::chrono::system_clock::time_point created_at;
  std::mutex mutex;
};

/// In-memory sessions with optional per-session JSON snapshots on disk.
class SessionStore {
 public:
  explicit SessionStore(std::optional<std::filesystem::path> snapshot_dir = std::nullopt);

  std::shared_ptr<SessionEntry> create(std::vector<Dataset> datasets);

  /// Throws UnknownSession for ids never issued and SessionDeleted for ids
  /// that were removed.
  std::shared_ptr<SessionEntry> get(const std::string& id) const;

  void remove(const std::string& id);

  /// Writes the entry's snapshot if a snapshot directory is configured.
  /// Caller holds entry.mutex.
  void persist(const SessionEntry& entry) const;

  /// Loads every snapshot in the directory. Returns the messages of
  /// snapshots that were rejected (digest mismatch, malformed, ...).
  std::vector<std::string> load_snapshots();

  std::size_t size() const;

 private:
  std::optional<std::filesystem::path> snapshot_dir_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions_;
  std::set<std::string> deleted_;
};

/// Full on-disk document for one session: id, creation time, datasets and
/// the engine snapshot.
json entry_document(const SessionEntry& entry);

struct ServiceOptions {
  std::optional<std::filesystem::path> snapshot_dir;
  std::optional<std::filesystem::path> assets_dir;
  std::size_t max_payload_bytes = 64u << 20;
  std::size_t preview_limit = 50;
};

/// HTTP/JSON front end over a SessionStore.
///
///   POST   /api/sessions               create from JSON-embedded or multipart CSVs
///   GET    /api/sessions/{id}          status, pending datasets, preview, history
///   POST   /api/sessions/{id}/rounds   {"choices": {dataset: attribute}}
///   POST   /api/sessions/{id}/finish   {"tuples": [...], "utilities": [...]}
///   GET    /api/sessions/{id}/export   result CSV of the alive tuples
///   DELETE /api/sessions/{id}
class HttpService {
 public:
  explicit HttpService(ServiceOptions options);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds to host:port (port 0 picks a free one) and returns the port, or -1.
  int bind(const std::string& host, int port);

  /// Blocks serving requests until stop().
  bool listen();

  void stop();
  void wait_until_ready() const;

  SessionStore& store();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// JSON view returned by GET /api/sessions/{id}.
json session_view(const SessionEntry& entry, std::size_t preview_limit);

}  // namespace bod
