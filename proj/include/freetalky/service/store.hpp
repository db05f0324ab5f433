#pragma once

#include "freetalky/session/types.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>

namespace freetalky::service {

class UnknownSession : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class JournalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Journal records, one JSON object per line:
//   {"event":"created","session_id","created_at"}
//   {"event":"persona_set","session_id","persona":{"id","sentences"}}
//   {"event":"turn_appended","session_id","speaker","text","phase"}
//   {"event":"phase_changed","session_id","phase"}
//   {"event":"expired","session_id"}
// Journal records describing the change from `before` to `after`.
std::vector<nlohmann::json> diff_events(const session::Session& before, const session::Session& after);

// Applies one record to a session map. Throws JournalError on an
// inconsistent record.
void apply_event(std::map<std::string, session::Session>& sessions, const nlohmann::json& record);

// Replays a whole journal file. A missing file yields an empty map.
std::map<std::string, session::Session> replay_journal(const std::filesystem::path& path);

// Live sessions keyed by id. Each session has its own lock, so requests on one
// session are serialized while different sessions proceed in parallel. Every
// change is appended to the journal and flushed before it becomes visible.
class SessionStore {
 public:
  using Now = std::function<session::Clock::time_point()>;

  // Replays `journal` when it names an existing file, then appends to it.
  explicit SessionStore(std::optional<std::filesystem::path> journal = std::nullopt,
                        std::chrono::minutes idle_timeout = std::chrono::minutes(30), Now now = nullptr);

  session::Session create();

  // Runs `update` on the current state under the session lock and commits
  // the result. Exceptions from `update` leave the session unchanged. Throws
  // UnknownSession.
  session::Session update(const std::string& id, const std::function<session::Session(const session::Session&)>& fn);

  std::optional<session::Session> get(const std::string& id);

  // Drops sessions idle for longer than the timeout; returns how many.
  std::size_t expire_idle();

  std::map<std::string, session::Session> snapshot() const;
  std::size_t size() const;

 private:
  struct Entry {
    std::mutex lock;
    session::Session session;
    session::Clock::time_point last_active;
  };

  std::shared_ptr<Entry> find(const std::string& id);
  void journal(const std::vector<nlohmann::json>& records);

  std::optional<std::filesystem::path> journal_path_;
  std::chrono::minutes idle_timeout_;
  Now now_;
  mutable std::mutex map_lock_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::mutex journal_lock_;
  std::ofstream journal_out_;
};

}  // namespace freetalky::service
