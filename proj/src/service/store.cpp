#include "freetalky/service/store.hpp"

#include "freetalky/session/json.hpp"
#include "freetalky/session/session.hpp"

#include <algorithm>

namespace freetalky::service {

using session::Session;

std::vector<nlohmann::json> diff_events(const Session& before, const Session& after) {
  std::vector<nlohmann::json> out;
  const std::string& id = after.session_id;
  if (before.session_id.empty())
    out.push_back({{"event", "created"}, {"session_id", id}, {"created_at", session::to_epoch_ms(after.created_at)}});
  if (after.persona && before.persona != after.persona)
    out.push_back({{"event", "persona_set"}, {"session_id", id}, {"persona", session::persona_json(*after.persona)}});
  if (after.turns.size() < before.turns.size() ||
      !std::equal(before.turns.begin(), before.turns.end(), after.turns.begin()))
    throw JournalError("session " + id + ": turns may only be appended");
  // Phases are recorded per turn, so interleave phase changes at the point
  // where the next turn shows the new phase.
  session::SessionPhase phase = before.phase;
  auto change_phase = [&](session::SessionPhase to) {
    if (to == phase) return;
    out.push_back({{"event", "phase_changed"}, {"session_id", id}, {"phase", session::to_string(to)}});
    phase = to;
  };
  for (std::size_t i = before.turns.size(); i < after.turns.size(); ++i) {
    const auto& t = after.turns[i];
    change_phase(t.phase);
    out.push_back({{"event", "turn_appended"},
                   {"session_id", id},
                   {"speaker", session::to_string(t.speaker)},
                   {"text", t.text},
                   {"phase", session::to_string(t.phase)}});
  }
  change_phase(after.phase);
  return out;
}

void apply_event(std::map<std::string, Session>& sessions, const nlohmann::json& record) {
  try {
    const std::string kind = record.at("event").get<std::string>();
    const std::string id = record.at("session_id").get<std::string>();
    if (kind == "created") {
      if (sessions.count(id)) throw JournalError("session " + id + " created twice");
      Session s;
      s.session_id = id;
      s.created_at = session::from_epoch_ms(record.at("created_at").get<std::int64_t>());
      sessions.emplace(id, std::move(s));
      return;
    }
    auto it = sessions.find(id);
    if (it == sessions.end()) throw JournalError("record for unknown session " + id);
    Session& s = it->second;
    if (kind == "persona_set") {
      s.persona = session::persona_from_json(record.at("persona"));
    } else if (kind == "turn_appended") {
      s.turns.push_back(session::Turn{session::parse_speaker(record.at("speaker").get<std::string>()),
                                      record.at("text").get<std::string>(), s.turns.size(),
                                      session::parse_phase(record.at("phase").get<std::string>())});
    } else if (kind == "phase_changed") {
      const auto to = session::parse_phase(record.at("phase").get<std::string>());
      if (!session::is_legal_transition(s.phase, to)) throw JournalError("illegal phase change in session " + id);
      s.phase = to;
    } else if (kind == "expired") {
      sessions.erase(it);
    } else {
      throw JournalError("unknown journal event '" + kind + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw JournalError(std::string("malformed journal record: ") + e.what());
  } catch (const session::SessionError& e) {
    throw JournalError(std::string("malformed journal record: ") + e.what());
  }
}

std::map<std::string, Session> replay_journal(const std::filesystem::path& path) {
  std::map<std::string, Session> sessions;
  std::ifstream in(path);
  if (!in) return sessions;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw JournalError("journal line " + std::to_string(lineno) + " is not valid JSON");
    }
    apply_event(sessions, record);
  }
  return sessions;
}

SessionStore::SessionStore(std::optional<std::filesystem::path> journal, std::chrono::minutes idle_timeout, Now now)
    : journal_path_(std::move(journal)), idle_timeout_(idle_timeout), now_(std::move(now)) {
  if (!now_) now_ = [] { return session::Clock::now(); };
  if (!journal_path_) return;
  const auto t = now_();
  for (auto& [id, s] : replay_journal(*journal_path_)) {
    auto e = std::make_shared<Entry>();
    e->session = std::move(s);
    e->last_active = t;
    sessions_.emplace(id, std::move(e));
  }
  if (journal_path_->has_parent_path()) std::filesystem::create_directories(journal_path_->parent_path());
  journal_out_.open(*journal_path_, std::ios::app);
  if (!journal_out_) throw JournalError("cannot open journal " + journal_path_->string());
}

void SessionStore::journal(const std::vector<nlohmann::json>& records) {
  if (!journal_path_ || records.empty()) return;
  std::lock_guard g(journal_lock_);
  for (const auto& r : records) journal_out_ << r.dump() << '\n';
  journal_out_.flush();
  if (!journal_out_) throw JournalError("failed to write journal " + journal_path_->string());
}

Session SessionStore::create() {
  Session s = session::create_session();
  // Millisecond precision so the journal reproduces the value exactly.
  s.created_at = session::from_epoch_ms(session::to_epoch_ms(now_()));
  auto e = std::make_shared<Entry>();
  e->session = s;
  e->last_active = now_();
  journal(diff_events(Session{}, s));
  std::lock_guard g(map_lock_);
  sessions_.emplace(s.session_id, std::move(e));
  return s;
}

std::shared_ptr<SessionStore::Entry> SessionStore::find(const std::string& id) {
  std::lock_guard g(map_lock_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

Session SessionStore::update(const std::string& id, const std::function<Session(const Session&)>& fn) {
  auto e = find(id);
  if (!e) throw UnknownSession("unknown session " + id);
  std::lock_guard g(e->lock);
  Session next = fn(e->session);
  journal(diff_events(e->session, next));
  e->session = next;
  e->last_active = now_();
  return next;
}

std::optional<Session> SessionStore::get(const std::string& id) {
  auto e = find(id);
  if (!e) return std::nullopt;
  std::lock_guard g(e->lock);
  return e->session;
}

std::size_t SessionStore::expire_idle() {
  const auto t = now_();
  std::vector<std::string> expired;
  {
    std::lock_guard g(map_lock_);
    for (auto it = sessions_.begin(); it != sessions_.end();) {
      std::unique_lock s(it->second->lock, std::try_to_lock);
      if (s.owns_lock() && t - it->second->last_active > idle_timeout_) {
        expired.push_back(it->first);
        s.unlock();
        it = sessions_.erase(it);
      } else {
        ++it;
      }
    }
  }
  std::vector<nlohmann::json> records;
  for (const auto& id : expired) records.push_back({{"event", "expired"}, {"session_id", id}});
  journal(records);
  return expired.size();
}

std::map<std::string, Session> SessionStore::snapshot() const {
  std::vector<std::pair<std::string, std::shared_ptr<Entry>>> entries;
  {
    std::lock_guard g(map_lock_);
    entries.assign(sessions_.begin(), sessions_.end());
  }
  std::map<std::string, Session> out;
  for (auto& [id, e] : entries) {
    std::lock_guard g(e->lock);
    out.emplace(id, e->session);
  }
  return out;
}

std::size_t SessionStore::size() const {
  std::lock_guard g(map_lock_);
  return sessions_.size();
}

}  // namespace freetalky::service
