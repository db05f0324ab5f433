#include "freetalky/session/json.hpp"

namespace freetalky::session {

std::int64_t to_epoch_ms(Clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

Clock::time_point from_epoch_ms(std::int64_t ms) {
  return Clock::time_point(std::chrono::duration_cast<Clock::duration>(std::chrono::milliseconds(ms)));
}

nlohmann::json transcript_json(const Session& s) {
  auto out = nlohmann::json::array();
  for (const auto& t : s.turns) out.push_back({{"speaker", to_string(t.speaker)}, {"text", t.text}, {"index", t.index}});
  return out;
}

nlohmann::json persona_json(const PersonaProfile& p) { return {{"id", p.id}, {"sentences", p.sentences}}; }

PersonaProfile persona_from_json(const nlohmann::json& j) {
  PersonaProfile p{j.at("id").get<int>(), j.at("sentences").get<std::vector<std::string>>()};
  p.validate();
  return p;
}

nlohmann::json session_json(const Session& s) {
  auto turns = nlohmann::json::array();
  for (const auto& t : s.turns)
    turns.push_back({{"speaker", to_string(t.speaker)}, {"text", t.text}, {"index", t.index}, {"phase", to_string(t.phase)}});
  return {{"session_id", s.session_id},
          {"persona", s.persona ? persona_json(*s.persona) : nlohmann::json(nullptr)},
          {"turns", turns},
          {"phase", to_string(s.phase)},
          {"created_at", to_epoch_ms(s.created_at)}};
}

Session session_from_json(const nlohmann::json& j) {
  Session s;
  s.session_id = j.at("session_id").get<std::string>();
  if (!j.at("persona").is_null()) s.persona = persona_from_json(j.at("persona"));
  for (const auto& t : j.at("turns"))
    s.turns.push_back(Turn{parse_speaker(t.at("speaker").get<std::string>()), t.at("text").get<std::string>(),
                           t.at("index").get<std::size_t>(), parse_phase(t.at("phase").get<std::string>())});
  s.phase = parse_phase(j.at("phase").get<std::string>());
  s.created_at = from_epoch_ms(j.at("created_at").get<std::int64_t>());
  return s;
}

}  // namespace freetalky::session
