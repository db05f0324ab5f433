#pragma once

#include "freetalky/session/types.hpp"

#include <nlohmann/json.hpp>

namespace freetalky::session {

// Transcript export: [{"speaker", "text", "index"}, ...]
nlohmann::json transcript_json(const Session& s);

// Full session record, including the per-turn phase and creation time in
// milliseconds since the epoch. Round-trips through session_from_json.
nlohmann::json session_json(const Session& s);
Session session_from_json(const nlohmann::json& j);

nlohmann::json persona_json(const PersonaProfile& p);
PersonaProfile persona_from_json(const nlohmann::json& j);

std::int64_t to_epoch_ms(Clock::time_point t);
Clock::time_point from_epoch_ms(std::int64_t ms);

}  // namespace freetalky::session
