#pragma once

#include "freetalky/session/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>

namespace freetalky::session {

// Either a 1-based catalog number or an explicit list of persona sentences.
using PersonaChoice = std::variant<int, std::vector<std::string>>;

Session create_session();

// Accepts "2", "two", "Two.", "number 2" and similar. Returns nullopt when no
// number word or digit is found.
std::optional<int> parse_choice(std::string_view text);

// AwaitingPersonaChoice -> Conversing. Appends one System turn introducing
// the persona. Throws InvalidChoice, InvalidPersona or PhaseViolation.
Session choose_persona(Session session, const PersonaChoice& choice, std::span<const PersonaProfile> catalog);

bool is_end_command(std::string_view text);
bool is_affirmative(std::string_view text);

enum class EventKind {
  NeedReply,        // orchestrator must generate and append a reply
  AskConsent,       // the consent question was appended
  DeliverFeedback,  // consent given; run correction over `feedback_turns`
  Declined,         // consent refused; session ended
};

struct SessionEvent {
  EventKind kind = EventKind::NeedReply;
  // Question text for AskConsent.
  std::string text;
  // User turns from the conversing phase, for DeliverFeedback.
  std::vector<Turn> feedback_turns;
};

struct Advance {
  Session session;
  SessionEvent event;
};

// Feeds one user utterance through the lifecycle. Valid in Conversing and
// AwaitingFeedbackConsent; throws PhaseViolation elsewhere and InvalidTurn for
// blank text.
Advance advance(Session session, std::string_view user_text);

// Appends a generated System reply; Conversing only.
Session append_reply(Session session, std::string reply);

// DeliveringFeedback -> Ended, appending the feedback message as a System turn.
Session deliver_feedback(Session session, std::span<const std::string> feedback);

std::string_view to_string(EventKind kind);

// Persona catalog file: {"personas": [{"id": 1, "sentences": [...]}, ...]}
// with exactly three entries.
std::vector<PersonaProfile> load_persona_catalog(const std::filesystem::path& path);

// Deterministic reorder of the catalog for a given seed.
std::vector<PersonaProfile> shuffle_catalog(std::vector<PersonaProfile> catalog, std::uint64_t seed);

}  // namespace freetalky::session
