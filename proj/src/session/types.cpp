#include "freetalky/session/types.hpp"

#include "freetalky/text/tokenizer.hpp"

namespace freetalky::session {

void PersonaProfile::validate() const {
  if (sentences.empty() || sentences.size() > 5)
    throw InvalidPersona("a persona needs between 1 and 5 sentences, got " + std::to_string(sentences.size()));
  for (const auto& s : sentences)
    if (text::trim(s).empty()) throw InvalidPersona("persona sentences must not be blank");
}

std::string_view to_string(SessionPhase phase) {
  switch (phase) {
    case SessionPhase::AwaitingPersonaChoice: return "AwaitingPersonaChoice";
    case SessionPhase::Conversing: return "Conversing";
    case SessionPhase::AwaitingFeedbackConsent: return "AwaitingFeedbackConsent";
    case SessionPhase::DeliveringFeedback: return "DeliveringFeedback";
    case SessionPhase::Ended: return "Ended";
  }
  return "Unknown";
}

std::string_view to_string(Speaker speaker) { return speaker == Speaker::User ? "User" : "System"; }

SessionPhase parse_phase(std::string_view name) {
  for (auto p : {SessionPhase::AwaitingPersonaChoice, SessionPhase::Conversing, SessionPhase::AwaitingFeedbackConsent,
                 SessionPhase::DeliveringFeedback, SessionPhase::Ended})
    if (to_string(p) == name) return p;
  throw SessionError("unknown session phase '" + std::string(name) + "'");
}

Speaker parse_speaker(std::string_view name) {
  if (name == "User") return Speaker::User;
  if (name == "System") return Speaker::System;
  throw SessionError("unknown speaker '" + std::string(name) + "'");
}

bool is_legal_transition(SessionPhase from, SessionPhase to) {
  using P = SessionPhase;
  switch (from) {
    case P::AwaitingPersonaChoice: return to == P::Conversing;
    case P::Conversing: return to == P::AwaitingFeedbackConsent;
    case P::AwaitingFeedbackConsent: return to == P::DeliveringFeedback || to == P::Ended;
    case P::DeliveringFeedback: return to == P::Ended;
    case P::Ended: return false;
  }
  return false;
}

}  // namespace freetalky::session
