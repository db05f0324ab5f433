#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace freetalky::session {

class SessionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidChoice : public SessionError {
 public:
  using SessionError::SessionError;
};

class PhaseViolation : public SessionError {
 public:
  using SessionError::SessionError;
};

class InvalidPersona : public SessionError {
 public:
  using SessionError::SessionError;
};

class InvalidTurn : public SessionError {
 public:
  using SessionError::SessionError;
};

struct PersonaProfile {
  int id = 0;
  std::vector<std::string> sentences;

  // Throws InvalidPersona unless 1..5 sentences, each non-blank.
  void validate() const;
  bool operator==(const PersonaProfile&) const = default;
};

enum class Speaker { User, System };

enum class SessionPhase { AwaitingPersonaChoice, Conversing, AwaitingFeedbackConsent, DeliveringFeedback, Ended };

struct Turn {
  Speaker speaker = Speaker::User;
  std::string text;
  std::size_t index = 0;
  // Phase the session was in when the turn was appended.
  SessionPhase phase = SessionPhase::Conversing;

  bool operator==(const Turn&) const = default;
};

using Clock = std::chrono::system_clock;

struct Session {
  std::string session_id;
  std::optional<PersonaProfile> persona;
  std::vector<Turn> turns;
  SessionPhase phase = SessionPhase::AwaitingPersonaChoice;
  Clock::time_point created_at{};

  bool operator==(const Session&) const = default;
};

std::string_view to_string(SessionPhase phase);
std::string_view to_string(Speaker speaker);
SessionPhase parse_phase(std::string_view name);
Speaker parse_speaker(std::string_view name);

// True when `from -> to` is an edge of the lifecycle graph.
bool is_legal_transition(SessionPhase from, SessionPhase to);

}  // namespace freetalky::session
