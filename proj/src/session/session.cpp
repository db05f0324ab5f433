#include "freetalky/session/session.hpp"

#include "freetalky/session/protocol.hpp"
#include "freetalky/text/tokenizer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <random>

namespace freetalky::session {

namespace protocol {

std::string persona_announcement(std::span<const std::string> sentences) {
  std::string out(kPersonaDone);
  for (const auto& s : sentences) out += " " + text::trim(s);
  return out;
}

std::string persona_intro(std::span<const std::string> sentences) {
  return persona_announcement(sentences) + " " + std::string(kInstruction);
}

std::string feedback_message(std::span<const std::string> feedback) {
  std::string out(kFeedbackLead);
  if (feedback.empty()) return out + " " + std::string(kNoErrors);
  for (const auto& f : feedback) out += " " + f;
  return out;
}

}  // namespace protocol

namespace {

std::string random_id() {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  static constexpr char kHex[] = "0123456789abcdef";
  std::string id(32, '0');
  for (std::size_t i = 0; i < id.size(); i += 16) {
    std::uint64_t bits = rng();
    for (std::size_t j = 0; j < 16; ++j, bits >>= 4) id[i + j] = kHex[bits & 0xF];
  }
  return id;
}

void require_phase(const Session& s, SessionPhase expected, std::string_view op) {
  if (s.phase != expected)
    throw PhaseViolation(std::string(op) + " requires phase " + std::string(to_string(expected)) + ", session is in " +
                         std::string(to_string(s.phase)));
}

void append_turn(Session& s, Speaker speaker, std::string text) {
  if (s.phase == SessionPhase::Ended) throw PhaseViolation("no turns may be appended to an ended session");
  if (text::trim(text).empty()) throw InvalidTurn("turn text must not be blank");
  s.turns.push_back(Turn{speaker, std::move(text), s.turns.size(), s.phase});
}

void transition(Session& s, SessionPhase to) {
  if (!is_legal_transition(s.phase, to))
    throw PhaseViolation("illegal transition " + std::string(to_string(s.phase)) + " -> " + std::string(to_string(to)));
  s.phase = to;
}

// Last token holding at least one ASCII letter.
std::string final_alphabetic_token(std::string_view text) {
  const auto tokens = text::normalized_tokens(text);
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it)
    if (std::any_of(it->begin(), it->end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); }))
      return *it;
  return {};
}

}  // namespace

Session create_session() {
  Session s;
  s.session_id = random_id();
  s.phase = SessionPhase::AwaitingPersonaChoice;
  // Millisecond resolution, matching the journal encoding.
  s.created_at = std::chrono::time_point_cast<std::chrono::milliseconds>(Clock::now());
  return s;
}

std::optional<int> parse_choice(std::string_view text) {
  static const std::array<std::string_view, 10> kWords = {"zero", "one", "two",   "three", "four",
                                                          "five", "six", "seven", "eight", "nine"};
  for (const auto& tok : text::normalized_tokens(text)) {
    if (!tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      if (tok.size() > 6) return std::nullopt;
      return std::stoi(tok);
    }
    for (std::size_t i = 0; i < kWords.size(); ++i)
      if (tok == kWords[i]) return static_cast<int>(i);
  }
  return std::nullopt;
}

Session choose_persona(Session session, const PersonaChoice& choice, std::span<const PersonaProfile> catalog) {
  require_phase(session, SessionPhase::AwaitingPersonaChoice, "choose_persona");
  PersonaProfile persona;
  if (const int* n = std::get_if<int>(&choice)) {
    if (catalog.size() < 3) throw InvalidChoice("persona catalog must hold at least three profiles");
    if (*n < 1 || *n > 3) throw InvalidChoice("persona choice must be 1, 2 or 3, got " + std::to_string(*n));
    persona = catalog[static_cast<std::size_t>(*n - 1)];
  } else {
    persona.id = 0;
    for (const auto& s : std::get<std::vector<std::string>>(choice)) persona.sentences.push_back(text::trim(s));
  }
  persona.validate();

  transition(session, SessionPhase::Conversing);
  session.persona = persona;
  append_turn(session, Speaker::System, protocol::persona_intro(persona.sentences));
  return session;
}

bool is_end_command(std::string_view text) {
  const std::string last = final_alphabetic_token(text);
  return last == "bye" || last == "goodbye";
}

bool is_affirmative(std::string_view text) {
  static const std::array<std::string_view, 7> kYes = {"yes", "yeah", "yep", "sure", "ok", "okay", "please"};
  for (const auto& tok : text::normalized_tokens(text))
    if (std::find(kYes.begin(), kYes.end(), tok) != kYes.end()) return true;
  return false;
}

Advance advance(Session session, std::string_view user_text) {
  SessionEvent event;
  switch (session.phase) {
    case SessionPhase::Conversing:
      append_turn(session, Speaker::User, std::string(user_text));
      if (is_end_command(user_text)) {
        transition(session, SessionPhase::AwaitingFeedbackConsent);
        event.kind = EventKind::AskConsent;
        event.text = std::string(protocol::kConsentQuestion);
        append_turn(session, Speaker::System, event.text);
      } else {
        event.kind = EventKind::NeedReply;
      }
      break;
    case SessionPhase::AwaitingFeedbackConsent:
      append_turn(session, Speaker::User, std::string(user_text));
      if (is_affirmative(user_text)) {
        transition(session, SessionPhase::DeliveringFeedback);
        event.kind = EventKind::DeliverFeedback;
        for (const auto& t : session.turns)
          if (t.speaker == Speaker::User && t.phase == SessionPhase::Conversing) event.feedback_turns.push_back(t);
      } else {
        transition(session, SessionPhase::Ended);
        event.kind = EventKind::Declined;
      }
      break;
    default:
      throw PhaseViolation("advance is not valid in phase " + std::string(to_string(session.phase)));
  }
  return {std::move(session), std::move(event)};
}

Session append_reply(Session session, std::string reply) {
  require_phase(session, SessionPhase::Conversing, "append_reply");
  append_turn(session, Speaker::System, std::move(reply));
  return session;
}

Session deliver_feedback(Session session, std::span<const std::string> feedback) {
  require_phase(session, SessionPhase::DeliveringFeedback, "deliver_feedback");
  append_turn(session, Speaker::System, protocol::feedback_message(feedback));
  transition(session, SessionPhase::Ended);
  return session;
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::NeedReply: return "NeedReply";
    case EventKind::AskConsent: return "AskConsent";
    case EventKind::DeliverFeedback: return "DeliverFeedback";
    case EventKind::Declined: return "Declined";
  }
  return "Unknown";
}

std::vector<PersonaProfile> load_persona_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidPersona("cannot open persona catalog: " + path.string());
  std::vector<PersonaProfile> out;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& p : j.at("personas")) {
      PersonaProfile profile{p.at("id").get<int>(), p.at("sentences").get<std::vector<std::string>>()};
      profile.validate();
      out.push_back(std::move(profile));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidPersona("malformed persona catalog " + path.string() + ": " + e.what());
  }
  if (out.size() != 3) throw InvalidPersona("persona catalog must contain exactly three profiles");
  return out;
}

std::vector<PersonaProfile> shuffle_catalog(std::vector<PersonaProfile> catalog, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Fisher-Yates with an explicit draw so the order is stable across standard libraries.
  for (std::size_t i = catalog.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(catalog[i - 1], catalog[j]);
  }
  return catalog;
}

}  // namespace freetalky::session
