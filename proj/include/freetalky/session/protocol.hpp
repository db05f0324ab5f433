#pragma once

#include <span>
#include <string>
#include <string_view>

namespace freetalky::session::protocol {

// Fixed system utterances of a tutoring session.

inline constexpr std::string_view kGreeting =
    "Hi, I am NAO. Please choose the number between 1 to 3 and tell me, then I will set my personality and "
    "tell you about my persona!";
inline constexpr std::string_view kPersonaDone = "Persona setting is done. Let me introduce myself.";
inline constexpr std::string_view kInstruction =
    "Now you can have a conversation with me! If you want to finish the conversation, just say bye.";
inline constexpr std::string_view kConsentQuestion = "Conversation is done. Do you want to get grammatical feedback?";
inline constexpr std::string_view kFeedbackLead = "Okay!";
inline constexpr std::string_view kNoErrors = "I could not find any grammatical errors. Great job!";

// "Persona setting is done. Let me introduce myself. <sentences...>"
std::string persona_announcement(std::span<const std::string> sentences);

// Announcement followed by the instruction line, as one system utterance.
std::string persona_intro(std::span<const std::string> sentences);

// Lead-in plus every feedback sentence, or the no-error message.
std::string feedback_message(std::span<const std::string> feedback);

}  // namespace freetalky::session::protocol
