#include "freetalky/service/orchestrator.hpp"

#include "freetalky/dialogue/decode.hpp"
#include "freetalky/gec/edits.hpp"
#include "freetalky/session/json.hpp"
#include "freetalky/session/protocol.hpp"
#include "freetalky/session/session.hpp"
#include "freetalky/text/tokenizer.hpp"

namespace freetalky::service {

using session::Session;

ModelReplyGenerator::ModelReplyGenerator(std::shared_ptr<const dialogue::DialogueModel> model,
                                         dialogue::DecodeConfig decode)
    : model_(std::move(model)), decode_(std::move(decode)) {
  decode_.validate();
}

std::string ModelReplyGenerator::generate(const session::PersonaProfile& persona,
                                          std::span<const session::Turn> history, std::uint64_t seed) const {
  auto decode = decode_;
  decode.rng_seed = seed;
  try {
    return dialogue::generate_reply(*model_, persona, history, decode);
  } catch (const dialogue::InputTooLong&) {
    return decode.fallback_reply;
  }
}

Components load_components(const ServiceConfig& config) {
  Components c;
  if (config.lexicon_path.empty()) throw ConfigError("lexicon is not configured");
  if (config.persona_catalog_path.empty()) throw ConfigError("persona catalog is not configured");
  try {
    c.lexicon = safety::OffensiveLexicon::load(config.lexicon_path);
    c.catalog = session::load_persona_catalog(config.persona_catalog_path);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (!config.dialogue_checkpoint.empty() && std::filesystem::exists(config.dialogue_checkpoint)) {
    auto model = std::make_shared<const dialogue::DialogueModel>(dialogue::DialogueModel::load(config.dialogue_checkpoint));
    c.replies = std::make_shared<ModelReplyGenerator>(std::move(model), config.decode);
  }
  if (config.gec_mode == GecMode::Remote) {
    c.remote = std::make_shared<RemoteCorrector>(config.gec_url, config.remote_timeout);
    c.corrector = c.remote;
  } else if (!config.gec_checkpoint.empty() && std::filesystem::exists(config.gec_checkpoint)) {
    c.corrector = std::make_shared<gec::ModelCorrector>(std::make_shared<const gec::GecModel>(gec::GecModel::load(config.gec_checkpoint)));
  }
  return c;
}

Orchestrator::Orchestrator(ServiceConfig config, Components components, SessionStore::Now now)
    : config_(std::move(config)),
      components_(std::move(components)),
      store_(config_.journal_path.empty() ? std::nullopt : std::optional(config_.journal_path), config_.idle_timeout,
             std::move(now)) {
  policy_.max_regenerations = config_.max_regenerations;
  policy_.validate(components_.lexicon);
}

namespace {

// Runs `fn`, translating domain errors into HTTP statuses.
template <typename Fn>
auto guarded(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ApiError&) {
    throw;
  } catch (const UnknownSession& e) {
    throw ApiError(404, e.what());
  } catch (const session::PhaseViolation& e) {
    throw ApiError(409, e.what());
  } catch (const session::SessionError& e) {
    throw ApiError(422, e.what());
  } catch (const RemoteUnavailable& e) {
    throw ApiError(502, e.what());
  } catch (const gec::GecError& e) {
    throw ApiError(422, e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ApiError(422, std::string("malformed request: ") + e.what());
  }
}

std::string require_string(const nlohmann::json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || !body.at(key).is_string())
    throw ApiError(422, std::string("request body needs a string field '") + key + "'");
  return body.at(key).get<std::string>();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

nlohmann::json feedback_item(const gec::GecResult& r) {
  auto j = gec_result_json(r);
  j["message"] = gec::format_feedback(r);
  return j;
}

}  // namespace

std::uint64_t Orchestrator::reply_seed(const Session& s) const {
  return config_.rng_seed ^ fnv1a(s.session_id) ^ (0x9E3779B97F4A7C15ULL * (s.turns.size() + 1));
}

nlohmann::json Orchestrator::create_session() {
  if (!components_.replies || !components_.corrector) throw ApiError(503, "models are not loaded");
  return guarded([&] {
    const Session s = store_.create();
    return nlohmann::json{{"session_id", s.session_id},
                          {"greeting", session::protocol::kGreeting},
                          {"phase", session::to_string(s.phase)}};
  });
}

nlohmann::json Orchestrator::set_persona(const std::string& id, const nlohmann::json& body) {
  return guarded([&] {
    if (!body.is_object() || !body.contains("choice")) throw ApiError(422, "request body needs a 'choice' field");
    const auto& c = body.at("choice");
    session::PersonaChoice choice;
    if (c.is_number_integer()) {
      choice = c.get<int>();
    } else if (c.is_string()) {
      const auto n = session::parse_choice(c.get<std::string>());
      if (!n) throw ApiError(422, "no persona number in '" + c.get<std::string>() + "'");
      choice = *n;
    } else if (c.is_array()) {
      choice = c.get<std::vector<std::string>>();
    } else {
      throw ApiError(422, "choice must be a number, a string or a list of sentences");
    }
    const Session s =
        store_.update(id, [&](const Session& cur) { return session::choose_persona(cur, choice, components_.catalog); });
    return nlohmann::json{{"persona_intro", s.turns.back().text},
                          {"persona", session::persona_json(*s.persona)},
                          {"phase", session::to_string(s.phase)}};
  });
}

nlohmann::json Orchestrator::utterance(const std::string& id, const nlohmann::json& body) {
  return guarded([&] {
    const std::string text = require_string(body, "text");
    if (text::trim(text).empty()) throw ApiError(422, "utterance text is empty");
    nlohmann::json out;
    const Session s = store_.update(id, [&](const Session& cur) {
      out = nlohmann::json::object();
      auto [next, event] = session::advance(cur, text);
      switch (event.kind) {
        case session::EventKind::NeedReply: {
          if (!components_.replies) throw ApiError(503, "dialogue model is not loaded");
          const auto history = std::span<const session::Turn>(next.turns).subspan(1);
          safety::SeedStream seeds(reply_seed(next));
          const auto reply = safety::filtered_generate(
              [&](std::uint64_t seed) { return components_.replies->generate(*next.persona, history, seed); },
              components_.lexicon, policy_, seeds);
          out["reply"] = reply.text;
          return session::append_reply(std::move(next), reply.text);
        }
        case session::EventKind::AskConsent:
          out["reply"] = event.text;
          return next;
        case session::EventKind::DeliverFeedback: {
          if (!components_.corrector) throw ApiError(503, "gec model is not loaded");
          const auto results = gec::batch_corrections(*components_.corrector, event.feedback_turns);
          std::vector<std::string> messages;
          auto items = nlohmann::json::array();
          for (const auto& r : results) {
            messages.push_back(gec::format_feedback(r));
            items.push_back(feedback_item(r));
          }
          out["phases"] = {session::to_string(next.phase)};
          next = session::deliver_feedback(std::move(next), messages);
          out["phases"].push_back(session::to_string(next.phase));
          out["reply"] = next.turns.back().text;
          out["feedback"] = items;
          return next;
        }
        case session::EventKind::Declined:
          out["reply"] = "";
          return next;
      }
      return next;
    });
    out["phase"] = session::to_string(s.phase);
    return out;
  });
}

nlohmann::json Orchestrator::get_session(const std::string& id) {
  const auto s = store_.get(id);
  if (!s) throw ApiError(404, "unknown session " + id);
  return session::session_json(*s);
}

nlohmann::json Orchestrator::correct(const nlohmann::json& body) const {
  return guarded([&] {
    const std::string sentence = require_string(body, "sentence");
    if (text::trim(sentence).empty()) throw ApiError(422, "sentence is empty");
    if (!components_.corrector) throw ApiError(503, "gec model is not loaded");
    return gec_result_json(components_.corrector->correct(sentence));
  });
}

nlohmann::json Orchestrator::health() const {
  const std::string dialogue = components_.replies ? "loaded" : "missing";
  std::string gec_state;
  if (components_.remote)
    gec_state = components_.remote->reachable() ? "remote" : "unreachable";
  else
    gec_state = components_.corrector ? "loaded" : "missing";
  const bool ok = dialogue == "loaded" && (gec_state == "loaded" || gec_state == "remote");
  // Inference runs on the CPU whatever device is preferred.
  return {{"status", ok ? "ok" : "degraded"}, {"models", {{"dialogue", dialogue}, {"gec", gec_state}}}, {"device", "cpu"}};
}

}  // namespace freetalky::service
