#pragma once

#include "freetalky/dialogue/model.hpp"
#include "freetalky/gec/correct.hpp"
#include "freetalky/safety/filter.hpp"
#include "freetalky/service/config.hpp"
#include "freetalky/service/remote.hpp"
#include "freetalky/service/store.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <span>
#include <stdexcept>

namespace freetalky::service {

// Carries the HTTP status the error maps to.
class ApiError : public std::runtime_error {
 public:
  ApiError(int status, const std::string& message) : std::runtime_error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class ReplyGenerator {
 public:
  virtual ~ReplyGenerator() = default;
  // `history` holds the turns after the persona introduction.
  virtual std::string generate(const session::PersonaProfile& persona, std::span<const session::Turn> history,
                               std::uint64_t seed) const = 0;
};

class ModelReplyGenerator : public ReplyGenerator {
 public:
  ModelReplyGenerator(std::shared_ptr<const dialogue::DialogueModel> model, dialogue::DecodeConfig decode);
  std::string generate(const session::PersonaProfile& persona, std::span<const session::Turn> history,
                       std::uint64_t seed) const override;

 private:
  std::shared_ptr<const dialogue::DialogueModel> model_;
  dialogue::DecodeConfig decode_;
};

struct Components {
  std::shared_ptr<const ReplyGenerator> replies;      // null when the dialogue model is missing
  std::shared_ptr<const gec::Corrector> corrector;    // null when the gec model is missing
  std::shared_ptr<const RemoteCorrector> remote;      // set in remote mode
  safety::OffensiveLexicon lexicon;
  std::vector<session::PersonaProfile> catalog;
};

// Loads the lexicon and persona catalog (ConfigError when absent) and
// whichever model checkpoints exist.
Components load_components(const ServiceConfig& config);

// Endpoint logic, independent of the transport. Every method throws ApiError.
class Orchestrator {
 public:
  // Replays and appends to config.journal_path when it is set.
  Orchestrator(ServiceConfig config, Components components, SessionStore::Now now = nullptr);

  // POST /sessions (201)
  nlohmann::json create_session();
  // POST /sessions/{id}/persona {"choice": 2 | "two" | ["sentence", ...]}
  nlohmann::json set_persona(const std::string& id, const nlohmann::json& body);
  // POST /sessions/{id}/utterance {"text"}
  nlohmann::json utterance(const std::string& id, const nlohmann::json& body);
  // GET /sessions/{id}
  nlohmann::json get_session(const std::string& id);
  // POST /gec/correct {"sentence"}
  nlohmann::json correct(const nlohmann::json& body) const;
  // GET /health
  nlohmann::json health() const;

  SessionStore& store() { return store_; }
  const ServiceConfig& config() const { return config_; }

 private:
  std::uint64_t reply_seed(const session::Session& s) const;

  ServiceConfig config_;
  Components components_;
  safety::FilterPolicy policy_;
  SessionStore store_;
};

}  // namespace freetalky::service
