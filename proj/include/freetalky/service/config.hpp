#pragma once

#include "freetalky/dialogue/types.hpp"
#include "freetalky/gec/types.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

namespace freetalky::service {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GecMode { InProcess, Remote };

std::string to_string(GecMode m);
GecMode parse_gec_mode(const std::string& s);

struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::filesystem::path dialogue_checkpoint;
  GecMode gec_mode = GecMode::InProcess;
  std::filesystem::path gec_checkpoint;
  std::string gec_url;  // remote mode, e.g. "http://127.0.0.1:8081"
  std::filesystem::path lexicon_path;
  std::filesystem::path persona_catalog_path;
  dialogue::DecodeConfig decode;
  gec::Device device_preference = gec::Device::Cpu;
  std::filesystem::path journal_path;  // empty disables the journal
  std::uint64_t rng_seed = 0;
  std::chrono::minutes idle_timeout{30};
  int max_regenerations = 3;
  std::chrono::milliseconds remote_timeout{5000};

  // Throws ConfigError on an inconsistent configuration (remote mode without
  // a URL, bad port, bad decode settings).
  void validate() const;
  // Throws ConfigError naming the first configured file that does not exist.
  void require_paths() const;
};

// Looks up an environment variable; returns nullopt when unset.
using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

inline constexpr const char* kEnvPrefix = "FREETALKY_";

// Keys mirror the field names; relative paths resolve against `base_dir`.
ServiceConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
nlohmann::json config_to_json(const ServiceConfig& c);

// FREETALKY_LISTEN (host:port), FREETALKY_GEC_MODE, FREETALKY_GEC_URL,
// FREETALKY_GEC_CHECKPOINT, FREETALKY_DIALOGUE_CHECKPOINT, FREETALKY_LEXICON,
// FREETALKY_PERSONAS, FREETALKY_JOURNAL, FREETALKY_DEVICE, FREETALKY_SEED,
// FREETALKY_IDLE_TIMEOUT_MINUTES.
void apply_env_overrides(ServiceConfig& c, const EnvLookup& env);

// File (optional) then environment, then validate().
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env);

}  // namespace freetalky::service
