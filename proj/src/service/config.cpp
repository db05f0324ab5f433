#include "freetalky/service/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>

namespace freetalky::service {

std::string to_string(GecMode m) { return m == GecMode::Remote ? "remote" : "in_process"; }

GecMode parse_gec_mode(const std::string& s) {
  if (s == "in_process") return GecMode::InProcess;
  if (s == "remote") return GecMode::Remote;
  throw ConfigError("gec mode must be in_process or remote, got '" + s + "'");
}

void ServiceConfig::validate() const {
  if (listen_port < 0 || listen_port > 65535) throw ConfigError("listen port out of range");
  if (listen_host.empty()) throw ConfigError("listen host is empty");
  if (gec_mode == GecMode::Remote && gec_url.empty()) throw ConfigError("remote gec mode requires gec_url");
  if (idle_timeout.count() <= 0) throw ConfigError("idle timeout must be positive");
  if (max_regenerations < 0) throw ConfigError("max_regenerations must be nonnegative");
  if (remote_timeout.count() <= 0) throw ConfigError("remote timeout must be positive");
  try {
    decode.validate();
  } catch (const dialogue::DialogueError& e) {
    throw ConfigError(std::string("decode: ") + e.what());
  }
}

void ServiceConfig::require_paths() const {
  auto need = [](const std::filesystem::path& p, const char* what) {
    if (p.empty()) throw ConfigError(std::string(what) + " is not configured");
    if (!std::filesystem::exists(p)) throw ConfigError(std::string(what) + " not found: " + p.string());
  };
  need(dialogue_checkpoint, "dialogue checkpoint");
  if (gec_mode == GecMode::InProcess) need(gec_checkpoint, "gec checkpoint");
  need(lexicon_path, "lexicon");
  need(persona_catalog_path, "persona catalog");
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (!v) return std::nullopt;
    return std::string(v);
  };
}

namespace {

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return {};
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

void parse_listen(ServiceConfig& c, const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError("listen must be host:port, got '" + listen + "'");
  c.listen_host = listen.substr(0, colon);
  try {
    std::size_t used = 0;
    c.listen_port = std::stoi(listen.substr(colon + 1), &used);
    if (used != listen.size() - colon - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError("listen port is not a number: '" + listen + "'");
  }
}

template <typename T>
T parse_number(const std::string& s, const std::string& what) {
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || v < T{})
    throw ConfigError(what + " is not a nonnegative integer: '" + s + "'");
  return v;
}

}  // namespace

ServiceConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  ServiceConfig c;
  try {
    if (j.contains("listen")) parse_listen(c, j.at("listen").get<std::string>());
    if (j.contains("dialogue_checkpoint")) c.dialogue_checkpoint = resolve(j.at("dialogue_checkpoint").get<std::string>(), base_dir);
    if (j.contains("gec_mode")) c.gec_mode = parse_gec_mode(j.at("gec_mode"));
    if (j.contains("gec_checkpoint")) c.gec_checkpoint = resolve(j.at("gec_checkpoint").get<std::string>(), base_dir);
    if (j.contains("gec_url")) c.gec_url = j.at("gec_url").get<std::string>();
    if (j.contains("lexicon")) c.lexicon_path = resolve(j.at("lexicon").get<std::string>(), base_dir);
    if (j.contains("persona_catalog")) c.persona_catalog_path = resolve(j.at("persona_catalog").get<std::string>(), base_dir);
    if (j.contains("journal")) c.journal_path = resolve(j.at("journal").get<std::string>(), base_dir);
    if (j.contains("device")) c.device_preference = gec::parse_device(j.at("device"));
    if (j.contains("seed")) c.rng_seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("idle_timeout_minutes")) c.idle_timeout = std::chrono::minutes(j.at("idle_timeout_minutes").get<int>());
    if (j.contains("max_regenerations")) c.max_regenerations = j.at("max_regenerations");
    if (j.contains("remote_timeout_ms")) c.remote_timeout = std::chrono::milliseconds(j.at("remote_timeout_ms").get<int>());
    if (j.contains("decode")) {
      const auto& d = j.at("decode");
      c.decode.max_new_tokens = d.value("max_new_tokens", c.decode.max_new_tokens);
      c.decode.temperature = d.value("temperature", c.decode.temperature);
      c.decode.top_k = d.value("top_k", c.decode.top_k);
      c.decode.top_p = d.value("top_p", c.decode.top_p);
      c.decode.no_repeat_ngram = d.value("no_repeat_ngram", c.decode.no_repeat_ngram);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const gec::GecError& e) {
    throw ConfigError(e.what());
  }
  return c;
}

nlohmann::json config_to_json(const ServiceConfig& c) {
  return {{"listen", c.listen_host + ":" + std::to_string(c.listen_port)},
          {"dialogue_checkpoint", c.dialogue_checkpoint.string()},
          {"gec_mode", to_string(c.gec_mode)},
          {"gec_checkpoint", c.gec_checkpoint.string()},
          {"gec_url", c.gec_url},
          {"lexicon", c.lexicon_path.string()},
          {"persona_catalog", c.persona_catalog_path.string()},
          {"journal", c.journal_path.string()},
          {"device", gec::to_string(c.device_preference)},
          {"seed", c.rng_seed},
          {"idle_timeout_minutes", c.idle_timeout.count()},
          {"max_regenerations", c.max_regenerations},
          {"remote_timeout_ms", c.remote_timeout.count()},
          {"decode",
           {{"max_new_tokens", c.decode.max_new_tokens},
            {"temperature", c.decode.temperature},
            {"top_k", c.decode.top_k},
            {"top_p", c.decode.top_p},
            {"no_repeat_ngram", c.decode.no_repeat_ngram}}}};
}

void apply_env_overrides(ServiceConfig& c, const EnvLookup& env) {
  auto get = [&env](const char* key) { return env(std::string(kEnvPrefix) + key); };
  if (auto v = get("LISTEN")) parse_listen(c, *v);
  if (auto v = get("GEC_MODE")) c.gec_mode = parse_gec_mode(*v);
  if (auto v = get("GEC_URL")) c.gec_url = *v;
  if (auto v = get("GEC_CHECKPOINT")) c.gec_checkpoint = *v;
  if (auto v = get("DIALOGUE_CHECKPOINT")) c.dialogue_checkpoint = *v;
  if (auto v = get("LEXICON")) c.lexicon_path = *v;
  if (auto v = get("PERSONAS")) c.persona_catalog_path = *v;
  if (auto v = get("JOURNAL")) c.journal_path = *v;
  if (auto v = get("DEVICE")) {
    try {
      c.device_preference = gec::parse_device(*v);
    } catch (const gec::GecError& e) {
      throw ConfigError(e.what());
    }
  }
  if (auto v = get("SEED")) c.rng_seed = parse_number<std::uint64_t>(*v, "FREETALKY_SEED");
  if (auto v = get("IDLE_TIMEOUT_MINUTES"))
    c.idle_timeout = std::chrono::minutes(parse_number<int>(*v, "FREETALKY_IDLE_TIMEOUT_MINUTES"));
}

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file, const EnvLookup& env) {
  ServiceConfig c;
  if (file) {
    std::ifstream in(*file);
    if (!in) throw ConfigError("cannot open config file " + file->string());
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
    }
    c = config_from_json(j, file->parent_path());
  }
  apply_env_overrides(c, env);
  c.validate();
  return c;
}

}  // namespace freetalky::service
