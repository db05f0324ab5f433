#include "freetalky/service/remote.hpp"

#include <httplib.h>

namespace freetalky::service {

nlohmann::json gec_result_json(const gec::GecResult& r) {
  auto edits = nlohmann::json::array();
  for (const auto& e : r.edits)
    edits.push_back({{"kind", gec::to_string(e.kind)},
                     {"position", e.position},
                     {"original", e.original},
                     {"replacement", e.replacement}});
  return {{"source", r.source}, {"correction", r.correction}, {"edits", edits}, {"emit", r.emit}};
}

gec::GecResult gec_result_from_json(const nlohmann::json& j) {
  gec::GecResult r;
  r.source = j.at("source").get<std::string>();
  r.correction = j.at("correction").get<std::string>();
  for (const auto& e : j.at("edits"))
    r.edits.push_back(gec::Edit{gec::parse_edit_kind(e.at("kind").get<std::string>()), e.at("position").get<int>(),
                                e.at("original").get<std::string>(), e.at("replacement").get<std::string>()});
  r.emit = j.at("emit").get<bool>();
  return r;
}

RemoteCorrector::RemoteCorrector(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
  if (base_url_.empty()) throw std::invalid_argument("remote gec url is empty");
}

namespace {

httplib::Client make_client(const std::string& url, std::chrono::milliseconds timeout) {
  httplib::Client cli(url);
  cli.set_connection_timeout(timeout);
  cli.set_read_timeout(timeout);
  cli.set_write_timeout(timeout);
  return cli;
}

}  // namespace

gec::GecResult RemoteCorrector::correct(std::string_view sentence) const {
  const std::string body = nlohmann::json{{"sentence", sentence}}.dump();
  std::string failure = "no response";
  for (int attempt = 0; attempt < 2; ++attempt) {
    auto cli = make_client(base_url_, timeout_);
    auto res = cli.Post("/gec/correct", body, "application/json");
    if (!res) {
      failure = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      try {
        return gec_result_from_json(nlohmann::json::parse(res->body));
      } catch (const std::exception& e) {
        throw RemoteUnavailable("remote gec returned a malformed body: " + std::string(e.what()));
      }
    }
    if (res->status == 422) throw gec::GecError("remote gec rejected the sentence");
    failure = "status " + std::to_string(res->status);
  }
  throw RemoteUnavailable("remote gec at " + base_url_ + " unreachable: " + failure);
}

bool RemoteCorrector::reachable() const {
  auto cli = make_client(base_url_, timeout_);
  auto res = cli.Get("/health");
  if (!res || res->status != 200) return false;
  try {
    return nlohmann::json::parse(res->body).at("models").at("gec") == "loaded";
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace freetalky::service
