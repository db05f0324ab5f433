#pragma once

#include "freetalky/gec/correct.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <stdexcept>
#include <string>

namespace freetalky::service {

// Remote GEC server did not answer after the retry.
class RemoteUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// {"source", "correction", "edits": [{"kind", "position", "original", "replacement"}], "emit"}
nlohmann::json gec_result_json(const gec::GecResult& r);
gec::GecResult gec_result_from_json(const nlohmann::json& j);

// Corrector backed by another service's POST /gec/correct.
class RemoteCorrector : public gec::Corrector {
 public:
  // `base_url` like "http://127.0.0.1:8081". One retry after a failed attempt.
  explicit RemoteCorrector(std::string base_url, std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

  // Throws gec::GecError when the server rejects the sentence and
  // RemoteUnavailable when it cannot be reached.
  gec::GecResult correct(std::string_view sentence) const override;

  // GET /health answered with gec "loaded".
  bool reachable() const;

  const std::string& base_url() const { return base_url_; }

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
};

}  // namespace freetalky::service
