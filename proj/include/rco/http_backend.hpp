// Copyright 2026 The RCO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Chat-completions client. Build with CPPHTTPLIB_OPENSSL_SUPPORT (and link
// OpenSSL) to reach https endpoints.

#pragma once

#include <chrono>
#include <cstdlib>
#include <string>

#include <httplib.h>

#include "rco/backend.hpp"
#include "rco/prompts.hpp"

namespace rco::backend {

struct HttpConfig {
  std::string url;  // e.g. http://localhost:8000/v1/chat/completions
  std::string model;
  std::string token;

  /// Reads RCO_BACKEND_URL, RCO_BACKEND_MODEL and RCO_BACKEND_TOKEN.
  static HttpConfig from_env() {
    auto get = [](const char* name) {
      const char* v = std::getenv(name);
      return v ? std::string(v) : std::string();
    };
    return {get("RCO_BACKEND_URL"), get("RCO_BACKEND_MODEL"), get("RCO_BACKEND_TOKEN")};
  }
};

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline Endpoint split_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw ConfigError("backend url needs a scheme: " + url);
  const std::size_t slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/v1/chat/completions"};
  return {url.substr(0, slash), url.substr(slash)};
}

/// Request body in the common chat-completions shape.
inline Json chat_body(const BackendRequest& req, const std::string& model) {
  std::string user = req.prompt;
  if (!req.payload.is_null()) user += "\n\nStructured input:\n" + req.payload.dump();
  return Json{{"model", model},
              {"temperature", 0},
              {"messages", Json::array({Json{{"role", "system"}, {"content", prompts::system_preamble(req.purpose)}},
                                        Json{{"role", "user"}, {"content", user}}})}};
}

/// Text of the first completion choice.
inline std::string completion_text(const std::string& body) {
  Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded()) throw BackendError(BackendError::Kind::kSchemaViolation, "response body is not JSON");
  try {
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(BackendError::Kind::kSchemaViolation, std::string("no completion text: ") + e.what());
  }
}

class HttpBackend : public ReasoningBackend {
 public:
  explicit HttpBackend(HttpConfig cfg) : cfg_(std::move(cfg)), endpoint_(split_url(cfg_.url)) {}

  BackendResponse call(const BackendRequest& req) override {
    if (req.timeout_ms <= 0) throw OutOfRange("timeout_ms", req.timeout_ms);
    const auto start = std::chrono::steady_clock::now();
    const auto timeout = std::chrono::milliseconds(req.timeout_ms);

    httplib::Client client(endpoint_.origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers headers;
    if (!cfg_.token.empty()) headers.emplace("Authorization", "Bearer " + cfg_.token);

    const httplib::Result res =
        client.Post(endpoint_.path, headers, chat_body(req, cfg_.model).dump(), "application/json");
    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (!res) {
      const httplib::Error err = res.error();
      const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                             (err == httplib::Error::Read && elapsed_ms >= 0.9 * req.timeout_ms);
      throw BackendError(timed_out ? BackendError::Kind::kTimeout : BackendError::Kind::kTransportFailure,
                         httplib::to_string(err));
    }
    if (res->status != 200) {
      throw BackendError(BackendError::Kind::kTransportFailure, "HTTP status " + std::to_string(res->status));
    }
    std::string text = completion_text(res->body);
    try {
      ParsedValue parsed = parse_structured(text, req.purpose);
      return {std::move(text), std::move(parsed), elapsed_ms};
    } catch (const SchemaViolation& e) {
      throw BackendError(BackendError::Kind::kSchemaViolation, e.what());
    }
  }

 private:
  HttpConfig cfg_;
  Endpoint endpoint_;
};

}  // namespace rco::backend
