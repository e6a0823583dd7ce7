#pragma once

#include <chrono>
#include <cstdlib>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "contractor/agent.hpp"

namespace contractor {

struct RemoteConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4o-2024-11-20";
  double temperature = 0.0;
  std::string api_key_env = "CONTRACTOR_API_KEY";
  int retries = 2;
  std::chrono::milliseconds backoff{500};
  std::chrono::seconds timeout{120};
};

// Chat-completion client. Network errors and 5xx answers are retried
// `retries` times; anything else fails at once.
class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(RemoteConfig cfg) : cfg_(std::move(cfg)) {
    auto scheme = cfg_.base_url.find("://");
    auto path = cfg_.base_url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    origin_ = cfg_.base_url.substr(0, path);
    prefix_ = path == std::string::npos ? "" : cfg_.base_url.substr(path);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    if (const char* key = std::getenv(cfg_.api_key_env.c_str())) key_ = key;
  }

  std::string complete(const PromptBundle& bundle) override {
    nlohmann::json body{{"model", cfg_.model},
                        {"temperature", cfg_.temperature},
                        {"messages",
                         {{{"role", "system"}, {"content", bundle.system}},
                          {{"role", "user"}, {"content", bundle.text().substr(bundle.system.size() + 2)}}}}};
    httplib::Client cli(origin_);
    cli.set_connection_timeout(cfg_.timeout);
    cli.set_read_timeout(cfg_.timeout);
    httplib::Headers headers;
    if (!key_.empty()) headers.emplace("Authorization", "Bearer " + key_);
    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(cfg_.backoff * attempt);
      auto res = cli.Post(prefix_ + "/chat/completions", headers, body.dump(), "application/json");
      if (!res) {
        last_error = "network error: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status >= 500) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      if (res->status != 200) throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body);
      try {
        auto j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const nlohmann::json::exception& e) {
        throw BackendError(std::string("unexpected completion payload: ") + e.what());
      }
    }
    throw BackendError("giving up after " + std::to_string(cfg_.retries + 1) + " attempts: " + last_error);
  }

 private:
  RemoteConfig cfg_;
  std::string origin_;
  std::string prefix_;
  std::string key_;
};

}  // namespace contractor
