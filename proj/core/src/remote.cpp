#include "ltlplan/remote.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace ltlplan {

namespace {

std::string request_key(const std::string& rendered,
                        const DecisionSet& decisions) {
  std::string blob = rendered;
  for (const auto& label : decisions.labels) {
    blob += "\x1f" + label;
  }
  return std::to_string(fnv1a64(blob));
}

}  // namespace

struct RemoteScorer::Cassette {
  std::mutex mutex;
  bool loaded = false;
  nlohmann::ordered_json entries = nlohmann::ordered_json::object();
};

RemoteScorer::RemoteScorer(RemoteScorerConfig config)
    : config_(std::move(config)), cassette_(std::make_shared<Cassette>()) {}

ScoreVector RemoteScorer::score(const PromptContext& prompt,
                                const DecisionSet& decisions) const {
  const std::string rendered = prompt.render();
  const std::string key = request_key(rendered, decisions);

  std::string body;
  if (config_.cassette_mode == CassetteMode::Replay) {
    std::lock_guard<std::mutex> lock(cassette_->mutex);
    if (!cassette_->loaded) {
      std::ifstream in(config_.cassette_path);
      if (!in) {
        throw ScorerUnavailableError("cassette file missing: " +
                                     config_.cassette_path);
      }
      try {
        in >> cassette_->entries;
      } catch (const nlohmann::json::exception& e) {
        throw ScorerUnavailableError(std::string("cassette unreadable: ") +
                                     e.what());
      }
      cassette_->loaded = true;
    }
    if (!cassette_->entries.contains(key)) {
      throw ScorerUnavailableError("cassette miss for request " + key);
    }
    body = cassette_->entries[key].dump();
  } else {
    nlohmann::ordered_json request;
    request["model"] = config_.model;
    request["prompt"] = rendered;
    request["choices"] = decisions.labels;

    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(0, config_.timeout_ms * 1000);
    client.set_read_timeout(0, config_.timeout_ms * 1000);
    httplib::Headers headers;
    if (!config_.auth_token_env.empty()) {
      const char* token = std::getenv(config_.auth_token_env.c_str());
      if (token != nullptr && token[0] != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + token);
      }
    }
    auto response = client.Post(config_.path, headers, request.dump(),
                                "application/json");
    if (!response) {
      throw ScorerUnavailableError("request to " + config_.endpoint +
                                   " never completed");
    }
    if (response->status != 200) {
      throw ScorerUnavailableError("scoring endpoint returned " +
                                       std::to_string(response->status),
                                   response->status);
    }
    body = response->body;

    if (config_.cassette_mode == CassetteMode::Record) {
      std::lock_guard<std::mutex> lock(cassette_->mutex);
      if (!cassette_->loaded) {
        std::ifstream in(config_.cassette_path);
        if (in) {
          try {
            in >> cassette_->entries;
          } catch (const nlohmann::json::exception&) {
            cassette_->entries = nlohmann::ordered_json::object();
          }
        }
        cassette_->loaded = true;
      }
      cassette_->entries[key] = nlohmann::ordered_json::parse(body, nullptr,
                                                              false);
      std::ofstream out(config_.cassette_path);
      out << cassette_->entries.dump(2) << "\n";
    }
  }

  // Length-normalized log-likelihood per choice as the raw score.
  nlohmann::json parsed = nlohmann::json::parse(body, nullptr, false);
  if (parsed.is_discarded() || !parsed.contains("choices")) {
    throw ScorerUnavailableError("malformed scoring response");
  }
  const auto& choices = parsed["choices"];
  if (static_cast<int>(choices.size()) != decisions.size()) {
    throw ScorerUnavailableError(
        "scoring response has " + std::to_string(choices.size()) +
        " choices, expected " + std::to_string(decisions.size()));
  }
  std::vector<double> raw;
  raw.reserve(choices.size());
  try {
    for (const auto& choice : choices) {
      double loglik = choice.at("logprob").get<double>();
      double tokens = std::max(1.0, choice.value("tokens", 1.0));
      raw.push_back(loglik / tokens);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ScorerUnavailableError(std::string("malformed choice entry: ") +
                                 e.what());
  }
  return make_score_vector(std::move(raw), config_.temperature);
}

}  // namespace ltlplan
