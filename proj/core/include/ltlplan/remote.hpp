#pragma once

// HTTP client for a completion-scoring API with record/replay cassettes so
// tests and CI never touch the network.

#include <memory>
#include <string>

#include "ltlplan/scorer.hpp"

namespace ltlplan {

enum class CassetteMode { Off, Record, Replay };

struct RemoteScorerConfig {
  std::string endpoint;       // e.g. "http://scoring.local:8080"
  std::string path = "/v1/score";
  std::string model;          // model name sent in the request body
  std::string auth_token_env; // env var holding the bearer token, may be ""
  int timeout_ms = 5000;
  CassetteMode cassette_mode = CassetteMode::Off;
  std::string cassette_path;  // JSON map request-digest -> response body
  double temperature = 1.0;   // softmax temperature over normalized loglik
};

// Renders the prompt to text, requests per-choice log-likelihoods, and uses
// length-normalized log-likelihood as the raw score. Any transport or
// protocol problem raises ScorerUnavailable with the HTTP status (0 when the
// request never completed).
class RemoteScorer : public Scorer {
 public:
  explicit RemoteScorer(RemoteScorerConfig config);
  ScoreVector score(const PromptContext&, const DecisionSet&) const override;
  std::string name() const override { return "remote"; }

 private:
  struct Cassette;
  RemoteScorerConfig config_;
  std::shared_ptr<Cassette> cassette_;  // lazily loaded, shared across copies
};

}  // namespace ltlplan
