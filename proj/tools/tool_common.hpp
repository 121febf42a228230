#pragma once

// Option plumbing shared by the ltlplan subcommands: JSON config overlay
// (CLI flag > config file > built-in default), atom specs, and scorer
// construction.

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ltlplan/ltl.hpp"
#include "ltlplan/remote.hpp"
#include "ltlplan/scorer.hpp"

namespace tool {

// Values from --config <file.json>; keys are the long option names without
// the leading dashes (e.g. {"t-budget": 5, "scorer": "noisy"}).
struct ConfigFile {
  nlohmann::json values = nlohmann::json::object();

  void load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    try {
      in >> values;
    } catch (const nlohmann::json::exception& e) {
      throw CLI::ValidationError("--config", e.what());
    }
  }

  template <typename T>
  void overlay(const CLI::Option* option, const std::string& key,
               T& value) const {
    if (option->count() == 0 && values.contains(key)) {
      value = values.at(key).get<T>();
    }
  }
};

// "1:deliver:C1:LC" -> AP; targets with spaces work since ':' delimits.
inline ltlplan::AtomicProposition parse_inline_ap(const std::string& spec) {
  std::vector<std::string> parts;
  std::stringstream stream(spec);
  std::string part;
  while (std::getline(stream, part, ':')) parts.push_back(part);
  if (parts.size() != 4) {
    throw CLI::ValidationError(
        "--ap", "expected id:action:target:destination, got " + spec);
  }
  return ltlplan::make_ap(std::stoi(parts[0]),
                          ltlplan::ap_action_from_string(parts[1]), parts[2],
                          parts[3]);
}

inline std::vector<ltlplan::AtomicProposition> load_atoms_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError("--atoms", "cannot open " + path);
  nlohmann::json j;
  in >> j;
  std::vector<ltlplan::AtomicProposition> atoms;
  for (const auto& aj : j) {
    atoms.push_back(ltlplan::make_ap(
        aj.at("id").get<int>(),
        ltlplan::ap_action_from_string(aj.value("action", "deliver")),
        aj.at("target").get<std::string>(),
        aj.at("destination").get<std::string>()));
  }
  return atoms;
}

// Everything needed to build any of the pluggable scorers.
struct ScorerOptions {
  std::string kind = "oracle";
  double noise_temperature = 0.25;
  double noise_confusion = 0.0;
  double noise_confusion_spread = 0.35;
  double noise_hallucination = 0.0;
  double noise_softmax_temperature = 1.0;
  std::uint64_t noise_seed = 0;
  std::string remote_endpoint;
  std::string remote_path = "/v1/score";
  std::string remote_model;
  std::string remote_auth_env;
  int remote_timeout_ms = 5000;
  std::string cassette = "off";
  std::string cassette_path;
  double remote_temperature = 1.0;

  void add_options(CLI::App* cmd, std::vector<std::pair<CLI::Option*,
                   std::string>>& tracked) {
    auto track = [&](CLI::Option* option, const std::string& key) {
      tracked.emplace_back(option, key);
      return option;
    };
    track(cmd->add_option("--scorer", kind, "oracle | noisy | uniform | remote")
              ->check(CLI::IsMember({"oracle", "noisy", "uniform", "remote"})),
          "scorer");
    track(cmd->add_option("--noise-temperature", noise_temperature,
                          "noisy scorer jitter sd"),
          "noise-temperature");
    track(cmd->add_option("--noise-confusion", noise_confusion,
                          "P(near-tied distractor)"),
          "noise-confusion");
    track(cmd->add_option("--noise-confusion-spread", noise_confusion_spread,
                          "sd of the confused distractor's offset"),
          "noise-confusion-spread");
    track(cmd->add_option("--noise-hallucination", noise_hallucination,
                          "P(truth score suppressed)"),
          "noise-hallucination");
    track(cmd->add_option("--noise-softmax-temperature",
                          noise_softmax_temperature,
                          "softmax temperature for noisy scores"),
          "noise-softmax-temperature");
    track(cmd->add_option("--noise-seed", noise_seed, "noisy scorer seed"),
          "noise-seed");
    track(cmd->add_option("--remote-endpoint", remote_endpoint,
                          "scoring API base URL"),
          "remote-endpoint");
    track(cmd->add_option("--remote-path", remote_path, "scoring API path"),
          "remote-path");
    track(cmd->add_option("--remote-model", remote_model,
                          "model name sent to the API"),
          "remote-model");
    track(cmd->add_option("--remote-auth-env", remote_auth_env,
                          "env var holding the bearer token"),
          "remote-auth-env");
    track(cmd->add_option("--remote-timeout-ms", remote_timeout_ms,
                          "request timeout"),
          "remote-timeout-ms");
    track(cmd->add_option("--cassette", cassette, "off | record | replay")
              ->check(CLI::IsMember({"off", "record", "replay"})),
          "cassette");
    track(cmd->add_option("--cassette-path", cassette_path,
                          "cassette JSON file"),
          "cassette-path");
    track(cmd->add_option("--remote-temperature", remote_temperature,
                          "softmax temperature for remote scores"),
          "remote-temperature");
  }

  ltlplan::ScorerPtr build() const {
    if (kind == "oracle") return std::make_shared<ltlplan::OracleScorer>();
    if (kind == "uniform") return std::make_shared<ltlplan::UniformScorer>();
    if (kind == "noisy") {
      ltlplan::NoiseParams params;
      params.temperature = noise_temperature;
      params.confusion = noise_confusion;
      params.confusion_spread = noise_confusion_spread;
      params.hallucination = noise_hallucination;
      params.softmax_temperature = noise_softmax_temperature;
      params.seed = noise_seed;
      return std::make_shared<ltlplan::NoisyScorer>(params);
    }
    ltlplan::RemoteScorerConfig config;
    config.endpoint = remote_endpoint;
    config.path = remote_path;
    config.model = remote_model;
    config.auth_token_env = remote_auth_env;
    config.timeout_ms = remote_timeout_ms;
    config.cassette_mode = cassette == "record"
                               ? ltlplan::CassetteMode::Record
                               : cassette == "replay"
                                     ? ltlplan::CassetteMode::Replay
                                     : ltlplan::CassetteMode::Off;
    config.cassette_path = cassette_path;
    config.temperature = remote_temperature;
    return std::make_shared<ltlplan::RemoteScorer>(config);
  }

  ltlplan::NoiseParams noise() const {
    ltlplan::NoiseParams params;
    params.temperature = noise_temperature;
    params.confusion = noise_confusion;
    params.hallucination = noise_hallucination;
    params.seed = noise_seed;
    return params;
  }
};

inline void write_text_file(const std::string& path,
                            const std::string& content) {
  std::ofstream out(path);
  if (!out) throw CLI::ValidationError("output", "cannot write " + path);
  out << content;
  if (!content.empty() && content.back() != '\n') out << "\n";
}

}  // namespace tool
