#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace mgt {

inline constexpr const char* MGTKIT_VERSION = "0.1.0";

// One experiment request. The schema is strict: unknown fields anywhere are
// rejected before any computation runs.
struct ExperimentConfig {
  std::string kind;  // lift-verify | cylinder | groupoid-build | indep-crossval |
                     // cocycle-solve | tree-cocycle | entropy
  std::uint64_t seed = 0;
  unsigned radius = 0;        // 0 = kind default
  std::uint64_t samples = 0;  // 0 = kind default
  std::string out;
  nlohmann::json params = nlohmann::json::object();
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);

struct RunReport {
  nlohmann::json config;  // echo of the effective config, defaults filled in
  std::string version = MGTKIT_VERSION;
  double wall_seconds = 0.0;
  bool pass = false;
  nlohmann::json payload;  // deterministic given (config, seed)
};

// payload and pass are byte-stable across reruns and thread counts;
// wall_seconds is the only field allowed to vary.
nlohmann::json to_json(const RunReport& r);
// flat two-column view of the payload; arrays are joined with '|'
std::string to_csv(const RunReport& r);

RunReport run(const ExperimentConfig& c);

struct AcceptanceOptions {
  std::string filter;  // substring of the criterion name; empty = all
  bool mutate = false;  // plant a deliberate fault to exercise the reporting
};

struct CriterionResult {
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  nlohmann::json details;
};

struct AcceptanceReport {
  std::vector<CriterionResult> criteria;
  bool all_pass = false;
};

// {criteria: [{name, pass, details}], all_pass}; timings are deliberately
// left out so the artifact is byte-identical across runs and thread counts
nlohmann::json to_json(const AcceptanceReport& r);

AcceptanceReport acceptance(const AcceptanceOptions& opt = {});

}  // namespace mgt
