// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "soap/world.hpp"

namespace soap::scenario {

// Result of one scripted run: per-step outcomes, property verdicts taken at
// check steps, the final trace, and whether every expectation was met.
struct ScenarioOutcome {
    bool passed = true;
    std::vector<std::string> failures;       // human-readable, with step index
    nlohmann::json step_results;             // array of {step, op, result}
    nlohmann::json verdicts;                 // array of verdict JSON documents
    std::string trace_jsonl;

    nlohmann::json to_json() const;
};

// Executes a scenario document:
//   {
//     "seed": 7,
//     "users": [...optional extra users...],
//     "script": [ {"op": "...", ..., "expect": "ok"|"<error-code>"}, ... ]
//   }
// Scripts drive a deterministic World; see the bundled scenario files for
// the op vocabulary. Unknown ops or malformed steps fail the run with
// scenario-error.
Result<ScenarioOutcome> run_scenario(const nlohmann::json& doc);
Result<ScenarioOutcome> run_scenario_file(const std::string& path);

}  // namespace soap::scenario
