// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <vector>

#include "soap/scenario.hpp"

namespace fs = std::filesystem;
namespace scenario = soap::scenario;

namespace {

std::vector<fs::path> scenario_files() {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(SOAP_SCENARIO_DIR)) {
        if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

}  // namespace

TEST_CASE("every bundled scenario passes") {
    auto files = scenario_files();
    REQUIRE(files.size() >= 13);
    for (const auto& file : files) {
        CAPTURE(file.string());
        auto r = scenario::run_scenario_file(file.string());
        REQUIRE(r.ok());
        for (const auto& failure : r.value().failures) CAPTURE(failure);
        CHECK(r.value().passed);
        CHECK(r.value().failures.empty());
    }
}

TEST_CASE("scenario runs are deterministic") {
    const auto file =
        (fs::path(SOAP_SCENARIO_DIR) / "happy_two_idps.json").string();
    auto a = scenario::run_scenario_file(file);
    auto b = scenario::run_scenario_file(file);
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.value().trace_jsonl == b.value().trace_jsonl);
    CHECK(a.value().to_json() == b.value().to_json());
    CHECK_FALSE(a.value().trace_jsonl.empty());
}

TEST_CASE("an empty script yields only the setup facts") {
    nlohmann::json doc = {{"seed", 1}, {"script", nlohmann::json::array()}};
    auto r = scenario::run_scenario(doc);
    REQUIRE(r.ok());
    CHECK(r.value().passed);
    // The trace carries static environment facts and nothing protocol-level.
    CHECK(r.value().trace_jsonl.find("IsMessagingApp") != std::string::npos);
    CHECK(r.value().trace_jsonl.find("IsRedirectURL") != std::string::npos);
    CHECK(r.value().trace_jsonl.find("SendIdP") == std::string::npos);
}

TEST_CASE("malformed scenario documents are rejected") {
    CHECK_FALSE(scenario::run_scenario(nlohmann::json::array()).ok());
    CHECK_FALSE(scenario::run_scenario({{"seed", 1}}).ok());
    nlohmann::json bad_op = {
        {"seed", 1}, {"script", {{{"op", "no-such-op"}, {"expect", "ok"}}}}};
    auto r = scenario::run_scenario(bad_op);
    // Unknown ops surface either as a hard error or a failed run.
    if (r.ok()) CHECK_FALSE(r.value().passed);
    CHECK_FALSE(scenario::run_scenario_file("/nonexistent.json").ok());
}

TEST_CASE("a wrong expectation fails the run with attribution") {
    nlohmann::json doc = {
        {"seed", 3},
        {"script",
         {{{"op", "run_soap"},
           {"user", "alice"},
           {"peer", "bob"},
           {"idp", "idp1"},
           {"expect", "token-expired"}}}}};
    auto r = scenario::run_scenario(doc);
    REQUIRE(r.ok());
    CHECK_FALSE(r.value().passed);
    REQUIRE_FALSE(r.value().failures.empty());
    CHECK(r.value().failures[0].find("token-expired") != std::string::npos);
}
