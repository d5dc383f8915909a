// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "soap/crypto.hpp"
#include "soap/messaging.hpp"
#include "soap/prover.hpp"
#include "soap/request_state.hpp"

namespace soap::verifier {

// Trusted issuers with their published keys. Refreshed from discovery/JWKS
// in simulation; application configuration in spirit.
struct IdpRegistry {
    std::map<std::string, std::vector<crypto::PublicKey>> issuer_keys;
    std::set<std::string> supported_versions{"1"};
    std::string hash_profile = crypto::kProfileTest;
};

struct AuthenticatedIdentity {
    std::string issuer;
    std::string subject;
    std::string email;
    msg::SafetyNumber safety_number;
    std::int64_t verified_at = 0;
};

// Per-check pass/fail report for the CLI.
struct CheckReport {
    struct Step {
        std::string check;
        bool passed = false;
        std::string error;
    };
    std::vector<Step> steps;
    nlohmann::json to_json() const;
};

// Check order: malformed -> unknown-issuer -> expiry -> signature ->
// reflection -> safety-number hash. Stops at the first failure with a
// distinct error code.
Result<AuthenticatedIdentity> verify_attestation(
    const prover::SoapAttestation& att, const msg::SafetyNumber& channel_sn,
    const ReplayCache& own_cache, const IdpRegistry& registry,
    std::int64_t now, std::int64_t skew = token::kDefaultSkew,
    CheckReport* report = nullptr);

}  // namespace soap::verifier
