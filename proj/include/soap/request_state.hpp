// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "soap/crypto.hpp"

namespace soap {

// The "most recently issued request" a prover keeps per IdP. The salt never
// leaves this record except inside an attestation.
struct SoapRequestState {
    crypto::RandomValue nonce;
    crypto::RandomValue salt;
    crypto::RandomValue code_verifier;
    crypto::SaltedHash hashed_sn;
    std::string idp_id;
    std::string redirect_url;
    std::int64_t created_at = 0;

    nlohmann::json to_json() const;
    static Result<SoapRequestState> from_json(const nlohmann::json& j);
};

// Self-issued nonces, kept until the corresponding token expires (plus skew).
class ReplayCache {
public:
    void insert(const std::string& nonce_b64, std::int64_t expires_at);
    bool contains(const std::string& nonce_b64) const;
    // Removes exactly the entries with expires_at < now.
    void prune(std::int64_t now);
    std::size_t size() const { return entries_.size(); }

    nlohmann::json to_json() const;
    static ReplayCache from_json(const nlohmann::json& j);

private:
    std::map<std::string, std::int64_t> entries_;
};

}  // namespace soap
