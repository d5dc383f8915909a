// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "soap/crypto.hpp"
#include "soap/idp.hpp"
#include "soap/messaging.hpp"
#include "soap/request_state.hpp"
#include "soap/token.hpp"

namespace soap::prover {

inline constexpr const char* kProtocolVersion = "1";

// Forwardable proof: the signed token plus the salt that opens the hashed
// safety number inside its nonce.
struct SoapAttestation {
    std::string protocol_version = kProtocolVersion;
    std::string idp_id;
    std::string token_compact;
    crypto::RandomValue salt;

    nlohmann::json to_json() const;
    static Result<SoapAttestation> from_json(const nlohmann::json& j);

    // Single forwardable link: <base>#<base64url(json)>.
    std::string to_fragment(const std::string& base_url) const;
    static Result<SoapAttestation> from_fragment(const std::string& url);
};

struct ProverIdpConfig {
    std::string client_id;
    std::string redirect_url;
    std::string expected_issuer;
};

struct ProverConfig {
    std::map<std::string, ProverIdpConfig> idps;  // keyed by idp_id
    std::string hash_profile = crypto::kProfileTest;
    std::int64_t skew = token::kDefaultSkew;
};

struct AuthorizationRequest {
    std::string idp_id;
    std::string endpoint;  // authorization endpoint base
    idp::ParamMap params;
    std::string url() const;
};

struct ExchangeIntent {
    std::string idp_id;
    std::string code;
    idp::ParamMap token_request;  // form parameters for the token endpoint
};

// Prover-side state machine. At most one pending request per IdP; the replay
// cache holds this instance's self-issued nonces.
class Prover {
public:
    explicit Prover(ProverConfig config) : config_(std::move(config)) {}

    const ProverConfig& config() const { return config_; }

    Result<AuthorizationRequest> start_soap(const msg::SafetyNumber& sn,
                                            const std::string& idp_id,
                                            crypto::RandomSource& rng,
                                            std::int64_t now);

    Result<ExchangeIntent> handle_redirect(const idp::ParamMap& params,
                                           const std::string& arrival_url);

    // Runs the five-check validation; on success clears the pending request,
    // records the nonce in the replay cache, and returns the attestation.
    // On any validation failure the pending request is cleared as well.
    Result<SoapAttestation> complete(
        const token::DecodedToken& token, const std::string& idp_id,
        std::span<const crypto::PublicKey> issuer_keys, std::int64_t now);

    void prune_cache(std::int64_t now) { cache_.prune(now); }
    ReplayCache& cache() { return cache_; }
    const ReplayCache& cache() const { return cache_; }
    const SoapRequestState* pending(const std::string& idp_id) const;

    // Persistent state (pending requests plus replay cache).
    nlohmann::json state_to_json() const;
    Result<void> state_from_json(const nlohmann::json& j);

private:
    ProverConfig config_;
    std::map<std::string, SoapRequestState> pending_;
    ReplayCache cache_;
};

}  // namespace soap::prover
