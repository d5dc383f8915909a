// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "soap/crypto.hpp"
#include "soap/request_state.hpp"

namespace soap::token {

// ID-token lifetime bounds at issuance, seconds.
inline constexpr std::int64_t kMinTokenLifetime = 120;
inline constexpr std::int64_t kMaxTokenLifetime = 7200;
inline constexpr std::int64_t kDefaultSkew = 60;

struct IdTokenClaims {
    std::string issuer;
    std::string audience;
    std::string subject;
    std::string email;
    std::string nonce;  // NonceField serialization, see below
    std::int64_t issued_at = 0;
    std::int64_t expires_at = 0;

    bool operator==(const IdTokenClaims&) const = default;
};

// nonce = base64url(n) "." base64url(h). '.' is outside the base64url
// alphabet, so parsing is unambiguous and the salt cannot leak through it.
struct NonceField {
    crypto::Bytes n;
    crypto::Bytes h;
};

std::string build_nonce_field(const crypto::RandomValue& n,
                              const crypto::SaltedHash& h);
Result<NonceField> parse_nonce_field(std::string_view s);

// Decoded but *unverified* token. Trust is only established by the
// validation functions below (or the verifier module).
struct DecodedToken {
    nlohmann::json header;
    nlohmann::json payload;  // unknown claims preserved here
    IdTokenClaims claims;
    std::string key_id;
    std::string algorithm;
    crypto::Bytes signature;
    std::string signing_input;  // "b64(header).b64(payload)"
    std::string compact;
};

std::string encode_token(const IdTokenClaims& claims,
                         const crypto::SigningKeyPair& key);
Result<DecodedToken> decode_token(std::string_view compact);

struct ValidatedIdentity {
    std::string issuer;
    std::string subject;
    std::string email;
};

// The prover-side checklist, evaluated in order: issuer, audience,
// nonce hash, expiry, signature. expected_issuer is the issuer registered
// for the IdP the stored request's redirect URL belongs to.
Result<ValidatedIdentity> validate_token_prover(
    const DecodedToken& token, const SoapRequestState& state,
    const std::string& client_id, std::int64_t now,
    const std::string& expected_issuer,
    std::span<const crypto::PublicKey> issuer_keys,
    std::int64_t skew = kDefaultSkew);

}  // namespace soap::token
