// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/errors.hpp"

#include <array>

namespace soap {

namespace {

struct Entry {
    Error code;
    std::string_view name;
};

constexpr std::array<Entry, 32> kEntries{{
    {Error::InvalidInput, "invalid-input"},
    {Error::UnsupportedProfile, "unsupported-profile"},
    {Error::MalformedNonce, "malformed-nonce"},
    {Error::MalformedToken, "malformed-token"},
    {Error::IssuerMismatch, "issuer-mismatch"},
    {Error::AudienceMismatch, "audience-mismatch"},
    {Error::NonceHashMismatch, "nonce-hash-mismatch"},
    {Error::TokenExpired, "token-expired"},
    {Error::BadSignature, "bad-signature"},
    {Error::LifetimeOutOfRange, "lifetime-out-of-range"},
    {Error::InvalidRegistration, "invalid-registration"},
    {Error::UnknownClient, "unknown-client"},
    {Error::RedirectMismatch, "redirect-mismatch"},
    {Error::AuthFailed, "auth-failed"},
    {Error::AccessDenied, "access-denied"},
    {Error::UnsupportedResponseType, "unsupported-response-type"},
    {Error::InvalidGrant, "invalid-grant"},
    {Error::InvalidPkce, "invalid-pkce"},
    {Error::InvalidClient, "invalid-client"},
    {Error::UnknownIdp, "unknown-idp"},
    {Error::StateMismatch, "state-mismatch"},
    {Error::RedirectOriginMismatch, "redirect-origin-mismatch"},
    {Error::NoPendingRequest, "no-pending-request"},
    {Error::ReflectionDetected, "reflection-detected"},
    {Error::SafetyNumberMismatch, "safety-number-mismatch"},
    {Error::UnknownIssuer, "unknown-issuer"},
    {Error::MalformedAttestation, "malformed-attestation"},
    {Error::InvalidPair, "invalid-pair"},
    {Error::RegistrationFailed, "registration-failed"},
    {Error::ChannelViolation, "channel-violation"},
    {Error::ScenarioError, "scenario-error"},
    {Error::ParseError, "parse-error"},
}};

}  // namespace

std::string_view to_string(Error e) {
    for (const auto& entry : kEntries) {
        if (entry.code == e) return entry.name;
    }
    return "unknown-error";
}

std::optional<Error> error_from_string(std::string_view s) {
    for (const auto& entry : kEntries) {
        if (entry.name == s) return entry.code;
    }
    return std::nullopt;
}

}  // namespace soap
