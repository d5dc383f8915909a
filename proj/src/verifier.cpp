// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/verifier.hpp"

#include <algorithm>

#include "soap/base64url.hpp"
#include "soap/token.hpp"

namespace soap::verifier {

nlohmann::json CheckReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& step : steps) {
        nlohmann::json entry = {{"check", step.check}, {"passed", step.passed}};
        if (!step.passed) entry["error"] = step.error;
        arr.push_back(entry);
    }
    return {{"schema", "soap-verification-report/1"}, {"checks", arr}};
}

namespace {

class Reporter {
public:
    explicit Reporter(CheckReport* report) : report_(report) {}

    void pass(const std::string& check) {
        if (report_) report_->steps.push_back({check, true, {}});
    }
    Failure failed(const std::string& check, Error code,
                   std::string detail = {}) {
        if (report_) {
            report_->steps.push_back(
                {check, false, std::string(to_string(code))});
        }
        return fail(code, std::move(detail));
    }

private:
    CheckReport* report_;
};

}  // namespace

Result<AuthenticatedIdentity> verify_attestation(
    const prover::SoapAttestation& att, const msg::SafetyNumber& channel_sn,
    const ReplayCache& own_cache, const IdpRegistry& registry,
    std::int64_t now, std::int64_t skew, CheckReport* report) {
    Reporter rep(report);

    // well-formedness: version, token shape, nonce grammar, salt entropy
    if (registry.supported_versions.count(att.protocol_version) == 0) {
        return rep.failed("well-formed", Error::MalformedAttestation,
                          "unsupported protocol version");
    }
    auto decoded = token::decode_token(att.token_compact);
    if (!decoded.ok()) {
        return rep.failed("well-formed", Error::MalformedAttestation,
                          decoded.detail());
    }
    const token::DecodedToken& token = decoded.value();
    auto nonce = token::parse_nonce_field(token.claims.nonce);
    if (!nonce.ok() || att.salt.bytes.size() < 32) {
        return rep.failed("well-formed", Error::MalformedAttestation,
                          "bad nonce field or salt");
    }
    rep.pass("well-formed");

    // issuer known
    auto keys = registry.issuer_keys.find(token.claims.issuer);
    if (keys == registry.issuer_keys.end()) {
        return rep.failed("issuer-known", Error::UnknownIssuer,
                          token.claims.issuer);
    }
    rep.pass("issuer-known");

    // expiry
    if (token.claims.expires_at + skew < now ||
        token.claims.issued_at - skew > now) {
        return rep.failed("unexpired", Error::TokenExpired);
    }
    rep.pass("unexpired");

    // signature under a published key of the issuer
    const auto key = std::find_if(
        keys->second.begin(), keys->second.end(),
        [&](const crypto::PublicKey& k) { return k.key_id == token.key_id; });
    if (key == keys->second.end() ||
        !crypto::verify(crypto::as_bytes(token.signing_input), token.signature,
                        *key)) {
        return rep.failed("signature", Error::BadSignature);
    }
    rep.pass("signature");

    // reflection: the nonce must not have been generated by this instance
    if (own_cache.contains(b64url::encode(nonce.value().n))) {
        return rep.failed("not-self-issued", Error::ReflectionDetected);
    }
    rep.pass("not-self-issued");

    // channel binding: recompute the salted hash over this channel's safety
    // number with the forwarded salt
    auto recomputed =
        crypto::salted_hash(channel_sn.bytes(), att.salt, registry.hash_profile);
    if (!recomputed.ok() || recomputed.value().bytes != nonce.value().h) {
        return rep.failed("safety-number", Error::SafetyNumberMismatch);
    }
    rep.pass("safety-number");

    AuthenticatedIdentity identity;
    identity.issuer = token.claims.issuer;
    identity.subject = token.claims.subject;
    identity.email = token.claims.email;
    identity.safety_number = channel_sn;
    identity.verified_at = now;
    return identity;
}

}  // namespace soap::verifier
