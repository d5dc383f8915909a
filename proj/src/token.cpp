// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/token.hpp"

#include <algorithm>

#include "soap/base64url.hpp"

namespace soap::token {

std::string build_nonce_field(const crypto::RandomValue& n,
                              const crypto::SaltedHash& h) {
    return b64url::encode(n.bytes) + "." + b64url::encode(h.bytes);
}

Result<NonceField> parse_nonce_field(std::string_view s) {
    const auto dot = s.find('.');
    if (dot == std::string_view::npos || s.find('.', dot + 1) != std::string_view::npos) {
        return fail(Error::MalformedNonce, "nonce field needs exactly one delimiter");
    }
    auto n = b64url::decode(s.substr(0, dot));
    auto h = b64url::decode(s.substr(dot + 1));
    if (!n.ok() || !h.ok() || n.value().empty() || h.value().empty()) {
        return fail(Error::MalformedNonce, "nonce field segments not base64url");
    }
    return NonceField{std::move(n).value(), std::move(h).value()};
}

std::string encode_token(const IdTokenClaims& claims,
                         const crypto::SigningKeyPair& key) {
    const nlohmann::json header = {{"alg", key.algorithm()},
                                   {"kid", key.key_id()},
                                   {"typ", "JWT"}};
    const nlohmann::json payload = {
        {"iss", claims.issuer}, {"aud", claims.audience},
        {"sub", claims.subject}, {"email", claims.email},
        {"nonce", claims.nonce}, {"iat", claims.issued_at},
        {"exp", claims.expires_at}};
    const std::string signing_input =
        b64url::encode(header.dump()) + "." + b64url::encode(payload.dump());
    const crypto::Bytes sig = crypto::sign(crypto::as_bytes(signing_input), key);
    return signing_input + "." + b64url::encode(sig);
}

Result<DecodedToken> decode_token(std::string_view compact) {
    const auto first = compact.find('.');
    const auto second = first == std::string_view::npos
                            ? std::string_view::npos
                            : compact.find('.', first + 1);
    if (second == std::string_view::npos ||
        compact.find('.', second + 1) != std::string_view::npos) {
        return fail(Error::MalformedToken, "compact JWS needs three segments");
    }
    const auto header_b64 = compact.substr(0, first);
    const auto payload_b64 = compact.substr(first + 1, second - first - 1);
    const auto sig_b64 = compact.substr(second + 1);

    auto header_raw = b64url::decode(header_b64);
    auto payload_raw = b64url::decode(payload_b64);
    auto sig_raw = b64url::decode(sig_b64);
    if (!header_raw.ok() || !payload_raw.ok() || !sig_raw.ok()) {
        return fail(Error::MalformedToken, "segment not base64url");
    }

    DecodedToken out;
    out.header = nlohmann::json::parse(header_raw.value().begin(),
                                       header_raw.value().end(), nullptr, false);
    out.payload = nlohmann::json::parse(payload_raw.value().begin(),
                                        payload_raw.value().end(), nullptr, false);
    if (out.header.is_discarded() || out.payload.is_discarded() ||
        !out.header.is_object() || !out.payload.is_object()) {
        return fail(Error::MalformedToken, "segment not a JSON object");
    }
    out.algorithm = out.header.value("alg", "");
    out.key_id = out.header.value("kid", "");
    if (out.algorithm != crypto::kAlgEdDSA) {
        return fail(Error::MalformedToken, "unknown algorithm");
    }
    for (const char* required : {"iss", "aud", "sub", "nonce", "iat", "exp"}) {
        if (!out.payload.contains(required)) {
            return fail(Error::MalformedToken,
                        std::string("missing claim: ") + required);
        }
    }
    out.claims.issuer = out.payload.value("iss", "");
    out.claims.audience = out.payload.value("aud", "");
    out.claims.subject = out.payload.value("sub", "");
    out.claims.email = out.payload.value("email", "");
    out.claims.nonce = out.payload.value("nonce", "");
    if (!out.payload["iat"].is_number_integer() ||
        !out.payload["exp"].is_number_integer()) {
        return fail(Error::MalformedToken, "iat/exp must be integers");
    }
    out.claims.issued_at = out.payload["iat"].get<std::int64_t>();
    out.claims.expires_at = out.payload["exp"].get<std::int64_t>();
    out.signature = std::move(sig_raw).value();
    out.signing_input = std::string(compact.substr(0, second));
    out.compact = std::string(compact);
    return out;
}

Result<ValidatedIdentity> validate_token_prover(
    const DecodedToken& token, const SoapRequestState& state,
    const std::string& client_id, std::int64_t now,
    const std::string& expected_issuer,
    std::span<const crypto::PublicKey> issuer_keys, std::int64_t skew) {
    // 1. issuer (via the redirect-URL -> issuer mapping; defeats IdP mix-up)
    if (token.claims.issuer != expected_issuer) {
        return fail(Error::IssuerMismatch, token.claims.issuer);
    }
    // 2. audience
    if (token.claims.audience != client_id) {
        return fail(Error::AudienceMismatch, token.claims.audience);
    }
    // 3. nonce includes the stored hash
    auto nonce = parse_nonce_field(token.claims.nonce);
    if (!nonce.ok() || nonce.value().h != state.hashed_sn.bytes) {
        return fail(Error::NonceHashMismatch);
    }
    // 4. not expired (and not issued in the future beyond skew)
    if (token.claims.expires_at + skew < now ||
        token.claims.issued_at - skew > now) {
        return fail(Error::TokenExpired);
    }
    // 5. signature under the issuer's published key with matching key id
    const auto key = std::find_if(issuer_keys.begin(), issuer_keys.end(),
                                  [&](const crypto::PublicKey& k) {
                                      return k.key_id == token.key_id;
                                  });
    if (key == issuer_keys.end() ||
        !crypto::verify(crypto::as_bytes(token.signing_input), token.signature,
                        *key)) {
        return fail(Error::BadSignature);
    }
    return ValidatedIdentity{token.claims.issuer, token.claims.subject,
                             token.claims.email};
}

}  // namespace soap::token
