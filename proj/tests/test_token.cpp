// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "reference_sha256.hpp"
#include "soap/base64url.hpp"
#include "soap/token.hpp"

namespace crypto = soap::crypto;
namespace token = soap::token;
using soap::Error;

namespace {

struct Fixture {
    crypto::SeededRandomSource rng{1234};
    crypto::SigningKeyPair key = crypto::SigningKeyPair::generate(rng, "key-0");
    std::vector<crypto::PublicKey> keys{key.public_key()};
    soap::SoapRequestState state;
    token::IdTokenClaims claims;
    std::int64_t now = 1'000'000;

    Fixture() {
        state.nonce = crypto::gen_random(rng, 256).value();
        state.salt = crypto::gen_random(rng, 256).value();
        state.code_verifier = crypto::gen_random(rng, 256).value();
        const auto sn = rng.bytes(32);
        state.hashed_sn =
            crypto::salted_hash(sn, state.salt, crypto::kProfileTest).value();
        state.idp_id = "idp1";
        state.redirect_url = "https://app.example/cb/idp1";
        state.created_at = now;

        claims.issuer = "https://idp1.example";
        claims.audience = "client-1";
        claims.subject = "sub-alice";
        claims.email = "alice@idp1.example";
        claims.nonce = token::build_nonce_field(state.nonce, state.hashed_sn);
        claims.issued_at = now;
        claims.expires_at = now + 3600;
    }

    token::DecodedToken make_token() const {
        return token::decode_token(token::encode_token(claims, key)).value();
    }

    soap::Result<token::ValidatedIdentity> validate(
        const token::DecodedToken& tok, std::int64_t at) const {
        return token::validate_token_prover(tok, state, "client-1", at,
                                            "https://idp1.example", keys, 60);
    }
};

}  // namespace

TEST_CASE("nonce field round trips and the delimiter is unambiguous") {
    crypto::SeededRandomSource rng(55);
    for (int i = 0; i < 1000; ++i) {
        crypto::RandomValue n = crypto::gen_random(rng, 256).value();
        crypto::SaltedHash h{rng.bytes(32), crypto::kProfileTest};
        const std::string field = token::build_nonce_field(n, h);
        CHECK(std::count(field.begin(), field.end(), '.') == 1);
        auto parsed = token::parse_nonce_field(field);
        REQUIRE(parsed.ok());
        CHECK(parsed.value().n == n.bytes);
        CHECK(parsed.value().h == h.bytes);
    }
}

TEST_CASE("nonce field grammar rejections") {
    for (const char* bad : {"abc", "x.y.z", "", ".", "a.", ".b", "a=.b",
                            "a.b.c.d"}) {
        auto r = token::parse_nonce_field(bad);
        CHECK_FALSE(r.ok());
        if (!r.ok()) CHECK(r.error() == Error::MalformedNonce);
    }
    // Minimal valid instance: canonical base64url on both sides.
    CHECK(token::parse_nonce_field("_w.-g").ok());
}

TEST_CASE("JWS compact encode/decode round trip") {
    Fixture f;
    const std::string compact = token::encode_token(f.claims, f.key);
    auto decoded = token::decode_token(compact);
    REQUIRE(decoded.ok());
    CHECK(decoded.value().claims == f.claims);
    CHECK(decoded.value().header["alg"] == "EdDSA");
    CHECK(decoded.value().header["typ"] == "JWT");
    CHECK(decoded.value().key_id == "key-0");
    CHECK(decoded.value().compact == compact);
    // The signature covers header.payload as serialized.
    CHECK(crypto::verify(crypto::as_bytes(decoded.value().signing_input),
                         decoded.value().signature, f.key.public_key()));
}

TEST_CASE("token decode rejections") {
    Fixture f;
    const std::string compact = token::encode_token(f.claims, f.key);
    CHECK_FALSE(token::decode_token("onesegment").ok());
    CHECK_FALSE(token::decode_token("a.b").ok());
    CHECK_FALSE(token::decode_token(compact + ".extra").ok());
    CHECK_FALSE(token::decode_token("!!.!!.!!").ok());

    // Unknown algorithm in the header.
    const std::string rs_header =
        soap::b64url::encode(R"({"alg":"RS256","kid":"key-0"})");
    const auto dot = compact.find('.');
    auto swapped = token::decode_token(rs_header + compact.substr(dot));
    CHECK_FALSE(swapped.ok());
    CHECK(swapped.error() == Error::MalformedToken);

    // A required claim is missing.
    nlohmann::json payload = token::decode_token(compact).value().payload;
    payload.erase("sub");
    const auto dot2 = compact.rfind('.');
    const std::string missing =
        compact.substr(0, dot) + "." + soap::b64url::encode(payload.dump()) +
        compact.substr(dot2);
    CHECK_FALSE(token::decode_token(missing).ok());
}

TEST_CASE("prover validation checklist: happy path") {
    Fixture f;
    auto id = f.validate(f.make_token(), f.now + 10);
    REQUIRE(id.ok());
    CHECK(id.value().issuer == "https://idp1.example");
    CHECK(id.value().subject == "sub-alice");
    CHECK(id.value().email == "alice@idp1.example");
}

TEST_CASE("prover validation: each check fails in isolation") {
    SUBCASE("issuer mismatch is check 1") {
        Fixture f;
        f.claims.issuer = "https://evil.example";
        // Break later checks too: order must still yield the issuer error.
        f.claims.audience = "client-other";
        auto r = f.validate(f.make_token(), f.now + 10);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::IssuerMismatch);
    }
    SUBCASE("audience mismatch is check 2") {
        Fixture f;
        f.claims.audience = "client-other";
        auto r = f.validate(f.make_token(), f.now + 10);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::AudienceMismatch);
    }
    SUBCASE("nonce hash mismatch is check 3") {
        Fixture f;
        crypto::SaltedHash other{f.rng.bytes(32), crypto::kProfileTest};
        f.claims.nonce = token::build_nonce_field(f.state.nonce, other);
        auto r = f.validate(f.make_token(), f.now + 10);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::NonceHashMismatch);
    }
    SUBCASE("an unparseable nonce also fails check 3") {
        Fixture f;
        f.claims.nonce = "not-a-nonce";
        auto r = f.validate(f.make_token(), f.now + 10);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::NonceHashMismatch);
    }
    SUBCASE("expiry is check 4 and honors skew") {
        Fixture f;
        auto tok = f.make_token();
        CHECK(f.validate(tok, f.claims.expires_at + 60).ok());
        auto r = f.validate(tok, f.claims.expires_at + 61);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::TokenExpired);
        // Tokens from the future fail the same check.
        auto r2 = f.validate(tok, f.claims.issued_at - 61);
        REQUIRE_FALSE(r2.ok());
        CHECK(r2.error() == Error::TokenExpired);
    }
    SUBCASE("signature is check 5") {
        Fixture f;
        auto tok = f.make_token();
        tok.signature[0] ^= 1;
        auto r = f.validate(tok, f.now + 10);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::BadSignature);
    }
    SUBCASE("an unknown key id is a signature failure") {
        Fixture f;
        auto wrong = crypto::SigningKeyPair::generate(f.rng, "key-9");
        auto tok =
            token::decode_token(token::encode_token(f.claims, wrong)).value();
        auto r = f.validate(tok, f.now + 10);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::BadSignature);
    }
    SUBCASE("a valid signature under the wrong key is a signature failure") {
        Fixture f;
        // Same key id as the trusted key, different key material.
        auto wrong = crypto::SigningKeyPair::generate(f.rng, "key-0");
        auto tok =
            token::decode_token(token::encode_token(f.claims, wrong)).value();
        auto r = f.validate(tok, f.now + 10);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error() == Error::BadSignature);
    }
}
