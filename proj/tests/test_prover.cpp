// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "reference_sha256.hpp"
#include "soap/base64url.hpp"
#include "soap/prover.hpp"

namespace crypto = soap::crypto;
namespace prover = soap::prover;
namespace token = soap::token;
using soap::Error;

namespace {

struct ProverFixture {
    crypto::SeededRandomSource rng{31337};
    prover::ProverConfig config;
    soap::msg::SafetyNumber sn;
    std::int64_t now = 2'000'000;

    ProverFixture() {
        config.idps["idp1"] = {"client-1", "https://app.example/cb/idp1",
                               "https://idp1.example"};
        config.idps["idp2"] = {"client-2", "https://app.example/cb/idp2",
                               "https://idp2.example"};
        sn.digest = crypto::sha256(std::string_view("some-conversation"));
    }
};

// Every encoding under which a secret must not appear in IdP-visible data.
bool leaks(const std::string& haystack, const crypto::Bytes& secret) {
    const std::string raw(secret.begin(), secret.end());
    return haystack.find(raw) != std::string::npos ||
           haystack.find(soap::b64url::encode(secret)) != std::string::npos ||
           haystack.find(crypto::to_hex(secret)) != std::string::npos;
}

}  // namespace

TEST_CASE("start_soap emits exactly the expected authorization parameters") {
    ProverFixture f;
    prover::Prover p(f.config);
    auto req = p.start_soap(f.sn, "idp1", f.rng, f.now);
    REQUIRE(req.ok());
    CHECK(req.value().endpoint == "https://idp1.example/authorize");

    const auto& params = req.value().params;
    const std::vector<std::string> expected = {
        "client_id",      "code_challenge", "code_challenge_method",
        "nonce",          "redirect_uri",   "response_type",
        "scope",          "state"};
    std::vector<std::string> got;
    for (const auto& [k, v] : params) got.push_back(k);
    CHECK(got == expected);

    CHECK(params.at("client_id") == "client-1");
    CHECK(params.at("redirect_uri") == "https://app.example/cb/idp1");
    CHECK(params.at("scope") == "openid email");
    CHECK(params.at("response_type") == "code");
    CHECK(params.at("code_challenge_method") == "S256");

    const soap::SoapRequestState* state = p.pending("idp1");
    REQUIRE(state != nullptr);
    CHECK(params.at("state") == soap::b64url::encode(state->nonce.bytes));
    CHECK(params.at("nonce") ==
          token::build_nonce_field(state->nonce, state->hashed_sn));
    // The challenge commits to the base64url form of the verifier, checked
    // against the independent reference pipeline.
    const std::string v_b64 = soap::b64url::encode(state->code_verifier.bytes);
    const auto digest =
        testref::sha256(reinterpret_cast<const std::uint8_t*>(v_b64.data()),
                        v_b64.size());
    CHECK(params.at("code_challenge") ==
          testref::base64url(digest.data(), digest.size()));

    // The nonce's hash component opens to the safety number with the salt.
    auto nf = token::parse_nonce_field(params.at("nonce")).value();
    auto recomputed = crypto::salted_hash(f.sn.bytes(), state->salt,
                                          crypto::kProfileTest);
    CHECK(nf.h == recomputed.value().bytes);
}

TEST_CASE("neither the salt nor the safety number reaches the request URL") {
    ProverFixture f;
    prover::Prover p(f.config);
    auto req = p.start_soap(f.sn, "idp1", f.rng, f.now);
    REQUIRE(req.ok());
    const soap::SoapRequestState* state = p.pending("idp1");
    const crypto::Bytes sn_bytes(f.sn.bytes().begin(), f.sn.bytes().end());
    const std::string url = req.value().url();
    CHECK_FALSE(leaks(url, state->salt.bytes));
    CHECK_FALSE(leaks(url, sn_bytes));
    for (const auto& [k, v] : req.value().params) {
        CHECK_FALSE(leaks(v, state->salt.bytes));
        CHECK_FALSE(leaks(v, sn_bytes));
    }
}

TEST_CASE("unknown IdP is rejected and pending state is per IdP") {
    ProverFixture f;
    prover::Prover p(f.config);
    CHECK(p.start_soap(f.sn, "idp9", f.rng, f.now).error() ==
          Error::UnknownIdp);
    CHECK(p.start_soap(f.sn, "idp1", f.rng, f.now).ok());
    const auto first_nonce = p.pending("idp1")->nonce;
    CHECK(p.start_soap(f.sn, "idp2", f.rng, f.now).ok());
    CHECK(p.pending("idp1")->nonce == first_nonce);
    // A repeated start for the same IdP overwrites the pending request.
    CHECK(p.start_soap(f.sn, "idp1", f.rng, f.now).ok());
    CHECK_FALSE(p.pending("idp1")->nonce == first_nonce);
}

TEST_CASE("handle_redirect distinguishes its error cases") {
    ProverFixture f;
    prover::Prover p(f.config);

    soap::idp::ParamMap params;
    CHECK(p.handle_redirect(params, "https://app.example/cb/idp1").error() ==
          Error::NoPendingRequest);

    REQUIRE(p.start_soap(f.sn, "idp1", f.rng, f.now).ok());
    const std::string good_state =
        soap::b64url::encode(p.pending("idp1")->nonce.bytes);

    params["code"] = "some-code";
    params["state"] = good_state;
    CHECK(p.handle_redirect(params, "https://app.example/cb/idp2").error() ==
          Error::RedirectOriginMismatch);

    params["state"] = "attacker-chosen";
    CHECK(p.handle_redirect(params, "https://app.example/cb/idp1").error() ==
          Error::StateMismatch);
    // The pending request survives an adversarial redirect.
    REQUIRE(p.pending("idp1") != nullptr);

    params["state"] = good_state;
    params.erase("code");
    CHECK_FALSE(p.handle_redirect(params, "https://app.example/cb/idp1").ok());

    params["code"] = "some-code";
    auto intent = p.handle_redirect(params, "https://app.example/cb/idp1");
    REQUIRE(intent.ok());
    CHECK(intent.value().idp_id == "idp1");
    CHECK(intent.value().token_request.at("grant_type") ==
          "authorization_code");
    CHECK(intent.value().token_request.at("code") == "some-code");
    CHECK(intent.value().token_request.at("client_id") == "client-1");
    CHECK(intent.value().token_request.at("redirect_uri") ==
          "https://app.example/cb/idp1");
    CHECK(intent.value().token_request.at("code_verifier") ==
          soap::b64url::encode(p.pending("idp1")->code_verifier.bytes));
}

TEST_CASE("complete caches the nonce and clears the pending request") {
    ProverFixture f;
    prover::Prover p(f.config);
    REQUIRE(p.start_soap(f.sn, "idp1", f.rng, f.now).ok());
    const soap::SoapRequestState state = *p.pending("idp1");

    auto key = crypto::SigningKeyPair::generate(f.rng, "key-0");
    token::IdTokenClaims claims;
    claims.issuer = "https://idp1.example";
    claims.audience = "client-1";
    claims.subject = "sub-alice";
    claims.email = "a@b";
    claims.nonce = token::build_nonce_field(state.nonce, state.hashed_sn);
    claims.issued_at = f.now;
    claims.expires_at = f.now + 3600;
    auto tok = token::decode_token(token::encode_token(claims, key)).value();
    std::vector<crypto::PublicKey> keys{key.public_key()};

    auto att = p.complete(tok, "idp1", keys, f.now + 1);
    REQUIRE(att.ok());
    CHECK(att.value().idp_id == "idp1");
    CHECK(att.value().salt == state.salt);
    CHECK(att.value().token_compact == tok.compact);
    CHECK(p.pending("idp1") == nullptr);
    CHECK(p.cache().contains(soap::b64url::encode(state.nonce.bytes)));

    // Completing again without a pending request fails.
    CHECK(p.complete(tok, "idp1", keys, f.now + 1).error() ==
          Error::NoPendingRequest);

    // A failed validation also clears the pending request.
    REQUIRE(p.start_soap(f.sn, "idp2", f.rng, f.now).ok());
    CHECK(p.complete(tok, "idp2", keys, f.now + 1).error() ==
          Error::IssuerMismatch);
    CHECK(p.pending("idp2") == nullptr);
}

TEST_CASE("replay cache prunes exactly the expired entries") {
    soap::ReplayCache cache;
    cache.insert("a", 100);
    cache.insert("b", 200);
    cache.prune(100);
    CHECK(cache.contains("a"));  // expires_at == now is kept
    cache.prune(101);
    CHECK_FALSE(cache.contains("a"));
    CHECK(cache.contains("b"));
    CHECK(cache.size() == 1);
}

TEST_CASE("prover state persists through JSON") {
    ProverFixture f;
    prover::Prover p(f.config);
    REQUIRE(p.start_soap(f.sn, "idp1", f.rng, f.now).ok());
    p.cache().insert("nonce-x", f.now + 100);
    const nlohmann::json snapshot = p.state_to_json();

    prover::Prover q(f.config);
    REQUIRE(q.state_from_json(snapshot).ok());
    CHECK(q.state_to_json() == snapshot);
    REQUIRE(q.pending("idp1") != nullptr);
    CHECK(q.pending("idp1")->nonce == p.pending("idp1")->nonce);
    CHECK(q.pending("idp1")->salt == p.pending("idp1")->salt);
    CHECK(q.cache().contains("nonce-x"));

    CHECK_FALSE(q.state_from_json(nlohmann::json::array()).ok());
}

TEST_CASE("attestation serialization round trips") {
    ProverFixture f;
    prover::SoapAttestation att;
    att.idp_id = "idp1";
    att.token_compact = "aGVhZGVy.cGF5bG9hZA.c2ln";
    att.salt = crypto::gen_random(f.rng, 256).value();

    auto from_json = prover::SoapAttestation::from_json(att.to_json());
    REQUIRE(from_json.ok());
    CHECK(from_json.value().idp_id == att.idp_id);
    CHECK(from_json.value().token_compact == att.token_compact);
    CHECK(from_json.value().salt.bytes == att.salt.bytes);
    CHECK(from_json.value().protocol_version == "1");

    const std::string frag = att.to_fragment("https://soap.example/attest");
    CHECK(frag.rfind("https://soap.example/attest#", 0) == 0);
    auto from_frag = prover::SoapAttestation::from_fragment(frag);
    REQUIRE(from_frag.ok());
    CHECK(from_frag.value().token_compact == att.token_compact);

    CHECK_FALSE(prover::SoapAttestation::from_fragment("https://x/no-frag")
                    .ok());
    CHECK_FALSE(
        prover::SoapAttestation::from_json({{"v", "1"}, {"idp", "x"}}).ok());
}
