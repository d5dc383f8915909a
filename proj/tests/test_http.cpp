// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <httplib.h>

#include <map>
#include <string>
#include <thread>

#include <nlohmann/json.hpp>

#include "soap/http_idp.hpp"
#include "soap/token.hpp"

namespace crypto = soap::crypto;
namespace idp = soap::idp;

namespace {

// One loopback IdP shared by every case in this file.
struct HttpFixture {
    crypto::SeededRandomSource rng{9090};
    idp::IdpSimulator sim{{"https://idp.example", 3600, 600}, rng};
    std::string client_id;
    soap::http::IdpHttpServer server{sim, [] { return std::int64_t{700'000}; }};
    int port = -1;
    std::thread thread;

    HttpFixture() {
        client_id = sim.register_client({"https://app.example/cb"}).value();
        sim.add_account("alice", {"pw", "alice@idp.example", "sub-alice"});
        port = server.bind_any("127.0.0.1");
        REQUIRE(port > 0);
        thread = std::thread([this] { server.listen_after_bind(); });
    }

    ~HttpFixture() {
        server.stop();
        thread.join();
    }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", port);
        c.set_connection_timeout(5);
        return c;
    }
};

// Query values in this protocol are base64url or plain tokens, so splitting
// the Location query on & and = needs no percent-decoding.
std::map<std::string, std::string> parse_query(const std::string& url) {
    std::map<std::string, std::string> out;
    auto qpos = url.find('?');
    REQUIRE(qpos != std::string::npos);
    std::string query = url.substr(qpos + 1);
    std::size_t start = 0;
    while (start < query.size()) {
        auto amp = query.find('&', start);
        if (amp == std::string::npos) amp = query.size();
        auto eq = query.find('=', start);
        REQUIRE(eq < amp);
        out[query.substr(start, eq - start)] =
            query.substr(eq + 1, amp - eq - 1);
        start = amp + 1;
    }
    return out;
}

}  // namespace

TEST_CASE("loopback IdP serves the full authorization code flow") {
    HttpFixture f;
    auto client = f.client();

    auto disco = client.Get("/.well-known/openid-configuration");
    REQUIRE(disco);
    REQUIRE(disco->status == 200);
    auto doc = nlohmann::json::parse(disco->body);
    CHECK(doc["issuer"] == "https://idp.example");
    CHECK(doc.contains("authorization_endpoint"));
    CHECK(doc.contains("token_endpoint"));
    CHECK(doc.contains("jwks_uri"));

    const std::string verifier = "http-test-code-verifier";
    const std::string challenge =
        crypto::pkce_challenge(crypto::as_bytes(verifier)).value();
    httplib::Params auth = {
        {"client_id", f.client_id},
        {"redirect_uri", "https://app.example/cb"},
        {"scope", "openid email"},
        {"response_type", "code"},
        {"state", "c3RhdGU"},
        {"nonce", "bm9uY2U.aGFzaA"},
        {"code_challenge", challenge},
        {"code_challenge_method", "S256"},
        {"username", "alice"},
        {"password", "pw"},
    };
    auto authz = client.Get("/authorize", auth, httplib::Headers{});
    REQUIRE(authz);
    REQUIRE(authz->status == 302);
    auto redirect = parse_query(authz->get_header_value("Location"));
    CHECK(redirect.at("state") == "c3RhdGU");
    const std::string code = redirect.at("code");
    REQUIRE_FALSE(code.empty());

    httplib::Params form = {
        {"grant_type", "authorization_code"},
        {"code", code},
        {"code_verifier", verifier},
        {"client_id", f.client_id},
        {"redirect_uri", "https://app.example/cb"},
    };
    auto token_res = client.Post("/token", form);
    REQUIRE(token_res);
    REQUIRE(token_res->status == 200);
    auto body = nlohmann::json::parse(token_res->body);
    auto tok = soap::token::decode_token(body["id_token"].get<std::string>());
    REQUIRE(tok.ok());
    CHECK(tok.value().claims.nonce == "bm9uY2U.aGFzaA");
    CHECK(tok.value().claims.subject == "sub-alice");

    // The token verifies against the published JWKS.
    auto jwks_res = client.Get("/jwks.json");
    REQUIRE(jwks_res);
    auto keys =
        crypto::jwks_import(nlohmann::json::parse(jwks_res->body)).value();
    bool verified = false;
    for (const auto& k : keys) {
        if (k.key_id == tok.value().key_id &&
            crypto::verify(crypto::as_bytes(tok.value().signing_input),
                           tok.value().signature, k)) {
            verified = true;
        }
    }
    CHECK(verified);

    // Codes are single use over HTTP too.
    auto replay = client.Post("/token", form);
    REQUIRE(replay);
    CHECK(replay->status == 400);
    CHECK(nlohmann::json::parse(replay->body)["error"] == "invalid-grant");

    // Authorization errors come back as 400 JSON, not redirects.
    httplib::Params bad;
    for (const auto& [k, v] : auth) {
        bad.emplace(k, k == "response_type" ? "token" : v);
    }
    auto bad_res = client.Get("/authorize", bad, httplib::Headers{});
    REQUIRE(bad_res);
    CHECK(bad_res->status == 400);
    CHECK(nlohmann::json::parse(bad_res->body).contains("error"));
}
