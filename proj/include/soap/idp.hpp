// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "soap/crypto.hpp"
#include "soap/token.hpp"

namespace soap::idp {

using ParamMap = std::map<std::string, std::string>;

struct IdpConfig {
    std::string issuer;
    std::int64_t token_lifetime = 3600;  // [120, 7200]
    std::int64_t code_lifetime = 600;

    Result<void> validate() const;
};

struct Account {
    std::string password;
    std::string email;
    std::string subject;
};

struct AuthCodeRecord {
    std::string code;
    std::string client_id;
    std::string redirect_url;
    std::string code_challenge;
    std::string nonce;
    std::string subject;
    std::string email;
    std::int64_t issued_at = 0;
    bool redeemed = false;
};

struct AuthRedirect {
    std::string redirect_url;
    ParamMap params;  // code, state

    std::string location() const;
};

// Session or direct credentials presented at the authorization endpoint.
struct Credentials {
    std::optional<std::string> username;
    std::optional<std::string> password;
    std::optional<std::string> session_cookie;
};

enum class Consent { Grant, Deny };

// Hooks for the harness: the IdP reports exactly the parameter maps it
// receives (the privacy checker measures this interface) and the identity
// behind every token it issues.
class IdpEvents {
public:
    virtual ~IdpEvents() = default;
    virtual void on_observation(const std::string& /*issuer*/,
                                const std::string& /*endpoint*/,
                                const ParamMap& /*params*/) {}
    virtual void on_token_issued(const std::string& /*issuer*/,
                                 const std::string& /*subject*/,
                                 const std::string& /*token_compact*/,
                                 const std::string& /*username*/) {}
    virtual void on_replay_attempt(const std::string& /*issuer*/,
                                   const std::string& /*code*/) {}
};

// In-process mock OpenID Connect provider: authorization code flow with
// PKCE, single-use codes, discovery, JWKS with rotation.
class IdpSimulator {
public:
    IdpSimulator(IdpConfig config, crypto::RandomSource& rng,
                 IdpEvents* events = nullptr);

    const std::string& issuer() const { return config_.issuer; }
    const IdpConfig& config() const { return config_; }

    Result<std::string> register_client(
        const std::vector<std::string>& redirect_urls);
    void add_account(const std::string& username, Account account);

    Result<std::string> login(const std::string& username,
                              const std::string& password);  // -> cookie

    Result<AuthRedirect> handle_authorization_request(const ParamMap& params,
                                                      const Credentials& creds,
                                                      Consent consent,
                                                      std::int64_t now);
    // Returns the token response JSON: {"id_token": <compact JWS>}.
    Result<nlohmann::json> handle_token_request(const ParamMap& form,
                                                std::int64_t now);

    nlohmann::json discovery_document() const;
    nlohmann::json jwks(std::int64_t now) const;
    void rotate_keys(std::int64_t now);

    void set_keys_compromised(bool c) { keys_compromised_ = c; }
    void set_domain_compromised(bool c) { domain_compromised_ = c; }
    bool domain_compromised() const { return domain_compromised_; }
    // Capability gate: signing key access only with compromised keys.
    const crypto::SigningKeyPair* compromised_signing_key() const;

private:
    struct KeyEntry {
        crypto::SigningKeyPair key;
        std::optional<std::int64_t> retired_at;
    };
    const crypto::SigningKeyPair& current_key() const {
        return keys_.back().key;
    }
    Result<std::string> authenticate(const Credentials& creds) const;

    IdpConfig config_;
    crypto::RandomSource* rng_;
    IdpEvents* events_;
    std::vector<KeyEntry> keys_;
    int key_counter_ = 0;
    std::map<std::string, std::set<std::string>> clients_;  // id -> whitelist
    int client_counter_ = 0;
    std::map<std::string, Account> accounts_;
    std::map<std::string, std::string> sessions_;  // cookie -> username
    std::map<std::string, AuthCodeRecord> codes_;
    std::map<std::string, std::string> code_user_;  // code -> username
    std::set<std::pair<std::string, std::string>> consent_memory_;
    bool keys_compromised_ = false;
    bool domain_compromised_ = false;
};

}  // namespace soap::idp
