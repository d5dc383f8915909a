// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/idp.hpp"

#include <cassert>
#include <cctype>

#include "soap/base64url.hpp"

namespace soap::idp {

namespace {

std::string url_param_encode(const std::string& v) {
    static constexpr char kHex[] = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : v) {
        const bool plain = std::isalnum(c) || c == '-' || c == '_' ||
                           c == '.' || c == '~';
        if (plain) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += kHex[c >> 4];
            out += kHex[c & 0xf];
        }
    }
    return out;
}

bool looks_like_url(const std::string& s) {
    return s.rfind("https://", 0) == 0 || s.rfind("http://", 0) == 0 ||
           s.find("://") != std::string::npos;
}

std::string get(const ParamMap& m, const std::string& k) {
    auto it = m.find(k);
    return it == m.end() ? std::string() : it->second;
}

}  // namespace

Result<void> IdpConfig::validate() const {
    if (issuer.empty()) {
        return fail(Error::InvalidInput, "issuer must not be empty");
    }
    if (token_lifetime < token::kMinTokenLifetime ||
        token_lifetime > token::kMaxTokenLifetime) {
        return fail(Error::LifetimeOutOfRange,
                    "token lifetime must be within [120, 7200] seconds");
    }
    return {};
}

std::string AuthRedirect::location() const {
    std::string out = redirect_url;
    char sep = out.find('?') == std::string::npos ? '?' : '&';
    for (const auto& [k, v] : params) {
        out += sep;
        out += k;
        out += '=';
        out += url_param_encode(v);
        sep = '&';
    }
    return out;
}

IdpSimulator::IdpSimulator(IdpConfig config, crypto::RandomSource& rng,
                           IdpEvents* events)
    : config_(std::move(config)), rng_(&rng), events_(events) {
    assert(config_.validate().ok());
    keys_.push_back(KeyEntry{
        crypto::SigningKeyPair::generate(*rng_, "key-0"), std::nullopt});
    key_counter_ = 1;
}

Result<std::string> IdpSimulator::register_client(
    const std::vector<std::string>& redirect_urls) {
    if (redirect_urls.empty()) {
        return fail(Error::InvalidRegistration, "empty redirect URL list");
    }
    std::set<std::string> whitelist;
    for (const auto& url : redirect_urls) {
        if (!looks_like_url(url) || !whitelist.insert(url).second) {
            return fail(Error::InvalidRegistration,
                        "redirect URLs must be valid and pairwise distinct");
        }
    }
    std::string client_id =
        "client-" + std::to_string(client_counter_++) + "-" +
        b64url::encode(rng_->bytes(6));
    clients_[client_id] = std::move(whitelist);
    return client_id;
}

void IdpSimulator::add_account(const std::string& username, Account account) {
    accounts_[username] = std::move(account);
}

Result<std::string> IdpSimulator::login(const std::string& username,
                                        const std::string& password) {
    auto it = accounts_.find(username);
    if (it == accounts_.end() || it->second.password != password) {
        return fail(Error::AuthFailed, "bad credentials");
    }
    std::string cookie = "sess-" + b64url::encode(rng_->bytes(16));
    sessions_[cookie] = username;
    return cookie;
}

Result<std::string> IdpSimulator::authenticate(const Credentials& creds) const {
    if (creds.session_cookie) {
        auto it = sessions_.find(*creds.session_cookie);
        if (it != sessions_.end()) return it->second;
        return fail(Error::AuthFailed, "unknown session");
    }
    if (creds.username && creds.password) {
        auto it = accounts_.find(*creds.username);
        if (it != accounts_.end() && it->second.password == *creds.password) {
            return *creds.username;
        }
    }
    return fail(Error::AuthFailed, "bad credentials");
}

Result<AuthRedirect> IdpSimulator::handle_authorization_request(
    const ParamMap& params, const Credentials& creds, Consent consent,
    std::int64_t now) {
    if (events_) events_->on_observation(config_.issuer, "authorization", params);

    if (get(params, "response_type") != "code") {
        return fail(Error::UnsupportedResponseType,
                    get(params, "response_type"));
    }
    const std::string client_id = get(params, "client_id");
    auto client = clients_.find(client_id);
    if (client == clients_.end()) {
        return fail(Error::UnknownClient, client_id);
    }
    const std::string redirect_url = get(params, "redirect_uri");
    if (client->second.count(redirect_url) == 0) {
        // No redirect is issued for a non-whitelisted URL.
        return fail(Error::RedirectMismatch, redirect_url);
    }
    auto user = authenticate(creds);
    if (!user.ok()) return fail(user.error(), user.detail());
    const std::string& username = user.value();

    const auto consent_key = std::make_pair(username, client_id);
    if (consent_memory_.count(consent_key) == 0) {
        if (consent == Consent::Deny) {
            return fail(Error::AccessDenied, "consent denied");
        }
        consent_memory_.insert(consent_key);
    }
    // Previously granted consent is auto-granted without asking.

    const Account& account = accounts_.at(username);
    AuthCodeRecord record;
    record.code = b64url::encode(rng_->bytes(24));
    record.client_id = client_id;
    record.redirect_url = redirect_url;
    record.code_challenge = get(params, "code_challenge");
    record.nonce = get(params, "nonce");
    record.subject = account.subject;
    record.email = account.email;
    record.issued_at = now;
    codes_[record.code] = record;
    code_user_[record.code] = username;

    AuthRedirect redirect;
    redirect.redirect_url = redirect_url;
    redirect.params["code"] = record.code;
    // state is opaque to the IdP and echoed verbatim.
    redirect.params["state"] = get(params, "state");
    return redirect;
}

Result<nlohmann::json> IdpSimulator::handle_token_request(const ParamMap& form,
                                                          std::int64_t now) {
    if (events_) events_->on_observation(config_.issuer, "token", form);

    if (get(form, "grant_type") != "authorization_code") {
        return fail(Error::InvalidGrant, "unsupported grant type");
    }
    const std::string code = get(form, "code");
    auto it = codes_.find(code);
    if (it == codes_.end()) {
        return fail(Error::InvalidGrant, "unknown code");
    }
    AuthCodeRecord& record = it->second;
    if (record.redeemed) {
        if (events_) events_->on_replay_attempt(config_.issuer, code);
        return fail(Error::InvalidGrant, "code already redeemed");
    }
    if (record.issued_at + config_.code_lifetime < now) {
        return fail(Error::InvalidGrant, "code expired");
    }
    if (get(form, "client_id") != record.client_id ||
        get(form, "redirect_uri") != record.redirect_url) {
        return fail(Error::InvalidClient, "client or redirect mismatch");
    }
    auto challenge = crypto::pkce_challenge(
        crypto::as_bytes(get(form, "code_verifier")));
    if (!challenge.ok() || challenge.value() != record.code_challenge) {
        return fail(Error::InvalidPkce, "code verifier does not open challenge");
    }
    record.redeemed = true;

    token::IdTokenClaims claims;
    claims.issuer = config_.issuer;
    claims.audience = record.client_id;
    claims.subject = record.subject;
    claims.email = record.email;
    claims.nonce = record.nonce;
    claims.issued_at = now;
    claims.expires_at = now + config_.token_lifetime;
    const std::string compact = token::encode_token(claims, current_key());
    if (events_) {
        events_->on_token_issued(config_.issuer, record.subject, compact,
                                 code_user_.at(code));
    }
    return nlohmann::json{{"id_token", compact}};
}

nlohmann::json IdpSimulator::discovery_document() const {
    return {{"issuer", config_.issuer},
            {"authorization_endpoint", config_.issuer + "/authorize"},
            {"token_endpoint", config_.issuer + "/token"},
            {"jwks_uri", config_.issuer + "/jwks.json"}};
}

nlohmann::json IdpSimulator::jwks(std::int64_t now) const {
    std::vector<crypto::PublicKey> keys;
    for (const auto& entry : keys_) {
        // Retired keys stay published until every token they signed expired.
        if (entry.retired_at &&
            *entry.retired_at + config_.token_lifetime + token::kDefaultSkew <
                now) {
            continue;
        }
        keys.push_back(entry.key.public_key());
    }
    return crypto::jwks_export(keys);
}

void IdpSimulator::rotate_keys(std::int64_t now) {
    keys_.back().retired_at = now;
    keys_.push_back(KeyEntry{
        crypto::SigningKeyPair::generate(
            *rng_, "key-" + std::to_string(key_counter_++)),
        std::nullopt});
}

const crypto::SigningKeyPair* IdpSimulator::compromised_signing_key() const {
    return keys_compromised_ ? &keys_.back().key : nullptr;
}

}  // namespace soap::idp
