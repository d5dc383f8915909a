// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/prover.hpp"

#include "soap/base64url.hpp"

namespace soap::prover {

nlohmann::json SoapAttestation::to_json() const {
    return {{"v", protocol_version},
            {"idp", idp_id},
            {"token", token_compact},
            {"salt", b64url::encode(salt.bytes)}};
}

Result<SoapAttestation> SoapAttestation::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("v") || !j.contains("idp") ||
        !j.contains("token") || !j.contains("salt")) {
        return fail(Error::MalformedAttestation, "missing attestation field");
    }
    SoapAttestation att;
    att.protocol_version = j["v"].get<std::string>();
    att.idp_id = j["idp"].get<std::string>();
    att.token_compact = j["token"].get<std::string>();
    auto salt = b64url::decode(j["salt"].get<std::string>());
    if (!salt.ok()) {
        return fail(Error::MalformedAttestation, "salt not base64url");
    }
    att.salt.bytes = std::move(salt).value();
    att.salt.entropy_bits = static_cast<int>(att.salt.bytes.size() * 8);
    return att;
}

std::string SoapAttestation::to_fragment(const std::string& base_url) const {
    return base_url + "#" + b64url::encode(to_json().dump());
}

Result<SoapAttestation> SoapAttestation::from_fragment(const std::string& url) {
    const auto hash = url.find('#');
    if (hash == std::string::npos) {
        return fail(Error::MalformedAttestation, "no fragment");
    }
    auto raw = b64url::decode(url.substr(hash + 1));
    if (!raw.ok()) {
        return fail(Error::MalformedAttestation, "fragment not base64url");
    }
    auto j = nlohmann::json::parse(raw.value().begin(), raw.value().end(),
                                   nullptr, false);
    if (j.is_discarded()) {
        return fail(Error::MalformedAttestation, "fragment not JSON");
    }
    return from_json(j);
}

std::string AuthorizationRequest::url() const {
    idp::AuthRedirect r;  // reuse the query-string renderer
    r.redirect_url = endpoint;
    r.params = params;
    return r.location();
}

Result<AuthorizationRequest> Prover::start_soap(const msg::SafetyNumber& sn,
                                                const std::string& idp_id,
                                                crypto::RandomSource& rng,
                                                std::int64_t now) {
    auto cfg = config_.idps.find(idp_id);
    if (cfg == config_.idps.end()) {
        return fail(Error::UnknownIdp, idp_id);
    }
    SoapRequestState state;
    state.nonce = gen_random(rng, 256).value();
    state.salt = gen_random(rng, 256).value();
    state.code_verifier = gen_random(rng, 256).value();
    auto hashed = crypto::salted_hash(sn.bytes(), state.salt,
                                      config_.hash_profile);
    if (!hashed.ok()) return fail(hashed.error(), hashed.detail());
    state.hashed_sn = std::move(hashed).value();
    state.idp_id = idp_id;
    state.redirect_url = cfg->second.redirect_url;
    state.created_at = now;

    AuthorizationRequest request;
    request.idp_id = idp_id;
    request.endpoint = cfg->second.expected_issuer + "/authorize";
    request.params["client_id"] = cfg->second.client_id;
    request.params["redirect_uri"] = state.redirect_url;
    request.params["scope"] = "openid email";
    request.params["response_type"] = "code";
    request.params["state"] = b64url::encode(state.nonce.bytes);
    request.params["nonce"] =
        token::build_nonce_field(state.nonce, state.hashed_sn);
    // The verifier travels as an ASCII string; the challenge commits to that
    // string's bytes.
    request.params["code_challenge"] =
        crypto::pkce_challenge(
            crypto::as_bytes(b64url::encode(state.code_verifier.bytes)))
            .value();
    request.params["code_challenge_method"] = "S256";

    // Overwrites any prior request for this IdP.
    pending_[idp_id] = std::move(state);
    return request;
}

Result<ExchangeIntent> Prover::handle_redirect(const idp::ParamMap& params,
                                               const std::string& arrival_url) {
    if (pending_.empty()) {
        return fail(Error::NoPendingRequest);
    }
    // Per-IdP redirect URLs are distinct, so the arrival URL identifies the
    // IdP the response claims to come from.
    const SoapRequestState* stored = nullptr;
    for (const auto& [idp_id, state] : pending_) {
        if (state.redirect_url == arrival_url) {
            stored = &state;
            break;
        }
    }
    if (stored == nullptr) {
        return fail(Error::RedirectOriginMismatch, arrival_url);
    }
    auto state_param = params.find("state");
    if (state_param == params.end() ||
        state_param->second != b64url::encode(stored->nonce.bytes)) {
        // Adversary-initiated flow; discard, leaving the stored state intact.
        return fail(Error::StateMismatch);
    }
    auto code = params.find("code");
    if (code == params.end() || code->second.empty()) {
        return fail(Error::StateMismatch, "redirect carries no code");
    }
    ExchangeIntent intent;
    intent.idp_id = stored->idp_id;
    intent.code = code->second;
    intent.token_request["grant_type"] = "authorization_code";
    intent.token_request["code"] = code->second;
    intent.token_request["code_verifier"] =
        b64url::encode(stored->code_verifier.bytes);
    intent.token_request["client_id"] = config_.idps.at(stored->idp_id).client_id;
    intent.token_request["redirect_uri"] = stored->redirect_url;
    return intent;
}

Result<SoapAttestation> Prover::complete(
    const token::DecodedToken& token, const std::string& idp_id,
    std::span<const crypto::PublicKey> issuer_keys, std::int64_t now) {
    auto it = pending_.find(idp_id);
    if (it == pending_.end()) {
        return fail(Error::NoPendingRequest, idp_id);
    }
    const SoapRequestState& state = it->second;
    auto identity = token::validate_token_prover(
        token, state, config_.idps.at(idp_id).client_id, now,
        config_.idps.at(idp_id).expected_issuer, issuer_keys, config_.skew);
    if (!identity.ok()) {
        // A poisoned pending request must not be retried against a second
        // adversarial redirect.
        pending_.erase(it);
        return fail(identity.error(), identity.detail());
    }
    SoapAttestation att;
    att.idp_id = idp_id;
    att.token_compact = token.compact;
    att.salt = state.salt;
    cache_.insert(b64url::encode(state.nonce.bytes),
                  token.claims.expires_at + config_.skew);
    pending_.erase(it);
    return att;
}

const SoapRequestState* Prover::pending(const std::string& idp_id) const {
    auto it = pending_.find(idp_id);
    return it == pending_.end() ? nullptr : &it->second;
}

nlohmann::json Prover::state_to_json() const {
    nlohmann::json pending = nlohmann::json::object();
    for (const auto& [idp_id, state] : pending_) {
        pending[idp_id] = state.to_json();
    }
    return {{"pending", pending}, {"replay_cache", cache_.to_json()}};
}

Result<void> Prover::state_from_json(const nlohmann::json& j) {
    if (!j.is_object()) return fail(Error::ParseError, "state must be an object");
    pending_.clear();
    const nlohmann::json pending = j.value("pending", nlohmann::json::object());
    for (const auto& [idp_id, state_json] : pending.items()) {
        auto state = SoapRequestState::from_json(state_json);
        if (!state.ok()) return fail(state.error(), state.detail());
        pending_[idp_id] = std::move(state).value();
    }
    cache_ = ReplayCache::from_json(
        j.value("replay_cache", nlohmann::json::array()));
    return {};
}

}  // namespace soap::prover
