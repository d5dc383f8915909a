// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/request_state.hpp"

#include <nlohmann/json.hpp>

#include "soap/base64url.hpp"

namespace soap {

namespace {

nlohmann::json random_value_to_json(const crypto::RandomValue& v) {
    return {{"b", b64url::encode(v.bytes)}, {"bits", v.entropy_bits}};
}

Result<crypto::RandomValue> random_value_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("b") || !j.contains("bits")) {
        return fail(Error::ParseError, "bad random value");
    }
    auto raw = b64url::decode(j["b"].get<std::string>());
    if (!raw.ok()) return fail(Error::ParseError, "bad random value bytes");
    return crypto::RandomValue{std::move(raw).value(), j["bits"].get<int>()};
}

}  // namespace

nlohmann::json SoapRequestState::to_json() const {
    return {{"nonce", random_value_to_json(nonce)},
            {"salt", random_value_to_json(salt)},
            {"code_verifier", random_value_to_json(code_verifier)},
            {"hashed_sn",
             {{"b", b64url::encode(hashed_sn.bytes)}, {"profile", hashed_sn.profile}}},
            {"idp_id", idp_id},
            {"redirect_url", redirect_url},
            {"created_at", created_at}};
}

Result<SoapRequestState> SoapRequestState::from_json(const nlohmann::json& j) {
    SoapRequestState s;
    for (const char* field :
         {"nonce", "salt", "code_verifier", "hashed_sn", "idp_id",
          "redirect_url", "created_at"}) {
        if (!j.contains(field)) {
            return fail(Error::ParseError, std::string("missing field: ") + field);
        }
    }
    auto nonce = random_value_from_json(j["nonce"]);
    auto salt = random_value_from_json(j["salt"]);
    auto cv = random_value_from_json(j["code_verifier"]);
    if (!nonce.ok() || !salt.ok() || !cv.ok()) {
        return fail(Error::ParseError, "bad random value in request state");
    }
    s.nonce = std::move(nonce).value();
    s.salt = std::move(salt).value();
    s.code_verifier = std::move(cv).value();
    auto hash_raw = b64url::decode(j["hashed_sn"]["b"].get<std::string>());
    if (!hash_raw.ok()) return fail(Error::ParseError, "bad hashed_sn");
    s.hashed_sn.bytes = std::move(hash_raw).value();
    s.hashed_sn.profile = j["hashed_sn"]["profile"].get<std::string>();
    s.idp_id = j["idp_id"].get<std::string>();
    s.redirect_url = j["redirect_url"].get<std::string>();
    s.created_at = j["created_at"].get<std::int64_t>();
    return s;
}

void ReplayCache::insert(const std::string& nonce_b64, std::int64_t expires_at) {
    entries_[nonce_b64] = expires_at;
}

bool ReplayCache::contains(const std::string& nonce_b64) const {
    return entries_.count(nonce_b64) > 0;
}

void ReplayCache::prune(std::int64_t now) {
    std::erase_if(entries_,
                  [now](const auto& e) { return e.second < now; });
}

nlohmann::json ReplayCache::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [nonce, exp] : entries_) {
        arr.push_back({{"nonce", nonce}, {"expires_at", exp}});
    }
    return arr;
}

ReplayCache ReplayCache::from_json(const nlohmann::json& j) {
    ReplayCache cache;
    if (!j.is_array()) return cache;
    for (const auto& e : j) {
        cache.insert(e.value("nonce", ""), e.value("expires_at", std::int64_t{0}));
    }
    return cache;
}

}  // namespace soap
