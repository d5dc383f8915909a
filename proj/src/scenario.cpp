// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <optional>

#include "soap/base64url.hpp"
#include "soap/token.hpp"

namespace soap::scenario {

namespace {

using harness::World;
using harness::WorldConfig;

std::string arg(const nlohmann::json& step, const char* name) {
    return step.value(name, "");
}

// The adversary's own authorization request, built from values it chose.
struct CraftedRequest {
    std::string idp_id;
    idp::ParamMap params;
    crypto::RandomValue nonce;
    crypto::RandomValue salt;
    std::string code_verifier_b64;
};

WorldConfig config_from_doc(const nlohmann::json& doc, std::uint64_t seed) {
    WorldConfig cfg = WorldConfig::two_idp_default(seed);
    if (doc.contains("idps")) {
        cfg.idps.clear();
        for (const auto& i : doc["idps"]) {
            cfg.idps.push_back({i.value("id", ""), i.value("issuer", ""),
                                i.value("token_lifetime", std::int64_t{3600})});
        }
    }
    for (const auto& u : doc.value("users", nlohmann::json::array())) {
        harness::UserSpec spec;
        spec.name = u.value("name", "");
        spec.phone = u.value("phone", "");
        for (const auto& a : u.value("accounts", nlohmann::json::array())) {
            spec.accounts.push_back({a.value("idp", ""), a.value("username", ""),
                                     a.value("password", ""),
                                     a.value("email", "")});
        }
        cfg.users.push_back(std::move(spec));
    }
    return cfg;
}

// Re-assembles a compact JWS with a mutated payload or signature. The result
// is intentionally inconsistent; which check catches it is what scenarios
// assert.
Result<token::DecodedToken> tamper_token(const token::DecodedToken& tok,
                                         const nlohmann::json& tamper) {
    std::string compact = tok.compact;
    if (tamper.contains("audience")) {
        nlohmann::json payload = tok.payload;
        payload["aud"] = tamper["audience"].get<std::string>();
        const auto dot1 = compact.find('.');
        const auto dot2 = compact.find('.', dot1 + 1);
        compact = compact.substr(0, dot1 + 1) +
                  b64url::encode(payload.dump()) + compact.substr(dot2);
    }
    if (tamper.value("flip_signature", false)) {
        const auto dot2 = compact.rfind('.');
        char& c = compact[dot2 + 1];
        c = (c == 'A') ? 'B' : 'A';
    }
    return token::decode_token(compact);
}

class Engine {
public:
    explicit Engine(const nlohmann::json& doc) : doc_(doc) {
        reset_world(doc_.value("seed", std::uint64_t{1}));
    }

    ScenarioOutcome run() {
        ScenarioOutcome out;
        out.step_results = nlohmann::json::array();
        out.verdicts = nlohmann::json::array();
        const auto script = doc_.value("script", nlohmann::json::array());
        for (std::size_t i = 0; i < script.size(); ++i) {
            const nlohmann::json& step = script[i];
            const std::string op = step.value("op", "");
            nlohmann::json record = {{"step", i}, {"op", op}};
            const std::string result = execute(op, step, record, out);
            record["result"] = result;
            out.step_results.push_back(record);
            if (step.contains("expect")) {
                check_expect(step, i, op, result, out);
            }
        }
        out.trace_jsonl = world_->trace().to_jsonl();
        out.passed = out.failures.empty();
        return out;
    }

private:
    void reset_world(std::uint64_t seed) {
        world_ = std::make_unique<World>(config_from_doc(doc_, seed));
        redirects_.clear();
        intents_.clear();
        tokens_.clear();
        atts_.clear();
        crafted_.reset();
    }

    static std::string code_of(const Result<void>& r) {
        return r.ok() ? "ok" : std::string(r.error_name());
    }
    template <typename T>
    static std::string code_of(const Result<T>& r) {
        return r.ok() ? "ok" : std::string(r.error_name());
    }

    void check_expect(const nlohmann::json& step, std::size_t i,
                      const std::string& op, const std::string& result,
                      ScenarioOutcome& out) {
        if (!step["expect"].is_string()) return;  // objects handled by `check`
        const std::string want = step["expect"].get<std::string>();
        if (result != want) {
            out.failures.push_back("step " + std::to_string(i) + " (" + op +
                                   "): expected " + want + ", got " + result);
        }
    }

    std::string execute(const std::string& op, const nlohmann::json& step,
                        nlohmann::json& record, ScenarioOutcome& out) {
        if (op == "advance_time") {
            world_->advance_time(step.value("seconds", std::int64_t{0}));
            return "ok";
        }
        if (op == "register") {
            return code_of(world_->register_user(arg(step, "user")));
        }
        if (op == "register_all") {
            for (const auto& u : world_->config().users) {
                auto r = world_->register_user(u.name);
                if (!r.ok()) return std::string(r.error_name());
            }
            return "ok";
        }
        if (op == "twilio_reregister") {
            return code_of(world_->twilio_reregister(arg(step, "victim")));
        }
        if (op == "open_channel") {
            return code_of(
                world_->channel_between(arg(step, "user"), arg(step, "peer")));
        }
        if (op == "start_soap") {
            return code_of(world_->start_soap(
                arg(step, "user"), arg(step, "idp"), arg(step, "peer")));
        }
        if (op == "authorize") {
            const auto consent = step.value("consent", "grant") == "grant"
                                     ? idp::Consent::Grant
                                     : idp::Consent::Deny;
            auto r = world_->authorize(arg(step, "user"), arg(step, "idp"),
                                       consent);
            if (r.ok()) {
                redirects_[slot(step)] = r.value();
            }
            return code_of(r);
        }
        if (op == "deliver_redirect") {
            auto it = redirects_.find(slot(step));
            if (it == redirects_.end()) return "scenario-error";
            idp::ParamMap params = it->second.params;
            std::string arrival = it->second.redirect_url;
            if (step.contains("state_override")) {
                params["state"] = step["state_override"].get<std::string>();
            }
            if (step.value("drop_state", false)) params.erase("state");
            if (step.contains("arrival_idp")) {
                const auto& idps = world_->prover_config().idps;
                auto cfg = idps.find(step["arrival_idp"].get<std::string>());
                if (cfg == idps.end()) return "scenario-error";
                arrival = cfg->second.redirect_url;
            }
            auto r = world_->deliver_redirect(arg(step, "user"), params,
                                              arrival);
            if (r.ok()) intents_[slot(step)] = r.value();
            return code_of(r);
        }
        if (op == "exchange_code") {
            auto it = intents_.find(slot(step));
            if (it == intents_.end()) return "scenario-error";
            auto r = world_->exchange_code(arg(step, "user"), arg(step, "idp"),
                                           it->second);
            if (r.ok()) tokens_[slot(step)] = r.value();
            return code_of(r);
        }
        if (op == "complete") {
            const std::string from = step.value("token_from", slot(step));
            auto it = tokens_.find(from);
            if (it == tokens_.end()) return "scenario-error";
            token::DecodedToken tok = it->second;
            if (step.contains("tamper")) {
                auto t = tamper_token(tok, step["tamper"]);
                if (!t.ok()) return std::string(t.error_name());
                tok = std::move(t).value();
            }
            auto r = world_->complete(arg(step, "user"), arg(step, "idp"), tok);
            if (r.ok()) atts_[slot(step)] = r.value();
            return code_of(r);
        }
        if (op == "run_soap") {
            auto r = world_->run_soap(arg(step, "user"), arg(step, "idp"),
                                      arg(step, "peer"));
            if (r.ok()) atts_[slot(step)] = r.value();
            return code_of(r);
        }
        if (op == "forward") {
            const std::string from =
                step.value("att_from",
                           arg(step, "from") + "/" + arg(step, "idp"));
            auto it = atts_.find(from);
            if (it == atts_.end()) return "scenario-error";
            return code_of(world_->forward_attestation(
                arg(step, "from"), arg(step, "to"), it->second));
        }
        if (op == "verify") {
            verifier::CheckReport report;
            auto r = world_->verify_from_channel(arg(step, "user"),
                                                 arg(step, "peer"), &report);
            record["report"] = report.to_json();
            if (r.ok()) {
                record["identity"] = {{"issuer", r.value().issuer},
                                      {"subject", r.value().subject},
                                      {"email", r.value().email}};
            }
            return code_of(r);
        }
        if (op == "enable_compromise") {
            return code_of(world_->enable_compromise(arg(step, "directive"),
                                                     arg(step, "subject")));
        }
        if (op == "rotate_keys") {
            auto* sim = world_->idp_by_id(arg(step, "idp"));
            if (!sim) return "scenario-error";
            sim->rotate_keys(world_->now());
            return "ok";
        }
        if (op == "world_reset") {
            reset_world(step.value("seed", doc_.value("seed",
                                                      std::uint64_t{1})));
            return "ok";
        }
        if (op == "craft_auth_link") {
            return craft_auth_link(step);
        }
        if (op == "trigger_get") {
            if (!crafted_) return "scenario-error";
            Result<prover::ExchangeIntent> app_outcome =
                fail(Error::ScenarioError, "redirect never delivered");
            auto r = world_->adversary_trigger_get(
                arg(step, "user"), crafted_->idp_id, crafted_->params,
                &app_outcome);
            if (!r.ok()) return std::string(r.error_name());
            // The interesting outcome is what the victim's app did with the
            // adversary-initiated redirect.
            return code_of(app_outcome);
        }
        if (op == "adversary_exchange") {
            return adversary_exchange(step);
        }
        if (op == "adversary_attest") {
            if (!crafted_) return "scenario-error";
            auto it = tokens_.find(std::string(harness::kAdversary) + "/" +
                                   arg(step, "idp"));
            if (it == tokens_.end()) return "scenario-error";
            prover::SoapAttestation att;
            att.idp_id = arg(step, "idp");
            att.token_compact = it->second.compact;
            att.salt = crafted_->salt;
            atts_[std::string(harness::kAdversary) + "/" + arg(step, "idp")] =
                std::move(att);
            return "ok";
        }
        if (op == "inject") {
            auto it = atts_.find(step.value("att_from", ""));
            if (it == atts_.end()) return "scenario-error";
            return code_of(world_->adversary_inject(
                arg(step, "key_owner"), arg(step, "peer"),
                it->second.to_json().dump()));
        }
        if (op == "compare_safety_numbers") {
            auto a = world_->channel_between(arg(step, "user_a"),
                                             arg(step, "peer_a"));
            auto b = world_->channel_between(arg(step, "user_b"),
                                             arg(step, "peer_b"));
            if (!a.ok() || !b.ok()) return "scenario-error";
            const bool equal =
                a.value()->safety_number() == b.value()->safety_number();
            return equal ? "equal" : "different";
        }
        if (op == "check") {
            return check_property(step, record, out);
        }
        return "scenario-error";
    }

    std::string craft_auth_link(const nlohmann::json& step) {
        const std::string idp_id = arg(step, "idp");
        auto ch = world_->channel_between(arg(step, "victim"),
                                          arg(step, "verifier"));
        if (!ch.ok()) return std::string(ch.error_name());
        const auto& idps = world_->prover_config().idps;
        auto cfg = idps.find(idp_id);
        if (cfg == idps.end()) return "scenario-error";

        CraftedRequest c;
        c.idp_id = idp_id;
        c.nonce = crypto::gen_random(world_->rng(), 256).value();
        c.salt = crypto::gen_random(world_->rng(), 256).value();
        c.code_verifier_b64 =
            b64url::encode(crypto::gen_random(world_->rng(), 256).value().bytes);
        // Safety numbers derive from public keys, so the adversary can bind
        // any channel it can observe.
        auto hashed = crypto::salted_hash(ch.value()->safety_number().bytes(),
                                          c.salt,
                                          world_->config().hash_profile);
        if (!hashed.ok()) return std::string(hashed.error_name());
        c.params["client_id"] = cfg->second.client_id;
        c.params["redirect_uri"] = cfg->second.redirect_url;
        c.params["scope"] = "openid email";
        c.params["response_type"] = "code";
        c.params["state"] = b64url::encode(c.nonce.bytes);
        c.params["nonce"] = token::build_nonce_field(c.nonce, hashed.value());
        c.params["code_challenge"] =
            crypto::pkce_challenge(crypto::as_bytes(c.code_verifier_b64))
                .value();
        c.params["code_challenge_method"] = "S256";
        crafted_ = std::move(c);
        return "ok";
    }

    std::string adversary_exchange(const nlohmann::json& step) {
        if (!crafted_) return "scenario-error";
        const std::string idp_id = arg(step, "idp");
        const harness::CapturedRedirect* cap = nullptr;
        for (const auto& c : world_->captured_redirects()) {
            if (c.idp_id == idp_id) cap = &c;  // keep the most recent
        }
        if (!cap) return "scenario-error";
        auto* sim = world_->idp_by_id(idp_id);
        const auto& cfg = world_->prover_config().idps.at(idp_id);
        idp::ParamMap form;
        form["grant_type"] = "authorization_code";
        form["code"] = cap->code;
        form["code_verifier"] = crafted_->code_verifier_b64;
        form["client_id"] = cfg.client_id;
        form["redirect_uri"] = cfg.redirect_url;
        auto resp = sim->handle_token_request(form, world_->now());
        if (!resp.ok()) return std::string(resp.error_name());
        auto tok = token::decode_token(
            resp.value()["id_token"].get<std::string>());
        if (!tok.ok()) return std::string(tok.error_name());
        tokens_[std::string(harness::kAdversary) + "/" + idp_id] =
            std::move(tok).value();
        return "ok";
    }

    std::string check_property(const nlohmann::json& step,
                               nlohmann::json& record, ScenarioOutcome& out) {
        const std::string property = step.value("property", "");
        checker::Verdict verdict;
        if (property == "sender-correspondence") {
            verdict = world_->sender_correspondence();
        } else if (property == "privacy") {
            verdict = world_->privacy_leakage(arg(step, "idp"));
        } else {
            return "scenario-error";
        }
        record["verdict"] = verdict.to_json();
        out.verdicts.push_back(verdict.to_json());
        if (step.contains("expect") && step["expect"].is_object()) {
            const auto& e = step["expect"];
            auto expect_bool = [&](const char* field, bool actual) {
                if (e.contains(field) && e[field].get<bool>() != actual) {
                    out.failures.push_back("check " + property + ": " + field +
                                           " expected " +
                                           e[field].dump() + ", got " +
                                           (actual ? "true" : "false"));
                }
            };
            expect_bool("holds", verdict.holds);
            expect_bool("core_holds", verdict.core_holds);
            for (const auto& d :
                 e.value("excused_contains", nlohmann::json::array())) {
                const std::string name = d.get<std::string>();
                if (std::find(verdict.excused_by.begin(),
                              verdict.excused_by.end(),
                              name) == verdict.excused_by.end()) {
                    out.failures.push_back("check " + property +
                                           ": missing excusing disjunct " +
                                           name);
                }
            }
        }
        return "ok";
    }

    std::string slot(const nlohmann::json& step) const {
        return arg(step, "user") + "/" + arg(step, "idp");
    }

    const nlohmann::json& doc_;
    std::unique_ptr<World> world_;
    std::map<std::string, idp::AuthRedirect> redirects_;
    std::map<std::string, prover::ExchangeIntent> intents_;
    std::map<std::string, token::DecodedToken> tokens_;
    std::map<std::string, prover::SoapAttestation> atts_;
    std::optional<CraftedRequest> crafted_;
};

}  // namespace

nlohmann::json ScenarioOutcome::to_json() const {
    return {{"schema", "soap-scenario-outcome/1"},
            {"passed", passed},
            {"failures", failures},
            {"steps", step_results},
            {"verdicts", verdicts}};
}

Result<ScenarioOutcome> run_scenario(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("script")) {
        return fail(Error::ParseError, "scenario must be an object with a script");
    }
    Engine engine(doc);
    return engine.run();
}

Result<ScenarioOutcome> run_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) return fail(Error::ParseError, "cannot open " + path);
    auto doc = nlohmann::json::parse(in, nullptr, false);
    if (doc.is_discarded()) {
        return fail(Error::ParseError, "invalid JSON: " + path);
    }
    return run_scenario(doc);
}

}  // namespace soap::scenario
