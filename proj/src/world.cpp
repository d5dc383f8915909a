// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/world.hpp"

#include <algorithm>

#include "soap/base64url.hpp"

namespace soap::harness {

namespace trk = trace::kind;

WorldConfig WorldConfig::two_idp_default(std::uint64_t seed) {
    WorldConfig cfg;
    cfg.seed = seed;
    cfg.idps = {{"idp1", "https://idp1.example", 3600},
                {"idp2", "https://idp2.example", 3600}};
    cfg.users = {
        {"alice",
         "+41790000001",
         {{"idp1", "alice", "alice-pw", "alice@idp1.example"},
          {"idp2", "alice.b", "alice-pw2", "alice@idp2.example"}}},
        {"bob",
         "+41790000002",
         {{"idp1", "bob", "bob-pw", "bob@idp1.example"},
          {"idp2", "bob.b", "bob-pw2", "bob@idp2.example"}}},
    };
    return cfg;
}

World::World(WorldConfig config)
    : config_(std::move(config)), rng_(config_.seed), key_server_(rng_) {
    // IdPs and the shared app client registration.
    for (const auto& spec : config_.idps) {
        idp::IdpConfig idp_cfg;
        idp_cfg.issuer = spec.issuer;
        idp_cfg.token_lifetime = spec.token_lifetime;
        auto sim = std::make_unique<idp::IdpSimulator>(idp_cfg, rng_, this);
        const std::string redirect_url = config_.app_base + "/cb/" + spec.id;
        auto client_id = sim->register_client({redirect_url});
        prover_config_.idps[spec.id] = prover::ProverIdpConfig{
            client_id.value(), redirect_url, spec.issuer};
        idps_.emplace_back(spec.id, std::move(sim));
    }
    prover_config_.hash_profile = config_.hash_profile;
    prover_config_.skew = config_.skew;

    // Structural facts about the app and its per-IdP redirect URLs.
    trace_.emit(trk::IsMessagingApp, {{"app", config_.app_name}});
    for (const auto& spec : config_.idps) {
        trace_.emit(trk::IsRedirectURL,
                    {{"idp", spec.issuer},
                     {"app", config_.app_name},
                     {"url", config_.app_base + "/cb/" + spec.id}});
    }

    // Users (the adversary is always an agent of the world).
    auto specs = config_.users;
    if (std::none_of(specs.begin(), specs.end(), [](const UserSpec& u) {
            return u.name == kAdversary;
        })) {
        specs.push_back(UserSpec{kAdversary, "+41799999999", {}});
    }
    for (const auto& spec : specs) {
        auto agent = std::make_unique<UserAgent>(
            spec.name, spec.phone,
            crypto::SigningKeyPair::generate(rng_, "msg-" + spec.name),
            prover_config_);
        for (const auto& acc : spec.accounts) {
            agent->accounts[acc.idp_id] = acc;
            if (auto* sim = idp_by_id(acc.idp_id)) {
                sim->add_account(acc.username,
                                 idp::Account{acc.password, acc.email,
                                              "sub-" + acc.username});
                account_agent_[{sim->issuer(), acc.username}] = spec.name;
            }
        }
        user_order_.push_back(spec.name);
        users_[spec.name] = std::move(agent);
    }
}

idp::IdpSimulator* World::idp_by_id(const std::string& idp_id) {
    for (auto& [id, sim] : idps_) {
        if (id == idp_id) return sim.get();
    }
    return nullptr;
}

UserAgent* World::user(const std::string& name) {
    auto it = users_.find(name);
    return it == users_.end() ? nullptr : it->second.get();
}

std::string World::issuer_of(const std::string& idp_id) const {
    for (const auto& [id, sim] : idps_) {
        if (id == idp_id) return sim->issuer();
    }
    return {};
}

verifier::IdpRegistry World::registry() {
    verifier::IdpRegistry reg;
    reg.hash_profile = config_.hash_profile;
    for (auto& [id, sim] : idps_) {
        auto keys = crypto::jwks_import(sim->jwks(now_));
        if (keys.ok()) reg.issuer_keys[sim->issuer()] = std::move(keys).value();
    }
    return reg;
}

Result<void> World::register_user(const std::string& name) {
    UserAgent* agent = user(name);
    if (!agent) return fail(Error::ScenarioError, "unknown user: " + name);
    key_server_.begin_registration(agent->phone, agent->msg_key.public_key(),
                                   sms_);
    // The honest owner reads the OTP off their own phone.
    std::string otp;
    for (auto it = sms_.log().rbegin(); it != sms_.log().rend(); ++it) {
        if (it->phone == agent->phone && it->body.rfind("otp:", 0) == 0) {
            otp = it->body.substr(4);
            break;
        }
    }
    return key_server_.confirm_registration(agent->phone, otp);
}

Result<void> World::twilio_reregister(const std::string& victim) {
    UserAgent* target = user(victim);
    UserAgent* adv = user(kAdversary);
    if (!target || !adv) return fail(Error::ScenarioError, "unknown user");
    key_server_.begin_registration(target->phone, adv->msg_key.public_key(),
                                   sms_);
    // SMS is insecure: the adversary reads the victim's OTP off the wire.
    std::string otp;
    for (auto it = sms_.log().rbegin(); it != sms_.log().rend(); ++it) {
        if (it->phone == target->phone && it->body.rfind("otp:", 0) == 0) {
            otp = it->body.substr(4);
            break;
        }
    }
    return key_server_.confirm_registration(target->phone, otp);
}

Result<msg::Channel*> World::channel_between(const std::string& name,
                                             const std::string& peer) {
    UserAgent* agent = user(name);
    UserAgent* peer_agent = user(peer);
    if (!agent || !peer_agent) {
        return fail(Error::ScenarioError, "unknown user");
    }
    auto peer_key = key_server_.lookup(peer_agent->phone);
    if (!peer_key) {
        return fail(Error::ScenarioError, "peer not registered: " + peer);
    }
    std::string a = b64url::encode(agent->msg_key.public_key().raw);
    std::string b = b64url::encode(peer_key->raw);
    std::string key = a < b ? a + "|" + b : b + "|" + a;
    auto it = channels_.find(key);
    if (it == channels_.end()) {
        auto ch = msg::Channel::open(agent->msg_key.public_key(), *peer_key);
        if (!ch.ok()) return fail(ch.error(), ch.detail());
        it = channels_
                 .emplace(key, std::make_unique<msg::Channel>(
                                   std::move(ch).value()))
                 .first;
    }
    return it->second.get();
}

Result<void> World::start_soap(const std::string& user_name,
                               const std::string& idp_id,
                               const std::string& peer) {
    auto ch = channel_between(user_name, peer);
    if (!ch.ok()) return fail(ch.error(), ch.detail());
    return start_soap_with_sn(user_name, idp_id,
                              ch.value()->safety_number());
}

Result<void> World::start_soap_with_sn(const std::string& user_name,
                                       const std::string& idp_id,
                                       const msg::SafetyNumber& sn) {
    UserAgent* agent = user(user_name);
    if (!agent) return fail(Error::ScenarioError, "unknown user");
    auto request = agent->prover.start_soap(sn, idp_id, rng_, now_);
    if (!request.ok()) return fail(request.error(), request.detail());
    auth_requests_[user_name + "/" + idp_id] = std::move(request).value();
    // Record the secrets that must never reach an IdP.
    const SoapRequestState* state = agent->prover.pending(idp_id);
    secrets_.push_back(state->salt.bytes);
    secrets_.push_back(
        crypto::Bytes(sn.bytes().begin(), sn.bytes().end()));
    return {};
}

const prover::AuthorizationRequest* World::pending_request(
    const std::string& user_name, const std::string& idp_id) const {
    auto it = auth_requests_.find(user_name + "/" + idp_id);
    return it == auth_requests_.end() ? nullptr : &it->second;
}

Result<std::string> World::session_for(const std::string& user_name,
                                       const std::string& idp_id) {
    UserAgent* agent = user(user_name);
    auto session = agent->sessions.find(idp_id);
    if (session != agent->sessions.end()) return session->second;
    auto account = agent->accounts.find(idp_id);
    if (account == agent->accounts.end()) {
        return fail(Error::AuthFailed, "no account at " + idp_id);
    }
    auto cookie = idp_by_id(idp_id)->login(account->second.username,
                                           account->second.password);
    if (!cookie.ok()) return fail(cookie.error(), cookie.detail());
    agent->sessions[idp_id] = cookie.value();
    return cookie;
}

Result<idp::AuthRedirect> World::authorize(const std::string& user_name,
                                           const std::string& idp_id,
                                           idp::Consent consent) {
    const prover::AuthorizationRequest* request =
        pending_request(user_name, idp_id);
    if (!request) return fail(Error::ScenarioError, "no pending request");
    auto cookie = session_for(user_name, idp_id);
    if (!cookie.ok()) return fail(cookie.error(), cookie.detail());
    idp::Credentials creds;
    creds.session_cookie = cookie.value();
    return idp_by_id(idp_id)->handle_authorization_request(request->params,
                                                           creds, consent,
                                                           now_);
}

Result<prover::ExchangeIntent> World::deliver_redirect(
    const std::string& user_name, const idp::ParamMap& params,
    const std::string& arrival_url) {
    UserAgent* agent = user(user_name);
    if (!agent) return fail(Error::ScenarioError, "unknown user");
    if (agent->redirect_leak) {
        // Leaky app domain: the adversary observes the redirect parameters.
        std::string idp_id;
        for (const auto& [id, cfg] : prover_config_.idps) {
            if (cfg.redirect_url == arrival_url) idp_id = id;
        }
        CapturedRedirect cap;
        cap.user = user_name;
        cap.idp_id = idp_id;
        auto code = params.find("code");
        auto state = params.find("state");
        if (code != params.end()) cap.code = code->second;
        if (state != params.end()) cap.state = state->second;
        captured_.push_back(std::move(cap));
    }
    return agent->prover.handle_redirect(params, arrival_url);
}

Result<token::DecodedToken> World::exchange_code(
    const std::string& /*user_name*/, const std::string& idp_id,
    const prover::ExchangeIntent& intent) {
    auto* sim = idp_by_id(idp_id);
    if (!sim) return fail(Error::UnknownIdp, idp_id);
    auto response = sim->handle_token_request(intent.token_request, now_);
    if (!response.ok()) return fail(response.error(), response.detail());
    return token::decode_token(
        response.value()["id_token"].get<std::string>());
}

Result<prover::SoapAttestation> World::complete(
    const std::string& user_name, const std::string& idp_id,
    const token::DecodedToken& token) {
    UserAgent* agent = user(user_name);
    if (!agent) return fail(Error::ScenarioError, "unknown user");
    auto reg = registry();
    auto keys = reg.issuer_keys.find(issuer_of(idp_id));
    std::span<const crypto::PublicKey> key_span;
    if (keys != reg.issuer_keys.end()) key_span = keys->second;
    return agent->prover.complete(token, idp_id, key_span, now_);
}

Result<prover::SoapAttestation> World::run_soap(const std::string& user_name,
                                                const std::string& idp_id,
                                                const std::string& peer) {
    if (auto r = start_soap(user_name, idp_id, peer); !r.ok()) {
        return fail(r.error(), r.detail());
    }
    auto redirect = authorize(user_name, idp_id, idp::Consent::Grant);
    if (!redirect.ok()) return fail(redirect.error(), redirect.detail());
    auto intent = deliver_redirect(user_name, redirect.value().params,
                                   redirect.value().redirect_url);
    if (!intent.ok()) return fail(intent.error(), intent.detail());
    auto token = exchange_code(user_name, idp_id, intent.value());
    if (!token.ok()) return fail(token.error(), token.detail());
    return complete(user_name, idp_id, token.value());
}

std::map<std::string, Result<prover::SoapAttestation>> World::run_all(
    const std::string& user_name, const std::string& peer,
    const std::vector<std::string>& idp_ids) {
    std::map<std::string, Result<prover::SoapAttestation>> out;
    for (const auto& idp_id : idp_ids) {
        out.emplace(idp_id, run_soap(user_name, idp_id, peer));
    }
    return out;
}

Result<void> World::forward_attestation(const std::string& from,
                                        const std::string& to,
                                        const prover::SoapAttestation& att) {
    auto ch = channel_between(from, to);
    if (!ch.ok()) return fail(ch.error(), ch.detail());
    return ch.value()->send(user(from)->msg_key.public_key(),
                            att.to_json().dump(), from, trace_);
}

Result<verifier::AuthenticatedIdentity> World::verify_from_channel(
    const std::string& user_name, const std::string& peer,
    verifier::CheckReport* report) {
    UserAgent* agent = user(user_name);
    auto ch = channel_between(user_name, peer);
    if (!ch.ok()) return fail(ch.error(), ch.detail());
    auto payload = ch.value()->receive(agent->msg_key.public_key(), trace_);
    if (!payload.ok()) return fail(payload.error(), payload.detail());
    auto json = nlohmann::json::parse(payload.value(), nullptr, false);
    if (json.is_discarded()) {
        return fail(Error::MalformedAttestation, "payload not JSON");
    }
    auto att = prover::SoapAttestation::from_json(json);
    if (!att.ok()) return fail(att.error(), att.detail());

    auto reg = registry();
    auto identity = verifier::verify_attestation(
        att.value(), ch.value()->safety_number(), agent->prover.cache(), reg,
        now_, config_.skew, report);
    if (!identity.ok()) return identity;

    // Token consumption and pseudonym association, as trace facts.
    const std::string m = token_message_id(att.value().token_compact);
    trace_.emit(trk::ReceiveIdP, {{"idp", identity.value().issuer},
                                  {"acc", identity.value().subject},
                                  {"m", m}});
    const crypto::PublicKey& peer_key =
        ch.value()->endpoint(0).raw == agent->msg_key.public_key().raw
            ? ch.value()->endpoint(1)
            : ch.value()->endpoint(0);
    trace_.emit(trk::Correspond,
                {{"v", user_name},
                 {"sendKey", b64url::encode(peer_key.raw)},
                 {"idp", identity.value().issuer},
                 {"acc", identity.value().subject}});
    return identity;
}

Result<void> World::enable_compromise(const std::string& directive,
                                      const std::string& subject) {
    if (directive == "idp-keys") {
        auto* sim = idp_by_id(subject);
        if (!sim) return fail(Error::ScenarioError, "unknown idp: " + subject);
        sim->set_keys_compromised(true);
        trace_.emit(trk::CompromisedIdP, {{"idp", sim->issuer()}});
        return {};
    }
    if (directive == "idp-domain") {
        auto* sim = idp_by_id(subject);
        if (!sim) return fail(Error::ScenarioError, "unknown idp: " + subject);
        sim->set_domain_compromised(true);
        trace_.emit(trk::CompromisedDomain, {{"name", sim->issuer()}});
        return {};
    }
    if (directive == "account") {
        // subject: "<user>/<idp_id>"
        const auto slash = subject.find('/');
        if (slash == std::string::npos) {
            return fail(Error::ScenarioError, "account subject: user/idp");
        }
        UserAgent* agent = user(subject.substr(0, slash));
        auto* sim = idp_by_id(subject.substr(slash + 1));
        if (!agent || !sim) return fail(Error::ScenarioError, "unknown subject");
        auto acc = agent->accounts.find(subject.substr(slash + 1));
        if (acc == agent->accounts.end()) {
            return fail(Error::ScenarioError, "user has no such account");
        }
        trace_.emit(trk::CompromisedAccount,
                    {{"agent", agent->name},
                     {"idp", sim->issuer()},
                     {"acc", "sub-" + acc->second.username}});
        return {};
    }
    if (directive == "key-server") {
        key_server_.set_compromised(true);
        return {};
    }
    if (directive == "messaging-key") {
        UserAgent* agent = user(subject);
        if (!agent) return fail(Error::ScenarioError, "unknown user");
        compromised_keys_.push_back(subject);
        trace_.emit(trk::CompromisedMessaging,
                    {{"agent", subject},
                     {"key", b64url::encode(agent->msg_key.public_key().raw)}});
        return {};
    }
    if (directive == "redirect-leak") {
        UserAgent* agent = user(subject);
        if (!agent) return fail(Error::ScenarioError, "unknown user");
        agent->redirect_leak = true;
        for (const auto& [id, cfg] : prover_config_.idps) {
            trace_.emit(trk::CompromisedDomain, {{"name", cfg.redirect_url}});
        }
        return {};
    }
    return fail(Error::ScenarioError, "unknown directive: " + directive);
}

Result<void> World::adversary_trigger_get(
    const std::string& user_name, const std::string& idp_id,
    const idp::ParamMap& params, Result<prover::ExchangeIntent>* app_outcome) {
    auto cookie = session_for(user_name, idp_id);
    if (!cookie.ok()) return fail(cookie.error(), cookie.detail());
    idp::Credentials creds;
    creds.session_cookie = cookie.value();
    // Liberal threat model: the user consents to whatever the IdP asks.
    auto redirect = idp_by_id(idp_id)->handle_authorization_request(
        params, creds, idp::Consent::Grant, now_);
    if (!redirect.ok()) return fail(redirect.error(), redirect.detail());
    auto outcome = deliver_redirect(user_name, redirect.value().params,
                                    redirect.value().redirect_url);
    if (app_outcome) *app_outcome = std::move(outcome);
    return {};
}

Result<void> World::adversary_inject(const std::string& key_owner,
                                     const std::string& peer,
                                     const std::string& payload) {
    if (!adversary_holds_key(key_owner)) {
        return fail(Error::ChannelViolation,
                    "adversary does not hold this messaging key");
    }
    auto ch = channel_between(key_owner, peer);
    if (!ch.ok()) return fail(ch.error(), ch.detail());
    return ch.value()->send(user(key_owner)->msg_key.public_key(), payload,
                            kAdversary, trace_);
}

bool World::adversary_holds_key(const std::string& user_name) const {
    return std::find(compromised_keys_.begin(), compromised_keys_.end(),
                     user_name) != compromised_keys_.end();
}

checker::Verdict World::sender_correspondence() {
    return checker::check_sender_correspondence(trace_.events());
}

checker::Verdict World::privacy_leakage(const std::string& idp_id) {
    return checker::check_privacy_leakage(trace_.events(), issuer_of(idp_id),
                                          secrets_);
}

void World::on_observation(const std::string& issuer,
                           const std::string& endpoint,
                           const idp::ParamMap& params) {
    nlohmann::json p = nlohmann::json::object();
    for (const auto& [k, v] : params) p[k] = v;
    trace_.emit(trk::IdpObservation,
                {{"idp", issuer}, {"endpoint", endpoint}, {"params", p}});
}

void World::on_token_issued(const std::string& issuer,
                            const std::string& subject,
                            const std::string& token_compact,
                            const std::string& username) {
    auto agent = account_agent_.find({issuer, username});
    trace_.emit_send(trk::SendIdP,
                     {{"idp", issuer},
                      {"acc", subject},
                      {"m", token_message_id(token_compact)}},
                     agent == account_agent_.end() ? kAdversary
                                                   : agent->second);
}

std::string World::token_message_id(const std::string& token_compact) const {
    return crypto::sha256(token_compact).hex();
}

}  // namespace soap::harness
