// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "soap/checker.hpp"
#include "soap/crypto.hpp"
#include "soap/idp.hpp"
#include "soap/messaging.hpp"
#include "soap/prover.hpp"
#include "soap/trace.hpp"
#include "soap/verifier.hpp"

namespace soap::harness {

inline constexpr const char* kAdversary = "adversary";

struct WorldIdpSpec {
    std::string id;       // short id, e.g. "idp1"
    std::string issuer;   // e.g. "https://idp1.example"
    std::int64_t token_lifetime = 3600;
};

struct IdpAccountSpec {
    std::string idp_id;
    std::string username;
    std::string password;
    std::string email;
};

struct UserSpec {
    std::string name;
    std::string phone;
    std::vector<IdpAccountSpec> accounts;
};

struct WorldConfig {
    std::uint64_t seed = 1;
    std::vector<WorldIdpSpec> idps;
    std::vector<UserSpec> users;
    std::string app_name = "soapmsg";
    std::string app_base = "https://app.example";
    std::string hash_profile = crypto::kProfileTest;
    std::int64_t skew = token::kDefaultSkew;

    static WorldConfig two_idp_default(std::uint64_t seed);
};

struct UserAgent {
    std::string name;
    std::string phone;
    crypto::SigningKeyPair msg_key;
    prover::Prover prover;
    std::map<std::string, IdpAccountSpec> accounts;  // keyed by idp_id
    std::map<std::string, std::string> sessions;     // idp_id -> cookie
    bool redirect_leak = false;

    UserAgent(std::string n, std::string p, crypto::SigningKeyPair k,
              prover::ProverConfig cfg)
        : name(std::move(n)), phone(std::move(p)), msg_key(std::move(k)),
          prover(std::move(cfg)) {}
};

// A redirect captured by the adversary through a leaking app domain.
struct CapturedRedirect {
    std::string user;
    std::string idp_id;
    std::string code;
    std::string state;
};

// One simulated ecosystem: users, IdPs, key server, channels, adversary
// capabilities, and the shared trace. Deterministic under the seed; all
// operations are serialized on the single logical clock.
class World : public idp::IdpEvents {
public:
    explicit World(WorldConfig config);
    World(const World&) = delete;

    // --- infrastructure access
    trace::Trace& trace() { return trace_; }
    crypto::RandomSource& rng() { return rng_; }
    std::int64_t now() const { return now_; }
    void advance_time(std::int64_t seconds) { now_ += seconds; }
    msg::SmsChannel& sms() { return sms_; }
    msg::KeyServer& key_server() { return key_server_; }
    idp::IdpSimulator* idp_by_id(const std::string& idp_id);
    UserAgent* user(const std::string& name);
    const WorldConfig& config() const { return config_; }
    const prover::ProverConfig& prover_config() const { return prover_config_; }
    std::string issuer_of(const std::string& idp_id) const;
    verifier::IdpRegistry registry();

    // --- messaging world
    Result<void> register_user(const std::string& name);
    // Adversary re-registers a victim's phone using the OTP read off SMS.
    Result<void> twilio_reregister(const std::string& victim);
    // Channel between `name`'s own key and the directory key for `peer`.
    Result<msg::Channel*> channel_between(const std::string& name,
                                          const std::string& peer);

    // --- SOAP flows
    Result<void> start_soap(const std::string& user, const std::string& idp_id,
                            const std::string& peer);
    Result<void> start_soap_with_sn(const std::string& user,
                                    const std::string& idp_id,
                                    const msg::SafetyNumber& sn);
    const prover::AuthorizationRequest* pending_request(
        const std::string& user, const std::string& idp_id) const;
    // The user performs its own pending authorization request.
    Result<idp::AuthRedirect> authorize(const std::string& user,
                                        const std::string& idp_id,
                                        idp::Consent consent);
    // Delivers redirect params at the user's app (leaks them first when the
    // app domain is compromised), then runs the prover's redirect checks.
    Result<prover::ExchangeIntent> deliver_redirect(
        const std::string& user, const idp::ParamMap& params,
        const std::string& arrival_url);
    Result<token::DecodedToken> exchange_code(const std::string& user,
                                              const std::string& idp_id,
                                              const prover::ExchangeIntent& intent);
    Result<prover::SoapAttestation> complete(const std::string& user,
                                             const std::string& idp_id,
                                             const token::DecodedToken& token);
    // Composite honest run against one IdP.
    Result<prover::SoapAttestation> run_soap(const std::string& user,
                                             const std::string& idp_id,
                                             const std::string& peer);
    // Independent runs for several IdPs; per-IdP results, no early abort.
    std::map<std::string, Result<prover::SoapAttestation>> run_all(
        const std::string& user, const std::string& peer,
        const std::vector<std::string>& idp_ids);

    Result<void> forward_attestation(const std::string& from,
                                     const std::string& to,
                                     const prover::SoapAttestation& att);
    // Receives the next message on the channel with `peer`, parses it as an
    // attestation and verifies it; emits ReceiveIdP/Correspond on success.
    Result<verifier::AuthenticatedIdentity> verify_from_channel(
        const std::string& user, const std::string& peer,
        verifier::CheckReport* report = nullptr);

    // --- adversary
    Result<void> enable_compromise(const std::string& directive,
                                   const std::string& subject);
    // The user's browser performs an adversary-supplied authorization
    // request with the user's own session; the user consents (liberal
    // threat model). The resulting redirect is delivered to the user's app.
    Result<void> adversary_trigger_get(const std::string& user,
                                       const std::string& idp_id,
                                       const idp::ParamMap& params,
                                       Result<prover::ExchangeIntent>* app_outcome);
    const std::vector<CapturedRedirect>& captured_redirects() const {
        return captured_;
    }
    // Injects a payload into a channel using a compromised endpoint key.
    Result<void> adversary_inject(const std::string& key_owner,
                                  const std::string& peer,
                                  const std::string& payload);
    bool adversary_holds_key(const std::string& user) const;

    // --- properties
    checker::Verdict sender_correspondence();
    checker::Verdict privacy_leakage(const std::string& idp_id);
    const std::vector<crypto::Bytes>& secrets() const { return secrets_; }

    // idp::IdpEvents
    void on_observation(const std::string& issuer, const std::string& endpoint,
                        const idp::ParamMap& params) override;
    void on_token_issued(const std::string& issuer, const std::string& subject,
                         const std::string& token_compact,
                         const std::string& username) override;

private:
    Result<std::string> session_for(const std::string& user,
                                    const std::string& idp_id);
    std::string token_message_id(const std::string& token_compact) const;

    WorldConfig config_;
    crypto::SeededRandomSource rng_;
    trace::Trace trace_;
    std::int64_t now_ = 1'750'000'000;
    msg::SmsChannel sms_;
    msg::KeyServer key_server_;
    std::vector<std::pair<std::string, std::unique_ptr<idp::IdpSimulator>>> idps_;
    prover::ProverConfig prover_config_;
    std::map<std::string, std::unique_ptr<UserAgent>> users_;
    std::vector<std::string> user_order_;
    std::map<std::string, std::unique_ptr<msg::Channel>> channels_;
    std::map<std::string, prover::AuthorizationRequest> auth_requests_;
    std::map<std::pair<std::string, std::string>, std::string> account_agent_;
    std::vector<CapturedRedirect> captured_;
    std::vector<std::string> compromised_keys_;  // user names
    std::vector<crypto::Bytes> secrets_;
};

}  // namespace soap::harness
