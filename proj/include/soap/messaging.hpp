// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "soap/crypto.hpp"
#include "soap/trace.hpp"

namespace soap::msg {

// Order-invariant fingerprint of the two conversation participants' keys.
struct SafetyNumber {
    crypto::Digest digest;

    crypto::BytesView bytes() const { return digest.view(); }
    std::string hex() const { return digest.hex(); }
    bool operator==(const SafetyNumber&) const = default;
};

// sha256 over the lexicographically sorted canonical serializations of both
// public keys, so compute(a, b) == compute(b, a).
Result<SafetyNumber> compute_safety_number(const crypto::PublicKey& a,
                                           const crypto::PublicKey& b);

struct MessagingIdentity {
    std::string phone;
    crypto::SigningKeyPair keypair;
    bool registered = false;
};

// The OTP transport. Insecure: anyone (in particular the adversary) can read
// every message ever sent on it.
class SmsChannel {
public:
    struct Sms {
        std::string phone;
        std::string body;
    };

    void send(std::string phone, std::string body);
    const std::vector<Sms>& log() const { return log_; }

private:
    std::vector<Sms> log_;
};

// phone -> public key directory with OTP-confirmed (re-)registration.
class KeyServer {
public:
    explicit KeyServer(crypto::RandomSource& rng) : rng_(&rng) {}

    // Sends an OTP to `phone` over SMS and records the pending registration.
    void begin_registration(const std::string& phone,
                            const crypto::PublicKey& key, SmsChannel& sms);
    Result<void> confirm_registration(const std::string& phone,
                                      const std::string& otp);
    std::optional<crypto::PublicKey> lookup(const std::string& phone) const;

    void set_compromised(bool c) { compromised_ = c; }
    bool compromised() const { return compromised_; }
    // Only possible on a compromised server.
    Result<void> substitute_key(const std::string& phone,
                                const crypto::PublicKey& key);

private:
    struct Pending {
        crypto::PublicKey key;
        std::string otp;
    };
    crypto::RandomSource* rng_;
    std::map<std::string, crypto::PublicKey> directory_;
    std::map<std::string, Pending> pending_;
    bool compromised_ = false;
};

// Confidential, sender/receiver-authenticated channel between two keys.
// Delivery is modeled as a queue per direction; every send/receive pair is
// trace-logged with sender attribution.
class Channel {
public:
    static Result<Channel> open(const crypto::PublicKey& a,
                                const crypto::PublicKey& b);

    const SafetyNumber& safety_number() const { return safety_number_; }
    const crypto::PublicKey& endpoint(int i) const { return endpoints_[i]; }
    bool has_endpoint(const crypto::PublicKey& key) const;

    Result<void> send(const crypto::PublicKey& from, std::string payload,
                      const std::string& sender_agent, trace::Trace& trace);
    // Pops the oldest undelivered message addressed to `to`.
    Result<std::string> receive(const crypto::PublicKey& to,
                                trace::Trace& trace);

private:
    Channel() = default;
    const crypto::PublicKey& peer_of(const crypto::PublicKey& key) const;

    std::array<crypto::PublicKey, 2> endpoints_;
    SafetyNumber safety_number_;
    struct Pending {
        std::string from_key_b64;
        std::string payload;
    };
    std::deque<Pending> in_flight_[2];  // indexed by receiving endpoint
};

}  // namespace soap::msg
