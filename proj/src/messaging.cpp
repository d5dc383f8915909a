// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/messaging.hpp"

#include <algorithm>

#include "soap/base64url.hpp"

namespace soap::msg {

Result<SafetyNumber> compute_safety_number(const crypto::PublicKey& a,
                                           const crypto::PublicKey& b) {
    if (a.raw == b.raw) {
        return fail(Error::InvalidPair, "safety number needs two distinct keys");
    }
    // Canonical serialization: algorithm || raw key bytes.
    auto canonical = [](const crypto::PublicKey& k) {
        crypto::Bytes out(k.algorithm.begin(), k.algorithm.end());
        out.push_back(0);
        out.insert(out.end(), k.raw.begin(), k.raw.end());
        return out;
    };
    crypto::Bytes ca = canonical(a);
    crypto::Bytes cb = canonical(b);
    if (cb < ca) std::swap(ca, cb);
    crypto::Bytes joined(ca);
    joined.push_back(0);
    joined.insert(joined.end(), cb.begin(), cb.end());
    return SafetyNumber{crypto::sha256(joined)};
}

void SmsChannel::send(std::string phone, std::string body) {
    log_.push_back(Sms{std::move(phone), std::move(body)});
}

void KeyServer::begin_registration(const std::string& phone,
                                   const crypto::PublicKey& key,
                                   SmsChannel& sms) {
    std::string otp;
    for (int i = 0; i < 6; ++i) {
        otp += static_cast<char>('0' + rng_->uniform(10));
    }
    pending_[phone] = Pending{key, otp};
    sms.send(phone, "otp:" + otp);
}

Result<void> KeyServer::confirm_registration(const std::string& phone,
                                             const std::string& otp) {
    auto it = pending_.find(phone);
    if (it == pending_.end() || it->second.otp != otp) {
        return fail(Error::RegistrationFailed, "wrong or missing OTP");
    }
    directory_[phone] = it->second.key;
    pending_.erase(it);
    return {};
}

std::optional<crypto::PublicKey> KeyServer::lookup(
    const std::string& phone) const {
    auto it = directory_.find(phone);
    if (it == directory_.end()) return std::nullopt;
    return it->second;
}

Result<void> KeyServer::substitute_key(const std::string& phone,
                                       const crypto::PublicKey& key) {
    if (!compromised_) {
        return fail(Error::ChannelViolation,
                    "key substitution requires a compromised key server");
    }
    directory_[phone] = key;
    return {};
}

Result<Channel> Channel::open(const crypto::PublicKey& a,
                              const crypto::PublicKey& b) {
    auto sn = compute_safety_number(a, b);
    if (!sn.ok()) return fail(sn.error(), sn.detail());
    Channel ch;
    ch.endpoints_ = {a, b};
    ch.safety_number_ = sn.value();
    return ch;
}

bool Channel::has_endpoint(const crypto::PublicKey& key) const {
    return endpoints_[0].raw == key.raw || endpoints_[1].raw == key.raw;
}

const crypto::PublicKey& Channel::peer_of(const crypto::PublicKey& key) const {
    return endpoints_[0].raw == key.raw ? endpoints_[1] : endpoints_[0];
}

Result<void> Channel::send(const crypto::PublicKey& from, std::string payload,
                           const std::string& sender_agent,
                           trace::Trace& trace) {
    if (!has_endpoint(from)) {
        return fail(Error::ChannelViolation, "sender key not a channel endpoint");
    }
    const crypto::PublicKey& to = peer_of(from);
    const int rcv_index = endpoints_[0].raw == to.raw ? 0 : 1;
    trace.emit_send(trace::kind::SendMessaging,
                    {{"sendKey", b64url::encode(from.raw)},
                     {"rcvKey", b64url::encode(to.raw)},
                     {"m", payload}},
                    sender_agent);
    in_flight_[rcv_index].push_back(
        Pending{b64url::encode(from.raw), std::move(payload)});
    return {};
}

Result<std::string> Channel::receive(const crypto::PublicKey& to,
                                     trace::Trace& trace) {
    if (!has_endpoint(to)) {
        return fail(Error::ChannelViolation, "receiver key not a channel endpoint");
    }
    const int rcv_index = endpoints_[0].raw == to.raw ? 0 : 1;
    auto& queue = in_flight_[rcv_index];
    if (queue.empty()) {
        return fail(Error::ChannelViolation, "no message in flight");
    }
    Pending msg = std::move(queue.front());
    queue.pop_front();
    trace.emit(trace::kind::ReceiveMessaging,
               {{"sendKey", msg.from_key_b64},
                {"rcvKey", b64url::encode(to.raw)},
                {"m", msg.payload}});
    return msg.payload;
}

}  // namespace soap::msg
