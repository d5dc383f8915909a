// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/checker.hpp"

#include <algorithm>
#include <set>

#include "soap/base64url.hpp"

namespace soap::checker {

namespace trk = trace::kind;
using trace::TraceEvent;

nlohmann::json Verdict::to_json() const {
    nlohmann::json w = nlohmann::json::array();
    for (const auto& e : witness) w.push_back(e.to_json());
    return {{"property", property},
            {"holds", holds},
            {"core_holds", core_holds},
            {"excused_by", excused_by},
            {"witness", w}};
}

namespace {

// Sender fact co-occurring (same tick) with the given event, if any.
std::string sender_at(const std::vector<TraceEvent>& events,
                      std::int64_t tick) {
    for (const auto& e : events) {
        if (e.kind == trk::Sender && e.time == tick) return e.str("agent");
    }
    return {};
}

struct Obligation {
    const TraceEvent* correspond;
    const TraceEvent* rcv_messaging;
    const TraceEvent* rcv_idp;
};

// Senders of matching SendMessaging events strictly before `before`.
std::set<std::string> messaging_senders(const std::vector<TraceEvent>& events,
                                        const TraceEvent& rcv) {
    std::set<std::string> out;
    for (const auto& e : events) {
        if (e.kind == trk::SendMessaging && e.time < rcv.time &&
            e.str("sendKey") == rcv.str("sendKey") &&
            e.str("rcvKey") == rcv.str("rcvKey") && e.str("m") == rcv.str("m")) {
            auto s = sender_at(events, e.time);
            if (!s.empty()) out.insert(s);
        }
    }
    return out;
}

std::set<std::string> idp_senders(const std::vector<TraceEvent>& events,
                                  const TraceEvent& rcv) {
    std::set<std::string> out;
    for (const auto& e : events) {
        if (e.kind == trk::SendIdP && e.time < rcv.time &&
            e.str("idp") == rcv.str("idp") && e.str("acc") == rcv.str("acc") &&
            e.str("m") == rcv.str("m")) {
            auto s = sender_at(events, e.time);
            if (!s.empty()) out.insert(s);
        }
    }
    return out;
}

std::vector<Obligation> obligations(const std::vector<TraceEvent>& events) {
    std::vector<Obligation> out;
    for (const auto& c : events) {
        if (c.kind != trk::Correspond) continue;
        for (const auto& rm : events) {
            if (rm.kind != trk::ReceiveMessaging ||
                rm.str("sendKey") != c.str("sendKey")) {
                continue;
            }
            for (const auto& ri : events) {
                if (ri.kind != trk::ReceiveIdP || ri.str("idp") != c.str("idp") ||
                    ri.str("acc") != c.str("acc")) {
                    continue;
                }
                out.push_back(Obligation{&c, &rm, &ri});
            }
        }
    }
    return out;
}

bool obligation_core_holds(const std::vector<TraceEvent>& events,
                           const Obligation& ob) {
    const auto s1 = messaging_senders(events, *ob.rcv_messaging);
    const auto s2 = idp_senders(events, *ob.rcv_idp);
    return std::any_of(s1.begin(), s1.end(),
                       [&](const std::string& s) { return s2.count(s) > 0; });
}

bool core_holds(const std::vector<TraceEvent>& events) {
    const auto obs = obligations(events);
    return std::all_of(obs.begin(), obs.end(), [&](const Obligation& ob) {
        return obligation_core_holds(events, ob);
    });
}

// Compromise disjuncts of the trace property, scoped to one obligation.
std::vector<std::string> witnessed_disjuncts(
    const std::vector<TraceEvent>& events, const Obligation& ob) {
    std::vector<std::string> out;
    const std::string idp = ob.correspond->str("idp");
    const std::string acc = ob.correspond->str("acc");
    const std::string send_key = ob.correspond->str("sendKey");
    for (const auto& e : events) {
        if (e.kind == trk::CompromisedAccount && e.str("idp") == idp &&
            e.str("acc") == acc) {
            out.push_back("compromised-account");
        } else if (e.kind == trk::CompromisedIdP && e.str("idp") == idp) {
            out.push_back("compromised-idp");
        } else if (e.kind == trk::CompromisedDomain && e.str("name") == idp) {
            out.push_back("compromised-domain");
        } else if (e.kind == trk::CompromisedMessaging &&
                   e.str("key") == send_key) {
            out.push_back("compromised-messaging");
        }
    }
    // App clause: IsMessagingApp(app) & IsRedirectURL(idp, app, url) &
    // CompromisedDomain(url).
    for (const auto& app : events) {
        if (app.kind != trk::IsMessagingApp) continue;
        for (const auto& ru : events) {
            if (ru.kind != trk::IsRedirectURL || ru.str("idp") != idp ||
                ru.str("app") != app.str("app")) {
                continue;
            }
            for (const auto& cd : events) {
                if (cd.kind == trk::CompromisedDomain &&
                    cd.str("name") == ru.str("url")) {
                    out.push_back("compromised-redirect-url");
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Greedy single-event removal, keeping the core violation alive.
std::vector<TraceEvent> minimize_witness(std::vector<TraceEvent> events) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t i = 0; i < events.size(); ++i) {
            std::vector<TraceEvent> candidate = events;
            candidate.erase(candidate.begin() + static_cast<long>(i));
            if (!core_holds(candidate)) {
                events = std::move(candidate);
                changed = true;
                break;
            }
        }
    }
    return events;
}

}  // namespace

Verdict check_sender_correspondence(const std::vector<TraceEvent>& events) {
    Verdict verdict;
    verdict.property = "sender-correspondence";
    for (const auto& ob : obligations(events)) {
        if (obligation_core_holds(events, ob)) continue;
        verdict.core_holds = false;
        const auto disjuncts = witnessed_disjuncts(events, ob);
        if (disjuncts.empty()) {
            verdict.holds = false;
        } else {
            for (const auto& d : disjuncts) {
                if (std::find(verdict.excused_by.begin(),
                              verdict.excused_by.end(),
                              d) == verdict.excused_by.end()) {
                    verdict.excused_by.push_back(d);
                }
            }
        }
    }
    if (!verdict.core_holds) {
        verdict.witness = minimize_witness(events);
    }
    return verdict;
}

const std::vector<std::string>& allowed_idp_fields() {
    static const std::vector<std::string> kFields = {
        "client_id",     "redirect_uri",  "scope",
        "response_type", "state",         "nonce",
        "code_challenge", "code_challenge_method",
        "grant_type",    "code_verifier", "code"};
    return kFields;
}

namespace {

bool contains_bytes(const std::string& haystack, const std::string& needle) {
    return !needle.empty() && haystack.find(needle) != std::string::npos;
}

}  // namespace

Verdict check_privacy_leakage(const std::vector<TraceEvent>& events,
                              const std::string& idp,
                              const std::vector<crypto::Bytes>& secrets) {
    Verdict verdict;
    verdict.property = "privacy-leakage";
    const auto& allowed = allowed_idp_fields();
    for (const auto& e : events) {
        if (e.kind != trk::IdpObservation || e.str("idp") != idp) continue;
        bool bad = false;
        const nlohmann::json params =
            e.data.value("params", nlohmann::json::object());
        for (const auto& [field, value] : params.items()) {
            if (std::find(allowed.begin(), allowed.end(), field) ==
                allowed.end()) {
                bad = true;
            }
            const std::string observed = value.get<std::string>();
            for (const auto& secret : secrets) {
                const std::string raw(secret.begin(), secret.end());
                if (contains_bytes(observed, raw) ||
                    contains_bytes(observed, b64url::encode(secret)) ||
                    contains_bytes(observed, crypto::to_hex(secret))) {
                    bad = true;
                }
            }
        }
        if (bad) {
            verdict.holds = false;
            verdict.core_holds = false;
            verdict.witness.push_back(e);
        }
    }
    return verdict;
}

}  // namespace soap::checker
