// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent brute-force evaluation of the sender-correspondence property,
// plus a random trace generator over a small domain. Used to cross-validate
// the production checker; deliberately written as direct nested-loop
// quantifier evaluation over send-event pairs.

#pragma once

#include <random>
#include <string>
#include <vector>

#include "soap/trace.hpp"

namespace testoracle {

using soap::trace::TraceEvent;
namespace trk = soap::trace::kind;

struct OracleResult {
    bool holds = true;       // full formula, disjuncts included
    bool core_holds = true;  // correspondence clause only
};

inline std::string oracle_sender_at(const std::vector<TraceEvent>& ev,
                                    std::int64_t tick) {
    for (const auto& e : ev) {
        if (e.kind == trk::Sender && e.time == tick) return e.str("agent");
    }
    return {};
}

inline bool oracle_disjunct(const std::vector<TraceEvent>& ev,
                            const TraceEvent& c) {
    for (const auto& e : ev) {
        if (e.kind == trk::CompromisedAccount && e.str("idp") == c.str("idp") &&
            e.str("acc") == c.str("acc")) {
            return true;
        }
        if (e.kind == trk::CompromisedIdP && e.str("idp") == c.str("idp")) {
            return true;
        }
        if (e.kind == trk::CompromisedDomain &&
            e.str("name") == c.str("idp")) {
            return true;
        }
        if (e.kind == trk::CompromisedMessaging &&
            e.str("key") == c.str("sendKey")) {
            return true;
        }
    }
    for (const auto& app : ev) {
        if (app.kind != trk::IsMessagingApp) continue;
        for (const auto& ru : ev) {
            if (ru.kind != trk::IsRedirectURL ||
                ru.str("idp") != c.str("idp") ||
                ru.str("app") != app.str("app")) {
                continue;
            }
            for (const auto& cd : ev) {
                if (cd.kind == trk::CompromisedDomain &&
                    cd.str("name") == ru.str("url")) {
                    return true;
                }
            }
        }
    }
    return false;
}

// Enumerates every pair (SendMessaging, SendIdP) and accepts iff some pair
// has matching payload bindings, both precede their receives, and both carry
// the same Sender agent.
inline OracleResult oracle_check(const std::vector<TraceEvent>& ev) {
    OracleResult result;
    for (const auto& c : ev) {
        if (c.kind != trk::Correspond) continue;
        for (const auto& rm : ev) {
            if (rm.kind != trk::ReceiveMessaging ||
                rm.str("sendKey") != c.str("sendKey")) {
                continue;
            }
            for (const auto& ri : ev) {
                if (ri.kind != trk::ReceiveIdP ||
                    ri.str("idp") != c.str("idp") ||
                    ri.str("acc") != c.str("acc")) {
                    continue;
                }
                bool satisfied = false;
                for (const auto& sm : ev) {
                    if (satisfied) break;
                    if (sm.kind != trk::SendMessaging ||
                        sm.time >= rm.time ||
                        sm.str("sendKey") != rm.str("sendKey") ||
                        sm.str("rcvKey") != rm.str("rcvKey") ||
                        sm.str("m") != rm.str("m")) {
                        continue;
                    }
                    for (const auto& si : ev) {
                        if (si.kind != trk::SendIdP || si.time >= ri.time ||
                            si.str("idp") != ri.str("idp") ||
                            si.str("acc") != ri.str("acc") ||
                            si.str("m") != ri.str("m")) {
                            continue;
                        }
                        const std::string a1 = oracle_sender_at(ev, sm.time);
                        const std::string a2 = oracle_sender_at(ev, si.time);
                        if (!a1.empty() && a1 == a2) {
                            satisfied = true;
                            break;
                        }
                    }
                }
                if (!satisfied) {
                    result.core_holds = false;
                    if (!oracle_disjunct(ev, c)) result.holds = false;
                }
            }
        }
    }
    return result;
}

// Random traces over tiny domains so that collisions (and therefore
// satisfied as well as violated obligations) are frequent.
class TraceGenerator {
public:
    explicit TraceGenerator(std::uint64_t seed) : gen_(seed) {}

    std::vector<TraceEvent> next(int max_events) {
        std::vector<TraceEvent> out;
        const int n = 1 + static_cast<int>(gen_() % max_events);
        std::int64_t tick = 0;
        for (int i = 0; i < n && static_cast<int>(out.size()) < max_events;
             ++i) {
            emit(out, tick);
        }
        return out;
    }

private:
    std::string pick(std::initializer_list<const char*> opts) {
        auto it = opts.begin();
        std::advance(it, gen_() % opts.size());
        return *it;
    }

    void emit(std::vector<TraceEvent>& out, std::int64_t& tick) {
        const std::string key = pick({"k1", "k2"});
        const std::string rkey = pick({"k1", "k2"});
        const std::string idp = pick({"i1", "i2"});
        const std::string acc = pick({"a1", "a2"});
        const std::string m = pick({"m1", "m2"});
        const std::string agent = pick({"p1", "p2"});
        switch (gen_() % 10) {
            case 0:
            case 1: {
                out.push_back({tick, trk::SendMessaging,
                               {{"sendKey", key}, {"rcvKey", rkey}, {"m", m}}});
                out.push_back({tick, trk::Sender, {{"agent", agent}}});
                ++tick;
                break;
            }
            case 2:
            case 3: {
                out.push_back({tick++, trk::ReceiveMessaging,
                               {{"sendKey", key}, {"rcvKey", rkey}, {"m", m}}});
                break;
            }
            case 4: {
                out.push_back({tick, trk::SendIdP,
                               {{"idp", idp}, {"acc", acc}, {"m", m}}});
                out.push_back({tick, trk::Sender, {{"agent", agent}}});
                ++tick;
                break;
            }
            case 5: {
                out.push_back({tick++, trk::ReceiveIdP,
                               {{"idp", idp}, {"acc", acc}, {"m", m}}});
                break;
            }
            case 6:
            case 7: {
                out.push_back({tick++, trk::Correspond,
                               {{"v", agent},
                                {"sendKey", key},
                                {"idp", idp},
                                {"acc", acc}}});
                break;
            }
            case 8: {
                const int which = static_cast<int>(gen_() % 4);
                if (which == 0) {
                    out.push_back({tick++, trk::CompromisedAccount,
                                   {{"agent", agent},
                                    {"idp", idp},
                                    {"acc", acc}}});
                } else if (which == 1) {
                    out.push_back({tick++, trk::CompromisedIdP,
                                   {{"idp", idp}}});
                } else if (which == 2) {
                    out.push_back({tick++, trk::CompromisedDomain,
                                   {{"name", pick({"i1", "i2", "u1"})}}});
                } else {
                    out.push_back({tick++, trk::CompromisedMessaging,
                                   {{"agent", agent}, {"key", key}}});
                }
                break;
            }
            default: {
                out.push_back({tick++, trk::IsMessagingApp, {{"app", "app"}}});
                out.push_back({tick++, trk::IsRedirectURL,
                               {{"idp", idp}, {"app", "app"}, {"url", "u1"}}});
                break;
            }
        }
    }

    std::mt19937_64 gen_;
};

}  // namespace testoracle
