// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace soap::trace {

// Recorded protocol facts. `time` is a logical tick; ticks strictly increase
// except that a Sender event shares its tick with exactly one Send* event.
struct TraceEvent {
    std::int64_t time = 0;
    std::string kind;
    nlohmann::json data;

    nlohmann::json to_json() const;
    static TraceEvent from_json(const nlohmann::json& j);

    std::string str(const char* field) const { return data.value(field, ""); }
};

// Event kind names.
namespace kind {
inline constexpr const char* SendMessaging = "SendMessaging";
inline constexpr const char* ReceiveMessaging = "ReceiveMessaging";
inline constexpr const char* SendIdP = "SendIdP";
inline constexpr const char* ReceiveIdP = "ReceiveIdP";
inline constexpr const char* Correspond = "Correspond";
inline constexpr const char* Sender = "Sender";
inline constexpr const char* CompromisedAccount = "CompromisedAccount";
inline constexpr const char* CompromisedIdP = "CompromisedIdP";
inline constexpr const char* CompromisedDomain = "CompromisedDomain";
inline constexpr const char* CompromisedMessaging = "CompromisedMessaging";
inline constexpr const char* IsMessagingApp = "IsMessagingApp";
inline constexpr const char* IsRedirectURL = "IsRedirectURL";
inline constexpr const char* IdpObservation = "IdpObservation";
}  // namespace kind

class Trace {
public:
    // Appends an event at a fresh tick.
    const TraceEvent& emit(std::string kind, nlohmann::json data);
    // Appends a Send* event plus its Sender fact at the same tick.
    void emit_send(std::string kind, nlohmann::json data,
                   const std::string& sender_agent);

    const std::vector<TraceEvent>& events() const { return events_; }
    void clear();

    std::string to_jsonl() const;

private:
    std::vector<TraceEvent> events_;
    std::int64_t next_tick_ = 0;
};

}  // namespace soap::trace
