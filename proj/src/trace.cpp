// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/trace.hpp"

namespace soap::trace {

nlohmann::json TraceEvent::to_json() const {
    return {{"time", time}, {"kind", kind}, {"data", data}};
}

TraceEvent TraceEvent::from_json(const nlohmann::json& j) {
    TraceEvent e;
    e.time = j.value("time", std::int64_t{0});
    e.kind = j.value("kind", "");
    e.data = j.value("data", nlohmann::json::object());
    return e;
}

const TraceEvent& Trace::emit(std::string kind, nlohmann::json data) {
    events_.push_back(TraceEvent{next_tick_++, std::move(kind), std::move(data)});
    return events_.back();
}

void Trace::emit_send(std::string kind, nlohmann::json data,
                      const std::string& sender_agent) {
    const std::int64_t tick = next_tick_++;
    events_.push_back(TraceEvent{tick, std::move(kind), std::move(data)});
    events_.push_back(
        TraceEvent{tick, kind::Sender, {{"agent", sender_agent}}});
}

void Trace::clear() {
    events_.clear();
    next_tick_ = 0;
}

std::string Trace::to_jsonl() const {
    std::string out;
    for (const auto& e : events_) {
        out += e.to_json().dump();
        out += '\n';
    }
    return out;
}

}  // namespace soap::trace
