// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "soap/crypto.hpp"
#include "soap/trace.hpp"

namespace soap::checker {

struct Verdict {
    std::string property;
    // The full formula: send correspondence OR a witnessed compromise
    // disjunct, for every obligation.
    bool holds = true;
    // The correspondence clause alone, ignoring compromise disjuncts.
    bool core_holds = true;
    // Disjunct names that excused core violations (for attribution).
    std::vector<std::string> excused_by;
    // Minimal (single-event-removal) sub-trace violating the core clause.
    std::vector<trace::TraceEvent> witness;

    nlohmann::json to_json() const;
};

// Evaluates the social-authentication trace property: for every
// Correspond(v, sendKey, idp, acc) and every pair of messages received from
// the two pseudonyms, there must be earlier send events with a common
// sender, unless a compromise disjunct is witnessed in the trace.
Verdict check_sender_correspondence(
    const std::vector<trace::TraceEvent>& events);

// holds iff every IdpObservation for `idp` carries only the allowed
// parameter names, and no secret (salt or raw safety number) appears in any
// observed value in raw, base64url, or hex form.
Verdict check_privacy_leakage(const std::vector<trace::TraceEvent>& events,
                              const std::string& idp,
                              const std::vector<crypto::Bytes>& secrets);

// Parameter names an IdP may legitimately observe.
const std::vector<std::string>& allowed_idp_fields();

}  // namespace soap::checker
