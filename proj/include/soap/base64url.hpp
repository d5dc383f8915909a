// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "soap/errors.hpp"

namespace soap::b64url {

// RFC 4648 section 5, unpadded.
std::string encode(std::span<const std::uint8_t> data);
std::string encode(std::string_view data);
Result<std::vector<std::uint8_t>> decode(std::string_view text);

}  // namespace soap::b64url
