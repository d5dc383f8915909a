// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "soap/errors.hpp"

namespace soap::crypto {

using Bytes = std::vector<std::uint8_t>;
using BytesView = std::span<const std::uint8_t>;

inline BytesView as_bytes(std::string_view s) {
    return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

std::string to_hex(BytesView data);

// ---------------------------------------------------------------------------
// Hashing

struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    BytesView view() const { return {bytes.data(), bytes.size()}; }
    std::string hex() const { return to_hex(view()); }
    bool operator==(const Digest&) const = default;
};

Digest sha256(BytesView data);
Digest sha256(std::string_view data);

// base64url(sha256(code_verifier)), the S256 code-challenge transform.
Result<std::string> pkce_challenge(BytesView code_verifier);

// ---------------------------------------------------------------------------
// Randomness

// Every protocol random value flows through a RandomSource so that simulated
// worlds replay deterministically under a fixed seed.
class RandomSource {
public:
    virtual ~RandomSource() = default;
    virtual void fill(std::span<std::uint8_t> out) = 0;

    Bytes bytes(std::size_t n);
    std::uint64_t uniform(std::uint64_t bound);  // [0, bound)
};

class SystemRandomSource final : public RandomSource {
public:
    void fill(std::span<std::uint8_t> out) override;
};

class SeededRandomSource final : public RandomSource {
public:
    explicit SeededRandomSource(std::uint64_t seed) : gen_(seed) {}
    void fill(std::span<std::uint8_t> out) override;

private:
    std::mt19937_64 gen_;
};

struct RandomValue {
    Bytes bytes;
    int entropy_bits = 0;

    std::string b64() const;
    bool operator==(const RandomValue&) const = default;
};

// entropy_bits must be one of 256, 384, 512.
Result<RandomValue> gen_random(RandomSource& rng, int entropy_bits);

// ---------------------------------------------------------------------------
// Salted password hashing of safety numbers

// scrypt with interactive-strength cost parameters.
inline constexpr const char* kProfileScrypt = "scrypt-v1";
// Single SHA-256 pass; only for tests and simulation where speed matters.
inline constexpr const char* kProfileTest = "sha256-test";

struct SaltedHash {
    Bytes bytes;
    std::string profile;

    bool operator==(const SaltedHash&) const = default;
};

Result<SaltedHash> salted_hash(BytesView input, const RandomValue& salt,
                               const std::string& profile);

// ---------------------------------------------------------------------------
// Signing (Ed25519)

inline constexpr const char* kAlgEdDSA = "EdDSA";

struct PublicKey {
    std::string key_id;
    std::string algorithm;
    Bytes raw;  // 32-byte Ed25519 public key

    bool operator==(const PublicKey&) const = default;
};

class SigningKeyPair {
public:
    // Key material is derived from a 32-byte seed drawn from rng, so seeded
    // worlds get reproducible keys.
    static SigningKeyPair generate(RandomSource& rng, std::string key_id);
    static SigningKeyPair from_seed(Bytes seed, std::string key_id);

    const std::string& key_id() const { return public_.key_id; }
    const std::string& algorithm() const { return public_.algorithm; }
    const PublicKey& public_key() const { return public_; }
    BytesView seed() const { return seed_; }

private:
    SigningKeyPair() = default;
    Bytes seed_;
    PublicKey public_;
};

Bytes sign(BytesView payload, const SigningKeyPair& key);
bool verify(BytesView payload, BytesView signature, const PublicKey& key);

// JWKS-style export/import: [{"kid", "alg", "kty", "crv", "x"}].
nlohmann::json jwks_export(std::span<const PublicKey> keys);
Result<std::vector<PublicKey>> jwks_import(const nlohmann::json& doc);

}  // namespace soap::crypto
