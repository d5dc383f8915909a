// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/crypto.hpp"

#include <cstring>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>
#include <openssl/kdf.h>
#include <openssl/rand.h>

#include "soap/base64url.hpp"

namespace soap::crypto {

namespace {

struct PkeyDeleter {
    void operator()(EVP_PKEY* p) const { EVP_PKEY_free(p); }
};
using PkeyPtr = std::unique_ptr<EVP_PKEY, PkeyDeleter>;

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* p) const { EVP_MD_CTX_free(p); }
};
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, MdCtxDeleter>;

PkeyPtr ed25519_private(BytesView seed) {
    PkeyPtr key(EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                             seed.data(), seed.size()));
    if (!key) throw std::runtime_error("ed25519 private key construction failed");
    return key;
}

PkeyPtr ed25519_public(BytesView raw) {
    PkeyPtr key(EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                            raw.data(), raw.size()));
    return key;
}

}  // namespace

std::string to_hex(BytesView data) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out += kDigits[b >> 4];
        out += kDigits[b & 0xf];
    }
    return out;
}

Digest sha256(BytesView data) {
    Digest d;
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), d.bytes.data(), &len, EVP_sha256(),
               nullptr);
    return d;
}

Digest sha256(std::string_view data) { return sha256(as_bytes(data)); }

Result<std::string> pkce_challenge(BytesView code_verifier) {
    if (code_verifier.empty()) {
        return fail(Error::InvalidInput, "empty code verifier");
    }
    return b64url::encode(sha256(code_verifier).view());
}

Bytes RandomSource::bytes(std::size_t n) {
    Bytes out(n);
    fill(out);
    return out;
}

std::uint64_t RandomSource::uniform(std::uint64_t bound) {
    std::array<std::uint8_t, 8> buf{};
    fill(buf);
    std::uint64_t v = 0;
    std::memcpy(&v, buf.data(), buf.size());
    return bound == 0 ? 0 : v % bound;
}

void SystemRandomSource::fill(std::span<std::uint8_t> out) {
    if (RAND_bytes(out.data(), static_cast<int>(out.size())) != 1) {
        throw std::runtime_error("RAND_bytes failed");
    }
}

void SeededRandomSource::fill(std::span<std::uint8_t> out) {
    std::size_t i = 0;
    while (i < out.size()) {
        std::uint64_t v = gen_();
        for (int k = 0; k < 8 && i < out.size(); ++k, ++i) {
            out[i] = static_cast<std::uint8_t>(v & 0xff);
            v >>= 8;
        }
    }
}

std::string RandomValue::b64() const { return b64url::encode(bytes); }

Result<RandomValue> gen_random(RandomSource& rng, int entropy_bits) {
    if (entropy_bits != 256 && entropy_bits != 384 && entropy_bits != 512) {
        return fail(Error::InvalidInput, "unsupported entropy size");
    }
    RandomValue v;
    v.entropy_bits = entropy_bits;
    v.bytes = rng.bytes(static_cast<std::size_t>(entropy_bits) / 8);
    return v;
}

Result<SaltedHash> salted_hash(BytesView input, const RandomValue& salt,
                               const std::string& profile) {
    if (salt.entropy_bits < 256) {
        return fail(Error::InvalidInput, "salt entropy below 256 bits");
    }
    SaltedHash out;
    out.profile = profile;
    if (profile == kProfileTest) {
        Bytes buf(salt.bytes);
        buf.insert(buf.end(), input.begin(), input.end());
        const Digest d = sha256(buf);
        out.bytes.assign(d.bytes.begin(), d.bytes.end());
        return out;
    }
    if (profile == kProfileScrypt) {
        out.bytes.resize(32);
        if (EVP_PBE_scrypt(reinterpret_cast<const char*>(input.data()),
                           input.size(), salt.bytes.data(), salt.bytes.size(),
                           16384, 8, 1, 0, out.bytes.data(),
                           out.bytes.size()) != 1) {
            throw std::runtime_error("scrypt failed");
        }
        return out;
    }
    return fail(Error::UnsupportedProfile, "unknown hash profile: " + profile);
}

SigningKeyPair SigningKeyPair::generate(RandomSource& rng, std::string key_id) {
    return from_seed(rng.bytes(32), std::move(key_id));
}

SigningKeyPair SigningKeyPair::from_seed(Bytes seed, std::string key_id) {
    SigningKeyPair kp;
    kp.seed_ = std::move(seed);
    PkeyPtr key = ed25519_private(kp.seed_);
    std::size_t len = 32;
    kp.public_.raw.resize(len);
    EVP_PKEY_get_raw_public_key(key.get(), kp.public_.raw.data(), &len);
    kp.public_.key_id = std::move(key_id);
    kp.public_.algorithm = kAlgEdDSA;
    return kp;
}

Bytes sign(BytesView payload, const SigningKeyPair& key) {
    PkeyPtr pkey = ed25519_private(key.seed());
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (EVP_DigestSignInit(ctx.get(), nullptr, nullptr, nullptr, pkey.get()) != 1) {
        throw std::runtime_error("DigestSignInit failed");
    }
    std::size_t len = 0;
    EVP_DigestSign(ctx.get(), nullptr, &len, payload.data(), payload.size());
    Bytes sig(len);
    if (EVP_DigestSign(ctx.get(), sig.data(), &len, payload.data(),
                       payload.size()) != 1) {
        throw std::runtime_error("DigestSign failed");
    }
    sig.resize(len);
    return sig;
}

bool verify(BytesView payload, BytesView signature, const PublicKey& key) {
    if (key.algorithm != kAlgEdDSA || key.raw.size() != 32) return false;
    PkeyPtr pkey = ed25519_public(key.raw);
    if (!pkey) return false;
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (EVP_DigestVerifyInit(ctx.get(), nullptr, nullptr, nullptr,
                             pkey.get()) != 1) {
        return false;
    }
    return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(),
                            payload.data(), payload.size()) == 1;
}

nlohmann::json jwks_export(std::span<const PublicKey> keys) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& key : keys) {
        arr.push_back({{"kid", key.key_id},
                       {"alg", key.algorithm},
                       {"kty", "OKP"},
                       {"crv", "Ed25519"},
                       {"x", b64url::encode(key.raw)}});
    }
    return {{"keys", arr}};
}

Result<std::vector<PublicKey>> jwks_import(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("keys") || !doc["keys"].is_array()) {
        return fail(Error::ParseError, "jwks: missing keys array");
    }
    std::vector<PublicKey> out;
    for (const auto& jwk : doc["keys"]) {
        if (!jwk.contains("kid") || !jwk.contains("alg") || !jwk.contains("x")) {
            return fail(Error::ParseError, "jwks: incomplete key entry");
        }
        PublicKey key;
        key.key_id = jwk["kid"].get<std::string>();
        key.algorithm = jwk["alg"].get<std::string>();
        if (key.algorithm != kAlgEdDSA) {
            return fail(Error::ParseError, "jwks: unsupported algorithm");
        }
        auto raw = b64url::decode(jwk["x"].get<std::string>());
        if (!raw.ok() || raw.value().size() != 32) {
            return fail(Error::ParseError, "jwks: bad key material");
        }
        key.raw = std::move(raw).value();
        out.push_back(std::move(key));
    }
    return out;
}

}  // namespace soap::crypto
