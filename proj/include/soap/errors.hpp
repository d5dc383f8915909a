// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace soap {

// Stable error codes. The string forms are part of the scenario-file and
// report contracts, so they must not change between releases.
enum class Error {
    // crypto
    InvalidInput,
    UnsupportedProfile,
    // token
    MalformedNonce,
    MalformedToken,
    IssuerMismatch,
    AudienceMismatch,
    NonceHashMismatch,
    TokenExpired,
    BadSignature,
    LifetimeOutOfRange,
    // idp
    InvalidRegistration,
    UnknownClient,
    RedirectMismatch,
    AuthFailed,
    AccessDenied,
    UnsupportedResponseType,
    InvalidGrant,
    InvalidPkce,
    InvalidClient,
    // prover
    UnknownIdp,
    StateMismatch,
    RedirectOriginMismatch,
    NoPendingRequest,
    // verifier
    ReflectionDetected,
    SafetyNumberMismatch,
    UnknownIssuer,
    MalformedAttestation,
    // messaging
    InvalidPair,
    RegistrationFailed,
    ChannelViolation,
    // harness / cli
    ScenarioError,
    ParseError,
};

std::string_view to_string(Error e);
std::optional<Error> error_from_string(std::string_view s);

struct Failure {
    Error code;
    std::string detail;
};

// Minimal expected-style result. Good enough until std::expected is available.
template <typename T>
class Result {
public:
    Result(T value) : value_(std::move(value)) {}          // NOLINT(google-explicit-constructor)
    Result(Error code) : failure_(Failure{code, {}}) {}    // NOLINT(google-explicit-constructor)
    Result(Failure failure) : failure_(std::move(failure)) {}  // NOLINT(google-explicit-constructor)

    bool ok() const { return value_.has_value(); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return *value_; }
    T& value() & { return *value_; }
    T&& value() && { return *std::move(value_); }

    Error error() const { return failure_->code; }
    const std::string& detail() const { return failure_->detail; }
    std::string_view error_name() const { return to_string(failure_->code); }

private:
    std::optional<T> value_;
    std::optional<Failure> failure_;
};

template <>
class Result<void> {
public:
    Result() = default;
    Result(Error code) : failure_(Failure{code, {}}) {}    // NOLINT(google-explicit-constructor)
    Result(Failure failure) : failure_(std::move(failure)) {}  // NOLINT(google-explicit-constructor)

    bool ok() const { return !failure_.has_value(); }
    explicit operator bool() const { return ok(); }

    Error error() const { return failure_->code; }
    const std::string& detail() const { return failure_->detail; }
    std::string_view error_name() const { return to_string(failure_->code); }

private:
    std::optional<Failure> failure_;
};

inline Failure fail(Error code, std::string detail = {}) {
    return Failure{code, std::move(detail)};
}

}  // namespace soap
