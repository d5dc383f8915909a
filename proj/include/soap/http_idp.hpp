// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "soap/idp.hpp"

namespace httplib {
class Server;
}

namespace soap::http {

// Loopback HTTP facade over one IdpSimulator. Endpoints mirror the in-process
// wire formats 1:1:
//   GET  /.well-known/openid-configuration
//   GET  /jwks.json
//   GET  /authorize   (query; username/password/consent authenticate, the
//                      rest is the authorization parameter map)
//   POST /token       (urlencoded form)
// Requests are handled serially; the IdP is one state machine.
class IdpHttpServer {
public:
    IdpHttpServer(idp::IdpSimulator& sim,
                  std::function<std::int64_t()> clock);
    ~IdpHttpServer();

    // Binds an ephemeral port on host; returns the port or -1.
    int bind_any(const std::string& host);
    bool listen_after_bind();  // blocking
    bool listen(const std::string& host, int port);  // blocking
    void stop();

private:
    idp::IdpSimulator& sim_;
    std::function<std::int64_t()> clock_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace soap::http
