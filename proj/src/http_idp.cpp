// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include "soap/http_idp.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

namespace soap::http {

namespace {

void send_error(httplib::Response& res, Error code,
                const std::string& detail) {
    nlohmann::json body = {{"error", std::string(to_string(code))}};
    if (!detail.empty()) body["error_description"] = detail;
    res.status = 400;
    res.set_content(body.dump(), "application/json");
}

}  // namespace

IdpHttpServer::IdpHttpServer(idp::IdpSimulator& sim,
                             std::function<std::int64_t()> clock)
    : sim_(sim), clock_(std::move(clock)),
      server_(std::make_unique<httplib::Server>()) {
    server_->new_task_queue = [] { return new httplib::ThreadPool(1); };

    server_->Get("/.well-known/openid-configuration",
                 [this](const httplib::Request&, httplib::Response& res) {
                     res.set_content(sim_.discovery_document().dump(),
                                     "application/json");
                 });

    server_->Get("/jwks.json",
                 [this](const httplib::Request&, httplib::Response& res) {
                     res.set_content(sim_.jwks(clock_()).dump(),
                                     "application/json");
                 });

    server_->Get("/authorize", [this](const httplib::Request& req,
                                      httplib::Response& res) {
        idp::ParamMap params;
        idp::Credentials creds;
        idp::Consent consent = idp::Consent::Grant;
        for (const auto& [k, v] : req.params) {
            // Endpoint authentication travels beside the protocol parameters
            // and is not part of the authorization parameter map.
            if (k == "username") {
                creds.username = v;
            } else if (k == "password") {
                creds.password = v;
            } else if (k == "session") {
                creds.session_cookie = v;
            } else if (k == "consent") {
                consent = (v == "deny") ? idp::Consent::Deny
                                        : idp::Consent::Grant;
            } else {
                params[k] = v;
            }
        }
        auto redirect = sim_.handle_authorization_request(params, creds,
                                                          consent, clock_());
        if (!redirect.ok()) {
            send_error(res, redirect.error(), redirect.detail());
            return;
        }
        res.status = 302;
        res.set_header("Location", redirect.value().location());
    });

    server_->Post("/token", [this](const httplib::Request& req,
                                   httplib::Response& res) {
        idp::ParamMap form;
        for (const auto& [k, v] : req.params) form[k] = v;
        auto token = sim_.handle_token_request(form, clock_());
        if (!token.ok()) {
            send_error(res, token.error(), token.detail());
            return;
        }
        res.set_content(token.value().dump(), "application/json");
    });
}

IdpHttpServer::~IdpHttpServer() { stop(); }

int IdpHttpServer::bind_any(const std::string& host) {
    return server_->bind_to_any_port(host);
}

bool IdpHttpServer::listen_after_bind() {
    return server_->listen_after_bind();
}

bool IdpHttpServer::listen(const std::string& host, int port) {
    return server_->listen(host, port);
}

void IdpHttpServer::stop() {
    if (server_) server_->stop();
}

}  // namespace soap::http
