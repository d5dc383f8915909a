// Copyright 2026 The soap-sim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: happy-path demo, scenario runner, attestation
// verifier, and a loopback mock-IdP server for manual exploration.
//
// Exit codes: 0 success, 1 protocol/expectation failure, 2 usage/parse error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "soap/base64url.hpp"
#include "soap/http_idp.hpp"
#include "soap/scenario.hpp"
#include "soap/world.hpp"

namespace {

using soap::harness::World;
using soap::harness::WorldConfig;

struct CommonOpts {
    std::uint64_t seed = 1;
    std::string out_dir;
    std::string format = "text";
};

void write_file(const std::string& dir, const std::string& name,
                const std::string& content) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    std::ofstream(dir + "/" + name) << content;
}

int cmd_demo(const CommonOpts& opts) {
    World world(WorldConfig::two_idp_default(opts.seed));
    nlohmann::json report = {{"schema", "soap-demo-report/1"},
                             {"seed", opts.seed},
                             {"identities", nlohmann::json::array()}};
    auto fail_out = [&](const std::string& where, std::string_view code) {
        report["failed_check"] = {{"where", where}, {"error", code}};
        std::cout << (opts.format == "json"
                          ? report.dump(2)
                          : "demo failed at " + where + ": " +
                                std::string(code))
                  << "\n";
        return 1;
    };

    for (const auto& u : world.config().users) {
        if (auto r = world.register_user(u.name); !r.ok()) {
            return fail_out("register " + u.name, r.error_name());
        }
    }
    for (const std::string idp_id : {"idp1", "idp2"}) {
        auto att = world.run_soap("alice", idp_id, "bob");
        if (!att.ok()) return fail_out("run_soap " + idp_id, att.error_name());
        if (auto f = world.forward_attestation("alice", "bob", att.value());
            !f.ok()) {
            return fail_out("forward " + idp_id, f.error_name());
        }
        soap::verifier::CheckReport check_report;
        auto id = world.verify_from_channel("bob", "alice", &check_report);
        if (!id.ok()) return fail_out("verify " + idp_id, id.error_name());
        report["identities"].push_back({{"idp", idp_id},
                                        {"issuer", id.value().issuer},
                                        {"subject", id.value().subject},
                                        {"email", id.value().email}});
        if (opts.format == "text") {
            std::cout << "verified " << id.value().subject << " ("
                      << id.value().email << ") via " << id.value().issuer
                      << "\n";
        }
    }

    auto correspondence = world.sender_correspondence();
    report["sender_correspondence"] = correspondence.to_json();
    nlohmann::json privacy = nlohmann::json::object();
    bool privacy_ok = true;
    for (const std::string idp_id : {"idp1", "idp2"}) {
        auto v = world.privacy_leakage(idp_id);
        privacy[idp_id] = v.to_json();
        privacy_ok = privacy_ok && v.holds;
    }
    report["privacy"] = privacy;

    write_file(opts.out_dir, "demo_report.json", report.dump(2));
    write_file(opts.out_dir, "trace.jsonl", world.trace().to_jsonl());
    if (opts.format == "json") {
        std::cout << report.dump(2) << "\n";
    } else {
        std::cout << "sender correspondence: "
                  << (correspondence.holds ? "holds" : "violated") << "\n"
                  << "privacy: " << (privacy_ok ? "holds" : "violated")
                  << "\n";
    }
    return (correspondence.holds && privacy_ok) ? 0 : 1;
}

int cmd_scenario(const std::string& path, const CommonOpts& opts) {
    auto outcome = soap::scenario::run_scenario_file(path);
    if (!outcome.ok()) {
        std::cerr << "scenario error: " << outcome.error_name() << " ("
                  << outcome.detail() << ")\n";
        return 2;
    }
    const auto& oc = outcome.value();
    write_file(opts.out_dir, "outcome.json", oc.to_json().dump(2));
    write_file(opts.out_dir, "trace.jsonl", oc.trace_jsonl);
    if (opts.format == "json") {
        std::cout << oc.to_json().dump(2) << "\n";
    } else {
        for (const auto& step : oc.step_results) {
            std::cout << "step " << step["step"] << " "
                      << step["op"].get<std::string>() << ": "
                      << step["result"].get<std::string>() << "\n";
        }
        for (const auto& f : oc.failures) std::cout << "FAILED: " << f << "\n";
        std::cout << (oc.passed ? "all expectations met" : "expectations failed")
                  << "\n";
    }
    return oc.passed ? 0 : 1;
}

int cmd_verify(const std::string& att_path, const std::string& sn_hex,
               const std::string& registry_path, std::int64_t now,
               const CommonOpts& opts) {
    std::ifstream att_in(att_path);
    auto att_json = nlohmann::json::parse(att_in, nullptr, false);
    if (att_json.is_discarded()) {
        std::cerr << "cannot parse attestation file\n";
        return 2;
    }
    auto att = soap::prover::SoapAttestation::from_json(att_json);
    if (!att.ok()) {
        std::cerr << "bad attestation: " << att.error_name() << "\n";
        return 2;
    }

    soap::msg::SafetyNumber sn;
    if (sn_hex.size() != 64) {
        std::cerr << "safety number must be 32 bytes of hex\n";
        return 2;
    }
    for (std::size_t i = 0; i < 32; ++i) {
        sn.digest.bytes[i] = static_cast<std::uint8_t>(
            std::stoi(sn_hex.substr(2 * i, 2), nullptr, 16));
    }

    // Registry file: {"hash_profile": ..., "issuers": {issuer: <jwks>}}.
    std::ifstream reg_in(registry_path);
    auto reg_json = nlohmann::json::parse(reg_in, nullptr, false);
    if (reg_json.is_discarded()) {
        std::cerr << "cannot parse registry file\n";
        return 2;
    }
    soap::verifier::IdpRegistry registry;
    registry.hash_profile =
        reg_json.value("hash_profile", std::string(soap::crypto::kProfileTest));
    const nlohmann::json issuers =
        reg_json.value("issuers", nlohmann::json::object());
    for (const auto& [issuer, jwks] : issuers.items()) {
        auto keys = soap::crypto::jwks_import(jwks);
        if (!keys.ok()) {
            std::cerr << "bad JWKS for " << issuer << "\n";
            return 2;
        }
        registry.issuer_keys[issuer] = std::move(keys).value();
    }

    soap::ReplayCache cache;
    soap::verifier::CheckReport report;
    auto identity = soap::verifier::verify_attestation(att.value(), sn, cache,
                                                       registry, now,
                                                       soap::token::kDefaultSkew,
                                                       &report);
    nlohmann::json out = report.to_json();
    if (identity.ok()) {
        out["identity"] = {{"issuer", identity.value().issuer},
                           {"subject", identity.value().subject},
                           {"email", identity.value().email}};
    } else {
        out["error"] = std::string(identity.error_name());
    }
    write_file(opts.out_dir, "verify_report.json", out.dump(2));
    std::cout << out.dump(2) << "\n";
    return identity.ok() ? 0 : 1;
}

int cmd_serve_idp(const std::string& issuer, int port, std::int64_t lifetime,
                  const std::vector<std::string>& redirects,
                  const std::vector<std::string>& accounts,
                  const CommonOpts& opts) {
    soap::idp::IdpConfig config;
    config.issuer = issuer;
    config.token_lifetime = lifetime;
    if (auto v = config.validate(); !v.ok()) {
        std::cerr << "bad IdP config: " << v.detail() << "\n";
        return 2;
    }
    static soap::crypto::SeededRandomSource rng(opts.seed);
    soap::idp::IdpSimulator sim(config, rng);
    if (!redirects.empty()) {
        auto client = sim.register_client(redirects);
        if (!client.ok()) {
            std::cerr << "client registration failed: " << client.detail()
                      << "\n";
            return 2;
        }
        std::cout << "client_id: " << client.value() << "\n";
    }
    for (const auto& acc : accounts) {
        // user:password:email
        const auto c1 = acc.find(':');
        const auto c2 = acc.find(':', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos) {
            std::cerr << "account format: user:password:email\n";
            return 2;
        }
        sim.add_account(acc.substr(0, c1),
                        {acc.substr(c1 + 1, c2 - c1 - 1), acc.substr(c2 + 1),
                         "sub-" + acc.substr(0, c1)});
    }
    soap::http::IdpHttpServer server(
        sim, [] { return static_cast<std::int64_t>(::time(nullptr)); });
    std::cout << "serving " << issuer << " on 127.0.0.1:" << port << "\n";
    return server.listen("127.0.0.1", port) ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SOAP protocol simulator"};
    app.require_subcommand(1);
    CommonOpts opts;
    app.add_option("--seed", opts.seed, "world seed");
    app.add_option("--out", opts.out_dir, "report output directory");
    app.add_option("--format", opts.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));

    auto* demo = app.add_subcommand("demo", "two-IdP happy-path demo");
    // Global options (--seed and friends) may appear after the subcommand.
    demo->fallthrough();

    std::string scenario_path;
    auto* scenario =
        app.add_subcommand("scenario", "run a scenario file");
    scenario->fallthrough();
    scenario->add_option("path", scenario_path, "scenario JSON file")
        ->required();

    std::string att_path, sn_hex, registry_path;
    std::int64_t now = ::time(nullptr);
    auto* verify = app.add_subcommand("verify", "verify an attestation file");
    verify->fallthrough();
    verify->add_option("--attestation", att_path)->required();
    verify->add_option("--safety-number", sn_hex, "32-byte hex digest")
        ->required();
    verify->add_option("--registry", registry_path, "issuer JWKS registry")
        ->required();
    verify->add_option("--now", now, "verification time (unix seconds)");

    std::string issuer = "https://idp.localhost";
    int port = 8787;
    std::int64_t lifetime = 3600;
    std::vector<std::string> redirects, accounts;
    auto* serve = app.add_subcommand("serve-idp", "loopback mock IdP");
    serve->fallthrough();
    serve->add_option("--issuer", issuer);
    serve->add_option("--port", port);
    serve->add_option("--lifetime", lifetime, "token lifetime seconds");
    serve->add_option("--redirect", redirects, "whitelisted redirect URL");
    serve->add_option("--account", accounts, "user:password:email");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    if (demo->parsed()) return cmd_demo(opts);
    if (scenario->parsed()) return cmd_scenario(scenario_path, opts);
    if (verify->parsed()) {
        return cmd_verify(att_path, sn_hex, registry_path, now, opts);
    }
    if (serve->parsed()) {
        return cmd_serve_idp(issuer, port, lifetime, redirects, accounts,
                             opts);
    }
    return 2;
}
