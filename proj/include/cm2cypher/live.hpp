#pragma once

// Optional end-to-end check against a live graph server. Statements go over
// the HTTP Query API (POST {uri}/db/{database}/query/v2, basic auth, JSON
// body {"statement": ...}); each statement runs in its own implicit
// transaction, which CALL { ... } IN TRANSACTIONS requires.
//
// Settings come from CYPHER_URI, CYPHER_USER, CYPHER_PASSWORD and, optionally,
// CYPHER_DATABASE (default "neo4j"). CYPHER_URI is the HTTP(S) base URL,
// e.g. https://xxxx.databases.neo4j.io or http://localhost:7474.

#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "cm2cypher/codegen.hpp"
#include "cm2cypher/errors.hpp"
#include "cm2cypher/machine.hpp"

namespace cm2cy::live {

inline constexpr int kExitMatch = 0;
inline constexpr int kExitConnection = 3;
inline constexpr int kExitMismatch = 4;

class ConnectionError : public Error {
public:
    using Error::Error;
};

class ServerError : public Error {
public:
    using Error::Error;
};

struct LiveSettings {
    std::string uri;
    std::string user;
    std::string password;
    std::string database = "neo4j";

    static std::optional<LiveSettings> from_environment() {
        auto get = [](const char* name) -> std::optional<std::string> {
            const char* v = std::getenv(name);
            if (v == nullptr || *v == '\0') return std::nullopt;
            return std::string(v);
        };
        auto uri = get("CYPHER_URI");
        auto user = get("CYPHER_USER");
        auto password = get("CYPHER_PASSWORD");
        if (!uri || !user || !password) return std::nullopt;
        LiveSettings s{*uri, *user, *password};
        if (auto db = get("CYPHER_DATABASE")) s.database = *db;
        return s;
    }
};

using Rows = std::vector<std::vector<nlohmann::json>>;

// Drops `//` comment lines and a trailing ';', which the Query API rejects.
inline std::string prepare_statement(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t");
        if (first != std::string::npos && line.compare(first, 2, "//") == 0) continue;
        out += line + "\n";
    }
    while (!out.empty() && (out.back() == '\n' || out.back() == ' ' || out.back() == ';')) out.pop_back();
    return out;
}

class QueryApiClient {
public:
    explicit QueryApiClient(LiveSettings settings) : settings_(std::move(settings)), client_(settings_.uri) {
        client_.set_basic_auth(settings_.user, settings_.password);
        client_.set_connection_timeout(10);
        client_.set_read_timeout(300);
    }

    Rows run(const std::string& statement) {
        nlohmann::json body = {{"statement", prepare_statement(statement)}};
        const auto path = "/db/" + settings_.database + "/query/v2";
        auto res = client_.Post(path, body.dump(), "application/json");
        if (!res) throw ConnectionError("cannot reach " + settings_.uri + ": " + httplib::to_string(res.error()));
        if (res->status == 401 || res->status == 403) {
            throw ConnectionError("server refused credentials (HTTP " + std::to_string(res->status) + ")");
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::parse_error&) {
            throw ServerError("HTTP " + std::to_string(res->status) + " with a non-JSON body");
        }
        if (doc.contains("errors") && !doc["errors"].empty()) {
            const auto& e = doc["errors"][0];
            throw ServerError(e.value("code", std::string("error")) + ": " + e.value("message", std::string()));
        }
        if (res->status < 200 || res->status >= 300) throw ServerError("HTTP " + std::to_string(res->status));
        Rows rows;
        if (doc.contains("data") && doc["data"].contains("values")) {
            for (const auto& r : doc["data"]["values"]) rows.emplace_back(r.begin(), r.end());
        }
        return rows;
    }

private:
    LiveSettings settings_;
    httplib::Client client_;
};

struct LiveOutcome {
    int exit_code = kExitMatch;
    std::string report;
};

inline constexpr const char* kCleanupMachine = "MATCH (m:Machine) DETACH DELETE m";
inline constexpr const char* kCleanupStates = "MATCH (s:State) WHERE s.name STARTS WITH 'q' DETACH DELETE s";
inline constexpr const char* kReadMachine = "MATCH (m:Machine) RETURN m.state AS state, m.A AS A, m.B AS B";

inline std::int64_t as_int(const nlohmann::json& v) {
    if (!v.is_number_integer()) throw ServerError("expected an integer in the result, got " + v.dump());
    return v.get<std::int64_t>();
}

// approach: "tx" or "qpp". Cleans up its nodes before and after.
inline LiveOutcome live_check(const Program& program, const std::string& approach, const LiveSettings& settings,
                              std::int64_t max_path = kDefaultMaxPath) {
    QueryApiClient client(settings);
    LiveOutcome out;
    try {
        if (approach == "tx") {
            const auto expected = run(program);
            const auto bundle = gen_transactions_script(program);
            client.run(kCleanupMachine);
            client.run(bundle.at("setup").text);
            client.run(bundle.at("main").text);
            const auto rows = client.run(kReadMachine);
            client.run(kCleanupMachine);
            if (rows.size() != 1 || rows[0].size() != 3) throw ServerError("expected exactly one :Machine node");
            const Config got{as_int(rows[0][0]), as_int(rows[0][1]), as_int(rows[0][2])};
            out.report = "server m.state=" + std::to_string(got.state) + ", m.A=" + std::to_string(got.a) +
                         ", m.B=" + std::to_string(got.b) + "; interpreter state=" + std::to_string(expected.final.state) +
                         ", A=" + std::to_string(expected.final.a) + ", B=" + std::to_string(expected.final.b);
            out.exit_code = got == expected.final ? kExitMatch : kExitMismatch;
        } else if (approach == "qpp") {
            const auto expected = qpp_walk(program);
            client.run(kCleanupStates);
            client.run(gen_qpp_setup(program).text);
            const auto rows = client.run(gen_qpp_query(max_path).text);
            client.run(kCleanupStates);
            if (rows.size() != 1 || rows[0].size() != 3) throw ServerError("expected exactly one path row");
            const auto steps = as_int(rows[0][0]);
            const auto a = as_int(rows[0][1]);
            const auto b = as_int(rows[0][2]);
            out.report = "server steps=" + std::to_string(steps) + ", ctrA=" + std::to_string(a) +
                         ", ctrB=" + std::to_string(b) + "; qpp_walk steps=" + std::to_string(expected.steps) +
                         ", ctrA=" + std::to_string(expected.final_a) + ", ctrB=" + std::to_string(expected.final_b);
            out.exit_code = steps == expected.steps && a == expected.final_a && b == expected.final_b ? kExitMatch
                                                                                                        : kExitMismatch;
        } else {
            throw Error("unknown live approach '" + approach + "' (expected tx or qpp)");
        }
    } catch (const ConnectionError& e) {
        out.exit_code = kExitConnection;
        out.report = e.what();
    } catch (const ServerError& e) {
        out.exit_code = kExitMismatch;
        out.report = std::string("server rejected the check: ") + e.what();
    }
    return out;
}

}  // namespace cm2cy::live
