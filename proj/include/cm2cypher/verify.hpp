#pragma once

// Differential check of the reference interpreter against (a) the in-process
// evaluation of the generated reduce() query and (b) qpp_walk, over a seeded
// corpus of random programs. Case i uses random_program(seed + i, max_states),
// so any failing case reproduces alone with --seed <seed + i> --count 1.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cm2cypher/codegen.hpp"
#include "cm2cypher/cypher.hpp"
#include "cm2cypher/frontend.hpp"
#include "cm2cypher/machine.hpp"

namespace cm2cy {

inline cypher::Value config_to_value(const Config& c) {
    return cypher::Value::map({{"state", cypher::Value::integer(c.state)},
                               {"A", cypher::Value::integer(c.a)},
                               {"B", cypher::Value::integer(c.b)}});
}

struct VerifyOptions {
    std::uint64_t seed = 42;
    std::int64_t count = 200;
    std::size_t max_states = 8;
    std::int64_t fuel = 5000;
    bool include_example = false;  // prepend the four-state example program
};

struct CaseFailure {
    std::uint64_t seed = 0;
    std::string what;
    std::string reproduce;
};

struct VerifyReport {
    std::int64_t passed = 0;
    std::int64_t failed = 0;
    std::int64_t halting = 0;
    std::vector<CaseFailure> failures;

    bool ok() const { return failed == 0; }
};

using QueryGenerator = std::function<std::string(const Program&, std::int64_t)>;

inline std::string default_query_generator(const Program& p, std::int64_t fuel) {
    return gen_reduce_query(p, fuel).text;
}

// Empty string when the two routes agree.
inline std::string check_program(const Program& program, std::int64_t fuel, const QueryGenerator& generate) {
    const auto expected = run(program, fuel);
    try {
        const auto row = cypher::run_query_text(generate(program, fuel));
        const auto& got = row.at("result");
        if (!(got == config_to_value(expected.final))) {
            return "reduce query returned " + cypher::to_display(got) + ", interpreter " +
                   cypher::to_display(config_to_value(expected.final));
        }
    } catch (const Error& e) {
        return std::string("reduce query failed: ") + e.what();
    }
    if (expected.halted) {
        try {
            const auto path = qpp_walk(program, fuel);
            if (path.steps != expected.machine_steps - 1 || path.final_a != expected.final.a ||
                path.final_b != expected.final.b) {
                return "qpp_walk steps=" + std::to_string(path.steps) + " A=" + std::to_string(path.final_a) +
                       " B=" + std::to_string(path.final_b) + ", interpreter steps=" +
                       std::to_string(expected.machine_steps) + " A=" + std::to_string(expected.final.a) +
                       " B=" + std::to_string(expected.final.b);
            }
        } catch (const Error& e) {
            return std::string("qpp_walk failed: ") + e.what();
        }
    }
    return {};
}

inline VerifyReport verify_corpus(const VerifyOptions& options, const QueryGenerator& generate = default_query_generator) {
    VerifyReport report;
    auto record = [&](const Program& program, std::uint64_t seed, const std::string& reproduce) {
        const auto failure = check_program(program, options.fuel, generate);
        if (run(program, options.fuel).halted) ++report.halting;
        if (failure.empty()) {
            ++report.passed;
        } else {
            ++report.failed;
            report.failures.push_back({seed, failure, reproduce});
        }
    };

    const auto common = " --max-states " + std::to_string(options.max_states) + " --fuel " + std::to_string(options.fuel);
    if (options.include_example) {
        record(example_program(), options.seed, "cm2cypher verify --include-example --count 0" + common);
    }
    for (std::int64_t i = 0; i < options.count; ++i) {
        const auto seed = options.seed + static_cast<std::uint64_t>(i);
        record(random_program(seed, options.max_states), seed,
               "cm2cypher verify --seed " + std::to_string(seed) + " --count 1" + common);
    }
    return report;
}

}  // namespace cm2cy
