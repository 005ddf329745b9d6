#include <gtest/gtest.h>

#include <limits>
#include <tuple>
#include <vector>

#include "cm2cypher/frontend.hpp"
#include "cm2cypher/machine.hpp"

using namespace cm2cy;

namespace {

// Independent oracle: programs as (op, counter, a, b) tuples, op 0=INC 1=JZDEC 2=HALT.
struct Raw {
    int op;
    int counter;
    std::int64_t x;
    std::int64_t y;
};

std::vector<Raw> to_raw(const Program& p) {
    std::vector<Raw> out;
    for (const auto& i : p.instructions()) {
        if (auto* inc = std::get_if<Inc>(&i)) out.push_back({0, inc->counter == CounterId::A ? 0 : 1, inc->next, 0});
        else if (auto* jz = std::get_if<JzDec>(&i)) out.push_back({1, jz->counter == CounterId::A ? 0 : 1, jz->if_zero, jz->if_pos});
        else out.push_back({2, 0, 0, 0});
    }
    return out;
}

std::tuple<std::int64_t, std::int64_t, std::int64_t> oracle(const std::vector<Raw>& prog, std::int64_t k) {
    std::int64_t q = 0, c[2] = {0, 0};
    for (std::int64_t i = 0; i < k && q != -1; ++i) {
        const auto& r = prog[q];
        if (r.op == 0) { ++c[r.counter]; q = r.x; }
        else if (r.op == 1) { if (c[r.counter] == 0) q = r.x; else { --c[r.counter]; q = r.y; } }
        else q = -1;
    }
    return {q, c[0], c[1]};
}

}  // namespace

TEST(Machine, ExampleProgramHalts) {
    const auto r = run(example_program());
    EXPECT_TRUE(r.halted);
    EXPECT_EQ(r.final, (Config{-1, 2, 0}));
    EXPECT_EQ(r.machine_steps, 6);
}

TEST(Machine, ExampleTraceRows) {
    const auto r = run(example_program(), kDefaultFuel, true);
    ASSERT_EQ(r.trace.size(), 6u);
    const std::vector<TraceRow> expected = {
        {0, 0, "INC(A)", {1, 1, 0}},
        {1, 1, "JZDEC(B), B=0", {2, 1, 0}},
        {2, 2, "INC(B)", {0, 1, 1}},
        {3, 0, "INC(A)", {1, 2, 1}},
        {4, 1, "JZDEC(B), B>0", {3, 2, 0}},
        {5, 3, "HALT", {-1, 2, 0}},
    };
    EXPECT_EQ(r.trace, expected);
    EXPECT_FALSE(r.trace_truncated);
}

TEST(Machine, SingleHalt) {
    const auto r = run(Program({Halt{}}));
    EXPECT_EQ(r.final, (Config{-1, 0, 0}));
    EXPECT_EQ(r.machine_steps, 1);
}

TEST(Machine, SelfLoopRunsOutOfFuel) {
    const auto r = run(Program({Inc{CounterId::A, 0}}), 5);
    EXPECT_FALSE(r.halted);
    EXPECT_EQ(r.final, (Config{0, 5, 0}));
    EXPECT_EQ(r.machine_steps, 5);
}

TEST(Machine, ZeroFuelLeavesInitialConfig) {
    const auto r = run(example_program(), 0);
    EXPECT_EQ(r.final, (Config{0, 0, 0}));
    EXPECT_FALSE(r.halted);
    EXPECT_THROW(run(example_program(), -1), ValidationError);
}

TEST(Machine, JzDecOnZeroLeavesCounter) {
    const Program p({JzDec{CounterId::A, 1, 1}, Halt{}});
    EXPECT_EQ(step(p, {0, 0, 0}), (Config{1, 0, 0}));
    EXPECT_EQ(step(p, {0, 3, 7}), (Config{1, 2, 7}));
}

TEST(Machine, HaltIsAbsorbing) {
    const auto p = example_program();
    for (Config c : {Config{-1, 0, 0}, Config{-1, 5, 9}}) EXPECT_EQ(step(p, c), c);
}

TEST(Machine, InvalidProgramsRejected) {
    EXPECT_THROW(Program({}), ValidationError);
    EXPECT_THROW(Program({Inc{CounterId::A, 1}}), ValidationError);
    EXPECT_THROW(Program({JzDec{CounterId::B, 0, -2}}), ValidationError);
    EXPECT_THROW(step(example_program(), {9, 0, 0}), ValidationError);
}

TEST(Machine, CounterOverflowRaises) {
    const Program p({Inc{CounterId::B, 0}});
    EXPECT_THROW(step(p, {0, 0, std::numeric_limits<Counter>::max()}), OverflowError);
}

TEST(Machine, TraceCapTruncates) {
    const auto r = run(Program({Inc{CounterId::A, 0}}), 50, true, 10);
    EXPECT_EQ(r.trace.size(), 10u);
    EXPECT_TRUE(r.trace_truncated);
    EXPECT_EQ(r.machine_steps, 50);
}

TEST(Machine, RunMatchesOracleOnRandomPrograms) {
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        const auto p = random_program(seed, 8);
        const auto raw = to_raw(p);
        for (std::int64_t k : {0, 1, 2, 7, 50, 400}) {
            const auto [q, a, b] = oracle(raw, k);
            const auto r = run(p, k);
            ASSERT_EQ(r.final, (Config{q, a, b})) << "seed " << seed << " k " << k;
        }
    }
}

TEST(Qpp, ExampleWalk) {
    const auto w = qpp_walk(example_program());
    EXPECT_EQ(w.steps, 5);
    EXPECT_EQ(w.final_a, 2);
    EXPECT_EQ(w.final_b, 0);
    const std::vector<std::string> tags = {"INC(A)", "JZDEC_ZERO(B)", "INC(B)", "INC(A)", "JZDEC_POS(B)"};
    EXPECT_EQ(w.edge_tags, tags);
}

TEST(Qpp, HaltAtInitialState) {
    const auto w = qpp_walk(Program({Halt{}}));
    EXPECT_EQ(w.steps, 0);
    EXPECT_TRUE(w.edge_tags.empty());
}

TEST(Qpp, NoHaltReachableRaises) {
    EXPECT_THROW(qpp_walk(Program({Inc{CounterId::A, 0}}), 1000), NoPathError);
    EXPECT_THROW(qpp_walk(Program({Inc{CounterId::A, 0}, Halt{}}), 1000), NoPathError);
}

TEST(Qpp, AgreesWithRunOnHaltingPrograms) {
    int halting = 0;
    for (std::uint64_t seed = 1000; seed < 1400; ++seed) {
        const auto p = random_program(seed, 8);
        const auto r = run(p, 5000);
        if (!r.halted) continue;
        ++halting;
        const auto w = qpp_walk(p, 5000);
        ASSERT_EQ(w.steps, r.machine_steps - 1) << seed;
        ASSERT_EQ(w.final_a, r.final.a) << seed;
        ASSERT_EQ(w.final_b, r.final.b) << seed;
    }
    EXPECT_GT(halting, 50);
}
