#include <gtest/gtest.h>

#include <string>

#include "cm2cypher/verify.hpp"

using namespace cm2cy;

namespace {

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
    const auto at = text.find(from);
    if (at == std::string::npos) throw std::logic_error("mutation site not found: " + from);
    return text.replace(at, from.size(), to);
}

}  // namespace

TEST(Verify, DefaultCorpusPasses) {
    const auto report = verify_corpus({});
    EXPECT_TRUE(report.ok());
    EXPECT_EQ(report.passed, 200);
    EXPECT_GT(report.halting, 0);
}

TEST(Verify, ExampleForcedIntoCorpus) {
    VerifyOptions options;
    options.count = 1;
    options.include_example = true;
    const auto report = verify_corpus(options);
    EXPECT_EQ(report.passed, 2);
    EXPECT_TRUE(report.ok());
}

TEST(Verify, OffByOneMutationIsCaught) {
    const QueryGenerator mutated = [](const Program& p, std::int64_t fuel) {
        return replace_once(gen_reduce_query(p, fuel).text, "A: machine.A + 1", "A: machine.A + 2");
    };
    VerifyOptions options;
    options.count = 50;
    const auto report = verify_corpus(options, mutated);
    EXPECT_FALSE(report.ok());
    ASSERT_FALSE(report.failures.empty());
    const auto& f = report.failures.front();
    EXPECT_EQ(f.reproduce, "cm2cypher verify --seed " + std::to_string(f.seed) + " --count 1 --max-states 8 --fuel 5000");
    // The reproduction command isolates the same failing case.
    VerifyOptions single = options;
    single.seed = f.seed;
    single.count = 1;
    EXPECT_EQ(verify_corpus(single, mutated).failed, 1);
}

TEST(Verify, StepCountMutationIsCaught) {
    const QueryGenerator short_fold = [](const Program& p, std::int64_t fuel) {
        return replace_once(gen_reduce_query(p, fuel).text, "range(1, max_steps)", "range(2, max_steps)");
    };
    VerifyOptions options;
    options.count = 100;
    EXPECT_FALSE(verify_corpus(options, short_fold).ok());
}

TEST(Verify, GeneratorErrorsAreReportedNotThrown) {
    const QueryGenerator broken = [](const Program&, std::int64_t) { return std::string("RETURN 1/0 AS result"); };
    const auto failure = check_program(example_program(), 100, broken);
    EXPECT_NE(failure.find("DivisionByZero"), std::string::npos);
}
