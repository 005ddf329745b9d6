#include <gtest/gtest.h>

#include <string>

#include "cm2cypher/cypher.hpp"
#include "cm2cypher/frontend.hpp"

using namespace cm2cy;

namespace {

const std::string kSource = CM2CY_SOURCE_DIR;

ParseError parse_failure(const std::string& text) {
    try {
        parse_dsl(text);
    } catch (const ParseError& e) {
        return e;
    }
    ADD_FAILURE() << "no ParseError for: " << text;
    return ParseError(0, 0, "none");
}

}  // namespace

TEST(Dsl, ParsesExample) {
    const auto p = parse_dsl("state 0: INC A -> 1\nstate 1: JZDEC B ? 2 : 3\nstate 2: INC B -> 0\nstate 3: HALT");
    EXPECT_EQ(p, example_program());
}

TEST(Dsl, CommentsBlankLinesAndOrder) {
    const auto p = parse_dsl("# header\n\nstate 1: HALT   # done\n  state 0:INC B->1\n");
    EXPECT_EQ(p, Program({Inc{CounterId::B, 1}, Halt{}}));
}

TEST(Dsl, SingleHalt) { EXPECT_EQ(parse_dsl("state 0: HALT"), Program({Halt{}})); }

TEST(Dsl, UnknownCounterIsPositioned) {
    const auto e = parse_failure("state 0: INC C -> 0");
    EXPECT_EQ(e.line(), 1u);
    EXPECT_EQ(e.column(), 14u);
    EXPECT_NE(std::string(e.what()).find("unknown counter"), std::string::npos);
}

TEST(Dsl, Errors) {
    EXPECT_EQ(parse_failure("state 0: HALT\nstate 0: HALT").line(), 2u);
    EXPECT_NE(std::string(parse_failure("state 1: HALT").what()).find("missing state 0"), std::string::npos);
    const auto dangling = parse_failure("state 0: INC A -> 1\n");
    EXPECT_EQ(dangling.column(), 19u);
    EXPECT_NE(std::string(parse_failure("state 0: HALT now").what()).find("trailing"), std::string::npos);
    EXPECT_NE(std::string(parse_failure("state 0: JUMP 1").what()).find("unknown instruction"), std::string::npos);
    EXPECT_NE(std::string(parse_failure("# nothing\n").what()).find("no states"), std::string::npos);
    parse_failure("state 0: JZDEC A ? 0 0");
    parse_failure("stat 0: HALT");
}

TEST(Dsl, RoundTripsRandomPrograms) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const auto p = random_program(seed, 12);
        ASSERT_EQ(parse_dsl(render_dsl(p)), p) << seed;
    }
}

TEST(Dsl, RenderExample) {
    EXPECT_EQ(render_dsl(example_program()),
              "state 0: INC A -> 1\nstate 1: JZDEC B ? 2 : 3\nstate 2: INC B -> 0\nstate 3: HALT\n");
}

TEST(Maps, ExampleDocument) {
    const auto doc = to_program_document(example_program());
    EXPECT_EQ(doc.dump(),
              R"([{"state":0,"op":"INC","counter":"A","next":1},)"
              R"({"state":1,"op":"JZDEC","counter":"B","q_zero":2,"q_pos":3},)"
              R"({"state":2,"op":"INC","counter":"B","next":0},)"
              R"({"state":3,"op":"HALT","counter":"","next":3}])");
}

TEST(Maps, MatchesProgramListing) {
    // The listing is a Cypher list literal; evaluate it and compare with the document.
    auto text = read_text_file(kSource + "/tests/fixtures/listings/example.program.cypher");
    const auto row = cypher::run_query_text(text + "RETURN program");
    const auto expected = cypher::from_json(to_program_document(example_program()));
    EXPECT_EQ(row.at("program"), expected);
}

TEST(Maps, RoundTripsRandomPrograms) {
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        const auto p = random_program(seed, 12);
        ASSERT_EQ(from_program_document(to_program_document(p)), p) << seed;
        ASSERT_EQ(from_program_document(nlohmann::json::parse(to_program_document(p).dump())), p) << seed;
    }
}

TEST(Maps, SchemaViolations) {
    auto bad = [](const char* text) { return nlohmann::json::parse(text); };
    EXPECT_THROW(from_program_document(bad("{}")), SchemaError);
    EXPECT_THROW(from_program_document(bad("[]")), SchemaError);
    EXPECT_THROW(from_program_document(bad(R"([{"state":0,"op":"INC","counter":"C","next":0}])")), SchemaError);
    EXPECT_THROW(from_program_document(bad(R"([{"state":1,"op":"HALT","counter":"","next":1}])")), SchemaError);
    EXPECT_THROW(from_program_document(bad(R"([{"state":0,"op":"HALT","counter":"A","next":0}])")), SchemaError);
    EXPECT_THROW(from_program_document(bad(R"([{"state":0,"op":"INC","counter":"A","next":5}])")), SchemaError);
    EXPECT_THROW(from_program_document(bad(R"([{"state":0,"op":"INC","counter":"A","next":"0"}])")), SchemaError);
    EXPECT_THROW(from_program_document(bad(R"([{"state":0,"op":"INC","counter":"A","next":0,"x":1}])")), SchemaError);
    EXPECT_THROW(from_program_document(bad(R"([{"state":0,"op":"NOP","counter":"A"}])")), SchemaError);
}

TEST(Files, FixturesAgree) {
    EXPECT_EQ(load_program_file(kSource + "/fixtures/example.2cm"), example_program());
    EXPECT_EQ(load_program_file(kSource + "/fixtures/example.json"), example_program());
    EXPECT_THROW(load_program_file(kSource + "/fixtures/does-not-exist.2cm"), Error);
}

TEST(Trace, ExampleTable) {
    const auto table = format_trace(run(example_program(), kDefaultFuel, true));
    EXPECT_EQ(table,
              "Step | Instr         | St | A   | B\n"
              "-----+---------------+----+-----+----\n"
              "0    | INC(A)        | q0 | 0→1 | 0\n"
              "1    | JZDEC(B), B=0 | q1 | 1   | 0\n"
              "2    | INC(B)        | q2 | 1   | 0→1\n"
              "3    | INC(A)        | q0 | 1→2 | 1\n"
              "4    | JZDEC(B), B>0 | q1 | 2   | 1→0\n"
              "5    | HALT          | q3 | 2   | 0\n");
}

TEST(Trace, AsciiAndTruncation) {
    const auto r = run(Program({Inc{CounterId::A, 0}}), 20, true, 3);
    const auto table = format_trace(r, true);
    EXPECT_NE(table.find("0->1"), std::string::npos);
    EXPECT_NE(table.find("... trace truncated after 3 rows (20 steps executed)"), std::string::npos);
}

TEST(Random, DeterministicAndAlwaysHasHalt) {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto p = random_program(seed, 8);
        ASSERT_EQ(p, random_program(seed, 8));
        ASSERT_TRUE(p.contains_halt());
        ASSERT_LE(p.size(), 8u);
    }
    EXPECT_THROW(random_program(1, 0), ValidationError);
}
