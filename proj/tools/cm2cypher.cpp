// cm2cypher: run counter machines, compile them to Cypher, evaluate the
// generated queries in-process, verify differentially and reduce Turing
// machines to two-counter programs.
//
// Exit codes: 0 ok, 1 input error, 2 fuel exhausted, 3 connection failure,
// 4 semantic mismatch.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cm2cypher/codegen.hpp"
#include "cm2cypher/cypher.hpp"
#include "cm2cypher/frontend.hpp"
#include "cm2cypher/live.hpp"
#include "cm2cypher/machine.hpp"
#include "cm2cypher/minsky.hpp"
#include "cm2cypher/verify.hpp"

namespace fs = std::filesystem;
using namespace cm2cy;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitFuel = 2;

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
}

std::string stem_of(const std::string& path) {
    auto name = fs::path(path).filename().string();
    if (auto dot = name.find('.'); dot != std::string::npos && dot > 0) name = name.substr(0, dot);
    return name;
}

struct RunArgs {
    std::string file;
    std::int64_t fuel = kDefaultFuel;
    bool no_trace = false;
    bool ascii = false;
    std::size_t trace_cap = kDefaultTraceCap;
};

int cmd_run(const RunArgs& args) {
    const auto program = load_program_file(args.file);
    const auto result = run(program, args.fuel, !args.no_trace, args.trace_cap);
    if (!args.no_trace) std::cout << format_trace(result, args.ascii);
    std::cout << (result.halted ? "halted" : "fuel exhausted") << " state=" << result.final.state
              << " A=" << result.final.a << " B=" << result.final.b << " steps=" << result.machine_steps << "\n";
    return result.halted ? kExitOk : kExitFuel;
}

struct CompileArgs {
    std::string file;
    std::string approach = "reduce";
    std::string out_dir = ".";
    std::string name;
    std::int64_t max_steps = kDefaultMaxSteps;
    std::int64_t max_path = kDefaultMaxPath;
    bool param_mode = false;
};

std::vector<fs::path> compile_program(const Program& program, const CompileArgs& args) {
    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    std::vector<fs::path> written;
    auto emit = [&](const std::string& suffix, const std::string& text) {
        const auto path = dir / (args.name + suffix);
        write_file(path, text);
        written.push_back(path);
    };
    const bool all = args.approach == "all";
    if (all || args.approach == "reduce") emit(".reduce.cypher", gen_reduce_query(program, args.max_steps).text);
    if (all || args.approach == "tx") {
        const auto bundle = gen_transactions_script(program, {args.param_mode});
        emit(".tx.setup.cypher", bundle.at("setup").text);
        emit(".tx.main.cypher", bundle.at("main").text);
        emit(".tx.read.cypher", bundle.at("read").text);
        if (args.param_mode) emit(".tx.params.json", transactions_parameters(program).dump(2) + "\n");
    }
    if (all || args.approach == "qpp") {
        emit(".qpp.setup.cypher", gen_qpp_setup(program).text);
        emit(".qpp.query.cypher", gen_qpp_query(args.max_path).text);
    }
    return written;
}

int cmd_compile(CompileArgs args) {
    const auto program = load_program_file(args.file);
    if (args.name.empty()) args.name = stem_of(args.file);
    for (const auto& path : compile_program(program, args)) std::cout << path.string() << "\n";
    return kExitOk;
}

int cmd_eval(const std::string& file, const std::string& params_file) {
    cypher::Parameters params;
    if (!params_file.empty()) params = cypher::parameters_from_json(nlohmann::json::parse(read_text_file(params_file)));
    const auto row = cypher::run_query_text(read_text_file(file), params);
    std::cout << cypher::format_result(row) << "\n";
    return kExitOk;
}

int cmd_verify(const VerifyOptions& options) {
    const auto report = verify_corpus(options);
    for (const auto& f : report.failures) {
        std::cout << "FAIL seed=" << f.seed << ": " << f.what << "\n  reproduce: " << f.reproduce << "\n";
    }
    std::cout << "verify: " << report.passed << " passed, " << report.failed << " failed (" << report.halting
              << " halting) seed=" << options.seed << " count=" << options.count
              << " max-states=" << options.max_states << " fuel=" << options.fuel << "\n";
    return report.ok() ? kExitOk : kExitInput;
}

struct ReduceArgs {
    std::string file;
    std::int64_t fuel = 1'000'000;
    std::int64_t fuel_2cm = 1'000'000;
    std::string out;
    std::string compile_dir;
};

int cmd_reduce_tm(const ReduceArgs& args) {
    const auto tm = minsky::tm_from_json(nlohmann::json::parse(read_text_file(args.file)));
    const auto report = minsky::run_pipeline(tm, {args.fuel, args.fuel, args.fuel, args.fuel_2cm});

    std::cout << std::left << std::setw(11) << "stage" << std::setw(8) << "halted" << std::setw(14) << "steps"
              << "tape\n";
    bool inconclusive = false;
    for (const auto& s : report.stages) {
        std::cout << std::setw(11) << s.stage << std::setw(8) << (s.halted ? "yes" : "no") << std::setw(14) << s.steps
                  << (s.tape ? (s.tape->empty() ? std::string("(empty)") : minsky::render_tape(*s.tape, tm.alphabet))
                             : std::string("-"));
        if (!s.note.empty()) std::cout << "  (" << s.note << ")";
        std::cout << "\n";
        inconclusive = inconclusive || !s.halted;
    }
    std::cout << "program: " << report.tsm.program.size() << " two-stack states, " << report.mcm.program.size()
              << " three-counter states, " << report.program.size() << " two-counter states\n";

    if (!report.agree) {
        std::cout << "stage disagreement at " << report.diverging_stage << "\n";
        return kExitInput;
    }
    const auto out = args.out.empty() ? stem_of(args.file) + ".2cm" : args.out;
    write_file(out, render_dsl(report.program));
    std::cout << "wrote " << out << "\n";
    if (!args.compile_dir.empty()) {
        CompileArgs c;
        c.approach = "all";
        c.out_dir = args.compile_dir;
        c.name = stem_of(out);
        for (const auto& path : compile_program(report.program, c)) std::cout << path.string() << "\n";
    }
    if (inconclusive) {
        std::cout << "stages agree where they halted; some stage ran out of fuel\n";
        return kExitFuel;
    }
    const auto& final_stage = report.stages.back();
    const auto decoded = minsky::decode_counters(run(report.program, args.fuel_2cm).final, report.mcm.counters);
    std::cout << "stages agree; decoded counters";
    for (std::size_t i = 0; i < decoded.size(); ++i) std::cout << " c" << i + 1 << "=" << decoded[i];
    std::cout << " after " << final_stage.steps << " two-counter steps\n";
    return kExitOk;
}

int cmd_live(const std::string& file, const std::string& approach, std::int64_t max_path) {
    const auto program = load_program_file(file);
    const auto settings = live::LiveSettings::from_environment();
    if (!settings) {
        std::cout << "live: skipped (set CYPHER_URI, CYPHER_USER and CYPHER_PASSWORD to enable)\n";
        return kExitOk;
    }
    const auto outcome = live::live_check(program, approach, *settings, max_path);
    std::cout << (outcome.exit_code == live::kExitMatch ? "match: " : "") << outcome.report << "\n";
    return outcome.exit_code;
}

int cmd_convert(const std::string& file, const std::string& to) {
    const auto program = load_program_file(file);
    if (to == "json") {
        std::cout << to_program_document(program).dump(2) << "\n";
    } else {
        std::cout << render_dsl(program);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Counter machines to Cypher 25: run, compile, evaluate, verify"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Run a .2cm or .json program and print its trace");
    run_cmd->add_option("program", run_args.file, "Program file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--fuel", run_args.fuel, "Maximum machine steps")->check(CLI::NonNegativeNumber);
    run_cmd->add_flag("--no-trace", run_args.no_trace, "Print only the summary line");
    run_cmd->add_flag("--ascii", run_args.ascii, "Render arrows as ->");
    run_cmd->add_option("--trace-cap", run_args.trace_cap, "Maximum trace rows kept");

    CompileArgs compile_args;
    auto* compile_cmd = app.add_subcommand("compile", "Generate Cypher files for a program");
    compile_cmd->add_option("program", compile_args.file, "Program file")->required()->check(CLI::ExistingFile);
    compile_cmd->add_option("--approach", compile_args.approach, "reduce, tx, qpp or all")
        ->check(CLI::IsMember({"reduce", "tx", "qpp", "all"}));
    compile_cmd->add_option("--out-dir", compile_args.out_dir, "Output directory");
    compile_cmd->add_option("--name", compile_args.name, "Output file stem (default: program file stem)");
    compile_cmd->add_option("--max-steps", compile_args.max_steps, "reduce() iteration bound")
        ->check(CLI::PositiveNumber);
    compile_cmd->add_option("--max-path", compile_args.max_path, "QPP quantifier upper bound")
        ->check(CLI::NonNegativeNumber);
    compile_cmd->add_flag("--param-mode", compile_args.param_mode, "Use $program in the IN TRANSACTIONS stepper");

    std::string eval_file, params_file;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a LET ... RETURN query in-process");
    eval_cmd->add_option("query", eval_file, "Query file")->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--params", params_file, "JSON parameter document")->check(CLI::ExistingFile);

    VerifyOptions verify_options;
    auto* verify_cmd = app.add_subcommand("verify", "Differential check over random programs");
    verify_cmd->add_option("--seed", verify_options.seed, "Corpus seed");
    verify_cmd->add_option("--count", verify_options.count, "Number of random programs")
        ->check(CLI::NonNegativeNumber);
    verify_cmd->add_option("--max-states", verify_options.max_states, "Maximum program size")
        ->check(CLI::PositiveNumber);
    verify_cmd->add_option("--fuel", verify_options.fuel, "Steps per program")->check(CLI::NonNegativeNumber);
    verify_cmd->add_flag("--include-example", verify_options.include_example, "Add the four-state example program");

    ReduceArgs reduce_args;
    auto* reduce_cmd = app.add_subcommand("reduce-tm", "Compile a TM fixture down to a two-counter program");
    reduce_cmd->add_option("tm", reduce_args.file, "TM fixture (JSON)")->required()->check(CLI::ExistingFile);
    reduce_cmd->add_option("--fuel", reduce_args.fuel, "Fuel for the TM, two-stack and three-counter stages");
    reduce_cmd->add_option("--fuel-2cm", reduce_args.fuel_2cm, "Fuel for the two-counter stage");
    reduce_cmd->add_option("--out", reduce_args.out, "Output .2cm path");
    reduce_cmd->add_option("--compile-dir", reduce_args.compile_dir, "Also emit all Cypher files here");

    std::string live_file, live_approach = "tx";
    std::int64_t live_max_path = kDefaultMaxPath;
    auto* live_cmd = app.add_subcommand("live", "Execute generated scripts on a live server and compare");
    live_cmd->add_option("program", live_file, "Program file")->required()->check(CLI::ExistingFile);
    live_cmd->add_option("--approach", live_approach, "tx or qpp")->check(CLI::IsMember({"tx", "qpp"}));
    live_cmd->add_option("--max-path", live_max_path, "QPP quantifier upper bound");

    std::string convert_file, convert_to = "json";
    auto* convert_cmd = app.add_subcommand("convert", "Print a program as a JSON document or DSL text");
    convert_cmd->add_option("program", convert_file, "Program file")->required()->check(CLI::ExistingFile);
    convert_cmd->add_option("--to", convert_to, "json or 2cm")->check(CLI::IsMember({"json", "2cm"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*run_cmd) return cmd_run(run_args);
        if (*compile_cmd) return cmd_compile(compile_args);
        if (*eval_cmd) return cmd_eval(eval_file, params_file);
        if (*verify_cmd) return cmd_verify(verify_options);
        if (*reduce_cmd) return cmd_reduce_tm(reduce_args);
        if (*live_cmd) return cmd_live(live_file, live_approach, live_max_path);
        if (*convert_cmd) return cmd_convert(convert_file, convert_to);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
