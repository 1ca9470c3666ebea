// upsynth -- Church synthesis for MLO specifications with ultimately periodic
// parameters: solve the induced parity game, emit the winner's machine, check
// parameter sentences, simulate machines, and print definability formulas.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "upsynth/definability.hpp"
#include "upsynth/upsynth.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw upsynth::Error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw upsynth::Error("cannot write '" + path + "'");
    out << content;
}

std::string stem_of(const std::string& path) {
    auto slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
}

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_expectation = 3;

int run_synth(const std::string& spec_path, const std::string& out_dir,
              const std::string& expect, bool dot) {
    using namespace upsynth;
    SpecFile spec = SpecFile::parse(read_file(spec_path));
    SynthResult res = synthesize(spec);
    std::cout << res.report;

    std::string stem = out_dir + "/" + stem_of(spec_path);
    if (res.cmachine) {
        write_file(stem + ".machine.txt", to_table(*res.cmachine));
        if (dot) write_file(stem + ".machine.dot", to_dot(*res.cmachine));
    } else {
        write_file(stem + ".machine.txt", to_table(*res.scmachine));
        if (dot) write_file(stem + ".machine.dot", to_dot(*res.scmachine));
    }
    if (dot) write_file(stem + ".arena.dot", arena_to_dot(res.arena));
    std::cout << "machine table: " << stem << ".machine.txt\n";

    if (!expect.empty()) {
        Player want = expect == "I" ? Player::I : Player::II;
        if (want != res.winner) {
            std::cout << "expectation failed: wanted winner " << expect << "\n";
            return exit_expectation;
        }
    }
    return exit_ok;
}

int run_check(const std::string& path, const std::string& expect) {
    using namespace upsynth;
    SpecFile spec = SpecFile::parse(read_file(path), /*require_roles=*/false);
    Compiler compiler;
    bool result = compiler.model_check(spec.formula, spec.params);
    std::cout << "result: " << (result ? "true" : "false") << "\n";
    if (!expect.empty()) {
        bool want = expect == "true";
        if (want != result) {
            std::cout << "expectation failed: wanted " << expect << "\n";
            return exit_expectation;
        }
    }
    return exit_ok;
}

int run_simulate(const std::string& machine_path, const std::string& input_lit, int steps) {
    using namespace upsynth;
    std::string text = read_file(machine_path);
    UPPredicate input = UPPredicate::parse(input_lit);
    Lasso in_lasso = input.to_lasso();

    Lasso out_lasso;
    std::ostringstream trace;
    if (text.rfind("cmachine", 0) == 0) {
        CMachine m = cmachine_from_table(text);
        int q = m.initial;
        for (int t = 0; t < steps; ++t) {
            int a = input.bit_at(std::size_t(t));
            trace << t << " in " << a << " out " << m.output(q, a) << "\n";
            q = m.step(q, a);
        }
        out_lasso = run_on_lasso(m, in_lasso);
    } else {
        SCMachine m = scmachine_from_table(text);
        int q = m.initial;
        for (int t = 0; t < steps; ++t) {
            int a = input.bit_at(std::size_t(t));
            trace << t << " out " << m.output(q) << " in " << a << "\n";
            q = m.step(q, a);
        }
        out_lasso = run_on_lasso(m, in_lasso);
    }
    std::cout << trace.str();
    std::cout << "output lasso: " << UPPredicate::from_lasso(out_lasso).literal() << "\n";
    return exit_ok;
}

int run_emit(const std::string& spec_path, const std::string& what) {
    using namespace upsynth;
    SpecFile spec = SpecFile::parse(read_file(spec_path));
    Compiler compiler;
    auto used = spec.used_params();
    std::string param = used.empty() ? "P" : used[0].first;

    if (what == "win") {
        Formula win = emit_win_sentence(spec.formula, spec.input_var, spec.output_var, param,
                                        compiler);
        std::cout << to_text(win) << "\n";
        return exit_ok;
    }
    if (what == "strategy") {
        if (used.empty()) throw Error("emit-formula strategy: spec binds no parameter; add one");
        StrategyFormula st = emit_strategy_formula(spec.formula, spec.input_var, spec.output_var,
                                                   param, used[0].second, compiler);
        std::cout << "winner: " << player_name(st.winner) << "\n";
        std::cout << to_text(st.emitted) << "\n";
        return exit_ok;
    }
    if (what == "winst-i" || what == "winst-ii") {
        NameGen gen;
        gen.avoid(spec.formula);
        std::string z = gen.fresh("Zp");
        Formula phi2 = substitute_param(spec.formula, param, z);
        DPA a = compiler.compile(
            phi2, TrackAssignment::of({{spec.input_var, VarKind::second_order},
                                       {spec.output_var, VarKind::second_order},
                                       {z, VarKind::second_order}}));
        std::cout << to_text(emit_winst(a, what == "winst-i" ? Player::I : Player::II, param))
                  << "\n";
        return exit_ok;
    }
    throw Error("emit-formula: unknown kind '" + what + "'");
}

int run_selftest(unsigned seed) {
    using namespace upsynth;
    struct Case {
        const char* name;
        const char* text;
        Player expected;
    };
    const Case cases[] = {
        {"copy", "formula: all t. (in(Y,t) <-> in(X,t))\ninput: X\noutput: Y\n", Player::II},
        {"prediction", "formula: all t. (in(Y,t) <-> in(X,t+1))\ninput: X\noutput: Y\n",
         Player::I},
        {"psi-beta-on",
         "formula: ((ex t. in(P,t)) -> Y = {0}) & (~(ex t. in(P,t)) -> X = {})\n"
         "input: X\noutput: Y\nparam P = 1;0\n",
         Player::II},
        {"psi-beta-off",
         "formula: ((ex t. in(P,t)) -> Y = {0}) & (~(ex t. in(P,t)) -> X = {})\n"
         "input: X\noutput: Y\nparam P = ;0\n",
         Player::I},
    };
    bool ok = true;
    for (const Case& c : cases) {
        SynthResult r = synthesize(SpecFile::parse(c.text));
        bool pass = r.winner == c.expected && r.verified;
        std::cout << (pass ? "pass" : "FAIL") << " " << c.name << " (winner "
                  << player_name(r.winner) << ")\n";
        ok = ok && pass;
    }
    // random cross-play sanity on small machine pairs
    std::mt19937_64 rng(seed);
    SpecFile copy = SpecFile::parse(cases[0].text);
    SynthResult r = synthesize(copy);
    for (int i = 0; i < 10; ++i) {
        SCMachine g(2);
        for (int q = 0; q < 2; ++q) {
            g.out[std::size_t(q)] = rng() & 1;
            for (int b = 0; b < 2; ++b) g.trans[std::size_t(q)][std::size_t(b)] = rng() & 1;
        }
        CrossPlayReport rep = cross_play(*r.cmachine, g, r.spec_dpa, r.param);
        if (rep.refuted != Player::I) {
            std::cout << "FAIL cross-play round " << i << "\n";
            ok = false;
        }
    }
    std::cout << (ok ? "selftest passed" : "selftest FAILED") << "\n";
    return ok ? exit_ok : exit_error;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Church synthesis for MLO specifications with ultimately periodic parameters"};
    app.require_subcommand(1);

    std::string spec_path, out_dir = ".", expect, machine_path, input_lit = ";0",
                what = "win";
    int steps = 10;
    unsigned seed = 1;
    bool dot = false;

    auto* synth = app.add_subcommand("synth", "solve a spec and write the winner's machine");
    synth->add_option("spec", spec_path, "spec file")->required();
    synth->add_option("--out-dir", out_dir, "output directory");
    synth->add_option("--expect", expect, "expected winner (I or II) for CI")
        ->check(CLI::IsMember({"I", "II"}));
    synth->add_flag("--dot", dot, "also write DOT renderings");

    auto* check = app.add_subcommand("check", "model-check a parameter sentence");
    check->add_option("file", spec_path, "file with formula: and param lines")->required();
    check->add_option("--expect", expect, "expected verdict for CI")
        ->check(CLI::IsMember({"true", "false"}));

    auto* sim = app.add_subcommand("simulate", "run a machine table on an input lasso");
    sim->add_option("machine", machine_path, "machine table file")->required();
    sim->add_option("--input", input_lit, "input lasso literal u;v");
    sim->add_option("--steps", steps, "trace length");

    auto* emit = app.add_subcommand("emit-formula", "print definability formulas");
    emit->add_option("spec", spec_path, "spec file")->required();
    emit->add_option("--what", what, "win | strategy | winst-i | winst-ii")
        ->check(CLI::IsMember({"win", "strategy", "winst-i", "winst-ii"}));

    auto* self = app.add_subcommand("selftest", "run the built-in sanity suite");
    self->add_option("--seed", seed, "random seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(synth)) return run_synth(spec_path, out_dir, expect, dot);
        if (app.got_subcommand(check)) return run_check(spec_path, expect);
        if (app.got_subcommand(sim)) return run_simulate(machine_path, input_lit, steps);
        if (app.got_subcommand(emit)) return run_emit(spec_path, what);
        if (app.got_subcommand(self)) return run_selftest(seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_error;
    }
    return exit_error;
}
