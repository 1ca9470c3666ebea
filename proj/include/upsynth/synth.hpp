// synth.hpp -- the synthesis pipeline: spec file in, verdict plus verified
// finite-state operator out.
#pragma once

#include <optional>
#include <sstream>
#include <string>

#include "upsynth/arena.hpp"
#include "upsynth/compiler.hpp"
#include "upsynth/machine.hpp"
#include "upsynth/predicate.hpp"
#include "upsynth/solver.hpp"
#include "upsynth/specfile.hpp"
#include "upsynth/strategy.hpp"

namespace upsynth {

struct SynthResult {
    Player winner = Player::II;
    DPA spec_dpa;
    ParityGame arena;
    Solution solution;
    std::optional<CMachine> cmachine;   // present when Player II wins
    std::optional<SCMachine> scmachine; // present when Player I wins
    std::string param_name;
    UPPredicate param;
    bool verified = false;
    Player crossplay_refuted = Player::I;
    std::string report;
};

inline SynthResult synthesize(const SpecFile& spec, CompileOptions opts = {}) {
    if (!spec.has_roles()) throw Error("synthesize: spec must declare input and output roles");
    auto it = spec.options.find("statecap");
    if (it != spec.options.end()) opts.max_dpa_states = std::stoul(it->second);

    auto used = spec.used_params();
    if (used.size() > 1)
        throw Error("synthesize: at most one parameter may be used by the formula");

    SynthResult res;
    if (used.size() == 1) {
        res.param_name = used[0].first;
        res.param = canonicalize(used[0].second);
    } else {
        // parameter-free specification: play on a dummy empty parameter
        NameGen gen;
        gen.avoid(spec.formula);
        gen.avoid(spec.input_var);
        gen.avoid(spec.output_var);
        res.param_name = gen.fresh("P");
        res.param = UPPredicate("", "0");
    }

    Compiler compiler(opts);
    res.spec_dpa = compiler.compile(
        spec.formula, TrackAssignment::of({{spec.input_var, VarKind::second_order},
                                           {spec.output_var, VarKind::second_order},
                                           {res.param_name, VarKind::second_order}}));
    res.arena = build_arena(res.spec_dpa, res.param);
    res.solution = solve(res.arena);
    res.winner = res.solution.winner[std::size_t(res.arena.initial)];

    if (res.winner == Player::II) {
        res.cmachine = strategy_to_cmachine(res.arena, res.solution);
        res.verified = verify_machine_against_dpa(*res.cmachine, res.spec_dpa, res.param);
        SCMachine counter(1); // constant-0 claim for the loser
        res.crossplay_refuted = cross_play(*res.cmachine, counter, res.spec_dpa, res.param).refuted;
    } else {
        res.scmachine = strategy_to_scmachine(res.arena, res.solution);
        res.verified = verify_machine_against_dpa(*res.scmachine, res.spec_dpa, res.param);
        CMachine counter(1);
        res.crossplay_refuted = cross_play(counter, *res.scmachine, res.spec_dpa, res.param).refuted;
    }
    if (!res.verified)
        throw Error("synthesize: synthesized machine failed exact verification; solver bug");
    if (res.crossplay_refuted == res.winner)
        throw Error("synthesize: cross-play refuted the winner; solver bug");

    std::ostringstream os;
    os << "winner: " << player_name(res.winner) << '\n';
    os << "param " << res.param_name << " = " << res.param.literal() << '\n';
    os << "spec dpa states: " << res.spec_dpa.num_states << '\n';
    os << "arena vertices: " << res.arena.size() << '\n';
    if (res.cmachine)
        os << "machine: causal, " << res.cmachine->num_states << " state(s)\n";
    else
        os << "machine: strongly causal, " << res.scmachine->num_states << " state(s)\n";
    os << "verification: exact product check passed\n";
    os << "cross-check: refuted player " << player_name(res.crossplay_refuted) << " claim\n";
    res.report = os.str();
    return res;
}

} // namespace upsynth
