// Machines and strategies: execution on lassos, fixed points, composition,
// strategy extraction, exact verification with mutation sensitivity, and the
// cross-play refutation argument.
#include <catch2/catch_amalgamated.hpp>

#include "upsynth/compiler.hpp"
#include "upsynth/machine.hpp"
#include "upsynth/specfile.hpp"
#include "upsynth/strategy.hpp"
#include "upsynth/synth.hpp"

#include "corpus.hpp"
#include "helpers.hpp"

using namespace upsynth;
using namespace upsynth::test;

namespace {

CMachine copy_machine() {
    CMachine m(1);
    m.out[0] = {0, 1};
    return m;
}

SCMachine delay_machine() {
    // y(t) = x(t-1), y(0) = 0
    SCMachine m(2);
    m.initial = 0;
    m.out = {0, 1};
    m.trans[0] = {0, 1};
    m.trans[1] = {0, 1};
    return m;
}

} // namespace

TEST_CASE("run on lasso") {
    CHECK(lasso_same_word(run_on_lasso(copy_machine(), Lasso(1, {1}, {0})), Lasso(1, {1}, {0})));
    SCMachine zero(1);
    CHECK(lasso_same_word(run_on_lasso(zero, Lasso(1, {1, 1}, {0, 1})), Lasso(1, {}, {0})));
    CHECK(lasso_same_word(run_on_lasso(delay_machine(), Lasso(1, {}, {1, 0})),
                          Lasso(1, {0}, {1, 0})));
    SECTION("phase stability under unrolling") {
        Rng rng(601);
        for (int i = 0; i < 40; ++i) {
            CMachine m = random_cmachine(rng, 4);
            Lasso w = random_lasso(rng, 1);
            Lasso a = run_on_lasso(m, w);
            Lasso b = run_on_lasso(m, w.unrolled(2));
            REQUIRE(lasso_same_word(a, b));
        }
    }
}

TEST_CASE("strongly causal fixed points") {
    SCMachine zero(1);
    CHECK(lasso_same_word(sc_fixed_point(zero), Lasso(1, {}, {0})));
    SECTION("negate-previous with first output 1") {
        SCMachine m(2);
        m.initial = 1; // out 1 first
        m.out = {0, 1};
        // next output = negation of the input just read
        m.trans[0] = {1, 0};
        m.trans[1] = {1, 0};
        Lasso fp = sc_fixed_point(m);
        CHECK(lasso_same_word(fp, Lasso(1, {}, {1, 0})));
        CHECK(lasso_same_word(run_on_lasso(m, fp), fp));
    }
    SECTION("defining property on random machines") {
        Rng rng(611);
        for (int i = 0; i < 50; ++i) {
            SCMachine m = random_scmachine(rng, 4);
            Lasso fp = sc_fixed_point(m);
            REQUIRE(lasso_same_word(run_on_lasso(m, fp), fp));
        }
    }
}

TEST_CASE("machine minimization and tables") {
    SECTION("copy machine collapses to one state") {
        CMachine m(3);
        for (int q = 0; q < 3; ++q) {
            m.out[std::size_t(q)] = {0, 1};
            m.trans[std::size_t(q)] = {(q + 1) % 3, (q + 2) % 3};
        }
        CMachine mm = minimize(m);
        CHECK(mm.num_states == 1);
    }
    SECTION("minimization preserves behaviour") {
        Rng rng(621);
        for (int i = 0; i < 30; ++i) {
            CMachine m = random_cmachine(rng, 5);
            CMachine mm = minimize(m);
            CHECK(mm.num_states <= m.num_states);
            for (const Lasso& w : sample_lassos(622 + unsigned(i), 1, 10))
                REQUIRE(lasso_same_word(run_on_lasso(m, w), run_on_lasso(mm, w)));
        }
    }
    SECTION("table round trip") {
        Rng rng(623);
        CMachine m = random_cmachine(rng, 4);
        CMachine n = cmachine_from_table(to_table(m));
        CHECK(n.num_states == m.num_states);
        CHECK(n.trans == m.trans);
        CHECK(n.out == m.out);
        SCMachine s = random_scmachine(rng, 4);
        SCMachine s2 = scmachine_from_table(to_table(s));
        CHECK(s2.trans == s.trans);
        CHECK(s2.out == s.out);
        CHECK_THROWS_AS(scmachine_from_table(to_table(m)), ParseError);
        CHECK(to_dot(m).find("digraph") == 0);
        CHECK(to_dot(s).find("digraph") == 0);
    }
}

TEST_CASE("synthesis produces exactly verified machines on the corpus") {
    for (const SpecCase& sc : spec_corpus()) {
        SynthResult r = synthesize(SpecFile::parse(sc.text));
        INFO(sc.name);
        REQUIRE(r.winner == sc.expected);
        REQUIRE(r.verified);
        REQUIRE(r.crossplay_refuted == opponent(r.winner));
    }
}

TEST_CASE("named machines from the corpus behave as derived") {
    SECTION("copy spec machine is the one-state copier") {
        SynthResult r = synthesize(SpecFile::parse(spec_corpus()[0].text));
        REQUIRE(r.cmachine.has_value());
        CHECK(r.cmachine->num_states == 1);
        CHECK(r.cmachine->output(0, 0) == 0);
        CHECK(r.cmachine->output(0, 1) == 1);
    }
    SECTION("psi-beta with nonempty parameter outputs exactly {0}") {
        SynthResult r = synthesize(SpecFile::parse(
            "formula: ((ex t. in(P,t)) -> Y = {0}) & (~(ex t. in(P,t)) -> X = {})\n"
            "input: X\noutput: Y\nparam P = 1;0\n"));
        REQUIRE(r.winner == Player::II);
        for (const Lasso& w : sample_lassos(631, 1, 10)) {
            Lasso out = run_on_lasso(*r.cmachine, w);
            REQUIRE(lasso_same_word(out, Lasso(1, {1}, {0})));
        }
    }
    SECTION("psi-beta with empty parameter: I plays a one into X") {
        SynthResult r = synthesize(SpecFile::parse(
            "formula: ((ex t. in(P,t)) -> Y = {0}) & (~(ex t. in(P,t)) -> X = {})\n"
            "input: X\noutput: Y\nparam P = ;0\n"));
        REQUIRE(r.winner == Player::I);
        for (const Lasso& w : sample_lassos(632, 1, 10)) {
            Lasso x = run_on_lasso(*r.scmachine, w);
            UPPredicate xp = UPPredicate::from_lasso(x);
            bool has_one = xp.prefix.find('1') != std::string::npos ||
                           xp.period.find('1') != std::string::npos;
            REQUIRE(has_one);
        }
    }
    SECTION("prediction spec: extracted operator defeats every copying machine") {
        SynthResult r = synthesize(SpecFile::parse(spec_corpus()[4].text));
        REQUIRE(r.winner == Player::I);
        // x(t+1) = ~y(t) beats the spec: check on the cross-play fixed point
        CrossPlayReport rep = cross_play(copy_machine(), *r.scmachine, r.spec_dpa, r.param);
        CHECK(rep.refuted == Player::II);
    }
}

TEST_CASE("exact verification catches wrong machines") {
    SynthResult copy = synthesize(SpecFile::parse(spec_corpus()[0].text));
    SynthResult pred = synthesize(SpecFile::parse(spec_corpus()[4].text));
    SECTION("copy machine does not satisfy the prediction spec") {
        CHECK_FALSE(verify_machine_against_dpa(copy_machine(), pred.spec_dpa, pred.param));
    }
    SECTION("every output mutation of the copy machine fails verification") {
        for (int a = 0; a < 2; ++a) {
            CMachine m = *copy.cmachine;
            m.out[0][std::size_t(a)] = static_cast<std::uint8_t>(1 - m.out[0][std::size_t(a)]);
            CHECK_FALSE(verify_machine_against_dpa(m, copy.spec_dpa, copy.param));
        }
    }
    SECTION("mutations of the prediction counter-machine are caught or still win") {
        // the initial output bit is genuinely free, so that flip may survive;
        // a flip that survives must still refute every copying attempt
        SCMachine m0 = *pred.scmachine;
        int rejected = 0;
        for (int q = 0; q < m0.num_states; ++q) {
            SCMachine m = m0;
            m.out[std::size_t(q)] = static_cast<std::uint8_t>(1 - m.out[std::size_t(q)]);
            if (!verify_machine_against_dpa(m, pred.spec_dpa, pred.param)) {
                ++rejected;
                continue;
            }
            for (const Lasso& w : sample_lassos(633 + unsigned(q), 1, 20)) {
                Lasso x = run_on_lasso(m, w);
                Lasso word = zip_lassos({x, w, pred.param.to_lasso()});
                REQUIRE_FALSE(dpa_accepts_lasso(pred.spec_dpa, word));
            }
        }
        CHECK(rejected >= 1);
    }
}

TEST_CASE("cross-play refutes exactly one side") {
    SynthResult copy = synthesize(SpecFile::parse(spec_corpus()[0].text));
    SECTION("honest copier always survives") {
        Rng rng(641);
        for (int i = 0; i < 20; ++i) {
            SCMachine g = random_scmachine(rng, 3);
            CrossPlayReport rep = cross_play(*copy.cmachine, g, copy.spec_dpa, copy.param);
            REQUIRE(rep.refuted == Player::I);
            REQUIRE(rep.spec_holds);
        }
    }
    SECTION("random triples refute exactly one side") {
        Rng rng(642);
        for (int i = 0; i < 50; ++i) {
            CMachine f = random_cmachine(rng, 3);
            SCMachine g = random_scmachine(rng, 3);
            DPA spec = random_dpa(rng, 3, 3, 3);
            UPPredicate p = random_up(rng, 1, 2);
            CrossPlayReport rep = cross_play(f, g, spec, p);
            // the verdict on the fixed-point word decides the refuted side
            Lasso word = zip_lassos(
                {rep.x0, rep.y0, canonicalize(p).to_lasso()});
            REQUIRE(dpa_accepts_lasso(spec, word) == rep.spec_holds);
            REQUIRE(rep.refuted == (rep.spec_holds ? Player::I : Player::II));
            // the fixed point is consistent with both machines
            REQUIRE(lasso_same_word(run_on_lasso(f, rep.x0), rep.y0));
            SCMachine h = compose_sc_after_c(g, f);
            REQUIRE(lasso_same_word(run_on_lasso(h, rep.x0), rep.x0));
        }
    }
}

TEST_CASE("strategy extraction on random winnable arenas") {
    Rng rng(651);
    int ii_seen = 0, i_seen = 0;
    for (int i = 0; i < 60 && (ii_seen < 20 || i_seen < 20); ++i) {
        DPA a = random_dpa(rng, 3, 2, 2);
        UPPredicate p = canonicalize(random_up(rng, 1, 2));
        ParityGame g = build_arena(a, p);
        Solution s = solve(g);
        if (s.winner[std::size_t(g.initial)] == Player::II) {
            ++ii_seen;
            CMachine m = strategy_to_cmachine(g, s);
            REQUIRE(verify_machine_against_dpa(m, a, p));
        } else {
            ++i_seen;
            SCMachine m = strategy_to_scmachine(g, s);
            REQUIRE(verify_machine_against_dpa(m, a, p));
        }
    }
    CHECK(ii_seen > 0);
    CHECK(i_seen > 0);
}
