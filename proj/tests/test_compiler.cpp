// Compiler layer: formula-to-automaton soundness on the golden languages,
// boolean/quantifier coherence, model checking, machine graph formulas, UP
// definability, and period extraction.
#include <catch2/catch_amalgamated.hpp>

#include "upsynth/compiler.hpp"
#include "upsynth/determinize.hpp"
#include "upsynth/predicate.hpp"

#include "corpus.hpp"
#include "helpers.hpp"

using namespace upsynth;
using namespace upsynth::test;

namespace {

std::vector<std::vector<UPPredicate>> sample_assignments(unsigned seed, std::size_t vars,
                                                         int count) {
    Rng rng(seed);
    std::vector<std::vector<UPPredicate>> out;
    // fixed edge shapes first
    std::vector<UPPredicate> fixed{UPPredicate("", "0"), UPPredicate("", "1"),
                                   UPPredicate("1", "0"), UPPredicate("", "10"),
                                   UPPredicate("0", "1")};
    for (auto& f : fixed) {
        std::vector<UPPredicate> a(vars, f);
        out.push_back(a);
    }
    while (static_cast<int>(out.size()) < count) {
        std::vector<UPPredicate> a;
        for (std::size_t i = 0; i < vars; ++i) a.push_back(random_up(rng, 2, 2));
        out.push_back(a);
    }
    return out;
}

Lasso assignment_word(const std::vector<UPPredicate>& a) {
    std::vector<Lasso> tracks;
    for (auto& p : a) tracks.push_back(p.to_lasso());
    return zip_lassos(tracks);
}

} // namespace

TEST_CASE("compile matches hand-derived golden languages") {
    Compiler compiler;
    for (const LangCase& lc : lang_corpus()) {
        std::map<std::string, VarKind> decl;
        for (auto& v : lc.vars) decl[v] = VarKind::second_order;
        Formula f = parse_formula(lc.formula_text, decl, true);
        TrackAssignment order;
        for (auto& v : lc.vars) order.order.emplace_back(v, VarKind::second_order);
        DPA dpa = compiler.compile(f, order);
        int idx = 0;
        for (auto& assignment : sample_assignments(300 + unsigned(idx++), lc.vars.size(), 25)) {
            INFO(lc.name);
            REQUIRE(dpa_accepts_lasso(dpa, assignment_word(assignment)) == lc.holds(assignment));
        }
    }
}

TEST_CASE("atomic formula semantics") {
    Compiler compiler;
    // t in X with explicit singleton track for t
    Formula f = parse_formula("in(X,t)");
    DPA dpa = compiler.compile(f); // lexicographic: X track 0, t track 1
    // t = {1}, X = {1}: accept
    CHECK(dpa_accepts_lasso(dpa, Lasso(2, {0b00, 0b11}, {0b00})));
    // t = {1}, X = {0}: reject
    CHECK(dpa_accepts_lasso(dpa, Lasso(2, {0b01, 0b10}, {0b00})) == false);
    // t empty: reject (not a singleton)
    CHECK(dpa_accepts_lasso(dpa, Lasso(2, {}, {0b01})) == false);
    // t with two elements: reject
    CHECK(dpa_accepts_lasso(dpa, Lasso(2, {0b11, 0b11}, {0b00})) == false);
}

TEST_CASE("negation and projection cohere with automaton operations") {
    Compiler compiler;
    const char* texts[] = {
        "all t. (in(X,t) <-> in(Y,t))",
        "ex t. (in(X,t) & in(Y,t))",
        "all t. ex s. (t < s & in(X,s))",
    };
    for (const char* text : texts) {
        Formula f = parse_formula(text);
        TrackAssignment order = TrackAssignment::lexicographic(f);
        DPA pos = compiler.compile(f, order);
        DPA neg = compiler.compile(fml::neg(f), order);
        DPA comp = dpa_complement(pos);
        for (const Lasso& w : sample_lassos(401, order.width(), 25)) {
            INFO(text);
            REQUIRE(dpa_accepts_lasso(neg, w) == dpa_accepts_lasso(comp, w));
        }
        // second-order existential against explicit projection
        FreeVars fv = free_vars(f);
        std::string first_var = *fv.second_order.begin();
        Formula ex = fml::exists_so(first_var, f);
        TrackAssignment sub;
        for (auto& [name, kind] : order.order)
            if (name != first_var) sub.order.emplace_back(name, kind);
        DPA exd = compiler.compile(normalize(ex), sub);
        // project the corresponding track out of the positive automaton
        NBA proj = nba_project(dpa_to_nba(pos), order.track_of(first_var));
        DPA projd = determinize(nba_reduce(proj));
        for (const Lasso& w : sample_lassos(402, sub.width(), 25)) {
            INFO(text);
            REQUIRE(dpa_accepts_lasso(exd, w) == dpa_accepts_lasso(projd, w));
        }
    }
}

TEST_CASE("model check parameter sentences") {
    Compiler compiler;
    UPPredicate p10("1", "0");
    SECTION("simple sentences") {
        CHECK(compiler.model_check(parse_formula("ex t. in(P,t)"), {{"P", p10}}));
        CHECK_FALSE(compiler.model_check(parse_formula("all t. ex s. (t < s & in(P,s))"),
                                         {{"P", p10}}));
        CHECK(compiler.model_check(parse_formula("all t. ex s. (t < s & in(P,s))"),
                                   {{"P", UPPredicate("", "10")}}));
    }
    SECTION("ultimately the period 10") {
        // P is eventually 2-periodic and eventually hits both phases
        Formula f = parse_formula(
            "ex d. all t. (d < t -> (in(P,t) <-> in(P,t+2))) & "
            "(ex t. (d < t & in(P,t))) & (ex t. (d < t & ~in(P,t)))");
        CHECK(compiler.model_check(f, {{"P", UPPredicate("0", "10")}}));
        CHECK_FALSE(compiler.model_check(f, {{"P", UPPredicate("", "1")}}));
        CHECK_FALSE(compiler.model_check(f, {{"P", UPPredicate("", "110")}}));
    }
    SECTION("multiple parameters") {
        Formula f = parse_formula("all t. (in(P,t) -> in(Q,t))");
        CHECK(compiler.model_check(f, {{"P", p10}, {"Q", UPPredicate("", "1")}}));
        CHECK_FALSE(compiler.model_check(f, {{"P", UPPredicate("", "1")}, {"Q", p10}}));
    }
    SECTION("unbound parameter is an error") {
        CHECK_THROWS_AS(compiler.model_check(parse_formula("ex t. in(P,t)"), {}), Error);
    }
}

TEST_CASE("machine graph formulas define the operator") {
    Compiler compiler;
    SECTION("copy machine") {
        CMachine copy(1);
        copy.out[0] = {0, 1};
        Formula f = compiler.machine_to_formula(copy, "X", "Y");
        Formula direct = parse_formula("all t. (in(Y,t) <-> in(X,t))");
        for (auto& a : sample_assignments(411, 2, 10)) {
            bool lhs = compiler.model_check(f, {{"X", a[0]}, {"Y", a[1]}});
            bool rhs = compiler.model_check(direct, {{"X", a[0]}, {"Y", a[1]}});
            REQUIRE(lhs == rhs);
        }
    }
    SECTION("constant zero strongly causal machine") {
        SCMachine zero(1);
        zero.out[0] = 0;
        Formula f = compiler.machine_to_formula(zero, "X", "Y");
        Formula direct = parse_formula("Y = {}", {{"Y", VarKind::second_order}});
        for (auto& a : sample_assignments(412, 2, 10)) {
            bool lhs = compiler.model_check(f, {{"X", a[0]}, {"Y", a[1]}});
            bool rhs = compiler.model_check(direct, {{"Y", a[1]}});
            REQUIRE(lhs == rhs);
        }
    }
    SECTION("delayed echo machine") {
        // output 1 iff the previous input was 1
        SCMachine delay(2);
        delay.initial = 0;
        delay.out = {0, 1};
        delay.trans[0] = {0, 1};
        delay.trans[1] = {0, 1};
        Formula f = compiler.machine_to_formula(delay, "X", "Y");
        Formula direct = parse_formula(
            "all t. all s. (s = t+1 -> (in(Y,s) <-> in(X,t))) & ~(ex t. (~(ex s. s < t) & in(Y,t)))");
        TrackAssignment order = TrackAssignment::lexicographic(direct);
        DPA a = compiler.compile(f, order);
        DPA b = compiler.compile(direct, order);
        for (const Lasso& w : sample_lassos(413, 2, 20))
            REQUIRE(dpa_accepts_lasso(a, w) == dpa_accepts_lasso(b, w));
    }
}

TEST_CASE("up definability formulas") {
    Compiler compiler;
    SECTION("full set") {
        Formula f = up_to_formula(UPPredicate("", "1"), "V");
        CHECK(compiler.model_check(f, {{"V", UPPredicate("", "1")}}));
        CHECK_FALSE(compiler.model_check(f, {{"V", UPPredicate("0", "1")}}));
    }
    SECTION("zero singleton") {
        Formula f = up_to_formula(UPPredicate("1", "0"), "V");
        CHECK(compiler.model_check(f, {{"V", UPPredicate("1", "0")}}));
        CHECK_FALSE(compiler.model_check(f, {{"V", UPPredicate("", "0")}}));
        CHECK_FALSE(compiler.model_check(f, {{"V", UPPredicate("", "1")}}));
        CHECK_FALSE(compiler.model_check(f, {{"V", UPPredicate("11", "0")}}));
    }
    SECTION("even positions, cross-checked against bits") {
        UPPredicate evens("", "10");
        Formula f = up_to_formula(evens, "V");
        Rng rng(421);
        for (int i = 0; i < 25; ++i) {
            UPPredicate cand = random_up(rng, 2, 2);
            bool expected = same_denotation(cand, evens);
            REQUIRE(compiler.model_check(f, {{"V", cand}}) == expected);
        }
    }
    SECTION("uniqueness over small representations") {
        const UPPredicate targets[] = {UPPredicate("1", "0"), UPPredicate("", "10"),
                                       UPPredicate("01", "1"), UPPredicate("", "0")};
        for (const UPPredicate& target : targets) {
            Formula f = up_to_formula(target, "V");
            DPA dpa = compiler.compile(f, TrackAssignment::of({{"V", VarKind::second_order}}));
            for (std::size_t ul = 0; ul <= 4; ++ul)
                for (std::size_t vl = 1; vl <= 4; ++vl)
                    for (unsigned um = 0; um < (1u << ul); ++um)
                        for (unsigned vm = 0; vm < (1u << vl); ++vm) {
                            std::string u, v;
                            for (std::size_t j = 0; j < ul; ++j) u += (um >> j) & 1 ? '1' : '0';
                            for (std::size_t j = 0; j < vl; ++j) v += (vm >> j) & 1 ? '1' : '0';
                            UPPredicate cand(u, v);
                            bool expected = same_denotation(cand, target);
                            bool got = dpa_accepts_lasso(dpa, cand.to_lasso());
                            if (got != expected) {
                                INFO(target.literal());
                                INFO(cand.literal());
                                REQUIRE(got == expected);
                            }
                        }
        }
    }
    SECTION("membership formula agrees with bits") {
        Rng rng(431);
        for (int i = 0; i < 10; ++i) {
            UPPredicate w = random_up(rng, 2, 2);
            NameGen gen;
            Formula member = up_membership_formula(w, "t", gen);
            // evaluate by wrapping: ex t. (pos_n(t) & member)
            for (int n = 0; n < 6; ++n) {
                NameGen g2;
                g2.avoid(member);
                Formula probe = fml::exists_fo(
                    "t", fml::conj(fml::at_position(n, "t", g2), member));
                bool expected = w.bit_at(std::size_t(n)) == 1;
                REQUIRE(compiler.model_check(normalize(probe), {}) == expected);
            }
        }
    }
}

TEST_CASE("period extraction from parameter machines") {
    Formula alpha = alpha_formula("X", "P");
    SECTION("constant one machine") {
        CMachine m(1);
        m.out[0] = {1, 1};
        UPPredicate p = extract_period_from_machine(m, alpha);
        // self-driven from 0: input 0 then all 1s
        CHECK(p.period.size() < 2);
        for (std::size_t n = 1; n < 6; ++n) CHECK(p.bit_at(n) == 1);
    }
    SECTION("two-state alternator") {
        CMachine m(2);
        m.initial = 0;
        m.out[0] = {1, 1};
        m.out[1] = {0, 0};
        m.trans[0] = {1, 1};
        m.trans[1] = {0, 0};
        UPPredicate p = extract_period_from_machine(m, alpha);
        CHECK(p.period.size() == 2);
        CHECK(p.period.size() < 2 * 2);
    }
    SECTION("random machines stay within the period bound and satisfy alpha") {
        Compiler compiler;
        Rng rng(441);
        for (int i = 0; i < 50; ++i) {
            CMachine m = random_cmachine(rng, 6);
            UPPredicate p = extract_period_from_machine(m, alpha);
            CHECK(p.prefix.size() + p.period.size() <= 2 * std::size_t(m.num_states) + 1);
            CHECK(p.period.size() <= 2 * std::size_t(m.num_states));
            // re-check the claim by model checking alpha(X, P) with X = m(P)
            Lasso x = run_on_lasso(m, p.to_lasso());
            bool ok = compiler.model_check(
                alpha, {{"X", UPPredicate::from_lasso(x)}, {"P", p}});
            REQUIRE(ok);
        }
    }
    SECTION("wrong claim shape is rejected") {
        CMachine m(1);
        CHECK_THROWS_AS(
            extract_period_from_machine(m, parse_formula("all t. (in(X,t) <-> in(P,t))")),
            InconsistencyError);
    }
}
