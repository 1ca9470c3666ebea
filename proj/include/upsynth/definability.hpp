// definability.hpp -- emission of the definability artifacts as MLO formulas
// over <Nat, <, P>: the winning-strategy predicates WinSt, the WIN sentence,
// the induced-operator formulas op, and per-parameter strategy formulas.
//
// Strategy encodings follow the per-state convention: a Player I memoryless
// strategy is a tuple of sets (Z_q), one per automaton state; a Player II
// strategy is a tuple (Z_{q,a}) indexed by state and the adversary bit just
// played. Plays are quantified through run tracks in binary coding; the
// parity test follows the "minimal color appearing infinitely often" shape.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "upsynth/arena.hpp"
#include "upsynth/automata.hpp"
#include "upsynth/compiler.hpp"
#include "upsynth/errors.hpp"
#include "upsynth/formula.hpp"
#include "upsynth/predicate.hpp"
#include "upsynth/solver.hpp"
#include "upsynth/strategy.hpp"

namespace upsynth {

namespace detail {

struct RunCoding {
    int k = 1;
    int bits = 0;
    std::vector<std::string> tracks;

    static RunCoding make(int k, NameGen& gen) {
        RunCoding rc;
        rc.k = k;
        rc.bits = 0;
        while ((1 << rc.bits) < k) ++rc.bits;
        for (int j = 0; j < rc.bits; ++j) rc.tracks.push_back(gen.fresh("R"));
        return rc;
    }

    Formula code(int q, const std::string& t) const {
        std::vector<Formula> lits;
        for (int j = 0; j < bits; ++j) {
            Formula l = fml::in(t, tracks[std::size_t(j)]);
            lits.push_back(((q >> j) & 1) ? l : fml::neg(l));
        }
        return fml::conj_all(lits);
    }

    bool needs_valid() const { return (1 << bits) != k; }

    Formula valid(const std::string& t) const {
        std::vector<Formula> cases;
        for (int q = 0; q < k; ++q) cases.push_back(code(q, t));
        return fml::disj_all(cases);
    }
};

inline Formula membership_literal(const std::string& t, const std::string& set, bool value) {
    Formula l = fml::in(t, set);
    return value ? l : fml::neg(l);
}

inline Letter game_letter(int a, int b, int c) {
    return static_cast<Letter>(a) | (static_cast<Letter>(b) << 1) | (static_cast<Letter>(c) << 2);
}

inline std::vector<int> used_colors(const DPA& a) {
    std::vector<int> cs = a.color;
    std::sort(cs.begin(), cs.end());
    cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
    return cs;
}

// minimal color seen infinitely often along the coded run is even
inline Formula even_min_inf(const DPA& a, const RunCoding& rc, NameGen& gen) {
    std::vector<int> colors = used_colors(a);
    auto inf_c = [&](int c) {
        std::string s = gen.fresh("s"), s2 = gen.fresh("s");
        std::vector<Formula> here;
        for (int q = 0; q < a.num_states; ++q)
            if (a.color[std::size_t(q)] == c) here.push_back(rc.code(q, s2));
        return fml::forall_fo(
            s, fml::exists_fo(s2, fml::conj(fml::less(s, s2), fml::disj_all(here))));
    };
    std::vector<Formula> cases;
    for (std::size_t i = 0; i < colors.size(); ++i) {
        if (colors[i] % 2 != 0) continue;
        std::vector<Formula> parts{inf_c(colors[i])};
        for (std::size_t j = 0; j < i; ++j) parts.push_back(fml::neg(inf_c(colors[j])));
        cases.push_back(fml::conj_all(parts));
    }
    return fml::disj_all(cases);
}

} // namespace detail

// Strategy variable names for the two encodings.
inline std::vector<std::string> winst_set_names(const DPA& a, Player player) {
    std::vector<std::string> names;
    if (player == Player::I) {
        for (int q = 0; q < a.num_states; ++q) names.push_back("Z" + std::to_string(q));
    } else {
        for (int q = 0; q < a.num_states; ++q)
            for (int b = 0; b < 2; ++b) names.push_back("Z" + std::to_string(q) + "_" + std::to_string(b));
    }
    return names;
}

// WinSt(Z..., P): the encoded memoryless strategy wins every play of the game
// built from `a` and the parameter interpreting P.
inline Formula emit_winst(const DPA& a, Player player, const std::string& param = "P") {
    if (a.width != 3) throw WidthError("emit_winst: expected a width-3 automaton over (X,Y,P)");
    std::vector<std::string> zs = winst_set_names(a, player);
    NameGen gen;
    gen.avoid(param);
    for (auto& z : zs) gen.avoid(z);

    detail::RunCoding rc = detail::RunCoding::make(a.num_states, gen);
    std::string t = gen.fresh("t"), u = gen.fresh("u");

    std::vector<Formula> run_parts;
    run_parts.push_back(
        fml::forall_fo(t, fml::implies(fml::first(t, gen), rc.code(a.initial, t))));
    if (rc.needs_valid()) run_parts.push_back(fml::forall_fo(t, rc.valid(t)));

    std::vector<Formula> step_clauses;
    for (int q = 0; q < a.num_states; ++q) {
        for (int c = 0; c < 2; ++c) {
            if (player == Player::I) {
                // strategy picks a = [t in Z_q]; the adversary's b branches
                for (int x = 0; x < 2; ++x) {
                    Formula guard = fml::conj_all(
                        {rc.code(q, t), detail::membership_literal(t, zs[std::size_t(q)], x),
                         detail::membership_literal(t, param, c)});
                    std::vector<Formula> succs;
                    for (int b = 0; b < 2; ++b)
                        succs.push_back(rc.code(a.step(q, detail::game_letter(x, b, c)), u));
                    step_clauses.push_back(fml::implies(guard, fml::disj_all(succs)));
                }
            } else {
                // adversary picks a; the strategy answers b = [t in Z_{q,a}]
                Formula guard =
                    fml::conj(rc.code(q, t), detail::membership_literal(t, param, c));
                std::vector<Formula> succs;
                for (int x = 0; x < 2; ++x)
                    for (int b = 0; b < 2; ++b) {
                        Formula w =
                            detail::membership_literal(t, zs[std::size_t(2 * q + x)], b);
                        succs.push_back(
                            fml::conj(w, rc.code(a.step(q, detail::game_letter(x, b, c)), u)));
                    }
                step_clauses.push_back(fml::implies(guard, fml::disj_all(succs)));
            }
        }
    }
    run_parts.push_back(fml::forall_fo(
        t, fml::forall_fo(u, fml::implies(fml::succ_rel(t, u, gen), fml::conj_all(step_clauses)))));

    Formula run = fml::conj_all(run_parts);
    Formula even = detail::even_min_inf(a, rc, gen);
    Formula body = player == Player::I ? fml::implies(run, fml::neg(even))
                                       : fml::implies(run, even);
    for (auto it = rc.tracks.rbegin(); it != rc.tracks.rend(); ++it)
        body = fml::forall_so(*it, body);
    return normalize(body);
}

// WIN sentence: Player II wins the game of phi iff the sentence holds.
// Constructed by replacing the parameter with a fresh variable, compiling to a
// parity automaton, and negating the existence of a winning Player I strategy.
inline Formula emit_win_sentence(const Formula& phi, const std::string& x, const std::string& y,
                                 const std::string& param, const Compiler& compiler) {
    NameGen gen;
    gen.avoid(phi);
    std::string z = gen.fresh("Zp");
    Formula phi2 = substitute_param(phi, param, z);
    DPA a = compiler.compile(
        phi2, TrackAssignment::of({{x, VarKind::second_order},
                                   {y, VarKind::second_order},
                                   {z, VarKind::second_order}}));
    Formula winst = emit_winst(a, Player::I, param);
    std::vector<std::string> zs = winst_set_names(a, Player::I);
    Formula body = winst;
    for (auto it = zs.rbegin(); it != zs.rend(); ++it) body = fml::exists_so(*it, body);
    return normalize(fml::neg(body));
}

// op(X, Y, Z..., P): the operator induced by the encoded strategy maps one
// side to the other -- Y = F_U(X) for Player II, X = F_U(Y) for Player I.
inline Formula emit_op_formula(const DPA& a, Player player, const std::string& x,
                               const std::string& y, const std::string& param = "P") {
    if (a.width != 3)
        throw WidthError("emit_op_formula: expected a width-3 automaton over (X,Y,P)");
    std::vector<std::string> zs = winst_set_names(a, player);
    NameGen gen;
    gen.avoid(param);
    gen.avoid(x);
    gen.avoid(y);
    for (auto& z : zs) gen.avoid(z);

    detail::RunCoding rc = detail::RunCoding::make(a.num_states, gen);
    std::string t = gen.fresh("t"), u = gen.fresh("u");

    std::vector<Formula> parts;
    parts.push_back(fml::forall_fo(t, fml::implies(fml::first(t, gen), rc.code(a.initial, t))));
    if (rc.needs_valid()) parts.push_back(fml::forall_fo(t, rc.valid(t)));

    std::vector<Formula> step_clauses;
    for (int q = 0; q < a.num_states; ++q)
        for (int xb = 0; xb < 2; ++xb)
            for (int yb = 0; yb < 2; ++yb)
                for (int c = 0; c < 2; ++c) {
                    std::vector<Formula> guard{rc.code(q, t),
                                               detail::membership_literal(t, param, c)};
                    if (player == Player::II) {
                        guard.push_back(detail::membership_literal(t, x, xb));
                        guard.push_back(
                            detail::membership_literal(t, zs[std::size_t(2 * q + xb)], yb));
                    } else {
                        guard.push_back(detail::membership_literal(t, zs[std::size_t(q)], xb));
                        guard.push_back(detail::membership_literal(t, y, yb));
                    }
                    step_clauses.push_back(
                        fml::implies(fml::conj_all(guard),
                                     rc.code(a.step(q, detail::game_letter(xb, yb, c)), u)));
                }
    parts.push_back(fml::forall_fo(
        t, fml::forall_fo(u, fml::implies(fml::succ_rel(t, u, gen), fml::conj_all(step_clauses)))));

    // output characterization
    if (player == Player::II) {
        std::vector<Formula> cases;
        for (int q = 0; q < a.num_states; ++q)
            for (int xb = 0; xb < 2; ++xb)
                cases.push_back(fml::conj_all({rc.code(q, t),
                                               detail::membership_literal(t, x, xb),
                                               fml::in(t, zs[std::size_t(2 * q + xb)])}));
        parts.push_back(fml::forall_fo(t, fml::iff(fml::in(t, y), fml::disj_all(cases))));
    } else {
        std::vector<Formula> cases;
        for (int q = 0; q < a.num_states; ++q)
            cases.push_back(fml::conj(rc.code(q, t), fml::in(t, zs[std::size_t(q)])));
        parts.push_back(fml::forall_fo(t, fml::iff(fml::in(t, x), fml::disj_all(cases))));
    }

    Formula body = fml::conj_all(parts);
    for (auto it = rc.tracks.rbegin(); it != rc.tracks.rend(); ++it)
        body = fml::exists_so(*it, body);
    return normalize(body);
}

// A memoryless strategy of `player`, encoded as ultimately periodic subsets of
// Nat in the per-state set convention. Positions whose quotient vertex is
// unreachable or outside the player's region carry 0.
inline std::vector<std::pair<std::string, UPPredicate>> strategy_up_sets(const DPA& a,
                                                                         const ParityGame& g,
                                                                         const Solution& sol,
                                                                         Player player) {
    std::vector<std::string> zs = winst_set_names(a, player);
    std::map<std::tuple<int, int, int>, int> choice; // (q, xbit-or-(-1), phase) -> label
    for (int v = 0; v < g.size(); ++v) {
        const auto& vert = g.verts[std::size_t(v)];
        if (vert.owner == player && sol.strategy[std::size_t(v)] >= 0)
            choice[{vert.q, vert.xbit, vert.phase}] = sol.strategy[std::size_t(v)];
    }
    auto set_for = [&](int q, int xbit) {
        std::string u, v;
        for (int i = 0; i < g.phase_count; ++i) {
            auto it = choice.find({q, xbit, i});
            char bit = it != choice.end() && it->second == 1 ? '1' : '0';
            (i < g.prefix_len ? u : v).push_back(bit);
        }
        if (v.empty()) v = "0";
        return UPPredicate(u, v);
    };
    std::vector<std::pair<std::string, UPPredicate>> out;
    if (player == Player::I) {
        for (int q = 0; q < a.num_states; ++q)
            out.emplace_back(zs[std::size_t(q)], set_for(q, -1));
    } else {
        for (int q = 0; q < a.num_states; ++q)
            for (int xb = 0; xb < 2; ++xb)
                out.emplace_back(zs[std::size_t(2 * q + xb)], set_for(q, xb));
    }
    return out;
}

// Replace membership atoms of the given set names by explicit positional
// membership formulas of concrete ultimately periodic sets.
inline Formula specialize_sets(const Formula& f,
                               const std::map<std::string, UPPredicate>& bindings) {
    NameGen gen;
    gen.avoid(f);
    struct Impl {
        const std::map<std::string, UPPredicate>& bindings;
        NameGen& gen;
        Formula run(const Formula& f) {
            switch (f.kind()) {
            case Formula::Kind::less:
            case Formula::Kind::eq:
                return f;
            case Formula::Kind::in: {
                auto it = bindings.find(f.var_b());
                if (it == bindings.end()) return f;
                return up_membership_formula(it->second, f.var_a(), gen);
            }
            case Formula::Kind::neg:
                return fml::neg(run(f.child()));
            case Formula::Kind::conj:
                return fml::conj(run(f.left()), run(f.right()));
            case Formula::Kind::exists:
                if (f.quantifier_kind() == VarKind::second_order && bindings.count(f.var_a()))
                    return f; // shadowed
                return fml::exists(f.var_a(), f.quantifier_kind(), run(f.child()));
            }
            return f;
        }
    };
    Impl impl{bindings, gen};
    return normalize(impl.run(f));
}

// Strategy formula for the winner of the game of phi under the concrete
// parameter p: existentially quantified per-state strategy sets pinned to the
// solver's winning strategy by their UP definitions, conjoined with the
// induced-operator formula. `grounded` is the equivalent formula with the
// strategy sets substituted away; it is what validation compiles.
struct StrategyFormula {
    Player winner = Player::II;
    Formula emitted;
    Formula grounded;
    std::vector<std::pair<std::string, UPPredicate>> sets;
};

inline StrategyFormula emit_strategy_formula(const Formula& phi, const std::string& x,
                                             const std::string& y, const std::string& param,
                                             const UPPredicate& pred, const Compiler& compiler) {
    NameGen gen;
    gen.avoid(phi);
    std::string z = gen.fresh("Zp");
    Formula phi2 = substitute_param(phi, param, z);
    DPA a = compiler.compile(
        phi2, TrackAssignment::of({{x, VarKind::second_order},
                                   {y, VarKind::second_order},
                                   {z, VarKind::second_order}}));
    UPPredicate p = canonicalize(pred);
    ParityGame game = build_arena(a, p);
    Solution sol = solve(game);
    Player winner = sol.winner[std::size_t(game.initial)];

    StrategyFormula out;
    out.winner = winner;
    out.sets = strategy_up_sets(a, game, sol, winner);
    std::map<std::string, UPPredicate> bindings(out.sets.begin(), out.sets.end());

    Formula op = emit_op_formula(a, winner, x, y, param);
    std::vector<Formula> defs;
    for (auto& [name, w] : out.sets) defs.push_back(up_to_formula(w, name));
    Formula body = fml::conj(fml::conj_all(defs), op);
    for (auto it = out.sets.rbegin(); it != out.sets.rend(); ++it)
        body = fml::exists_so(it->first, body);
    out.emitted = normalize(body);
    out.grounded = specialize_sets(op, bindings);
    return out;
}

} // namespace upsynth
