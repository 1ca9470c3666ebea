// strategy.hpp -- from memoryless strategies to executable operators, exact
// verification of machines against the specification automaton, and the
// fixed-point cross-play that refutes exactly one of two competing claims.
#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "upsynth/arena.hpp"
#include "upsynth/automata.hpp"
#include "upsynth/errors.hpp"
#include "upsynth/graph.hpp"
#include "upsynth/machine.hpp"
#include "upsynth/predicate.hpp"
#include "upsynth/solver.hpp"

namespace upsynth {

// Player II's memoryless strategy as a causal operator: states are the
// I-vertices of II's region; reading the adversary bit a at (q,i) emits the
// strategy's choice at (q,a,i) and moves along that edge.
inline CMachine strategy_to_cmachine(const ParityGame& g, const Solution& s) {
    if (s.winner[std::size_t(g.initial)] != Player::II)
        throw Error("strategy_to_cmachine: initial vertex is not won by Player II");
    CMachine m(0);
    std::map<int, int> ids; // arena vertex -> machine state
    std::vector<int> order;
    auto intern = [&](int v) {
        auto it = ids.find(v);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(order.size());
        ids.emplace(v, id);
        order.push_back(v);
        return id;
    };
    intern(g.initial);
    for (std::size_t at = 0; at < order.size(); ++at) {
        int v = order[at];
        m.trans.push_back({0, 0});
        m.out.push_back({0, 0});
        for (int a = 0; a < 2; ++a) {
            int v2 = g.verts[std::size_t(v)].succ[a];
            int b = s.strategy[std::size_t(v2)];
            if (b < 0)
                throw Error("strategy_to_cmachine: strategy undefined at " + g.vertex_name(v2));
            int v1 = g.verts[std::size_t(v2)].succ[b];
            m.out[at][std::size_t(a)] = static_cast<std::uint8_t>(b);
            m.trans[at][std::size_t(a)] = intern(v1);
        }
    }
    m.num_states = static_cast<int>(order.size());
    m.initial = 0;
    return minimize(m);
}

// Player I's memoryless strategy as a strongly causal operator: the output at
// (q,i) is I's edge choice; the transition consumes the adversary's Y bit.
inline SCMachine strategy_to_scmachine(const ParityGame& g, const Solution& s) {
    if (s.winner[std::size_t(g.initial)] != Player::I)
        throw Error("strategy_to_scmachine: initial vertex is not won by Player I");
    SCMachine m(0);
    std::map<int, int> ids;
    std::vector<int> order;
    auto intern = [&](int v) {
        auto it = ids.find(v);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(order.size());
        ids.emplace(v, id);
        order.push_back(v);
        return id;
    };
    intern(g.initial);
    for (std::size_t at = 0; at < order.size(); ++at) {
        int v = order[at];
        int a = s.strategy[std::size_t(v)];
        if (a < 0) throw Error("strategy_to_scmachine: strategy undefined at " + g.vertex_name(v));
        int v2 = g.verts[std::size_t(v)].succ[a];
        m.out.push_back(static_cast<std::uint8_t>(a));
        m.trans.push_back({0, 0});
        for (int b = 0; b < 2; ++b) m.trans.back()[std::size_t(b)] = intern(g.verts[std::size_t(v2)].succ[b]);
    }
    m.num_states = static_cast<int>(order.size());
    m.initial = 0;
    return minimize(m);
}

// Exact universal check of a machine against the specification automaton:
// build the product of machine, automaton and phase structure with the
// adversary bit left as branching, and require every reachable cycle's
// minimal color to have the parity owed to `side`. No sampling.
inline bool verify_machine_against_dpa(const CMachine& m, const DPA& spec, const UPPredicate& pred) {
    if (spec.width != 3) throw WidthError("verify_machine_against_dpa: spec must have width 3");
    UPPredicate p = canonicalize(pred);
    int phases = static_cast<int>(p.prefix.size() + p.period.size());
    auto succ_phase = [&](int i) {
        return i + 1 < phases ? i + 1 : static_cast<int>(p.prefix.size());
    };
    std::map<std::tuple<int, int, int>, int> ids;
    std::vector<std::tuple<int, int, int>> nodes;
    auto intern = [&](int ms, int q, int ph) {
        auto key = std::make_tuple(ms, q, ph);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(nodes.size());
        ids.emplace(key, id);
        nodes.push_back(key);
        return id;
    };
    intern(m.initial, spec.initial, 0);
    std::vector<std::vector<int>> adj;
    for (std::size_t at = 0; at < nodes.size(); ++at) {
        auto [ms, q, ph] = nodes[at];
        adj.emplace_back();
        int c = p.bit_at(std::size_t(ph));
        for (int a = 0; a < 2; ++a) { // adversary's X bit
            int y = m.output(ms, a);
            Letter letter = static_cast<Letter>(a) | (static_cast<Letter>(y) << 1) |
                            (static_cast<Letter>(c) << 2);
            adj[at].push_back(intern(m.step(ms, a), spec.step(q, letter), succ_phase(ph)));
        }
    }
    std::vector<int> color(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) color[i] = spec.color[std::size_t(std::get<1>(nodes[i]))];
    // Player II needs every cycle even: reject if any odd-min cycle exists
    return !has_cycle_with_min_parity(static_cast<int>(nodes.size()), adj, color, 1);
}

inline bool verify_machine_against_dpa(const SCMachine& m, const DPA& spec,
                                       const UPPredicate& pred) {
    if (spec.width != 3) throw WidthError("verify_machine_against_dpa: spec must have width 3");
    UPPredicate p = canonicalize(pred);
    int phases = static_cast<int>(p.prefix.size() + p.period.size());
    auto succ_phase = [&](int i) {
        return i + 1 < phases ? i + 1 : static_cast<int>(p.prefix.size());
    };
    std::map<std::tuple<int, int, int>, int> ids;
    std::vector<std::tuple<int, int, int>> nodes;
    auto intern = [&](int ms, int q, int ph) {
        auto key = std::make_tuple(ms, q, ph);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(nodes.size());
        ids.emplace(key, id);
        nodes.push_back(key);
        return id;
    };
    intern(m.initial, spec.initial, 0);
    std::vector<std::vector<int>> adj;
    for (std::size_t at = 0; at < nodes.size(); ++at) {
        auto [ms, q, ph] = nodes[at];
        adj.emplace_back();
        int c = p.bit_at(std::size_t(ph));
        int x = m.output(ms);
        for (int b = 0; b < 2; ++b) { // adversary's Y bit
            Letter letter = static_cast<Letter>(x) | (static_cast<Letter>(b) << 1) |
                            (static_cast<Letter>(c) << 2);
            adj[at].push_back(intern(m.step(ms, b), spec.step(q, letter), succ_phase(ph)));
        }
    }
    std::vector<int> color(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) color[i] = spec.color[std::size_t(std::get<1>(nodes[i]))];
    // Player I needs every cycle odd: reject if any even-min cycle exists
    return !has_cycle_with_min_parity(static_cast<int>(nodes.size()), adj, color, 0);
}

// Fixed-point confrontation of two claims. f claims that spec holds on
// (X, f(X), P) for every X; g claims it fails on (g(Y), Y, P) for every Y.
// Composing H = g after f and taking the fixed point X0 = H(X0) yields a
// single run on which exactly one claim collapses.
struct CrossPlayReport {
    Player refuted;
    bool spec_holds;
    Lasso x0, y0;
};

inline CrossPlayReport cross_play(const CMachine& f, const SCMachine& g, const DPA& spec,
                                  const UPPredicate& pred) {
    if (spec.width != 3) throw WidthError("cross_play: spec must have width 3");
    SCMachine h = compose_sc_after_c(g, f);
    Lasso x0 = sc_fixed_point(h);
    Lasso y0 = run_on_lasso(f, x0);
    Lasso word = zip_lassos({x0, y0, canonicalize(pred).to_lasso()});
    bool holds = dpa_accepts_lasso(spec, word);
    return CrossPlayReport{holds ? Player::I : Player::II, holds, x0, y0};
}

} // namespace upsynth
