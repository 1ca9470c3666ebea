// arena.hpp -- finite quotient of the parameterized game arena.
//
// The unquotiented arena has vertex set Q x Nat; the transition relation and
// the parameter bit depend on the time point n only through the phase of n in
// the prefix/period structure of P, so quotienting Nat by phases preserves
// plays and their color sequences.
#pragma once

#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "upsynth/automata.hpp"
#include "upsynth/errors.hpp"
#include "upsynth/predicate.hpp"

namespace upsynth {

enum class Player { I, II };

inline Player opponent(Player p) { return p == Player::I ? Player::II : Player::I; }
inline const char* player_name(Player p) { return p == Player::I ? "I" : "II"; }

// Bipartite parity game with out-degree exactly 2 and edge labels {0,1}.
// Player I owns the (q, phase) vertices and picks the X bit; Player II owns
// the (q, xbit, phase) vertices and picks the Y bit.
struct ParityGame {
    struct Vertex {
        Player owner;
        int q;       // automaton state
        int phase;   // position class in [0, prefix+period)
        int xbit;    // chosen X bit at II-vertices; -1 at I-vertices
        int color;
        int succ[2]; // edge labels 0 and 1
    };

    std::vector<Vertex> verts;
    int initial = 0;
    int prefix_len = 0;
    int phase_count = 1;

    int size() const { return static_cast<int>(verts.size()); }

    int succ_phase(int i) const { return i + 1 < phase_count ? i + 1 : prefix_len; }

    std::vector<std::vector<int>> adjacency() const {
        std::vector<std::vector<int>> adj(verts.size());
        for (std::size_t v = 0; v < verts.size(); ++v) {
            adj[v].push_back(verts[v].succ[0]);
            if (verts[v].succ[1] != verts[v].succ[0]) adj[v].push_back(verts[v].succ[1]);
        }
        return adj;
    }

    std::vector<int> colors() const {
        std::vector<int> c(verts.size());
        for (std::size_t v = 0; v < verts.size(); ++v) c[v] = verts[v].color;
        return c;
    }

    std::string vertex_name(int v) const {
        const Vertex& x = verts[std::size_t(v)];
        std::ostringstream os;
        if (x.owner == Player::I)
            os << "V1(" << x.q << "," << x.phase << ")";
        else
            os << "V2(" << x.q << "," << x.xbit << "," << x.phase << ")";
        return os.str();
    }
};

// Only vertices reachable from (q_init, 0) are kept.
inline ParityGame build_arena(const DPA& a, const UPPredicate& pred) {
    if (a.width != 3)
        throw WidthError("build_arena: expected a width-3 automaton over (X,Y,P) tracks");
    UPPredicate p = canonicalize(pred);
    int prefix_len = static_cast<int>(p.prefix.size());
    int phases = prefix_len + static_cast<int>(p.period.size());

    ParityGame g;
    g.prefix_len = prefix_len;
    g.phase_count = phases;

    // vertex interning: key = (q, phase) for I, (q, xbit, phase) for II
    std::map<std::tuple<int, int, int>, int> ids; // (q, phase, xbit or -1)
    std::vector<std::tuple<int, int, int>> todo;
    auto intern = [&](int q, int phase, int xbit) {
        auto key = std::make_tuple(q, phase, xbit);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(g.verts.size());
        ids.emplace(key, id);
        ParityGame::Vertex v;
        v.owner = xbit < 0 ? Player::I : Player::II;
        v.q = q;
        v.phase = phase;
        v.xbit = xbit;
        v.color = a.color[std::size_t(q)];
        v.succ[0] = v.succ[1] = -1;
        g.verts.push_back(v);
        todo.push_back(key);
        return id;
    };

    g.initial = intern(a.initial, 0, -1);
    for (std::size_t at = 0; at < todo.size(); ++at) {
        auto [q, phase, xbit] = todo[at];
        int id = ids[todo[at]];
        if (xbit < 0) {
            for (int b = 0; b < 2; ++b) g.verts[std::size_t(id)].succ[b] = intern(q, phase, b);
        } else {
            int c = p.bit_at(std::size_t(phase));
            for (int b = 0; b < 2; ++b) {
                Letter letter = static_cast<Letter>(xbit) | (static_cast<Letter>(b) << 1) |
                                (static_cast<Letter>(c) << 2);
                int qb = a.step(q, letter);
                g.verts[std::size_t(id)].succ[b] = intern(qb, g.succ_phase(phase), -1);
            }
        }
    }
    return g;
}

inline std::string arena_to_dot(const ParityGame& g, const std::string& name = "arena") {
    std::ostringstream os;
    os << "digraph " << name << " {\n  rankdir=LR;\n";
    os << "  __init [shape=point];\n  __init -> v" << g.initial << ";\n";
    for (int v = 0; v < g.size(); ++v) {
        const auto& x = g.verts[std::size_t(v)];
        os << "  v" << v << " [shape=" << (x.owner == Player::I ? "diamond" : "box")
           << ",label=\"" << g.vertex_name(v) << " c" << x.color << "\"];\n";
    }
    for (int v = 0; v < g.size(); ++v)
        for (int b = 0; b < 2; ++b)
            os << "  v" << v << " -> v" << g.verts[std::size_t(v)].succ[b] << " [label=\"" << b
               << "\"];\n";
    os << "}\n";
    return os.str();
}

} // namespace upsynth
