// helpers.hpp -- test-side oracles and random generators. The NBA lasso
// membership test lives here, independent of the determinization path it is
// used to check: it builds the explicit product of the lasso structure with
// the automaton and searches for a reachable accepting cycle.
#pragma once

#include <random>
#include <vector>

#include "upsynth/automata.hpp"
#include "upsynth/graph.hpp"
#include "upsynth/machine.hpp"
#include "upsynth/predicate.hpp"

namespace upsynth::test {

inline bool nba_accepts_lasso(const NBA& a, const Lasso& w) {
    if (a.width != w.width) throw WidthError("nba_accepts_lasso: width mismatch");
    int plen = static_cast<int>(w.prefix.size());
    int clen = static_cast<int>(w.cycle.size());
    int positions = plen + clen;
    auto next_pos = [&](int p) { return p + 1 < positions ? p + 1 : plen; };
    auto letter_at = [&](int p) {
        return p < plen ? w.prefix[std::size_t(p)] : w.cycle[std::size_t(p - plen)];
    };
    int n = a.num_states * positions;
    auto id = [&](int q, int p) { return q * positions + p; };
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
    for (int q = 0; q < a.num_states; ++q)
        for (int p = 0; p < positions; ++p)
            for (int r : a.succ(q, letter_at(p))) adj[std::size_t(id(q, p))].push_back(id(r, next_pos(p)));
    auto reach = reachable_from(n, adj, id(a.initial, 0));
    SccResult scc = strongly_connected_components(n, adj);
    std::vector<int> comp_size(std::size_t(scc.count), 0);
    std::vector<bool> comp_self(std::size_t(scc.count), false);
    for (int v = 0; v < n; ++v) {
        ++comp_size[std::size_t(scc.comp[std::size_t(v)])];
        for (int w2 : adj[std::size_t(v)])
            if (w2 == v) comp_self[std::size_t(scc.comp[std::size_t(v)])] = true;
    }
    for (int q = 0; q < a.num_states; ++q) {
        if (!a.accepting[std::size_t(q)]) continue;
        for (int p = 0; p < positions; ++p) {
            int v = id(q, p);
            if (!reach[std::size_t(v)]) continue;
            int k = scc.comp[std::size_t(v)];
            if (comp_size[std::size_t(k)] > 1 || comp_self[std::size_t(k)]) return true;
        }
    }
    return false;
}

struct Rng {
    std::mt19937_64 engine;
    explicit Rng(unsigned seed) : engine(seed) {}
    int pick(int lo, int hi) { // inclusive
        return static_cast<int>(engine() % static_cast<unsigned long>(hi - lo + 1)) + lo;
    }
    bool coin() { return engine() & 1; }
};

inline Lasso random_lasso(Rng& rng, int width, int max_prefix = 3, int max_cycle = 4) {
    int plen = rng.pick(0, max_prefix);
    int clen = rng.pick(1, max_cycle);
    Letter letters = letter_count_for(width);
    std::vector<Letter> u, v;
    for (int i = 0; i < plen; ++i) u.push_back(static_cast<Letter>(rng.engine() % letters));
    for (int i = 0; i < clen; ++i) v.push_back(static_cast<Letter>(rng.engine() % letters));
    return Lasso(width, u, v);
}

inline std::vector<Lasso> sample_lassos(unsigned seed, int width, int count) {
    Rng rng(seed);
    std::vector<Lasso> out;
    // a few fixed shapes first
    Letter letters = letter_count_for(width);
    out.push_back(Lasso(width, {}, {0}));
    if (letters > 1) {
        out.push_back(Lasso(width, {}, {letters - 1}));
        out.push_back(Lasso(width, {1}, {0}));
        out.push_back(Lasso(width, {}, {0, 1}));
    }
    while (static_cast<int>(out.size()) < count) out.push_back(random_lasso(rng, width));
    out.resize(std::size_t(count), Lasso(width, {}, {0}));
    return out;
}

inline NBA random_nba(Rng& rng, int width, int max_states = 5) {
    int n = rng.pick(1, max_states);
    NBA a(width, n);
    a.initial = 0;
    bool any_acc = false;
    for (int q = 0; q < n; ++q) {
        a.accepting[std::size_t(q)] = rng.coin();
        any_acc = any_acc || a.accepting[std::size_t(q)];
    }
    if (!any_acc) a.accepting[std::size_t(rng.pick(0, n - 1))] = true;
    for (int q = 0; q < n; ++q)
        for (Letter l = 0; l < a.letters(); ++l) {
            int degree = rng.pick(0, 2);
            for (int d = 0; d < degree; ++d) a.add_edge(q, l, rng.pick(0, n - 1));
        }
    return a;
}

inline DPA random_dpa(Rng& rng, int width, int max_states = 4, int max_color = 3) {
    int n = rng.pick(1, max_states);
    DPA a(width, n);
    a.initial = 0;
    for (int q = 0; q < n; ++q) {
        a.color[std::size_t(q)] = rng.pick(0, max_color);
        for (Letter l = 0; l < a.letters(); ++l) a.set_step(q, l, rng.pick(0, n - 1));
    }
    return a;
}

inline UPPredicate random_up(Rng& rng, int max_prefix = 2, int max_period = 2) {
    int plen = rng.pick(0, max_prefix);
    int vlen = rng.pick(1, max_period);
    std::string u, v;
    for (int i = 0; i < plen; ++i) u.push_back(rng.coin() ? '1' : '0');
    for (int i = 0; i < vlen; ++i) v.push_back(rng.coin() ? '1' : '0');
    return UPPredicate(u, v);
}

inline CMachine random_cmachine(Rng& rng, int max_states = 6) {
    int n = rng.pick(1, max_states);
    CMachine m(n);
    m.initial = 0;
    for (int q = 0; q < n; ++q)
        for (int a = 0; a < 2; ++a) {
            m.trans[std::size_t(q)][std::size_t(a)] = rng.pick(0, n - 1);
            m.out[std::size_t(q)][std::size_t(a)] = static_cast<std::uint8_t>(rng.coin());
        }
    return m;
}

inline SCMachine random_scmachine(Rng& rng, int max_states = 4) {
    int n = rng.pick(1, max_states);
    SCMachine m(n);
    m.initial = 0;
    for (int q = 0; q < n; ++q) {
        m.out[std::size_t(q)] = static_cast<std::uint8_t>(rng.coin());
        for (int a = 0; a < 2; ++a) m.trans[std::size_t(q)][std::size_t(a)] = rng.pick(0, n - 1);
    }
    return m;
}

} // namespace upsynth::test
