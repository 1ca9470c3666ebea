// automata.hpp -- Buchi and deterministic parity automata over bit-tuple
// alphabets: boolean closure, projection, complement, emptiness, lasso
// acceptance, simplification, and the line-based text format.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "upsynth/bits.hpp"
#include "upsynth/errors.hpp"
#include "upsynth/graph.hpp"

namespace upsynth {

using Letter = std::uint32_t;

// Track i of a letter is bit i. External text formats are limited to width 8;
// intermediate compilation products may use up to max_width tracks.
struct BitAlphabet {
    int width = 0;

    static constexpr int max_width = 12;
    static constexpr int max_external_width = 8;

    explicit BitAlphabet(int k) : width(k) {
        if (k < 0 || k > max_width)
            throw WidthError("alphabet width " + std::to_string(k) + " out of range [0, " +
                             std::to_string(max_width) + "]");
    }
    Letter letter_count() const { return Letter(1) << width; }
};

inline Letter letter_count_for(int width) { return Letter(1) << width; }

// u . v^omega over a bit-tuple alphabet; |v| >= 1.
struct Lasso {
    int width = 0;
    std::vector<Letter> prefix;
    std::vector<Letter> cycle;

    Lasso() = default;
    Lasso(int w, std::vector<Letter> u, std::vector<Letter> v)
        : width(w), prefix(std::move(u)), cycle(std::move(v)) {
        if (cycle.empty()) throw Error("lasso cycle must be nonempty");
    }

    Letter at(std::size_t n) const {
        if (n < prefix.size()) return prefix[n];
        return cycle[(n - prefix.size()) % cycle.size()];
    }

    // Same omega-word with k extra copies of the cycle moved into the prefix.
    Lasso unrolled(int k) const {
        Lasso r = *this;
        for (int i = 0; i < k; ++i) r.prefix.insert(r.prefix.end(), cycle.begin(), cycle.end());
        return r;
    }

    // Same omega-word with the cycle rotated left by r positions.
    Lasso rotated(std::size_t r) const {
        Lasso out = *this;
        r %= cycle.size();
        for (std::size_t i = 0; i < r; ++i) out.prefix.push_back(cycle[i]);
        std::rotate(out.cycle.begin(), out.cycle.begin() + static_cast<long>(r), out.cycle.end());
        return out;
    }
};

// Minimal cycle by divisor scan, then right-trim of the prefix (rotating the
// cycle to keep the denoted word fixed).
inline Lasso lasso_canonical(const Lasso& w) {
    Lasso r = w;
    for (std::size_t d = 1; d < r.cycle.size(); ++d) {
        if (r.cycle.size() % d != 0) continue;
        bool ok = true;
        for (std::size_t i = d; i < r.cycle.size() && ok; ++i)
            if (r.cycle[i] != r.cycle[i % d]) ok = false;
        if (ok) {
            r.cycle.resize(d);
            break;
        }
    }
    while (!r.prefix.empty() && r.prefix.back() == r.cycle.back()) {
        r.prefix.pop_back();
        std::rotate(r.cycle.begin(), r.cycle.end() - 1, r.cycle.end());
    }
    return r;
}

inline bool lasso_same_word(const Lasso& a, const Lasso& b) {
    Lasso ca = lasso_canonical(a), cb = lasso_canonical(b);
    return ca.width == cb.width && ca.prefix == cb.prefix && ca.cycle == cb.cycle;
}

// ---------------------------------------------------------------------------
// Nondeterministic Buchi automaton. Successor sets may be empty but the
// transition table is total on states x letters.
struct NBA {
    int width = 0;
    int num_states = 0;
    int initial = 0;
    std::vector<bool> accepting;
    std::vector<std::vector<int>> trans; // [q * letters + a] -> sorted successors

    NBA() = default;
    NBA(int w, int n) : width(w), num_states(n), accepting(n, false), trans(std::size_t(n) << w) {
        BitAlphabet check(w);
        (void)check;
    }

    Letter letters() const { return letter_count_for(width); }

    std::vector<int>& succ(int q, Letter a) { return trans[(std::size_t(q) << width) | a]; }
    const std::vector<int>& succ(int q, Letter a) const {
        return trans[(std::size_t(q) << width) | a];
    }

    void add_edge(int q, Letter a, int r) {
        auto& v = succ(q, a);
        auto it = std::lower_bound(v.begin(), v.end(), r);
        if (it == v.end() || *it != r) v.insert(it, r);
    }
};

// Deterministic parity automaton; acceptance is "minimal color visited
// infinitely often is even".
struct DPA {
    int width = 0;
    int num_states = 0;
    int initial = 0;
    std::vector<int> color;
    std::vector<int> trans; // [q * letters + a] -> q'

    DPA() = default;
    DPA(int w, int n) : width(w), num_states(n), color(n, 0), trans(std::size_t(n) << w, 0) {
        BitAlphabet check(w);
        (void)check;
    }

    Letter letters() const { return letter_count_for(width); }

    int step(int q, Letter a) const { return trans[(std::size_t(q) << width) | a]; }
    void set_step(int q, Letter a, int r) { trans[(std::size_t(q) << width) | a] = r; }

    int max_color() const {
        int m = 0;
        for (int c : color) m = std::max(m, c);
        return m;
    }

    std::vector<std::vector<int>> successor_graph() const {
        std::vector<std::vector<int>> adj(num_states);
        for (int q = 0; q < num_states; ++q) {
            std::vector<int> s;
            for (Letter a = 0; a < letters(); ++a) s.push_back(step(q, a));
            std::sort(s.begin(), s.end());
            s.erase(std::unique(s.begin(), s.end()), s.end());
            adj[q] = std::move(s);
        }
        return adj;
    }
};

// ---------------------------------------------------------------------------
// Lasso acceptance: run the prefix, then iterate the cycle until the state at
// cycle phase 0 repeats; the min color over the repeated segment decides.
inline bool dpa_accepts_lasso(const DPA& a, const Lasso& w) {
    if (a.width != w.width)
        throw WidthError("dpa_accepts_lasso: automaton width " + std::to_string(a.width) +
                         " vs lasso width " + std::to_string(w.width));
    int q = a.initial;
    for (Letter l : w.prefix) q = a.step(q, l);
    std::vector<int> seen_at(a.num_states, -1);
    std::vector<int> crossings;
    int rep_first = -1;
    while (true) {
        if (seen_at[q] >= 0) {
            rep_first = seen_at[q];
            break;
        }
        seen_at[q] = static_cast<int>(crossings.size());
        crossings.push_back(q);
        for (Letter l : w.cycle) q = a.step(q, l);
    }
    // Replay one period of the repetition, collecting colors of entered states.
    int s = crossings[rep_first];
    int min_color = a.color[s]; // s itself recurs at every crossing
    int reps = static_cast<int>(crossings.size()) - rep_first;
    for (int i = 0; i < reps; ++i) {
        for (Letter l : w.cycle) {
            s = a.step(s, l);
            min_color = std::min(min_color, a.color[s]);
        }
    }
    return min_color % 2 == 0;
}

// ---------------------------------------------------------------------------
// Generalized product: L = intersection of all operands.
inline NBA nba_intersect_many(const std::vector<NBA>& ops) {
    if (ops.empty()) throw Error("nba_intersect_many: no operands");
    int width = ops[0].width;
    for (const auto& o : ops)
        if (o.width != width) throw WidthError("nba_intersect: operand width mismatch");
    int n = static_cast<int>(ops.size());
    Letter letters = letter_count_for(width);

    struct Key {
        std::vector<int> qs;
        int j;
        bool operator==(const Key& o) const { return j == o.j && qs == o.qs; }
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::size_t h = std::hash<int>()(k.j);
            for (int q : k.qs) h = h * 1000003u + static_cast<std::size_t>(q) + 1;
            return h;
        }
    };

    std::unordered_map<Key, int, KeyHash> ids;
    std::vector<Key> keys;
    auto intern = [&](Key k) {
        auto it = ids.find(k);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(keys.size());
        ids.emplace(k, id);
        keys.push_back(std::move(k));
        return id;
    };

    Key init;
    for (const auto& o : ops) init.qs.push_back(o.initial);
    init.j = 0;
    intern(init);

    NBA out(width, 0);
    std::vector<std::vector<std::vector<int>>> rows;
    for (std::size_t at = 0; at < keys.size(); ++at) {
        Key cur = keys[at]; // copy: keys may reallocate
        rows.emplace_back(letters);
        for (Letter a = 0; a < letters; ++a) {
            // cartesian product of per-operand successor sets
            std::vector<std::vector<int>> tuples{{}};
            for (int i = 0; i < n && !tuples.empty(); ++i) {
                const auto& sucs = ops[std::size_t(i)].succ(cur.qs[std::size_t(i)], a);
                std::vector<std::vector<int>> next;
                for (auto& t : tuples)
                    for (int s : sucs) {
                        auto t2 = t;
                        t2.push_back(s);
                        next.push_back(std::move(t2));
                    }
                tuples = std::move(next);
            }
            for (auto& t : tuples) {
                int jj = cur.j == n ? 0 : cur.j;
                if (ops[std::size_t(jj)].accepting[std::size_t(t[std::size_t(jj)])]) ++jj;
                Key nk{t, jj};
                rows[at][a].push_back(intern(std::move(nk)));
            }
        }
    }

    out.num_states = static_cast<int>(keys.size());
    out.accepting.assign(out.num_states, false);
    out.trans.assign(std::size_t(out.num_states) << width, {});
    for (int q = 0; q < out.num_states; ++q) {
        out.accepting[std::size_t(q)] = keys[std::size_t(q)].j == n;
        for (Letter a = 0; a < letters; ++a) {
            auto v = rows[std::size_t(q)][a];
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            out.succ(q, a) = std::move(v);
        }
    }
    out.initial = 0;
    return out;
}

inline NBA nba_intersect(const NBA& a, const NBA& b) { return nba_intersect_many({a, b}); }

// Disjoint union behind a fresh initial state.
inline NBA nba_union(const NBA& a, const NBA& b) {
    if (a.width != b.width) throw WidthError("nba_union: width mismatch");
    NBA out(a.width, 1 + a.num_states + b.num_states);
    Letter letters = out.letters();
    int offa = 1, offb = 1 + a.num_states;
    out.initial = 0;
    for (int q = 0; q < a.num_states; ++q) {
        out.accepting[std::size_t(offa + q)] = a.accepting[std::size_t(q)];
        for (Letter l = 0; l < letters; ++l)
            for (int r : a.succ(q, l)) out.add_edge(offa + q, l, offa + r);
    }
    for (int q = 0; q < b.num_states; ++q) {
        out.accepting[std::size_t(offb + q)] = b.accepting[std::size_t(q)];
        for (Letter l = 0; l < letters; ++l)
            for (int r : b.succ(q, l)) out.add_edge(offb + q, l, offb + r);
    }
    for (Letter l = 0; l < letters; ++l) {
        for (int r : a.succ(a.initial, l)) out.add_edge(0, l, offa + r);
        for (int r : b.succ(b.initial, l)) out.add_edge(0, l, offb + r);
    }
    return out;
}

// Existential projection of one track.
inline NBA nba_project(const NBA& a, int track) {
    if (track < 0 || track >= a.width) throw WidthError("nba_project: track out of range");
    NBA out(a.width - 1, a.num_states);
    out.initial = a.initial;
    out.accepting = a.accepting;
    Letter low_mask = (Letter(1) << track) - 1;
    for (int q = 0; q < a.num_states; ++q) {
        for (Letter l = 0; l < out.letters(); ++l) {
            Letter l0 = ((l & ~low_mask) << 1) | (l & low_mask);
            Letter l1 = l0 | (Letter(1) << track);
            std::vector<int> v = a.succ(q, l0);
            const auto& w = a.succ(q, l1);
            v.insert(v.end(), w.begin(), w.end());
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            out.succ(q, l) = std::move(v);
        }
    }
    return out;
}

inline DPA dpa_complement(const DPA& a) {
    DPA out = a;
    for (auto& c : out.color) ++c;
    return out;
}

// Parity -> Buchi: guess the least even color c seen infinitely often and the
// point after which no smaller color occurs. Jumping only on transitions into
// a color-c state loses no words and keeps the nondeterminism down.
inline NBA dpa_to_nba(const DPA& a) {
    std::vector<int> evens;
    for (int c = 0; c <= a.max_color(); c += 2) evens.push_back(c);
    int ne = static_cast<int>(evens.size());
    NBA out(a.width, a.num_states * (1 + ne));
    out.initial = a.initial;
    Letter letters = a.letters();
    auto base = [&](int q) { return q; };
    auto phase = [&](int q, int ci) { return a.num_states * (1 + ci) + q; };
    for (int q = 0; q < a.num_states; ++q) {
        for (Letter l = 0; l < letters; ++l) {
            int r = a.step(q, l);
            out.add_edge(base(q), l, base(r));
            for (int ci = 0; ci < ne; ++ci)
                if (a.color[std::size_t(r)] == evens[std::size_t(ci)])
                    out.add_edge(base(q), l, phase(r, ci));
        }
        for (int ci = 0; ci < ne; ++ci) {
            for (Letter l = 0; l < letters; ++l) {
                int r = a.step(q, l);
                if (a.color[std::size_t(r)] >= evens[std::size_t(ci)])
                    out.add_edge(phase(q, ci), l, phase(r, ci));
            }
            if (a.color[std::size_t(q)] == evens[std::size_t(ci)])
                out.accepting[std::size_t(phase(q, ci))] = true;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Witness search: a reachable cycle with even minimal color, returned with the
// concrete letters that realize it.
inline std::optional<Lasso> nonemptiness_witness(const DPA& a) {
    int n = a.num_states;
    Letter letters = a.letters();
    auto adj = a.successor_graph();
    auto reach = reachable_from(n, adj, a.initial);

    std::vector<int> colors;
    for (int q = 0; q < n; ++q)
        if (reach[std::size_t(q)] && a.color[std::size_t(q)] % 2 == 0)
            colors.push_back(a.color[std::size_t(q)]);
    std::sort(colors.begin(), colors.end());
    colors.erase(std::unique(colors.begin(), colors.end()), colors.end());

    for (int c : colors) {
        std::vector<bool> mask(n, false);
        for (int q = 0; q < n; ++q)
            mask[std::size_t(q)] = reach[std::size_t(q)] && a.color[std::size_t(q)] >= c;
        SccResult scc = strongly_connected_components(n, adj, mask);
        std::vector<int> comp_size(scc.count, 0);
        std::vector<bool> comp_cycle(scc.count, false);
        for (int q = 0; q < n; ++q)
            if (scc.comp[q] >= 0) ++comp_size[std::size_t(scc.comp[q])];
        for (int q = 0; q < n; ++q) {
            if (scc.comp[q] < 0) continue;
            if (comp_size[std::size_t(scc.comp[q])] > 1) comp_cycle[std::size_t(scc.comp[q])] = true;
            for (Letter l = 0; l < letters; ++l)
                if (a.step(q, l) == q && mask[std::size_t(q)]) comp_cycle[std::size_t(scc.comp[q])] = true;
        }
        for (int pivot = 0; pivot < n; ++pivot) {
            if (scc.comp[pivot] < 0 || a.color[std::size_t(pivot)] != c) continue;
            if (!comp_cycle[std::size_t(scc.comp[pivot])]) continue;
            // prefix: BFS from initial to pivot over all states
            auto bfs_path = [&](int src, int dst, const std::vector<bool>& allowed,
                                bool at_least_one_step) -> std::optional<std::vector<Letter>> {
                if (!at_least_one_step && src == dst) return std::vector<Letter>{};
                std::vector<int> prev_state(n, -1);
                std::vector<Letter> prev_letter(n, 0);
                std::vector<bool> visited(n, false);
                std::vector<int> queue{src};
                std::size_t head = 0;
                visited[std::size_t(src)] = true;
                while (head < queue.size()) {
                    int v = queue[head++];
                    for (Letter l = 0; l < letters; ++l) {
                        int w = a.step(v, l);
                        if (!allowed.empty() && !allowed[std::size_t(w)]) continue;
                        if (w == dst) {
                            std::vector<Letter> path{l};
                            int cur = v;
                            while (cur != src) {
                                path.push_back(prev_letter[std::size_t(cur)]);
                                cur = prev_state[std::size_t(cur)];
                            }
                            std::reverse(path.begin(), path.end());
                            return path;
                        }
                        if (!visited[std::size_t(w)]) {
                            visited[std::size_t(w)] = true;
                            prev_state[std::size_t(w)] = v;
                            prev_letter[std::size_t(w)] = l;
                            queue.push_back(w);
                        }
                    }
                }
                return std::nullopt;
            };
            std::vector<bool> all;
            auto pre = bfs_path(a.initial, pivot, all, false);
            if (!pre) continue;
            std::vector<bool> comp_mask(n, false);
            for (int q = 0; q < n; ++q)
                comp_mask[std::size_t(q)] = scc.comp[q] == scc.comp[pivot];
            auto cyc = bfs_path(pivot, pivot, comp_mask, true);
            if (!cyc || cyc->empty()) continue;
            return Lasso(a.width, *pre, *cyc);
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// NBA cleanup: keep states that are reachable and can still contribute an
// accepting run; then merge forward-bisimilar states.
inline NBA nba_trim(const NBA& a) {
    int n = a.num_states;
    Letter letters = a.letters();
    std::vector<std::vector<int>> adj(n);
    for (int q = 0; q < n; ++q) {
        std::vector<int> s;
        for (Letter l = 0; l < letters; ++l)
            for (int r : a.succ(q, l)) s.push_back(r);
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        adj[std::size_t(q)] = std::move(s);
    }
    auto reach = reachable_from(n, adj, a.initial);
    SccResult scc = strongly_connected_components(n, adj);
    std::vector<int> comp_size(scc.count, 0);
    std::vector<bool> comp_self(scc.count, false);
    for (int q = 0; q < n; ++q) {
        ++comp_size[std::size_t(scc.comp[q])];
        for (int r : adj[std::size_t(q)])
            if (r == q) comp_self[std::size_t(scc.comp[q])] = true;
    }
    std::vector<bool> good(n, false);
    for (int q = 0; q < n; ++q)
        if (a.accepting[std::size_t(q)] &&
            (comp_size[std::size_t(scc.comp[q])] > 1 || comp_self[std::size_t(scc.comp[q])]))
            good[std::size_t(q)] = true;
    auto live = backward_reachable(n, adj, good);

    std::vector<int> remap(n, -1);
    int m = 0;
    for (int q = 0; q < n; ++q)
        if (reach[std::size_t(q)] && live[std::size_t(q)]) remap[std::size_t(q)] = m++;

    if (m == 0 || remap[std::size_t(a.initial)] < 0) {
        NBA out(a.width, 1);
        out.initial = 0;
        return out; // empty language
    }
    NBA out(a.width, m);
    out.initial = remap[std::size_t(a.initial)];
    for (int q = 0; q < n; ++q) {
        if (remap[std::size_t(q)] < 0) continue;
        out.accepting[std::size_t(remap[std::size_t(q)])] = a.accepting[std::size_t(q)];
        for (Letter l = 0; l < letters; ++l)
            for (int r : a.succ(q, l))
                if (remap[std::size_t(r)] >= 0) out.add_edge(remap[std::size_t(q)], l, remap[std::size_t(r)]);
    }
    return out;
}

inline NBA nba_bisim_quotient(const NBA& a) {
    int n = a.num_states;
    Letter letters = a.letters();
    std::vector<int> cls(n);
    for (int q = 0; q < n; ++q) cls[std::size_t(q)] = a.accepting[std::size_t(q)] ? 1 : 0;
    while (true) {
        std::map<std::pair<int, std::vector<int>>, int> sig_ids;
        std::vector<int> next(n);
        for (int q = 0; q < n; ++q) {
            std::vector<int> sig;
            for (Letter l = 0; l < letters; ++l) {
                std::vector<int> cs;
                for (int r : a.succ(q, l)) cs.push_back(cls[std::size_t(r)]);
                std::sort(cs.begin(), cs.end());
                cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
                sig.push_back(static_cast<int>(cs.size()));
                sig.insert(sig.end(), cs.begin(), cs.end());
            }
            auto key = std::make_pair(cls[std::size_t(q)], std::move(sig));
            auto it = sig_ids.find(key);
            if (it == sig_ids.end()) it = sig_ids.emplace(std::move(key), static_cast<int>(sig_ids.size())).first;
            next[std::size_t(q)] = it->second;
        }
        if (next == cls) break;
        cls = std::move(next);
    }
    int m = 1 + *std::max_element(cls.begin(), cls.end());
    NBA out(a.width, m);
    out.initial = cls[std::size_t(a.initial)];
    for (int q = 0; q < n; ++q) {
        if (a.accepting[std::size_t(q)]) out.accepting[std::size_t(cls[std::size_t(q)])] = true;
        for (Letter l = 0; l < letters; ++l)
            for (int r : a.succ(q, l)) out.add_edge(cls[std::size_t(q)], l, cls[std::size_t(r)]);
    }
    return out;
}

// Direct forward simulation: sim[r][s] iff s simulates r (acceptance implies
// acceptance, and every successor of r is simulated by some successor of s on
// the same letter). Used to prune dominated transitions and merge mutually
// simulating states, which keeps determinization inputs small.
inline std::vector<std::vector<bool>> nba_direct_simulation(const NBA& a) {
    int n = a.num_states;
    Letter letters = a.letters();
    std::vector<std::vector<bool>> sim(std::size_t(n), std::vector<bool>(std::size_t(n), true));
    for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s)
            if (a.accepting[std::size_t(r)] && !a.accepting[std::size_t(s)])
                sim[std::size_t(r)][std::size_t(s)] = false;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int r = 0; r < n; ++r)
            for (int s = 0; s < n; ++s) {
                if (!sim[std::size_t(r)][std::size_t(s)]) continue;
                bool ok = true;
                for (Letter l = 0; l < letters && ok; ++l) {
                    for (int rs : a.succ(r, l)) {
                        bool covered = false;
                        for (int ss : a.succ(s, l))
                            if (sim[std::size_t(rs)][std::size_t(ss)]) {
                                covered = true;
                                break;
                            }
                        if (!covered) {
                            ok = false;
                            break;
                        }
                    }
                }
                if (!ok) {
                    sim[std::size_t(r)][std::size_t(s)] = false;
                    changed = true;
                }
            }
    }
    return sim;
}

inline NBA nba_simulation_reduce(const NBA& input) {
    // guard against quadratic cost on large automata; the caller's state cap
    // still protects determinization
    if (input.num_states > 700) return input;
    NBA a = input;
    auto sim = nba_direct_simulation(a);
    int n = a.num_states;
    // merge mutually simulating states
    std::vector<int> cls(std::size_t(n), -1);
    int m = 0;
    for (int q = 0; q < n; ++q) {
        if (cls[std::size_t(q)] >= 0) continue;
        cls[std::size_t(q)] = m;
        for (int r = q + 1; r < n; ++r)
            if (cls[std::size_t(r)] < 0 && sim[std::size_t(q)][std::size_t(r)] &&
                sim[std::size_t(r)][std::size_t(q)])
                cls[std::size_t(r)] = m;
        ++m;
    }
    NBA merged(a.width, m);
    merged.initial = cls[std::size_t(a.initial)];
    for (int q = 0; q < n; ++q) {
        if (a.accepting[std::size_t(q)]) merged.accepting[std::size_t(cls[std::size_t(q)])] = true;
        for (Letter l = 0; l < a.letters(); ++l)
            for (int r : a.succ(q, l)) merged.add_edge(cls[std::size_t(q)], l, cls[std::size_t(r)]);
    }
    // prune transitions dominated by a simulating sibling
    auto msim = nba_direct_simulation(merged);
    for (int q = 0; q < merged.num_states; ++q)
        for (Letter l = 0; l < merged.letters(); ++l) {
            auto& v = merged.succ(q, l);
            std::vector<int> keep;
            for (int r : v) {
                bool dominated = false;
                for (int s : v) {
                    if (s == r) continue;
                    if (msim[std::size_t(r)][std::size_t(s)] &&
                        (!msim[std::size_t(s)][std::size_t(r)] || s < r)) {
                        dominated = true;
                        break;
                    }
                }
                if (!dominated) keep.push_back(r);
            }
            v = std::move(keep);
        }
    return merged;
}

inline NBA nba_reduce(const NBA& a) {
    return nba_trim(nba_simulation_reduce(nba_bisim_quotient(nba_trim(a))));
}

// ---------------------------------------------------------------------------
// DPA simplification. All steps preserve lasso verdicts:
//  - unreachable removal,
//  - per-SCC recoloring where every internal cycle has the same min parity,
//  - canonical color for transient states,
//  - parity-preserving color compression,
//  - bisimulation quotient on (color, successors).
namespace detail {

inline bool scc_has_min_parity_cycle(const DPA& a, const std::vector<int>& members, int parity) {
    std::vector<bool> in_scc(a.num_states, false);
    for (int q : members) in_scc[std::size_t(q)] = true;
    auto adj = a.successor_graph();
    // restrict adjacency to the SCC
    std::vector<std::vector<int>> sub(a.num_states);
    for (int q : members)
        for (int r : adj[std::size_t(q)])
            if (in_scc[std::size_t(r)]) sub[std::size_t(q)].push_back(r);
    std::vector<bool> alive(a.num_states, false);
    for (int q : members) alive[std::size_t(q)] = true;
    return has_cycle_with_min_parity(a.num_states, sub, a.color, parity, alive);
}

} // namespace detail

inline void normalize_colors(DPA& a) {
    std::vector<int> used = a.color;
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::map<int, int> remap;
    int next = -1, last_parity = -1;
    for (int c : used) {
        if (next < 0)
            next = c % 2;
        else if (c % 2 != last_parity)
            ++next;
        remap[c] = next;
        last_parity = c % 2;
    }
    for (auto& c : a.color) c = remap[c];
}

inline DPA dpa_reachable(const DPA& a) {
    auto adj = a.successor_graph();
    auto reach = reachable_from(a.num_states, adj, a.initial);
    std::vector<int> remap(a.num_states, -1);
    int m = 0;
    for (int q = 0; q < a.num_states; ++q)
        if (reach[std::size_t(q)]) remap[std::size_t(q)] = m++;
    DPA out(a.width, m);
    out.initial = remap[std::size_t(a.initial)];
    for (int q = 0; q < a.num_states; ++q) {
        if (remap[std::size_t(q)] < 0) continue;
        out.color[std::size_t(remap[std::size_t(q)])] = a.color[std::size_t(q)];
        for (Letter l = 0; l < a.letters(); ++l)
            out.set_step(remap[std::size_t(q)], l, remap[std::size_t(a.step(q, l))]);
    }
    return out;
}

inline DPA dpa_bisim_quotient(const DPA& a) {
    int n = a.num_states;
    Letter letters = a.letters();
    std::map<int, int> color_ids;
    std::vector<int> cls(n);
    for (int q = 0; q < n; ++q) {
        auto it = color_ids.find(a.color[std::size_t(q)]);
        if (it == color_ids.end())
            it = color_ids.emplace(a.color[std::size_t(q)], static_cast<int>(color_ids.size())).first;
        cls[std::size_t(q)] = it->second;
    }
    while (true) {
        std::map<std::vector<int>, int> sig_ids;
        std::vector<int> next(n);
        for (int q = 0; q < n; ++q) {
            std::vector<int> sig{cls[std::size_t(q)]};
            for (Letter l = 0; l < letters; ++l) sig.push_back(cls[std::size_t(a.step(q, l))]);
            auto it = sig_ids.find(sig);
            if (it == sig_ids.end()) it = sig_ids.emplace(std::move(sig), static_cast<int>(sig_ids.size())).first;
            next[std::size_t(q)] = it->second;
        }
        if (next == cls) break;
        cls = std::move(next);
    }
    int m = 1 + *std::max_element(cls.begin(), cls.end());
    DPA out(a.width, m);
    out.initial = cls[std::size_t(a.initial)];
    for (int q = 0; q < n; ++q) {
        out.color[std::size_t(cls[std::size_t(q)])] = a.color[std::size_t(q)];
        for (Letter l = 0; l < letters; ++l) out.set_step(cls[std::size_t(q)], l, cls[std::size_t(a.step(q, l))]);
    }
    return out;
}

inline DPA simplify_dpa(const DPA& input) {
    DPA a = dpa_reachable(input);
    // SCC-level recoloring
    auto adj = a.successor_graph();
    SccResult scc = strongly_connected_components(a.num_states, adj);
    std::vector<std::vector<int>> members(scc.count);
    for (int q = 0; q < a.num_states; ++q) members[std::size_t(scc.comp[q])].push_back(q);
    for (int k = 0; k < scc.count; ++k) {
        bool trivial = members[std::size_t(k)].size() == 1;
        if (trivial) {
            int q = members[std::size_t(k)][0];
            bool self = false;
            for (int r : adj[std::size_t(q)])
                if (r == q) self = true;
            if (!self) {
                a.color[std::size_t(q)] = 0; // transient: color is never on a cycle
                continue;
            }
        }
        bool even = detail::scc_has_min_parity_cycle(a, members[std::size_t(k)], 0);
        bool odd = detail::scc_has_min_parity_cycle(a, members[std::size_t(k)], 1);
        if (even && !odd)
            for (int q : members[std::size_t(k)]) a.color[std::size_t(q)] = 0;
        else if (odd && !even)
            for (int q : members[std::size_t(k)]) a.color[std::size_t(q)] = 1;
    }
    a = dpa_bisim_quotient(a);
    normalize_colors(a);
    a = dpa_bisim_quotient(a);
    return dpa_reachable(a);
}

// ---------------------------------------------------------------------------
// Text format. Width of serialized automata is capped at 8 tracks.
//   dpa <width> <maxcolor>
//   init <q>
//   col <q> <c>
//   <q> <bits> <q'>     one line per state/letter, bits[j] = track j
inline std::string dpa_to_text(const DPA& a) {
    if (a.width > BitAlphabet::max_external_width)
        throw WidthError("dpa_to_text: width exceeds external limit of 8");
    std::ostringstream os;
    os << "dpa " << a.width << ' ' << a.max_color() << '\n';
    os << "init " << a.initial << '\n';
    for (int q = 0; q < a.num_states; ++q) os << "col " << q << ' ' << a.color[std::size_t(q)] << '\n';
    for (int q = 0; q < a.num_states; ++q)
        for (Letter l = 0; l < a.letters(); ++l) {
            std::string bits(static_cast<std::size_t>(a.width), '0');
            for (int j = 0; j < a.width; ++j)
                if ((l >> j) & 1) bits[std::size_t(j)] = '1';
            if (a.width == 0) bits = "-";
            os << q << ' ' << bits << ' ' << a.step(q, l) << '\n';
        }
    return os.str();
}

inline DPA dpa_from_text(const std::string& text) {
    std::istringstream is(text);
    std::string tok;
    if (!(is >> tok) || tok != "dpa") throw ParseError("expected 'dpa' header");
    int width = 0, maxcol = 0;
    if (!(is >> width >> maxcol)) throw ParseError("bad dpa header");
    if (width < 0 || width > BitAlphabet::max_external_width)
        throw WidthError("dpa_from_text: width exceeds external limit of 8");

    struct Row {
        int q;
        Letter l;
        int r;
    };
    std::vector<Row> rows;
    std::vector<std::pair<int, int>> cols;
    int init = -1, max_state = -1;
    while (is >> tok) {
        if (tok == "init") {
            if (!(is >> init)) throw ParseError("bad init line");
            max_state = std::max(max_state, init);
        } else if (tok == "col") {
            int q, c;
            if (!(is >> q >> c)) throw ParseError("bad col line");
            cols.emplace_back(q, c);
            max_state = std::max(max_state, q);
        } else {
            int q = std::stoi(tok);
            std::string bits;
            int r;
            if (!(is >> bits >> r)) throw ParseError("bad transition line");
            Letter l = 0;
            if (bits != "-") {
                if (static_cast<int>(bits.size()) != width) throw ParseError("bad letter bits: " + bits);
                for (int j = 0; j < width; ++j)
                    if (bits[std::size_t(j)] == '1') l |= Letter(1) << j;
            }
            rows.push_back({q, l, r});
            max_state = std::max({max_state, q, r});
        }
    }
    if (init < 0) throw ParseError("missing init line");
    DPA a(width, max_state + 1);
    a.initial = init;
    std::vector<bool> has_col(static_cast<std::size_t>(max_state + 1), false);
    for (auto& [q, c] : cols) {
        a.color[std::size_t(q)] = c;
        has_col[std::size_t(q)] = true;
    }
    std::vector<bool> has_row(std::size_t(max_state + 1) << width, false);
    for (auto& r : rows) {
        a.set_step(r.q, r.l, r.r);
        has_row[(std::size_t(r.q) << width) | r.l] = true;
    }
    for (int q = 0; q <= max_state; ++q) {
        if (!has_col[std::size_t(q)]) throw ParseError("missing color for state " + std::to_string(q));
        for (Letter l = 0; l < a.letters(); ++l)
            if (!has_row[(std::size_t(q) << width) | l])
                throw ParseError("missing transition for state " + std::to_string(q));
    }
    return a;
}

inline std::string dpa_to_dot(const DPA& a, const std::string& name = "dpa") {
    std::ostringstream os;
    os << "digraph " << name << " {\n  rankdir=LR;\n";
    os << "  __init [shape=point];\n  __init -> q" << a.initial << ";\n";
    for (int q = 0; q < a.num_states; ++q)
        os << "  q" << q << " [shape=circle,label=\"" << q << ":" << a.color[std::size_t(q)] << "\"];\n";
    for (int q = 0; q < a.num_states; ++q)
        for (Letter l = 0; l < a.letters(); ++l) {
            std::string bits(static_cast<std::size_t>(a.width), '0');
            for (int j = 0; j < a.width; ++j)
                if ((l >> j) & 1) bits[std::size_t(j)] = '1';
            os << "  q" << q << " -> q" << a.step(q, l) << " [label=\"" << bits << "\"];\n";
        }
    os << "}\n";
    return os.str();
}

// Convenience constructions used across tests and the compiler.
inline NBA nba_universal(int width) {
    NBA a(width, 1);
    a.accepting[0] = true;
    for (Letter l = 0; l < a.letters(); ++l) a.add_edge(0, l, 0);
    return a;
}

inline NBA nba_empty(int width) {
    NBA a(width, 1);
    return a; // no transitions, not accepting
}

} // namespace upsynth
