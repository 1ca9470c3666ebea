// determinize.hpp -- NBA -> DPA via Safra trees with an age order on nodes.
//
// A construction state is an ordered tree of nonempty state sets: children are
// pairwise disjoint, their union is a proper subset of the parent, and every
// node carries an age rank (creation order, oldest = 0). On each letter:
//   1. every label is replaced by its successor set,
//   2. every node spawns a youngest child holding its accepting states,
//   3. states claimed by an older sibling branch are removed from younger ones,
//   4. empty nodes die (a bad event at their age position),
//   5. a node whose label equals the union of its children swallows all
//      descendants (a good event at its age position).
// The transition color is taken from the oldest event: good at position p
// gives 2p, bad gives 2p-1, no event gives a large odd color. Min-even
// acceptance of the resulting color stream matches NBA acceptance: a node
// that eventually never dies and is infinitely often swallowed settles at a
// fixed age position and dominates everything younger.
#pragma once

#include <cstdint>
#include <deque>
#include <unordered_map>
#include <vector>

#include "upsynth/automata.hpp"
#include "upsynth/bits.hpp"
#include "upsynth/errors.hpp"

namespace upsynth {

namespace detail {

struct SafraNode {
    Bits label;
    int parent = -1;
    std::vector<int> kids; // creation order, oldest first
    int age = 0;
    bool alive = true;
};

struct SafraTree {
    std::vector<SafraNode> nodes;
    int root = -1; // -1 encodes the dead sink (no runs left)

    bool dead() const { return root < 0; }

    // Canonical encoding: preorder walk emitting (age, #kids, label words).
    std::vector<std::uint64_t> encode() const {
        std::vector<std::uint64_t> out;
        if (dead()) return out;
        std::vector<int> stack{root};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            const SafraNode& nd = nodes[std::size_t(v)];
            out.push_back(static_cast<std::uint64_t>(nd.age));
            out.push_back(static_cast<std::uint64_t>(nd.kids.size()));
            for (auto w : nd.label.words()) out.push_back(w);
            for (auto it = nd.kids.rbegin(); it != nd.kids.rend(); ++it) stack.push_back(*it);
        }
        return out;
    }
};

struct VecHash {
    std::size_t operator()(const std::vector<std::uint64_t>& v) const {
        std::size_t h = 1469598103934665603ull;
        for (auto x : v) {
            h ^= static_cast<std::size_t>(x);
            h *= 1099511628211ull;
        }
        return h;
    }
};

} // namespace detail

inline DPA determinize(const NBA& in, std::size_t max_states = 100000) {
    using detail::SafraNode;
    using detail::SafraTree;

    const int n = in.num_states;
    const Letter letters = in.letters();
    const int neutral = 4 * std::max(n, 1) + 1; // odd, larger than any event color

    Bits acc(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q)
        if (in.accepting[std::size_t(q)]) acc.set(std::size_t(q));

    auto delta_set = [&](const Bits& label, Letter a) {
        Bits out(static_cast<std::size_t>(n));
        label.for_each([&](std::size_t q) {
            for (int r : in.succ(static_cast<int>(q), a)) out.set(std::size_t(r));
        });
        return out;
    };

    // One transition of the construction; returns (successor tree, color).
    auto step_tree = [&](const SafraTree& t, Letter a) -> std::pair<SafraTree, int> {
        if (t.dead()) return {t, 1};
        SafraTree s = t;
        auto& nd = s.nodes;

        // age order of pre-existing nodes
        std::vector<int> by_age;
        for (int i = 0; i < static_cast<int>(nd.size()); ++i) by_age.push_back(i);
        std::sort(by_age.begin(), by_age.end(),
                  [&](int x, int y) { return nd[std::size_t(x)].age < nd[std::size_t(y)].age; });

        // 1. powerset update
        for (auto& node : nd) node.label = delta_set(node.label, a);

        // 2. spawn children (update-then-spawn): label ∩ F, youngest sibling
        int next_age = static_cast<int>(nd.size());
        for (int v : by_age) {
            Bits child = nd[std::size_t(v)].label;
            child &= acc;
            if (child.none()) continue;
            SafraNode fresh;
            fresh.label = child;
            fresh.parent = v;
            fresh.age = next_age++;
            nd.push_back(fresh);
            nd[std::size_t(v)].kids.push_back(static_cast<int>(nd.size()) - 1);
        }

        // 3. horizontal merge: older sibling subtrees keep contested states
        auto subtract_subtree = [&](int v, const Bits& claimed, auto&& self) -> void {
            nd[std::size_t(v)].label.subtract(claimed);
            for (int k : nd[std::size_t(v)].kids) self(k, claimed, self);
        };
        auto hmerge = [&](int v, auto&& self) -> void {
            Bits claimed(static_cast<std::size_t>(n));
            for (int k : nd[std::size_t(v)].kids) {
                subtract_subtree(k, claimed, subtract_subtree);
                self(k, self);
                claimed |= nd[std::size_t(k)].label;
            }
        };
        hmerge(s.root, hmerge);

        int bad_pos = -1, good_pos = -1;

        // 4. remove empty nodes (whole subtrees; labels of descendants are
        // contained in the node's, so they are empty too)
        auto kill_subtree = [&](int v, auto&& self) -> void {
            nd[std::size_t(v)].alive = false;
            if (bad_pos < 0 || nd[std::size_t(v)].age < bad_pos) bad_pos = nd[std::size_t(v)].age;
            for (int k : nd[std::size_t(v)].kids) self(k, self);
            nd[std::size_t(v)].kids.clear();
        };
        auto sweep_empty = [&](int v, auto&& self) -> void {
            std::vector<int> keep;
            for (int k : nd[std::size_t(v)].kids) {
                if (nd[std::size_t(k)].label.none())
                    kill_subtree(k, kill_subtree);
                else {
                    self(k, self);
                    keep.push_back(k);
                }
            }
            nd[std::size_t(v)].kids = std::move(keep);
        };
        if (nd[std::size_t(s.root)].label.none()) {
            int root_age = nd[std::size_t(s.root)].age;
            (void)root_age;
            return {SafraTree{}, 1}; // all runs died: bad at position 1
        }
        sweep_empty(s.root, sweep_empty);

        // 5. vertical merge, top down
        auto remove_descendants = [&](int v, auto&& self) -> void {
            for (int k : nd[std::size_t(v)].kids) {
                nd[std::size_t(k)].alive = false;
                self(k, self);
            }
            nd[std::size_t(v)].kids.clear();
        };
        auto vmerge = [&](int v, auto&& self) -> void {
            if (!nd[std::size_t(v)].kids.empty()) {
                Bits u(static_cast<std::size_t>(n));
                for (int k : nd[std::size_t(v)].kids) u |= nd[std::size_t(k)].label;
                if (u == nd[std::size_t(v)].label) {
                    remove_descendants(v, remove_descendants);
                    if (good_pos < 0 || nd[std::size_t(v)].age < good_pos) good_pos = nd[std::size_t(v)].age;
                    return;
                }
            }
            for (int k : nd[std::size_t(v)].kids) self(k, self);
        };
        vmerge(s.root, vmerge);

        // transition color from the oldest event (positions are 1-based)
        int color = neutral;
        if (bad_pos >= 0) color = std::min(color, 2 * (bad_pos + 1) - 1);
        if (good_pos >= 0) color = std::min(color, 2 * (good_pos + 1));

        // 6. compact: renumber surviving nodes and their ages
        SafraTree c;
        std::vector<int> alive_by_age;
        for (int i = 0; i < static_cast<int>(nd.size()); ++i)
            if (nd[std::size_t(i)].alive) alive_by_age.push_back(i);
        std::sort(alive_by_age.begin(), alive_by_age.end(),
                  [&](int x, int y) { return nd[std::size_t(x)].age < nd[std::size_t(y)].age; });
        std::vector<int> remap(nd.size(), -1);
        for (int rank = 0; rank < static_cast<int>(alive_by_age.size()); ++rank)
            remap[std::size_t(alive_by_age[std::size_t(rank)])] = rank;
        c.nodes.resize(alive_by_age.size());
        for (int i = 0; i < static_cast<int>(nd.size()); ++i) {
            if (remap[std::size_t(i)] < 0) continue;
            SafraNode& dst = c.nodes[std::size_t(remap[std::size_t(i)])];
            dst.label = nd[std::size_t(i)].label;
            dst.age = remap[std::size_t(i)];
            dst.parent = nd[std::size_t(i)].parent < 0 ? -1 : remap[std::size_t(nd[std::size_t(i)].parent)];
            for (int k : nd[std::size_t(i)].kids) dst.kids.push_back(remap[std::size_t(k)]);
        }
        c.root = remap[std::size_t(s.root)];
        return {c, color};
    };

    // initial tree: single root holding the NBA initial state
    SafraTree init;
    init.root = 0;
    SafraNode root;
    root.label = Bits(static_cast<std::size_t>(n));
    root.label.set(std::size_t(in.initial));
    root.age = 0;
    init.nodes.push_back(root);

    // explore
    struct StateKey {
        std::vector<std::uint64_t> enc; // tree encoding + incoming color appended
    };
    std::unordered_map<std::vector<std::uint64_t>, int, detail::VecHash> ids;
    std::vector<SafraTree> trees;
    std::vector<int> colors;

    auto intern = [&](const SafraTree& t, int color) {
        auto key = t.encode();
        key.push_back(static_cast<std::uint64_t>(color) | (std::uint64_t(1) << 62));
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int id = static_cast<int>(trees.size());
        if (trees.size() >= max_states)
            throw CapacityError("determinize: state budget of " + std::to_string(max_states) +
                                " exceeded");
        ids.emplace(std::move(key), id);
        trees.push_back(t);
        colors.push_back(color);
        return id;
    };

    intern(init, neutral);
    std::vector<std::vector<int>> rows;
    for (std::size_t at = 0; at < trees.size(); ++at) {
        SafraTree cur = trees[at];
        rows.emplace_back(letters, 0);
        for (Letter a = 0; a < letters; ++a) {
            auto [next, color] = step_tree(cur, a);
            rows[at][a] = intern(next, color);
        }
    }

    DPA out(in.width, static_cast<int>(trees.size()));
    out.initial = 0;
    for (int q = 0; q < out.num_states; ++q) {
        out.color[std::size_t(q)] = colors[std::size_t(q)];
        for (Letter a = 0; a < letters; ++a) out.set_step(q, a, rows[std::size_t(q)][a]);
    }
    normalize_colors(out);
    return out;
}

} // namespace upsynth
