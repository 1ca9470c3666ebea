// graph.hpp -- SCC decomposition and parity-cycle queries on explicit digraphs
#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace upsynth {

struct SccResult {
    std::vector<int> comp; // node -> component id (-1 for excluded nodes)
    int count = 0;
};

// Iterative Tarjan over the subgraph induced by `alive` (empty mask = all nodes).
inline SccResult strongly_connected_components(int n,
                                               const std::vector<std::vector<int>>& adj,
                                               const std::vector<bool>& alive = {}) {
    auto is_alive = [&](int v) { return alive.empty() || alive[v]; };
    SccResult res;
    res.comp.assign(n, -1);
    std::vector<int> index(n, -1), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0;

    struct Frame {
        int v;
        std::size_t child;
    };
    std::vector<Frame> call;

    for (int root = 0; root < n; ++root) {
        if (!is_alive(root) || index[root] != -1) continue;
        call.push_back({root, 0});
        index[root] = low[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame& f = call.back();
            int v = f.v;
            if (f.child < adj[v].size()) {
                int w = adj[v][f.child++];
                if (!is_alive(w)) continue;
                if (index[w] == -1) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
            } else {
                if (low[v] == index[v]) {
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        res.comp[w] = res.count;
                        if (w == v) break;
                    }
                    ++res.count;
                }
                call.pop_back();
                if (!call.empty()) {
                    int p = call.back().v;
                    low[p] = std::min(low[p], low[v]);
                }
            }
        }
    }
    return res;
}

inline std::vector<bool> reachable_from(int n, const std::vector<std::vector<int>>& adj, int start) {
    std::vector<bool> seen(n, false);
    if (start < 0) return seen;
    std::vector<int> todo{start};
    seen[start] = true;
    while (!todo.empty()) {
        int v = todo.back();
        todo.pop_back();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                todo.push_back(w);
            }
    }
    return seen;
}

inline std::vector<bool> backward_reachable(int n, const std::vector<std::vector<int>>& adj,
                                            const std::vector<bool>& targets) {
    std::vector<std::vector<int>> radj(n);
    for (int v = 0; v < n; ++v)
        for (int w : adj[v]) radj[w].push_back(v);
    std::vector<bool> seen(n, false);
    std::vector<int> todo;
    for (int v = 0; v < n; ++v)
        if (targets[v]) {
            seen[v] = true;
            todo.push_back(v);
        }
    while (!todo.empty()) {
        int v = todo.back();
        todo.pop_back();
        for (int w : radj[v])
            if (!seen[w]) {
                seen[w] = true;
                todo.push_back(w);
            }
    }
    return seen;
}

// True iff the subgraph induced by `alive` contains a cycle whose minimal
// color has the given parity (0 = even).
inline bool has_cycle_with_min_parity(int n, const std::vector<std::vector<int>>& adj,
                                      const std::vector<int>& color, int parity,
                                      const std::vector<bool>& alive = {}) {
    auto is_alive = [&](int v) { return alive.empty() || alive[v]; };
    std::vector<int> colors_present;
    for (int v = 0; v < n; ++v)
        if (is_alive(v) && (color[v] & 1) == parity) colors_present.push_back(color[v]);
    std::sort(colors_present.begin(), colors_present.end());
    colors_present.erase(std::unique(colors_present.begin(), colors_present.end()),
                         colors_present.end());

    for (int c : colors_present) {
        std::vector<bool> mask(n, false);
        for (int v = 0; v < n; ++v) mask[v] = is_alive(v) && color[v] >= c;
        SccResult scc = strongly_connected_components(n, adj, mask);
        // component sizes and self-loop detection
        std::vector<int> comp_size(scc.count, 0);
        std::vector<bool> comp_cycle(scc.count, false);
        std::vector<bool> comp_hits_c(scc.count, false);
        for (int v = 0; v < n; ++v) {
            if (scc.comp[v] < 0) continue;
            ++comp_size[scc.comp[v]];
            if (color[v] == c) comp_hits_c[scc.comp[v]] = true;
        }
        for (int v = 0; v < n; ++v) {
            if (scc.comp[v] < 0) continue;
            for (int w : adj[v])
                if (w == v && mask[w]) comp_cycle[scc.comp[v]] = true; // self-loop
        }
        for (int k = 0; k < scc.count; ++k)
            if (comp_size[k] > 1) comp_cycle[k] = true;
        for (int k = 0; k < scc.count; ++k)
            if (comp_cycle[k] && comp_hits_c[k]) return true;
    }
    return false;
}

} // namespace upsynth
