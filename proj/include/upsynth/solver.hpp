// solver.hpp -- parity game solving with memoryless strategies for both
// players: recursive (Zielonka-style) solver, a brute-force oracle, and an
// independent solution checker.
//
// Player II wins a play iff the minimal color occurring infinitely often is
// even; Player I wins iff it is odd.
#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "upsynth/arena.hpp"
#include "upsynth/errors.hpp"
#include "upsynth/graph.hpp"

namespace upsynth {

struct Solution {
    std::vector<Player> winner;    // per vertex
    std::vector<int> strategy;     // edge label, -1 where undefined

    Solution() = default;
    explicit Solution(int n) : winner(std::size_t(n), Player::I), strategy(std::size_t(n), -1) {}
};

// Least superset of `target` from which `player` can force entry in one step.
// Witness edges (for player-owned vertices outside the target) are written to
// `strategy_out` when provided; ties break toward the lower edge label.
inline std::vector<bool> attractor(const ParityGame& g, const std::vector<bool>& alive,
                                   std::vector<bool> target, Player player,
                                   std::vector<int>* strategy_out = nullptr) {
    int n = g.size();
    std::vector<int> escape_count(std::size_t(n), 0);
    std::vector<std::vector<int>> preds{};
    preds.resize(std::size_t(n));
    for (int v = 0; v < n; ++v) {
        if (!alive[std::size_t(v)]) continue;
        int out = 0;
        for (int b = 0; b < 2; ++b) {
            int w = g.verts[std::size_t(v)].succ[b];
            if (alive[std::size_t(w)]) {
                preds[std::size_t(w)].push_back(v);
                ++out;
            }
        }
        escape_count[std::size_t(v)] = out;
    }
    std::vector<bool> attr = target;
    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
        if (alive[std::size_t(v)] && attr[std::size_t(v)]) queue.push_back(v);
    std::size_t head = 0;
    auto try_add = [&](int v) {
        if (attr[std::size_t(v)]) return;
        attr[std::size_t(v)] = true;
        queue.push_back(v);
    };
    while (head < queue.size()) {
        int w = queue[head++];
        for (int v : preds[std::size_t(w)]) {
            if (attr[std::size_t(v)]) continue;
            if (g.verts[std::size_t(v)].owner == player) {
                if (strategy_out && (*strategy_out)[std::size_t(v)] < 0) {
                    for (int b = 0; b < 2; ++b) {
                        int t = g.verts[std::size_t(v)].succ[b];
                        if (alive[std::size_t(t)] && attr[std::size_t(t)]) {
                            (*strategy_out)[std::size_t(v)] = b;
                            break;
                        }
                    }
                }
                try_add(v);
            } else {
                if (--escape_count[std::size_t(v)] == 0) try_add(v);
            }
        }
    }
    return attr;
}

inline std::vector<bool> attractor(const ParityGame& g, std::vector<bool> target, Player player) {
    std::vector<bool> alive(std::size_t(g.size()), true);
    return attractor(g, alive, std::move(target), player, nullptr);
}

namespace detail {

struct Regions {
    std::vector<bool> win_i, win_ii;
    std::vector<int> strat; // valid inside the corresponding winner's region
};

inline Regions zielonka(const ParityGame& g, std::vector<bool> alive) {
    int n = g.size();
    Regions res;
    res.win_i.assign(std::size_t(n), false);
    res.win_ii.assign(std::size_t(n), false);
    res.strat.assign(std::size_t(n), -1);

    int min_color = -1;
    for (int v = 0; v < n; ++v)
        if (alive[std::size_t(v)])
            min_color = min_color < 0 ? g.verts[std::size_t(v)].color
                                      : std::min(min_color, g.verts[std::size_t(v)].color);
    if (min_color < 0) return res; // empty subgame

    Player sigma = min_color % 2 == 0 ? Player::II : Player::I;
    std::vector<bool> target(std::size_t(n), false);
    for (int v = 0; v < n; ++v)
        if (alive[std::size_t(v)] && g.verts[std::size_t(v)].color == min_color)
            target[std::size_t(v)] = true;

    std::vector<int> attr_strat(std::size_t(n), -1);
    std::vector<bool> attr = attractor(g, alive, target, sigma, &attr_strat);

    std::vector<bool> rest = alive;
    for (int v = 0; v < n; ++v)
        if (attr[std::size_t(v)]) rest[std::size_t(v)] = false;
    Regions sub = zielonka(g, rest);

    auto& win_sigma = sigma == Player::I ? sub.win_i : sub.win_ii;
    auto& win_opp = sigma == Player::I ? sub.win_ii : sub.win_i;

    bool opp_empty = true;
    for (int v = 0; v < n; ++v)
        if (win_opp[std::size_t(v)]) opp_empty = false;

    if (opp_empty) {
        auto& res_sigma = sigma == Player::I ? res.win_i : res.win_ii;
        for (int v = 0; v < n; ++v)
            if (alive[std::size_t(v)]) res_sigma[std::size_t(v)] = true;
        for (int v = 0; v < n; ++v) {
            if (!alive[std::size_t(v)] || g.verts[std::size_t(v)].owner != sigma) continue;
            if (win_sigma[std::size_t(v)])
                res.strat[std::size_t(v)] = sub.strat[std::size_t(v)];
            else if (target[std::size_t(v)]) {
                // stay inside the subgame; lowest such edge
                for (int b = 0; b < 2; ++b)
                    if (alive[std::size_t(g.verts[std::size_t(v)].succ[b])]) {
                        res.strat[std::size_t(v)] = b;
                        break;
                    }
            } else {
                res.strat[std::size_t(v)] = attr_strat[std::size_t(v)];
            }
        }
        return res;
    }

    // the opponent keeps their subgame region; attract toward it
    std::vector<bool> opp_region = win_opp;
    std::vector<int> opp_attr_strat(std::size_t(n), -1);
    std::vector<bool> opp_attr = attractor(g, alive, opp_region, opponent(sigma), &opp_attr_strat);

    std::vector<bool> rest2 = alive;
    for (int v = 0; v < n; ++v)
        if (opp_attr[std::size_t(v)]) rest2[std::size_t(v)] = false;
    Regions sub2 = zielonka(g, rest2);

    res.win_i = sub2.win_i;
    res.win_ii = sub2.win_ii;
    res.strat = sub2.strat;
    auto& res_opp = sigma == Player::I ? res.win_ii : res.win_i;
    for (int v = 0; v < n; ++v)
        if (opp_attr[std::size_t(v)]) res_opp[std::size_t(v)] = true;
    for (int v = 0; v < n; ++v) {
        if (!alive[std::size_t(v)] || g.verts[std::size_t(v)].owner != opponent(sigma)) continue;
        if (win_opp[std::size_t(v)])
            res.strat[std::size_t(v)] = sub.strat[std::size_t(v)];
        else if (opp_attr[std::size_t(v)] && res.strat[std::size_t(v)] < 0)
            res.strat[std::size_t(v)] = opp_attr_strat[std::size_t(v)];
    }
    return res;
}

// all simple-cycle reachability analysis on the one-player residual graph:
// vertices from which a cycle with min color of the given parity is reachable
inline std::vector<bool> can_reach_parity_cycle(const ParityGame& g,
                                                const std::vector<std::vector<int>>& adj,
                                                int parity) {
    int n = g.size();
    std::vector<int> color = g.colors();
    std::vector<bool> core(std::size_t(n), false);
    std::vector<int> clist;
    for (int v = 0; v < n; ++v)
        if ((color[std::size_t(v)] & 1) == parity) clist.push_back(color[std::size_t(v)]);
    std::sort(clist.begin(), clist.end());
    clist.erase(std::unique(clist.begin(), clist.end()), clist.end());
    for (int c : clist) {
        std::vector<bool> mask(std::size_t(n), false);
        for (int v = 0; v < n; ++v) mask[std::size_t(v)] = color[std::size_t(v)] >= c;
        SccResult scc = strongly_connected_components(n, adj, mask);
        std::vector<int> size(std::size_t(scc.count), 0);
        std::vector<bool> has_edge(std::size_t(scc.count), false);
        std::vector<bool> has_c(std::size_t(scc.count), false);
        for (int v = 0; v < n; ++v) {
            if (scc.comp[std::size_t(v)] < 0) continue;
            ++size[std::size_t(scc.comp[std::size_t(v)])];
            if (color[std::size_t(v)] == c) has_c[std::size_t(scc.comp[std::size_t(v)])] = true;
            for (int w : adj[std::size_t(v)])
                if (w == v && mask[std::size_t(w)]) has_edge[std::size_t(scc.comp[std::size_t(v)])] = true;
        }
        for (int k = 0; k < scc.count; ++k)
            if (size[std::size_t(k)] > 1) has_edge[std::size_t(k)] = true;
        for (int v = 0; v < n; ++v)
            if (scc.comp[std::size_t(v)] >= 0 && has_edge[std::size_t(scc.comp[std::size_t(v)])] &&
                has_c[std::size_t(scc.comp[std::size_t(v)])])
                core[std::size_t(v)] = true;
    }
    return backward_reachable(n, adj, core);
}

} // namespace detail

inline Solution solve(const ParityGame& g) {
    std::vector<bool> alive(std::size_t(g.size()), true);
    detail::Regions r = detail::zielonka(g, std::move(alive));
    Solution s(g.size());
    for (int v = 0; v < g.size(); ++v) {
        s.winner[std::size_t(v)] = r.win_ii[std::size_t(v)] ? Player::II : Player::I;
        const auto& vert = g.verts[std::size_t(v)];
        bool own_region = (vert.owner == Player::I && r.win_i[std::size_t(v)]) ||
                          (vert.owner == Player::II && r.win_ii[std::size_t(v)]);
        s.strategy[std::size_t(v)] = own_region ? r.strat[std::size_t(v)] : -1;
    }
    return s;
}

// Exhaustive oracle: enumerate all memoryless strategies of each player and
// analyze the residual one-player graphs. Limited to 14 vertices.
inline Solution brute_force_solve(const ParityGame& g) {
    int n = g.size();
    if (n > 14) throw CapacityError("brute_force_solve: more than 14 vertices");

    auto region_for = [&](Player player) {
        std::vector<int> owned;
        for (int v = 0; v < n; ++v)
            if (g.verts[std::size_t(v)].owner == player) owned.push_back(v);
        int bad_parity = player == Player::I ? 0 : 1; // cycles the player must avoid
        std::size_t combos = std::size_t(1) << owned.size();

        auto wins_of = [&](std::size_t mask, std::vector<int>& choice) {
            choice.assign(std::size_t(n), -1);
            for (std::size_t i = 0; i < owned.size(); ++i)
                choice[std::size_t(owned[i])] = (mask >> i) & 1;
            std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
            for (int v = 0; v < n; ++v) {
                if (choice[std::size_t(v)] >= 0)
                    adj[std::size_t(v)].push_back(g.verts[std::size_t(v)].succ[choice[std::size_t(v)]]);
                else {
                    adj[std::size_t(v)].push_back(g.verts[std::size_t(v)].succ[0]);
                    if (g.verts[std::size_t(v)].succ[1] != g.verts[std::size_t(v)].succ[0])
                        adj[std::size_t(v)].push_back(g.verts[std::size_t(v)].succ[1]);
                }
            }
            std::vector<bool> bad = detail::can_reach_parity_cycle(g, adj, bad_parity);
            std::vector<bool> wins(static_cast<std::size_t>(n));
            for (int v = 0; v < n; ++v) wins[std::size_t(v)] = !bad[std::size_t(v)];
            return wins;
        };

        std::vector<bool> best(std::size_t(n), false);
        std::vector<int> choice;
        for (std::size_t mask = 0; mask < combos; ++mask) {
            auto wins = wins_of(mask, choice);
            for (int v = 0; v < n; ++v)
                if (wins[std::size_t(v)]) best[std::size_t(v)] = true;
        }
        // by memoryless determinacy some single strategy wins on the whole union
        std::vector<int> uniform_strat(std::size_t(n), -1);
        for (std::size_t mask = 0; mask < combos; ++mask) {
            auto wins = wins_of(mask, choice);
            bool covers = true;
            for (int v = 0; v < n; ++v)
                if (best[std::size_t(v)] && !wins[std::size_t(v)]) covers = false;
            if (covers) {
                uniform_strat = choice;
                break;
            }
        }
        return std::make_pair(best, uniform_strat);
    };

    auto [win_i, strat_i] = region_for(Player::I);
    auto [win_ii, strat_ii] = region_for(Player::II);
    for (int v = 0; v < n; ++v)
        if (win_i[std::size_t(v)] == win_ii[std::size_t(v)])
            throw Error("brute_force_solve: determinacy violated; solver bug");

    Solution s(n);
    for (int v = 0; v < n; ++v) {
        s.winner[std::size_t(v)] = win_ii[std::size_t(v)] ? Player::II : Player::I;
        const auto& vert = g.verts[std::size_t(v)];
        if (vert.owner == Player::I && win_i[std::size_t(v)]) s.strategy[std::size_t(v)] = strat_i[std::size_t(v)];
        if (vert.owner == Player::II && win_ii[std::size_t(v)]) s.strategy[std::size_t(v)] = strat_ii[std::size_t(v)];
    }
    return s;
}

// True iff strategy domains are exact, strategy and opponent edges stay inside
// the winning regions, and every reachable cycle of the strategy-restricted
// region subgraph has the winner's parity.
inline bool verify_solution(const ParityGame& g, const Solution& s) {
    int n = g.size();
    if (static_cast<int>(s.winner.size()) != n || static_cast<int>(s.strategy.size()) != n)
        return false;
    for (int v = 0; v < n; ++v) {
        const auto& vert = g.verts[std::size_t(v)];
        bool own_region = (vert.owner == Player::I && s.winner[std::size_t(v)] == Player::I) ||
                          (vert.owner == Player::II && s.winner[std::size_t(v)] == Player::II);
        if (own_region != (s.strategy[std::size_t(v)] >= 0)) return false;
        if (s.strategy[std::size_t(v)] >= 0 && s.strategy[std::size_t(v)] > 1) return false;
    }
    for (Player p : {Player::I, Player::II}) {
        std::vector<bool> region(std::size_t(n), false);
        for (int v = 0; v < n; ++v) region[std::size_t(v)] = s.winner[std::size_t(v)] == p;
        std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
        for (int v = 0; v < n; ++v) {
            if (!region[std::size_t(v)]) continue;
            const auto& vert = g.verts[std::size_t(v)];
            if (vert.owner == p) {
                int w = vert.succ[s.strategy[std::size_t(v)]];
                if (!region[std::size_t(w)]) return false; // strategy leaves the region
                adj[std::size_t(v)].push_back(w);
            } else {
                for (int b = 0; b < 2; ++b) {
                    int w = vert.succ[b];
                    if (!region[std::size_t(w)]) return false; // opponent escapes
                    if (b == 0 || w != vert.succ[0]) adj[std::size_t(v)].push_back(w);
                }
            }
        }
        int bad_parity = p == Player::II ? 1 : 0;
        if (has_cycle_with_min_parity(n, adj, g.colors(), bad_parity, region)) return false;
    }
    return true;
}

inline std::string solution_to_text(const ParityGame& g, const Solution& s) {
    std::ostringstream os;
    for (int v = 0; v < g.size(); ++v) {
        os << g.vertex_name(v) << ' ' << player_name(s.winner[std::size_t(v)]);
        if (s.strategy[std::size_t(v)] >= 0) os << ' ' << s.strategy[std::size_t(v)];
        os << '\n';
    }
    return os.str();
}

} // namespace upsynth
