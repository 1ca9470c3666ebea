// machine.hpp -- finite-state causal and strongly causal bit operators.
//
// A CMachine emits out(state, current input) each step: output at t depends
// on inputs 0..t. An SCMachine emits out(state) on entering a state, including
// the initial state at t=0: output at t depends on inputs 0..t-1.
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "upsynth/automata.hpp"
#include "upsynth/errors.hpp"

namespace upsynth {

struct CMachine {
    int num_states = 0;
    int initial = 0;
    std::vector<std::array<int, 2>> trans;
    std::vector<std::array<std::uint8_t, 2>> out;

    explicit CMachine(int n = 1) : num_states(n), trans(n, {0, 0}), out(n, {0, 0}) {}

    int output(int q, int a) const { return out[std::size_t(q)][std::size_t(a)]; }
    int step(int q, int a) const { return trans[std::size_t(q)][std::size_t(a)]; }
};

struct SCMachine {
    int num_states = 0;
    int initial = 0;
    std::vector<std::array<int, 2>> trans;
    std::vector<std::uint8_t> out;

    explicit SCMachine(int n = 1) : num_states(n), trans(n, {0, 0}), out(n, 0) {}

    int output(int q) const { return out[std::size_t(q)]; }
    int step(int q, int a) const { return trans[std::size_t(q)][std::size_t(a)]; }
};

// ---------------------------------------------------------------------------
// Execution on ultimately periodic input. Output lasso found by iterating the
// input cycle until the machine state repeats at cycle phase 0; canonicalized.
namespace detail {

template <class Step>
inline Lasso run_bit_machine(int initial, const Lasso& input, Step step) {
    if (input.width != 1) throw WidthError("machine input lasso must have width 1");
    int q = initial;
    std::vector<Letter> out_bits;
    for (Letter l : input.prefix) {
        auto [o, nq] = step(q, static_cast<int>(l & 1));
        out_bits.push_back(static_cast<Letter>(o));
        q = nq;
    }
    std::map<int, std::size_t> crossing; // machine state at cycle phase 0 -> index in out_bits
    std::size_t cycle_start = 0;
    while (true) {
        auto it = crossing.find(q);
        if (it != crossing.end()) {
            cycle_start = it->second;
            break;
        }
        crossing.emplace(q, out_bits.size());
        for (Letter l : input.cycle) {
            auto [o, nq] = step(q, static_cast<int>(l & 1));
            out_bits.push_back(static_cast<Letter>(o));
            q = nq;
        }
    }
    std::vector<Letter> prefix(out_bits.begin(), out_bits.begin() + static_cast<long>(cycle_start));
    std::vector<Letter> cycle(out_bits.begin() + static_cast<long>(cycle_start), out_bits.end());
    return lasso_canonical(Lasso(1, prefix, cycle));
}

} // namespace detail

inline Lasso run_on_lasso(const CMachine& m, const Lasso& input) {
    return detail::run_bit_machine(m.initial, input, [&](int q, int a) {
        return std::pair<int, int>(m.output(q, a), m.step(q, a));
    });
}

inline Lasso run_on_lasso(const SCMachine& m, const Lasso& input) {
    return detail::run_bit_machine(m.initial, input, [&](int q, int a) {
        return std::pair<int, int>(m.output(q), m.step(q, a));
    });
}

// Unique fixed point of a strongly causal operator: feed each output back as
// the next input; the state sequence is eventually periodic.
inline Lasso sc_fixed_point(const SCMachine& m) {
    std::map<int, std::size_t> seen;
    std::vector<Letter> bits;
    int q = m.initial;
    std::size_t cycle_start = 0;
    while (true) {
        auto it = seen.find(q);
        if (it != seen.end()) {
            cycle_start = it->second;
            break;
        }
        seen.emplace(q, bits.size());
        int b = m.output(q);
        bits.push_back(static_cast<Letter>(b));
        q = m.step(q, b);
    }
    std::vector<Letter> prefix(bits.begin(), bits.begin() + static_cast<long>(cycle_start));
    std::vector<Letter> cycle(bits.begin() + static_cast<long>(cycle_start), bits.end());
    return lasso_canonical(Lasso(1, prefix, cycle));
}

// H = lambda X. g(f(X)); strongly causal because g is.
inline SCMachine compose_sc_after_c(const SCMachine& g, const CMachine& f) {
    SCMachine h(f.num_states * g.num_states);
    auto id = [&](int qf, int qg) { return qf * g.num_states + qg; };
    h.initial = id(f.initial, g.initial);
    for (int qf = 0; qf < f.num_states; ++qf)
        for (int qg = 0; qg < g.num_states; ++qg) {
            h.out[std::size_t(id(qf, qg))] = static_cast<std::uint8_t>(g.output(qg));
            for (int x = 0; x < 2; ++x) {
                int y = f.output(qf, x);
                h.trans[std::size_t(id(qf, qg))][std::size_t(x)] = id(f.step(qf, x), g.step(qg, y));
            }
        }
    return h;
}

// ---------------------------------------------------------------------------
// Reachable pruning plus Hopcroft-style partition refinement. Class ids are
// assigned in order of the smallest member state, so minimized machines come
// out the same across runs.
namespace detail {

inline std::vector<int> refine_classes(int n, const std::vector<std::array<int, 2>>& trans,
                                       std::vector<int> cls) {
    while (true) {
        std::map<std::array<int, 3>, int> ids;
        std::vector<int> next(static_cast<std::size_t>(n));
        for (int q = 0; q < n; ++q) {
            std::array<int, 3> sig{cls[std::size_t(q)], cls[std::size_t(trans[std::size_t(q)][0])],
                                   cls[std::size_t(trans[std::size_t(q)][1])]};
            auto it = ids.find(sig);
            if (it == ids.end()) it = ids.emplace(sig, static_cast<int>(ids.size())).first;
            next[std::size_t(q)] = it->second;
        }
        if (next == cls) return cls;
        cls = std::move(next);
    }
}

inline std::vector<int> canonical_class_order(const std::vector<int>& cls, int initial) {
    // renumber classes: initial's class first, then by smallest member
    int m = 1 + *std::max_element(cls.begin(), cls.end());
    std::vector<int> first_member(static_cast<std::size_t>(m), -1);
    for (int q = 0; q < static_cast<int>(cls.size()); ++q)
        if (first_member[std::size_t(cls[std::size_t(q)])] < 0) first_member[std::size_t(cls[std::size_t(q)])] = q;
    std::vector<int> order(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) order[std::size_t(k)] = k;
    std::sort(order.begin(), order.end(), [&](int x, int y) {
        bool xi = x == cls[std::size_t(initial)], yi = y == cls[std::size_t(initial)];
        if (xi != yi) return xi;
        return first_member[std::size_t(x)] < first_member[std::size_t(y)];
    });
    std::vector<int> rank(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) rank[std::size_t(order[std::size_t(i)])] = i;
    std::vector<int> out(cls.size());
    for (std::size_t q = 0; q < cls.size(); ++q) out[q] = rank[std::size_t(cls[q])];
    return out;
}

template <class M>
inline M prune_reachable(const M& m) {
    std::vector<int> remap(static_cast<std::size_t>(m.num_states), -1);
    std::vector<int> todo{m.initial};
    remap[std::size_t(m.initial)] = 0;
    int cnt = 1;
    std::size_t head = 0;
    std::vector<int> order{m.initial};
    while (head < order.size()) {
        int q = order[head++];
        for (int a = 0; a < 2; ++a) {
            int r = m.trans[std::size_t(q)][std::size_t(a)];
            if (remap[std::size_t(r)] < 0) {
                remap[std::size_t(r)] = cnt++;
                order.push_back(r);
            }
        }
    }
    M out(cnt);
    out.initial = 0;
    for (int q = 0; q < m.num_states; ++q) {
        if (remap[std::size_t(q)] < 0) continue;
        out.out[std::size_t(remap[std::size_t(q)])] = m.out[std::size_t(q)];
        for (int a = 0; a < 2; ++a)
            out.trans[std::size_t(remap[std::size_t(q)])][std::size_t(a)] =
                remap[std::size_t(m.trans[std::size_t(q)][std::size_t(a)])];
    }
    return out;
}

} // namespace detail

inline CMachine minimize(const CMachine& input) {
    CMachine m = detail::prune_reachable(input);
    std::map<std::array<int, 2>, int> out_ids;
    std::vector<int> cls(static_cast<std::size_t>(m.num_states));
    for (int q = 0; q < m.num_states; ++q) {
        std::array<int, 2> o{m.output(q, 0), m.output(q, 1)};
        auto it = out_ids.find(o);
        if (it == out_ids.end()) it = out_ids.emplace(o, static_cast<int>(out_ids.size())).first;
        cls[std::size_t(q)] = it->second;
    }
    cls = detail::refine_classes(m.num_states, m.trans, std::move(cls));
    cls = detail::canonical_class_order(cls, m.initial);
    int k = 1 + *std::max_element(cls.begin(), cls.end());
    CMachine out(k);
    out.initial = cls[std::size_t(m.initial)];
    for (int q = 0; q < m.num_states; ++q) {
        out.out[std::size_t(cls[std::size_t(q)])] = m.out[std::size_t(q)];
        for (int a = 0; a < 2; ++a)
            out.trans[std::size_t(cls[std::size_t(q)])][std::size_t(a)] = cls[std::size_t(m.step(q, a))];
    }
    return out;
}

inline SCMachine minimize(const SCMachine& input) {
    SCMachine m = detail::prune_reachable(input);
    std::vector<int> cls(static_cast<std::size_t>(m.num_states));
    for (int q = 0; q < m.num_states; ++q) cls[std::size_t(q)] = m.output(q);
    cls = detail::refine_classes(m.num_states, m.trans, std::move(cls));
    cls = detail::canonical_class_order(cls, m.initial);
    int k = 1 + *std::max_element(cls.begin(), cls.end());
    SCMachine out(k);
    out.initial = cls[std::size_t(m.initial)];
    for (int q = 0; q < m.num_states; ++q) {
        out.out[std::size_t(cls[std::size_t(q)])] = m.out[std::size_t(q)];
        for (int a = 0; a < 2; ++a)
            out.trans[std::size_t(cls[std::size_t(q)])][std::size_t(a)] = cls[std::size_t(m.step(q, a))];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Transition table format: header "cmachine <n>" or "scmachine <n>", a line
// "init <q>", then one row "state input / output nextstate" per transition.
inline std::string to_table(const CMachine& m) {
    std::ostringstream os;
    os << "cmachine " << m.num_states << "\ninit " << m.initial << '\n';
    for (int q = 0; q < m.num_states; ++q)
        for (int a = 0; a < 2; ++a)
            os << q << ' ' << a << " / " << m.output(q, a) << ' ' << m.step(q, a) << '\n';
    return os.str();
}

inline std::string to_table(const SCMachine& m) {
    std::ostringstream os;
    os << "scmachine " << m.num_states << "\ninit " << m.initial << '\n';
    for (int q = 0; q < m.num_states; ++q)
        for (int a = 0; a < 2; ++a)
            os << q << ' ' << a << " / " << m.output(q) << ' ' << m.step(q, a) << '\n';
    return os.str();
}

namespace detail {

struct RawTable {
    bool strongly_causal = false;
    int n = 0;
    int initial = 0;
    std::vector<std::array<int, 2>> trans;
    std::vector<std::array<int, 2>> out;
    std::vector<std::array<bool, 2>> seen;
};

inline RawTable parse_table(const std::string& text) {
    std::istringstream is(text);
    std::string kind;
    RawTable t;
    if (!(is >> kind)) throw ParseError("empty machine table");
    if (kind == "cmachine")
        t.strongly_causal = false;
    else if (kind == "scmachine")
        t.strongly_causal = true;
    else
        throw ParseError("expected 'cmachine' or 'scmachine' header, got '" + kind + "'");
    if (!(is >> t.n) || t.n <= 0) throw ParseError("bad machine state count");
    t.trans.assign(std::size_t(t.n), {0, 0});
    t.out.assign(std::size_t(t.n), {0, 0});
    t.seen.assign(std::size_t(t.n), {false, false});
    std::string tok;
    while (is >> tok) {
        if (tok == "init") {
            if (!(is >> t.initial) || t.initial < 0 || t.initial >= t.n)
                throw ParseError("bad init state");
            continue;
        }
        int q = std::stoi(tok), a, o, r;
        std::string slash;
        if (!(is >> a >> slash >> o >> r) || slash != "/")
            throw ParseError("bad table row");
        if (q < 0 || q >= t.n || r < 0 || r >= t.n || a < 0 || a > 1 || o < 0 || o > 1)
            throw ParseError("table row out of range");
        t.trans[std::size_t(q)][std::size_t(a)] = r;
        t.out[std::size_t(q)][std::size_t(a)] = o;
        t.seen[std::size_t(q)][std::size_t(a)] = true;
    }
    for (int q = 0; q < t.n; ++q)
        for (int a = 0; a < 2; ++a)
            if (!t.seen[std::size_t(q)][std::size_t(a)])
                throw ParseError("missing row for state " + std::to_string(q) + " input " +
                                 std::to_string(a));
    return t;
}

} // namespace detail

inline CMachine cmachine_from_table(const std::string& text) {
    auto t = detail::parse_table(text);
    if (t.strongly_causal) throw ParseError("expected a cmachine table");
    CMachine m(t.n);
    m.initial = t.initial;
    for (int q = 0; q < t.n; ++q)
        for (int a = 0; a < 2; ++a) {
            m.trans[std::size_t(q)][std::size_t(a)] = t.trans[std::size_t(q)][std::size_t(a)];
            m.out[std::size_t(q)][std::size_t(a)] =
                static_cast<std::uint8_t>(t.out[std::size_t(q)][std::size_t(a)]);
        }
    return m;
}

inline SCMachine scmachine_from_table(const std::string& text) {
    auto t = detail::parse_table(text);
    if (!t.strongly_causal) throw ParseError("expected an scmachine table");
    SCMachine m(t.n);
    m.initial = t.initial;
    for (int q = 0; q < t.n; ++q) {
        if (t.out[std::size_t(q)][0] != t.out[std::size_t(q)][1])
            throw ParseError("scmachine output must not depend on the input (state " +
                             std::to_string(q) + ")");
        m.out[std::size_t(q)] = static_cast<std::uint8_t>(t.out[std::size_t(q)][0]);
        for (int a = 0; a < 2; ++a)
            m.trans[std::size_t(q)][std::size_t(a)] = t.trans[std::size_t(q)][std::size_t(a)];
    }
    return m;
}

inline std::string to_dot(const CMachine& m, const std::string& name = "cmachine") {
    std::ostringstream os;
    os << "digraph " << name << " {\n  rankdir=LR;\n  __init [shape=point];\n  __init -> q"
       << m.initial << ";\n";
    for (int q = 0; q < m.num_states; ++q) os << "  q" << q << " [shape=circle];\n";
    for (int q = 0; q < m.num_states; ++q)
        for (int a = 0; a < 2; ++a)
            os << "  q" << q << " -> q" << m.step(q, a) << " [label=\"" << a << "/"
               << m.output(q, a) << "\"];\n";
    os << "}\n";
    return os.str();
}

inline std::string to_dot(const SCMachine& m, const std::string& name = "scmachine") {
    std::ostringstream os;
    os << "digraph " << name << " {\n  rankdir=LR;\n  __init [shape=point];\n  __init -> q"
       << m.initial << ";\n";
    for (int q = 0; q < m.num_states; ++q)
        os << "  q" << q << " [shape=circle,label=\"" << q << "/" << m.output(q) << "\"];\n";
    for (int q = 0; q < m.num_states; ++q)
        for (int a = 0; a < 2; ++a)
            os << "  q" << q << " -> q" << m.step(q, a) << " [label=\"" << a << "\"];\n";
    os << "}\n";
    return os.str();
}

} // namespace upsynth
