// predicate.hpp -- ultimately periodic predicates: representation,
// canonicalization, text literals, MLO definability, and period extraction
// from parameter machines.
#pragma once

#include <numeric>
#include <string>
#include <vector>

#include "upsynth/automata.hpp"
#include "upsynth/errors.hpp"
#include "upsynth/formula.hpp"
#include "upsynth/machine.hpp"

namespace upsynth {

// prefix . period^omega over {0,1}; period nonempty.
struct UPPredicate {
    std::string prefix;
    std::string period;

    UPPredicate() : period("0") {}
    UPPredicate(std::string u, std::string v) : prefix(std::move(u)), period(std::move(v)) {
        if (period.empty()) throw Error("UP predicate needs a nonempty period");
        for (char c : prefix + period)
            if (c != '0' && c != '1') throw Error("UP predicate words are over {0,1}");
    }

    int bit_at(std::size_t n) const {
        if (n < prefix.size()) return prefix[n] - '0';
        return period[(n - prefix.size()) % period.size()] - '0';
    }

    Lasso to_lasso() const {
        std::vector<Letter> u, v;
        for (char c : prefix) u.push_back(static_cast<Letter>(c - '0'));
        for (char c : period) v.push_back(static_cast<Letter>(c - '0'));
        return Lasso(1, u, v);
    }

    static UPPredicate from_lasso(const Lasso& w) {
        if (w.width != 1) throw WidthError("UP predicate lasso must have width 1");
        std::string u, v;
        for (Letter l : w.prefix) u.push_back(static_cast<char>('0' + (l & 1)));
        for (Letter l : w.cycle) v.push_back(static_cast<char>('0' + (l & 1)));
        return UPPredicate(u, v);
    }

    bool operator==(const UPPredicate& o) const {
        return prefix == o.prefix && period == o.period;
    }

    // "u;v" with bits, e.g. "01;10"; the prefix may be empty: ";10"
    std::string literal() const { return prefix + ";" + period; }

    static UPPredicate parse(const std::string& text) {
        auto sep = text.find(';');
        if (sep == std::string::npos)
            throw ParseError("UP literal must be 'prefix;period', got '" + text + "'");
        std::string u = text.substr(0, sep), v = text.substr(sep + 1);
        if (v.empty()) throw ParseError("UP literal has an empty period: '" + text + "'");
        for (char c : u + v)
            if (c != '0' && c != '1') throw ParseError("UP literal must use bits: '" + text + "'");
        return UPPredicate(u, v);
    }
};

// Same denoted set with minimal |period|, then minimal |prefix|.
inline UPPredicate canonicalize(const UPPredicate& p) {
    return UPPredicate::from_lasso(lasso_canonical(p.to_lasso()));
}

inline bool same_denotation(const UPPredicate& a, const UPPredicate& b) {
    return canonicalize(a) == canonicalize(b);
}

// Zip several width-1 lassos into one word over a bit-tuple alphabet: prefixes
// padded to the longest, periods joined at their lcm.
inline Lasso zip_lassos(const std::vector<Lasso>& tracks) {
    if (tracks.empty()) return Lasso(0, {}, {0});
    std::size_t prefix_len = 0, period_len = 1;
    for (const auto& t : tracks) {
        if (t.width != 1) throw WidthError("zip_lassos expects width-1 tracks");
        prefix_len = std::max(prefix_len, t.prefix.size());
        period_len = std::lcm(period_len, t.cycle.size());
        if (period_len > (std::size_t(1) << 20)) throw CapacityError("zip_lassos: period blow-up");
    }
    int width = static_cast<int>(tracks.size());
    std::vector<Letter> u(prefix_len, 0), v(period_len, 0);
    for (std::size_t n = 0; n < prefix_len + period_len; ++n) {
        Letter l = 0;
        for (std::size_t j = 0; j < tracks.size(); ++j)
            if (tracks[j].at(n) & 1) l |= Letter(1) << j;
        if (n < prefix_len)
            u[n] = l;
        else
            v[n - prefix_len] = l;
    }
    return Lasso(width, u, v);
}

// ---------------------------------------------------------------------------
// phi_p(V): holds in <Nat,<> exactly when V denotes p. Pins the first
// |prefix|+|period| bits and states the period from |prefix| onwards.
inline Formula up_to_formula(const UPPredicate& pred, const std::string& var) {
    UPPredicate p = canonicalize(pred);
    NameGen gen;
    gen.avoid(var);
    int total = static_cast<int>(p.prefix.size() + p.period.size());

    std::vector<Formula> clauses;
    for (int i = 0; i < total; ++i) {
        std::string t = gen.fresh("t");
        Formula here = fml::exists_fo(t, fml::conj(fml::at_position(i, t, gen), fml::in(t, var)));
        clauses.push_back(p.bit_at(std::size_t(i)) ? here : fml::neg(here));
    }

    // all t >= |prefix|: t in V <-> t+|period| in V
    std::string t = gen.fresh("t"), u = gen.fresh("t"), anchor = gen.fresh("a");
    Formula beyond =
        p.prefix.empty()
            ? fml::verum(gen.fresh("z"))
            : fml::exists_fo(anchor,
                             fml::conj(fml::at_position(static_cast<int>(p.prefix.size()), anchor, gen),
                                       fml::neg(fml::less(t, anchor))));
    Formula step = fml::forall_fo(
        t, fml::implies(beyond,
                        fml::forall_fo(u, fml::implies(
                                              fml::succ_k_rel(t, u, static_cast<int>(p.period.size()), gen),
                                              fml::iff(fml::in(t, var), fml::in(u, var))))));
    clauses.push_back(step);
    return normalize(fml::conj_all(clauses));
}

// Membership of a concrete UP set as a formula of one free element variable:
// prefix positions are named outright; periodic positions are reached through
// closure under +|period| from their anchor in the first full period.
inline Formula up_membership_formula(const UPPredicate& pred, const std::string& t, NameGen& gen) {
    UPPredicate p = canonicalize(pred);
    std::vector<Formula> cases;
    for (std::size_t i = 0; i < p.prefix.size(); ++i)
        if (p.prefix[i] == '1')
            cases.push_back(fml::at_position(static_cast<int>(i), t, gen));
    int period = static_cast<int>(p.period.size());
    for (int j = 0; j < period; ++j) {
        if (p.period[std::size_t(j)] != '1') continue;
        int anchor_pos = static_cast<int>(p.prefix.size()) + j;
        // t belongs to the smallest set containing the anchor and closed under +period
        std::string set = gen.fresh("C"), x = gen.fresh("x"), y = gen.fresh("y"), a = gen.fresh("a");
        Formula contains_anchor =
            fml::exists_fo(a, fml::conj(fml::at_position(anchor_pos, a, gen), fml::in(a, set)));
        Formula closed = fml::forall_fo(
            x, fml::forall_fo(y, fml::implies(fml::conj(fml::in(x, set),
                                                        fml::succ_k_rel(x, y, period, gen)),
                                              fml::in(y, set))));
        cases.push_back(fml::forall_so(
            set, fml::implies(fml::conj(contains_anchor, closed), fml::in(t, set))));
    }
    return fml::disj_all(cases);
}

// ---------------------------------------------------------------------------
// Theorem-style period extraction: drive the machine on its own output (the
// claim X(t) <-> P(t+1) forces the next input), find a repeated (state, bit)
// pair, and read the prefix/period off the trace. An n-state machine repeats
// within 2n+1 steps, so |prefix|+|period| <= 2n+1 before canonicalization.
inline Formula alpha_formula(const std::string& x, const std::string& p) {
    NameGen gen;
    gen.avoid(x);
    gen.avoid(p);
    std::string t = gen.fresh("t"), u = gen.fresh("u");
    return normalize(fml::forall_fo(
        t, fml::iff(fml::in(t, x), fml::exists_fo(u, fml::conj(fml::succ_rel(t, u, gen),
                                                               fml::in(u, p))))));
}

inline UPPredicate extract_period_from_machine(const CMachine& m, const Formula& p_check) {
    // the supported claim shape is alpha(X,P) = all t. (X(t) <-> P(t+1))
    FreeVars fv = free_vars(p_check);
    bool shape_ok = false;
    if (fv.first_order.empty() && fv.second_order.size() == 2) {
        std::vector<std::string> names(fv.second_order.begin(), fv.second_order.end());
        for (int swap = 0; swap < 2 && !shape_ok; ++swap) {
            const std::string& x = names[std::size_t(swap)];
            const std::string& p = names[std::size_t(1 - swap)];
            if (normalize(p_check) == alpha_formula(x, p)) shape_ok = true;
        }
    }
    if (!shape_ok)
        throw InconsistencyError(
            "extract_period_from_machine: claim formula is not an instance of "
            "all t. (X(t) <-> P(t+1))");

    // self-driven run from input bit 0
    int q = m.initial;
    int a = 0;
    std::vector<int> bits;
    std::map<std::pair<int, int>, std::size_t> seen;
    std::size_t cycle_start = 0;
    while (true) {
        auto key = std::make_pair(q, a);
        auto it = seen.find(key);
        if (it != seen.end()) {
            cycle_start = it->second;
            break;
        }
        seen.emplace(key, bits.size());
        bits.push_back(a);
        int next_a = m.output(q, a);
        q = m.step(q, a);
        a = next_a;
    }
    std::string u, v;
    for (std::size_t i = 0; i < bits.size(); ++i)
        (i < cycle_start ? u : v).push_back(static_cast<char>('0' + bits[i]));
    UPPredicate raw(u, v);

    // consistency: rerun the machine on the extracted predicate and confirm
    // the outputs reproduce the shifted predicate
    {
        int qq = m.initial;
        std::size_t horizon = 2 * raw.prefix.size() + 4 * raw.period.size() + 4;
        for (std::size_t t = 0; t < horizon; ++t) {
            int in_bit = raw.bit_at(t);
            int out_bit = m.output(qq, in_bit);
            if (out_bit != raw.bit_at(t + 1))
                throw InconsistencyError("machine output contradicts the claimed shift at step " +
                                         std::to_string(t));
            qq = m.step(qq, in_bit);
        }
    }

    UPPredicate result = canonicalize(raw);
    if (result.period.size() > 2 * static_cast<std::size_t>(m.num_states))
        throw Error("extract_period_from_machine: period exceeds 2n, which cannot happen");
    return result;
}

} // namespace upsynth
