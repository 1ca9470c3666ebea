// compiler.hpp -- MLO formulas to deterministic parity automata and back.
//
// First-order variables ride on singleton tracks; every intermediate language
// is cut down to words whose first-order tracks are exact singletons, so
// complementation composes. Conjunction, disjunction and projection stay on
// Buchi automata; each genuine quantifier alternation costs one
// determinization, taken while the quantified track is still visible.
//
// Every subformula is compiled over its own variable support only and lifted
// to wider alphabets at composition points, so deeply nested quantifiers do
// not inflate the alphabets of unrelated parts.
#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "upsynth/automata.hpp"
#include "upsynth/determinize.hpp"
#include "upsynth/errors.hpp"
#include "upsynth/formula.hpp"
#include "upsynth/machine.hpp"
#include "upsynth/predicate.hpp"

namespace upsynth {

struct TrackAssignment {
    std::vector<std::pair<std::string, VarKind>> order; // track i = order[i]

    int width() const { return static_cast<int>(order.size()); }

    int track_of(const std::string& name) const {
        for (std::size_t i = 0; i < order.size(); ++i)
            if (order[i].first == name) return static_cast<int>(i);
        return -1;
    }

    static TrackAssignment lexicographic(const Formula& f) {
        FreeVars fv = free_vars(f);
        TrackAssignment t;
        std::vector<std::pair<std::string, VarKind>> all;
        for (auto& n : fv.first_order) all.emplace_back(n, VarKind::first_order);
        for (auto& n : fv.second_order) all.emplace_back(n, VarKind::second_order);
        std::sort(all.begin(), all.end());
        t.order = std::move(all);
        return t;
    }

    static TrackAssignment of(std::vector<std::pair<std::string, VarKind>> vars) {
        TrackAssignment t;
        t.order = std::move(vars);
        return t;
    }
};

struct CompileOptions {
    std::size_t max_dpa_states = 100000;
    int max_width = BitAlphabet::max_width;
};

class Compiler {
public:
    explicit Compiler(CompileOptions opts = {}) : opts_(opts) {}

    const CompileOptions& options() const { return opts_; }

    DPA compile(const Formula& f, const TrackAssignment& order) const {
        FreeVars fv = free_vars(f);
        for (auto& n : fv.first_order)
            if (order.track_of(n) < 0) throw Error("compile: free variable '" + n + "' has no track");
        for (auto& n : fv.second_order)
            if (order.track_of(n) < 0) throw Error("compile: free variable '" + n + "' has no track");
        if (order.width() > opts_.max_width)
            throw CapacityError("compile: alphabet width limit of " +
                                std::to_string(opts_.max_width) + " tracks exceeded");
        SlotMap slots;
        for (std::size_t i = 0; i < order.order.size(); ++i)
            slots[order.order[i].first] = {static_cast<int>(i), order.order[i].second};
        Piece piece = compile_piece(f, slots);
        std::vector<std::string> full;
        for (auto& [name, kind] : order.order) full.push_back(name);
        NBA nba = lift(piece, full, slots);
        DPA dpa = determinize(nba_reduce(nba), opts_.max_dpa_states);
        return simplify_dpa(dpa);
    }

    DPA compile(const Formula& f) const { return compile(f, TrackAssignment::lexicographic(f)); }

    // truth of a parameter sentence in <Nat, <, params>
    bool model_check(const Formula& f,
                     const std::vector<std::pair<std::string, UPPredicate>>& params) const {
        FreeVars fv = free_vars(f);
        if (!fv.first_order.empty())
            throw Error("model_check: formula has a free first-order variable '" +
                        *fv.first_order.begin() + "'");
        TrackAssignment order;
        for (auto& n : fv.second_order) {
            bool found = false;
            for (auto& [pn, pv] : params)
                if (pn == n) found = true;
            if (!found) throw Error("model_check: unbound parameter '" + n + "'");
            order.order.emplace_back(n, VarKind::second_order);
        }
        std::sort(order.order.begin(), order.order.end());
        DPA dpa = compile(f, order);
        std::vector<Lasso> tracks;
        for (auto& [name, kind] : order.order) {
            for (auto& [pn, pv] : params)
                if (pn == name) tracks.push_back(pv.to_lasso());
        }
        if (tracks.empty()) {
            // sentence over the bare order: evaluate on the trivial word
            return dpa_accepts_lasso(dpa, Lasso(0, {}, {0}));
        }
        return dpa_accepts_lasso(dpa, zip_lassos(tracks));
    }

    // graph of the operator computed by a machine, as a formula of (in, out)
    Formula machine_to_formula(const CMachine& m, const std::string& in_var,
                               const std::string& out_var) const {
        return machine_formula_impl(m.num_states, m.initial, in_var, out_var,
                                    [&](int q, int a) { return m.step(q, a); },
                                    [&](int q, int a) { return m.output(q, a); });
    }
    Formula machine_to_formula(const SCMachine& m, const std::string& in_var,
                               const std::string& out_var) const {
        return machine_formula_impl(m.num_states, m.initial, in_var, out_var,
                                    [&](int q, int a) { return m.step(q, a); },
                                    [&](int q, int) { return m.output(q); });
    }

private:
    CompileOptions opts_;

    using SlotMap = std::map<std::string, std::pair<int, VarKind>>; // name -> (slot, kind)

    // An automaton over the subformula's own support; names are ordered by
    // their slots, and track i of the NBA is names[i].
    struct Piece {
        NBA nba;
        std::vector<std::string> names;
    };

    mutable std::unordered_map<std::string, Piece> cache_;

    static std::string cache_key(const Formula& f, const std::vector<std::string>& support,
                                 bool negated) {
        std::string key = negated ? "!" : "+";
        key += to_text(f);
        for (auto& n : support) {
            key += '|';
            key += n;
        }
        return key;
    }

    static std::vector<std::string> support_of(const Formula& f, const SlotMap& slots) {
        FreeVars fv = free_vars(f);
        std::vector<std::pair<int, std::string>> tmp;
        for (auto& n : fv.first_order) tmp.emplace_back(slots.at(n).first, n);
        for (auto& n : fv.second_order) tmp.emplace_back(slots.at(n).first, n);
        std::sort(tmp.begin(), tmp.end());
        std::vector<std::string> out;
        for (auto& [slot, name] : tmp) out.push_back(name);
        return out;
    }

    static int rank_in(const std::vector<std::string>& names, const std::string& n) {
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == n) return static_cast<int>(i);
        return -1;
    }

    // Union of supports, ordered by slot.
    std::vector<std::string> union_support(const std::vector<const Piece*>& pieces,
                                           const SlotMap& slots) const {
        std::vector<std::pair<int, std::string>> tmp;
        for (const Piece* p : pieces)
            for (auto& n : p->names) tmp.emplace_back(slots.at(n).first, n);
        std::sort(tmp.begin(), tmp.end());
        tmp.erase(std::unique(tmp.begin(), tmp.end()), tmp.end());
        std::vector<std::string> out;
        for (auto& [slot, name] : tmp) out.push_back(name);
        if (static_cast<int>(out.size()) > opts_.max_width)
            throw CapacityError("compile: alphabet width limit of " +
                                std::to_string(opts_.max_width) + " tracks exceeded");
        return out;
    }

    // Spread a piece over a wider support; added tracks are unconstrained.
    NBA lift(const Piece& p, const std::vector<std::string>& target, const SlotMap&) const {
        if (p.names == target) return p.nba;
        int tw = static_cast<int>(target.size());
        if (tw > opts_.max_width)
            throw CapacityError("compile: alphabet width limit of " +
                                std::to_string(opts_.max_width) + " tracks exceeded");
        std::vector<int> pos;
        for (auto& n : p.names) {
            int r = rank_in(target, n);
            if (r < 0) throw Error("compile: lift target misses variable '" + n + "'");
            pos.push_back(r);
        }
        NBA out(tw, p.nba.num_states);
        out.initial = p.nba.initial;
        out.accepting = p.nba.accepting;
        Letter letters = out.letters();
        for (int q = 0; q < out.num_states; ++q)
            for (Letter l = 0; l < letters; ++l) {
                Letter local = 0;
                for (std::size_t i = 0; i < pos.size(); ++i)
                    if ((l >> pos[i]) & 1) local |= Letter(1) << i;
                out.succ(q, l) = p.nba.succ(q, local);
            }
        return out;
    }

    // --- atom automata ------------------------------------------------------
    static bool bit(Letter l, int track) { return (l >> track) & 1; }

    // track holds exactly one element
    static NBA singleton_nba(int width, int track) {
        NBA a(width, 2);
        a.initial = 0;
        a.accepting[1] = true;
        for (Letter l = 0; l < a.letters(); ++l) {
            if (bit(l, track))
                a.add_edge(0, l, 1);
            else
                a.add_edge(0, l, 0);
            if (!bit(l, track)) a.add_edge(1, l, 1);
        }
        return a;
    }

    static NBA atom_less(int width, int ta, int tb) {
        NBA a(width, 3);
        a.initial = 0;
        a.accepting[2] = true;
        for (Letter l = 0; l < a.letters(); ++l) {
            bool xa = bit(l, ta), xb = bit(l, tb);
            if (!xa && !xb) a.add_edge(0, l, 0);
            if (xa && !xb) a.add_edge(0, l, 1);
            if (!xa && !xb) a.add_edge(1, l, 1);
            if (xb && !xa) a.add_edge(1, l, 2);
            if (!xa && !xb) a.add_edge(2, l, 2);
        }
        return a;
    }

    // positions equal or reversed: the complement of < within singleton words
    static NBA atom_not_less(int width, int ta, int tb) {
        NBA a(width, 3);
        a.initial = 0;
        a.accepting[2] = true;
        for (Letter l = 0; l < a.letters(); ++l) {
            bool xa = bit(l, ta), xb = bit(l, tb);
            if (!xa && !xb) a.add_edge(0, l, 0);
            if (xa && xb) a.add_edge(0, l, 2);
            if (xb && !xa) a.add_edge(0, l, 1);
            if (!xa && !xb) a.add_edge(1, l, 1);
            if (xa && !xb) a.add_edge(1, l, 2);
            if (!xa && !xb) a.add_edge(2, l, 2);
        }
        return a;
    }

    static NBA atom_eq(int width, int ta, int tb) {
        NBA a(width, 2);
        a.initial = 0;
        a.accepting[1] = true;
        for (Letter l = 0; l < a.letters(); ++l) {
            bool xa = bit(l, ta), xb = bit(l, tb);
            if (!xa && !xb) a.add_edge(0, l, 0);
            if (xa && xb) a.add_edge(0, l, 1);
            if (!xa && !xb) a.add_edge(1, l, 1);
        }
        return a;
    }

    static NBA atom_not_eq(int width, int ta, int tb) {
        // both singletons, at different positions
        NBA a(width, 4);
        a.initial = 0;
        a.accepting[3] = true;
        for (Letter l = 0; l < a.letters(); ++l) {
            bool xa = bit(l, ta), xb = bit(l, tb);
            if (!xa && !xb) a.add_edge(0, l, 0);
            if (xa && !xb) a.add_edge(0, l, 1);
            if (xb && !xa) a.add_edge(0, l, 2);
            if (!xa && !xb) a.add_edge(1, l, 1);
            if (xb && !xa) a.add_edge(1, l, 3);
            if (!xa && !xb) a.add_edge(2, l, 2);
            if (xa && !xb) a.add_edge(2, l, 3);
            if (!xa && !xb) a.add_edge(3, l, 3);
        }
        return a;
    }

    static NBA atom_in(int width, int tt, int tv, bool positive) {
        NBA a(width, 2);
        a.initial = 0;
        a.accepting[1] = true;
        for (Letter l = 0; l < a.letters(); ++l) {
            bool xt = bit(l, tt), xv = bit(l, tv);
            if (!xt) a.add_edge(0, l, 0);
            if (xt && xv == positive) a.add_edge(0, l, 1);
            if (!xt) a.add_edge(1, l, 1);
        }
        return a;
    }

    // --- recursive compilation ----------------------------------------------
    // Oversized intermediate automata are renormalized through a
    // determinization round; every language the compiler builds at desk scale
    // has a small deterministic form, so this keeps Safra inputs narrow.
    NBA normalize_nba(NBA a, int threshold = 24) const {
        a = nba_reduce(std::move(a));
        if (a.num_states <= threshold) return a;
        DPA d = simplify_dpa(determinize(a, opts_.max_dpa_states));
        NBA back = nba_reduce(dpa_to_nba(d));
        return back.num_states < a.num_states ? back : a;
    }

    static void flatten_conj(const Formula& f, std::vector<Formula>& out) {
        if (f.kind() == Formula::Kind::conj) {
            flatten_conj(f.left(), out);
            flatten_conj(f.right(), out);
        } else {
            out.push_back(f);
        }
    }

    Piece intersect_pieces(const std::vector<Piece>& pieces, const SlotMap& slots) const {
        std::vector<const Piece*> ptrs;
        for (auto& p : pieces) ptrs.push_back(&p);
        std::vector<std::string> target = union_support(ptrs, slots);
        std::vector<NBA> nbas;
        for (auto& p : pieces) nbas.push_back(lift(p, target, slots));
        return Piece{normalize_nba(nba_intersect_many(nbas)), target};
    }

    Piece guard_singletons(Piece p, const Formula& f, const SlotMap& slots) const {
        FreeVars fv = free_vars(f);
        if (fv.first_order.empty()) return p;
        std::vector<Piece> parts{std::move(p)};
        for (auto& n : fv.first_order)
            parts.push_back(Piece{singleton_nba(1, 0), {n}});
        return intersect_pieces(parts, slots);
    }

    int check_kind(const Formula& f, const std::string& name, VarKind expected,
                   const SlotMap& slots) const {
        auto it = slots.find(name);
        if (it == slots.end()) throw Error("compile: variable '" + name + "' has no track");
        if (it->second.second != expected)
            throw Error("compile: variable '" + name + "' used with the wrong kind in " +
                        to_text(f));
        return it->second.first;
    }

    Piece atom_piece(const Formula& f, const SlotMap& slots, bool negated) const {
        std::vector<std::string> support = support_of(f, slots);
        int ra, rb;
        switch (f.kind()) {
        case Formula::Kind::less:
            check_kind(f, f.var_a(), VarKind::first_order, slots);
            check_kind(f, f.var_b(), VarKind::first_order, slots);
            ra = rank_in(support, f.var_a());
            rb = rank_in(support, f.var_b());
            return Piece{negated ? atom_not_less(static_cast<int>(support.size()), ra, rb)
                                 : atom_less(static_cast<int>(support.size()), ra, rb),
                         support};
        case Formula::Kind::eq:
            check_kind(f, f.var_a(), VarKind::first_order, slots);
            check_kind(f, f.var_b(), VarKind::first_order, slots);
            ra = rank_in(support, f.var_a());
            rb = rank_in(support, f.var_b());
            return Piece{negated ? atom_not_eq(static_cast<int>(support.size()), ra, rb)
                                 : atom_eq(static_cast<int>(support.size()), ra, rb),
                         support};
        case Formula::Kind::in:
            check_kind(f, f.var_a(), VarKind::first_order, slots);
            check_kind(f, f.var_b(), VarKind::second_order, slots);
            ra = rank_in(support, f.var_a());
            rb = rank_in(support, f.var_b());
            return Piece{atom_in(static_cast<int>(support.size()), ra, rb, !negated), support};
        default:
            throw Error("compile: not an atom");
        }
    }

    Piece compile_piece(const Formula& f, const SlotMap& slots) const {
        std::string key = cache_key(f, support_of(f, slots), false);
        auto hit = cache_.find(key);
        if (hit != cache_.end()) return hit->second;
        Piece result = compile_piece_uncached(f, slots);
        cache_.emplace(std::move(key), result);
        return result;
    }

    Piece compile_piece_uncached(const Formula& f, const SlotMap& slots) const {
        switch (f.kind()) {
        case Formula::Kind::less:
        case Formula::Kind::eq:
        case Formula::Kind::in:
            return atom_piece(f, slots, false);
        case Formula::Kind::conj: {
            std::vector<Formula> parts;
            flatten_conj(f, parts);
            std::vector<Piece> pieces;
            for (auto& p : parts) pieces.push_back(compile_piece(p, slots));
            return intersect_pieces(pieces, slots);
        }
        case Formula::Kind::neg:
            return compile_piece_negated(f.child(), slots);
        case Formula::Kind::exists: {
            int fresh = 0;
            for (auto& [n, sk] : slots) fresh = std::max(fresh, sk.first + 1);
            SlotMap sub = slots;
            sub[f.var_a()] = {fresh, f.quantifier_kind()};
            Piece body = compile_piece(f.child(), sub);
            int pos = rank_in(body.names, f.var_a());
            if (pos < 0) return body; // bound variable does not occur
            // determinize before projecting: with the bound track still
            // visible the automaton is nearly deterministic, afterwards not
            body.nba = normalize_nba(std::move(body.nba), 12);
            body.nba = nba_reduce(nba_project(body.nba, pos));
            body.names.erase(body.names.begin() + pos);
            return body;
        }
        }
        throw Error("compile: unreachable");
    }

    Piece compile_piece_negated(const Formula& f, const SlotMap& slots) const {
        std::string key = cache_key(f, support_of(f, slots), true);
        auto hit = cache_.find(key);
        if (hit != cache_.end()) return hit->second;
        Piece result = compile_piece_negated_uncached(f, slots);
        cache_.emplace(std::move(key), result);
        return result;
    }

    // language of ~f, still restricted to singleton first-order tracks
    Piece compile_piece_negated_uncached(const Formula& f, const SlotMap& slots) const {
        switch (f.kind()) {
        case Formula::Kind::less:
        case Formula::Kind::eq:
        case Formula::Kind::in:
            return atom_piece(f, slots, true);
        case Formula::Kind::neg:
            return compile_piece(f.child(), slots);
        case Formula::Kind::conj: {
            // ~(a & b) = ~a | ~b, with singleton guards for the whole conjunction
            std::vector<Formula> parts;
            flatten_conj(f, parts);
            std::vector<Piece> pieces;
            for (auto& p : parts) pieces.push_back(compile_piece_negated(p, slots));
            std::vector<const Piece*> ptrs;
            for (auto& p : pieces) ptrs.push_back(&p);
            std::vector<std::string> target = union_support(ptrs, slots);
            NBA acc = lift(pieces[0], target, slots);
            for (std::size_t i = 1; i < pieces.size(); ++i)
                acc = nba_union(acc, lift(pieces[i], target, slots));
            Piece u{normalize_nba(std::move(acc)), target};
            return guard_singletons(std::move(u), f, slots);
        }
        case Formula::Kind::exists: {
            Piece pos = compile_piece(f, slots);
            DPA det = simplify_dpa(determinize(nba_reduce(pos.nba), opts_.max_dpa_states));
            NBA neg = dpa_to_nba(dpa_complement(det));
            Piece out{nba_reduce(std::move(neg)), pos.names};
            return guard_singletons(std::move(out), f, slots);
        }
        }
        throw Error("compile: unreachable");
    }

    // --- machine graph formulas ---------------------------------------------
    template <class Step, class Out>
    Formula machine_formula_impl(int k, int initial, const std::string& in_var,
                                 const std::string& out_var, Step step, Out output) const {
        NameGen gen;
        gen.avoid(in_var);
        gen.avoid(out_var);
        std::vector<std::string> st;
        for (int q = 0; q < k; ++q) st.push_back(gen.fresh("Q"));
        std::string t = gen.fresh("t"), u = gen.fresh("u");

        std::vector<Formula> body;
        {
            std::vector<Formula> any;
            for (auto& s : st) any.push_back(fml::in(t, s));
            std::vector<Formula> parts{fml::disj_all(any)};
            for (int i = 0; i < k; ++i)
                for (int j = i + 1; j < k; ++j)
                    parts.push_back(fml::neg(
                        fml::conj(fml::in(t, st[std::size_t(i)]), fml::in(t, st[std::size_t(j)]))));
            body.push_back(fml::forall_fo(t, fml::conj_all(parts)));
        }
        body.push_back(fml::forall_fo(
            t, fml::implies(fml::first(t, gen), fml::in(t, st[std::size_t(initial)]))));
        {
            std::vector<Formula> cl;
            for (int q = 0; q < k; ++q)
                for (int a = 0; a < 2; ++a) {
                    Formula guard = fml::conj(fml::in(t, st[std::size_t(q)]),
                                              a ? fml::in(t, in_var) : fml::neg(fml::in(t, in_var)));
                    cl.push_back(fml::implies(guard, fml::in(u, st[std::size_t(step(q, a))])));
                }
            body.push_back(fml::forall_fo(
                t, fml::forall_fo(u, fml::implies(fml::succ_rel(t, u, gen), fml::conj_all(cl)))));
        }
        {
            std::vector<Formula> cl;
            for (int q = 0; q < k; ++q)
                for (int a = 0; a < 2; ++a) {
                    Formula guard = fml::conj(fml::in(t, st[std::size_t(q)]),
                                              a ? fml::in(t, in_var) : fml::neg(fml::in(t, in_var)));
                    Formula out_lit =
                        output(q, a) ? fml::in(t, out_var) : fml::neg(fml::in(t, out_var));
                    cl.push_back(fml::implies(guard, out_lit));
                }
            body.push_back(fml::forall_fo(t, fml::conj_all(cl)));
        }
        Formula f = fml::conj_all(body);
        for (int q = k - 1; q >= 0; --q) f = fml::exists_so(st[std::size_t(q)], f);
        return normalize(f);
    }
};

} // namespace upsynth
