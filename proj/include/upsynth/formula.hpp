// formula.hpp -- MLO abstract syntax, parsing, printing, and manipulation.
//
// Surface syntax (see the README for the full grammar):
//   atoms:        t < s, t = s, in(V,t); terms may be written v+k
//   set forms:    V = W, V <= W, V = {}, V = {0}       (stored desugared)
//   connectives:  ~  &  |  ->  <->
//   quantifiers:  all t.  ex t.  allset V.  exset V.  ex! t.  ex<=1 t.
// Normal form keeps only atoms, ~, &, and existential quantifiers. Bound
// variables are renamed apart during normalization, so ASTs are shadow-free.
#pragma once

#include <cctype>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "upsynth/errors.hpp"

namespace upsynth {

enum class VarKind { first_order, second_order };

class Formula {
public:
    enum class Kind { less, eq, in, neg, conj, exists };

    struct Node {
        Kind kind;
        std::string a, b; // less/eq: both terms; in: a = element var, b = set var;
                          // exists: a = bound variable
        VarKind qkind = VarKind::first_order;
        std::shared_ptr<const Node> lhs, rhs;
    };

    Formula() = default;
    explicit Formula(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

    bool valid() const { return n_ != nullptr; }
    Kind kind() const { return n_->kind; }
    const std::string& var_a() const { return n_->a; }
    const std::string& var_b() const { return n_->b; }
    VarKind quantifier_kind() const { return n_->qkind; }
    Formula child() const { return Formula(n_->lhs); }
    Formula left() const { return Formula(n_->lhs); }
    Formula right() const { return Formula(n_->rhs); }
    const std::shared_ptr<const Node>& node() const { return n_; }

    bool operator==(const Formula& o) const { return equal(n_.get(), o.n_.get()); }
    bool operator!=(const Formula& o) const { return !(*this == o); }

private:
    static bool equal(const Node* x, const Node* y) {
        if (x == y) return true;
        if (!x || !y) return false;
        if (x->kind != y->kind || x->a != y->a || x->b != y->b) return false;
        if (x->kind == Kind::exists && x->qkind != y->qkind) return false;
        return equal(x->lhs.get(), y->lhs.get()) && equal(x->rhs.get(), y->rhs.get());
    }

    std::shared_ptr<const Node> n_;
};

// ---------------------------------------------------------------------------
// Builders. All derived connectives expand immediately into the normal form.
namespace fml {

inline Formula make(Formula::Kind k, std::string a, std::string b, VarKind qk, Formula l, Formula r) {
    auto n = std::make_shared<Formula::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    n->qkind = qk;
    n->lhs = l.node();
    n->rhs = r.node();
    return Formula(std::move(n));
}

inline Formula less(const std::string& a, const std::string& b) {
    return make(Formula::Kind::less, a, b, VarKind::first_order, {}, {});
}
inline Formula eq(const std::string& a, const std::string& b) {
    return make(Formula::Kind::eq, a, b, VarKind::first_order, {}, {});
}
inline Formula in(const std::string& elem, const std::string& set) {
    return make(Formula::Kind::in, elem, set, VarKind::first_order, {}, {});
}
inline Formula neg(const Formula& f) {
    return make(Formula::Kind::neg, "", "", VarKind::first_order, f, {});
}
inline Formula conj(const Formula& l, const Formula& r) {
    return make(Formula::Kind::conj, "", "", VarKind::first_order, l, r);
}
inline Formula exists(const std::string& v, VarKind k, const Formula& body) {
    return make(Formula::Kind::exists, v, "", k, body, {});
}
inline Formula exists_fo(const std::string& v, const Formula& body) {
    return exists(v, VarKind::first_order, body);
}
inline Formula exists_so(const std::string& v, const Formula& body) {
    return exists(v, VarKind::second_order, body);
}
inline Formula forall(const std::string& v, VarKind k, const Formula& body) {
    return neg(exists(v, k, neg(body)));
}
inline Formula forall_fo(const std::string& v, const Formula& body) {
    return forall(v, VarKind::first_order, body);
}
inline Formula forall_so(const std::string& v, const Formula& body) {
    return forall(v, VarKind::second_order, body);
}
inline Formula disj(const Formula& l, const Formula& r) { return neg(conj(neg(l), neg(r))); }
inline Formula implies(const Formula& l, const Formula& r) { return neg(conj(l, neg(r))); }
inline Formula iff(const Formula& l, const Formula& r) {
    return conj(implies(l, r), implies(r, l));
}

// t < t is unsatisfiable; its negation closed under ex gives truth.
inline Formula falsum(const std::string& aux = "t") { return exists_fo(aux, less(aux, aux)); }
inline Formula verum(const std::string& aux = "t") { return neg(falsum(aux)); }

inline Formula conj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return verum();
    Formula acc = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) acc = conj(acc, fs[i]);
    return acc;
}
inline Formula disj_all(const std::vector<Formula>& fs) {
    if (fs.empty()) return falsum();
    Formula acc = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) acc = disj(acc, fs[i]);
    return acc;
}

} // namespace fml

// ---------------------------------------------------------------------------
inline void collect_names(const Formula& f, std::set<std::string>& out) {
    if (!f.valid()) return;
    switch (f.kind()) {
    case Formula::Kind::less:
    case Formula::Kind::eq:
    case Formula::Kind::in:
        out.insert(f.var_a());
        out.insert(f.var_b());
        return;
    case Formula::Kind::neg:
        collect_names(f.child(), out);
        return;
    case Formula::Kind::conj:
        collect_names(f.left(), out);
        collect_names(f.right(), out);
        return;
    case Formula::Kind::exists:
        out.insert(f.var_a());
        collect_names(f.child(), out);
        return;
    }
}

struct FreeVars {
    std::set<std::string> first_order;
    std::set<std::string> second_order;
};

namespace detail {
inline void free_vars_rec(const Formula& f, std::set<std::string>& bound, FreeVars& out) {
    switch (f.kind()) {
    case Formula::Kind::less:
    case Formula::Kind::eq:
        if (!bound.count(f.var_a())) out.first_order.insert(f.var_a());
        if (!bound.count(f.var_b())) out.first_order.insert(f.var_b());
        return;
    case Formula::Kind::in:
        if (!bound.count(f.var_a())) out.first_order.insert(f.var_a());
        if (!bound.count(f.var_b())) out.second_order.insert(f.var_b());
        return;
    case Formula::Kind::neg:
        free_vars_rec(f.child(), bound, out);
        return;
    case Formula::Kind::conj:
        free_vars_rec(f.left(), bound, out);
        free_vars_rec(f.right(), bound, out);
        return;
    case Formula::Kind::exists: {
        bool inserted = bound.insert(f.var_a()).second;
        free_vars_rec(f.child(), bound, out);
        if (inserted) bound.erase(f.var_a());
        return;
    }
    }
}
} // namespace detail

inline FreeVars free_vars(const Formula& f) {
    FreeVars out;
    std::set<std::string> bound;
    detail::free_vars_rec(f, bound, out);
    return out;
}

// Fresh identifiers avoiding everything already seen.
class NameGen {
public:
    NameGen() = default;
    explicit NameGen(std::set<std::string> avoid) : used_(std::move(avoid)) {}
    void avoid(const Formula& f) { collect_names(f, used_); }
    void avoid(const std::string& n) { used_.insert(n); }
    std::string fresh(const std::string& stem = "u") {
        while (true) {
            std::string cand = stem + std::to_string(counter_++);
            if (used_.insert(cand).second) return cand;
        }
    }

private:
    std::set<std::string> used_;
    int counter_ = 0;
};

// Position and order helpers shared by the emitters.
namespace fml {

// no element below t
inline Formula first(const std::string& t, NameGen& gen) {
    std::string s = gen.fresh("s");
    return neg(exists_fo(s, less(s, t)));
}

// u = t + 1
inline Formula succ_rel(const std::string& t, const std::string& u, NameGen& gen) {
    std::string m = gen.fresh("m");
    return conj(less(t, u), neg(exists_fo(m, conj(less(t, m), less(m, u)))));
}

// u = t + k, k >= 1
inline Formula succ_k_rel(const std::string& t, const std::string& u, int k, NameGen& gen) {
    if (k < 1) throw Error("succ_k_rel: k must be >= 1");
    if (k == 1) return succ_rel(t, u, gen);
    std::string mid = gen.fresh("m");
    return exists_fo(mid, conj(succ_rel(t, mid, gen), succ_k_rel(mid, u, k - 1, gen)));
}

// t is the element at position i
inline Formula at_position(int i, const std::string& t, NameGen& gen) {
    if (i == 0) return first(t, gen);
    std::string s = gen.fresh("p");
    return exists_fo(s, conj(at_position(i - 1, s, gen), succ_rel(s, t, gen)));
}

} // namespace fml

// ---------------------------------------------------------------------------
inline Formula substitute_param(const Formula& f, const std::string& p, const std::string& z) {
    std::set<std::string> names;
    collect_names(f, names);
    if (names.count(z))
        throw Error("substitute_param: replacement variable '" + z + "' already occurs");
    struct Impl {
        const std::string& p;
        const std::string& z;
        Formula run(const Formula& f) const {
            switch (f.kind()) {
            case Formula::Kind::less:
            case Formula::Kind::eq:
                return f;
            case Formula::Kind::in:
                if (f.var_b() == p) return fml::in(f.var_a(), z);
                return f;
            case Formula::Kind::neg:
                return fml::neg(run(f.child()));
            case Formula::Kind::conj:
                return fml::conj(run(f.left()), run(f.right()));
            case Formula::Kind::exists:
                // p is a set name; a bound set variable with the same name shadows it
                if (f.var_a() == p && f.quantifier_kind() == VarKind::second_order) return f;
                return fml::exists(f.var_a(), f.quantifier_kind(), run(f.child()));
            }
            return f;
        }
    };
    return Impl{p, z}.run(f);
}

// Canonical renaming of bound variables (t0,t1,... / S0,S1,...), skipping any
// name that occurs free. Idempotent; alpha-equivalent formulas normalize to
// structurally equal trees.
inline Formula normalize(const Formula& f) {
    FreeVars fv = free_vars(f);
    std::set<std::string> taken;
    for (auto& n : fv.first_order) taken.insert(n);
    for (auto& n : fv.second_order) taken.insert(n);

    struct Impl {
        std::set<std::string>& taken;
        int fo_counter = 0;
        int so_counter = 0;

        std::string next_name(VarKind k) {
            while (true) {
                std::string cand = (k == VarKind::first_order ? "t" : "S") +
                                   std::to_string(k == VarKind::first_order ? fo_counter++ : so_counter++);
                if (!taken.count(cand)) return cand;
            }
        }

        Formula run(const Formula& f, std::map<std::string, std::string>& ren) {
            switch (f.kind()) {
            case Formula::Kind::less:
            case Formula::Kind::eq: {
                auto la = ren.count(f.var_a()) ? ren[f.var_a()] : f.var_a();
                auto lb = ren.count(f.var_b()) ? ren[f.var_b()] : f.var_b();
                return f.kind() == Formula::Kind::less ? fml::less(la, lb) : fml::eq(la, lb);
            }
            case Formula::Kind::in: {
                auto la = ren.count(f.var_a()) ? ren[f.var_a()] : f.var_a();
                auto lb = ren.count(f.var_b()) ? ren[f.var_b()] : f.var_b();
                return fml::in(la, lb);
            }
            case Formula::Kind::neg:
                return fml::neg(run(f.child(), ren));
            case Formula::Kind::conj: {
                Formula l = run(f.left(), ren);
                return fml::conj(l, run(f.right(), ren));
            }
            case Formula::Kind::exists: {
                std::string fresh = next_name(f.quantifier_kind());
                auto saved = ren.find(f.var_a()) != ren.end()
                                 ? std::optional<std::string>(ren[f.var_a()])
                                 : std::optional<std::string>();
                ren[f.var_a()] = fresh;
                Formula body = run(f.child(), ren);
                if (saved)
                    ren[f.var_a()] = *saved;
                else
                    ren.erase(f.var_a());
                return fml::exists(fresh, f.quantifier_kind(), body);
            }
            }
            return f;
        }
    };
    Impl impl{taken};
    std::map<std::string, std::string> ren;
    return impl.run(f, ren);
}

// ---------------------------------------------------------------------------
inline std::string to_text(const Formula& f) {
    std::ostringstream os;
    struct Impl {
        std::ostream& os;
        void run(const Formula& f) {
            switch (f.kind()) {
            case Formula::Kind::less:
                os << f.var_a() << " < " << f.var_b();
                return;
            case Formula::Kind::eq:
                os << f.var_a() << " = " << f.var_b();
                return;
            case Formula::Kind::in:
                os << "in(" << f.var_b() << "," << f.var_a() << ")";
                return;
            case Formula::Kind::neg:
                os << "~";
                if (f.child().kind() == Formula::Kind::less || f.child().kind() == Formula::Kind::eq) {
                    os << "(";
                    run(f.child());
                    os << ")";
                } else {
                    run(f.child());
                }
                return;
            case Formula::Kind::conj:
                os << "(";
                run(f.left());
                os << " & ";
                run(f.right());
                os << ")";
                return;
            case Formula::Kind::exists:
                os << "(" << (f.quantifier_kind() == VarKind::first_order ? "ex " : "exset ")
                   << f.var_a() << ". ";
                run(f.child());
                os << ")";
                return;
            }
        }
    };
    Impl{os}.run(f);
    return os.str();
}

// ---------------------------------------------------------------------------
// Parser.
namespace detail {

struct Token {
    enum class Type {
        id, num, lparen, rparen, dot, comma, lt, le, eq, lbrace, rbrace,
        tilde, amp, pipe, arrow, iff, plus, bang, end
    };
    Type type;
    std::string text;
    int num = 0;
    int line = 1, col = 1;
};

inline std::vector<Token> lex_formula(const std::string& src) {
    std::vector<Token> out;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Token::Type t, std::string text, int num = 0) {
        out.push_back({t, std::move(text), num, line, col});
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++col;
            ++i;
            continue;
        }
        if (c == '#') { // comment to end of line
            while (i < src.size() && src[i] != '\n') ++i;
            continue;
        }
        int start_col = col;
        auto advance = [&](std::size_t k) {
            i += k;
            col += static_cast<int>(k);
        };
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
                ++j;
            out.push_back({Token::Type::id, src.substr(i, j - i), 0, line, start_col});
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            out.push_back({Token::Type::num, src.substr(i, j - i),
                           std::stoi(src.substr(i, j - i)), line, start_col});
            col += static_cast<int>(j - i);
            i = j;
            continue;
        }
        if (src.compare(i, 3, "<->") == 0) {
            push(Token::Type::iff, "<->");
            advance(3);
            continue;
        }
        if (src.compare(i, 2, "->") == 0) {
            push(Token::Type::arrow, "->");
            advance(2);
            continue;
        }
        if (src.compare(i, 2, "<=") == 0) {
            push(Token::Type::le, "<=");
            advance(2);
            continue;
        }
        switch (c) {
        case '(': push(Token::Type::lparen, "("); break;
        case ')': push(Token::Type::rparen, ")"); break;
        case '.': push(Token::Type::dot, "."); break;
        case ',': push(Token::Type::comma, ","); break;
        case '<': push(Token::Type::lt, "<"); break;
        case '=': push(Token::Type::eq, "="); break;
        case '{': push(Token::Type::lbrace, "{"); break;
        case '}': push(Token::Type::rbrace, "}"); break;
        case '~': push(Token::Type::tilde, "~"); break;
        case '&': push(Token::Type::amp, "&"); break;
        case '|': push(Token::Type::pipe, "|"); break;
        case '+': push(Token::Type::plus, "+"); break;
        case '!': push(Token::Type::bang, "!"); break;
        default:
            throw ParseError(std::string("unexpected character '") + c + "'", line, col);
        }
        advance(1);
    }
    out.push_back({Token::Type::end, "", 0, line, col});
    return out;
}

// Raw tree produced by the grammar; set-or-element equalities between two bare
// identifiers stay pending until variable kinds are known.
struct RawNode;
using RawRef = std::shared_ptr<RawNode>;
struct RawNode {
    enum class Kind { less, eq_fo, eq_pending, in, subset, eq_empty, eq_zero, neg, conj, exists };
    Kind kind;
    std::string a, b;
    VarKind qkind = VarKind::first_order;
    RawRef lhs, rhs;
    int line = 0, col = 0;
};

class FormulaParser {
public:
    FormulaParser(std::vector<Token> toks, std::map<std::string, VarKind> declared, bool strict)
        : toks_(std::move(toks)), declared_(std::move(declared)), strict_(strict) {}

    Formula run() {
        RawRef raw = parse_expr();
        expect(Token::Type::end, "end of input");
        infer_kinds(raw);
        NameGen gen;
        std::set<std::string> names;
        collect_raw_names(raw, names);
        for (auto& n : names) gen.avoid(n);
        Formula f = lower(raw, gen);
        return normalize(f);
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::map<std::string, VarKind> declared_;
    bool strict_;
    std::map<std::string, VarKind> free_kinds_;
    std::vector<std::pair<std::string, VarKind>> scope_;

    const Token& peek(int off = 0) const { return toks_[pos_ + std::size_t(off)]; }
    Token take() { return toks_[pos_++]; }
    bool at(Token::Type t) const { return peek().type == t; }
    void expect(Token::Type t, const std::string& what) {
        if (!at(t)) throw ParseError("expected " + what, peek().line, peek().col);
        take();
    }

    RawRef node(RawNode::Kind k, int line, int col) {
        auto n = std::make_shared<RawNode>();
        n->kind = k;
        n->line = line;
        n->col = col;
        return n;
    }

    // --- grammar -----------------------------------------------------------
    RawRef parse_expr() { return parse_iff(); }

    RawRef parse_iff() {
        RawRef l = parse_imp();
        while (at(Token::Type::iff)) {
            Token t = take();
            RawRef r = parse_imp();
            auto n = node(RawNode::Kind::conj, t.line, t.col);
            // (l -> r) & (r -> l), built below during lowering via markers:
            // represent directly with neg/conj structure
            n->kind = RawNode::Kind::conj;
            n->lhs = raw_implies(l, r, t);
            n->rhs = raw_implies(r, l, t);
            l = n;
        }
        return l;
    }

    RawRef raw_neg(RawRef x, const Token& t) {
        auto n = node(RawNode::Kind::neg, t.line, t.col);
        n->lhs = std::move(x);
        return n;
    }
    RawRef raw_conj(RawRef x, RawRef y, const Token& t) {
        auto n = node(RawNode::Kind::conj, t.line, t.col);
        n->lhs = std::move(x);
        n->rhs = std::move(y);
        return n;
    }
    RawRef raw_implies(RawRef x, RawRef y, const Token& t) {
        return raw_neg(raw_conj(x, raw_neg(std::move(y), t), t), t);
    }

    RawRef parse_imp() {
        RawRef l = parse_or();
        if (at(Token::Type::arrow)) {
            Token t = take();
            RawRef r = parse_imp(); // right associative
            return raw_implies(std::move(l), std::move(r), t);
        }
        return l;
    }

    RawRef parse_or() {
        RawRef l = parse_and();
        while (at(Token::Type::pipe)) {
            Token t = take();
            RawRef r = parse_and();
            l = raw_neg(raw_conj(raw_neg(std::move(l), t), raw_neg(std::move(r), t), t), t);
        }
        return l;
    }

    RawRef parse_and() {
        RawRef l = parse_unary();
        while (at(Token::Type::amp)) {
            Token t = take();
            RawRef r = parse_unary();
            l = raw_conj(std::move(l), std::move(r), t);
        }
        return l;
    }

    bool id_is(const std::string& s, int off = 0) const {
        return peek(off).type == Token::Type::id && peek(off).text == s;
    }

    RawRef parse_unary() {
        if (at(Token::Type::tilde)) {
            Token t = take();
            return raw_neg(parse_unary(), t);
        }
        if (id_is("all") || id_is("allset") || id_is("exset") ||
            (id_is("ex") && peek(1).type == Token::Type::id && peek(2).type == Token::Type::dot))
            return parse_quantifier();
        if (id_is("ex") &&
            (peek(1).type == Token::Type::bang || peek(1).type == Token::Type::le))
            return parse_quantifier();
        return parse_primary();
    }

    RawRef parse_quantifier() {
        Token kw = take();
        bool unique = false, at_most_one = false;
        VarKind kind = VarKind::first_order;
        bool universal = false;
        if (kw.text == "all")
            universal = true;
        else if (kw.text == "allset") {
            universal = true;
            kind = VarKind::second_order;
        } else if (kw.text == "exset")
            kind = VarKind::second_order;
        else if (kw.text == "ex") {
            if (at(Token::Type::bang)) {
                take();
                unique = true;
            } else if (at(Token::Type::le)) {
                Token le = take();
                if (!at(Token::Type::num) || peek().num != 1)
                    throw ParseError("expected 1 after 'ex<='", le.line, le.col);
                take();
                at_most_one = true;
            }
        } else
            throw ParseError("unknown quantifier '" + kw.text + "'", kw.line, kw.col);

        if (!at(Token::Type::id))
            throw ParseError("expected variable after quantifier", peek().line, peek().col);
        Token var = take();
        if (is_reserved(var.text))
            throw ParseError("'" + var.text + "' is reserved", var.line, var.col);
        expect(Token::Type::dot, "'.' after quantified variable");

        scope_.emplace_back(var.text, kind);
        RawRef body = parse_expr();
        scope_.pop_back();

        if ((unique || at_most_one) && kind != VarKind::first_order)
            throw ParseError("ex!/ex<=1 require a first-order variable", kw.line, kw.col);

        auto mk_exists = [&](RawRef b) {
            auto n = node(RawNode::Kind::exists, kw.line, kw.col);
            n->a = var.text;
            n->qkind = kind;
            n->lhs = std::move(b);
            return n;
        };

        if (unique || at_most_one) {
            // at-most-one: no two ordered positions both satisfy the body
            std::string other = var.text + "'";
            RawRef copy = rename_raw(body, var.text, other);
            auto lt = node(RawNode::Kind::less, kw.line, kw.col);
            lt->a = var.text;
            lt->b = other;
            RawRef pair = raw_conj(raw_conj(clone_raw(body), std::move(copy), kw), std::move(lt), kw);
            auto inner = node(RawNode::Kind::exists, kw.line, kw.col);
            inner->a = other;
            inner->qkind = VarKind::first_order;
            inner->lhs = std::move(pair);
            RawRef both = mk_exists(std::move(inner));
            RawRef amo = raw_neg(std::move(both), kw);
            if (at_most_one) return amo;
            return raw_conj(mk_exists(std::move(body)), std::move(amo), kw);
        }
        RawRef ex = mk_exists(std::move(body));
        if (universal) {
            // all v. b  ==  ~ex v. ~b ; rebuild with negated body
            auto n = node(RawNode::Kind::exists, kw.line, kw.col);
            n->a = var.text;
            n->qkind = kind;
            n->lhs = raw_neg(ex->lhs, kw);
            return raw_neg(std::move(n), kw);
        }
        return ex;
    }

    static bool is_reserved(const std::string& s) {
        return s == "all" || s == "ex" || s == "allset" || s == "exset" || s == "in";
    }

    RawRef parse_primary() {
        if (at(Token::Type::lparen)) {
            take();
            RawRef e = parse_expr();
            expect(Token::Type::rparen, "')'");
            return e;
        }
        return parse_atom();
    }

    struct Term {
        std::string var;
        int offset = 0;
        int line = 0, col = 0;
    };

    Term parse_term() {
        if (!at(Token::Type::id))
            throw ParseError("expected a variable", peek().line, peek().col);
        Token id = take();
        if (is_reserved(id.text)) throw ParseError("'" + id.text + "' is reserved", id.line, id.col);
        Term t{id.text, 0, id.line, id.col};
        while (at(Token::Type::plus)) {
            take();
            if (!at(Token::Type::num))
                throw ParseError("expected a number after '+'", peek().line, peek().col);
            t.offset += take().num;
        }
        return t;
    }

    RawRef parse_atom() {
        if (id_is("in")) {
            Token kw = take();
            expect(Token::Type::lparen, "'(' after in");
            if (!at(Token::Type::id))
                throw ParseError("expected set variable", peek().line, peek().col);
            Token set = take();
            if (is_reserved(set.text))
                throw ParseError("'" + set.text + "' is reserved", set.line, set.col);
            expect(Token::Type::comma, "','");
            Term t = parse_term();
            expect(Token::Type::rparen, "')'");
            use_var(set.text, VarKind::second_order, set.line, set.col);
            use_var(t.var, VarKind::first_order, t.line, t.col);
            auto n = node(RawNode::Kind::in, kw.line, kw.col);
            n->a = t.var;
            n->b = set.text;
            return wrap_offsets(std::move(n), {{&n->a, t.offset}});
        }
        Term t1 = parse_term();
        if (at(Token::Type::lt)) {
            Token op = take();
            Term t2 = parse_term();
            use_var(t1.var, VarKind::first_order, t1.line, t1.col);
            use_var(t2.var, VarKind::first_order, t2.line, t2.col);
            auto n = node(RawNode::Kind::less, op.line, op.col);
            n->a = t1.var;
            n->b = t2.var;
            return wrap_offsets(std::move(n), {{&n->a, t1.offset}, {&n->b, t2.offset}});
        }
        if (at(Token::Type::le)) {
            Token op = take();
            if (t1.offset != 0) throw ParseError("subset operands must be set variables", op.line, op.col);
            if (!at(Token::Type::id))
                throw ParseError("expected set variable after '<='", peek().line, peek().col);
            Token rhs = take();
            use_var(t1.var, VarKind::second_order, t1.line, t1.col);
            use_var(rhs.text, VarKind::second_order, rhs.line, rhs.col);
            auto n = node(RawNode::Kind::subset, op.line, op.col);
            n->a = t1.var;
            n->b = rhs.text;
            return n;
        }
        if (at(Token::Type::eq)) {
            Token op = take();
            if (at(Token::Type::lbrace)) {
                take();
                bool zero = false;
                if (at(Token::Type::num)) {
                    Token num = take();
                    if (num.num != 0)
                        throw ParseError("only {} and {0} set constants are supported", num.line, num.col);
                    zero = true;
                }
                expect(Token::Type::rbrace, "'}'");
                if (t1.offset != 0)
                    throw ParseError("set constant compared with a term", op.line, op.col);
                use_var(t1.var, VarKind::second_order, t1.line, t1.col);
                auto n = node(zero ? RawNode::Kind::eq_zero : RawNode::Kind::eq_empty, op.line, op.col);
                n->a = t1.var;
                return n;
            }
            Term t2 = parse_term();
            if (t1.offset != 0 || t2.offset != 0) {
                use_var(t1.var, VarKind::first_order, t1.line, t1.col);
                use_var(t2.var, VarKind::first_order, t2.line, t2.col);
                auto n = node(RawNode::Kind::eq_fo, op.line, op.col);
                n->a = t1.var;
                n->b = t2.var;
                return wrap_offsets(std::move(n), {{&n->a, t1.offset}, {&n->b, t2.offset}});
            }
            // kind decided later
            auto n = node(RawNode::Kind::eq_pending, op.line, op.col);
            n->a = t1.var;
            n->b = t2.var;
            return n;
        }
        throw ParseError("expected '<', '<=' or '=' after term", peek().line, peek().col);
    }

    // Replace var occurrences that carry +k offsets by chained successor
    // quantifiers around the atom.
    RawRef wrap_offsets(RawRef atom, std::vector<std::pair<std::string*, int>> slots) {
        RawRef result = std::move(atom);
        int aux = 0;
        for (auto& [slot, offset] : slots) {
            if (offset == 0) continue;
            std::string base = *slot;
            std::string shifted = base + "+" + std::to_string(aux++);
            *slot = shifted;
            // ex shifted. (shifted = base + offset & atom)
            auto chain = node(RawNode::Kind::exists, result->line, result->col);
            chain->a = shifted;
            chain->qkind = VarKind::first_order;
            auto succn = node(RawNode::Kind::eq_fo, result->line, result->col);
            // marker node replaced during lowering: store offset in qkind? use dedicated kind
            // we instead lower offsets here by building less/neg structure directly at lowering
            // time; keep a pseudo node kind via b string:
            succn->a = base;
            succn->b = shifted;
            succn->kind = RawNode::Kind::eq_fo; // placeholder, see lower_offset_
            offsets_.emplace_back(succn.get(), offset);
            chain->lhs = raw_conj(std::move(succn),
                                  std::move(result), Token{Token::Type::end, "", 0, chain->line, chain->col});
            result = std::move(chain);
        }
        return result;
    }

    std::vector<std::pair<RawNode*, int>> offsets_; // eq_fo nodes meaning b = a + k

    int offset_of(const RawNode* n) const {
        for (auto& [ptr, k] : offsets_)
            if (ptr == n) return k;
        return 0;
    }

    void use_var(const std::string& name, VarKind k, int line, int col) {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
            if (it->first == name) {
                if (it->second != k)
                    throw ParseError("variable '" + name + "' used with the wrong kind", line, col);
                return;
            }
        }
        auto d = declared_.find(name);
        if (d != declared_.end()) {
            if (d->second != k)
                throw ParseError("variable '" + name + "' declared with a different role", line, col);
            free_kinds_[name] = k;
            return;
        }
        if (strict_) throw ParseError("unbound variable '" + name + "'", line, col);
        auto f = free_kinds_.find(name);
        if (f != free_kinds_.end() && f->second != k)
            throw ParseError("variable '" + name + "' used both as element and as set", line, col);
        free_kinds_[name] = k;
    }

    // --- pending equality resolution ----------------------------------------
    std::vector<std::pair<std::string, VarKind>> infer_scope_;

    void infer_kinds(const RawRef& root) {
        // propagate until all pending equalities are typed
        bool changed = true;
        while (changed) {
            changed = false;
            infer_scope_.clear();
            resolve_walk(root, changed);
        }
        infer_scope_.clear();
        finalize_walk(root);
    }

    std::optional<VarKind> known_kind(const std::string& name) {
        for (auto it = infer_scope_.rbegin(); it != infer_scope_.rend(); ++it)
            if (it->first == name) return it->second;
        auto d = declared_.find(name);
        if (d != declared_.end()) return d->second;
        auto f = free_kinds_.find(name);
        if (f != free_kinds_.end()) return f->second;
        return std::nullopt;
    }

    void resolve_walk(const RawRef& n, bool& changed) {
        if (!n) return;
        if (n->kind == RawNode::Kind::exists) {
            infer_scope_.emplace_back(n->a, n->qkind);
            resolve_walk(n->lhs, changed);
            infer_scope_.pop_back();
            return;
        }
        if (n->kind == RawNode::Kind::eq_pending) {
            auto ka = known_kind(n->a);
            auto kb = known_kind(n->b);
            if (ka && kb) return;
            if (ka && !kb) {
                free_kinds_[n->b] = *ka;
                changed = true;
            } else if (kb && !ka) {
                free_kinds_[n->a] = *kb;
                changed = true;
            }
            return;
        }
        resolve_walk(n->lhs, changed);
        resolve_walk(n->rhs, changed);
    }

    void finalize_walk(const RawRef& n) {
        if (!n) return;
        if (n->kind == RawNode::Kind::exists) {
            infer_scope_.emplace_back(n->a, n->qkind);
            finalize_walk(n->lhs);
            infer_scope_.pop_back();
            return;
        }
        if (n->kind == RawNode::Kind::eq_pending) {
            auto ka = known_kind(n->a);
            auto kb = known_kind(n->b);
            if (!ka && strict_) throw ParseError("unbound variable '" + n->a + "'", n->line, n->col);
            if (!kb && strict_) throw ParseError("unbound variable '" + n->b + "'", n->line, n->col);
            VarKind k = ka ? *ka : (kb ? *kb : VarKind::first_order);
            if (!ka) free_kinds_[n->a] = k;
            if (!kb) free_kinds_[n->b] = k;
            ka = known_kind(n->a);
            kb = known_kind(n->b);
            if (*ka != *kb)
                throw ParseError("equality between an element and a set", n->line, n->col);
            n->kind = *ka == VarKind::first_order ? RawNode::Kind::eq_fo : RawNode::Kind::eq_pending;
            if (*ka == VarKind::second_order) n->qkind = VarKind::second_order; // marker for lowering
            return;
        }
        finalize_walk(n->lhs);
        finalize_walk(n->rhs);
    }

    // --- lowering ------------------------------------------------------------
    static void collect_raw_names(const RawRef& n, std::set<std::string>& out) {
        if (!n) return;
        if (!n->a.empty()) out.insert(n->a);
        if (!n->b.empty()) out.insert(n->b);
        collect_raw_names(n->lhs, out);
        collect_raw_names(n->rhs, out);
    }

    static RawRef clone_raw(const RawRef& n) {
        if (!n) return nullptr;
        auto c = std::make_shared<RawNode>(*n);
        c->lhs = clone_raw(n->lhs);
        c->rhs = clone_raw(n->rhs);
        return c;
    }

    RawRef rename_raw(const RawRef& n, const std::string& from, const std::string& to) {
        if (!n) return nullptr;
        auto c = std::make_shared<RawNode>(*n);
        if (n->kind == RawNode::Kind::exists && n->a == from) {
            c->lhs = clone_raw(n->lhs); // rebinding shadows: stop renaming
            return c;
        }
        if (c->a == from) c->a = to;
        if (c->b == from && c->kind != RawNode::Kind::exists) c->b = to;
        c->lhs = rename_raw(n->lhs, from, to);
        c->rhs = rename_raw(n->rhs, from, to);
        // preserve offset annotations for copied nodes
        int k = offset_of(n.get());
        if (k != 0) offsets_.emplace_back(c.get(), k);
        return c;
    }

    Formula lower(const RawRef& n, NameGen& gen) {
        switch (n->kind) {
        case RawNode::Kind::less:
            return fml::less(n->a, n->b);
        case RawNode::Kind::eq_fo: {
            int k = offset_of(n.get());
            if (k != 0) return fml::succ_k_rel(n->a, n->b, k, gen); // b = a + k
            return fml::eq(n->a, n->b);
        }
        case RawNode::Kind::eq_pending: { // resolved second-order equality
            std::string t = gen.fresh("q");
            return fml::forall_fo(t, fml::iff(fml::in(t, n->a), fml::in(t, n->b)));
        }
        case RawNode::Kind::subset: {
            std::string t = gen.fresh("q");
            return fml::forall_fo(t, fml::implies(fml::in(t, n->a), fml::in(t, n->b)));
        }
        case RawNode::Kind::eq_empty: {
            std::string t = gen.fresh("q");
            return fml::neg(fml::exists_fo(t, fml::in(t, n->a)));
        }
        case RawNode::Kind::eq_zero: {
            std::string t = gen.fresh("q");
            return fml::forall_fo(t, fml::iff(fml::in(t, n->a), fml::first(t, gen)));
        }
        case RawNode::Kind::in:
            return fml::in(n->a, n->b);
        case RawNode::Kind::neg:
            return fml::neg(lower(n->lhs, gen));
        case RawNode::Kind::conj:
            return fml::conj(lower(n->lhs, gen), lower(n->rhs, gen));
        case RawNode::Kind::exists:
            return fml::exists(n->a, n->qkind, lower(n->lhs, gen));
        }
        throw Error("lower: unreachable");
    }
};

} // namespace detail

// Parse a formula. `declared` fixes kinds for free variables (e.g. roles from
// a spec file); with strict=true any other free variable is rejected.
inline Formula parse_formula(const std::string& text,
                             const std::map<std::string, VarKind>& declared = {},
                             bool strict = false) {
    detail::FormulaParser p(detail::lex_formula(text), declared, strict);
    return p.run();
}

} // namespace upsynth
