// corpus.hpp -- the golden corpora shared by the unit tests and the
// acceptance suite: synthesis instances with hand-derived winners, and
// formula languages with independent semantic deciders.
#pragma once

#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "upsynth/arena.hpp"
#include "upsynth/predicate.hpp"

namespace upsynth::test {

struct SpecCase {
    std::string name;
    std::string text;
    Player expected; // hand-derived; cross-checked against the oracle solver
};

inline const std::vector<SpecCase>& spec_corpus() {
    static const std::vector<SpecCase> cases = {
        // II copies the input bit for bit
        {"copy", "formula: all t. (in(Y,t) <-> in(X,t))\ninput: X\noutput: Y\n", Player::II},
        // same game on a nontrivial parameter word
        {"copy-p10",
         "formula: all t. (in(Y,t) <-> in(X,t))\ninput: X\noutput: Y\nparam P = 1;0\n",
         Player::II},
        // II floods the output
        {"always-out", "formula: all t. in(Y,t)\ninput: X\noutput: Y\n", Player::II},
        // one output bit suffices
        {"eventually-out", "formula: ex t. in(Y,t)\ninput: X\noutput: Y\n", Player::II},
        // II would have to predict the next input bit
        {"prediction", "formula: all t. (in(Y,t) <-> in(X,t+1))\ninput: X\noutput: Y\n",
         Player::I},
        // beta = "P nonempty" holds: the implication demands Y = {0}
        {"psi-beta-on",
         "formula: ((ex t. in(P,t)) -> Y = {0}) & (~(ex t. in(P,t)) -> X = {})\n"
         "input: X\noutput: Y\nparam P = 1;0\n",
         Player::II},
        // beta fails: X = {} is demanded of Player I's own moves, so I deviates
        {"psi-beta-off",
         "formula: ((ex t. in(P,t)) -> Y = {0}) & (~(ex t. in(P,t)) -> X = {})\n"
         "input: X\noutput: Y\nparam P = ;0\n",
         Player::I},
        // output must reproduce the parameter word
        {"param-copy",
         "formula: all t. (in(Y,t) <-> in(P,t))\ninput: X\noutput: Y\nparam P = 01;10\n",
         Player::II},
        // output must reproduce the shifted parameter word
        {"param-shift",
         "formula: all t. (in(Y,t) <-> in(P,t+1))\ninput: X\noutput: Y\nparam P = 1;0\n",
         Player::II},
        // classical delay: output time t+1 echoes input time t
        {"delay",
         "formula: all t. all s. (s = t+1 -> (in(Y,s) <-> in(X,t)))\ninput: X\noutput: Y\n",
         Player::II},
        // output is input xor parameter
        {"xor-param",
         "formula: all t. (in(Y,t) <-> ~(in(X,t) <-> in(P,t)))\n"
         "input: X\noutput: Y\nparam P = 0;01\n",
         Player::II},
        // every request is granted at or after its time; granting always works
        {"request-grant",
         "formula: all t. (in(X,t) -> ex s. (~(s < t) & in(Y,s)))\ninput: X\noutput: Y\n",
         Player::II},
        // copying and predicting at once is impossible
        {"conflict",
         "formula: all t. ((in(Y,t) <-> in(X,t+1)) & (in(Y,t) <-> in(X,t)))\n"
         "input: X\noutput: Y\n",
         Player::I},
        // silence is easy
        {"suppress", "formula: all t. ~in(Y,t)\ninput: X\noutput: Y\nparam P = 1;0\n",
         Player::II},
        // unsatisfiable specification: I wins by default
        {"unsat", "formula: ex t. t < t\ninput: X\noutput: Y\n", Player::I},
        // valid specification: II wins by default
        {"taut", "formula: all t. t < t+1\ninput: X\noutput: Y\n", Player::II},
    };
    return cases;
}

// ---------------------------------------------------------------------------
struct LangCase {
    std::string name;
    std::string formula_text;
    std::vector<std::string> vars; // lexicographic; track i = vars[i]
    std::function<bool(const std::vector<UPPredicate>&)> holds;
};

namespace langdetail {

// positions >= max prefix repeat with the lcm of the periods
inline std::pair<std::size_t, std::size_t> window(const std::vector<UPPredicate>& xs) {
    std::size_t p = 0, l = 1;
    for (auto& x : xs) {
        p = std::max(p, x.prefix.size());
        l = std::lcm(l, x.period.size());
    }
    return {p, l};
}

inline bool period_has_one(const UPPredicate& x) {
    return x.period.find('1') != std::string::npos;
}

} // namespace langdetail

inline const std::vector<LangCase>& lang_corpus() {
    using langdetail::period_has_one;
    using langdetail::window;
    static const std::vector<LangCase> cases = {
        {"equal", "all t. (in(X,t) <-> in(Y,t))", {"X", "Y"},
         [](const std::vector<UPPredicate>& a) {
             auto [p, l] = window(a);
             for (std::size_t n = 0; n < p + l; ++n)
                 if (a[0].bit_at(n) != a[1].bit_at(n)) return false;
             return true;
         }},
        {"nonempty", "ex t. in(X,t)", {"X"},
         [](const std::vector<UPPredicate>& a) {
             return a[0].prefix.find('1') != std::string::npos || period_has_one(a[0]);
         }},
        {"full", "all t. in(X,t)", {"X"},
         [](const std::vector<UPPredicate>& a) {
             return a[0].prefix.find('0') == std::string::npos &&
                    a[0].period.find('0') == std::string::npos;
         }},
        {"infinitely-many", "all t. ex s. (t < s & in(X,s))", {"X"},
         [](const std::vector<UPPredicate>& a) { return period_has_one(a[0]); }},
        {"finitely-many", "~(all t. ex s. (t < s & in(X,s)))", {"X"},
         [](const std::vector<UPPredicate>& a) { return !period_has_one(a[0]); }},
        {"subset", "X <= Y", {"X", "Y"},
         [](const std::vector<UPPredicate>& a) {
             auto [p, l] = window(a);
             for (std::size_t n = 0; n < p + l; ++n)
                 if (a[0].bit_at(n) && !a[1].bit_at(n)) return false;
             return true;
         }},
        {"zero-in", "ex t. (~(ex s. s < t) & in(X,t))", {"X"},
         [](const std::vector<UPPredicate>& a) { return a[0].bit_at(0) == 1; }},
        {"alternating", "all t. all s. (s = t+1 -> (in(X,s) <-> ~in(X,t)))", {"X"},
         [](const std::vector<UPPredicate>& a) {
             auto [p, l] = window(a);
             for (std::size_t n = 0; n < p + l; ++n)
                 if (a[0].bit_at(n + 1) == a[0].bit_at(n)) return false;
             return true;
         }},
        {"exactly-one", "ex! t. in(X,t)", {"X"},
         [](const std::vector<UPPredicate>& a) {
             if (period_has_one(a[0])) return false;
             int ones = 0;
             for (char c : a[0].prefix) ones += c == '1';
             return ones == 1;
         }},
        {"empty", "X = {}", {"X"},
         [](const std::vector<UPPredicate>& a) {
             return a[0].prefix.find('1') == std::string::npos && !period_has_one(a[0]);
         }},
        {"disjoint", "~(ex t. (in(X,t) & in(Y,t)))", {"X", "Y"},
         [](const std::vector<UPPredicate>& a) {
             auto [p, l] = window(a);
             for (std::size_t n = 0; n < p + l; ++n)
                 if (a[0].bit_at(n) && a[1].bit_at(n)) return false;
             return true;
         }},
        {"response", "all t. (in(X,t) -> ex s. (t < s & in(Y,s)))", {"X", "Y"},
         [](const std::vector<UPPredicate>& a) {
             if (period_has_one(a[1])) return true;
             if (period_has_one(a[0])) return false;
             long maxy = -1;
             for (std::size_t i = 0; i < a[1].prefix.size(); ++i)
                 if (a[1].prefix[i] == '1') maxy = static_cast<long>(i);
             for (std::size_t i = 0; i < a[0].prefix.size(); ++i)
                 if (a[0].prefix[i] == '1' && static_cast<long>(i) >= maxy) return false;
             return true;
         }},
        {"only-even-positions",
         "exset E. ((ex t. (~(ex s. s < t) & in(E,t))) & "
         "(all t. all s. (s = t+1 -> (in(E,s) <-> ~in(E,t)))) & X <= E)",
         {"X"},
         [](const std::vector<UPPredicate>& a) {
             for (std::size_t i = 0; i < a[0].prefix.size(); ++i)
                 if (a[0].prefix[i] == '1' && i % 2 != 0) return false;
             std::size_t off = a[0].prefix.size(), vlen = a[0].period.size();
             for (std::size_t j = 0; j < vlen; ++j) {
                 if (a[0].period[j] != '1') continue;
                 if (vlen % 2 != 0) return false; // positions of both parities get hit
                 if ((off + j) % 2 != 0) return false;
             }
             return true;
         }},
        {"eventually-period-two", "ex d. all t. (d < t -> (in(X,t) <-> in(X,t+2)))", {"X"},
         [](const std::vector<UPPredicate>& a) {
             return canonicalize(a[0]).period.size() <= 2;
         }},
        {"zero-singleton", "X = {0}", {"X"},
         [](const std::vector<UPPredicate>& a) {
             if (a[0].bit_at(0) != 1) return false;
             if (period_has_one(a[0])) return false;
             for (std::size_t i = 1; i < a[0].prefix.size(); ++i)
                 if (a[0].prefix[i] == '1') return false;
             return true;
         }},
    };
    return cases;
}

} // namespace upsynth::test
