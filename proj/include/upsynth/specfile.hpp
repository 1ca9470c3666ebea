// specfile.hpp -- the spec file format: a formula, role declarations for the
// input/output variables, parameter bindings, and options.
//
//   formula: all t. (in(Y,t) <-> in(X,t))
//   input: X
//   output: Y
//   param P = 1;0
//   option statecap 100000
//
// '#' starts a comment. Exactly one input and one output role; every
// parameter used by the formula must be bound.
#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "upsynth/errors.hpp"
#include "upsynth/formula.hpp"
#include "upsynth/predicate.hpp"

namespace upsynth {

struct SpecFile {
    Formula formula;
    std::string formula_text;
    std::string input_var;
    std::string output_var;
    std::vector<std::pair<std::string, UPPredicate>> params;
    std::map<std::string, std::string> options;

    bool has_roles() const { return !input_var.empty() && !output_var.empty(); }

    static SpecFile parse(const std::string& text, bool require_roles = true) {
        SpecFile spec;
        std::istringstream is(text);
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            line = line.substr(first);

            auto starts = [&](const std::string& kw) {
                return line.rfind(kw, 0) == 0;
            };
            if (starts("formula:")) {
                if (!spec.formula_text.empty())
                    throw ParseError("duplicate formula line", lineno, 1);
                spec.formula_text = line.substr(8);
            } else if (starts("input:")) {
                if (!spec.input_var.empty()) throw ParseError("duplicate input role", lineno, 1);
                spec.input_var = trim(line.substr(6), lineno);
            } else if (starts("output:")) {
                if (!spec.output_var.empty()) throw ParseError("duplicate output role", lineno, 1);
                spec.output_var = trim(line.substr(7), lineno);
            } else if (starts("param")) {
                std::istringstream ls(line.substr(5));
                std::string name, eq, lit;
                if (!(ls >> name >> eq >> lit) || eq != "=")
                    throw ParseError("expected 'param NAME = u;v'", lineno, 1);
                for (auto& [pn, pv] : spec.params)
                    if (pn == name) throw ParseError("duplicate parameter '" + name + "'", lineno, 1);
                spec.params.emplace_back(name, UPPredicate::parse(lit));
            } else if (starts("option")) {
                std::istringstream ls(line.substr(6));
                std::string key, value;
                if (!(ls >> key >> value)) throw ParseError("expected 'option KEY VALUE'", lineno, 1);
                spec.options[key] = value;
            } else {
                throw ParseError("unrecognized line: " + line, lineno, 1);
            }
        }
        if (spec.formula_text.empty()) throw ParseError("spec file has no formula");

        if (require_roles) {
            if (spec.input_var.empty()) throw ParseError("spec file declares no input role");
            if (spec.output_var.empty()) throw ParseError("spec file declares no output role");
        }
        // role conflicts
        if (!spec.input_var.empty() && spec.input_var == spec.output_var)
            throw ParseError("role conflict: '" + spec.input_var + "' is both input and output");
        for (auto& [pn, pv] : spec.params) {
            if (pn == spec.input_var || pn == spec.output_var)
                throw ParseError("role conflict: parameter '" + pn + "' is also input or output");
        }

        std::map<std::string, VarKind> declared;
        if (!spec.input_var.empty()) declared[spec.input_var] = VarKind::second_order;
        if (!spec.output_var.empty()) declared[spec.output_var] = VarKind::second_order;
        for (auto& [pn, pv] : spec.params) declared[pn] = VarKind::second_order;
        spec.formula = parse_formula(spec.formula_text, declared, true);
        return spec;
    }

    // parameters the formula actually mentions
    std::vector<std::pair<std::string, UPPredicate>> used_params() const {
        FreeVars fv = free_vars(formula);
        std::vector<std::pair<std::string, UPPredicate>> used;
        for (auto& [pn, pv] : params)
            if (fv.second_order.count(pn)) used.emplace_back(pn, pv);
        return used;
    }

private:
    static std::string trim(const std::string& s, int lineno) {
        auto a = s.find_first_not_of(" \t\r");
        auto b = s.find_last_not_of(" \t\r");
        if (a == std::string::npos) throw ParseError("missing name", lineno, 1);
        return s.substr(a, b - a + 1);
    }
};

} // namespace upsynth
