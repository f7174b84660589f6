#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nsa/sexp.hpp"
#include "nsa/syntax.hpp"

namespace nsa {

// Parsers build fully checked ASTs: binders are renamed apart (Barendregt
// convention) and formulas are type-checked against the symbol table.

TypePtr parse_type(const Sexp& s, const SymbolTable& tab);

// Raw term parse; lambda binders are made unique, no type check (callers
// supply the typing context appropriate to their use).
TermPtr parse_term(const Sexp& s, const SymbolTable& tab);

// Formula parse: renames binders apart and type-checks.
FormulaPtr parse_formula(const Sexp& s, const SymbolTable& tab);

// Reads one preamble form (declare-sort / declare-atom / declare-const) into
// the table; returns false if the form is not a preamble form.
bool parse_preamble_form(const Sexp& s, SymbolTable& tab);

// A self-contained formula file: preamble forms followed by one formula.
struct ParsedFormulaFile {
  SymbolTable table;
  FormulaPtr formula;
};
ParsedFormulaFile parse_formula_file(const std::string& text);

// A term file: preamble forms (for sort names in binder types) then one term.
struct ParsedTermFile {
  SymbolTable table;
  TermPtr term;
};
ParsedTermFile parse_term_file(const std::string& text);

// A witness file: preamble forms then (witness <binder> <term>) entries.
std::vector<std::pair<std::string, TermPtr>> parse_witness_file(
    const std::string& text, SymbolTable& tab);

}  // namespace nsa
