#pragma once

#include <string>

#include "nsa/syntax.hpp"

namespace nsa {

// Deterministic canonical output; round-trips through the parsers.
// Closed numeral chains print as decimal literals.

std::string print_type(const TypePtr& t);
std::string print_term(const TermPtr& t);
std::string print_formula(const FormulaPtr& f);

// One declaration per line, stable order (sorts, consts, atoms; each sorted).
std::string print_preamble(const SymbolTable& tab);

// Preamble followed by the formula/term, newline-terminated.
std::string print_formula_file(const SymbolTable& tab, const FormulaPtr& f);
std::string print_term_file(const SymbolTable& tab, const TermPtr& t);

}  // namespace nsa
