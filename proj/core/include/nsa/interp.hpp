#pragma once

#include <boost/rational.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsa/eval.hpp"
#include "nsa/sexp.hpp"
#include "nsa/syntax.hpp"

namespace nsa {

using Rat = boost::rational<long long>;

Rat parse_rational(const std::string& tok);  // "3", "-1/2", "7/16"
std::string rat_to_string(const Rat& r);

// A finite interpretation: carriers for the declared sorts, a Nat domain
// {0..M} with standardness cutoff st(n) <=> n <= K, decidable atom meanings
// (bit tables or exact rational rules), and element tables for constants.
struct SortCarrier {
  int size = 0;
  std::vector<Rat> labels;  // optional; one rational label per element
};

struct AtomInterp {
  std::optional<std::vector<bool>> table;  // row-major over the carriers
  std::optional<Sexp> rule;                // rational-arithmetic expression
};

struct ConstInterp {
  std::vector<std::string> arg_sorts;  // "Nat" or declared sort names
  std::string res_sort;
  std::vector<long long> values;  // row-major; carrier indices / naturals
};

struct Interp {
  int K = 1;
  int M = 2;
  std::map<std::string, SortCarrier> sorts;
  std::map<std::string, AtomInterp> atoms;
  std::map<std::string, ConstInterp> consts;

  // Number of elements of a base type (Nat -> M+1, sorts -> declared size).
  int carrier_size(const TypePtr& t) const;
  // Number of standard elements (values 0..K, clipped to the carrier).
  int standard_size(const TypePtr& t) const;
  // Rational value of an element: Nat value itself, sort label if present,
  // otherwise the element index.
  Rat label(const TypePtr& t, long long v) const;
};

// Line-oriented format:
//   sort <name> <size> [<rational-label> ...]
//   cutoff K=<n> M=<n>
//   atom <name> rule <s-expression over $0..$n>
//   atom <name> table <bitstring>
//   const <name> <res-sort> <value>
//   fun <name> <argsort>[,<argsort>...] <res-sort> <values...>
// '#' and ';' start comments.
Interp parse_interp(const std::string& text);
Interp parse_interp_file(const std::string& path);

// Truth of a declared atom on element values.
bool atom_truth(const Interp& in, const SymbolTable& tab,
                const std::string& name, const std::vector<long long>& args);

// Evaluator bindings (numbers and lookup functions) for the interpreted
// constants, layered over an optional base environment.
EnvPtr interp_const_env(const Interp& in, const SymbolTable& tab,
                        EnvPtr base = nullptr);

}  // namespace nsa
