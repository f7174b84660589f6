#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsa/rewrite.hpp"
#include "nsa/verify.hpp"

namespace nsa {

// Step-annotated proof scripts. A script starts from a source formula,
// applies rewrite/axiom/modus-ponens/oracle/supply steps, and must land on
// its declared conclusion (a normal form up to alpha and block permutation).
// Running it yields closed list-valued witness terms for the existential
// block plus the bounded internal sentence they realize.

struct ScriptStep {
  enum class Kind { Rewrite, Axiom, Mp, Oracle, Supply };
  Kind kind = Kind::Rewrite;
  std::string head;            // rule / axiom / lemma / oracle / binder name
  Path path;                   // Rewrite only
  std::vector<TermPtr> terms;  // Axiom instantiations, Supply term
  std::string name_hint;       // Axiom: optional (as <name>) binder hint
};

struct Premise {
  std::string name;
  FormulaPtr a;  // the implication's antecedent normal form
  FormulaPtr b;  // the implication's consequent normal form
  std::map<std::string, TermPtr> witnesses;  // for the combined form's block
};

struct ProofScript {
  std::string name;
  Mode mode = Mode::P;
  SymbolTable tab;
  std::vector<std::string> oracles;  // declared subset of {MU2, MUO}
  FormulaPtr source;
  std::vector<Premise> premises;
  std::vector<ScriptStep> steps;
  FormulaPtr conclusion;
};

// File format: preamble forms, then one
//   (script <name>
//     (mode P|H)
//     (oracles <name>*)
//     (source <formula>)
//     (premise <name> (implication <formula> <formula>)
//              (witness <binder> <term>)*)*
//     (steps <step>*)
//     (conclusion <formula>))
// with steps (rewrite <rule> (<int>*)), (axiom <name> <term>* [(as <id>)]),
// (mp <premise>), (oracle <name>), (supply <binder> <term>).
ProofScript parse_script(const std::string& text);
ProofScript parse_script_file(const std::string& path);
std::string script_to_string(const ProofScript& s);

struct ExtractionResult {
  std::string name;
  Mode mode = Mode::P;
  SymbolTable tab;
  FormulaPtr source;
  NormalForm conclusion_nf;
  std::map<std::string, TermPtr> witnesses;  // may mention declared oracles
  FormulaPtr internal_sentence;              // oracle-guarded when applicable
  std::vector<std::pair<std::string, FormulaPtr>> oracle_parameters;
  bool oracle_approximated = false;
  RewriteTrace trace;
};

ExtractionResult run_script(const ProofScript& s);

// Canonical script re-deriving the normal form from the internal sentence:
// registers every witness term as standard, enables application closure, and
// reintroduces the standard quantifier blocks.
ProofScript reverse_direction(const ExtractionResult& r);

// Substitutes a concrete term for the declared mu oracle in every witness
// and re-derives an unguarded internal sentence; the result is flagged
// approximate because the genuine operator is not computable.
ExtractionResult instantiate_oracle(const ExtractionResult& r, const TermPtr& impl);

// Pointwise single-valued form: every Nat-typed existential binder is
// replaced by the maximum of its witness list instead of a bounded search.
FormulaPtr collapsed_sentence(const NormalForm& nf,
                              const std::map<std::string, TermPtr>& witnesses,
                              const SymbolTable& tab,
                              const std::map<std::string, TypePtr>& extra_ctx = {});

// Bounded-search mu: least i <= bound with f(i) = 0, else 0.
TermPtr bounded_mu_term(int bound);
// Specification: (forall f)((exists n) f(n)=0 -> f(mu f)=0).
FormulaPtr mu_spec_formula();
// Checks the specification against indicator functions with a zero at each
// p in 0..grid_max and the all-ones function; returns violations.
std::vector<std::string> mu_grid_violations(const TermPtr& impl, int grid_max);

// The oracle variables and their types as seen by witness terms.
std::map<std::string, TypePtr> oracle_context(const std::vector<std::string>& oracles);

}  // namespace nsa
