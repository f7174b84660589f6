#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "nsa/interp.hpp"
#include "nsa/rewrite.hpp"

namespace nsa {

struct VerificationReport {
  long long checked = 0;      // universal instances (or tables) examined
  long long closed_form = 0;  // expected instance count when exhaustive
  bool exhaustive = true;     // false when table enumeration was sampled
  std::uint64_t steps_used = 0;

  struct Failure {
    std::string assignment;  // "x=3 k=1" / table bits for schema sweeps
    std::string detail;
  };
  std::vector<Failure> failures;

  bool pass() const { return failures.empty(); }
};

std::string report_to_string(const VerificationReport& r);

// Substitutes list-valued witness terms for the existential block of a
// normal form: (forall-st x)(exists-st y) phi becomes the internal sentence
// (forall x)(exists i < len (t x)) phi[y := idx (t x) i]. Each witness must
// be closed apart from the names in extra_ctx, and typed as the universal
// block curried into a sequence of the binder's type.
FormulaPtr strip_standard(const NormalForm& nf,
                          const std::map<std::string, TermPtr>& witnesses,
                          const SymbolTable& tab,
                          const std::map<std::string, TypePtr>& extra_ctx = {});

// Truth of a formula under the finite interpretation. env carries element
// values (numbers for base types, lists / lookup functions otherwise);
// quantifiers enumerate their carriers, standard quantifiers the standard
// part. steps counts down across term evaluation and formula nodes.
bool eval_formula_cutoff(const FormulaPtr& f, const EnvPtr& env, const Interp& in,
                         const SymbolTable& tab, std::uint64_t& steps);

// Exhaustively checks an internal sentence (forall x...) body over the
// carriers. checked = product of the leading universal carrier sizes.
// Independent of the rewrite engine by construction.
VerificationReport check_witness(const FormulaPtr& internal_sentence, const Interp& in,
                                 const SymbolTable& tab, EnvPtr oracle_env = nullptr);

// One cutoff configuration for a schema sweep.
struct SchemaSize {
  int K = 1;
  int M = 2;
  int arity = 1;  // predicate arity in the schema template
};

// All configurations with K <= max_k, K < M <= max_m, arity in {1,2}.
std::vector<SchemaSize> default_schema_sizes(int max_k, int max_m);

const std::vector<std::string>& known_schemas();

// Sweeps every predicate table (exhaustive when the table has at most 16
// cells, otherwise seeded samples plus threshold tables) and reports the
// configurations where the schema instance fails.
VerificationReport cutoff_check(const std::string& schema,
                                const std::vector<SchemaSize>& sizes);

// Least N in [1..M] such that the normal form's matrix holds for every
// assignment of the universal block when the single existential Nat binder
// is N and precision_var is k_value. Throws NoModulusExists if none works.
long long brute_force_modulus(const NormalForm& nf, const std::string& precision_var,
                              long long k_value, const Interp& in,
                              const SymbolTable& tab);

}  // namespace nsa
