#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsa/syntax.hpp"

namespace nsa {

// P is the classical engine mode; H restricts every rewrite to
// intuitionistically valid moves and enables the Herbrandized schemas
// (ncr / hgmp / hip) instead of classical dualities.
enum class Mode { P, H };

Mode parse_mode(const std::string& s);  // "P" | "H"

// Target shape: a universal standard block, an existential standard block,
// and an internal matrix.
struct NormalForm {
  std::vector<std::pair<std::string, TypePtr>> univ_block;
  std::vector<std::pair<std::string, TypePtr>> exist_block;
  FormulaPtr matrix;
};

FormulaPtr normal_form_to_formula(const NormalForm& nf);
// Peels leading forall-st then exists-st binders; the rest must be internal.
NormalForm formula_to_normal_form(const FormulaPtr& f);
// Alpha-equality up to permutation within each block (not across blocks).
bool normal_form_equal(const NormalForm& a, const NormalForm& b);

struct TraceStep {
  std::string rule;
  Path path;
  FormulaPtr before;
  FormulaPtr after;
};

struct RewriteTrace {
  std::vector<TraceStep> steps;
};

std::string trace_to_string(const RewriteTrace& t);

// The bounded list-membership shape (exists (i Nat) (and (le0 (succ i)
// (len L)) body)) that encodes "some element of L satisfies body".
struct BoundedExists {
  std::string index;
  TermPtr list;
  FormulaPtr body;
};
FormulaPtr make_bounded_exists(const std::string& index, const TermPtr& list,
                               const FormulaPtr& body);
std::optional<BoundedExists> match_bounded_exists(const FormulaPtr& f);

class Rewriter {
 public:
  Rewriter(SymbolTable tab, Mode mode);

  Mode mode() const { return mode_; }
  const SymbolTable& table() const { return tab_; }

  // Eliminates approx / forall-omega / forall-inf, and rewrites negated
  // standardness of a Nat term into its universal-bound reading.
  FormulaPtr unfold_abbrevs(const FormulaPtr& f);

  // Pushes negations through connectives and quantifiers; in H mode only the
  // intuitionistically valid directions are applied.
  FormulaPtr negation_normal(const FormulaPtr& f);

  // Raises st-quantifiers to the largest extractable prefix. Never moves
  // internal quantifiers. With strict=true, diagnoses st-quantifiers stuck
  // in positions no later rule can extract (NonPrenexable).
  FormulaPtr prenex_st(const FormulaPtr& f, bool strict = false);

  // (forall y...)(exists-st x...) psi  ==>  (exists-st xs...)(forall y...)
  // (some element of each xs satisfies psi); psi must be internal.
  FormulaPtr apply_idealization(const FormulaPtr& f, const Path& p);

  // (forall-st x)(exists-st y) psi ==> (exists-st G)(forall-st x)
  // (some element of G(x) satisfies psi).
  FormulaPtr apply_hac(const FormulaPtr& f);
  FormulaPtr apply_hac_at(const FormulaPtr& f, const Path& p);

  // H-mode schemas.
  FormulaPtr apply_ncr(const FormulaPtr& f, const Path& p);
  FormulaPtr apply_hgmp(const FormulaPtr& f, const Path& p);
  FormulaPtr apply_hip(const FormulaPtr& f, const Path& p);

  // (forall-st x) psi ==> (exists y)(not st(y) and psi(y)), one-way.
  FormulaPtr apply_overspill(const FormulaPtr& f);
  FormulaPtr apply_overspill_at(const FormulaPtr& f, const Path& p);

  // Replaces a list-valued existential whose elements are used monotonically
  // by a single maximum value.
  FormulaPtr max_collapse(const FormulaPtr& f, const std::string& binder);
  FormulaPtr max_collapse_at(const FormulaPtr& f, const Path& p);

  // Full pipeline driver; records a replayable trace.
  std::pair<NormalForm, RewriteTrace> normalize_to_normal_form(
      const FormulaPtr& f);

  // Combined normal form of an implication between normal forms.
  NormalForm nf_implication(const NormalForm& a, const NormalForm& b);

  // Normal form of (forall-inf eps)(forall-st x)(exists-st y) phi.
  NormalForm nf_forall_infinitesimal(const FormulaPtr& f);

  // Named-rule dispatch used by proof scripts and trace replay.
  FormulaPtr apply_rule(const std::string& rule, const FormulaPtr& f,
                        const Path& p);

 private:
  SymbolTable tab_;
  Mode mode_;
  FreshGen gen_;

  void reseed(const FormulaPtr& f);
  FormulaPtr unfold_rec(const FormulaPtr& f,
                        std::map<std::string, TypePtr>& ctx);
  FormulaPtr nnf_rec(const FormulaPtr& f);
  FormulaPtr prenex_rec(const FormulaPtr& f, bool pol);
  FormulaPtr hoist(FormulaPtr core, bool pol);
  FormulaPtr idealize_node(const FormulaPtr& f);
  FormulaPtr collapse_node(const FormulaPtr& f, const FormulaPtr& whole);
};

}  // namespace nsa
