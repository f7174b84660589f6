#pragma once

#include <random>
#include <string>
#include <vector>

#include "nsa/parser.hpp"
#include "nsa/printer.hpp"
#include "nsa/syntax.hpp"

namespace nsa::testutil {

// Declarations shared by hand-written cases and the random-AST generator.
inline const char* kPreamble = R"(
(declare-sort R)
(declare-const xa R)
(declare-const xb R)
(declare-const cf (-> R R))
(declare-const cn Nat)
(declare-const cseq (-> Nat R))
(declare-const xlim R)
(declare-atom phi (Nat Nat) :decidable)
(declare-atom tri (R R R) :decidable)
(declare-atom psi (R Nat) :decidable :monotone 1)
(declare-atom lt-inv (R R Nat) :decidable :antitone 2)
(declare-atom abs-lt-inv (R Nat) :antitone 1)
)";

inline SymbolTable test_table() {
  SymbolTable tab;
  for (const Sexp& s : parse_sexps(kPreamble)) parse_preamble_form(s, tab);
  return tab;
}

inline FormulaPtr parse_f(const std::string& body) {
  SymbolTable tab = test_table();
  return parse_formula(parse_sexp(body), tab);
}

inline TermPtr parse_t(const std::string& body) {
  SymbolTable tab = test_table();
  return parse_term(parse_sexp(body), tab);
}

// Generates well-typed random formulas over the shared declarations; used by
// the parser/printer round-trip property.
class RandomAst {
 public:
  explicit RandomAst(std::uint32_t seed) : rng_(seed) {}

  FormulaPtr formula(int depth) {
    scope_nat_.clear();
    scope_r_.clear();
    next_name_ = 0;
    return gen_formula(depth);
  }

 private:
  std::mt19937 rng_;
  std::vector<std::string> scope_nat_;
  std::vector<std::string> scope_r_;
  int next_name_ = 0;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

  std::string fresh_name() { return "q" + std::to_string(next_name_++); }

  TermPtr nat_term(int depth) {
    int c = pick(depth <= 0 ? 3 : 7);
    switch (c) {
      case 0:
        return mk_num(pick(10));
      case 1:
        return scope_nat_.empty() ? mk_num(pick(4))
                                  : mk_var(scope_nat_[pick(
                                        (int)scope_nat_.size())]);
      case 2:
        return mk_var("cn");
      case 3:
        return mk_succ(nat_term(depth - 1));
      case 4:
        return mk_len(seq_term(depth - 1));
      case 5:
        return mk_max(seq_term(depth - 1));
      default:
        return mk_app(mk_lam(fresh_name(), nat_type(), mk_num(pick(5))),
                      nat_term(depth - 1));
    }
  }

  TermPtr seq_term(int depth) {
    if (depth <= 0 || pick(3) == 0) {
      std::vector<TermPtr> elems;
      int len = pick(3);
      for (int i = 0; i < len; ++i) elems.push_back(nat_term(0));
      return mk_list(elems, nat_type());
    }
    switch (pick(3)) {
      case 0:
        return mk_cons(nat_term(depth - 1), seq_term(depth - 1));
      case 1:
        return mk_append(seq_term(depth - 1), seq_term(depth - 1));
      default:
        return mk_prefix(seq_term(depth - 1), nat_term(depth - 1));
    }
  }

  TermPtr r_term(int depth) {
    if (depth > 0 && pick(3) == 0)
      return mk_app(mk_var("cf"), r_term(depth - 1));
    if (!scope_r_.empty() && pick(2) == 0)
      return mk_var(scope_r_[pick((int)scope_r_.size())]);
    return mk_var(pick(2) == 0 ? "xa" : "xb");
  }

  FormulaPtr leaf() {
    switch (pick(5)) {
      case 0:
        return mk_eq0(nat_term(1), nat_term(1));
      case 1:
        return mk_le0(nat_term(1), nat_term(1));
      case 2:
        return mk_atom("phi", {nat_term(1), nat_term(1)});
      case 3:
        return mk_atom("lt-inv", {r_term(1), r_term(1), nat_term(1)});
      default:
        return mk_st(nat_term(1));
    }
  }

  FormulaPtr gen_formula(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(10)) {
      case 0:
        return mk_and(gen_formula(depth - 1), gen_formula(depth - 1));
      case 1:
        return mk_or(gen_formula(depth - 1), gen_formula(depth - 1));
      case 2:
        return mk_imp(gen_formula(depth - 1), gen_formula(depth - 1));
      case 3:
        return mk_not(gen_formula(depth - 1));
      case 4:
      case 5: {
        std::string x = fresh_name();
        scope_nat_.push_back(x);
        FormulaPtr body = gen_formula(depth - 1);
        scope_nat_.pop_back();
        Formula::Kind k = pick(2) == 0 ? Formula::Kind::Forall
                                       : Formula::Kind::ExistsSt;
        return mk_quant(k, x, nat_type(), body);
      }
      case 6: {
        std::string x = fresh_name();
        scope_r_.push_back(x);
        FormulaPtr body = gen_formula(depth - 1);
        scope_r_.pop_back();
        Formula::Kind k = pick(2) == 0 ? Formula::Kind::Exists
                                       : Formula::Kind::ForallSt;
        return mk_quant(k, x, sort_type("R"), body);
      }
      case 7:
        return mk_approx(r_term(1), r_term(1));
      case 8: {
        std::string x = fresh_name();
        scope_nat_.push_back(x);
        FormulaPtr body = gen_formula(depth - 1);
        scope_nat_.pop_back();
        return mk_forall_omega(x, body);
      }
      default: {
        std::string x = fresh_name();
        scope_r_.push_back(x);
        FormulaPtr body = gen_formula(depth - 1);
        scope_r_.pop_back();
        return mk_forall_inf(x, sort_type("R"), body);
      }
    }
  }
};

}  // namespace nsa::testutil
