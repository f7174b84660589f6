#include "nsa/printer.hpp"

#include "nsa/errors.hpp"

namespace nsa {

std::string print_type(const TypePtr& t) {
  if (!t) fail("IllTyped", "cannot print a missing type");
  switch (t->kind) {
    case FinType::Kind::Nat:
      return "Nat";
    case FinType::Kind::Sort:
      return t->sort;
    case FinType::Kind::Arrow:
      return "(-> " + print_type(t->a) + " " + print_type(t->b) + ")";
    case FinType::Kind::Seq:
      return "(Seq " + print_type(t->a) + ")";
  }
  fail("IllTyped", "unreachable type kind");
}

std::string print_term(const TermPtr& t) {
  if (auto n = as_numeral(t)) return std::to_string(*n);
  switch (t->kind) {
    case Term::Kind::Var:
      return t->name;
    case Term::Kind::Lam:
      return "(lam (" + t->name + " " + print_type(t->type) + ") " +
             print_term(t->t0) + ")";
    case Term::Kind::App:
      return "(app " + print_term(t->t0) + " " + print_term(t->t1) + ")";
    case Term::Kind::Zero:
      return "0";
    case Term::Kind::Succ:
      return "(succ " + print_term(t->t0) + ")";
    case Term::Kind::Rec:
      return "(rec " + print_type(t->type) + " " + print_term(t->t0) + " " +
             print_term(t->t1) + " " + print_term(t->t2) + ")";
    case Term::Kind::Nil:
      return "(nil " + print_type(t->type) + ")";
    case Term::Kind::Cons:
      return "(cons " + print_term(t->t0) + " " + print_term(t->t1) + ")";
    case Term::Kind::Append:
      return "(append " + print_term(t->t0) + " " + print_term(t->t1) + ")";
    case Term::Kind::Len:
      return "(len " + print_term(t->t0) + ")";
    case Term::Kind::Idx:
      return "(idx " + print_term(t->t0) + " " + print_term(t->t1) + ")";
    case Term::Kind::Prefix:
      return "(prefix " + print_term(t->t0) + " " + print_term(t->t1) + ")";
    case Term::Kind::Max:
      return "(max " + print_term(t->t0) + ")";
  }
  fail("IllTyped", "unreachable term kind");
}

std::string print_formula(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Eq0:
      return "(eq0 " + print_term(f->args[0]) + " " + print_term(f->args[1]) +
             ")";
    case Formula::Kind::Le0:
      return "(le0 " + print_term(f->args[0]) + " " + print_term(f->args[1]) +
             ")";
    case Formula::Kind::Atom: {
      std::string s = "(atom " + f->atom;
      for (const auto& a : f->args) s += " " + print_term(a);
      return s + ")";
    }
    case Formula::Kind::St:
      return "(st " + print_term(f->args[0]) + ")";
    case Formula::Kind::And:
      return "(and " + print_formula(f->f0) + " " + print_formula(f->f1) + ")";
    case Formula::Kind::Or:
      return "(or " + print_formula(f->f0) + " " + print_formula(f->f1) + ")";
    case Formula::Kind::Imp:
      return "(imp " + print_formula(f->f0) + " " + print_formula(f->f1) + ")";
    case Formula::Kind::Not:
      return "(not " + print_formula(f->f0) + ")";
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
    case Formula::Kind::ForallSt:
    case Formula::Kind::ExistsSt: {
      const char* head = f->kind == Formula::Kind::Forall     ? "forall"
                         : f->kind == Formula::Kind::Exists   ? "exists"
                         : f->kind == Formula::Kind::ForallSt ? "forall-st"
                                                              : "exists-st";
      return std::string("(") + head + " (" + f->binder + " " +
             print_type(f->btype) + ") " + print_formula(f->f0) + ")";
    }
    case Formula::Kind::Approx:
      return "(approx " + print_term(f->args[0]) + " " +
             print_term(f->args[1]) + ")";
    case Formula::Kind::ForallOmega:
      return "(forall-omega (" + f->binder + ") " + print_formula(f->f0) + ")";
    case Formula::Kind::ForallInf:
      return "(forall-inf (" + f->binder + ") " + print_formula(f->f0) + ")";
  }
  fail("IllTyped", "unreachable formula kind");
}

std::string print_preamble(const SymbolTable& tab) {
  std::string out;
  for (const auto& s : tab.sorts) out += "(declare-sort " + s + ")\n";
  for (const auto& [n, ty] : tab.consts)
    out += "(declare-const " + n + " " + print_type(ty) + ")\n";
  for (const auto& [n, d] : tab.atoms) {
    out += "(declare-atom " + n + " (";
    for (size_t i = 0; i < d.arg_sorts.size(); ++i) {
      if (i) out += ' ';
      out += print_type(d.arg_sorts[i]);
    }
    out += ")";
    if (d.decidable) out += " :decidable";
    if (!d.monotone_in.empty()) {
      out += " :monotone";
      for (int p : d.monotone_in) out += " " + std::to_string(p);
    }
    if (!d.antitone_in.empty()) {
      out += " :antitone";
      for (int p : d.antitone_in) out += " " + std::to_string(p);
    }
    out += ")\n";
  }
  return out;
}

std::string print_formula_file(const SymbolTable& tab, const FormulaPtr& f) {
  return print_preamble(tab) + print_formula(f) + "\n";
}

std::string print_term_file(const SymbolTable& tab, const TermPtr& t) {
  return print_preamble(tab) + print_term(t) + "\n";
}

}  // namespace nsa
