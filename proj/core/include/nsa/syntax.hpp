#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nsa {

// ---------------------------------------------------------------------------
// Finite types: Nat, declared base sorts, function types, finite sequences.
// Immutable shared trees; compare with type_eq.
// ---------------------------------------------------------------------------

struct FinType;
using TypePtr = std::shared_ptr<const FinType>;

struct FinType {
  enum class Kind { Nat, Sort, Arrow, Seq };
  Kind kind = Kind::Nat;
  std::string sort;  // Kind::Sort
  TypePtr a, b;      // Arrow: a -> b;  Seq: a = element type
};

TypePtr nat_type();
TypePtr sort_type(const std::string& name);
TypePtr arrow_type(TypePtr dom, TypePtr cod);
TypePtr seq_type(TypePtr elem);

bool type_eq(const TypePtr& x, const TypePtr& y);
bool is_nat(const TypePtr& t);
bool is_base(const TypePtr& t);  // Nat or Sort

// ---------------------------------------------------------------------------
// Terms of system T with finite-sequence combinators.
// ---------------------------------------------------------------------------

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  enum class Kind {
    Var,     // name
    Lam,     // name : type, body t0
    App,     // t0 t1
    Zero,    //
    Succ,    // t0
    Rec,     // result type, base t0, step t1 : Nat->(type->type), index t2
    Nil,     // type = element type
    Cons,    // head t0, tail t1
    Append,  // t0 t1
    Len,     // t0
    Idx,     // list t0, index t1
    Prefix,  // list t0, count t1
    Max      // t0 : Seq Nat
  };
  Kind kind = Kind::Zero;
  std::string name;
  TypePtr type;
  TermPtr t0, t1, t2;
};

TermPtr mk_var(std::string name);
TermPtr mk_lam(std::string binder, TypePtr btype, TermPtr body);
TermPtr mk_app(TermPtr fun, TermPtr arg);
TermPtr mk_zero();
TermPtr mk_succ(TermPtr t);
TermPtr mk_num(std::uint64_t n);
TermPtr mk_rec(TypePtr rho, TermPtr base, TermPtr step, TermPtr index);
TermPtr mk_nil(TypePtr elem);
TermPtr mk_cons(TermPtr head, TermPtr tail);
TermPtr mk_append(TermPtr s, TermPtr t);
TermPtr mk_len(TermPtr s);
TermPtr mk_idx(TermPtr s, TermPtr i);
TermPtr mk_prefix(TermPtr s, TermPtr n);
TermPtr mk_max(TermPtr s);

// Builds the literal list <elems[0], ..., elems[n-1]> as a Cons chain.
TermPtr mk_list(const std::vector<TermPtr>& elems, TypePtr elem_type);
// Iterated application f a0 a1 ... .
TermPtr mk_apps(TermPtr fun, const std::vector<TermPtr>& args);
// Recognizes closed Succ^n(Zero) chains.
std::optional<std::uint64_t> as_numeral(const TermPtr& t);

// ---------------------------------------------------------------------------
// Atom declarations and the per-file symbol table.
// ---------------------------------------------------------------------------

struct AtomDecl {
  std::string name;
  std::vector<TypePtr> arg_sorts;  // base types only
  bool decidable = false;
  std::vector<int> monotone_in;  // Nat argument positions, 0-based
  std::vector<int> antitone_in;
};

struct SymbolTable {
  std::set<std::string> sorts;
  std::map<std::string, AtomDecl> atoms;
  std::map<std::string, TypePtr> consts;  // declared global constants

  const AtomDecl* find_atom(const std::string& name) const;
  const TypePtr* find_const(const std::string& name) const;
};

// ---------------------------------------------------------------------------
// Formulas: decidable base predicates eq0/le0, declared atoms, st(t),
// connectives, plain and st-relativized quantifiers, and the sugar nodes
// approx / forall-omega / forall-inf (eliminated by abbreviation unfolding).
// ---------------------------------------------------------------------------

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind {
    Eq0,       // args[0] = args[1], both Nat
    Le0,       // args[0] <= args[1], both Nat
    Atom,      // atom name, args
    St,        // args[0] is standard
    And,       // f0, f1
    Or,        // f0, f1
    Imp,       // f0 -> f1
    Not,       // f0
    Forall,    // binder : btype, body f0
    Exists,    //
    ForallSt,  //
    ExistsSt,  //
    Approx,       // args[0] infinitely close to args[1]
    ForallOmega,  // binder ranges over nonstandard Nat
    ForallInf     // binder ranges over infinitesimals
  };
  Kind kind = Kind::Eq0;
  std::string atom;  // Kind::Atom
  std::vector<TermPtr> args;
  std::string binder;
  TypePtr btype;  // may be null for ForallInf when no bound atom is declared
  FormulaPtr f0, f1;
};

FormulaPtr mk_eq0(TermPtr a, TermPtr b);
FormulaPtr mk_le0(TermPtr a, TermPtr b);
FormulaPtr mk_atom(std::string name, std::vector<TermPtr> args);
FormulaPtr mk_st(TermPtr t);
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_imp(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_not(FormulaPtr a);
FormulaPtr mk_quant(Formula::Kind k, std::string binder, TypePtr btype,
                    FormulaPtr body);
FormulaPtr mk_forall(std::string b, TypePtr t, FormulaPtr f);
FormulaPtr mk_exists(std::string b, TypePtr t, FormulaPtr f);
FormulaPtr mk_forall_st(std::string b, TypePtr t, FormulaPtr f);
FormulaPtr mk_exists_st(std::string b, TypePtr t, FormulaPtr f);
FormulaPtr mk_approx(TermPtr a, TermPtr b);
FormulaPtr mk_forall_omega(std::string b, FormulaPtr f);
FormulaPtr mk_forall_inf(std::string b, TypePtr btype, FormulaPtr f);

bool is_quantifier(Formula::Kind k);
// Number of direct subformulas (quantifiers have 1, binary connectives 2).
int child_count(const FormulaPtr& f);
FormulaPtr child(const FormulaPtr& f, int i);
FormulaPtr with_children(const FormulaPtr& f, std::vector<FormulaPtr> kids);

// Position paths address subformulas: each entry selects a child as above.
using Path = std::vector<int>;
std::string path_to_string(const Path& p);
FormulaPtr subformula_at(const FormulaPtr& f, const Path& p);
FormulaPtr replace_at(const FormulaPtr& f, const Path& p, FormulaPtr repl);

// ---------------------------------------------------------------------------
// Structural utilities.
// ---------------------------------------------------------------------------

// Typing. ctx maps bound variables to types; globals come from the table.
TypePtr infer_type(const TermPtr& t, const std::map<std::string, TypePtr>& ctx,
                   const SymbolTable& tab);
// Type-checks a whole formula (binders extend the context).
void check_formula(const FormulaPtr& f, std::map<std::string, TypePtr> ctx,
                   const SymbolTable& tab);

std::set<std::string> free_term_vars(const TermPtr& t);
std::set<std::string> free_vars(const FormulaPtr& f);
// All variable names occurring anywhere (free or bound).
void collect_names(const TermPtr& t, std::set<std::string>& out);
void collect_names(const FormulaPtr& f, std::set<std::string>& out);

// Capture-avoiding substitution of a term for a free variable.
TermPtr subst_term(const TermPtr& t, const std::string& var, const TermPtr& v);
FormulaPtr subst_formula(const FormulaPtr& f, const std::string& var,
                         const TermPtr& v);

bool term_eq(const TermPtr& a, const TermPtr& b);  // exact, names included
bool alpha_eq(const TermPtr& a, const TermPtr& b);
bool alpha_eq(const FormulaPtr& a, const FormulaPtr& b);

// True iff the formula mentions no standardness construct (st, st-quantifier,
// or sugar that unfolds to one).
bool classify_internal(const FormulaPtr& f);

// Fresh-name supply seeded with every name already in use.
class FreshGen {
 public:
  FreshGen() = default;
  explicit FreshGen(std::set<std::string> used) : used_(std::move(used)) {}
  void reserve(const std::string& name) { used_.insert(name); }
  void reserve_all(const FormulaPtr& f);
  void reserve_all(const TermPtr& t);
  // Returns base if unused, else base_2, base_3, ...
  std::string fresh(const std::string& base);

 private:
  std::set<std::string> used_;
};

// Renames bound variables so that binders are pairwise distinct and disjoint
// from free/global names (the parser applies this to every input).
FormulaPtr make_binders_unique(const FormulaPtr& f, FreshGen& gen);

}  // namespace nsa
