#include "nsa/syntax.hpp"

#include <algorithm>

#include "nsa/errors.hpp"

namespace nsa {

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

TypePtr nat_type() {
  static const TypePtr t = std::make_shared<FinType>();
  return t;
}

TypePtr sort_type(const std::string& name) {
  auto t = std::make_shared<FinType>();
  t->kind = FinType::Kind::Sort;
  t->sort = name;
  return t;
}

TypePtr arrow_type(TypePtr dom, TypePtr cod) {
  auto t = std::make_shared<FinType>();
  t->kind = FinType::Kind::Arrow;
  t->a = std::move(dom);
  t->b = std::move(cod);
  return t;
}

TypePtr seq_type(TypePtr elem) {
  auto t = std::make_shared<FinType>();
  t->kind = FinType::Kind::Seq;
  t->a = std::move(elem);
  return t;
}

bool type_eq(const TypePtr& x, const TypePtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  if (x->kind != y->kind) return false;
  switch (x->kind) {
    case FinType::Kind::Nat:
      return true;
    case FinType::Kind::Sort:
      return x->sort == y->sort;
    case FinType::Kind::Arrow:
      return type_eq(x->a, y->a) && type_eq(x->b, y->b);
    case FinType::Kind::Seq:
      return type_eq(x->a, y->a);
  }
  return false;
}

bool is_nat(const TypePtr& t) { return t && t->kind == FinType::Kind::Nat; }

bool is_base(const TypePtr& t) {
  return t &&
         (t->kind == FinType::Kind::Nat || t->kind == FinType::Kind::Sort);
}

// ---------------------------------------------------------------------------
// Term constructors
// ---------------------------------------------------------------------------

namespace {
TermPtr term_node(Term::Kind k) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  return t;
}
Term* mut(const TermPtr& t) { return const_cast<Term*>(t.get()); }
}  // namespace

TermPtr mk_var(std::string name) {
  auto t = term_node(Term::Kind::Var);
  mut(t)->name = std::move(name);
  return t;
}

TermPtr mk_lam(std::string binder, TypePtr btype, TermPtr body) {
  auto t = term_node(Term::Kind::Lam);
  mut(t)->name = std::move(binder);
  mut(t)->type = std::move(btype);
  mut(t)->t0 = std::move(body);
  return t;
}

TermPtr mk_app(TermPtr fun, TermPtr arg) {
  auto t = term_node(Term::Kind::App);
  mut(t)->t0 = std::move(fun);
  mut(t)->t1 = std::move(arg);
  return t;
}

TermPtr mk_zero() {
  static const TermPtr z = term_node(Term::Kind::Zero);
  return z;
}

TermPtr mk_succ(TermPtr x) {
  auto t = term_node(Term::Kind::Succ);
  mut(t)->t0 = std::move(x);
  return t;
}

TermPtr mk_num(std::uint64_t n) {
  TermPtr t = mk_zero();
  for (std::uint64_t i = 0; i < n; ++i) t = mk_succ(t);
  return t;
}

TermPtr mk_rec(TypePtr rho, TermPtr base, TermPtr step, TermPtr index) {
  auto t = term_node(Term::Kind::Rec);
  mut(t)->type = std::move(rho);
  mut(t)->t0 = std::move(base);
  mut(t)->t1 = std::move(step);
  mut(t)->t2 = std::move(index);
  return t;
}

TermPtr mk_nil(TypePtr elem) {
  auto t = term_node(Term::Kind::Nil);
  mut(t)->type = std::move(elem);
  return t;
}

TermPtr mk_cons(TermPtr head, TermPtr tail) {
  auto t = term_node(Term::Kind::Cons);
  mut(t)->t0 = std::move(head);
  mut(t)->t1 = std::move(tail);
  return t;
}

TermPtr mk_append(TermPtr s, TermPtr u) {
  auto t = term_node(Term::Kind::Append);
  mut(t)->t0 = std::move(s);
  mut(t)->t1 = std::move(u);
  return t;
}

TermPtr mk_len(TermPtr s) {
  auto t = term_node(Term::Kind::Len);
  mut(t)->t0 = std::move(s);
  return t;
}

TermPtr mk_idx(TermPtr s, TermPtr i) {
  auto t = term_node(Term::Kind::Idx);
  mut(t)->t0 = std::move(s);
  mut(t)->t1 = std::move(i);
  return t;
}

TermPtr mk_prefix(TermPtr s, TermPtr n) {
  auto t = term_node(Term::Kind::Prefix);
  mut(t)->t0 = std::move(s);
  mut(t)->t1 = std::move(n);
  return t;
}

TermPtr mk_max(TermPtr s) {
  auto t = term_node(Term::Kind::Max);
  mut(t)->t0 = std::move(s);
  return t;
}

TermPtr mk_list(const std::vector<TermPtr>& elems, TypePtr elem_type) {
  TermPtr t = mk_nil(std::move(elem_type));
  for (auto it = elems.rbegin(); it != elems.rend(); ++it)
    t = mk_cons(*it, t);
  return t;
}

TermPtr mk_apps(TermPtr fun, const std::vector<TermPtr>& args) {
  TermPtr t = std::move(fun);
  for (const auto& a : args) t = mk_app(t, a);
  return t;
}

std::optional<std::uint64_t> as_numeral(const TermPtr& t) {
  std::uint64_t n = 0;
  const Term* cur = t.get();
  while (cur) {
    if (cur->kind == Term::Kind::Zero) return n;
    if (cur->kind != Term::Kind::Succ) return std::nullopt;
    ++n;
    cur = cur->t0.get();
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Symbol table
// ---------------------------------------------------------------------------

const AtomDecl* SymbolTable::find_atom(const std::string& name) const {
  auto it = atoms.find(name);
  return it == atoms.end() ? nullptr : &it->second;
}

const TypePtr* SymbolTable::find_const(const std::string& name) const {
  auto it = consts.find(name);
  return it == consts.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Formula constructors
// ---------------------------------------------------------------------------

namespace {
FormulaPtr formula_node(Formula::Kind k) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  return f;
}
Formula* fmut(const FormulaPtr& f) { return const_cast<Formula*>(f.get()); }
}  // namespace

FormulaPtr mk_eq0(TermPtr a, TermPtr b) {
  auto f = formula_node(Formula::Kind::Eq0);
  fmut(f)->args = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr mk_le0(TermPtr a, TermPtr b) {
  auto f = formula_node(Formula::Kind::Le0);
  fmut(f)->args = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr mk_atom(std::string name, std::vector<TermPtr> args) {
  auto f = formula_node(Formula::Kind::Atom);
  fmut(f)->atom = std::move(name);
  fmut(f)->args = std::move(args);
  return f;
}

FormulaPtr mk_st(TermPtr t) {
  auto f = formula_node(Formula::Kind::St);
  fmut(f)->args = {std::move(t)};
  return f;
}

namespace {
FormulaPtr binary(Formula::Kind k, FormulaPtr a, FormulaPtr b) {
  auto f = formula_node(k);
  fmut(f)->f0 = std::move(a);
  fmut(f)->f1 = std::move(b);
  return f;
}
}  // namespace

FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) {
  return binary(Formula::Kind::And, std::move(a), std::move(b));
}
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) {
  return binary(Formula::Kind::Or, std::move(a), std::move(b));
}
FormulaPtr mk_imp(FormulaPtr a, FormulaPtr b) {
  return binary(Formula::Kind::Imp, std::move(a), std::move(b));
}

FormulaPtr mk_not(FormulaPtr a) {
  auto f = formula_node(Formula::Kind::Not);
  fmut(f)->f0 = std::move(a);
  return f;
}

FormulaPtr mk_quant(Formula::Kind k, std::string binder, TypePtr btype,
                    FormulaPtr body) {
  auto f = formula_node(k);
  fmut(f)->binder = std::move(binder);
  fmut(f)->btype = std::move(btype);
  fmut(f)->f0 = std::move(body);
  return f;
}

FormulaPtr mk_forall(std::string b, TypePtr t, FormulaPtr f) {
  return mk_quant(Formula::Kind::Forall, std::move(b), std::move(t),
                  std::move(f));
}
FormulaPtr mk_exists(std::string b, TypePtr t, FormulaPtr f) {
  return mk_quant(Formula::Kind::Exists, std::move(b), std::move(t),
                  std::move(f));
}
FormulaPtr mk_forall_st(std::string b, TypePtr t, FormulaPtr f) {
  return mk_quant(Formula::Kind::ForallSt, std::move(b), std::move(t),
                  std::move(f));
}
FormulaPtr mk_exists_st(std::string b, TypePtr t, FormulaPtr f) {
  return mk_quant(Formula::Kind::ExistsSt, std::move(b), std::move(t),
                  std::move(f));
}

FormulaPtr mk_approx(TermPtr a, TermPtr b) {
  auto f = formula_node(Formula::Kind::Approx);
  fmut(f)->args = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr mk_forall_omega(std::string b, FormulaPtr f) {
  return mk_quant(Formula::Kind::ForallOmega, std::move(b), nat_type(),
                  std::move(f));
}

FormulaPtr mk_forall_inf(std::string b, TypePtr btype, FormulaPtr f) {
  return mk_quant(Formula::Kind::ForallInf, std::move(b), std::move(btype),
                  std::move(f));
}

bool is_quantifier(Formula::Kind k) {
  switch (k) {
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
    case Formula::Kind::ForallSt:
    case Formula::Kind::ExistsSt:
    case Formula::Kind::ForallOmega:
    case Formula::Kind::ForallInf:
      return true;
    default:
      return false;
  }
}

int child_count(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::Eq0:
    case Formula::Kind::Le0:
    case Formula::Kind::Atom:
    case Formula::Kind::St:
    case Formula::Kind::Approx:
      return 0;
    case Formula::Kind::Not:
      return 1;
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp:
      return 2;
    default:
      return 1;  // quantifiers
  }
}

FormulaPtr child(const FormulaPtr& f, int i) {
  if (i < 0 || i >= child_count(f))
    fail("IndexOutOfRange", "no subformula child " + std::to_string(i));
  return i == 0 ? f->f0 : f->f1;
}

FormulaPtr with_children(const FormulaPtr& f, std::vector<FormulaPtr> kids) {
  if (static_cast<int>(kids.size()) != child_count(f))
    fail("IndexOutOfRange", "wrong child count in with_children");
  auto g = std::make_shared<Formula>(*f);
  if (!kids.empty()) g->f0 = std::move(kids[0]);
  if (kids.size() > 1) g->f1 = std::move(kids[1]);
  return g;
}

std::string path_to_string(const Path& p) {
  std::string s = "(";
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(p[i]);
  }
  return s + ")";
}

FormulaPtr subformula_at(const FormulaPtr& f, const Path& p) {
  FormulaPtr cur = f;
  for (int i : p) cur = child(cur, i);
  return cur;
}

FormulaPtr replace_at(const FormulaPtr& f, const Path& p, FormulaPtr repl) {
  if (p.empty()) return repl;
  Path rest(p.begin() + 1, p.end());
  auto kids = std::vector<FormulaPtr>();
  for (int i = 0; i < child_count(f); ++i) kids.push_back(child(f, i));
  kids.at(p[0]) = replace_at(kids.at(p[0]), rest, std::move(repl));
  return with_children(f, std::move(kids));
}

// ---------------------------------------------------------------------------
// Typing
// ---------------------------------------------------------------------------

namespace {
std::string describe_type(const TypePtr& t);

std::string describe_type(const TypePtr& t) {
  if (!t) return "?";
  switch (t->kind) {
    case FinType::Kind::Nat:
      return "Nat";
    case FinType::Kind::Sort:
      return t->sort;
    case FinType::Kind::Arrow:
      return "(-> " + describe_type(t->a) + " " + describe_type(t->b) + ")";
    case FinType::Kind::Seq:
      return "(Seq " + describe_type(t->a) + ")";
  }
  return "?";
}

void expect(const TypePtr& got, const TypePtr& want, const char* where) {
  if (!type_eq(got, want))
    fail("TypeMismatch", std::string(where) + ": expected " +
                             describe_type(want) + ", got " +
                             describe_type(got));
}
}  // namespace

TypePtr infer_type(const TermPtr& t, const std::map<std::string, TypePtr>& ctx,
                   const SymbolTable& tab) {
  switch (t->kind) {
    case Term::Kind::Var: {
      auto it = ctx.find(t->name);
      if (it != ctx.end()) return it->second;
      if (const TypePtr* g = tab.find_const(t->name)) return *g;
      fail("UnboundVariable", "variable '" + t->name + "' is not in scope");
    }
    case Term::Kind::Lam: {
      auto inner = ctx;
      inner[t->name] = t->type;
      return arrow_type(t->type, infer_type(t->t0, inner, tab));
    }
    case Term::Kind::App: {
      TypePtr f = infer_type(t->t0, ctx, tab);
      TypePtr a = infer_type(t->t1, ctx, tab);
      if (f->kind != FinType::Kind::Arrow)
        fail("TypeMismatch",
             "application head has non-function type " + describe_type(f));
      expect(a, f->a, "application argument");
      return f->b;
    }
    case Term::Kind::Zero:
      return nat_type();
    case Term::Kind::Succ:
      expect(infer_type(t->t0, ctx, tab), nat_type(), "succ argument");
      return nat_type();
    case Term::Kind::Rec: {
      expect(infer_type(t->t0, ctx, tab), t->type, "rec base");
      expect(infer_type(t->t1, ctx, tab),
             arrow_type(nat_type(), arrow_type(t->type, t->type)), "rec step");
      expect(infer_type(t->t2, ctx, tab), nat_type(), "rec index");
      return t->type;
    }
    case Term::Kind::Nil:
      return seq_type(t->type);
    case Term::Kind::Cons: {
      TypePtr h = infer_type(t->t0, ctx, tab);
      expect(infer_type(t->t1, ctx, tab), seq_type(h), "cons tail");
      return seq_type(h);
    }
    case Term::Kind::Append: {
      TypePtr s = infer_type(t->t0, ctx, tab);
      if (s->kind != FinType::Kind::Seq)
        fail("TypeMismatch", "append of non-sequence " + describe_type(s));
      expect(infer_type(t->t1, ctx, tab), s, "append second argument");
      return s;
    }
    case Term::Kind::Len: {
      TypePtr s = infer_type(t->t0, ctx, tab);
      if (s->kind != FinType::Kind::Seq)
        fail("TypeMismatch", "len of non-sequence " + describe_type(s));
      return nat_type();
    }
    case Term::Kind::Idx: {
      TypePtr s = infer_type(t->t0, ctx, tab);
      if (s->kind != FinType::Kind::Seq)
        fail("TypeMismatch", "idx of non-sequence " + describe_type(s));
      expect(infer_type(t->t1, ctx, tab), nat_type(), "idx position");
      return s->a;
    }
    case Term::Kind::Prefix: {
      TypePtr s = infer_type(t->t0, ctx, tab);
      if (s->kind != FinType::Kind::Seq)
        fail("TypeMismatch", "prefix of non-sequence " + describe_type(s));
      expect(infer_type(t->t1, ctx, tab), nat_type(), "prefix count");
      return s;
    }
    case Term::Kind::Max:
      expect(infer_type(t->t0, ctx, tab), seq_type(nat_type()),
             "max argument");
      return nat_type();
  }
  fail("IllTyped", "unreachable term kind");
}

void check_formula(const FormulaPtr& f, std::map<std::string, TypePtr> ctx,
                   const SymbolTable& tab) {
  switch (f->kind) {
    case Formula::Kind::Eq0:
    case Formula::Kind::Le0:
      expect(infer_type(f->args[0], ctx, tab), nat_type(),
             f->kind == Formula::Kind::Eq0 ? "eq0 argument" : "le0 argument");
      expect(infer_type(f->args[1], ctx, tab), nat_type(),
             f->kind == Formula::Kind::Eq0 ? "eq0 argument" : "le0 argument");
      return;
    case Formula::Kind::Atom: {
      const AtomDecl* d = tab.find_atom(f->atom);
      if (!d) fail("UnknownAtom", "atom '" + f->atom + "' is not declared");
      if (d->arg_sorts.size() != f->args.size())
        fail("TypeMismatch", "atom '" + f->atom + "' expects " +
                                 std::to_string(d->arg_sorts.size()) +
                                 " arguments, got " +
                                 std::to_string(f->args.size()));
      for (size_t i = 0; i < f->args.size(); ++i)
        expect(infer_type(f->args[i], ctx, tab), d->arg_sorts[i],
               ("argument of atom '" + f->atom + "'").c_str());
      return;
    }
    case Formula::Kind::St:
      infer_type(f->args[0], ctx, tab);
      return;
    case Formula::Kind::Approx: {
      TypePtr a = infer_type(f->args[0], ctx, tab);
      TypePtr b = infer_type(f->args[1], ctx, tab);
      expect(b, a, "approx operands");
      if (!is_base(a))
        fail("TypeMismatch",
             "approx operands must have base type, got " + describe_type(a));
      return;
    }
    case Formula::Kind::And:
    case Formula::Kind::Or:
    case Formula::Kind::Imp:
      check_formula(f->f0, ctx, tab);
      check_formula(f->f1, ctx, tab);
      return;
    case Formula::Kind::Not:
      check_formula(f->f0, ctx, tab);
      return;
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
    case Formula::Kind::ForallSt:
    case Formula::Kind::ExistsSt:
    case Formula::Kind::ForallOmega:
    case Formula::Kind::ForallInf: {
      if (!f->btype)
        fail("MissingAtomDecl",
             "binder '" + f->binder +
                 "' has no type (forall-inf needs a declared abs-lt-inv atom)");
      ctx[f->binder] = f->btype;
      check_formula(f->f0, ctx, tab);
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Variables, substitution, alpha-equivalence
// ---------------------------------------------------------------------------

namespace {
void free_term_vars_into(const TermPtr& t, std::set<std::string>& bound,
                         std::set<std::string>& out) {
  switch (t->kind) {
    case Term::Kind::Var:
      if (!bound.count(t->name)) out.insert(t->name);
      return;
    case Term::Kind::Lam: {
      bool fresh_here = bound.insert(t->name).second;
      free_term_vars_into(t->t0, bound, out);
      if (fresh_here) bound.erase(t->name);
      return;
    }
    default:
      for (const TermPtr* c : {&t->t0, &t->t1, &t->t2})
        if (*c) free_term_vars_into(*c, bound, out);
      return;
  }
}

void free_vars_into(const FormulaPtr& f, std::set<std::string>& bound,
                    std::set<std::string>& out) {
  for (const auto& a : f->args) free_term_vars_into(a, bound, out);
  if (is_quantifier(f->kind)) {
    bool fresh_here = bound.insert(f->binder).second;
    free_vars_into(f->f0, bound, out);
    if (fresh_here) bound.erase(f->binder);
    return;
  }
  if (f->f0) free_vars_into(f->f0, bound, out);
  if (f->f1) free_vars_into(f->f1, bound, out);
}
}  // namespace

std::set<std::string> free_term_vars(const TermPtr& t) {
  std::set<std::string> bound, out;
  free_term_vars_into(t, bound, out);
  return out;
}

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> bound, out;
  free_vars_into(f, bound, out);
  return out;
}

void collect_names(const TermPtr& t, std::set<std::string>& out) {
  if (t->kind == Term::Kind::Var || t->kind == Term::Kind::Lam)
    out.insert(t->name);
  for (const TermPtr* c : {&t->t0, &t->t1, &t->t2})
    if (*c) collect_names(*c, out);
}

void collect_names(const FormulaPtr& f, std::set<std::string>& out) {
  for (const auto& a : f->args) collect_names(a, out);
  if (is_quantifier(f->kind)) out.insert(f->binder);
  if (f->f0) collect_names(f->f0, out);
  if (f->f1) collect_names(f->f1, out);
}

TermPtr subst_term(const TermPtr& t, const std::string& var,
                   const TermPtr& v) {
  switch (t->kind) {
    case Term::Kind::Var:
      return t->name == var ? v : t;
    case Term::Kind::Lam: {
      if (t->name == var) return t;  // shadowed
      std::set<std::string> fv = free_term_vars(v);
      if (fv.count(t->name)) {
        // Rename the binder away from the incoming term's free variables.
        std::set<std::string> used = fv;
        collect_names(t->t0, used);
        used.insert(var);
        FreshGen gen(used);
        std::string nn = gen.fresh(t->name);
        TermPtr body = subst_term(t->t0, t->name, mk_var(nn));
        return mk_lam(nn, t->type, subst_term(body, var, v));
      }
      return mk_lam(t->name, t->type, subst_term(t->t0, var, v));
    }
    default: {
      auto g = std::make_shared<Term>(*t);
      if (t->t0) g->t0 = subst_term(t->t0, var, v);
      if (t->t1) g->t1 = subst_term(t->t1, var, v);
      if (t->t2) g->t2 = subst_term(t->t2, var, v);
      return g;
    }
  }
}

FormulaPtr subst_formula(const FormulaPtr& f, const std::string& var,
                         const TermPtr& v) {
  auto g = std::make_shared<Formula>(*f);
  for (auto& a : g->args) a = subst_term(a, var, v);
  if (is_quantifier(f->kind)) {
    if (f->binder == var) return g;  // shadowed
    std::set<std::string> fv = free_term_vars(v);
    if (fv.count(f->binder)) {
      std::set<std::string> used = fv;
      collect_names(f->f0, used);
      used.insert(var);
      FreshGen gen(used);
      std::string nn = gen.fresh(f->binder);
      g->binder = nn;
      g->f0 = subst_formula(subst_formula(f->f0, f->binder, mk_var(nn)), var,
                            v);
      return g;
    }
  }
  if (g->f0) g->f0 = subst_formula(g->f0, var, v);
  if (g->f1) g->f1 = subst_formula(g->f1, var, v);
  return g;
}

bool term_eq(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  if (a->name != b->name) return false;
  if ((a->type || b->type) && !type_eq(a->type, b->type)) return false;
  for (auto [x, y] : {std::pair(&a->t0, &b->t0), std::pair(&a->t1, &b->t1),
                      std::pair(&a->t2, &b->t2)}) {
    if (static_cast<bool>(*x) != static_cast<bool>(*y)) return false;
    if (*x && !term_eq(*x, *y)) return false;
  }
  return true;
}

namespace {
using RenEnv = std::vector<std::pair<std::string, std::string>>;

bool lookup_corr(const RenEnv& env, const std::string& a, const std::string& b,
                 bool& decided) {
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->first == a || it->second == b) {
      decided = true;
      return it->first == a && it->second == b;
    }
  }
  decided = false;
  return false;
}

bool alpha_eq_term_env(const TermPtr& a, const TermPtr& b, RenEnv& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Term::Kind::Var: {
      bool decided = false;
      bool ok = lookup_corr(env, a->name, b->name, decided);
      return decided ? ok : a->name == b->name;
    }
    case Term::Kind::Lam: {
      if (!type_eq(a->type, b->type)) return false;
      env.emplace_back(a->name, b->name);
      bool ok = alpha_eq_term_env(a->t0, b->t0, env);
      env.pop_back();
      return ok;
    }
    default: {
      if ((a->type || b->type) && !type_eq(a->type, b->type)) return false;
      for (auto [x, y] : {std::pair(&a->t0, &b->t0), std::pair(&a->t1, &b->t1),
                          std::pair(&a->t2, &b->t2)}) {
        if (static_cast<bool>(*x) != static_cast<bool>(*y)) return false;
        if (*x && !alpha_eq_term_env(*x, *y, env)) return false;
      }
      return true;
    }
  }
}

bool alpha_eq_formula_env(const FormulaPtr& a, const FormulaPtr& b,
                          RenEnv& env) {
  if (a->kind != b->kind) return false;
  if (a->atom != b->atom) return false;
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!alpha_eq_term_env(a->args[i], b->args[i], env)) return false;
  if (is_quantifier(a->kind)) {
    if (!type_eq(a->btype, b->btype)) return false;
    env.emplace_back(a->binder, b->binder);
    bool ok = alpha_eq_formula_env(a->f0, b->f0, env);
    env.pop_back();
    return ok;
  }
  for (auto [x, y] : {std::pair(&a->f0, &b->f0), std::pair(&a->f1, &b->f1)}) {
    if (static_cast<bool>(*x) != static_cast<bool>(*y)) return false;
    if (*x && !alpha_eq_formula_env(*x, *y, env)) return false;
  }
  return true;
}
}  // namespace

bool alpha_eq(const TermPtr& a, const TermPtr& b) {
  RenEnv env;
  return alpha_eq_term_env(a, b, env);
}

bool alpha_eq(const FormulaPtr& a, const FormulaPtr& b) {
  RenEnv env;
  return alpha_eq_formula_env(a, b, env);
}

bool classify_internal(const FormulaPtr& f) {
  switch (f->kind) {
    case Formula::Kind::St:
    case Formula::Kind::ForallSt:
    case Formula::Kind::ExistsSt:
    case Formula::Kind::Approx:
    case Formula::Kind::ForallOmega:
    case Formula::Kind::ForallInf:
      return false;
    default:
      if (f->f0 && !classify_internal(f->f0)) return false;
      if (f->f1 && !classify_internal(f->f1)) return false;
      return true;
  }
}

// ---------------------------------------------------------------------------
// Fresh names and the unique-binder normalization
// ---------------------------------------------------------------------------

void FreshGen::reserve_all(const FormulaPtr& f) { collect_names(f, used_); }
void FreshGen::reserve_all(const TermPtr& t) { collect_names(t, used_); }

std::string FreshGen::fresh(const std::string& base) {
  if (used_.insert(base).second) return base;
  for (int i = 2;; ++i) {
    std::string cand = base + "_" + std::to_string(i);
    if (used_.insert(cand).second) return cand;
  }
}

namespace {
TermPtr unique_term_binders(const TermPtr& t, FreshGen& gen) {
  switch (t->kind) {
    case Term::Kind::Var:
    case Term::Kind::Zero:
      return t;
    case Term::Kind::Lam: {
      std::string nn = gen.fresh(t->name);
      TermPtr body = t->t0;
      if (nn != t->name) body = subst_term(body, t->name, mk_var(nn));
      return mk_lam(nn, t->type, unique_term_binders(body, gen));
    }
    default: {
      auto g = std::make_shared<Term>(*t);
      if (t->t0) g->t0 = unique_term_binders(t->t0, gen);
      if (t->t1) g->t1 = unique_term_binders(t->t1, gen);
      if (t->t2) g->t2 = unique_term_binders(t->t2, gen);
      return g;
    }
  }
}
}  // namespace

FormulaPtr make_binders_unique(const FormulaPtr& f, FreshGen& gen) {
  auto g = std::make_shared<Formula>(*f);
  for (auto& a : g->args) a = unique_term_binders(a, gen);
  if (is_quantifier(f->kind)) {
    std::string nn = gen.fresh(f->binder);
    FormulaPtr body = f->f0;
    if (nn != f->binder) body = subst_formula(body, f->binder, mk_var(nn));
    g->binder = nn;
    g->f0 = make_binders_unique(body, gen);
    return g;
  }
  if (g->f0) g->f0 = make_binders_unique(g->f0, gen);
  if (g->f1) g->f1 = make_binders_unique(g->f1, gen);
  return g;
}

}  // namespace nsa
