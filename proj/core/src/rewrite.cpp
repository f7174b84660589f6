#include "nsa/rewrite.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "nsa/errors.hpp"
#include "nsa/printer.hpp"

namespace nsa {

namespace {

using K = Formula::Kind;

bool is_st_quant(K k) { return k == K::ForallSt || k == K::ExistsSt; }

bool has_formula_args(K k) {
  return k == K::Eq0 || k == K::Le0 || k == K::Atom || k == K::St ||
         k == K::Approx;
}

TermPtr map_args_term(const TermPtr& t, const TermPtr& pat, const TermPtr& rep);

TermPtr replace_in_term(const TermPtr& t, const TermPtr& pat,
                        const TermPtr& rep) {
  if (term_eq(t, pat)) return rep;
  return map_args_term(t, pat, rep);
}

TermPtr map_args_term(const TermPtr& t, const TermPtr& pat,
                      const TermPtr& rep) {
  auto r = [&](const TermPtr& s) { return replace_in_term(s, pat, rep); };
  using TK = Term::Kind;
  switch (t->kind) {
    case TK::Var:
    case TK::Zero:
    case TK::Nil:
      return t;
    case TK::Lam:
      return mk_lam(t->name, t->type, r(t->t0));
    case TK::App:
      return mk_app(r(t->t0), r(t->t1));
    case TK::Succ:
      return mk_succ(r(t->t0));
    case TK::Rec:
      return mk_rec(t->type, r(t->t0), r(t->t1), r(t->t2));
    case TK::Cons:
      return mk_cons(r(t->t0), r(t->t1));
    case TK::Append:
      return mk_append(r(t->t0), r(t->t1));
    case TK::Len:
      return mk_len(r(t->t0));
    case TK::Idx:
      return mk_idx(r(t->t0), r(t->t1));
    case TK::Prefix:
      return mk_prefix(r(t->t0), r(t->t1));
    case TK::Max:
      return mk_max(r(t->t0));
  }
  fail("Internal", "unhandled term kind in replace_in_term");
}

FormulaPtr replace_in_formula(const FormulaPtr& f, const TermPtr& pat,
                              const TermPtr& rep) {
  if (has_formula_args(f->kind)) {
    auto copy = std::make_shared<Formula>(*f);
    for (auto& a : copy->args) a = replace_in_term(a, pat, rep);
    return copy;
  }
  std::vector<FormulaPtr> kids;
  for (int i = 0; i < child_count(f); ++i)
    kids.push_back(replace_in_formula(child(f, i), pat, rep));
  return with_children(f, std::move(kids));
}

bool contains_term(const TermPtr& t, const TermPtr& pat) {
  if (term_eq(t, pat)) return true;
  for (const TermPtr& s : {t->t0, t->t1, t->t2})
    if (s && contains_term(s, pat)) return true;
  return false;
}

// +1 the formula gets weaker as the argument grows, viewed positively
// (monotone); -1 antitone; 0 unknown.
int arg_direction(const FormulaPtr& f, std::size_t pos,
                  const SymbolTable& tab) {
  if (f->kind == K::Le0) return pos == 0 ? -1 : +1;
  if (f->kind == K::Atom) {
    const AtomDecl* d = tab.find_atom(f->atom);
    if (!d) return 0;
    if (std::count(d->monotone_in.begin(), d->monotone_in.end(),
                   static_cast<int>(pos)))
      return +1;
    if (std::count(d->antitone_in.begin(), d->antitone_in.end(),
                   static_cast<int>(pos)))
      return -1;
  }
  return 0;
}

// Collects the type context introduced by the quantifiers along a path.
void ctx_along(const FormulaPtr& f, const Path& p,
               std::map<std::string, TypePtr>& ctx) {
  FormulaPtr g = f;
  for (int step : p) {
    if (is_quantifier(g->kind) && g->btype) ctx[g->binder] = g->btype;
    g = child(g, step);
  }
}

bool find_st_node(const FormulaPtr& f, Path& cur, Path& out) {
  switch (f->kind) {
    case K::St:
    case K::ForallSt:
    case K::ExistsSt:
    case K::Approx:
    case K::ForallOmega:
    case K::ForallInf:
      out = cur;
      return true;
    default:
      break;
  }
  for (int i = 0; i < child_count(f); ++i) {
    cur.push_back(i);
    if (find_st_node(child(f, i), cur, out)) return true;
    cur.pop_back();
  }
  return false;
}

// Which quantifier kind, if any, results from moving a child's head
// st-quantifier across the given connective node.
std::optional<K> cross_kind(K node, int child_idx, K head, Mode mode) {
  bool cls = mode == Mode::P;
  switch (node) {
    case K::And:
      return head;
    case K::Or:
      if (head == K::ExistsSt) return K::ExistsSt;
      if (head == K::ForallSt && cls) return K::ForallSt;
      return std::nullopt;
    case K::Imp:
      if (child_idx == 1) {
        if (head == K::ForallSt) return K::ForallSt;
        if (head == K::ExistsSt && cls) return K::ExistsSt;
      } else {
        if (head == K::ExistsSt) return K::ForallSt;
        if (head == K::ForallSt && cls) return K::ExistsSt;
      }
      return std::nullopt;
    case K::Not:
      if (head == K::ExistsSt) return K::ForallSt;
      if (head == K::ForallSt && cls) return K::ExistsSt;
      return std::nullopt;
    case K::Forall:
      if (head == K::ForallSt) return K::ForallSt;
      return std::nullopt;
    case K::Exists:
      if (head == K::ExistsSt) return K::ExistsSt;
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

struct QuantSpec {
  K kind;
  std::string binder;
  TypePtr type;
};

// Flags st-quantifiers that sit, effectively universally, inside the scope of
// an effectively existential internal quantifier: no rule can extract those.
void strict_scan(const FormulaPtr& f, bool pol, bool under_eff_ex, Path& cur) {
  switch (f->kind) {
    case K::ForallSt:
    case K::ExistsSt: {
      bool eff_univ = (f->kind == K::ForallSt) == pol;
      if (eff_univ && under_eff_ex)
        fail("NonPrenexable",
             "st-quantifier at " + path_to_string(cur) +
                 " cannot be moved past an internal existential quantifier");
      cur.push_back(0);
      strict_scan(f->f0, pol, under_eff_ex, cur);
      cur.pop_back();
      return;
    }
    case K::Forall:
    case K::Exists: {
      bool eff_ex = (f->kind == K::Exists) == pol;
      cur.push_back(0);
      strict_scan(f->f0, pol, under_eff_ex || eff_ex, cur);
      cur.pop_back();
      return;
    }
    case K::Not:
      cur.push_back(0);
      strict_scan(f->f0, !pol, under_eff_ex, cur);
      cur.pop_back();
      return;
    case K::Imp:
      cur.push_back(0);
      strict_scan(f->f0, !pol, under_eff_ex, cur);
      cur.pop_back();
      cur.push_back(1);
      strict_scan(f->f1, pol, under_eff_ex, cur);
      cur.pop_back();
      return;
    case K::And:
    case K::Or:
      for (int i = 0; i < 2; ++i) {
        cur.push_back(i);
        strict_scan(child(f, i), pol, under_eff_ex, cur);
        cur.pop_back();
      }
      return;
    default:
      return;
  }
}

// True when f is (forall y1..)(exists-st x1..) psi with psi internal and at
// least one quantifier in each group.
bool is_idealize_head(const FormulaPtr& f) {
  if (f->kind != K::Forall) return false;
  FormulaPtr g = f;
  while (g->kind == K::Forall) g = g->f0;
  if (g->kind != K::ExistsSt) return false;
  while (g->kind == K::ExistsSt) g = g->f0;
  return classify_internal(g);
}

void scan_idealize(const FormulaPtr& f, bool pol, bool head_blocked, Path& cur,
                   std::vector<Path>& out) {
  if (pol && !head_blocked && is_idealize_head(f)) out.push_back(cur);
  bool blocks = f->kind == K::Forall && pol;
  for (int i = 0; i < child_count(f); ++i) {
    bool flip = f->kind == K::Not || (f->kind == K::Imp && i == 0);
    cur.push_back(i);
    scan_idealize(child(f, i), flip ? !pol : pol, blocks, cur, out);
    cur.pop_back();
  }
}

void scan_seq_nat_exists_st(const FormulaPtr& f, Path& cur,
                            std::vector<Path>& out) {
  if (f->kind == K::ExistsSt && f->btype &&
      type_eq(f->btype, seq_type(nat_type())))
    out.push_back(cur);
  for (int i = 0; i < child_count(f); ++i) {
    cur.push_back(i);
    scan_seq_nat_exists_st(child(f, i), cur, out);
    cur.pop_back();
  }
}

void find_bounded_uses(const FormulaPtr& f, const std::string& list_var,
                       bool pol, Path& cur,
                       std::vector<std::pair<Path, bool>>& out) {
  auto be = match_bounded_exists(f);
  if (be && be->list->kind == Term::Kind::Var && be->list->name == list_var) {
    out.emplace_back(cur, pol);
    return;  // occurrences inside the body are accounted to this use
  }
  for (int i = 0; i < child_count(f); ++i) {
    bool flip = f->kind == K::Not || (f->kind == K::Imp && i == 0);
    cur.push_back(i);
    find_bounded_uses(child(f, i), list_var, flip ? !pol : pol, cur, out);
    cur.pop_back();
  }
}

}  // namespace

Mode parse_mode(const std::string& s) {
  if (s == "P") return Mode::P;
  if (s == "H") return Mode::H;
  fail("SyntaxError", "mode must be P or H, got '" + s + "'");
}

FormulaPtr make_bounded_exists(const std::string& index, const TermPtr& list,
                               const FormulaPtr& body) {
  return mk_exists(
      index, nat_type(),
      mk_and(mk_le0(mk_succ(mk_var(index)), mk_len(list)), body));
}

std::optional<BoundedExists> match_bounded_exists(const FormulaPtr& f) {
  if (f->kind != K::Exists || !f->btype || !is_nat(f->btype))
    return std::nullopt;
  const FormulaPtr& body = f->f0;
  if (body->kind != K::And) return std::nullopt;
  const FormulaPtr& guard = body->f0;
  if (guard->kind != K::Le0) return std::nullopt;
  const TermPtr& lhs = guard->args[0];
  const TermPtr& rhs = guard->args[1];
  if (lhs->kind != Term::Kind::Succ || lhs->t0->kind != Term::Kind::Var ||
      lhs->t0->name != f->binder)
    return std::nullopt;
  if (rhs->kind != Term::Kind::Len) return std::nullopt;
  return BoundedExists{f->binder, rhs->t0, body->f1};
}

FormulaPtr normal_form_to_formula(const NormalForm& nf) {
  FormulaPtr g = nf.matrix;
  for (auto it = nf.exist_block.rbegin(); it != nf.exist_block.rend(); ++it)
    g = mk_exists_st(it->first, it->second, g);
  for (auto it = nf.univ_block.rbegin(); it != nf.univ_block.rend(); ++it)
    g = mk_forall_st(it->first, it->second, g);
  return g;
}

NormalForm formula_to_normal_form(const FormulaPtr& f) {
  NormalForm nf;
  FormulaPtr g = f;
  while (g->kind == K::ForallSt) {
    nf.univ_block.emplace_back(g->binder, g->btype);
    g = g->f0;
  }
  while (g->kind == K::ExistsSt) {
    nf.exist_block.emplace_back(g->binder, g->btype);
    g = g->f0;
  }
  if (!classify_internal(g)) {
    Path cur, bad;
    find_st_node(g, cur, bad);
    fail("NotInFragment",
         "matrix is not internal; standardness remains at matrix position " +
             path_to_string(bad) + " in " + print_formula(g));
  }
  nf.matrix = g;
  return nf;
}

bool normal_form_equal(const NormalForm& a, const NormalForm& b) {
  if (a.univ_block.size() != b.univ_block.size() ||
      a.exist_block.size() != b.exist_block.size())
    return false;
  auto type_multiset = [](const std::vector<std::pair<std::string, TypePtr>>&
                              blk) {
    std::vector<std::string> v;
    for (const auto& [n, t] : blk) v.push_back(print_type(t));
    std::sort(v.begin(), v.end());
    return v;
  };
  if (type_multiset(a.univ_block) != type_multiset(b.univ_block) ||
      type_multiset(a.exist_block) != type_multiset(b.exist_block))
    return false;

  FormulaPtr fa = normal_form_to_formula(a);
  std::vector<int> pu(b.univ_block.size());
  std::iota(pu.begin(), pu.end(), 0);
  do {
    std::vector<int> pe(b.exist_block.size());
    std::iota(pe.begin(), pe.end(), 0);
    do {
      NormalForm c;
      for (int i : pu) c.univ_block.push_back(b.univ_block[i]);
      for (int i : pe) c.exist_block.push_back(b.exist_block[i]);
      c.matrix = b.matrix;
      if (alpha_eq(fa, normal_form_to_formula(c))) return true;
    } while (std::next_permutation(pe.begin(), pe.end()));
  } while (std::next_permutation(pu.begin(), pu.end()));
  return false;
}

std::string trace_to_string(const RewriteTrace& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.steps.size(); ++i) {
    const TraceStep& s = t.steps[i];
    os << "step " << (i + 1) << ": " << s.rule << " @ "
       << path_to_string(s.path) << "\n  " << print_formula(s.after) << "\n";
  }
  return os.str();
}

Rewriter::Rewriter(SymbolTable tab, Mode mode)
    : tab_(std::move(tab)), mode_(mode) {
  for (const auto& [name, ty] : tab_.consts) gen_.reserve(name);
}

void Rewriter::reseed(const FormulaPtr& f) { gen_.reserve_all(f); }

// ---------------------------------------------------------------------------
// Abbreviation unfolding.
// ---------------------------------------------------------------------------

FormulaPtr Rewriter::unfold_abbrevs(const FormulaPtr& f) {
  reseed(f);
  std::map<std::string, TypePtr> ctx;
  return unfold_rec(f, ctx);
}

FormulaPtr Rewriter::unfold_rec(const FormulaPtr& f,
                                std::map<std::string, TypePtr>& ctx) {
  switch (f->kind) {
    case K::Approx: {
      const AtomDecl* d = tab_.find_atom("lt-inv");
      if (!d)
        fail("MissingAtomDecl",
             "approx requires a declared atom lt-inv (sigma sigma Nat)");
      if (d->arg_sorts.size() != 3 || !is_nat(d->arg_sorts[2]))
        fail("MissingAtomDecl",
             "lt-inv must be declared with argument sorts (sigma sigma Nat)");
      TypePtr ta = infer_type(f->args[0], ctx, tab_);
      TypePtr tb = infer_type(f->args[1], ctx, tab_);
      if (!type_eq(ta, d->arg_sorts[0]) || !type_eq(tb, d->arg_sorts[1]))
        fail("TypeMismatch",
             "approx operands do not match the declared lt-inv sorts");
      std::string k = gen_.fresh("k");
      return mk_forall_st(
          k, nat_type(),
          mk_atom("lt-inv", {f->args[0], f->args[1], mk_var(k)}));
    }
    case K::ForallOmega: {
      ctx[f->binder] = nat_type();
      FormulaPtr body = unfold_rec(f->f0, ctx);
      ctx.erase(f->binder);
      std::string m = gen_.fresh("m");
      return mk_forall(
          f->binder, nat_type(),
          mk_imp(mk_forall_st(m, nat_type(),
                              mk_le0(mk_var(m), mk_var(f->binder))),
                 body));
    }
    case K::ForallInf: {
      const AtomDecl* d = tab_.find_atom("abs-lt-inv");
      if (!d)
        fail("MissingAtomDecl",
             "forall-inf requires a declared atom abs-lt-inv (sigma Nat)");
      if (d->arg_sorts.size() != 2 || !is_nat(d->arg_sorts[1]))
        fail("MissingAtomDecl",
             "abs-lt-inv must be declared with argument sorts (sigma Nat)");
      TypePtr sigma = d->arg_sorts[0];
      ctx[f->binder] = sigma;
      FormulaPtr body = unfold_rec(f->f0, ctx);
      ctx.erase(f->binder);
      std::string k = gen_.fresh("k");
      return mk_forall(
          f->binder, sigma,
          mk_imp(mk_forall_st(
                     k, nat_type(),
                     mk_atom("abs-lt-inv", {mk_var(f->binder), mk_var(k)})),
                 body));
    }
    case K::Not: {
      FormulaPtr in = unfold_rec(f->f0, ctx);
      if (in->kind == K::St) {
        TypePtr tt = infer_type(in->args[0], ctx, tab_);
        if (is_nat(tt)) {
          std::string m = gen_.fresh("m");
          return mk_forall_st(m, nat_type(),
                              mk_le0(mk_var(m), in->args[0]));
        }
      }
      return mk_not(in);
    }
    case K::Forall:
    case K::Exists:
    case K::ForallSt:
    case K::ExistsSt: {
      ctx[f->binder] = f->btype;
      FormulaPtr body = unfold_rec(f->f0, ctx);
      ctx.erase(f->binder);
      return mk_quant(f->kind, f->binder, f->btype, body);
    }
    case K::And:
    case K::Or:
    case K::Imp: {
      FormulaPtr a = unfold_rec(f->f0, ctx);
      FormulaPtr b = unfold_rec(f->f1, ctx);
      return with_children(f, {a, b});
    }
    default:
      return f;
  }
}

// ---------------------------------------------------------------------------
// Negation normal form (mode-aware).
// ---------------------------------------------------------------------------

FormulaPtr Rewriter::negation_normal(const FormulaPtr& f) {
  return nnf_rec(f);
}

FormulaPtr Rewriter::nnf_rec(const FormulaPtr& f) {
  bool cls = mode_ == Mode::P;
  if (f->kind != K::Not) {
    if (child_count(f) == 0) return f;
    std::vector<FormulaPtr> kids;
    for (int i = 0; i < child_count(f); ++i)
      kids.push_back(nnf_rec(child(f, i)));
    return with_children(f, std::move(kids));
  }
  const FormulaPtr& in = f->f0;
  switch (in->kind) {
    case K::And:
      if (cls) return mk_or(nnf_rec(mk_not(in->f0)), nnf_rec(mk_not(in->f1)));
      break;
    case K::Or:
      return mk_and(nnf_rec(mk_not(in->f0)), nnf_rec(mk_not(in->f1)));
    case K::Imp:
      if (cls) return mk_and(nnf_rec(in->f0), nnf_rec(mk_not(in->f1)));
      break;
    case K::Not:
      if (cls) return nnf_rec(in->f0);
      break;
    case K::Forall:
      if (cls)
        return mk_exists(in->binder, in->btype, nnf_rec(mk_not(in->f0)));
      break;
    case K::Exists:
      return mk_forall(in->binder, in->btype, nnf_rec(mk_not(in->f0)));
    case K::ForallSt:
      if (cls)
        return mk_exists_st(in->binder, in->btype, nnf_rec(mk_not(in->f0)));
      break;
    case K::ExistsSt:
      return mk_forall_st(in->binder, in->btype, nnf_rec(mk_not(in->f0)));
    default:
      return f;  // negated atom stays
  }
  // H mode keeps the negation but still normalizes inside it.
  return mk_not(nnf_rec(in));
}

// ---------------------------------------------------------------------------
// Prenexing of st-quantifiers.
// ---------------------------------------------------------------------------

FormulaPtr Rewriter::hoist(FormulaPtr core, bool pol) {
  std::vector<QuantSpec> prefix;
  for (;;) {
    K nk = core->kind;
    if (nk != K::And && nk != K::Or && nk != K::Imp && nk != K::Not &&
        nk != K::Forall && nk != K::Exists)
      break;
    std::vector<int> order =
        nk == K::Imp ? std::vector<int>{1, 0} : std::vector<int>{0, 1};
    int best_child = -1;
    K best_kind = K::ForallSt;
    int best_score = 99;
    int best_ord = 99;
    for (std::size_t oi = 0; oi < order.size(); ++oi) {
      int ci = order[oi];
      if (ci >= child_count(core)) continue;
      FormulaPtr ch = child(core, ci);
      if (!is_st_quant(ch->kind)) continue;
      auto produced = cross_kind(nk, ci, ch->kind, mode_);
      if (!produced) continue;
      int score = ((*produced == K::ForallSt) == pol) ? 0 : 1;
      if (score < best_score ||
          (score == best_score && static_cast<int>(oi) < best_ord)) {
        best_child = ci;
        best_kind = *produced;
        best_score = score;
        best_ord = static_cast<int>(oi);
      }
    }
    if (best_child < 0) break;
    FormulaPtr ch = child(core, best_child);
    prefix.push_back({best_kind, ch->binder, ch->btype});
    std::vector<FormulaPtr> kids;
    for (int i = 0; i < child_count(core); ++i)
      kids.push_back(i == best_child ? ch->f0 : child(core, i));
    core = with_children(core, std::move(kids));
  }
  FormulaPtr out = core;
  for (auto it = prefix.rbegin(); it != prefix.rend(); ++it)
    out = mk_quant(it->kind, it->binder, it->type, out);
  return out;
}

FormulaPtr Rewriter::prenex_rec(const FormulaPtr& f, bool pol) {
  switch (f->kind) {
    case K::And:
    case K::Or:
      return hoist(
          with_children(f, {prenex_rec(f->f0, pol), prenex_rec(f->f1, pol)}),
          pol);
    case K::Imp:
      return hoist(
          with_children(f, {prenex_rec(f->f0, !pol), prenex_rec(f->f1, pol)}),
          pol);
    case K::Not:
      return hoist(mk_not(prenex_rec(f->f0, !pol)), pol);
    case K::Forall:
    case K::Exists:
      return hoist(
          mk_quant(f->kind, f->binder, f->btype, prenex_rec(f->f0, pol)),
          pol);
    case K::ForallSt:
    case K::ExistsSt:
      return mk_quant(f->kind, f->binder, f->btype, prenex_rec(f->f0, pol));
    default:
      return f;
  }
}

FormulaPtr Rewriter::prenex_st(const FormulaPtr& f, bool strict) {
  FormulaPtr out = prenex_rec(f, true);
  if (strict) {
    Path cur;
    strict_scan(out, true, false, cur);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Idealization.
// ---------------------------------------------------------------------------

FormulaPtr Rewriter::idealize_node(const FormulaPtr& f) {
  std::vector<std::pair<std::string, TypePtr>> ys, xs;
  FormulaPtr g = f;
  while (g->kind == K::Forall) {
    ys.emplace_back(g->binder, g->btype);
    g = g->f0;
  }
  if (ys.empty() || g->kind != K::ExistsSt)
    fail("PatternMismatch",
         "idealization expects internal universals directly over exists-st "
         "quantifiers, got " + print_formula(f));
  while (g->kind == K::ExistsSt) {
    xs.emplace_back(g->binder, g->btype);
    g = g->f0;
  }
  if (!classify_internal(g))
    fail("NonInternalMatrix",
         "idealization matrix must be internal: " + print_formula(g));

  FormulaPtr psi = g;
  std::vector<std::string> lists, idxs;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    lists.push_back(gen_.fresh(xs[j].first + "s"));
    idxs.push_back(gen_.fresh("i" + std::to_string(j)));
    psi = subst_formula(psi, xs[j].first,
                        mk_idx(mk_var(lists[j]), mk_var(idxs[j])));
  }
  for (std::size_t j = xs.size(); j-- > 0;)
    psi = make_bounded_exists(idxs[j], mk_var(lists[j]), psi);
  for (auto it = ys.rbegin(); it != ys.rend(); ++it)
    psi = mk_forall(it->first, it->second, psi);
  for (std::size_t j = xs.size(); j-- > 0;)
    psi = mk_exists_st(lists[j], seq_type(xs[j].second), psi);
  return psi;
}

FormulaPtr Rewriter::apply_idealization(const FormulaPtr& f, const Path& p) {
  reseed(f);
  return replace_at(f, p, idealize_node(subformula_at(f, p)));
}

// ---------------------------------------------------------------------------
// Herbrandized choice and the H-mode schemas.
// ---------------------------------------------------------------------------

FormulaPtr Rewriter::apply_hac_at(const FormulaPtr& f, const Path& p) {
  reseed(f);
  FormulaPtr sub = subformula_at(f, p);
  if (sub->kind != K::ForallSt || sub->f0->kind != K::ExistsSt)
    fail("PatternMismatch",
         "choice expects (forall-st x)(exists-st y) psi, got " +
             print_formula(sub));
  const FormulaPtr& ex = sub->f0;
  const FormulaPtr& psi = ex->f0;
  if (mode_ == Mode::P && !classify_internal(psi))
    fail("WrongMode",
         "in mode P the choice matrix must be internal: " +
             print_formula(psi));
  std::string gname = gen_.fresh("G");
  std::string iname = gen_.fresh("i");
  TermPtr gx = mk_app(mk_var(gname), mk_var(sub->binder));
  FormulaPtr body = make_bounded_exists(
      iname, gx,
      subst_formula(psi, ex->binder, mk_idx(gx, mk_var(iname))));
  FormulaPtr res = mk_exists_st(
      gname, arrow_type(sub->btype, seq_type(ex->btype)),
      mk_forall_st(sub->binder, sub->btype, body));
  return replace_at(f, p, res);
}

FormulaPtr Rewriter::apply_hac(const FormulaPtr& f) {
  return apply_hac_at(f, {});
}

FormulaPtr Rewriter::apply_ncr(const FormulaPtr& f, const Path& p) {
  reseed(f);
  FormulaPtr sub = subformula_at(f, p);
  if (sub->kind != K::Forall || sub->f0->kind != K::ExistsSt)
    fail("PatternMismatch",
         "ncr expects (forall y)(exists-st x) Phi, got " + print_formula(sub));
  const FormulaPtr& ex = sub->f0;
  if (mode_ == Mode::P && !classify_internal(ex->f0))
    fail("WrongMode",
         "in mode P only an internal matrix may be idealized; use mode H for "
         "ncr on " + print_formula(ex->f0));
  std::string ls = gen_.fresh(ex->binder + "s");
  std::string iname = gen_.fresh("i");
  FormulaPtr body = subst_formula(ex->f0, ex->binder,
                                  mk_idx(mk_var(ls), mk_var(iname)));
  FormulaPtr res = mk_exists_st(
      ls, seq_type(ex->btype),
      mk_forall(sub->binder, sub->btype,
                make_bounded_exists(iname, mk_var(ls), body)));
  return replace_at(f, p, res);
}

FormulaPtr Rewriter::apply_hgmp(const FormulaPtr& f, const Path& p) {
  if (mode_ != Mode::H)
    fail("WrongMode", "hgmp is an H-mode rewrite step");
  reseed(f);
  FormulaPtr sub = subformula_at(f, p);
  if (sub->kind != K::Imp || sub->f0->kind != K::ForallSt)
    fail("PatternMismatch",
         "hgmp expects ((forall-st x) phi -> psi), got " + print_formula(sub));
  const FormulaPtr& fa = sub->f0;
  if (!classify_internal(fa->f0) || !classify_internal(sub->f1))
    fail("PatternMismatch",
         "hgmp requires internal phi and psi in ((forall-st x) phi -> psi)");
  std::string ls = gen_.fresh(fa->binder + "s");
  std::string iname = gen_.fresh("i");
  FormulaPtr inst = subst_formula(fa->f0, fa->binder,
                                  mk_idx(mk_var(ls), mk_var(iname)));
  FormulaPtr bounded_all = mk_forall(
      iname, nat_type(),
      mk_imp(mk_le0(mk_succ(mk_var(iname)), mk_len(mk_var(ls))), inst));
  FormulaPtr res = mk_exists_st(ls, seq_type(fa->btype),
                                mk_imp(bounded_all, sub->f1));
  return replace_at(f, p, res);
}

FormulaPtr Rewriter::apply_hip(const FormulaPtr& f, const Path& p) {
  if (mode_ != Mode::H)
    fail("WrongMode", "hip is an H-mode rewrite step");
  reseed(f);
  FormulaPtr sub = subformula_at(f, p);
  if (sub->kind != K::Imp || sub->f0->kind != K::ForallSt ||
      sub->f1->kind != K::ExistsSt)
    fail("PatternMismatch",
         "hip expects ((forall-st x) phi -> (exists-st y) Psi), got " +
             print_formula(sub));
  if (!classify_internal(sub->f0->f0))
    fail("PatternMismatch", "hip requires internal phi in the antecedent");
  const FormulaPtr& ex = sub->f1;
  std::string ls = gen_.fresh(ex->binder + "s");
  std::string iname = gen_.fresh("i");
  FormulaPtr body = subst_formula(ex->f0, ex->binder,
                                  mk_idx(mk_var(ls), mk_var(iname)));
  FormulaPtr res = mk_exists_st(
      ls, seq_type(ex->btype),
      mk_imp(sub->f0, make_bounded_exists(iname, mk_var(ls), body)));
  return replace_at(f, p, res);
}

// ---------------------------------------------------------------------------
// Overspill.
// ---------------------------------------------------------------------------

FormulaPtr Rewriter::apply_overspill_at(const FormulaPtr& f, const Path& p) {
  FormulaPtr sub = subformula_at(f, p);
  if (sub->kind != K::ForallSt)
    fail("PatternMismatch",
         "overspill expects (forall-st x) psi, got " + print_formula(sub));
  if (!classify_internal(sub->f0))
    fail("NonInternalMatrix",
         "overspill requires an internal matrix: " + print_formula(sub->f0));
  FormulaPtr res = mk_exists(
      sub->binder, sub->btype,
      mk_and(mk_not(mk_st(mk_var(sub->binder))), sub->f0));
  return replace_at(f, p, res);
}

FormulaPtr Rewriter::apply_overspill(const FormulaPtr& f) {
  return apply_overspill_at(f, {});
}

// ---------------------------------------------------------------------------
// Collapsing a monotone list existential to its maximum.
// ---------------------------------------------------------------------------

namespace {

// Checks that every occurrence of occ (= idx(z, i)) inside the body sits in
// an atom argument position whose effective direction is monotone.
void check_mono(const FormulaPtr& f, bool pol, const TermPtr& occ,
                const std::string& z, const std::string& i,
                const SymbolTable& tab) {
  if (has_formula_args(f->kind)) {
    for (std::size_t p = 0; p < f->args.size(); ++p) {
      const TermPtr& arg = f->args[p];
      auto fv = free_term_vars(arg);
      if (!contains_term(arg, occ) && !fv.count(z) && !fv.count(i)) continue;
      TermPtr core = arg;
      while (core->kind == Term::Kind::Succ) core = core->t0;
      if (!term_eq(core, occ))
        fail("NotMonotone",
             "list element occurs in a position whose direction cannot be "
             "analyzed: " + print_term(arg));
      int dir = arg_direction(f, p, tab);
      bool ok = (dir == +1 && pol) || (dir == -1 && !pol);
      if (!ok)
        fail("NotMonotone",
             "occurrence of " + print_term(occ) + " in " + print_formula(f) +
                 " argument " + std::to_string(p) +
                 " is not effectively monotone");
    }
    return;
  }
  for (int c = 0; c < child_count(f); ++c) {
    bool flip = f->kind == K::Not || (f->kind == K::Imp && c == 0);
    check_mono(child(f, c), flip ? !pol : pol, occ, z, i, tab);
  }
}

}  // namespace

FormulaPtr Rewriter::collapse_node(const FormulaPtr& f,
                                   const FormulaPtr& whole) {
  // f = (exists-st z : Seq Nat) body
  const std::string& z = f->binder;
  const FormulaPtr& body = f->f0;

  std::vector<std::pair<Path, bool>> uses;
  Path cur;
  find_bounded_uses(body, z, true, cur, uses);
  if (uses.empty())
    fail("PatternMismatch",
         "no bounded existential over list " + z + " found");
  if (uses.size() > 1)
    fail("PatternMismatch",
         "list " + z + " has more than one bounded existential use");
  if (!uses[0].second)
    fail("NotMonotone",
         "bounded existential over " + z +
             " occurs at a negative position; collapsing is unsound there");

  const Path& pp = uses[0].first;
  auto be = match_bounded_exists(subformula_at(body, pp));
  TermPtr occ = mk_idx(mk_var(z), mk_var(be->index));
  check_mono(be->body, true, occ, z, be->index, tab_);

  std::string n0 = gen_.fresh("N0");
  FormulaPtr collapsed = replace_in_formula(be->body, occ, mk_var(n0));
  FormulaPtr new_body = replace_at(body, pp, collapsed);
  auto fv = free_vars(new_body);
  if (fv.count(z) || fv.count(be->index))
    fail("PatternMismatch",
         "list " + z + " (or its index) is used outside the bounded "
         "existential pattern");
  (void)whole;
  return mk_exists_st(n0, nat_type(), new_body);
}

FormulaPtr Rewriter::max_collapse_at(const FormulaPtr& f, const Path& p) {
  FormulaPtr sub = subformula_at(f, p);
  if (sub->kind != K::ExistsSt || !sub->btype ||
      !type_eq(sub->btype, seq_type(nat_type())))
    fail("PatternMismatch",
         "max-collapse expects an exists-st binder of type (Seq Nat) at " +
             path_to_string(p));
  reseed(f);
  return replace_at(f, p, collapse_node(sub, f));
}

FormulaPtr Rewriter::max_collapse(const FormulaPtr& f,
                                  const std::string& binder) {
  struct Finder {
    const std::string& b;
    std::optional<Path> found;
    void walk(const FormulaPtr& g, Path& cur) {
      if (g->kind == K::ExistsSt && g->binder == b && !found) found = cur;
      for (int i = 0; i < child_count(g); ++i) {
        cur.push_back(i);
        walk(child(g, i), cur);
        cur.pop_back();
      }
    }
  } finder{binder, std::nullopt};
  Path cur;
  finder.walk(f, cur);
  if (!finder.found)
    fail("PatternMismatch", "no exists-st binder named " + binder);
  return max_collapse_at(f, *finder.found);
}

// ---------------------------------------------------------------------------
// The full pipeline.
// ---------------------------------------------------------------------------

std::pair<NormalForm, RewriteTrace> Rewriter::normalize_to_normal_form(
    const FormulaPtr& f) {
  reseed(f);
  RewriteTrace tr;
  FormulaPtr cur = f;
  auto record = [&](const char* rule, const Path& p, const FormulaPtr& next) {
    if (!alpha_eq(cur, next)) tr.steps.push_back({rule, p, cur, next});
    cur = next;
  };

  record("unfold", {}, unfold_abbrevs(cur));
  record("nnf", {}, negation_normal(cur));

  for (int iter = 0; iter < 64; ++iter) {
    record("prenex", {}, prenex_st(cur));

    bool collapsed = true;
    while (collapsed) {
      collapsed = false;
      std::vector<Path> cands;
      Path c;
      scan_seq_nat_exists_st(cur, c, cands);
      for (const Path& p : cands) {
        try {
          FormulaPtr next = max_collapse_at(cur, p);
          record("max-collapse", p, next);
          collapsed = true;
          break;
        } catch (const Error& e) {
          std::string code = e.code();
          if (code != "NotMonotone" && code != "PatternMismatch") throw;
        }
      }
    }

    if (mode_ == Mode::H) break;
    std::vector<Path> ideal;
    Path c;
    scan_idealize(cur, true, false, c, ideal);
    if (ideal.empty()) break;
    auto deepest = std::max_element(
        ideal.begin(), ideal.end(), [](const Path& a, const Path& b) {
          return a.size() < b.size();
        });
    record("idealize", *deepest, apply_idealization(cur, *deepest));
  }

  record("prenex", {}, prenex_st(cur));
  return {formula_to_normal_form(cur), tr};
}

// ---------------------------------------------------------------------------
// Normal forms of compound statements.
// ---------------------------------------------------------------------------

NormalForm Rewriter::nf_implication(const NormalForm& a, const NormalForm& b) {
  if (!classify_internal(a.matrix) || !classify_internal(b.matrix))
    fail("NotInFragment", "nf_implication requires internal matrices");

  FormulaPtr fa = normal_form_to_formula(a);
  FormulaPtr fb = normal_form_to_formula(b);
  std::set<std::string> a_names;
  collect_names(fa, a_names);
  gen_.reserve_all(fa);
  gen_.reserve_all(fb);

  // Rename the premise-side binders of b that clash with a's names.
  NormalForm b2 = b;
  auto rename_block = [&](std::vector<std::pair<std::string, TypePtr>>& blk) {
    for (auto& [name, ty] : blk) {
      if (!a_names.count(name)) continue;
      std::string nn = gen_.fresh(name);
      b2.matrix = subst_formula(b2.matrix, name, mk_var(nn));
      name = nn;
    }
  };
  rename_block(b2.univ_block);
  rename_block(b2.exist_block);

  NormalForm out;
  FormulaPtr amat = a.matrix;
  std::vector<std::pair<std::string, TypePtr>> zetas;
  for (const auto& [yname, ytype] : a.exist_block) {
    TypePtr zt = ytype;
    for (auto it = a.univ_block.rbegin(); it != a.univ_block.rend(); ++it)
      zt = arrow_type(it->second, zt);
    std::string zn = gen_.fresh("zeta");
    zetas.emplace_back(zn, zt);
    std::vector<TermPtr> uvars;
    for (const auto& [un, ut] : a.univ_block) uvars.push_back(mk_var(un));
    amat = subst_formula(amat, yname, mk_apps(mk_var(zn), uvars));
  }

  out.univ_block = zetas;
  out.univ_block.insert(out.univ_block.end(), b2.univ_block.begin(),
                        b2.univ_block.end());
  out.exist_block = b2.exist_block;
  out.exist_block.insert(out.exist_block.end(), a.univ_block.begin(),
                         a.univ_block.end());
  out.matrix = mk_imp(amat, b2.matrix);
  return out;
}

NormalForm Rewriter::nf_forall_infinitesimal(const FormulaPtr& f) {
  if (f->kind != K::ForallInf)
    fail("PatternMismatch",
         "expected a forall-inf statement, got " + print_formula(f));
  FormulaPtr g = f->f0;
  while (g->kind == K::ForallSt) g = g->f0;
  if (g->kind != K::ExistsSt)
    fail("PatternMismatch",
         "expected (forall-inf e)(forall-st ...)(exists-st ...) with at "
         "least one exists-st");
  while (g->kind == K::ExistsSt) g = g->f0;
  if (!classify_internal(g))
    fail("PatternMismatch",
         "forall-inf body matrix must be internal: " + print_formula(g));
  return normalize_to_normal_form(f).first;
}

// ---------------------------------------------------------------------------
// Named-rule dispatch.
// ---------------------------------------------------------------------------

FormulaPtr Rewriter::apply_rule(const std::string& rule, const FormulaPtr& f,
                                const Path& p) {
  auto subtree_op = [&](auto op) {
    FormulaPtr sub = subformula_at(f, p);
    return replace_at(f, p, op(sub));
  };
  if (rule == "unfold") {
    reseed(f);
    return subtree_op([&](const FormulaPtr& g) {
      std::map<std::string, TypePtr> ctx;
      ctx_along(f, p, ctx);
      return unfold_rec(g, ctx);
    });
  }
  if (rule == "nnf")
    return subtree_op([&](const FormulaPtr& g) { return negation_normal(g); });
  if (rule == "prenex")
    return subtree_op(
        [&](const FormulaPtr& g) { return prenex_st(g, /*strict=*/true); });
  if (rule == "idealize") return apply_idealization(f, p);
  if (rule == "max-collapse") return max_collapse_at(f, p);
  if (rule == "hac") return apply_hac_at(f, p);
  if (rule == "ncr") return apply_ncr(f, p);
  if (rule == "hgmp") return apply_hgmp(f, p);
  if (rule == "hip") return apply_hip(f, p);
  if (rule == "overspill") return apply_overspill_at(f, p);
  fail("StepInapplicable", "unknown rewrite rule '" + rule + "'");
}

}  // namespace nsa
