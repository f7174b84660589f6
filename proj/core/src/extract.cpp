#include "nsa/extract.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "nsa/build.hpp"
#include "nsa/errors.hpp"
#include "nsa/eval.hpp"
#include "nsa/parser.hpp"
#include "nsa/printer.hpp"

namespace nsa {

namespace {

[[noreturn]] void bad(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

// Replaces occurrences of a pattern term (up to alpha) by another term.
// Alpha-awareness matters after a print/parse round trip, which renames
// repeated bound names apart. Binders shadowing a free variable of the
// pattern stop the descent.
TermPtr replace_term_in_term(const TermPtr& t, const TermPtr& from, const TermPtr& to,
                             const std::set<std::string>& from_free) {
  if (!t) return t;
  if (alpha_eq(t, from)) return to;
  if (t->kind == Term::Kind::Lam && from_free.count(t->name)) return t;
  auto rec = [&](const TermPtr& c) { return replace_term_in_term(c, from, to, from_free); };
  Term copy = *t;
  copy.t0 = rec(t->t0);
  copy.t1 = rec(t->t1);
  copy.t2 = rec(t->t2);
  return std::make_shared<const Term>(std::move(copy));
}

FormulaPtr replace_term_in_formula(const FormulaPtr& f, const TermPtr& from,
                                   const TermPtr& to,
                                   const std::set<std::string>& from_free) {
  if (!f) return f;
  if (is_quantifier(f->kind) && from_free.count(f->binder)) return f;
  Formula copy = *f;
  for (auto& a : copy.args) a = replace_term_in_term(a, from, to, from_free);
  copy.f0 = replace_term_in_formula(f->f0, from, to, from_free);
  copy.f1 = replace_term_in_formula(f->f1, from, to, from_free);
  return std::make_shared<const Formula>(std::move(copy));
}

bool is_quantifier_free(const FormulaPtr& f) {
  if (!f) return true;
  if (is_quantifier(f->kind)) return false;
  for (int i = 0; i < child_count(f); ++i)
    if (!is_quantifier_free(child(f, i))) return false;
  return true;
}

// Witness terms may use declared constants and the oracle variables; any
// other free variable makes them unusable.
void check_witness_closed(const TermPtr& t, const SymbolTable& tab,
                          const std::map<std::string, TypePtr>& octx,
                          const std::string& what) {
  for (const auto& v : free_term_vars(t)) {
    if (tab.find_const(v) || octx.count(v)) continue;
    bad("OpenWitness", what + " has free variable '" + v + "'");
  }
}

struct PoolEntry {
  TermPtr term;
  std::string hint;  // preferred binder name when reintroducing blocks
};

struct RunState {
  const ProofScript* script = nullptr;
  FormulaPtr current;
  std::map<std::string, TermPtr> witnesses;
  std::vector<PoolEntry> pool;
  bool app_closure = false;
  std::map<std::string, TypePtr> octx;
  std::vector<std::pair<std::string, FormulaPtr>> oracle_params;
  RewriteTrace trace;
};

void record(RunState& st, const std::string& rule, const Path& p,
            const FormulaPtr& before) {
  st.trace.steps.push_back({rule, p, before, st.current});
}

bool pool_has(const RunState& st, const TermPtr& t) {
  for (const auto& e : st.pool)
    if (alpha_eq(e.term, t)) return true;
  return false;
}

// (rewrite nf-intro (<n>)): relativize the first n universals to forall-st
// and convert each leading bounded list search over a registered standard
// term into an exists-st binder. The inverse of strip_standard.
void step_nf_intro(RunState& st, const Path& p, const SymbolTable& tab) {
  std::size_t nuniv = p.empty() ? 0 : static_cast<std::size_t>(p[0]);
  FormulaPtr f = st.current;
  std::vector<std::pair<std::string, TypePtr>> uvars;
  while (uvars.size() < nuniv) {
    if (f->kind != Formula::Kind::Forall)
      bad("StepInapplicable",
          "nf-intro expected " + std::to_string(nuniv) + " leading universals");
    uvars.emplace_back(f->binder, f->btype);
    f = f->f0;
  }
  if (!uvars.empty() && !st.app_closure)
    bad("StepInapplicable",
        "nf-intro over arguments needs application closure ((axiom tstar-app)) first");

  std::map<std::string, TypePtr> ctx = st.octx;
  std::vector<TermPtr> uvarterms;
  for (const auto& [n, t] : uvars) {
    ctx[n] = t;
    uvarterms.push_back(mk_var(n));
  }

  FreshGen gen;
  gen.reserve_all(st.current);

  std::vector<std::tuple<std::string, TypePtr, TermPtr>> intros;
  while (auto be = match_bounded_exists(f)) {
    const PoolEntry* found = nullptr;
    for (const auto& e : st.pool)
      if (alpha_eq(be->list, mk_apps(e.term, uvarterms))) {
        found = &e;
        break;
      }
    if (!found)
      bad("StepInapplicable",
          "bounded search over a term that is not registered standard: " +
              print_term(be->list));
    TypePtr lty = infer_type(be->list, ctx, tab);
    if (lty->kind != FinType::Kind::Seq)
      bad("TypeMismatch", "bounded search over a non-sequence term");
    std::string yname = gen.fresh(found->hint.empty() ? "y" : found->hint);
    TermPtr pattern = mk_idx(be->list, mk_var(be->index));
    std::set<std::string> pat_free = free_term_vars(pattern);
    FormulaPtr body =
        replace_term_in_formula(be->body, pattern, mk_var(yname), pat_free);
    if (free_vars(body).count(be->index))
      bad("StepInapplicable",
          "index variable '" + be->index + "' survives outside the list search");
    intros.emplace_back(yname, lty->a, found->term);
    f = body;
  }

  FormulaPtr out = f;
  for (auto it = intros.rbegin(); it != intros.rend(); ++it)
    out = mk_exists_st(std::get<0>(*it), std::get<1>(*it), out);
  for (auto it = uvars.rbegin(); it != uvars.rend(); ++it)
    out = mk_forall_st(it->first, it->second, out);

  FormulaPtr before = st.current;
  st.current = out;
  for (const auto& [yname, ty, term] : intros) {
    (void)ty;
    st.witnesses[yname] = term;
  }
  record(st, "nf-intro", p, before);
}

void step_axiom(RunState& st, const ScriptStep& step, Rewriter& rw,
                const SymbolTable& tab) {
  const std::string& ax = step.head;
  auto want_terms = [&](std::size_t n) {
    if (step.terms.size() != n)
      bad("IllTypedInstantiation", "axiom " + ax + " expects " + std::to_string(n) +
                                       " instantiation terms");
  };
  auto typed = [&](const TermPtr& t, const std::string& what) {
    check_witness_closed(t, tab, st.octx, what);
    try {
      return infer_type(t, st.octx, tab);
    } catch (const Error& e) {
      bad("IllTypedInstantiation", what + ": " + e.what());
    }
  };

  if (ax == "tstar-closed") {
    want_terms(1);
    typed(step.terms[0], "axiom tstar-closed term");
    st.pool.push_back({step.terms[0], step.name_hint});
    record(st, "axiom tstar-closed", {}, st.current);
    return;
  }
  if (ax == "tstar-app") {
    if (step.terms.empty()) {
      st.app_closure = true;
      record(st, "axiom tstar-app", {}, st.current);
      return;
    }
    want_terms(2);
    if (!pool_has(st, step.terms[0]) || !pool_has(st, step.terms[1]))
      bad("StepInapplicable",
          "axiom tstar-app arguments must already be registered standard");
    TermPtr applied = mk_app(step.terms[0], step.terms[1]);
    typed(applied, "axiom tstar-app application");
    st.pool.push_back({applied, step.name_hint});
    record(st, "axiom tstar-app", {}, st.current);
    return;
  }
  if (ax == "tstar-eq") {
    record(st, "axiom tstar-eq", {}, st.current);
    return;
  }
  if (ax == "ia-st") {
    want_terms(2);
    TypePtr rho = typed(step.terms[0], "axiom ia-st base");
    TypePtr sty = typed(step.terms[1], "axiom ia-st step");
    TypePtr want = arrow_type(nat_type(), arrow_type(rho, rho));
    if (!type_eq(sty, want))
      bad("IllTypedInstantiation", "axiom ia-st step has type " + print_type(sty) +
                                       ", expected " + print_type(want));
    FreshGen gen;
    gen.reserve_all(step.terms[0]);
    gen.reserve_all(step.terms[1]);
    std::string n = gen.fresh("n");
    TermPtr iter = mk_lam(
        n, nat_type(), mk_rec(rho, step.terms[0], step.terms[1], mk_var(n)));
    st.pool.push_back({iter, step.name_hint});
    record(st, "axiom ia-st", {}, st.current);
    return;
  }
  if (ax == "qf-ac") {
    // (forall x)(exists y) psi_qf  ==>  (exists f)(forall x) psi[y := f x].
    FormulaPtr f = st.current;
    if (f->kind != Formula::Kind::Forall || f->f0->kind != Formula::Kind::Exists)
      bad("PatternMismatch", "axiom qf-ac needs a (forall x)(exists y) head");
    FormulaPtr inner = f->f0->f0;
    if (!classify_internal(inner))
      bad("NonInternalMatrix", "axiom qf-ac matrix must be internal");
    if (!is_quantifier_free(inner))
      bad("PatternMismatch", "axiom qf-ac matrix must be quantifier-free");
    FreshGen gen;
    gen.reserve_all(st.current);
    std::string fn = gen.fresh("f");
    TermPtr fx = mk_app(mk_var(fn), mk_var(f->binder));
    FormulaPtr body = subst_formula(inner, f->f0->binder, fx);
    FormulaPtr before = st.current;
    st.current = mk_exists(fn, arrow_type(f->btype, f->f0->btype),
                           mk_forall(f->binder, f->btype, body));
    record(st, "axiom qf-ac", {}, before);
    return;
  }
  // Schema names that alias rewrite rules at the top position.
  static const std::map<std::string, std::string> alias = {
      {"i", "idealize"}, {"hac", "hac"},   {"ncr", "ncr"},
      {"hip", "hip"},    {"hgmp", "hgmp"}, {"overspill", "overspill"}};
  auto it = alias.find(ax);
  if (it != alias.end()) {
    FormulaPtr before = st.current;
    st.current = rw.apply_rule(it->second, st.current, {});
    record(st, "axiom " + ax, {}, before);
    return;
  }
  bad("StepInapplicable", "unknown axiom '" + ax + "'");
}

void step_mp(RunState& st, const ScriptStep& step, Rewriter& rw,
             const SymbolTable& tab) {
  const Premise* prem = nullptr;
  for (const auto& p : st.script->premises)
    if (p.name == step.head) prem = &p;
  if (!prem) bad("StepInapplicable", "unknown premise '" + step.head + "'");

  NormalForm a_nf = formula_to_normal_form(prem->a);
  NormalForm b_nf = formula_to_normal_form(prem->b);
  NormalForm cur_nf = formula_to_normal_form(st.current);

  if (!alpha_eq(normal_form_to_formula(cur_nf), normal_form_to_formula(a_nf)))
    bad("StepInapplicable", "current formula does not match the antecedent of '" +
                                step.head + "'");

  // The lemma's combined form quantifies over one functional per antecedent
  // existential; feed it the max of the current witness list.
  std::vector<TermPtr> zeta_hats;
  for (std::size_t j = 0; j < a_nf.exist_block.size(); ++j) {
    const auto& [yname, ytype] = a_nf.exist_block[j];
    if (!is_nat(ytype))
      bad("StepInapplicable", "modus ponens needs Nat-typed antecedent existentials; '" +
                                  yname + "' is " + print_type(ytype));
    const std::string& cur_name = cur_nf.exist_block[j].first;
    auto w = st.witnesses.find(cur_name);
    if (w == st.witnesses.end())
      bad("MissingWitness",
          "no witness for antecedent existential '" + cur_name + "'");
    std::vector<TermPtr> uvarterms;
    for (const auto& [un, ut] : a_nf.univ_block) {
      (void)ut;
      uvarterms.push_back(mk_var(un));
    }
    TermPtr body = mk_max(mk_apps(w->second, uvarterms));
    for (auto it = a_nf.univ_block.rbegin(); it != a_nf.univ_block.rend(); ++it)
      body = mk_lam(it->first, it->second, body);
    zeta_hats.push_back(body);
  }

  NormalForm impl_nf = rw.nf_implication(a_nf, b_nf);
  (void)impl_nf;  // validates the premise shapes; binder roles are positional

  std::map<std::string, TermPtr> new_witnesses;
  for (const auto& [wname, wtype] : b_nf.exist_block) {
    (void)wtype;
    auto w = prem->witnesses.find(wname);
    if (w == prem->witnesses.end())
      bad("MissingWitness", "premise '" + step.head +
                                "' lacks a witness for consequent existential '" + wname +
                                "'");
    check_witness_closed(w->second, tab, st.octx,
                         "premise witness for '" + wname + "'");
    std::vector<TermPtr> args = zeta_hats;
    for (const auto& [zn, zt] : b_nf.univ_block) {
      (void)zt;
      args.push_back(mk_var(zn));
    }
    TermPtr composed = mk_apps(w->second, args);
    for (auto it = b_nf.univ_block.rbegin(); it != b_nf.univ_block.rend(); ++it)
      composed = mk_lam(it->first, it->second, composed);
    new_witnesses[wname] = composed;
  }

  FormulaPtr before = st.current;
  st.current = normal_form_to_formula(b_nf);
  st.witnesses = std::move(new_witnesses);
  record(st, "mp " + step.head, {}, before);
}

void step_oracle(RunState& st, const ScriptStep& step) {
  const auto& declared = st.script->oracles;
  if (std::find(declared.begin(), declared.end(), step.head) == declared.end())
    bad("OracleNotDeclared", "oracle '" + step.head + "' is not declared by the script");
  if (step.head == "MU2") {
    TypePtr mu_ty = arrow_type(arrow_type(nat_type(), nat_type()), nat_type());
    st.octx["mu"] = mu_ty;
    st.pool.push_back({mk_var("mu"), "mu"});
    st.oracle_params.emplace_back("MU2", mu_spec_formula());
  } else if (step.head == "MUO") {
    TypePtr f2 = arrow_type(arrow_type(nat_type(), nat_type()), nat_type());
    st.octx["muo"] = arrow_type(f2, arrow_type(nat_type(), nat_type()));
    st.pool.push_back({mk_var("muo"), "muo"});
    st.oracle_params.emplace_back("MUO", nullptr);
  } else {
    bad("OracleNotDeclared", "unsupported oracle '" + step.head + "'");
  }
  record(st, "oracle " + step.head, {}, st.current);
}

}  // namespace

ExtractionResult run_script(const ProofScript& s) {
  RunState st;
  st.script = &s;
  st.current = s.source;
  Rewriter rw(s.tab, s.mode);

  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    const ScriptStep& step = s.steps[i];
    try {
      switch (step.kind) {
        case ScriptStep::Kind::Rewrite: {
          if (step.head == "nf-intro") {
            step_nf_intro(st, step.path, s.tab);
            break;
          }
          FormulaPtr before = st.current;
          st.current = rw.apply_rule(step.head, st.current, step.path);
          record(st, step.head, step.path, before);
          break;
        }
        case ScriptStep::Kind::Axiom:
          step_axiom(st, step, rw, s.tab);
          break;
        case ScriptStep::Kind::Mp:
          step_mp(st, step, rw, s.tab);
          break;
        case ScriptStep::Kind::Oracle:
          step_oracle(st, step);
          break;
        case ScriptStep::Kind::Supply: {
          check_witness_closed(step.terms.at(0), s.tab, st.octx,
                               "supplied witness for '" + step.head + "'");
          infer_type(step.terms[0], st.octx, s.tab);
          st.witnesses[step.head] = step.terms[0];
          record(st, "supply " + step.head, {}, st.current);
          break;
        }
      }
    } catch (const Error& e) {
      std::string detail = e.what();
      std::string prefix = e.code() + ": ";
      if (detail.rfind(prefix, 0) == 0) detail = detail.substr(prefix.size());
      throw Error(e.code(), "step " + std::to_string(i + 1) + " of script '" + s.name +
                                "': " + detail);
    }
  }

  NormalForm nf = formula_to_normal_form(st.current);
  NormalForm want = formula_to_normal_form(s.conclusion);
  if (!normal_form_equal(nf, want))
    bad("StepInapplicable",
        "script '" + s.name + "' ends at " + print_formula(normal_form_to_formula(nf)) +
            " but declares conclusion " +
            print_formula(normal_form_to_formula(want)));

  ExtractionResult r;
  r.name = s.name;
  r.mode = s.mode;
  r.tab = s.tab;
  r.source = s.source;
  r.conclusion_nf = nf;
  r.witnesses = st.witnesses;
  r.oracle_parameters = st.oracle_params;
  r.trace = st.trace;

  FormulaPtr stripped = strip_standard(nf, st.witnesses, s.tab, st.octx);
  bool has_mu2 = st.octx.count("mu") > 0;
  if (has_mu2) {
    stripped = mk_forall("mu", st.octx.at("mu"), mk_imp(mu_spec_formula(), stripped));
  }
  r.internal_sentence = stripped;
  return r;
}

ProofScript reverse_direction(const ExtractionResult& r) {
  if (!r.oracle_parameters.empty())
    bad("OracleBlocked",
        "cannot reverse an oracle-parameterized extraction; instantiate first");
  for (const auto& [n, t] : r.witnesses)
    check_witness_closed(t, r.tab, {}, "witness for '" + n + "'");

  ProofScript s;
  s.name = r.name + "-reverse";
  s.mode = r.mode;
  s.tab = r.tab;
  s.source = r.internal_sentence;
  s.conclusion = normal_form_to_formula(r.conclusion_nf);

  // Keep the existential block's order so reintroduction matches leading
  // bounded searches outside-in.
  for (const auto& [bn, bt] : r.conclusion_nf.exist_block) {
    (void)bt;
    auto it = r.witnesses.find(bn);
    if (it == r.witnesses.end())
      bad("MissingWitness", "no witness for existential binder '" + bn + "'");
    ScriptStep closed;
    closed.kind = ScriptStep::Kind::Axiom;
    closed.head = "tstar-closed";
    closed.terms = {it->second};
    closed.name_hint = bn;
    s.steps.push_back(std::move(closed));
  }
  ScriptStep app;
  app.kind = ScriptStep::Kind::Axiom;
  app.head = "tstar-app";
  s.steps.push_back(std::move(app));

  ScriptStep intro;
  intro.kind = ScriptStep::Kind::Rewrite;
  intro.head = "nf-intro";
  intro.path = {static_cast<int>(r.conclusion_nf.univ_block.size())};
  s.steps.push_back(std::move(intro));
  return s;
}

ExtractionResult instantiate_oracle(const ExtractionResult& r, const TermPtr& impl) {
  if (r.oracle_parameters.empty()) return r;
  for (const auto& [name, spec] : r.oracle_parameters) {
    (void)spec;
    if (name == "MUO")
      bad("OracleBlocked", "MUO extractions are symbolic only and cannot be run");
  }
  TypePtr want = arrow_type(arrow_type(nat_type(), nat_type()), nat_type());
  TypePtr have = infer_type(impl, {}, r.tab);
  if (!type_eq(have, want))
    bad("TypeMismatch", "mu implementation has type " + print_type(have) +
                            ", expected " + print_type(want));

  ExtractionResult out = r;
  for (auto& [n, t] : out.witnesses) {
    (void)n;
    t = subst_term(t, "mu", impl);
  }
  out.internal_sentence = strip_standard(out.conclusion_nf, out.witnesses, out.tab);
  out.oracle_approximated = true;
  return out;
}

FormulaPtr collapsed_sentence(const NormalForm& nf,
                              const std::map<std::string, TermPtr>& witnesses,
                              const SymbolTable& tab,
                              const std::map<std::string, TypePtr>& extra_ctx) {
  if (!classify_internal(nf.matrix))
    bad("NotInFragment", "normal-form matrix is not internal");
  std::vector<TermPtr> uvars;
  for (const auto& [n, t] : nf.univ_block) {
    (void)t;
    uvars.push_back(mk_var(n));
  }
  FormulaPtr out = nf.matrix;
  for (auto it = nf.exist_block.rbegin(); it != nf.exist_block.rend(); ++it) {
    const auto& [yname, ytype] = *it;
    if (!is_nat(ytype))
      bad("PatternMismatch",
          "collapsed form needs Nat-typed existentials; '" + yname + "' is " +
              print_type(ytype));
    auto w = witnesses.find(yname);
    if (w == witnesses.end())
      bad("MissingWitness", "no witness term for existential binder '" + yname + "'");
    check_witness_closed(w->second, tab, extra_ctx, "witness for '" + yname + "'");
    TypePtr have = infer_type(w->second, extra_ctx, tab);
    TypePtr want = seq_type(ytype);
    for (auto u = nf.univ_block.rbegin(); u != nf.univ_block.rend(); ++u)
      want = arrow_type(u->second, want);
    if (!type_eq(have, want))
      bad("TypeMismatch", "witness for '" + yname + "' has type " + print_type(have) +
                              ", expected " + print_type(want));
    out = subst_formula(out, yname, mk_max(mk_apps(w->second, uvars)));
  }
  for (auto it = nf.univ_block.rbegin(); it != nf.univ_block.rend(); ++it)
    out = mk_forall(it->first, it->second, out);
  return out;
}

TermPtr bounded_mu_term(int bound) {
  using namespace build;
  // least i <= bound with f(i) = 0: scan upward, storing (least index)+1.
  TermPtr body = mk_rec(
      nat_type(), mk_zero(),
      lam("i", nat_type(),
          lam("s", nat_type(),
              ifz(v("s"), ifz(app(v("f"), v("i")), mk_succ(v("i")), mk_zero()),
                  v("s")))),
      mk_num(static_cast<std::uint64_t>(bound) + 1));
  return lam("f", arrow_type(nat_type(), nat_type()), pred(body));
}

FormulaPtr mu_spec_formula() {
  TermPtr f = mk_var("f");
  FormulaPtr antecedent =
      mk_exists("n", nat_type(), mk_eq0(mk_app(f, mk_var("n")), mk_zero()));
  FormulaPtr consequent = mk_eq0(mk_app(f, mk_app(mk_var("mu"), f)), mk_zero());
  return mk_forall("f", arrow_type(nat_type(), nat_type()),
                   mk_imp(antecedent, consequent));
}

std::vector<std::string> mu_grid_violations(const TermPtr& impl, int grid_max) {
  std::vector<std::string> out;
  std::uint64_t steps = kDefaultStepBudget;
  ValuePtr muv = eval(impl, nullptr, steps);
  for (int p = 0; p <= grid_max; ++p) {
    auto zero_at = static_cast<std::uint64_t>(p);
    ValuePtr f = native_value([zero_at](const ValuePtr& a) {
      return num_value(a->num == zero_at ? 0 : 1);
    });
    ValuePtr r = apply_value(muv, f, steps);
    if (!r || r->kind != Value::Kind::Num || r->num != zero_at)
      out.push_back("indicator with zero at " + std::to_string(p) +
                    ": mu returned " + (r ? print_term(value_to_term(r)) : "nothing"));
  }
  // The all-ones function has no zero, so the specification is vacuous there.
  return out;
}

std::map<std::string, TypePtr> oracle_context(const std::vector<std::string>& oracles) {
  std::map<std::string, TypePtr> out;
  for (const auto& o : oracles) {
    if (o == "MU2")
      out["mu"] = arrow_type(arrow_type(nat_type(), nat_type()), nat_type());
    else if (o == "MUO") {
      TypePtr f2 = arrow_type(arrow_type(nat_type(), nat_type()), nat_type());
      out["muo"] = arrow_type(f2, arrow_type(nat_type(), nat_type()));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Script files
// ---------------------------------------------------------------------------

namespace {

Path parse_path_list(const Sexp& s) {
  if (!s.is_list()) bad("SyntaxError", "expected a path list at " + s.where());
  Path p;
  for (const auto& item : s.items) {
    if (!item.is_atom())
      bad("SyntaxError", "path entries must be numbers at " + item.where());
    try {
      p.push_back(std::stoi(item.atom));
    } catch (const std::exception&) {
      bad("SyntaxError", "path entries must be numbers at " + item.where());
    }
  }
  return p;
}

ScriptStep parse_step(const Sexp& s, const SymbolTable& tab) {
  if (!s.is_list() || s.items.empty() || !s.items[0].is_atom())
    bad("SyntaxError", "expected a step form at " + s.where());
  const std::string& head = s.items[0].atom;
  ScriptStep step;
  if (head == "rewrite") {
    if (s.items.size() != 3 || !s.items[1].is_atom())
      bad("SyntaxError", "(rewrite <rule> (<int>*)) at " + s.where());
    step.kind = ScriptStep::Kind::Rewrite;
    step.head = s.items[1].atom;
    step.path = parse_path_list(s.items[2]);
    return step;
  }
  if (head == "axiom") {
    if (s.items.size() < 2 || !s.items[1].is_atom())
      bad("SyntaxError", "(axiom <name> <term>* [(as <id>)]) at " + s.where());
    step.kind = ScriptStep::Kind::Axiom;
    step.head = s.items[1].atom;
    for (std::size_t i = 2; i < s.items.size(); ++i) {
      const Sexp& item = s.items[i];
      if (item.headed("as")) {
        if (item.items.size() != 2 || !item.items[1].is_atom())
          bad("SyntaxError", "(as <id>) at " + item.where());
        step.name_hint = item.items[1].atom;
      } else {
        step.terms.push_back(parse_term(item, tab));
      }
    }
    return step;
  }
  if (head == "mp") {
    if (s.items.size() != 2 || !s.items[1].is_atom())
      bad("SyntaxError", "(mp <premise-name>) at " + s.where());
    step.kind = ScriptStep::Kind::Mp;
    step.head = s.items[1].atom;
    return step;
  }
  if (head == "oracle") {
    if (s.items.size() != 2 || !s.items[1].is_atom())
      bad("SyntaxError", "(oracle <name>) at " + s.where());
    step.kind = ScriptStep::Kind::Oracle;
    step.head = s.items[1].atom;
    return step;
  }
  if (head == "supply") {
    if (s.items.size() != 3 || !s.items[1].is_atom())
      bad("SyntaxError", "(supply <binder> <term>) at " + s.where());
    step.kind = ScriptStep::Kind::Supply;
    step.head = s.items[1].atom;
    step.terms.push_back(parse_term(s.items[2], tab));
    return step;
  }
  bad("SyntaxError", "unknown step '" + head + "' at " + s.where());
}

}  // namespace

ProofScript parse_script(const std::string& text) {
  std::vector<Sexp> forms = parse_sexps(text);
  ProofScript s;
  std::size_t i = 0;
  while (i < forms.size() && parse_preamble_form(forms[i], s.tab)) ++i;
  if (i >= forms.size() || !forms[i].headed("script"))
    bad("SyntaxError", "expected a (script ...) form after the preamble");
  if (i + 1 != forms.size())
    bad("SyntaxError", "unexpected forms after the (script ...) form");
  const Sexp& sc = forms[i];
  if (sc.items.size() < 2 || !sc.items[1].is_atom())
    bad("SyntaxError", "(script <name> ...) at " + sc.where());
  s.name = sc.items[1].atom;

  bool saw_source = false, saw_conclusion = false;
  for (std::size_t j = 2; j < sc.items.size(); ++j) {
    const Sexp& sec = sc.items[j];
    if (!sec.is_list() || sec.items.empty() || !sec.items[0].is_atom())
      bad("SyntaxError", "expected a script section at " + sec.where());
    const std::string& head = sec.items[0].atom;
    if (head == "mode") {
      if (sec.items.size() != 2 || !sec.items[1].is_atom())
        bad("SyntaxError", "(mode P|H) at " + sec.where());
      s.mode = parse_mode(sec.items[1].atom);
    } else if (head == "oracles") {
      for (std::size_t k = 1; k < sec.items.size(); ++k) {
        if (!sec.items[k].is_atom())
          bad("SyntaxError", "oracle names must be symbols at " + sec.where());
        s.oracles.push_back(sec.items[k].atom);
      }
    } else if (head == "source") {
      if (sec.items.size() != 2) bad("SyntaxError", "(source <formula>) at " + sec.where());
      s.source = parse_formula(sec.items[1], s.tab);
      saw_source = true;
    } else if (head == "conclusion") {
      if (sec.items.size() != 2)
        bad("SyntaxError", "(conclusion <formula>) at " + sec.where());
      s.conclusion = parse_formula(sec.items[1], s.tab);
      saw_conclusion = true;
    } else if (head == "premise") {
      if (sec.items.size() < 3 || !sec.items[1].is_atom() ||
          !sec.items[2].headed("implication") || sec.items[2].items.size() != 3)
        bad("SyntaxError",
            "(premise <name> (implication <formula> <formula>) ...) at " + sec.where());
      Premise p;
      p.name = sec.items[1].atom;
      p.a = parse_formula(sec.items[2].items[1], s.tab);
      p.b = parse_formula(sec.items[2].items[2], s.tab);
      for (std::size_t k = 3; k < sec.items.size(); ++k) {
        const Sexp& w = sec.items[k];
        if (!w.headed("witness") || w.items.size() != 3 || !w.items[1].is_atom())
          bad("SyntaxError", "(witness <binder> <term>) at " + w.where());
        p.witnesses[w.items[1].atom] = parse_term(w.items[2], s.tab);
      }
      s.premises.push_back(std::move(p));
    } else if (head == "steps") {
      for (std::size_t k = 1; k < sec.items.size(); ++k)
        s.steps.push_back(parse_step(sec.items[k], s.tab));
    } else {
      bad("SyntaxError", "unknown script section '" + head + "' at " + sec.where());
    }
  }
  if (!saw_source) bad("SyntaxError", "script '" + s.name + "' has no (source ...)");
  if (!saw_conclusion)
    bad("SyntaxError", "script '" + s.name + "' has no (conclusion ...)");
  return s;
}

ProofScript parse_script_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) bad("FixtureMissing", "cannot open script file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_script(buf.str());
}

std::string script_to_string(const ProofScript& s) {
  std::ostringstream os;
  os << print_preamble(s.tab);
  os << "(script " << s.name << "\n";
  os << "  (mode " << (s.mode == Mode::P ? "P" : "H") << ")\n";
  if (!s.oracles.empty()) {
    os << "  (oracles";
    for (const auto& o : s.oracles) os << " " << o;
    os << ")\n";
  }
  os << "  (source " << print_formula(s.source) << ")\n";
  for (const auto& p : s.premises) {
    os << "  (premise " << p.name << " (implication " << print_formula(p.a) << " "
       << print_formula(p.b) << ")";
    for (const auto& [b, t] : p.witnesses)
      os << "\n    (witness " << b << " " << print_term(t) << ")";
    os << ")\n";
  }
  os << "  (steps";
  for (const auto& st : s.steps) {
    os << "\n    ";
    switch (st.kind) {
      case ScriptStep::Kind::Rewrite: {
        os << "(rewrite " << st.head << " (";
        for (std::size_t i = 0; i < st.path.size(); ++i)
          os << (i ? " " : "") << st.path[i];
        os << "))";
        break;
      }
      case ScriptStep::Kind::Axiom: {
        os << "(axiom " << st.head;
        for (const auto& t : st.terms) os << " " << print_term(t);
        if (!st.name_hint.empty()) os << " (as " << st.name_hint << ")";
        os << ")";
        break;
      }
      case ScriptStep::Kind::Mp:
        os << "(mp " << st.head << ")";
        break;
      case ScriptStep::Kind::Oracle:
        os << "(oracle " << st.head << ")";
        break;
      case ScriptStep::Kind::Supply:
        os << "(supply " << st.head << " " << print_term(st.terms.at(0)) << ")";
        break;
    }
  }
  os << ")\n";
  os << "  (conclusion " << print_formula(s.conclusion) << "))\n";
  return os.str();
}

}  // namespace nsa
