#include "nsa/verify.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "nsa/errors.hpp"
#include "nsa/printer.hpp"

namespace nsa {

namespace {

[[noreturn]] void bad(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

long long ipow(long long b, int e) {
  long long r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

long long as_elem(const ValuePtr& v, const char* what) {
  if (!v || v->kind != Value::Kind::Num)
    bad("TypeMismatch", std::string(what) + " did not evaluate to a base element");
  return static_cast<long long>(v->num);
}

std::string value_brief(const ValuePtr& v) {
  if (!v) return "?";
  switch (v->kind) {
    case Value::Kind::Num:
      return std::to_string(v->num);
    case Value::Kind::Seq: {
      std::string s = "<";
      for (std::size_t i = 0; i < v->elems.size(); ++i) {
        if (i) s += ",";
        s += value_brief(v->elems[i]);
      }
      return s + ">";
    }
    default:
      return "<fun>";
  }
}

// Standardness of an element value under the cutoff: numbers are standard up
// to K; a sequence is standard when its entries are standard and its length
// is at most K+1 (so the list of all standard elements counts as standard).
bool value_standard(const ValuePtr& v, const Interp& in) {
  if (!v) bad("TypeMismatch", "missing value");
  switch (v->kind) {
    case Value::Kind::Num:
      return static_cast<long long>(v->num) <= in.K;
    case Value::Kind::Seq: {
      if (static_cast<long long>(v->elems.size()) > in.K + 1) return false;
      for (const auto& e : v->elems)
        if (!value_standard(e, in)) return false;
      return true;
    }
    default:
      bad("NotInFragment", "standardness of a function value cannot be decided");
  }
}

// All element values of a type; standard part only when std_only. Sequence
// and function domains are kept exact with respect to the harness semantics:
// internal sequence/function quantifiers are refused rather than truncated.
std::vector<ValuePtr> enumerate_values(const TypePtr& t, bool std_only, const Interp& in) {
  if (!t) bad("TypeMismatch", "quantifier without a binder type");
  if (is_base(t)) {
    int n = std_only ? in.standard_size(t) : in.carrier_size(t);
    std::vector<ValuePtr> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(num_value(static_cast<std::uint64_t>(i)));
    return out;
  }
  if (t->kind == FinType::Kind::Seq && is_base(t->a)) {
    if (!std_only)
      bad("SizeBudgetExceeded",
          "internal quantifier over " + print_type(t) + " has no finite carrier");
    int n = in.standard_size(t->a);
    int max_len = in.K + 1;
    std::vector<ValuePtr> out;
    // Canonical full standard list first: existential searches usually
    // succeed immediately with it.
    std::vector<ValuePtr> full;
    for (int i = 0; i < n; ++i) full.push_back(num_value(static_cast<std::uint64_t>(i)));
    out.push_back(seq_value(full, t->a));
    for (int len = 0; len <= max_len; ++len) {
      std::vector<int> odo(static_cast<std::size_t>(len), 0);
      while (true) {
        std::vector<ValuePtr> elems;
        elems.reserve(odo.size());
        for (int d : odo) elems.push_back(num_value(static_cast<std::uint64_t>(d)));
        auto v = seq_value(elems, t->a);
        if (!value_eq(v, out[0])) out.push_back(std::move(v));
        int pos = len - 1;
        while (pos >= 0 && odo[static_cast<std::size_t>(pos)] == n - 1) {
          odo[static_cast<std::size_t>(pos)] = 0;
          --pos;
        }
        if (pos < 0) break;
        ++odo[static_cast<std::size_t>(pos)];
      }
    }
    return out;
  }
  if (t->kind == FinType::Kind::Arrow && std_only && is_base(t->a) &&
      t->b->kind == FinType::Kind::Seq && is_base(t->b->a)) {
    // Canonical standard choice candidate: every argument maps to the full
    // list of standard codomain elements.
    int n = in.standard_size(t->b->a);
    std::vector<ValuePtr> full;
    for (int i = 0; i < n; ++i) full.push_back(num_value(static_cast<std::uint64_t>(i)));
    ValuePtr list = seq_value(full, t->b->a);
    return {native_value([list](const ValuePtr&) { return list; })};
  }
  bad("SizeBudgetExceeded",
      "quantifier over " + print_type(t) + " is outside the finite fragment");
}

void ensure_decidable_atoms(const FormulaPtr& f, const Interp& in, const SymbolTable& tab) {
  if (!f) return;
  if (f->kind == Formula::Kind::Atom) {
    const AtomDecl* d = tab.find_atom(f->atom);
    if (!d) bad("UnknownAtom", "atom '" + f->atom + "' is not declared");
    if (!d->decidable)
      bad("UndecidableAtom", "atom '" + f->atom + "' is not declared decidable");
    if (in.atoms.find(f->atom) == in.atoms.end())
      bad("UndecidableAtom",
          "atom '" + f->atom + "' has no table or rule in the interpretation");
  }
  for (int i = 0; i < child_count(f); ++i) ensure_decidable_atoms(child(f, i), in, tab);
}

}  // namespace

bool eval_formula_cutoff(const FormulaPtr& f, const EnvPtr& env, const Interp& in,
                         const SymbolTable& tab, std::uint64_t& steps) {
  if (steps == 0) bad("StepBudgetExceeded", "formula evaluation exceeded the step budget");
  --steps;
  switch (f->kind) {
    case Formula::Kind::Eq0: {
      long long a = as_elem(eval(f->args[0], env, steps), "eq0 argument");
      long long b = as_elem(eval(f->args[1], env, steps), "eq0 argument");
      return a == b;
    }
    case Formula::Kind::Le0: {
      long long a = as_elem(eval(f->args[0], env, steps), "le0 argument");
      long long b = as_elem(eval(f->args[1], env, steps), "le0 argument");
      return a <= b;
    }
    case Formula::Kind::Atom: {
      std::vector<long long> vals;
      vals.reserve(f->args.size());
      for (const auto& a : f->args)
        vals.push_back(as_elem(eval(a, env, steps), "atom argument"));
      return atom_truth(in, tab, f->atom, vals);
    }
    case Formula::Kind::St:
      return value_standard(eval(f->args[0], env, steps), in);
    case Formula::Kind::And:
      return eval_formula_cutoff(f->f0, env, in, tab, steps) &&
             eval_formula_cutoff(f->f1, env, in, tab, steps);
    case Formula::Kind::Or:
      return eval_formula_cutoff(f->f0, env, in, tab, steps) ||
             eval_formula_cutoff(f->f1, env, in, tab, steps);
    case Formula::Kind::Imp:
      return !eval_formula_cutoff(f->f0, env, in, tab, steps) ||
             eval_formula_cutoff(f->f1, env, in, tab, steps);
    case Formula::Kind::Not:
      return !eval_formula_cutoff(f->f0, env, in, tab, steps);
    case Formula::Kind::Forall:
    case Formula::Kind::Exists:
    case Formula::Kind::ForallSt:
    case Formula::Kind::ExistsSt: {
      bool std_only =
          f->kind == Formula::Kind::ForallSt || f->kind == Formula::Kind::ExistsSt;
      bool is_forall =
          f->kind == Formula::Kind::Forall || f->kind == Formula::Kind::ForallSt;
      for (const auto& v : enumerate_values(f->btype, std_only, in)) {
        bool r = eval_formula_cutoff(f->f0, env_bind(env, f->binder, v), in, tab, steps);
        if (is_forall && !r) return false;
        if (!is_forall && r) return true;
      }
      return is_forall;
    }
    case Formula::Kind::Approx:
    case Formula::Kind::ForallOmega:
    case Formula::Kind::ForallInf:
      bad("NotInFragment", "abbreviations must be unfolded before evaluation");
  }
  bad("NotInFragment", "unreachable formula kind");
}

FormulaPtr strip_standard(const NormalForm& nf,
                          const std::map<std::string, TermPtr>& witnesses,
                          const SymbolTable& tab,
                          const std::map<std::string, TypePtr>& extra_ctx) {
  if (!classify_internal(nf.matrix))
    bad("NotInFragment", "normal-form matrix is not internal");

  FreshGen gen;
  gen.reserve_all(nf.matrix);
  for (const auto& [n, t] : nf.univ_block) {
    (void)t;
    gen.reserve(n);
  }
  for (const auto& [n, t] : nf.exist_block) {
    (void)t;
    gen.reserve(n);
  }
  for (const auto& [n, w] : witnesses) {
    (void)n;
    gen.reserve_all(w);
  }

  // Expected witness type: universal block curried into Seq of the binder
  // type.
  auto expected_type = [&](const TypePtr& bt) {
    TypePtr t = seq_type(bt);
    for (auto it = nf.univ_block.rbegin(); it != nf.univ_block.rend(); ++it)
      t = arrow_type(it->second, t);
    return t;
  };

  std::vector<TermPtr> uvars;
  uvars.reserve(nf.univ_block.size());
  for (const auto& [n, t] : nf.univ_block) {
    (void)t;
    uvars.push_back(mk_var(n));
  }

  std::map<std::string, TypePtr> ctx = extra_ctx;

  FormulaPtr out = nf.matrix;
  for (auto it = nf.exist_block.rbegin(); it != nf.exist_block.rend(); ++it) {
    const auto& [yname, ytype] = *it;
    auto w = witnesses.find(yname);
    if (w == witnesses.end())
      bad("MissingWitness", "no witness term for existential binder '" + yname + "'");
    const TermPtr& term = w->second;
    for (const auto& v : free_term_vars(term)) {
      if (tab.find_const(v) || extra_ctx.count(v)) continue;
      bad("OpenWitness",
          "witness for '" + yname + "' has free variable '" + v + "'");
    }
    TypePtr have = infer_type(term, ctx, tab);
    TypePtr want = expected_type(ytype);
    if (!type_eq(have, want))
      bad("TypeMismatch", "witness for '" + yname + "' has type " + print_type(have) +
                              ", expected " + print_type(want));
    TermPtr applied = mk_apps(term, uvars);
    std::string iv = gen.fresh("i");
    out = make_bounded_exists(iv, applied,
                              subst_formula(out, yname, mk_idx(applied, mk_var(iv))));
  }
  for (auto it = nf.univ_block.rbegin(); it != nf.univ_block.rend(); ++it)
    out = mk_forall(it->first, it->second, out);
  return out;
}

VerificationReport check_witness(const FormulaPtr& internal_sentence, const Interp& in,
                                 const SymbolTable& tab, EnvPtr oracle_env) {
  if (!classify_internal(internal_sentence))
    bad("NotInFragment", "check_witness needs an internal sentence");
  ensure_decidable_atoms(internal_sentence, in, tab);

  VerificationReport rep;
  EnvPtr base = interp_const_env(in, tab, std::move(oracle_env));

  std::vector<std::pair<std::string, TypePtr>> univ;
  FormulaPtr core = internal_sentence;
  while (core->kind == Formula::Kind::Forall) {
    univ.emplace_back(core->binder, core->btype);
    core = core->f0;
  }

  std::vector<std::vector<ValuePtr>> domains;
  rep.closed_form = 1;
  for (const auto& [n, t] : univ) {
    (void)n;
    domains.push_back(enumerate_values(t, false, in));
    rep.closed_form *= static_cast<long long>(domains.back().size());
  }

  std::string why_fail = core->kind == Formula::Kind::Exists
                             ? "no listed candidate satisfies the matrix"
                             : "matrix is false";

  std::vector<std::size_t> odo(univ.size(), 0);
  while (true) {
    EnvPtr env = base;
    std::string assignment;
    for (std::size_t i = 0; i < univ.size(); ++i) {
      env = env_bind(env, univ[i].first, domains[i][odo[i]]);
      if (!assignment.empty()) assignment += " ";
      assignment += univ[i].first + "=" + value_brief(domains[i][odo[i]]);
    }
    std::uint64_t steps = kDefaultStepBudget;
    bool ok = eval_formula_cutoff(core, env, in, tab, steps);
    rep.steps_used += kDefaultStepBudget - steps;
    ++rep.checked;
    if (!ok) rep.failures.push_back({assignment, why_fail});

    std::size_t pos = univ.size();
    while (pos > 0 && odo[pos - 1] + 1 == domains[pos - 1].size()) {
      odo[pos - 1] = 0;
      --pos;
    }
    if (pos == 0) break;
    ++odo[pos - 1];
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Schema sweeps
// ---------------------------------------------------------------------------

namespace {

struct SchemaDef {
  SymbolTable tab;
  FormulaPtr premise;
  FormulaPtr conclusion;
  bool two_way = false;
  bool qf_ac = false;  // conclusion checked by explicit choice construction
  int p_arity = 1;
  int q_arity = -1;  // -1: no second predicate
  std::vector<std::string> free_params;
};

AtomDecl nat_atom(const std::string& name, int arity) {
  AtomDecl d;
  d.name = name;
  d.decidable = true;
  for (int i = 0; i < arity; ++i) d.arg_sorts.push_back(nat_type());
  return d;
}

SchemaDef build_schema(const std::string& name, int arity) {
  if (arity != 1 && arity != 2)
    bad("SizeBudgetExceeded", "schema templates support arity 1 or 2");
  SchemaDef def;
  auto nat = nat_type();
  auto seq_nat = seq_type(nat);
  auto var = [](const std::string& v) { return mk_var(v); };

  auto add_atom = [&](const std::string& a, int n) { def.tab.atoms[a] = nat_atom(a, n); };

  if (name == "idealisation" || name == "ncr") {
    // (forall y)(exists-st x) p[x;y]  ->  (exists-st xs)(forall y)(exists i
    // in xs) p[xs_i;y]; idealisation also checks the converse.
    def.p_arity = arity;
    add_atom("p", arity);
    auto P = [&](TermPtr x) {
      std::vector<TermPtr> as{std::move(x)};
      if (arity == 2) as.push_back(var("y"));
      return mk_atom("p", std::move(as));
    };
    def.premise = mk_forall("y", nat, mk_exists_st("x", nat, P(var("x"))));
    def.conclusion = mk_exists_st(
        "xs", seq_nat,
        mk_forall("y", nat,
                  make_bounded_exists("i", var("xs"), P(mk_idx(var("xs"), var("i"))))));
    def.two_way = (name == "idealisation");
  } else if (name == "hac") {
    // (forall-st x)(exists-st y) p  ->  (exists-st G)(forall-st x)(exists i
    // in G x) p[y := (G x)_i].
    def.p_arity = arity;
    add_atom("p", arity);
    auto P = [&](TermPtr y) {
      std::vector<TermPtr> as;
      if (arity == 2) as.push_back(var("x"));
      as.push_back(std::move(y));
      return mk_atom("p", std::move(as));
    };
    def.premise = mk_forall_st("x", nat, mk_exists_st("y", nat, P(var("y"))));
    auto gx = mk_app(var("G"), var("x"));
    def.conclusion =
        mk_exists_st("G", arrow_type(nat, seq_nat),
                     mk_forall_st("x", nat,
                                  make_bounded_exists("i", gx, P(mk_idx(gx, var("i"))))));
  } else if (name == "os" || name == "overspill") {
    // (forall-st x) p  ->  (exists x)(not st(x) and p).
    def.p_arity = arity;
    add_atom("p", arity);
    auto P = [&](TermPtr x) {
      std::vector<TermPtr> as{std::move(x)};
      if (arity == 2) as.push_back(var("a"));
      return mk_atom("p", std::move(as));
    };
    if (arity == 2) def.free_params.push_back("a");
    def.premise = mk_forall_st("x", nat, P(var("x")));
    def.conclusion =
        mk_exists("x", nat, mk_and(mk_not(mk_st(var("x"))), P(var("x"))));
  } else if (name == "transfer") {
    def.p_arity = arity;
    add_atom("p", arity);
    auto P = [&](TermPtr x) {
      std::vector<TermPtr> as{std::move(x)};
      if (arity == 2) as.push_back(var("a"));
      return mk_atom("p", std::move(as));
    };
    if (arity == 2) def.free_params.push_back("a");
    def.premise = mk_forall_st("x", nat, P(var("x")));
    def.conclusion = mk_forall("x", nat, P(var("x")));
  } else if (name == "hgmp") {
    // ((forall-st x) p -> q)  ->  (exists-st xs)((forall i in xs) p[xs_i] ->
    // q).
    def.p_arity = arity;
    def.q_arity = arity - 1;
    add_atom("p", arity);
    add_atom("q", arity - 1);
    auto P = [&](TermPtr x) {
      std::vector<TermPtr> as{std::move(x)};
      if (arity == 2) as.push_back(var("a"));
      return mk_atom("p", std::move(as));
    };
    std::vector<TermPtr> qargs;
    if (arity == 2) qargs.push_back(var("a"));
    auto Q = mk_atom("q", qargs);
    if (arity == 2) def.free_params.push_back("a");
    def.premise = mk_imp(mk_forall_st("x", nat, P(var("x"))), Q);
    auto bounded_all =
        mk_forall("i", nat,
                  mk_imp(mk_le0(mk_succ(var("i")), mk_len(var("xs"))),
                         P(mk_idx(var("xs"), var("i")))));
    def.conclusion = mk_exists_st("xs", seq_nat, mk_imp(bounded_all, Q));
  } else if (name == "hip") {
    // ((forall-st x) p -> (exists-st y) q)  ->  (exists-st ys)((forall-st x)
    // p -> (exists i in ys) q[ys_i]).
    def.p_arity = arity;
    def.q_arity = arity;
    add_atom("p", arity);
    add_atom("q", arity);
    auto P = [&](TermPtr x) {
      std::vector<TermPtr> as{std::move(x)};
      if (arity == 2) as.push_back(var("a"));
      return mk_atom("p", std::move(as));
    };
    auto Q = [&](TermPtr y) {
      std::vector<TermPtr> as{std::move(y)};
      if (arity == 2) as.push_back(var("a"));
      return mk_atom("q", std::move(as));
    };
    if (arity == 2) def.free_params.push_back("a");
    auto prem_ant = mk_forall_st("x", nat, P(var("x")));
    def.premise = mk_imp(prem_ant, mk_exists_st("y", nat, Q(var("y"))));
    def.conclusion = mk_exists_st(
        "ys", seq_nat,
        mk_imp(prem_ant,
               make_bounded_exists("i", var("ys"), Q(mk_idx(var("ys"), var("i"))))));
  } else if (name == "qf-ac") {
    // (forall x)(exists y) p  ->  (exists f)(forall x) p[y := f x]; the
    // conclusion is checked by building the least-witness function.
    def.p_arity = 2;
    add_atom("p", 2);
    def.qf_ac = true;
    def.premise = mk_forall(
        "x", nat, mk_exists("y", nat, mk_atom("p", {var("x"), var("y")})));
    def.conclusion = nullptr;
  } else {
    bad("PatternMismatch", "unknown schema '" + name + "'");
  }
  return def;
}

// Least-witness check of the quantifier-free choice conclusion: build f with
// f(x) = least y such that p(x,y) and then verify p(x, f x) for every x.
bool qf_ac_conclusion(const Interp& in, const SymbolTable& tab) {
  std::vector<long long> f(static_cast<std::size_t>(in.M + 1), -1);
  for (long long x = 0; x <= in.M; ++x) {
    for (long long y = 0; y <= in.M; ++y) {
      if (atom_truth(in, tab, "p", {x, y})) {
        f[static_cast<std::size_t>(x)] = y;
        break;
      }
    }
    if (f[static_cast<std::size_t>(x)] < 0) return false;
  }
  for (long long x = 0; x <= in.M; ++x)
    if (!atom_truth(in, tab, "p", {x, f[static_cast<std::size_t>(x)]})) return false;
  return true;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string bits_to_string(const std::vector<bool>& bits) {
  std::string s;
  s.reserve(bits.size());
  for (bool b : bits) s.push_back(b ? '1' : '0');
  return s;
}

// Threshold-style adversarial tables for sampled sweeps: products of
// per-argument cuts, equality/order tables, and the constants.
std::vector<std::vector<bool>> adversarial_tables(int arity, int M, int K) {
  std::vector<std::vector<bool>> out;
  long long cells = ipow(M + 1, arity);
  auto push = [&](auto&& pred) {
    std::vector<bool> t(static_cast<std::size_t>(cells));
    for (long long flat = 0; flat < cells; ++flat) {
      long long rest = flat;
      std::vector<long long> xs(static_cast<std::size_t>(arity));
      for (int i = arity - 1; i >= 0; --i) {
        xs[static_cast<std::size_t>(i)] = rest % (M + 1);
        rest /= (M + 1);
      }
      t[static_cast<std::size_t>(flat)] = pred(xs);
    }
    out.push_back(std::move(t));
  };
  push([](const std::vector<long long>&) { return false; });
  push([](const std::vector<long long>&) { return true; });
  if (arity == 1) {
    for (int c = 0; c <= M; ++c) {
      push([c](const std::vector<long long>& xs) { return xs[0] <= c; });
      push([c](const std::vector<long long>& xs) { return xs[0] > c; });
    }
  } else {
    for (int c = 0; c <= M; ++c)
      for (int d = 0; d <= M; ++d)
        push([c, d](const std::vector<long long>& xs) {
          return xs[0] <= c && xs[1] <= d;
        });
    push([](const std::vector<long long>& xs) { return xs[0] == xs[1]; });
    push([](const std::vector<long long>& xs) { return xs[0] <= xs[1]; });
    push([K](const std::vector<long long>& xs) {
      return xs[0] <= K || xs[1] > K;
    });
  }
  return out;
}

constexpr int kSampleCount = 4096;
constexpr int kMaxExhaustiveBits = 16;
constexpr std::size_t kMaxRecordedFailures = 40;

}  // namespace

std::vector<SchemaSize> default_schema_sizes(int max_k, int max_m) {
  std::vector<SchemaSize> out;
  for (int arity = 1; arity <= 2; ++arity)
    for (int k = 1; k <= max_k; ++k)
      for (int m = k + 1; m <= max_m; ++m) out.push_back({k, m, arity});
  return out;
}

const std::vector<std::string>& known_schemas() {
  static const std::vector<std::string> names = {
      "idealisation", "hac", "ncr", "hgmp", "hip", "os", "transfer", "qf-ac"};
  return names;
}

VerificationReport cutoff_check(const std::string& schema,
                                const std::vector<SchemaSize>& sizes) {
  VerificationReport rep;
  std::size_t suppressed = 0;

  for (const auto& cfg : sizes) {
    if (schema == "qf-ac" && cfg.arity != 2) continue;  // choice needs the dependency
    SchemaDef def = build_schema(schema, cfg.arity);
    Interp in;
    in.K = cfg.K;
    in.M = cfg.M;
    if (in.K >= in.M) bad("SizeBudgetExceeded", "schema sweep requires K < M");

    long long pcells = ipow(in.M + 1, def.p_arity);
    long long qcells = def.q_arity >= 0 ? ipow(in.M + 1, def.q_arity) : 0;
    long long bits = pcells + qcells;
    bool exhaustive_cfg = bits <= kMaxExhaustiveBits;

    long long assignments = ipow(in.M + 1, static_cast<int>(def.free_params.size()));

    // Table generator: exhaustive bit masks, or adversarial + sampled pairs.
    std::vector<std::pair<std::vector<bool>, std::vector<bool>>> tables;
    if (exhaustive_cfg) {
      long long total = 1ll << bits;
      tables.reserve(static_cast<std::size_t>(total));
      for (long long mask = 0; mask < total; ++mask) {
        std::vector<bool> p(static_cast<std::size_t>(pcells));
        std::vector<bool> q(static_cast<std::size_t>(qcells));
        for (long long i = 0; i < pcells; ++i) p[static_cast<std::size_t>(i)] = (mask >> i) & 1;
        for (long long i = 0; i < qcells; ++i)
          q[static_cast<std::size_t>(i)] = (mask >> (pcells + i)) & 1;
        tables.emplace_back(std::move(p), std::move(q));
      }
    } else {
      rep.exhaustive = false;
      auto adv_p = adversarial_tables(def.p_arity, in.M, in.K);
      std::vector<std::vector<bool>> adv_q;
      if (def.q_arity >= 0)
        adv_q = def.q_arity == 0 ? std::vector<std::vector<bool>>{{false}, {true}}
                                 : adversarial_tables(def.q_arity, in.M, in.K);
      else
        adv_q = {{}};
      for (const auto& p : adv_p)
        for (const auto& q : adv_q) tables.emplace_back(p, q);
      std::mt19937_64 rng(fnv1a(schema) ^ (static_cast<std::uint64_t>(cfg.K) * 1000003u +
                                           static_cast<std::uint64_t>(cfg.M) * 10007u +
                                           static_cast<std::uint64_t>(cfg.arity) * 101u));
      for (int s = 0; s < kSampleCount; ++s) {
        std::vector<bool> p(static_cast<std::size_t>(pcells));
        std::vector<bool> q(static_cast<std::size_t>(qcells));
        for (long long i = 0; i < pcells; ++i) p[static_cast<std::size_t>(i)] = rng() & 1;
        for (long long i = 0; i < qcells; ++i) q[static_cast<std::size_t>(i)] = rng() & 1;
        tables.emplace_back(std::move(p), std::move(q));
      }
    }

    rep.closed_form += static_cast<long long>(tables.size()) * assignments;

    for (const auto& [pt, qt] : tables) {
      in.atoms["p"] = AtomInterp{pt, std::nullopt};
      if (def.q_arity >= 0) in.atoms["q"] = AtomInterp{qt, std::nullopt};

      for (long long a = 0; a < assignments; ++a) {
        EnvPtr env = nullptr;
        long long rest = a;
        std::string param_desc;
        for (auto it = def.free_params.rbegin(); it != def.free_params.rend(); ++it) {
          long long v = rest % (in.M + 1);
          rest /= (in.M + 1);
          env = env_bind(env, *it, num_value(static_cast<std::uint64_t>(v)));
          param_desc = " " + *it + "=" + std::to_string(v) + param_desc;
        }
        ++rep.checked;

        std::uint64_t steps = kDefaultStepBudget;
        bool prem = eval_formula_cutoff(def.premise, env, in, def.tab, steps);
        auto record = [&](const std::string& detail) {
          if (rep.failures.size() < kMaxRecordedFailures) {
            std::string where = "K=" + std::to_string(cfg.K) + " M=" + std::to_string(cfg.M) +
                                " p=" + bits_to_string(pt);
            if (def.q_arity >= 0) where += " q=" + bits_to_string(qt);
            where += param_desc;
            rep.failures.push_back({where, detail});
          } else {
            ++suppressed;
          }
        };
        if (def.qf_ac) {
          if (prem && !qf_ac_conclusion(in, def.tab))
            record("premise holds but the choice conclusion fails");
          rep.steps_used += kDefaultStepBudget - steps;
          continue;
        }
        bool concl = (prem || def.two_way)
                         ? eval_formula_cutoff(def.conclusion, env, in, def.tab, steps)
                         : false;
        rep.steps_used += kDefaultStepBudget - steps;
        if (prem && !concl) record("premise holds but conclusion fails");
        if (def.two_way && concl && !prem)
          record("conclusion holds but premise fails (converse direction)");
      }
    }
  }
  if (suppressed > 0)
    rep.failures.push_back(
        {"...", std::to_string(suppressed) + " further failing instances omitted"});
  return rep;
}

long long brute_force_modulus(const NormalForm& nf, const std::string& precision_var,
                              long long k_value, const Interp& in,
                              const SymbolTable& tab) {
  if (nf.exist_block.size() != 1 || !is_nat(nf.exist_block[0].second))
    bad("PatternMismatch",
        "modulus search needs exactly one existential Nat binder");
  if (!classify_internal(nf.matrix))
    bad("NotInFragment", "normal-form matrix is not internal");
  ensure_decidable_atoms(nf.matrix, in, tab);
  const std::string& modulus = nf.exist_block[0].first;

  bool saw_precision = false;
  std::vector<std::pair<std::string, TypePtr>> others;
  for (const auto& [n, t] : nf.univ_block) {
    if (n == precision_var) {
      if (!is_nat(t))
        bad("PatternMismatch", "precision variable '" + n + "' must have type Nat");
      saw_precision = true;
    } else {
      others.emplace_back(n, t);
    }
  }
  if (!saw_precision)
    bad("PatternMismatch",
        "precision variable '" + precision_var + "' is not in the universal block");

  EnvPtr base = interp_const_env(in, tab, nullptr);
  base = env_bind(base, precision_var, num_value(static_cast<std::uint64_t>(k_value)));

  std::vector<std::vector<ValuePtr>> domains;
  for (const auto& [n, t] : others) {
    (void)n;
    domains.push_back(enumerate_values(t, false, in));
  }

  for (long long N = 1; N <= in.M; ++N) {
    EnvPtr envN = env_bind(base, modulus, num_value(static_cast<std::uint64_t>(N)));
    bool all = true;
    std::vector<std::size_t> odo(others.size(), 0);
    while (all) {
      EnvPtr env = envN;
      for (std::size_t i = 0; i < others.size(); ++i)
        env = env_bind(env, others[i].first, domains[i][odo[i]]);
      std::uint64_t steps = kDefaultStepBudget;
      if (!eval_formula_cutoff(nf.matrix, env, in, tab, steps)) {
        all = false;
        break;
      }
      std::size_t pos = others.size();
      while (pos > 0 && odo[pos - 1] + 1 == domains[pos - 1].size()) {
        odo[pos - 1] = 0;
        --pos;
      }
      if (pos == 0) break;
      ++odo[pos - 1];
    }
    if (all) return N;
  }
  bad("NoModulusExists",
      "no modulus in [1.." + std::to_string(in.M) + "] satisfies the matrix at precision " +
          std::to_string(k_value));
}

std::string report_to_string(const VerificationReport& r) {
  std::ostringstream os;
  os << "checked: " << r.checked << " (closed form: " << r.closed_form << ", "
     << (r.exhaustive ? "exhaustive" : "sampled") << ")\n";
  os << "steps: " << r.steps_used << "\n";
  os << "result: " << (r.pass() ? "PASS" : "FAIL") << " (" << r.failures.size()
     << " failures)\n";
  for (const auto& f : r.failures) os << "  - " << f.assignment << ": " << f.detail << "\n";
  return os.str();
}

}  // namespace nsa
