#include "nsa/eval.hpp"

#include <algorithm>

#include "nsa/errors.hpp"

namespace nsa {

EnvPtr env_bind(EnvPtr env, std::string name, ValuePtr v) {
  auto n = std::make_shared<EnvNode>();
  n->name = std::move(name);
  n->value = std::move(v);
  n->next = std::move(env);
  return n;
}

const ValuePtr* env_lookup(const EnvPtr& env, const std::string& name) {
  for (const EnvNode* cur = env.get(); cur; cur = cur->next.get())
    if (cur->name == name) return &cur->value;
  return nullptr;
}

ValuePtr num_value(std::uint64_t n) {
  auto v = std::make_shared<Value>();
  v->kind = Value::Kind::Num;
  v->num = n;
  return v;
}

ValuePtr seq_value(std::vector<ValuePtr> elems, TypePtr elem_type) {
  auto v = std::make_shared<Value>();
  v->kind = Value::Kind::Seq;
  v->elems = std::move(elems);
  v->elem_type = std::move(elem_type);
  return v;
}

ValuePtr native_value(std::function<ValuePtr(const ValuePtr&)> fn) {
  auto v = std::make_shared<Value>();
  v->kind = Value::Kind::Native;
  v->native = std::move(fn);
  return v;
}

namespace {
std::uint64_t need_num(const ValuePtr& v, const char* where) {
  if (v->kind != Value::Kind::Num)
    fail("IllTyped", std::string(where) + ": expected a numeral value");
  return v->num;
}

const Value& need_seq(const ValuePtr& v, const char* where) {
  if (v->kind != Value::Kind::Seq)
    fail("IllTyped", std::string(where) + ": expected a sequence value");
  return *v;
}

void tick(std::uint64_t& steps) {
  if (steps == 0)
    fail("StepBudgetExceeded", "evaluation exceeded the reduction budget");
  --steps;
}
}  // namespace

ValuePtr apply_value(const ValuePtr& f, const ValuePtr& a,
                     std::uint64_t& steps) {
  tick(steps);
  if (f->kind == Value::Kind::Native) return f->native(a);
  if (f->kind != Value::Kind::Closure)
    fail("IllTyped", "application of a non-function value");
  return eval(f->lam->t0, env_bind(f->env, f->lam->name, a), steps);
}

ValuePtr eval(const TermPtr& t, const EnvPtr& env, std::uint64_t& steps) {
  tick(steps);
  switch (t->kind) {
    case Term::Kind::Var: {
      if (const ValuePtr* v = env_lookup(env, t->name)) return *v;
      fail("OpenTerm", "unbound variable '" + t->name + "' during evaluation");
    }
    case Term::Kind::Lam: {
      auto v = std::make_shared<Value>();
      v->kind = Value::Kind::Closure;
      v->lam = t;
      v->env = env;
      return v;
    }
    case Term::Kind::App:
      return apply_value(eval(t->t0, env, steps), eval(t->t1, env, steps),
                         steps);
    case Term::Kind::Zero:
      return num_value(0);
    case Term::Kind::Succ:
      return num_value(need_num(eval(t->t0, env, steps), "succ") + 1);
    case Term::Kind::Rec: {
      std::uint64_t n = need_num(eval(t->t2, env, steps), "rec index");
      ValuePtr acc = eval(t->t0, env, steps);
      if (n == 0) return acc;
      ValuePtr step = eval(t->t1, env, steps);
      for (std::uint64_t i = 0; i < n; ++i)
        acc = apply_value(apply_value(step, num_value(i), steps), acc, steps);
      return acc;
    }
    case Term::Kind::Nil:
      return seq_value({}, t->type);
    case Term::Kind::Cons: {
      ValuePtr h = eval(t->t0, env, steps);
      ValuePtr tl = eval(t->t1, env, steps);
      const Value& s = need_seq(tl, "cons tail");
      std::vector<ValuePtr> elems;
      elems.reserve(s.elems.size() + 1);
      elems.push_back(h);
      elems.insert(elems.end(), s.elems.begin(), s.elems.end());
      return seq_value(std::move(elems), s.elem_type);
    }
    case Term::Kind::Append: {
      ValuePtr a = eval(t->t0, env, steps);
      ValuePtr b = eval(t->t1, env, steps);
      const Value& sa = need_seq(a, "append");
      const Value& sb = need_seq(b, "append");
      std::vector<ValuePtr> elems = sa.elems;
      elems.insert(elems.end(), sb.elems.begin(), sb.elems.end());
      return seq_value(std::move(elems),
                       sa.elem_type ? sa.elem_type : sb.elem_type);
    }
    case Term::Kind::Len:
      return num_value(need_seq(eval(t->t0, env, steps), "len").elems.size());
    case Term::Kind::Idx: {
      ValuePtr s = eval(t->t0, env, steps);
      std::uint64_t i = need_num(eval(t->t1, env, steps), "idx");
      const Value& sv = need_seq(s, "idx");
      if (i >= sv.elems.size())
        fail("IndexOutOfRange",
             "idx " + std::to_string(i) + " into a sequence of length " +
                 std::to_string(sv.elems.size()));
      return sv.elems[i];
    }
    case Term::Kind::Prefix: {
      ValuePtr s = eval(t->t0, env, steps);
      std::uint64_t n = need_num(eval(t->t1, env, steps), "prefix");
      const Value& sv = need_seq(s, "prefix");
      std::uint64_t take = std::min<std::uint64_t>(n, sv.elems.size());
      std::vector<ValuePtr> elems(sv.elems.begin(),
                                  sv.elems.begin() + take);
      return seq_value(std::move(elems), sv.elem_type);
    }
    case Term::Kind::Max: {
      ValuePtr s = eval(t->t0, env, steps);
      const Value& sv = need_seq(s, "max");
      std::uint64_t best = 0;
      for (const auto& e : sv.elems)
        best = std::max(best, need_num(e, "max element"));
      return num_value(best);
    }
  }
  fail("IllTyped", "unreachable term kind in eval");
}

ValuePtr normalize(const TermPtr& t) {
  std::uint64_t steps = kDefaultStepBudget;
  return eval(t, nullptr, steps);
}

ValuePtr apply_closed(const TermPtr& f, const std::vector<TermPtr>& args) {
  return normalize(mk_apps(f, args));
}

TermPtr value_to_term(const ValuePtr& v) {
  switch (v->kind) {
    case Value::Kind::Num:
      return mk_num(v->num);
    case Value::Kind::Seq: {
      std::vector<TermPtr> elems;
      for (const auto& e : v->elems) elems.push_back(value_to_term(e));
      return mk_list(elems, v->elem_type);
    }
    case Value::Kind::Closure: {
      // Substitute the captured environment back into the lambda.
      TermPtr t = v->lam;
      for (const EnvNode* cur = v->env.get(); cur; cur = cur->next.get())
        t = subst_term(t, cur->name, value_to_term(cur->value));
      return t;
    }
    case Value::Kind::Native:
      fail("IllTyped", "built-in function values have no term syntax");
  }
  fail("IllTyped", "unreachable value kind");
}

bool value_eq(const ValuePtr& a, const ValuePtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Value::Kind::Num:
      return a->num == b->num;
    case Value::Kind::Seq: {
      if (a->elems.size() != b->elems.size()) return false;
      for (size_t i = 0; i < a->elems.size(); ++i)
        if (!value_eq(a->elems[i], b->elems[i])) return false;
      return true;
    }
    default:
      return false;  // functions are never compared
  }
}

TermPtr max_of_list(const TermPtr& s, const std::map<std::string, TypePtr>& ctx,
                    const SymbolTable& tab) {
  try {
    TypePtr ty = infer_type(s, ctx, tab);
    if (!type_eq(ty, seq_type(nat_type())))
      fail("IllTyped", "max applies to Seq Nat terms only");
  } catch (const Error& e) {
    // Variables beyond the supplied context leave the type undetermined;
    // anything else is a genuine typing defect.
    if (e.code() != "UnboundVariable")
      fail("IllTyped", std::string("max argument: ") + e.what());
  }
  return mk_max(s);
}

}  // namespace nsa
