#include "nsa/interp.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>

#include "nsa/errors.hpp"
#include "nsa/printer.hpp"

namespace nsa {

namespace {

[[noreturn]] void bad(const std::string& code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace

Rat parse_rational(const std::string& tok) {
  auto parse_ll = [&](const std::string& s) -> long long {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      bad("SyntaxError", "expected a rational number, got '" + tok + "'");
    }
    if (pos != s.size())
      bad("SyntaxError", "expected a rational number, got '" + tok + "'");
    return v;
  };
  auto slash = tok.find('/');
  if (slash == std::string::npos) return Rat(parse_ll(tok));
  long long num = parse_ll(tok.substr(0, slash));
  long long den = parse_ll(tok.substr(slash + 1));
  if (den == 0) bad("SyntaxError", "rational with zero denominator: " + tok);
  return Rat(num, den);
}

std::string rat_to_string(const Rat& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

int Interp::carrier_size(const TypePtr& t) const {
  if (is_nat(t)) return M + 1;
  if (t->kind == FinType::Kind::Sort) {
    auto it = sorts.find(t->sort);
    if (it == sorts.end())
      bad("UnknownSort", "sort '" + t->sort + "' has no carrier in the interpretation");
    return it->second.size;
  }
  bad("SizeBudgetExceeded", "type " + print_type(t) + " has no finite carrier");
}

int Interp::standard_size(const TypePtr& t) const {
  return std::min(K + 1, carrier_size(t));
}

Rat Interp::label(const TypePtr& t, long long v) const {
  if (v < 0 || v >= carrier_size(t))
    bad("IndexOutOfRange", "element " + std::to_string(v) + " outside the carrier of " +
                               print_type(t));
  if (is_nat(t)) return Rat(v);
  const auto& sc = sorts.at(t->sort);
  if (sc.labels.empty()) return Rat(v);
  return sc.labels[static_cast<std::size_t>(v)];
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

long long parse_nat_tok(const std::string& tok, const std::string& what) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    bad("SyntaxError", what + ": expected a number, got '" + tok + "'");
  }
  if (pos != tok.size() || v < 0)
    bad("SyntaxError", what + ": expected a nonnegative number, got '" + tok + "'");
  return v;
}

std::vector<std::string> split_commas(const std::string& tok) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : tok) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

Interp parse_interp(const std::string& text) {
  Interp in;
  bool saw_cutoff = false;
  std::istringstream stream(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(stream, raw)) {
    ++lineno;
    std::string line = raw;
    auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    const std::string where = "interpretation line " + std::to_string(lineno);
    const std::string& head = toks[0];

    if (head == "sort") {
      if (toks.size() < 3) bad("SyntaxError", where + ": sort <name> <size> [labels...]");
      SortCarrier sc;
      sc.size = static_cast<int>(parse_nat_tok(toks[2], where));
      if (sc.size <= 0) bad("SyntaxError", where + ": sort size must be positive");
      if (toks.size() > 3) {
        if (static_cast<int>(toks.size()) - 3 != sc.size)
          bad("SyntaxError", where + ": expected " + std::to_string(sc.size) + " labels, got " +
                                 std::to_string(toks.size() - 3));
        for (std::size_t i = 3; i < toks.size(); ++i)
          sc.labels.push_back(parse_rational(toks[i]));
      }
      in.sorts[toks[1]] = std::move(sc);
    } else if (head == "cutoff") {
      if (toks.size() != 3) bad("SyntaxError", where + ": cutoff K=<n> M=<n>");
      auto grab = [&](const std::string& tok, const char* key) -> int {
        std::string prefix = std::string(key) + "=";
        if (tok.rfind(prefix, 0) != 0)
          bad("SyntaxError", where + ": expected " + prefix + "<n>, got '" + tok + "'");
        return static_cast<int>(parse_nat_tok(tok.substr(prefix.size()), where));
      };
      in.K = grab(toks[1], "K");
      in.M = grab(toks[2], "M");
      if (in.K >= in.M) bad("SyntaxError", where + ": cutoff requires K < M");
      saw_cutoff = true;
    } else if (head == "atom") {
      if (toks.size() < 4) bad("SyntaxError", where + ": atom <name> rule|table ...");
      AtomInterp ai;
      if (toks[2] == "rule") {
        auto at = line.find("rule");
        ai.rule = parse_sexp(line.substr(at + 4));
      } else if (toks[2] == "table") {
        if (toks.size() != 4) bad("SyntaxError", where + ": atom <name> table <bits>");
        std::vector<bool> bits;
        for (char c : toks[3]) {
          if (c == '0')
            bits.push_back(false);
          else if (c == '1')
            bits.push_back(true);
          else
            bad("SyntaxError", where + ": table must be a string of 0s and 1s");
        }
        ai.table = std::move(bits);
      } else {
        bad("SyntaxError", where + ": atom kind must be 'rule' or 'table'");
      }
      in.atoms[toks[1]] = std::move(ai);
    } else if (head == "const") {
      if (toks.size() != 4) bad("SyntaxError", where + ": const <name> <res-sort> <value>");
      ConstInterp ci;
      ci.res_sort = toks[2];
      ci.values.push_back(parse_nat_tok(toks[3], where));
      in.consts[toks[1]] = std::move(ci);
    } else if (head == "fun") {
      if (toks.size() < 5)
        bad("SyntaxError", where + ": fun <name> <argsorts> <res-sort> <values...>");
      ConstInterp ci;
      ci.arg_sorts = split_commas(toks[2]);
      if (ci.arg_sorts.empty()) bad("SyntaxError", where + ": fun needs at least one argument sort");
      ci.res_sort = toks[3];
      for (std::size_t i = 4; i < toks.size(); ++i)
        ci.values.push_back(parse_nat_tok(toks[i], where));
      in.consts[toks[1]] = std::move(ci);
    } else {
      bad("SyntaxError", where + ": unknown directive '" + head + "'");
    }
  }
  if (!saw_cutoff) bad("SyntaxError", "interpretation is missing a 'cutoff K=<n> M=<n>' line");

  // Validate table/value lengths against the declared carriers.
  auto sort_size = [&](const std::string& s, const std::string& what) -> long long {
    if (s == "Nat") return in.M + 1;
    auto it = in.sorts.find(s);
    if (it == in.sorts.end()) bad("UnknownSort", what + " mentions undeclared sort '" + s + "'");
    return it->second.size;
  };
  for (auto& [name, ci] : in.consts) {
    long long cells = 1;
    for (const auto& s : ci.arg_sorts) cells *= sort_size(s, "fun " + name);
    long long res = sort_size(ci.res_sort, (ci.arg_sorts.empty() ? "const " : "fun ") + name);
    if (static_cast<long long>(ci.values.size()) != cells)
      bad("SyntaxError", "fun " + name + ": expected " + std::to_string(cells) +
                             " values, got " + std::to_string(ci.values.size()));
    for (long long v : ci.values)
      if (v >= res)
        bad("IndexOutOfRange", "const/fun " + name + ": value " + std::to_string(v) +
                                   " outside carrier of " + ci.res_sort);
  }
  return in;
}

Interp parse_interp_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) bad("FixtureMissing", "cannot open interpretation file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_interp(buf.str());
}

// ---------------------------------------------------------------------------
// Rule evaluation
// ---------------------------------------------------------------------------

namespace {

// Rules compute either a rational or a truth value.
struct RuleVal {
  bool is_bool = false;
  bool b = false;
  Rat r;
};

RuleVal rv_num(Rat r) { return {false, false, std::move(r)}; }
RuleVal rv_bool(bool b) { return {true, b, Rat(0)}; }

Rat want_num(const RuleVal& v, const Sexp& at) {
  if (v.is_bool) bad("TypeMismatch", "rule at " + at.where() + ": expected a number");
  return v.r;
}

bool want_bool(const RuleVal& v, const Sexp& at) {
  if (!v.is_bool) bad("TypeMismatch", "rule at " + at.where() + ": expected a truth value");
  return v.b;
}

RuleVal eval_rule(const Sexp& e, const std::vector<Rat>& args) {
  if (e.is_atom()) {
    const std::string& a = e.atom;
    if (!a.empty() && a[0] == '$') {
      std::size_t idx = static_cast<std::size_t>(parse_nat_tok(a.substr(1), "rule argument"));
      if (idx >= args.size())
        bad("IndexOutOfRange", "rule refers to $" + std::to_string(idx) + " but the atom has " +
                                   std::to_string(args.size()) + " arguments");
      return rv_num(args[idx]);
    }
    if (a == "true") return rv_bool(true);
    if (a == "false") return rv_bool(false);
    return rv_num(parse_rational(a));
  }
  if (e.items.empty() || !e.items[0].is_atom())
    bad("SyntaxError", "rule at " + e.where() + ": expected (op args...)");
  const std::string& op = e.items[0].atom;
  auto arity = e.items.size() - 1;
  auto need = [&](std::size_t n) {
    if (arity != n)
      bad("SyntaxError", "rule op '" + op + "' at " + e.where() + " expects " +
                             std::to_string(n) + " arguments");
  };
  auto need_at_least = [&](std::size_t n) {
    if (arity < n)
      bad("SyntaxError", "rule op '" + op + "' at " + e.where() + " expects at least " +
                             std::to_string(n) + " arguments");
  };
  auto num = [&](std::size_t i) { return want_num(eval_rule(e.items[i], args), e.items[i]); };
  auto boolean = [&](std::size_t i) { return want_bool(eval_rule(e.items[i], args), e.items[i]); };

  if (op == "+" || op == "*" || op == "min" || op == "max") {
    need_at_least(2);
    Rat acc = num(1);
    for (std::size_t i = 2; i <= arity; ++i) {
      Rat v = num(i);
      if (op == "+") acc += v;
      else if (op == "*") acc *= v;
      else if (op == "min") acc = std::min(acc, v);
      else acc = std::max(acc, v);
    }
    return rv_num(acc);
  }
  if (op == "-") {
    need(2);
    return rv_num(num(1) - num(2));
  }
  if (op == "/") {
    need(2);
    Rat d = num(2);
    if (d == Rat(0)) bad("EvaluationError", "rule at " + e.where() + ": division by zero");
    return rv_num(num(1) / d);
  }
  if (op == "abs") {
    need(1);
    Rat v = num(1);
    return rv_num(v < Rat(0) ? -v : v);
  }
  if (op == "<") { need(2); return rv_bool(num(1) < num(2)); }
  if (op == "<=") { need(2); return rv_bool(num(1) <= num(2)); }
  if (op == "=") { need(2); return rv_bool(num(1) == num(2)); }
  if (op == ">=") { need(2); return rv_bool(num(1) >= num(2)); }
  if (op == ">") { need(2); return rv_bool(num(1) > num(2)); }
  if (op == "and" || op == "or") {
    need_at_least(2);
    bool acc = boolean(1);
    for (std::size_t i = 2; i <= arity; ++i) {
      bool v = boolean(i);
      acc = (op == "and") ? (acc && v) : (acc || v);
    }
    return rv_bool(acc);
  }
  if (op == "not") { need(1); return rv_bool(!boolean(1)); }
  if (op == "imp") { need(2); bool a = boolean(1); bool b = boolean(2); return rv_bool(!a || b); }
  bad("SyntaxError", "rule at " + e.where() + ": unknown op '" + op + "'");
}

}  // namespace

bool atom_truth(const Interp& in, const SymbolTable& tab, const std::string& name,
                const std::vector<long long>& args) {
  const AtomDecl* decl = tab.find_atom(name);
  if (!decl) bad("UnknownAtom", "atom '" + name + "' is not declared");
  if (args.size() != decl->arg_sorts.size())
    bad("TypeMismatch", "atom '" + name + "' applied to " + std::to_string(args.size()) +
                            " arguments, declared with " +
                            std::to_string(decl->arg_sorts.size()));
  auto it = in.atoms.find(name);
  if (it == in.atoms.end())
    bad("UndecidableAtom", "atom '" + name + "' has no table or rule in the interpretation");
  const AtomInterp& ai = it->second;

  auto dim = [&](std::size_t i) -> long long {
    const TypePtr& s = decl->arg_sorts[i];
    if (is_nat(s)) return in.M + 1;
    auto sit = in.sorts.find(s->sort);
    if (sit == in.sorts.end())
      bad("UnknownSort", "atom '" + name + "' argument sort '" + s->sort + "' has no carrier");
    return sit->second.size;
  };

  if (ai.table) {
    long long cells = 1;
    for (std::size_t i = 0; i < args.size(); ++i) cells *= dim(i);
    if (static_cast<long long>(ai.table->size()) != cells)
      bad("TypeMismatch", "atom '" + name + "' table has " + std::to_string(ai.table->size()) +
                              " entries, carriers need " + std::to_string(cells));
    long long flat = 0;
    for (std::size_t i = 0; i < args.size(); ++i) {
      long long d = dim(i);
      if (args[i] < 0 || args[i] >= d) return false;  // out of carrier: false
      flat = flat * d + args[i];
    }
    return (*ai.table)[static_cast<std::size_t>(flat)];
  }

  // Rule: map element values to their rational labels.
  std::vector<Rat> rats;
  rats.reserve(args.size());
  for (std::size_t i = 0; i < args.size(); ++i) {
    const TypePtr& s = decl->arg_sorts[i];
    if (is_nat(s)) {
      rats.push_back(Rat(args[i]));
    } else {
      const auto& sc = in.sorts.at(s->sort);
      if (args[i] < 0 || args[i] >= sc.size)
        bad("IndexOutOfRange", "atom '" + name + "' argument " + std::to_string(args[i]) +
                                   " outside the carrier of sort " + s->sort);
      rats.push_back(sc.labels.empty() ? Rat(args[i])
                                       : sc.labels[static_cast<std::size_t>(args[i])]);
    }
  }
  return want_bool(eval_rule(*ai.rule, rats), *ai.rule);
}

// ---------------------------------------------------------------------------
// Constant environment
// ---------------------------------------------------------------------------

namespace {

// Curried lookup into a row-major value table.
ValuePtr curry_table(std::vector<long long> dims, std::shared_ptr<std::vector<long long>> vals,
                     std::size_t pos, long long flat, const std::string& name) {
  if (pos == dims.size())
    return num_value(static_cast<std::uint64_t>((*vals)[static_cast<std::size_t>(flat)]));
  return native_value([dims = std::move(dims), vals = std::move(vals), pos, flat,
                       name](const ValuePtr& a) -> ValuePtr {
    if (!a || a->kind != Value::Kind::Num)
      bad("TypeMismatch", "interpreted function '" + name + "' expects a numeric argument");
    long long v = static_cast<long long>(a->num);
    if (v < 0 || v >= dims[pos])
      bad("IndexOutOfRange", "interpreted function '" + name + "' applied to " +
                                 std::to_string(v) + ", carrier has " +
                                 std::to_string(dims[pos]) + " elements");
    return curry_table(dims, vals, pos + 1, flat * dims[pos] + v, name);
  });
}

}  // namespace

EnvPtr interp_const_env(const Interp& in, const SymbolTable& tab, EnvPtr base) {
  EnvPtr env = std::move(base);
  for (const auto& [name, ci] : in.consts) {
    if (tab.find_const(name) == nullptr)
      bad("UnknownAtom", "interpretation defines '" + name + "' but the preamble does not declare it");
    if (ci.arg_sorts.empty()) {
      env = env_bind(env, name, num_value(static_cast<std::uint64_t>(ci.values[0])));
      continue;
    }
    std::vector<long long> dims;
    for (const auto& s : ci.arg_sorts) {
      if (s == "Nat")
        dims.push_back(in.M + 1);
      else
        dims.push_back(in.sorts.at(s).size);
    }
    auto vals = std::make_shared<std::vector<long long>>(ci.values);
    env = env_bind(env, name, curry_table(std::move(dims), std::move(vals), 0, 0, name));
  }
  return env;
}

}  // namespace nsa
