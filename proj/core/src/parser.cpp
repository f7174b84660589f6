#include "nsa/parser.hpp"

#include <cctype>

#include "nsa/errors.hpp"

namespace nsa {
namespace {

bool is_nat_literal(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

[[noreturn]] void bad(const Sexp& s, const std::string& what) {
  fail("SyntaxError", what + " at " + s.where() + " (near '" +
                          to_string(s).substr(0, 60) + "')");
}

const Sexp& arg(const Sexp& s, size_t i, const char* what) {
  if (!s.is_list() || s.items.size() <= i)
    bad(s, std::string("missing ") + what);
  return s.items[i];
}

void expect_arity(const Sexp& s, size_t n) {
  if (s.items.size() != n)
    bad(s, "'" + s.items[0].atom + "' takes " + std::to_string(n - 1) +
               " argument(s), got " + std::to_string(s.items.size() - 1));
}

// (name Type) binder groups.
std::pair<std::string, const Sexp*> parse_binder_typed(const Sexp& s) {
  if (!s.is_list() || s.items.size() != 2 || !s.items[0].is_atom())
    bad(s, "expected a (name type) binder");
  return {s.items[0].atom, &s.items[1]};
}

std::string parse_binder_bare(const Sexp& s) {
  if (!s.is_list() || s.items.size() != 1 || !s.items[0].is_atom())
    bad(s, "expected a (name) binder");
  return s.items[0].atom;
}

}  // namespace

TypePtr parse_type(const Sexp& s, const SymbolTable& tab) {
  if (s.is_atom()) {
    if (s.atom == "Nat") return nat_type();
    if (tab.sorts.count(s.atom)) return sort_type(s.atom);
    bad(s, "unknown type '" + s.atom + "' (not Nat or a declared sort)");
  }
  if (s.headed("->")) {
    expect_arity(s, 3);
    return arrow_type(parse_type(s.items[1], tab), parse_type(s.items[2], tab));
  }
  if (s.headed("Seq")) {
    expect_arity(s, 2);
    return seq_type(parse_type(s.items[1], tab));
  }
  bad(s, "malformed type");
}

namespace {
TermPtr parse_term_raw(const Sexp& s, const SymbolTable& tab) {
  if (s.is_atom()) {
    if (is_nat_literal(s.atom)) return mk_num(std::stoull(s.atom));
    return mk_var(s.atom);
  }
  if (s.items.empty() || !s.items[0].is_atom()) bad(s, "malformed term");
  const std::string& h = s.items[0].atom;
  auto sub = [&](size_t i) { return parse_term_raw(s.items[i], tab); };
  if (h == "lam") {
    expect_arity(s, 3);
    auto [name, tyx] = parse_binder_typed(s.items[1]);
    return mk_lam(name, parse_type(*tyx, tab), sub(2));
  }
  if (h == "app") {
    expect_arity(s, 3);
    return mk_app(sub(1), sub(2));
  }
  if (h == "succ") {
    expect_arity(s, 2);
    return mk_succ(sub(1));
  }
  if (h == "rec") {
    expect_arity(s, 5);
    return mk_rec(parse_type(s.items[1], tab), sub(2), sub(3), sub(4));
  }
  if (h == "nil") {
    expect_arity(s, 2);
    return mk_nil(parse_type(s.items[1], tab));
  }
  if (h == "cons") {
    expect_arity(s, 3);
    return mk_cons(sub(1), sub(2));
  }
  if (h == "append") {
    expect_arity(s, 3);
    return mk_append(sub(1), sub(2));
  }
  if (h == "len") {
    expect_arity(s, 2);
    return mk_len(sub(1));
  }
  if (h == "idx") {
    expect_arity(s, 3);
    return mk_idx(sub(1), sub(2));
  }
  if (h == "prefix") {
    expect_arity(s, 3);
    return mk_prefix(sub(1), sub(2));
  }
  if (h == "max") {
    expect_arity(s, 2);
    return mk_max(sub(1));
  }
  bad(s, "unknown term head '" + h + "'");
}
}  // namespace

TermPtr parse_term(const Sexp& s, const SymbolTable& tab) {
  TermPtr raw = parse_term_raw(s, tab);
  FreshGen gen(free_term_vars(raw));
  for (const auto& [n, t] : tab.consts) gen.reserve(n);
  // The formula-level freshener also renames lambda binders inside args.
  FormulaPtr renamed = make_binders_unique(mk_st(raw), gen);
  return renamed->args[0];
}

namespace {
FormulaPtr parse_formula_raw(const Sexp& s, const SymbolTable& tab) {
  if (!s.is_list() || s.items.empty() || !s.items[0].is_atom())
    bad(s, "malformed formula");
  const std::string& h = s.items[0].atom;
  auto term = [&](size_t i) { return parse_term_raw(s.items[i], tab); };
  auto form = [&](size_t i) { return parse_formula_raw(s.items[i], tab); };
  if (h == "eq0") {
    expect_arity(s, 3);
    return mk_eq0(term(1), term(2));
  }
  if (h == "le0") {
    expect_arity(s, 3);
    return mk_le0(term(1), term(2));
  }
  if (h == "atom") {
    if (s.items.size() < 2 || !s.items[1].is_atom())
      bad(s, "atom needs a name");
    std::vector<TermPtr> args;
    for (size_t i = 2; i < s.items.size(); ++i) args.push_back(term(i));
    return mk_atom(s.items[1].atom, std::move(args));
  }
  if (h == "st") {
    expect_arity(s, 2);
    return mk_st(term(1));
  }
  if (h == "and" || h == "or" || h == "imp") {
    expect_arity(s, 3);
    if (h == "and") return mk_and(form(1), form(2));
    if (h == "or") return mk_or(form(1), form(2));
    return mk_imp(form(1), form(2));
  }
  if (h == "not") {
    expect_arity(s, 2);
    return mk_not(form(1));
  }
  if (h == "forall" || h == "exists" || h == "forall-st" || h == "exists-st") {
    expect_arity(s, 3);
    auto [name, tyx] = parse_binder_typed(s.items[1]);
    TypePtr ty = parse_type(*tyx, tab);
    FormulaPtr body = form(2);
    if (h == "forall") return mk_forall(name, ty, body);
    if (h == "exists") return mk_exists(name, ty, body);
    if (h == "forall-st") return mk_forall_st(name, ty, body);
    return mk_exists_st(name, ty, body);
  }
  if (h == "approx") {
    expect_arity(s, 3);
    return mk_approx(term(1), term(2));
  }
  if (h == "forall-omega") {
    expect_arity(s, 3);
    return mk_forall_omega(parse_binder_bare(s.items[1]), form(2));
  }
  if (h == "forall-inf") {
    expect_arity(s, 3);
    std::string name = parse_binder_bare(s.items[1]);
    TypePtr ty;  // resolved from the declared infinitesimal-bound atom
    if (const AtomDecl* d = tab.find_atom("abs-lt-inv"))
      if (!d->arg_sorts.empty()) ty = d->arg_sorts[0];
    return mk_forall_inf(name, ty, form(2));
  }
  bad(s, "unknown formula head '" + h + "'");
}
}  // namespace

FormulaPtr parse_formula(const Sexp& s, const SymbolTable& tab) {
  FormulaPtr raw = parse_formula_raw(s, tab);
  FreshGen gen(free_vars(raw));
  for (const auto& [n, t] : tab.consts) gen.reserve(n);
  FormulaPtr renamed = make_binders_unique(raw, gen);
  check_formula(renamed, {}, tab);
  return renamed;
}

bool parse_preamble_form(const Sexp& s, SymbolTable& tab) {
  if (s.headed("declare-sort")) {
    expect_arity(s, 2);
    const Sexp& n = arg(s, 1, "sort name");
    if (!n.is_atom()) bad(n, "sort name must be an identifier");
    tab.sorts.insert(n.atom);
    return true;
  }
  if (s.headed("declare-const")) {
    expect_arity(s, 3);
    const Sexp& n = arg(s, 1, "constant name");
    if (!n.is_atom()) bad(n, "constant name must be an identifier");
    tab.consts[n.atom] = parse_type(s.items[2], tab);
    return true;
  }
  if (s.headed("declare-atom")) {
    if (s.items.size() < 3) bad(s, "declare-atom needs a name and sort list");
    const Sexp& n = s.items[1];
    if (!n.is_atom()) bad(n, "atom name must be an identifier");
    AtomDecl d;
    d.name = n.atom;
    const Sexp& sorts = s.items[2];
    if (!sorts.is_list()) bad(sorts, "expected a sort list");
    for (const Sexp& so : sorts.items) {
      TypePtr ty = parse_type(so, tab);
      if (!is_base(ty)) bad(so, "atom argument sorts must be base types");
      d.arg_sorts.push_back(ty);
    }
    size_t i = 3;
    while (i < s.items.size()) {
      const Sexp& flag = s.items[i];
      if (flag.is_atom(":decidable")) {
        d.decidable = true;
        ++i;
        continue;
      }
      if (flag.is_atom(":monotone") || flag.is_atom(":antitone")) {
        bool mono = flag.atom == ":monotone";
        ++i;
        bool any = false;
        while (i < s.items.size() && s.items[i].is_atom() &&
               is_nat_literal(s.items[i].atom)) {
          int pos = std::stoi(s.items[i].atom);
          if (pos < 0 || pos >= static_cast<int>(d.arg_sorts.size()))
            bad(s.items[i], "direction position out of range");
          if (!is_nat(d.arg_sorts[pos]))
            bad(s.items[i], "direction annotations apply to Nat positions");
          (mono ? d.monotone_in : d.antitone_in).push_back(pos);
          any = true;
          ++i;
        }
        if (!any) bad(flag, "direction flag needs at least one position");
        continue;
      }
      bad(flag, "unknown declare-atom flag");
    }
    tab.atoms[d.name] = d;
    return true;
  }
  return false;
}

ParsedFormulaFile parse_formula_file(const std::string& text) {
  auto forms = parse_sexps(text);
  ParsedFormulaFile out;
  size_t i = 0;
  while (i < forms.size() && parse_preamble_form(forms[i], out.table)) ++i;
  if (i >= forms.size())
    fail("SyntaxError", "formula file has no formula after the preamble");
  if (i + 1 < forms.size())
    fail("SyntaxError",
         "formula file has extra content at " + forms[i + 1].where());
  out.formula = parse_formula(forms[i], out.table);
  return out;
}

ParsedTermFile parse_term_file(const std::string& text) {
  auto forms = parse_sexps(text);
  ParsedTermFile out;
  size_t i = 0;
  while (i < forms.size() && parse_preamble_form(forms[i], out.table)) ++i;
  if (i >= forms.size())
    fail("SyntaxError", "term file has no term after the preamble");
  if (i + 1 < forms.size())
    fail("SyntaxError",
         "term file has extra content at " + forms[i + 1].where());
  out.term = parse_term(forms[i], out.table);
  return out;
}

std::vector<std::pair<std::string, TermPtr>> parse_witness_file(
    const std::string& text, SymbolTable& tab) {
  auto forms = parse_sexps(text);
  std::vector<std::pair<std::string, TermPtr>> out;
  for (const Sexp& s : forms) {
    if (parse_preamble_form(s, tab)) continue;
    if (!s.headed("witness"))
      fail("SyntaxError",
           "expected (witness <binder> <term>) at " + s.where());
    expect_arity(s, 3);
    if (!s.items[1].is_atom()) bad(s.items[1], "witness binder name");
    out.emplace_back(s.items[1].atom, parse_term(s.items[2], tab));
  }
  return out;
}

}  // namespace nsa
