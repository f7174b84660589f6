#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "nsa/syntax.hpp"

namespace nsa {
namespace build {

// Small combinator layer for authoring witness terms programmatically.
// Arithmetic helpers expand to recursor terms; their internal binders are
// chosen to avoid the free variables of the argument terms, so the results
// are capture-safe and deterministic.

inline TermPtr v(const std::string& name) { return mk_var(name); }
inline TermPtr n(std::uint64_t k) { return mk_num(k); }

inline TermPtr lam(const std::string& x, TypePtr t, TermPtr body) {
  return mk_lam(x, std::move(t), std::move(body));
}

inline TermPtr app(TermPtr f, TermPtr a) {
  return mk_app(std::move(f), std::move(a));
}
inline TermPtr app(TermPtr f, TermPtr a, TermPtr b) {
  return mk_app(mk_app(std::move(f), std::move(a)), std::move(b));
}
inline TermPtr app(TermPtr f, TermPtr a, TermPtr b, TermPtr c) {
  return mk_app(mk_app(mk_app(std::move(f), std::move(a)), std::move(b)),
                std::move(c));
}

inline TermPtr nat_list(std::initializer_list<std::uint64_t> xs) {
  std::vector<TermPtr> elems;
  for (auto x : xs) elems.push_back(mk_num(x));
  return mk_list(elems, nat_type());
}

namespace detail {
inline std::pair<std::string, std::string> step_binders(
    std::initializer_list<TermPtr> pieces) {
  std::set<std::string> avoid;
  for (const auto& p : pieces)
    for (const auto& name : free_term_vars(p)) avoid.insert(name);
  FreshGen gen(std::move(avoid));
  std::string i = gen.fresh("_i");
  std::string r = gen.fresh("_r");
  return {i, r};
}
}  // namespace detail

// pred: Rec with step (i, r) -> i, so pred(0)=0 and pred(n+1)=n.
inline TermPtr pred(TermPtr a) {
  auto [i, r] = detail::step_binders({a});
  return mk_rec(nat_type(), mk_zero(),
                lam(i, nat_type(), lam(r, nat_type(), v(i))), std::move(a));
}

// a + b: iterate succ b times starting from a.
inline TermPtr add(TermPtr a, TermPtr b) {
  auto [i, r] = detail::step_binders({a, b});
  return mk_rec(nat_type(), std::move(a),
                lam(i, nat_type(), lam(r, nat_type(), mk_succ(v(r)))),
                std::move(b));
}

// a ∸ b (truncated subtraction): iterate pred b times starting from a.
inline TermPtr monus(TermPtr a, TermPtr b) {
  auto [i, r] = detail::step_binders({a, b});
  return mk_rec(nat_type(), std::move(a),
                lam(i, nat_type(), lam(r, nat_type(), pred(v(r)))),
                std::move(b));
}

// a * b: add a, b times.
inline TermPtr mult(TermPtr a, TermPtr b) {
  auto [i, r] = detail::step_binders({a, b});
  return mk_rec(nat_type(), mk_zero(),
                lam(i, nat_type(), lam(r, nat_type(), add(v(r), a))),
                std::move(b));
}

// if c = 0 then z else nz (both branches of type Nat).
inline TermPtr ifz(TermPtr c, TermPtr z, TermPtr nz) {
  auto [i, r] = detail::step_binders({c, z, nz});
  return mk_rec(nat_type(), std::move(z),
                lam(i, nat_type(), lam(r, nat_type(), nz)), std::move(c));
}

// min(a,b) = a ∸ (a ∸ b).
inline TermPtr min2(TermPtr a, TermPtr b) { return monus(a, monus(a, b)); }

// max(a,b) = b + (a ∸ b).
inline TermPtr max2(TermPtr a, TermPtr b) { return add(b, monus(a, b)); }

inline TermPtr dbl(TermPtr a) { return add(a, a); }

}  // namespace build
}  // namespace nsa
