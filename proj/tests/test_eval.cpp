#include <doctest.h>

#include <random>

#include "nsa/build.hpp"
#include "nsa/errors.hpp"
#include "nsa/eval.hpp"
#include "nsa/parser.hpp"
#include "nsa/printer.hpp"
#include "testutil.hpp"

using namespace nsa;
using namespace nsa::testutil;
namespace B = nsa::build;

namespace {
std::uint64_t eval_num(const TermPtr& t) {
  ValuePtr v = normalize(t);
  REQUIRE(v->kind == Value::Kind::Num);
  return v->num;
}

std::string code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}
}  // namespace

TEST_SUITE("eval") {

TEST_CASE("recursor satisfies both defining equations") {
  // Base: rec at index 0 is the base term.
  TermPtr step = parse_t("(lam (i Nat) (lam (r Nat) (succ (succ r))))");
  CHECK(eval_num(mk_rec(nat_type(), mk_num(5), step, mk_zero())) == 5);
  // Step: rec at n+1 equals step n (rec at n).
  for (std::uint64_t n = 0; n < 6; ++n) {
    TermPtr lhs = mk_rec(nat_type(), mk_num(5), step, mk_num(n + 1));
    TermPtr rhs =
        mk_app(mk_app(step, mk_num(n)),
               mk_rec(nat_type(), mk_num(5), step, mk_num(n)));
    CHECK(eval_num(lhs) == eval_num(rhs));
  }
}

TEST_CASE("factorial via nested recursors evaluates to 24") {
  // step i r = (i+1) * r, so rec 1 step 4 = 4!.
  TermPtr step =
      B::lam("i", nat_type(),
             B::lam("r", nat_type(), B::mult(mk_succ(B::v("i")), B::v("r"))));
  CHECK(eval_num(mk_rec(nat_type(), mk_num(1), step, mk_num(4))) == 24);
}

TEST_CASE("list operations: length, concatenation, indexing, prefix") {
  CHECK(eval_num(parse_t(
            "(len (append (cons 0 (cons 1 (nil Nat))) (cons 2 (nil Nat))))")) ==
        3);
  CHECK(eval_num(parse_t(
            "(idx (append (cons 0 (cons 1 (nil Nat))) (cons 2 (nil Nat))) 2)")) ==
        2);
  ValuePtr pre = normalize(parse_t("(prefix (cons 4 (cons 5 (cons 6 (nil Nat)))) 2)"));
  CHECK(print_term(value_to_term(pre)) == "(cons 4 (cons 5 (nil Nat)))");
  // Prefix clamps to the available length.
  ValuePtr pre2 = normalize(parse_t("(prefix (cons 4 (nil Nat)) 9)"));
  REQUIRE(pre2->kind == Value::Kind::Seq);
  CHECK(pre2->elems.size() == 1);
  CHECK(code_of([] { normalize(parse_t("(idx (cons 1 (nil Nat)) 3)")); }) ==
        "IndexOutOfRange");
}

TEST_CASE("max of a list, with the empty list mapping to zero") {
  CHECK(eval_num(parse_t("(max (cons 3 (cons 7 (cons 2 (nil Nat)))))")) == 7);
  CHECK(eval_num(parse_t("(max (nil Nat))")) == 0);
  CHECK(eval_num(parse_t("(max (cons 5 (nil Nat)))")) == 5);
  // max_of_list builds a term usable under binders.
  SymbolTable tab = test_table();
  TermPtr open = max_of_list(mk_var("s"), {{"s", seq_type(nat_type())}}, tab);
  CHECK(eval_num(subst_term(open, "s", parse_t("(cons 1 (cons 9 (nil Nat)))"))) ==
        9);
  CHECK(code_of([&] { max_of_list(parse_t("(cons xa (nil R))"), {}, tab); }) ==
        "IllTyped");
}

TEST_CASE("apply_closed equals normalization of the iterated application") {
  CHECK(eval_num(mk_apps(parse_t("(lam (x Nat) (succ x))"), {mk_num(4)})) == 5);
  ValuePtr v = apply_closed(parse_t("(lam (x (Seq Nat)) x)"),
                            {parse_t("(cons 1 (cons 2 (nil Nat)))")});
  REQUIRE(v->kind == Value::Kind::Seq);
  CHECK(v->elems.size() == 2);
  CHECK(v->elems[0]->num == 1);
  CHECK(v->elems[1]->num == 2);
}

TEST_CASE("open terms and ill-typed applications are diagnosed") {
  CHECK(code_of([] { normalize(mk_var("loose")); }) == "OpenTerm");
  CHECK(code_of([] { normalize(parse_t("(app 3 4)")); }) == "IllTyped");
  CHECK(code_of([] { normalize(parse_t("(succ (nil Nat))")); }) == "IllTyped");
}

TEST_CASE("arithmetic combinators compute the expected values") {
  CHECK(eval_num(B::add(B::n(3), B::n(4))) == 7);
  CHECK(eval_num(B::mult(B::n(3), B::n(4))) == 12);
  CHECK(eval_num(B::monus(B::n(3), B::n(5))) == 0);
  CHECK(eval_num(B::monus(B::n(5), B::n(3))) == 2);
  CHECK(eval_num(B::pred(B::n(0))) == 0);
  CHECK(eval_num(B::pred(B::n(9))) == 8);
  CHECK(eval_num(B::ifz(B::n(0), B::n(3), B::n(4))) == 3);
  CHECK(eval_num(B::ifz(B::n(2), B::n(3), B::n(4))) == 4);
  CHECK(eval_num(B::min2(B::n(3), B::n(5))) == 3);
  CHECK(eval_num(B::max2(B::n(3), B::n(5))) == 5);
  CHECK(eval_num(B::dbl(B::n(6))) == 12);
  // Capture safety: the second operand mentions a variable named like the
  // internal step binders.
  TermPtr tricky = B::lam("_r", nat_type(), B::add(B::v("_r"), B::n(1)));
  CHECK(eval_num(B::app(tricky, B::n(5))) == 6);
}

TEST_CASE("randomized second recursor equation") {
  std::mt19937 rng(987654321);
  std::uniform_int_distribution<int> small(0, 8);
  for (int trial = 0; trial < 200; ++trial) {
    std::uint64_t base = small(rng);
    std::uint64_t a = small(rng), b = small(rng);
    std::uint64_t n = small(rng);
    // step i r = a*i + b + r, a deterministic pseudo-random linear step.
    TermPtr step = B::lam(
        "i", nat_type(),
        B::lam("r", nat_type(),
               B::add(B::add(B::mult(B::n(a), B::v("i")), B::n(b)),
                      B::v("r"))));
    TermPtr lhs = mk_rec(nat_type(), mk_num(base), step, mk_num(n + 1));
    TermPtr rhs = mk_app(mk_app(step, mk_num(n)),
                         mk_rec(nat_type(), mk_num(base), step, mk_num(n)));
    CHECK(eval_num(lhs) == eval_num(rhs));
  }
}

TEST_CASE("determinism and closure printing") {
  TermPtr t = parse_t("(app (lam (x Nat) (app (lam (y Nat) x) 0)) 8)");
  CHECK(eval_num(t) == 8);
  CHECK(eval_num(t) == 8);
  ValuePtr f = normalize(parse_t("(app (lam (k Nat) (lam (x Nat) k)) 3)"));
  REQUIRE(f->kind == Value::Kind::Closure);
  CHECK(print_term(value_to_term(f)) == "(lam (x Nat) 3)");
}

}  // TEST_SUITE
