#include <doctest.h>

#include "nsa/errors.hpp"
#include "nsa/interp.hpp"
#include "nsa/printer.hpp"
#include "nsa/verify.hpp"
#include "testutil.hpp"

using namespace nsa;
using namespace nsa::testutil;

#define CHECK_FAILS_WITH(expr, expected_code)            \
  do {                                                   \
    bool threw_ = false;                                 \
    try {                                                \
      (void)(expr);                                      \
    } catch (const Error& e_) {                          \
      threw_ = true;                                     \
      CHECK(e_.code() == expected_code);                 \
    }                                                    \
    CHECK_MESSAGE(threw_, "expected " << expected_code); \
  } while (0)

namespace {

// 1/16 grid on [0,1]: R has 17 elements labeled 0/16 .. 16/16.
std::string grid_interp_text(int K, int M, const std::string& cf_values) {
  std::string labels;
  for (int i = 0; i <= 16; ++i) labels += " " + std::to_string(i) + "/16";
  return "sort R 17" + labels +
         "\n"
         "cutoff K=" +
         std::to_string(K) + " M=" + std::to_string(M) +
         "\n"
         "fun cf R R " +
         cf_values +
         "\n"
         "atom lt-inv rule (< (* (abs (- $0 $1)) $2) 1)\n";
}

std::string identity_values() {
  std::string s;
  for (int i = 0; i <= 16; ++i) s += (i ? " " : "") + std::to_string(i);
  return s;
}

// Normal form of pointwise continuity of cf at precision k with modulus N.
NormalForm continuity_nf() {
  return formula_to_normal_form(parse_f(
      "(forall-st (x R) (forall-st (k Nat) (exists-st (N Nat) "
      "(forall (y R) (imp (atom lt-inv x y N) "
      "(atom lt-inv (app cf x) (app cf y) k))))))"));
}

}  // namespace

TEST_SUITE("verify") {
  TEST_CASE("rational parsing and printing") {
    CHECK(parse_rational("3") == Rat(3));
    CHECK(parse_rational("-1/2") == Rat(-1, 2));
    CHECK(parse_rational("7/16") == Rat(7, 16));
    CHECK(rat_to_string(Rat(5, 10)) == "1/2");
    CHECK(rat_to_string(Rat(4)) == "4");
    CHECK_FAILS_WITH(parse_rational("x"), "SyntaxError");
    CHECK_FAILS_WITH(parse_rational("1/0"), "SyntaxError");
  }

  TEST_CASE("interpretation files parse and validate") {
    Interp in = parse_interp(grid_interp_text(2, 16, identity_values()));
    CHECK(in.K == 2);
    CHECK(in.M == 16);
    CHECK(in.sorts.at("R").size == 17);
    CHECK(in.sorts.at("R").labels[4] == Rat(1, 4));
    CHECK(in.carrier_size(nat_type()) == 17);
    CHECK(in.carrier_size(sort_type("R")) == 17);
    CHECK(in.standard_size(nat_type()) == 3);
    CHECK(in.label(sort_type("R"), 8) == Rat(1, 2));

    CHECK_FAILS_WITH(parse_interp("cutoff K=3 M=3\n"), "SyntaxError");
    CHECK_FAILS_WITH(parse_interp("cutoff K=1 M=2\nsort R 2 1/2\n"), "SyntaxError");
    CHECK_FAILS_WITH(parse_interp("cutoff K=1 M=2\natom p table 012\n"), "SyntaxError");
    CHECK_FAILS_WITH(parse_interp("sort R 3\n"), "SyntaxError");
    CHECK_FAILS_WITH(parse_interp("cutoff K=1 M=2\nfun cf R R 0 1\n"), "UnknownSort");
    // fun value outside the result carrier
    CHECK_FAILS_WITH(
        parse_interp("cutoff K=1 M=2\nsort R 2\nfun cf R R 0 5\n"), "IndexOutOfRange");
  }

  TEST_CASE("atom truth via rules and tables") {
    SymbolTable tab = test_table();
    Interp in = parse_interp(grid_interp_text(2, 16, identity_values()));
    // |0/16 - 3/16| * 5 = 15/16 < 1
    CHECK(atom_truth(in, tab, "lt-inv", {0, 3, 5}));
    // |0/16 - 4/16| * 5 = 20/16 >= 1
    CHECK_FALSE(atom_truth(in, tab, "lt-inv", {0, 4, 5}));
    // k = 0 makes the product 0
    CHECK(atom_truth(in, tab, "lt-inv", {0, 16, 0}));

    Interp small = parse_interp(
        "cutoff K=1 M=3\n"
        "atom phi table 1010101010101010\n");
    // Row-major over (Nat, Nat) with M=3: phi(i,j) = table[4*i+j].
    CHECK(atom_truth(small, tab, "phi", {0, 0}));
    CHECK_FALSE(atom_truth(small, tab, "phi", {0, 1}));
    CHECK(atom_truth(small, tab, "phi", {1, 2}));
    CHECK_FALSE(atom_truth(small, tab, "phi", {2, 9}));  // out of carrier: false
    CHECK_FAILS_WITH(atom_truth(small, tab, "tri", {0, 0, 0}), "UndecidableAtom");
    CHECK_FAILS_WITH(atom_truth(small, tab, "phi", {0}), "TypeMismatch");
  }

  TEST_CASE("interpreted constants feed the term evaluator") {
    SymbolTable tab = test_table();
    Interp in = parse_interp(
        "sort R 3\n"
        "cutoff K=1 M=4\n"
        "const cn Nat 3\n"
        "const xa R 2\n"
        "fun cf R R 2 0 1\n"
        "fun cseq Nat R 0 1 2 2 2\n");
    EnvPtr env = interp_const_env(in, tab, nullptr);
    std::uint64_t steps = 1000;
    CHECK(eval(parse_t("cn"), env, steps)->num == 3);
    CHECK(eval(parse_t("xa"), env, steps)->num == 2);
    CHECK(eval(parse_t("(app cf xa)"), env, steps)->num == 1);
    CHECK(eval(parse_t("(app cseq 4)"), env, steps)->num == 2);
    CHECK_FAILS_WITH(eval(parse_t("(app cseq 9)"), env, steps), "IndexOutOfRange");
  }

  TEST_CASE("cutoff evaluation: standardness and quantifiers") {
    SymbolTable tab = test_table();
    Interp in = parse_interp("cutoff K=1 M=3\natom phi table 1111111111111111\n");
    std::uint64_t steps = kDefaultStepBudget;
    auto ev = [&](const std::string& s) {
      return eval_formula_cutoff(parse_f(s), nullptr, in, tab, steps);
    };
    CHECK(ev("(st 1)"));
    CHECK_FALSE(ev("(st 2)"));
    CHECK(ev("(forall (n Nat) (le0 n 3))"));
    CHECK_FALSE(ev("(forall (n Nat) (le0 n 2))"));
    CHECK(ev("(exists (n Nat) (eq0 n 3))"));
    CHECK_FALSE(ev("(exists (n Nat) (eq0 n 4))"));
    CHECK(ev("(forall-st (n Nat) (le0 n 1))"));
    CHECK(ev("(exists-st (n Nat) (eq0 n 1))"));
    CHECK_FALSE(ev("(exists-st (n Nat) (eq0 n 2))"));
    // A standard sequence has standard entries and length at most K+1.
    CHECK(ev("(st (cons 1 (nil Nat)))"));
    CHECK_FALSE(ev("(st (cons 2 (nil Nat)))"));
    CHECK(ev("(exists-st (xs (Seq Nat)) (eq0 (len xs) 2))"));
    CHECK_FALSE(ev("(exists-st (xs (Seq Nat)) (eq0 (len xs) 3))"));
    CHECK_FALSE(
        ev("(exists-st (xs (Seq Nat)) (and (le0 1 (len xs)) (eq0 (idx xs 0) 2)))"));
    CHECK_FAILS_WITH(ev("(forall (xs (Seq Nat)) (le0 (len xs) 9))"),
                     "SizeBudgetExceeded");
  }

  TEST_CASE("strip_standard builds the bounded internal sentence") {
    SymbolTable tab = test_table();
    NormalForm nf = continuity_nf();
    std::map<std::string, TermPtr> w;
    w["N"] = parse_t("(lam (x R) (lam (k Nat) (cons k (nil Nat))))");
    FormulaPtr s = strip_standard(nf, w, tab);
    CHECK(classify_internal(s));
    // Shape: (forall x)(forall k)(exists i)(and (le0 ...) ...)
    CHECK(s->kind == Formula::Kind::Forall);
    CHECK(s->f0->kind == Formula::Kind::Forall);
    CHECK(s->f0->f0->kind == Formula::Kind::Exists);
    std::string printed = print_formula(s);
    TermPtr applied = mk_apps(w["N"], {mk_var("x"), mk_var("k")});
    CHECK(printed.find("(le0 (succ i) (len " + print_term(applied) + "))") !=
          std::string::npos);

    std::map<std::string, TermPtr> none;
    CHECK_FAILS_WITH(strip_standard(nf, none, tab), "MissingWitness");
    std::map<std::string, TermPtr> open;
    open["N"] = parse_t("(cons z (nil Nat))");
    CHECK_FAILS_WITH(strip_standard(nf, open, tab), "OpenWitness");
    std::map<std::string, TermPtr> wrong;
    wrong["N"] = parse_t("(lam (k Nat) (cons k (nil Nat)))");
    CHECK_FAILS_WITH(strip_standard(nf, wrong, tab), "TypeMismatch");
  }

  TEST_CASE("check_witness accepts a correct modulus and counts instances") {
    SymbolTable tab = test_table();
    Interp in = parse_interp(grid_interp_text(2, 16, identity_values()));
    NormalForm nf = continuity_nf();
    std::map<std::string, TermPtr> w;
    w["N"] = parse_t("(lam (x R) (lam (k Nat) (cons k (nil Nat))))");
    auto rep = check_witness(strip_standard(nf, w, tab), in, tab);
    CHECK(rep.pass());
    CHECK(rep.checked == 17 * 17);
    CHECK(rep.checked == rep.closed_form);
    CHECK(rep.exhaustive);
    CHECK(rep.steps_used > 0);
  }

  TEST_CASE("check_witness pinpoints a mutated witness") {
    SymbolTable tab = test_table();
    Interp in = parse_interp(grid_interp_text(2, 16, identity_values()));
    NormalForm nf = continuity_nf();
    std::map<std::string, TermPtr> w;
    // N = 0 never constrains x,y, so the matrix must fail at large k.
    w["N"] = parse_t("(lam (x R) (lam (k Nat) (cons 0 (nil Nat))))");
    auto rep = check_witness(strip_standard(nf, w, tab), in, tab);
    CHECK_FALSE(rep.pass());
    CHECK(rep.checked == 17 * 17);
    bool found = false;
    for (const auto& f : rep.failures)
      if (f.assignment.find("k=16") != std::string::npos) found = true;
    CHECK(found);
  }

  TEST_CASE("check_witness refuses non-internal or undecidable input") {
    SymbolTable tab = test_table();
    Interp in = parse_interp("cutoff K=1 M=2\n");
    CHECK_FAILS_WITH(check_witness(parse_f("(st 1)"), in, tab), "NotInFragment");
    CHECK_FAILS_WITH(check_witness(parse_f("(atom phi 0 0)"), in, tab), "UndecidableAtom");
    // abs-lt-inv is declared without :decidable
    Interp in2 = parse_interp(
        "sort R 2\ncutoff K=1 M=2\natom abs-lt-inv table 1111\n");
    CHECK_FAILS_WITH(check_witness(parse_f("(atom abs-lt-inv xa 1)"), in2, tab),
                     "UndecidableAtom");
  }

  TEST_CASE("schema sweep: valid schemas pass exhaustively") {
    auto rep = cutoff_check("idealisation", {{1, 3, 1}});
    CHECK(rep.pass());
    CHECK(rep.exhaustive);
    CHECK(rep.checked == 16);  // 2^4 unary tables over {0..3}
    CHECK(rep.checked == rep.closed_form);

    CHECK(cutoff_check("ncr", {{1, 2, 1}}).pass());
    CHECK(cutoff_check("hac", {{1, 2, 1}}).pass());
    CHECK(cutoff_check("hac", {{2, 3, 1}}).pass());
    CHECK(cutoff_check("hgmp", {{1, 2, 1}}).pass());
    CHECK(cutoff_check("hgmp", {{1, 2, 2}}).pass());
    CHECK(cutoff_check("hip", {{1, 2, 1}}).pass());
    CHECK(cutoff_check("qf-ac", {{1, 2, 2}}).pass());
    CHECK(cutoff_check("idealisation", {{2, 3, 1}}).pass());
  }

  TEST_CASE("schema sweep: transfer fails at the pinned counterexample") {
    auto rep = cutoff_check("transfer", {{1, 3, 1}});
    CHECK_FALSE(rep.pass());
    bool pinned = false;
    for (const auto& f : rep.failures)
      if (f.assignment.find("p=1100") != std::string::npos) pinned = true;
    CHECK(pinned);  // the table holding exactly on {0,1} with K=1, M=3
  }

  TEST_CASE("schema sweep: overspill fails on the cutoff cut table") {
    auto rep = cutoff_check("os", {{1, 2, 1}});
    CHECK_FALSE(rep.pass());
    bool pinned = false;
    for (const auto& f : rep.failures)
      if (f.assignment.find("p=110") != std::string::npos) pinned = true;
    CHECK(pinned);  // st is the decidable cut [x <= K] in this harness
  }

  TEST_CASE("schema sweep: sampled configurations stay deterministic") {
    auto rep1 = cutoff_check("transfer", {{1, 4, 2}});
    auto rep2 = cutoff_check("transfer", {{1, 4, 2}});
    CHECK_FALSE(rep1.pass());
    CHECK_FALSE(rep1.exhaustive);
    CHECK(rep1.checked == rep2.checked);
    CHECK(rep1.failures.size() == rep2.failures.size());
    CHECK(rep1.checked == rep1.closed_form);
  }

  TEST_CASE("brute-force modulus matches the hand-computed values") {
    SymbolTable tab = test_table();
    NormalForm nf = continuity_nf();
    // Identity on the 1/16 grid at precision k=4: least modulus is 4.
    Interp id = parse_interp(grid_interp_text(2, 16, identity_values()));
    CHECK(brute_force_modulus(nf, "k", 4, id, tab) == 4);
    // Constant function: any modulus works, so the least is 1.
    std::string zeros;
    for (int i = 0; i <= 16; ++i) zeros += (i ? " 0" : "0");
    Interp cst = parse_interp(grid_interp_text(2, 16, zeros));
    CHECK(brute_force_modulus(nf, "k", 4, cst, tab) == 1);
    // A jump at 0 with the modulus range capped below the grid resolution.
    std::string jump = "0";
    for (int i = 1; i <= 16; ++i) jump += " 16";
    Interp jmp = parse_interp(grid_interp_text(2, 8, jump));
    CHECK_FAILS_WITH(brute_force_modulus(nf, "k", 1, jmp, tab), "NoModulusExists");

    NormalForm bad = continuity_nf();
    bad.exist_block.push_back({"N2", nat_type()});
    CHECK_FAILS_WITH(brute_force_modulus(bad, "k", 4, id, tab), "PatternMismatch");
    CHECK_FAILS_WITH(brute_force_modulus(nf, "zz", 4, id, tab), "PatternMismatch");
  }
}
