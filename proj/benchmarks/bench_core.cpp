#include <benchmark/benchmark.h>

#include <string>

#include "nsa/build.hpp"
#include "nsa/eval.hpp"
#include "nsa/extract.hpp"
#include "nsa/interp.hpp"
#include "nsa/parser.hpp"
#include "nsa/printer.hpp"
#include "nsa/rewrite.hpp"
#include "nsa/syntax.hpp"
#include "nsa/verify.hpp"

namespace B = nsa::build;
using nsa::Mode;

namespace {

const char* kContinuitySource = R"(
(declare-sort R)
(declare-const f (-> R R))
(declare-atom lt-inv (R R Nat) :decidable :antitone 2)
(forall-st (x R) (forall (y R)
  (imp (approx x y) (approx (app f x) (app f y)))))
)";

const char* kBayesSource = R"(
(declare-sort E1)
(declare-sort E2)
(declare-sort R)
(declare-const P1 (-> E1 R))
(declare-const P2 (-> E2 R))
(declare-const PC (-> E1 (-> E2 R)))
(declare-const zero R)
(declare-atom lt-inv (R R Nat) :decidable :antitone 2)
(forall (A E1) (forall (B E2)
  (imp (and (approx (app P1 A) zero) (not (approx (app P2 B) zero)))
       (approx (app (app PC A) B) zero))))
)";

const char* kNfA = R"(
(declare-sort S)
(declare-sort T)
(declare-sort U)
(declare-sort V)
(declare-atom phi (S T) :decidable)
(declare-atom psi (U V) :decidable)
(forall-st (x S) (exists-st (y T) (atom phi x y)))
)";

const char* kNfB = R"(
(declare-sort S)
(declare-sort T)
(declare-sort U)
(declare-sort V)
(declare-atom phi (S T) :decidable)
(declare-atom psi (U V) :decidable)
(forall-st (z U) (exists-st (w V) (atom psi z w)))
)";

// Identity function on an n+1 point grid; the witness is the precision itself.
std::string identity_grid(int n) {
  std::string text = "sort R " + std::to_string(n + 1);
  for (int i = 0; i <= n; ++i)
    text += " " + std::to_string(i) + "/" + std::to_string(n);
  text += "\ncutoff K=2 M=" + std::to_string(n);
  text += "\natom lt-inv rule (< (* (abs (- $0 $1)) $2) 1)\nfun f R R";
  for (int i = 0; i <= n; ++i) text += " " + std::to_string(i);
  text += "\n";
  return text;
}

const char* kContinuityNf = R"(
(declare-sort R)
(declare-const f (-> R R))
(declare-atom lt-inv (R R Nat) :decidable :antitone 2)
(forall-st (x R) (forall-st (k Nat) (exists-st (N Nat)
  (forall (y R) (imp (atom lt-inv x y N)
                     (atom lt-inv (app f x) (app f y) k))))))
)";

void BM_NormalizePipeline(benchmark::State& state, const char* text) {
  nsa::ParsedFormulaFile src = nsa::parse_formula_file(text);
  for (auto _ : state) {
    nsa::Rewriter rw(src.table, Mode::P);
    benchmark::DoNotOptimize(rw.normalize_to_normal_form(src.formula));
  }
}
BENCHMARK_CAPTURE(BM_NormalizePipeline, continuity, kContinuitySource);
BENCHMARK_CAPTURE(BM_NormalizePipeline, bayes, kBayesSource);

static void BM_NfImplication(benchmark::State& state) {
  nsa::ParsedFormulaFile fa = nsa::parse_formula_file(kNfA);
  nsa::ParsedFormulaFile fb = nsa::parse_formula_file(kNfB);
  nsa::NormalForm a = nsa::formula_to_normal_form(fa.formula);
  nsa::NormalForm b = nsa::formula_to_normal_form(fb.formula);
  for (auto _ : state) {
    nsa::Rewriter rw(fa.table, Mode::P);
    benchmark::DoNotOptimize(rw.nf_implication(a, b));
  }
}
BENCHMARK(BM_NfImplication);

static void BM_FactorialRec(benchmark::State& state) {
  nsa::TermPtr step = B::lam(
      "i", nsa::nat_type(),
      B::lam("r", nsa::nat_type(), B::mult(nsa::mk_succ(B::v("i")), B::v("r"))));
  nsa::TermPtr fact =
      nsa::mk_rec(nsa::nat_type(), nsa::mk_num(1), step,
                  nsa::mk_num(static_cast<std::uint64_t>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nsa::normalize(fact));
  }
}
BENCHMARK(BM_FactorialRec)->Arg(4)->Arg(6)->Arg(8);

static void BM_BoundedMu(benchmark::State& state) {
  // Least zero of 7 monus n, searched up to the bound under test.
  nsa::TermPtr f = B::lam("n", nsa::nat_type(),
                          B::monus(B::n(7), B::v("n")));
  nsa::TermPtr probe =
      B::app(nsa::bounded_mu_term(static_cast<int>(state.range(0))), f);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nsa::normalize(probe));
  }
}
BENCHMARK(BM_BoundedMu)->Arg(8)->Arg(32);

static void BM_CheckWitness(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  nsa::ParsedFormulaFile nf = nsa::parse_formula_file(kContinuityNf);
  std::map<std::string, nsa::TermPtr> witnesses;
  witnesses["N"] = B::lam(
      "x", nsa::sort_type("R"),
      B::lam("k", nsa::nat_type(),
             nsa::mk_cons(B::v("k"), nsa::mk_nil(nsa::nat_type()))));
  nsa::FormulaPtr sentence = nsa::strip_standard(
      nsa::formula_to_normal_form(nf.formula), witnesses, nf.table);
  nsa::Interp in = nsa::parse_interp(identity_grid(n));
  for (auto _ : state) {
    benchmark::DoNotOptimize(nsa::check_witness(sentence, in, nf.table));
  }
  state.SetItemsProcessed(state.iterations() * (n + 1) * (n + 1));
}
BENCHMARK(BM_CheckWitness)->Arg(8)->Arg(16);

static void BM_SchemaCutoff(benchmark::State& state) {
  int m = static_cast<int>(state.range(0));
  std::vector<nsa::SchemaSize> sizes = {{1, m, 1}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(nsa::cutoff_check("hac", sizes));
  }
}
BENCHMARK(BM_SchemaCutoff)->Arg(3)->Arg(4)->Arg(5);

static void BM_ParsePrintRoundtrip(benchmark::State& state) {
  std::string text = kBayesSource;
  for (auto _ : state) {
    nsa::ParsedFormulaFile p = nsa::parse_formula_file(text);
    benchmark::DoNotOptimize(
        nsa::print_formula_file(p.table, p.formula));
  }
}
BENCHMARK(BM_ParsePrintRoundtrip);

}  // namespace

BENCHMARK_MAIN();
