#include <doctest.h>

#include "nsa/errors.hpp"
#include "nsa/eval.hpp"
#include "nsa/extract.hpp"
#include "nsa/interp.hpp"
#include "nsa/printer.hpp"
#include "nsa/verify.hpp"
#include "testutil.hpp"

using namespace nsa;
using namespace nsa::testutil;

#define CHECK_FAILS_WITH(expr, expected_code)                        \
  do {                                                               \
    bool threw_ = false;                                             \
    try {                                                            \
      (void)(expr);                                                  \
    } catch (const Error& e_) {                                      \
      threw_ = true;                                                 \
      CHECK_MESSAGE(e_.code() == expected_code,                      \
                    "got " << e_.code() << ": " << e_.what());       \
    }                                                                \
    CHECK_MESSAGE(threw_, "expected failure " << expected_code);     \
  } while (0)

namespace {

const char* kContinuityScript = R"(
(declare-sort R)
(declare-const cf (-> R R))
(declare-atom lt-inv (R R Nat) :decidable :antitone 2)
(script cont
  (mode P)
  (source (forall-st (x R) (forall-st (k Nat) (exists-st (N Nat)
    (forall (y R) (imp (atom lt-inv x y N)
                       (atom lt-inv (app cf x) (app cf y) k)))))))
  (steps (supply N (lam (x R) (lam (k Nat) (cons k (nil Nat))))))
  (conclusion (forall-st (x R) (forall-st (k Nat) (exists-st (N Nat)
    (forall (y R) (imp (atom lt-inv x y N)
                       (atom lt-inv (app cf x) (app cf y) k))))))))
)";

const char* kComposeScript = R"(
(script compose
  (mode P)
  (source (forall-st (k Nat) (exists-st (n Nat) (le0 k n))))
  (premise step-up
    (implication (forall-st (k Nat) (exists-st (n Nat) (le0 k n)))
                 (forall-st (m Nat) (exists-st (w Nat) (le0 (succ m) w))))
    (witness w (lam (z (-> Nat Nat))
                 (lam (m Nat) (cons (succ (app z m)) (nil Nat))))))
  (steps (supply n (lam (k Nat) (cons k (nil Nat))))
         (mp step-up))
  (conclusion (forall-st (m Nat) (exists-st (w Nat) (le0 (succ m) w)))))
)";

// F(i) = 3 monus i: zero exactly from i = 3 on, so the least zero is 3.
const char* kStepFn =
    "(lam (i Nat) (rec Nat 3 (lam (j Nat) (lam (r Nat) "
    "(rec Nat 0 (lam (j2 Nat) (lam (r2 Nat) j2)) r))) i))";

std::string find_zero_script() {
  std::string f = kStepFn;
  return "(script find-zero\n"
         "  (mode P)\n"
         "  (oracles MU2)\n"
         "  (source (exists-st (N Nat) (eq0 (app " + f + " N) 0)))\n"
         "  (steps (oracle MU2)\n"
         "         (supply N (cons (app mu " + f + ") (nil Nat))))\n"
         "  (conclusion (exists-st (N Nat) (eq0 (app " + f + " N) 0))))\n";
}

std::string grid_interp(int K, int M) {
  std::string labels, values;
  for (int i = 0; i <= 16; ++i) {
    labels += " " + std::to_string(i) + "/16";
    values += (i ? " " : "") + std::to_string(i);
  }
  return "sort R 17" + labels + "\ncutoff K=" + std::to_string(K) +
         " M=" + std::to_string(M) + "\nfun cf R R " + values +
         "\natom lt-inv rule (< (* (abs (- $0 $1)) $2) 1)\n";
}

std::uint64_t run_nat(const TermPtr& f, std::uint64_t a) {
  ValuePtr v = apply_closed(f, {mk_num(a)});
  REQUIRE(v->kind == Value::Kind::Num);
  return v->num;
}

}  // namespace

TEST_SUITE("extract") {
  TEST_CASE("script files parse, print, and reparse") {
    ProofScript s = parse_script(kComposeScript);
    CHECK(s.name == "compose");
    CHECK(s.mode == Mode::P);
    CHECK(s.premises.size() == 1);
    CHECK(s.premises[0].name == "step-up");
    CHECK(s.premises[0].witnesses.count("w") == 1);
    CHECK(s.steps.size() == 2);
    CHECK(s.steps[0].kind == ScriptStep::Kind::Supply);
    CHECK(s.steps[1].kind == ScriptStep::Kind::Mp);

    ProofScript s2 = parse_script(script_to_string(s));
    CHECK(s2.name == s.name);
    CHECK(alpha_eq(s2.source, s.source));
    CHECK(alpha_eq(s2.conclusion, s.conclusion));
    CHECK(alpha_eq(s2.premises[0].witnesses.at("w"),
                   s.premises[0].witnesses.at("w")));
    CHECK(s2.steps.size() == s.steps.size());
  }

  TEST_CASE("script parse errors carry positions") {
    CHECK_FAILS_WITH(parse_script("(script s (mode P) (conclusion (le0 0 1)))"),
                     "SyntaxError");  // no source
    CHECK_FAILS_WITH(parse_script("(script s (mode P) (source (le0 0 1)))"),
                     "SyntaxError");  // no conclusion
    CHECK_FAILS_WITH(
        parse_script("(script s (source (le0 0 1)) (wat) (conclusion (le0 0 1)))"),
        "SyntaxError");
    CHECK_FAILS_WITH(parse_script("(script s (source (le0 0 1)) "
                                  "(steps (poke)) (conclusion (le0 0 1)))"),
                     "SyntaxError");
    CHECK_FAILS_WITH(parse_script("(script s (source (le0 0 1)) "
                                  "(steps (rewrite nnf)) (conclusion (le0 0 1)))"),
                     "SyntaxError");  // rewrite needs a path list
    CHECK_FAILS_WITH(parse_script("(script s (source (le0 0 1)) "
                                  "(conclusion (le0 0 1))) (le0 0 1)"),
                     "SyntaxError");  // trailing form
    CHECK_FAILS_WITH(parse_script("(script s (premise p (le0 0 1)) "
                                  "(source (le0 0 1)) (conclusion (le0 0 1)))"),
                     "SyntaxError");  // premise needs an implication
  }

  TEST_CASE("already-internal source with no steps passes through") {
    ProofScript s = parse_script(
        "(script triv (mode P) (source (le0 0 1)) (conclusion (le0 0 1)))");
    ExtractionResult r = run_script(s);
    CHECK(r.witnesses.empty());
    CHECK(r.conclusion_nf.univ_block.empty());
    CHECK(r.conclusion_nf.exist_block.empty());
    CHECK(alpha_eq(r.internal_sentence, s.source));
    CHECK(r.oracle_parameters.empty());

    // Reversal of the trivial result is a no-op round trip.
    ProofScript back = reverse_direction(r);
    ExtractionResult r2 = run_script(back);
    CHECK(normal_form_equal(r2.conclusion_nf, r.conclusion_nf));
  }

  TEST_CASE("supplied witnesses produce a bounded internal sentence") {
    ExtractionResult r = run_script(parse_script(kContinuityScript));
    CHECK(r.name == "cont");
    REQUIRE(r.witnesses.count("N") == 1);
    CHECK(r.conclusion_nf.univ_block.size() == 2);
    CHECK(r.conclusion_nf.exist_block.size() == 1);
    REQUIRE(r.internal_sentence);
    CHECK(classify_internal(r.internal_sentence));
    CHECK(r.internal_sentence->kind == Formula::Kind::Forall);
    CHECK(r.internal_sentence->f0->kind == Formula::Kind::Forall);
    CHECK(r.trace.steps.size() == 1);

    Interp in = parse_interp(grid_interp(2, 16));
    ProofScript s = parse_script(kContinuityScript);
    VerificationReport rep = check_witness(r.internal_sentence, in, s.tab);
    CHECK(rep.pass());
    CHECK(rep.checked == 17 * 17);
    CHECK(rep.exhaustive);
  }

  TEST_CASE("missing or open witnesses are rejected") {
    ProofScript s = parse_script(kContinuityScript);
    s.steps.clear();
    CHECK_FAILS_WITH(run_script(s), "MissingWitness");

    ProofScript open = parse_script(kContinuityScript);
    open.steps[0].terms[0] = parse_t("(cons q (nil Nat))");
    CHECK_FAILS_WITH(run_script(open), "OpenWitness");
  }

  TEST_CASE("a script must land on its declared conclusion") {
    ProofScript s = parse_script(kContinuityScript);
    s.conclusion = parse_formula(
        parse_sexp("(forall-st (k Nat) (exists-st (N Nat) (le0 k N)))"), s.tab);
    CHECK_FAILS_WITH(run_script(s), "StepInapplicable");
  }

  TEST_CASE("modus ponens composes lemma witnesses with current ones") {
    ExtractionResult r = run_script(parse_script(kComposeScript));
    REQUIRE(r.witnesses.count("w") == 1);
    const TermPtr& w = r.witnesses.at("w");

    // w(m) evaluates to the one-element list <m+1>.
    for (std::uint64_t m = 0; m <= 4; ++m) {
      ValuePtr v = apply_closed(w, {mk_num(m)});
      REQUIRE(v->kind == Value::Kind::Seq);
      REQUIRE(v->elems.size() == 1);
      CHECK(v->elems[0]->num == m + 1);
    }

    Interp in = parse_interp("cutoff K=1 M=3\n");
    ProofScript s = parse_script(kComposeScript);
    VerificationReport rep = check_witness(r.internal_sentence, in, s.tab);
    CHECK(rep.pass());
    CHECK(rep.checked == 4);
  }

  TEST_CASE("modus ponens failure modes") {
    // Applying the lemma before any witness for the antecedent exists.
    ProofScript s = parse_script(kComposeScript);
    std::swap(s.steps[0], s.steps[1]);
    CHECK_FAILS_WITH(run_script(s), "MissingWitness");

    // A premise whose antecedent does not match the current formula.
    ProofScript mism = parse_script(kComposeScript);
    mism.premises[0].a = parse_formula(
        parse_sexp("(forall-st (k Nat) (exists-st (n Nat) (le0 (succ k) n)))"),
        mism.tab);
    CHECK_FAILS_WITH(run_script(mism), "StepInapplicable");

    // A premise that forgot the witness for its consequent existential.
    ProofScript nowit = parse_script(kComposeScript);
    nowit.premises[0].witnesses.clear();
    CHECK_FAILS_WITH(run_script(nowit), "MissingWitness");

    // An unknown lemma name.
    ProofScript unk = parse_script(kComposeScript);
    unk.steps[1].head = "nope";
    CHECK_FAILS_WITH(run_script(unk), "StepInapplicable");
  }

  TEST_CASE("closure axioms manage the standard-term pool") {
    ProofScript s = parse_script(
        "(script pool (mode P) (source (le0 0 1))\n"
        "  (steps (axiom tstar-closed (lam (n Nat) (cons n (nil Nat))) (as g))\n"
        "         (axiom tstar-closed 2)\n"
        "         (axiom tstar-app (lam (n Nat) (cons n (nil Nat))) 2 (as g2))\n"
        "         (axiom tstar-eq)\n"
        "         (axiom ia-st 0 (lam (i Nat) (lam (r Nat) (succ r))) (as it)))\n"
        "  (conclusion (le0 0 1)))");
    ExtractionResult r = run_script(s);
    CHECK(r.trace.steps.size() == 5);

    ProofScript bad_app = parse_script(
        "(script pool (mode P) (source (le0 0 1))\n"
        "  (steps (axiom tstar-app 1 2))\n"
        "  (conclusion (le0 0 1)))");
    CHECK_FAILS_WITH(run_script(bad_app), "StepInapplicable");

    ProofScript open_term = parse_script(
        "(script pool (mode P) (source (le0 0 1))\n"
        "  (steps (axiom tstar-closed (cons q (nil Nat))))\n"
        "  (conclusion (le0 0 1)))");
    CHECK_FAILS_WITH(run_script(open_term), "OpenWitness");

    ProofScript bad_rec = parse_script(
        "(script pool (mode P) (source (le0 0 1))\n"
        "  (steps (axiom ia-st 0 (lam (i Nat) i)))\n"
        "  (conclusion (le0 0 1)))");
    CHECK_FAILS_WITH(run_script(bad_rec), "IllTypedInstantiation");

    ProofScript unknown = parse_script(
        "(script pool (mode P) (source (le0 0 1))\n"
        "  (steps (axiom frobnicate))\n"
        "  (conclusion (le0 0 1)))");
    CHECK_FAILS_WITH(run_script(unknown), "StepInapplicable");
  }

  TEST_CASE("quantifier-free choice axiom introduces a function") {
    ProofScript s = parse_script(
        "(script qfac (mode P)\n"
        "  (source (forall (x Nat) (exists (y Nat) (le0 x y))))\n"
        "  (steps (axiom qf-ac))\n"
        "  (conclusion (exists (f (-> Nat Nat)) (forall (x Nat) "
        "(le0 x (app f x))))))");
    ExtractionResult r = run_script(s);
    CHECK(r.conclusion_nf.univ_block.empty());
    CHECK(classify_internal(r.internal_sentence));
    CHECK(r.internal_sentence->kind == Formula::Kind::Exists);

    ProofScript bad = parse_script(
        "(script qfac (mode P)\n"
        "  (source (exists (y Nat) (le0 0 y)))\n"
        "  (steps (axiom qf-ac))\n"
        "  (conclusion (exists (y Nat) (le0 0 y))))");
    CHECK_FAILS_WITH(run_script(bad), "PatternMismatch");
  }

  TEST_CASE("rewrite steps drive the rewriter and are traced") {
    ProofScript s = parse_script(
        "(script ideal (mode P)\n"
        "  (source (forall-st (k Nat) (forall (y Nat) (exists-st (n Nat) "
        "(le0 y n)))))\n"
        "  (steps (rewrite ncr (0))\n"
        "         (supply ns (lam (k Nat) (cons (cons 0 (nil Nat)) "
        "(nil (Seq Nat))))))\n"
        "  (conclusion (forall-st (k Nat) (exists-st (ns (Seq Nat)) "
        "(forall (y Nat) (exists (i Nat) (and (le0 (succ i) (len ns)) "
        "(le0 y (idx ns i)))))))))");
    ExtractionResult r = run_script(s);
    CHECK(r.trace.steps.size() == 2);
    CHECK(r.trace.steps[0].rule == "ncr");
    CHECK(r.witnesses.count("ns") == 1);

    ProofScript wrong = parse_script(
        "(script modes (mode P) (source (le0 0 1))\n"
        "  (steps (rewrite hgmp ()))\n"
        "  (conclusion (le0 0 1)))");
    CHECK_FAILS_WITH(run_script(wrong), "WrongMode");

    ProofScript unknown = parse_script(
        "(script modes (mode P) (source (le0 0 1))\n"
        "  (steps (rewrite frobnicate ()))\n"
        "  (conclusion (le0 0 1)))");
    CHECK_FAILS_WITH(run_script(unknown), "StepInapplicable");
  }

  TEST_CASE("reversal re-derives the normal form from the internal sentence") {
    ExtractionResult r1 = run_script(parse_script(kContinuityScript));
    ProofScript back = reverse_direction(r1);
    CHECK(back.steps.size() == 3);
    CHECK(back.steps[0].head == "tstar-closed");
    CHECK(back.steps[1].head == "tstar-app");
    CHECK(back.steps[2].head == "nf-intro");
    REQUIRE(back.steps[2].path.size() == 1);
    CHECK(back.steps[2].path[0] == 2);

    ExtractionResult r2 = run_script(back);
    CHECK(normal_form_equal(r2.conclusion_nf, r1.conclusion_nf));
    CHECK(alpha_eq(normal_form_to_formula(r2.conclusion_nf),
                   normal_form_to_formula(r1.conclusion_nf)));
    REQUIRE(r2.witnesses.count("N") == 1);
    CHECK(alpha_eq(r2.witnesses.at("N"), r1.witnesses.at("N")));

    // The emitted script also survives a trip through its text form.
    ProofScript reparsed = parse_script(script_to_string(back));
    ExtractionResult r3 = run_script(reparsed);
    CHECK(normal_form_equal(r3.conclusion_nf, r1.conclusion_nf));
  }

  TEST_CASE("reversal needs application closure before reintroduction") {
    ExtractionResult r1 = run_script(parse_script(kContinuityScript));
    ProofScript back = reverse_direction(r1);
    back.steps.erase(back.steps.begin() + 1);  // drop (axiom tstar-app)
    CHECK_FAILS_WITH(run_script(back), "StepInapplicable");

    ProofScript stray = reverse_direction(r1);
    stray.steps.erase(stray.steps.begin());  // drop the witness registration
    CHECK_FAILS_WITH(run_script(stray), "StepInapplicable");
  }

  TEST_CASE("oracle steps require declaration and guard the sentence") {
    ExtractionResult r = run_script(parse_script(find_zero_script()));
    REQUIRE(r.oracle_parameters.size() == 1);
    CHECK(r.oracle_parameters[0].first == "MU2");
    REQUIRE(r.oracle_parameters[0].second);
    CHECK(!r.oracle_approximated);
    REQUIRE(r.internal_sentence->kind == Formula::Kind::Forall);
    CHECK(r.internal_sentence->binder == "mu");
    CHECK(r.internal_sentence->f0->kind == Formula::Kind::Imp);

    std::string undeclared = find_zero_script();
    auto pos = undeclared.find("(oracles MU2)");
    REQUIRE(pos != std::string::npos);
    undeclared.replace(pos, 13, "");
    CHECK_FAILS_WITH(run_script(parse_script(undeclared)), "OracleNotDeclared");

    CHECK_FAILS_WITH(reverse_direction(r), "OracleBlocked");
  }

  TEST_CASE("oracle instantiation substitutes a bounded search") {
    ExtractionResult r = run_script(parse_script(find_zero_script()));
    ExtractionResult inst = instantiate_oracle(r, bounded_mu_term(8));
    CHECK(inst.oracle_approximated);
    CHECK(inst.internal_sentence->kind != Formula::Kind::Forall);
    for (const auto& [n, t] : inst.witnesses) {
      (void)n;
      CHECK(free_term_vars(t).empty());
    }

    Interp in = parse_interp("cutoff K=1 M=6\n");
    ProofScript s = parse_script(find_zero_script());
    VerificationReport rep = check_witness(inst.internal_sentence, in, s.tab);
    CHECK(rep.pass());

    // A bound below the least zero returns the default 0 and fails honestly.
    ExtractionResult weak = instantiate_oracle(r, bounded_mu_term(2));
    VerificationReport bad = check_witness(weak.internal_sentence, in, s.tab);
    CHECK(!bad.pass());

    CHECK_FAILS_WITH(instantiate_oracle(r, parse_t("(lam (n Nat) n)")),
                     "TypeMismatch");
  }

  TEST_CASE("the uncomputable oracle stays symbolic") {
    std::string muo = find_zero_script();
    auto pos = muo.find("(oracles MU2)");
    muo.replace(pos, 13, "(oracles MU2 MUO)");
    pos = muo.find("(steps (oracle MU2)");
    muo.replace(pos, 19, "(steps (oracle MU2) (oracle MUO)");
    ExtractionResult r = run_script(parse_script(muo));
    CHECK(r.oracle_parameters.size() == 2);
    CHECK_FAILS_WITH(instantiate_oracle(r, bounded_mu_term(8)), "OracleBlocked");
    CHECK_FAILS_WITH(reverse_direction(r), "OracleBlocked");
  }

  TEST_CASE("bounded mu computes least zeros up to its bound") {
    TermPtr mu8 = bounded_mu_term(8);
    TermPtr f = parse_t(kStepFn);
    CHECK(run_nat(f, 0) == 3);
    CHECK(run_nat(f, 3) == 0);
    ValuePtr v = apply_closed(mu8, {f});
    REQUIRE(v->kind == Value::Kind::Num);
    CHECK(v->num == 3);

    CHECK(mu_grid_violations(bounded_mu_term(32), 32).empty());
    auto viol = mu_grid_violations(bounded_mu_term(32), 33);
    REQUIRE(viol.size() == 1);
    CHECK(viol[0].find("33") != std::string::npos);
  }

  TEST_CASE("collapsed sentences replace lists by their maxima") {
    ExtractionResult r = run_script(parse_script(kContinuityScript));
    ProofScript s = parse_script(kContinuityScript);
    FormulaPtr collapsed = collapsed_sentence(r.conclusion_nf, r.witnesses, s.tab);
    CHECK(classify_internal(collapsed));
    CHECK(print_formula(collapsed).find("(max ") != std::string::npos);

    // The collapse exposes the matrix's own universal, so all three
    // leading quantifiers are enumerated.
    Interp in = parse_interp(grid_interp(2, 16));
    VerificationReport rep = check_witness(collapsed, in, s.tab);
    CHECK(rep.pass());
    CHECK(rep.checked == 17 * 17 * 17);

    CHECK_FAILS_WITH(collapsed_sentence(r.conclusion_nf, {}, s.tab),
                     "MissingWitness");
  }

  TEST_CASE("oracle context exposes the declared operator types") {
    auto ctx = oracle_context({"MU2", "MUO"});
    REQUIRE(ctx.count("mu") == 1);
    REQUIRE(ctx.count("muo") == 1);
    CHECK(print_type(ctx.at("mu")) == "(-> (-> Nat Nat) Nat)");
    CHECK(oracle_context({}).empty());
  }
}
