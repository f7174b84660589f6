#include <doctest.h>
#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "nsa/corpus.hpp"
#include "nsa/errors.hpp"

using namespace nsa;
namespace fs = std::filesystem;

namespace {

std::string error_code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

// Scratch corpus root that cleans up after itself.
struct TempRoot {
  fs::path root;
  TempRoot() {
    root = fs::temp_directory_path() /
           ("nsa-corpus-test-" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~TempRoot() { fs::remove_all(root); }

  fs::path fixture(const std::string& name,
                   const std::vector<std::pair<std::string, std::string>>&
                       files) const {
    fs::path dir = root / name;
    fs::create_directories(dir);
    for (const auto& [fname, text] : files) {
      std::ofstream out(dir / fname);
      out << text;
    }
    return dir;
  }
};

const char* kTinyMeta =
    "desc trivially standard lower bound\n"
    "mode P\n"
    "kind normalize\n";
const char* kTinySource = "(forall-st (n Nat) (le0 0 n))\n";

}  // namespace

TEST_SUITE("corpus") {
  TEST_CASE("discovers the shipped fixtures sorted by name") {
    std::vector<Fixture> all = discover_fixtures(corpus_root());
    REQUIRE(all.size() == 15);
    for (size_t i = 1; i < all.size(); ++i)
      CHECK(all[i - 1].name < all[i].name);
    for (const Fixture& fx : all) CHECK(fx.has_expected);
    CHECK(all.front().name == "bayes");
    CHECK(all.back().name == "uniform-continuity");
  }

  TEST_CASE("meta fields round through load_fixture") {
    std::string root = corpus_root();
    Fixture mct = load_fixture(root + "/mct-mu");
    CHECK(mct.kind == "normalize");
    CHECK(mct.mode == Mode::P);
    CHECK(mct.tagged("requires-oracle"));
    CHECK(!mct.tagged("symbolic-only"));
    CHECK(mct.mu_bound == 32);
    CHECK(mct.has_script);
    CHECK(mct.has_interp);
    CHECK(mct.desc.find("search operator") != std::string::npos);

    Fixture os = load_fixture(root + "/overspill");
    CHECK(os.kind == "rule");
    CHECK(os.rule == "overspill");
    CHECK(os.rule_path.empty());

    Fixture ni = load_fixture(root + "/nf-implication");
    CHECK(ni.kind == "nf-implication");
    CHECK(!ni.has_script);
  }

  TEST_CASE("selector filtering and missing names") {
    std::string root = corpus_root();
    CHECK(select_fixtures("", root).size() == 15);
    CHECK(select_fixtures("all", root).size() == 15);
    std::vector<Fixture> two = select_fixtures("overspill,continuity", root);
    REQUIRE(two.size() == 2);
    CHECK(two[0].name == "continuity");  // result is name-sorted
    CHECK(two[1].name == "overspill");
    CHECK(select_fixtures("no-such-fixture", root).empty());
    CHECK(error_code_of([&] { corpus_run("no-such-fixture", root); }) ==
          "FixtureMissing");
  }

  TEST_CASE("a fully executable fixture passes end to end") {
    CorpusSummary s = corpus_run("continuity", corpus_root());
    REQUIRE(s.reports.size() == 1);
    const FixtureReport& r = s.reports[0];
    CHECK(r.pass);
    REQUIRE(r.lines.size() == 5);
    CHECK(r.lines[1] == "matches expected.nf");
    CHECK(r.lines[2] == "extraction ok (1 witness)");
    CHECK(r.lines[3] == "reverse direction round-trips");
    CHECK(r.lines[4] == "verification ok (289 instances)");
    CHECK(summary_to_string(s).find("corpus: 1 run, 1 passed") !=
          std::string::npos);
  }

  TEST_CASE("symbolic-only and rule fixtures stop at the right stage") {
    CorpusSummary s = corpus_run("pst,overspill", corpus_root());
    REQUIRE(s.reports.size() == 2);
    CHECK(s.reports[0].name == "overspill");
    CHECK(s.reports[0].lines[0] == "applied rule overspill at path ()");
    CHECK(s.reports[1].lines.back() ==
          "symbolic only: no executable content");
    CHECK(s.pass());
  }

  TEST_CASE("missing expected output asks for --bless") {
    TempRoot tmp;
    fs::path dir = tmp.fixture("tiny", {{"meta", kTinyMeta},
                                        {"source.formula", kTinySource}});
    FixtureReport r = run_fixture(load_fixture(dir));
    CHECK(!r.pass);
    CHECK(r.failure == "expected.nf missing (freeze it with --bless)");
  }

  TEST_CASE("bless freezes the produced output and later runs compare to it") {
    TempRoot tmp;
    fs::path dir = tmp.fixture("tiny", {{"meta", kTinyMeta},
                                        {"source.formula", kTinySource}});
    FixtureOptions bless;
    bless.bless = true;
    FixtureReport first = run_fixture(load_fixture(dir), bless);
    CHECK(first.pass);
    CHECK(first.blessed);
    CHECK(fs::exists(dir / "expected.nf"));

    FixtureReport second = run_fixture(load_fixture(dir));
    CHECK(second.pass);
    CHECK(!second.blessed);
    CHECK(second.lines[1] == "matches expected.nf");
  }

  TEST_CASE("a stale expected output is reported with both formulas") {
    TempRoot tmp;
    fs::path dir = tmp.fixture(
        "tiny", {{"meta", kTinyMeta},
                 {"source.formula", kTinySource},
                 {"expected.nf", "(forall-st (n Nat) (le0 n n))\n"}});
    FixtureReport r = run_fixture(load_fixture(dir));
    CHECK(!r.pass);
    CHECK(r.failure.find("output differs from expected.nf") !=
          std::string::npos);
    CHECK(r.failure.find("produced:") != std::string::npos);
    CHECK(r.failure.find("expected:") != std::string::npos);
  }

  TEST_CASE("meta validation rejects malformed fixtures") {
    TempRoot tmp;
    fs::path bad_key = tmp.fixture(
        "bad-key", {{"meta", "desc x\nflavor mint\n"},
                    {"source.formula", kTinySource}});
    CHECK(error_code_of([&] { load_fixture(bad_key); }) == "SyntaxError");

    fs::path no_rule = tmp.fixture(
        "no-rule", {{"meta", "desc x\nkind rule\n"},
                    {"source.formula", kTinySource}});
    CHECK(error_code_of([&] { load_fixture(no_rule); }) == "FixtureInvalid");

    fs::path no_grid = tmp.fixture(
        "no-grid", {{"meta", kTinyMeta},
                    {"source.formula", kTinySource},
                    {"script.scr", "(script x (mode P) (source (le0 0 0)) "
                                   "(steps) (conclusion (le0 0 0)))\n"}});
    CHECK(error_code_of([&] { load_fixture(no_grid); }) == "FixtureInvalid");

    fs::path no_meta = tmp.root / "no-meta";
    fs::create_directories(no_meta);
    CHECK(error_code_of([&] { load_fixture(no_meta); }) == "FixtureMissing");
  }

  TEST_CASE("comments and the symbolic-only escape hatch are honored") {
    TempRoot tmp;
    fs::path dir = tmp.fixture(
        "commented",
        {{"meta",
          "# a comment line\n"
          "desc tiny  ; trailing comment\n"
          "mode P\n"
          "tags symbolic-only extra-tag\n"},
         {"source.formula", kTinySource},
         {"script.scr",
          "(script commented (mode P)\n"
          "  (source (forall-st (n Nat) (le0 0 n)))\n"
          "  (steps)\n"
          "  (conclusion (forall-st (n Nat) (le0 0 n))))\n"}});
    Fixture fx = load_fixture(dir);
    CHECK(fx.desc == "tiny");
    CHECK(fx.tagged("symbolic-only"));
    CHECK(fx.tagged("extra-tag"));
    FixtureOptions bless;
    bless.bless = true;
    FixtureReport r = run_fixture(fx, bless);
    CHECK(r.pass);
    CHECK(r.lines.back() == "symbolic only: verification skipped");
  }

  TEST_CASE("parallel runs match the serial report byte for byte") {
    std::string root = corpus_root();
    std::string serial = summary_to_string(
        corpus_run("continuity,convergence,overspill,pst", root));
    std::string parallel = summary_to_string(
        corpus_run("continuity,convergence,overspill,pst", root, {}, 4));
    CHECK(serial == parallel);
  }

  TEST_CASE("widening the oracle grid past the bound is reported honestly") {
    Fixture mct = load_fixture(corpus_root() + "/mct-mu");
    FixtureOptions opt;
    opt.mu_grid = 33;
    FixtureReport r = run_fixture(mct, opt);
    CHECK(!r.pass);
    CHECK(r.failure.find(
              "oracle-approximated, specification violated on grid") !=
          std::string::npos);
  }

  TEST_CASE("catalog lists names with their descriptions") {
    std::string table = corpus_list("", corpus_root());
    CHECK(table.find("continuity") != std::string::npos);
    CHECK(table.find("pointwise continuity") != std::string::npos);
    CHECK(table.find("script,interp") != std::string::npos);
    CHECK(table.find("[symbolic-only,requires-oracle]") != std::string::npos);

    std::string none = corpus_list("zzz", corpus_root());
    size_t newlines = std::count(none.begin(), none.end(), '\n');
    CHECK(newlines == 1);  // header only
  }
}
