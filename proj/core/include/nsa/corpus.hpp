#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nsa/extract.hpp"
#include "nsa/interp.hpp"
#include "nsa/rewrite.hpp"

namespace nsa {

// A fixture is a directory holding a worked example end to end: a source
// statement, the frozen output it must normalize to, and optionally a proof
// script with witness terms plus a finite interpretation to check them on.
//
// Layout under <root>/<name>/:
//   meta            line-oriented metadata (desc / mode / kind / tags ...)
//   source.formula  preamble + source formula    (kind normalize | rule)
//   a.nf, b.nf      operand normal forms         (kind nf-implication)
//   expected.nf     frozen expected output; regenerated only under --bless
//   script.scr      optional proof script
//   grid.interp     optional finite interpretation
struct Fixture {
  std::string name;
  std::filesystem::path dir;
  std::string desc;
  Mode mode = Mode::P;
  // How the expected output is produced:
  //   normalize      full pipeline; expected.nf is a normal form
  //   nf-implication combine a.nf -> b.nf; expected.nf is a normal form
  //   rule           one named rewrite at a path; expected.nf is a formula
  std::string kind = "normalize";
  std::string rule;  // kind == rule only
  Path rule_path;    // kind == rule only
  std::vector<std::string> tags;
  long long mu_bound = 32;  // bounded-search depth for a declared mu oracle

  bool has_script = false;
  bool has_interp = false;
  bool has_expected = false;

  bool tagged(const std::string& t) const;
};

// Fixture root: NSA_CORPUS_DIR from the environment when set, otherwise the
// compiled-in default.
std::string corpus_root();

Fixture load_fixture(const std::filesystem::path& dir);

// All fixture directories under root, sorted by name.
std::vector<Fixture> discover_fixtures(const std::string& root);

// Fixtures matching a selector (empty or "all" selects everything; otherwise
// a comma-separated list of names). Unknown names simply match nothing.
std::vector<Fixture> select_fixtures(const std::string& selector,
                                     const std::string& root);

struct FixtureOptions {
  bool bless = false;                 // rewrite expected.nf from the run
  std::optional<long long> mu_bound;  // override the fixture's search bound
  std::optional<long long> mu_grid;   // mu specification grid (default bound)
};

struct FixtureReport {
  std::string name;
  bool pass = false;
  bool blessed = false;
  std::vector<std::string> lines;  // one entry per completed stage
  std::string failure;             // first failure, empty when passing
};

std::string report_lines(const FixtureReport& r);

// Runs one fixture: produce the output for its kind, compare against the
// frozen expectation (or bless it), then run the script and verify witnesses
// on the interpretation grid when present. Errors are captured as failures.
FixtureReport run_fixture(const Fixture& fx, const FixtureOptions& opt = {});

struct CorpusSummary {
  std::vector<FixtureReport> reports;  // name-sorted
  bool pass() const;
};

// Runs the selected fixtures (in parallel when jobs > 1) with name-sorted,
// byte-stable report order. Throws FixtureMissing when the selector names a
// fixture that does not exist.
CorpusSummary corpus_run(const std::string& selector, const std::string& root,
                         const FixtureOptions& opt = {}, int jobs = 1);

std::string summary_to_string(const CorpusSummary& s);

// Catalog table for the selected fixtures; empty selector lists everything.
// Unknown selectors yield just the header row.
std::string corpus_list(const std::string& selector, const std::string& root);

}  // namespace nsa
