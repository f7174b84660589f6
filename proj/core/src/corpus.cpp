#include "nsa/corpus.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "nsa/errors.hpp"
#include "nsa/parser.hpp"
#include "nsa/printer.hpp"

#ifndef NSA_CORPUS_DIR
#define NSA_CORPUS_DIR "corpus"
#endif

namespace nsa {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void bad(const std::string& code, const std::string& msg) {
  fail(code, msg);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) bad("FixtureMissing", "cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) bad("FixtureMissing", "cannot write '" + p.string() + "'");
  out << text;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
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

std::string mode_name(Mode m) { return m == Mode::P ? "P" : "H"; }

void parse_meta(const std::string& text, Fixture& fx) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line = line.substr(0, cut);
    auto toks = split_ws(line);
    if (toks.empty()) continue;
    const std::string& key = toks[0];
    std::string where = fx.name + "/meta line " + std::to_string(lineno);
    if (key == "desc") {
      auto at = line.find("desc");
      std::string rest = line.substr(at + 4);
      auto s = rest.find_first_not_of(" \t");
      auto e = rest.find_last_not_of(" \t\r");
      fx.desc = s == std::string::npos ? "" : rest.substr(s, e - s + 1);
    } else if (key == "mode") {
      if (toks.size() != 2) bad("SyntaxError", where + ": mode P|H");
      fx.mode = parse_mode(toks[1]);
    } else if (key == "kind") {
      if (toks.size() != 2 ||
          (toks[1] != "normalize" && toks[1] != "nf-implication" &&
           toks[1] != "rule"))
        bad("SyntaxError", where + ": kind normalize|nf-implication|rule");
      fx.kind = toks[1];
    } else if (key == "rule") {
      if (toks.size() < 2) bad("SyntaxError", where + ": rule <name> [<path>...]");
      fx.rule = toks[1];
      for (std::size_t i = 2; i < toks.size(); ++i)
        fx.rule_path.push_back(std::stoi(toks[i]));
    } else if (key == "tags") {
      fx.tags.assign(toks.begin() + 1, toks.end());
    } else if (key == "mu-bound") {
      if (toks.size() != 2) bad("SyntaxError", where + ": mu-bound <n>");
      fx.mu_bound = std::stoll(toks[1]);
    } else {
      bad("SyntaxError", where + ": unknown key '" + key + "'");
    }
  }
}

void validate(const Fixture& fx) {
  auto missing = [&](const char* f) {
    bad("FixtureInvalid", "fixture '" + fx.name + "' lacks " + f);
  };
  if (fx.kind == "nf-implication") {
    if (!fs::exists(fx.dir / "a.nf") || !fs::exists(fx.dir / "b.nf"))
      missing("a.nf / b.nf");
  } else {
    if (!fs::exists(fx.dir / "source.formula")) missing("source.formula");
  }
  if (fx.kind == "rule" && fx.rule.empty())
    bad("FixtureInvalid", "fixture '" + fx.name + "' has kind rule but no rule line");
  if (fx.has_script && !fx.has_interp && !fx.tagged("symbolic-only"))
    bad("FixtureInvalid", "fixture '" + fx.name +
                              "' has a script but neither an interpretation "
                              "nor the symbolic-only tag");
}

}  // namespace

bool Fixture::tagged(const std::string& t) const {
  return std::find(tags.begin(), tags.end(), t) != tags.end();
}

std::string corpus_root() {
  if (const char* e = std::getenv("NSA_CORPUS_DIR"); e && *e) return e;
  return NSA_CORPUS_DIR;
}

Fixture load_fixture(const fs::path& dir) {
  Fixture fx;
  fx.dir = dir;
  fx.name = dir.filename().string();
  if (!fs::exists(dir / "meta"))
    bad("FixtureMissing", "fixture '" + fx.name + "' has no meta file");
  parse_meta(read_file(dir / "meta"), fx);
  fx.has_script = fs::exists(dir / "script.scr");
  fx.has_interp = fs::exists(dir / "grid.interp");
  fx.has_expected = fs::exists(dir / "expected.nf");
  validate(fx);
  return fx;
}

std::vector<Fixture> discover_fixtures(const std::string& root) {
  if (!fs::is_directory(root))
    bad("FixtureMissing", "corpus root '" + root + "' is not a directory");
  std::vector<Fixture> out;
  for (const auto& e : fs::directory_iterator(root)) {
    if (!e.is_directory()) continue;
    if (!fs::exists(e.path() / "meta")) continue;
    out.push_back(load_fixture(e.path()));
  }
  std::sort(out.begin(), out.end(),
            [](const Fixture& a, const Fixture& b) { return a.name < b.name; });
  return out;
}

std::vector<Fixture> select_fixtures(const std::string& selector,
                                     const std::string& root) {
  std::vector<Fixture> all = discover_fixtures(root);
  if (selector.empty() || selector == "all") return all;
  std::vector<Fixture> out;
  for (const std::string& name : split_commas(selector))
    for (const Fixture& fx : all)
      if (fx.name == name) out.push_back(fx);
  std::sort(out.begin(), out.end(),
            [](const Fixture& a, const Fixture& b) { return a.name < b.name; });
  return out;
}

namespace {

void run_fixture_inner(const Fixture& fx, const FixtureOptions& opt,
                       FixtureReport& rep) {
  SymbolTable tab;
  FormulaPtr source;
  FormulaPtr produced_formula;
  std::optional<NormalForm> produced_nf;

  if (fx.kind == "nf-implication") {
    ParsedFormulaFile fa = parse_formula_file(read_file(fx.dir / "a.nf"));
    ParsedFormulaFile fb = parse_formula_file(read_file(fx.dir / "b.nf"));
    if (print_preamble(fa.table) != print_preamble(fb.table))
      bad("FixtureInvalid", "a.nf and b.nf declare different preambles");
    tab = fa.table;
    Rewriter rw(tab, fx.mode);
    produced_nf = rw.nf_implication(formula_to_normal_form(fa.formula),
                                    formula_to_normal_form(fb.formula));
    rep.lines.push_back("combined the two normal forms across an implication");
  } else {
    ParsedFormulaFile pf =
        parse_formula_file(read_file(fx.dir / "source.formula"));
    tab = pf.table;
    source = pf.formula;
    Rewriter rw(tab, fx.mode);
    if (fx.kind == "rule") {
      produced_formula = rw.apply_rule(fx.rule, source, fx.rule_path);
      rep.lines.push_back("applied rule " + fx.rule + " at path " +
                          path_to_string(fx.rule_path));
    } else {
      auto [nf, trace] = rw.normalize_to_normal_form(source);
      produced_nf = nf;
      rep.lines.push_back("normalized in " +
                          std::to_string(trace.steps.size()) +
                          " rewrite steps");
    }
  }

  FormulaPtr produced =
      produced_nf ? normal_form_to_formula(*produced_nf) : produced_formula;

  if (opt.bless) {
    write_file(fx.dir / "expected.nf", print_formula_file(tab, produced));
    rep.blessed = true;
    rep.lines.push_back("expected.nf blessed");
  } else if (!fx.has_expected) {
    rep.failure = "expected.nf missing (freeze it with --bless)";
    return;
  } else {
    ParsedFormulaFile ex = parse_formula_file(read_file(fx.dir / "expected.nf"));
    bool ok = produced_nf ? normal_form_equal(*produced_nf,
                                              formula_to_normal_form(ex.formula))
                          : alpha_eq(produced, ex.formula);
    if (!ok) {
      rep.failure = "output differs from expected.nf\n    produced: " +
                    print_formula(produced) +
                    "\n    expected: " + print_formula(ex.formula);
      return;
    }
    rep.lines.push_back("matches expected.nf");
  }

  if (!fx.has_script) {
    if (fx.tagged("symbolic-only"))
      rep.lines.push_back("symbolic only: no executable content");
    return;
  }

  ProofScript sc = parse_script_file((fx.dir / "script.scr").string());
  if (source && !alpha_eq(sc.source, source)) {
    rep.failure = "script source differs from source.formula";
    return;
  }
  ExtractionResult r = run_script(sc);
  if (produced_nf && !normal_form_equal(r.conclusion_nf, *produced_nf)) {
    rep.failure = "script conclusion differs from the normalized source";
    return;
  }
  rep.lines.push_back("extraction ok (" + std::to_string(r.witnesses.size()) +
                      (r.witnesses.size() == 1 ? " witness)" : " witnesses)"));

  bool oracle_free = r.oracle_parameters.empty();
  bool has_muo = false;
  bool has_mu2 = false;
  for (const auto& [name, spec] : r.oracle_parameters) {
    (void)spec;
    has_muo |= name == "MUO";
    has_mu2 |= name == "MU2";
  }
  if (has_muo) {
    rep.lines.push_back("oracle MUO is symbolic only: verification skipped");
    return;
  }
  if (has_mu2) {
    long long bound = opt.mu_bound.value_or(fx.mu_bound);
    long long grid = opt.mu_grid.value_or(bound);
    TermPtr impl = bounded_mu_term(static_cast<int>(bound));
    std::vector<std::string> viol =
        mu_grid_violations(impl, static_cast<int>(grid));
    if (!viol.empty()) {
      rep.failure =
          "oracle-approximated, specification violated on grid: " + viol.front();
      return;
    }
    r = instantiate_oracle(r, impl);
    rep.lines.push_back("oracle MU2 approximated by bounded search (bound " +
                        std::to_string(bound) +
                        "), specification grid-checked through " +
                        std::to_string(grid));
  }

  if (oracle_free && !r.witnesses.empty()) {
    ProofScript rev = reverse_direction(r);
    ExtractionResult back = run_script(rev);
    if (!normal_form_equal(back.conclusion_nf, r.conclusion_nf)) {
      rep.failure = "reverse direction failed to round-trip";
      return;
    }
    rep.lines.push_back("reverse direction round-trips");
  }

  if (fx.tagged("symbolic-only")) {
    rep.lines.push_back("symbolic only: verification skipped");
    return;
  }
  if (!fx.has_interp) return;

  Interp in = parse_interp_file((fx.dir / "grid.interp").string());
  VerificationReport vr = check_witness(r.internal_sentence, in, sc.tab);
  if (!vr.pass()) {
    rep.failure = "witness check failed at " + vr.failures.front().assignment +
                  ": " + vr.failures.front().detail;
    return;
  }
  rep.lines.push_back("verification ok (" + std::to_string(vr.checked) +
                      " instances)");
}

}  // namespace

FixtureReport run_fixture(const Fixture& fx, const FixtureOptions& opt) {
  FixtureReport rep;
  rep.name = fx.name;
  try {
    run_fixture_inner(fx, opt, rep);
  } catch (const Error& e) {
    rep.failure = e.what();
  }
  rep.pass = rep.failure.empty();
  return rep;
}

std::string report_lines(const FixtureReport& r) {
  std::ostringstream os;
  os << "fixture " << r.name << ": " << (r.pass ? "PASS" : "FAIL") << "\n";
  for (const std::string& l : r.lines) os << "  " << l << "\n";
  if (!r.failure.empty()) os << "  failure: " << r.failure << "\n";
  return os.str();
}

bool CorpusSummary::pass() const {
  return std::all_of(reports.begin(), reports.end(),
                     [](const FixtureReport& r) { return r.pass; });
}

CorpusSummary corpus_run(const std::string& selector, const std::string& root,
                         const FixtureOptions& opt, int jobs) {
  std::vector<Fixture> all = discover_fixtures(root);
  std::vector<Fixture> chosen;
  if (selector.empty() || selector == "all") {
    chosen = all;
  } else {
    for (const std::string& name : split_commas(selector)) {
      auto it = std::find_if(all.begin(), all.end(), [&](const Fixture& fx) {
        return fx.name == name;
      });
      if (it == all.end())
        bad("FixtureMissing",
            "no fixture named '" + name + "' under '" + root + "'");
      chosen.push_back(*it);
    }
    std::sort(chosen.begin(), chosen.end(),
              [](const Fixture& a, const Fixture& b) { return a.name < b.name; });
  }

  CorpusSummary sum;
  sum.reports.resize(chosen.size());
  int workers = std::max(1, std::min<int>(jobs, static_cast<int>(chosen.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < chosen.size(); ++i)
      sum.reports[i] = run_fixture(chosen[i], opt);
  } else {
    std::atomic<std::size_t> next{0};
    auto work = [&]() {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= chosen.size()) return;
        sum.reports[i] = run_fixture(chosen[i], opt);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return sum;
}

std::string summary_to_string(const CorpusSummary& s) {
  std::ostringstream os;
  int passed = 0;
  int blessed = 0;
  for (const FixtureReport& r : s.reports) {
    os << report_lines(r);
    passed += r.pass ? 1 : 0;
    blessed += r.blessed ? 1 : 0;
  }
  os << "corpus: " << s.reports.size() << " run, " << passed << " passed";
  if (blessed) os << ", " << blessed << " blessed";
  os << "\n";
  return os.str();
}

std::string corpus_list(const std::string& selector, const std::string& root) {
  std::vector<Fixture> chosen = select_fixtures(selector, root);
  std::vector<std::array<std::string, 5>> rows;
  rows.push_back({"name", "mode", "kind", "files", "description"});
  for (const Fixture& fx : chosen) {
    std::string kind = fx.kind;
    if (fx.kind == "rule") kind += ":" + fx.rule;
    std::string files;
    if (fx.has_script) files = "script";
    if (fx.has_interp) files += files.empty() ? "interp" : ",interp";
    if (files.empty()) files = "-";
    std::string tags;
    for (const std::string& t : fx.tags) tags += (tags.empty() ? "" : ",") + t;
    std::string desc = fx.desc;
    if (!tags.empty()) desc += " [" + tags + "]";
    rows.push_back({fx.name, mode_name(fx.mode), kind, files, desc});
  }
  std::array<std::size_t, 5> width{};
  for (const auto& row : rows)
    for (std::size_t c = 0; c < 5; ++c)
      width[c] = std::max(width[c], row[c].size());
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < 5; ++c) {
      os << row[c];
      if (c + 1 < 5)
        os << std::string(width[c] - row[c].size() + 2, ' ');
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace nsa
