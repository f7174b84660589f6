// Command-line front end for the normalization / extraction / verification
// engine. Subcommands:
//
//   nsa normalize <formula-file> [--mode P|H] [--trace out.trace] [-o out.nf]
//   nsa extract <script-file> [--oracle mu=bounded:<B>] [--trace out.trace]
//               [--emit witnesses.terms] [--emit-internal sentence.formula]
//   nsa verify <sentence-file> <witness-file> <interp-file>
//   nsa eval <term-file> [<nat-arg>...]
//   nsa schema-check [<schema>] [--max-size M] [--max-k K]
//   nsa corpus list [<selector>]
//   nsa corpus run [<selector>] [--bless] [--jobs N] [--oracle mu=bounded:<B>]
//
// Exit codes: 0 pass, 1 regression / failed check, 2 usage or input error.
// NSA_CORPUS_DIR overrides the fixture root.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nsa/corpus.hpp"
#include "nsa/errors.hpp"
#include "nsa/eval.hpp"
#include "nsa/extract.hpp"
#include "nsa/interp.hpp"
#include "nsa/parser.hpp"
#include "nsa/printer.hpp"
#include "nsa/rewrite.hpp"
#include "nsa/verify.hpp"

namespace {

using namespace nsa;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("FixtureMissing", "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail("FixtureMissing", "cannot write '" + path + "'");
  out << text;
}

// Input and usage problems exit 2; engine-level failures exit 1.
int error_exit_code(const Error& e) {
  const std::string& c = e.code();
  if (c == "SyntaxError" || c == "FixtureMissing" || c == "FixtureInvalid" ||
      c == "UsageError")
    return 2;
  return 1;
}

long long parse_oracle_flag(const std::string& spec) {
  const std::string prefix = "mu=bounded:";
  if (spec.rfind(prefix, 0) != 0)
    fail("UsageError", "--oracle expects mu=bounded:<N>, got '" + spec + "'");
  try {
    return std::stoll(spec.substr(prefix.size()));
  } catch (const std::exception&) {
    fail("UsageError", "--oracle expects mu=bounded:<N>, got '" + spec + "'");
  }
}

int cmd_normalize(const std::string& file, const std::string& mode,
                  const std::string& trace_file, const std::string& out) {
  ParsedFormulaFile pf = parse_formula_file(read_file(file));
  Rewriter rw(pf.table, parse_mode(mode));
  auto [nf, tr] = rw.normalize_to_normal_form(pf.formula);
  FormulaPtr result = normal_form_to_formula(nf);
  if (out.empty())
    std::cout << print_formula(result) << "\n";
  else
    write_file(out, print_formula_file(pf.table, result));
  if (!trace_file.empty()) write_file(trace_file, trace_to_string(tr));
  return 0;
}

int cmd_extract(const std::string& file, const std::string& oracle,
                const std::string& trace_file, const std::string& emit,
                const std::string& emit_internal) {
  ProofScript sc = parse_script_file(file);
  ExtractionResult r = run_script(sc);
  std::cout << "script " << r.name << ": conclusion reached\n";

  if (!oracle.empty()) {
    long long bound = parse_oracle_flag(oracle);
    TermPtr impl = bounded_mu_term(static_cast<int>(bound));
    std::vector<std::string> viol =
        mu_grid_violations(impl, static_cast<int>(bound));
    if (!viol.empty()) {
      std::cout << "oracle-approximated, specification violated on grid\n";
      for (const std::string& v : viol) std::cout << "  " << v << "\n";
      return 1;
    }
    r = instantiate_oracle(r, impl);
    std::cout << "oracle MU2: approximated by bounded search (bound " << bound
              << "), specification grid-checked through " << bound << "\n";
  } else {
    for (const auto& [name, spec] : r.oracle_parameters) {
      (void)spec;
      std::cout << "oracle " << name << ": symbolic"
                << (name == "MU2" ? " (internal sentence is guarded)" : " only")
                << "\n";
    }
  }

  std::cout << "witnesses: " << r.witnesses.size() << "\n";
  for (const auto& [binder, term] : r.witnesses)
    std::cout << "  " << binder << " := " << print_term(term) << "\n";

  if (!emit.empty()) {
    std::ostringstream os;
    os << print_preamble(r.tab);
    // Existential-block order, so positional matching in `verify` lines up.
    for (const auto& [binder, type] : r.conclusion_nf.exist_block) {
      (void)type;
      auto it = r.witnesses.find(binder);
      if (it != r.witnesses.end())
        os << "(witness " << binder << " " << print_term(it->second) << ")\n";
    }
    write_file(emit, os.str());
    std::cout << "wrote " << emit << "\n";
  }
  if (!emit_internal.empty()) {
    write_file(emit_internal, print_formula_file(r.tab, r.internal_sentence));
    std::cout << "wrote " << emit_internal << "\n";
  } else {
    std::cout << "internal: " << print_formula(r.internal_sentence) << "\n";
  }
  if (!trace_file.empty()) write_file(trace_file, trace_to_string(r.trace));
  return 0;
}

int cmd_verify(const std::string& sentence_file, const std::string& witness_file,
               const std::string& interp_file) {
  ParsedFormulaFile pf = parse_formula_file(read_file(sentence_file));
  SymbolTable tab = pf.table;
  auto wits = parse_witness_file(read_file(witness_file), tab);
  NormalForm nf = formula_to_normal_form(pf.formula);

  // Witnesses claim their binder by name first; the sentence may be any
  // alpha-variant of the script's conclusion, so leftover binders then take
  // the remaining witnesses in existential-block order (the order extract
  // emits them in). Types are still checked by strip_standard.
  std::map<std::string, TermPtr> wmap;
  std::vector<std::pair<std::string, TermPtr>> unclaimed;
  for (const auto& [name, term] : wits) {
    bool named = std::any_of(nf.exist_block.begin(), nf.exist_block.end(),
                             [&](const auto& b) { return b.first == name; });
    if (named)
      wmap[name] = term;
    else
      unclaimed.emplace_back(name, term);
  }
  std::size_t next = 0;
  for (const auto& [binder, type] : nf.exist_block) {
    (void)type;
    if (!wmap.count(binder) && next < unclaimed.size())
      wmap[binder] = unclaimed[next++].second;
  }

  FormulaPtr sentence = strip_standard(nf, wmap, tab);
  Interp in = parse_interp_file(interp_file);
  VerificationReport rep = check_witness(sentence, in, tab);
  std::cout << report_to_string(rep);
  return rep.pass() ? 0 : 1;
}

int cmd_eval(const std::string& term_file, const std::vector<long long>& args) {
  // Evaluation problems are input errors for this subcommand: exit 2, not 1.
  try {
    ParsedTermFile pt = parse_term_file(read_file(term_file));
    ValuePtr v;
    if (args.empty()) {
      v = normalize(pt.term);
    } else {
      std::vector<TermPtr> ts;
      for (long long a : args)
        ts.push_back(mk_num(static_cast<std::uint64_t>(a)));
      v = apply_closed(pt.term, ts);
    }
    std::cout << print_term(value_to_term(v)) << "\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_schema_check(const std::string& schema, int max_size, int max_k) {
  if (schema.empty()) {
    for (const std::string& s : known_schemas()) std::cout << s << "\n";
    return 0;
  }
  VerificationReport rep =
      cutoff_check(schema, default_schema_sizes(max_k, max_size));
  std::cout << "schema " << schema << ":\n" << report_to_string(rep);
  return rep.pass() ? 0 : 1;
}

int cmd_corpus_list(const std::string& selector) {
  std::string table = corpus_list(selector, corpus_root());
  std::cout << table;
  if (!selector.empty() && selector != "all" &&
      table.find('\n') == table.rfind('\n'))
    std::cerr << "warning: no fixture matches '" << selector << "'\n";
  return 0;
}

int cmd_corpus_run(const std::string& selector, bool bless, int jobs,
                   const std::string& oracle) {
  FixtureOptions opt;
  opt.bless = bless;
  if (!oracle.empty()) opt.mu_bound = parse_oracle_flag(oracle);
  CorpusSummary sum = corpus_run(selector, corpus_root(), opt, jobs);
  std::cout << summary_to_string(sum);
  return sum.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"normal forms, witness extraction, and finite verification"};
  app.require_subcommand(1);

  std::string file, mode = "P", out, oracle, emit, emit_internal;
  std::string sentence_file, witness_file, interp_file;
  std::string schema, selector;
  std::vector<long long> eval_args;
  std::string trace_file;
  bool bless = false;
  int jobs = 1, max_size = 5, max_k = 2;

  CLI::App* normalize = app.add_subcommand("normalize", "rewrite to normal form");
  normalize->add_option("file", file, "formula file")->required();
  normalize->add_option("--mode", mode, "P (classical) or H (intuitionistic)");
  normalize->add_option("--trace", trace_file, "write the rewrite trace to a file");
  normalize->add_option("-o,--out", out, "write the result as a formula file");

  CLI::App* extract = app.add_subcommand("extract", "run a proof script");
  extract->add_option("file", file, "script file")->required();
  extract->add_option("--oracle", oracle, "instantiate mu (mu=bounded:<N>)");
  extract->add_option("--trace", trace_file, "write the script trace to a file");
  extract->add_option("--emit", emit, "write the witness terms to a file");
  extract->add_option("--emit-internal", emit_internal,
                      "write the internal sentence to a file");

  CLI::App* verify = app.add_subcommand("verify", "check witnesses on a grid");
  verify->add_option("sentence", sentence_file, "normal-form file")->required();
  verify->add_option("witnesses", witness_file, "witness-term file")->required();
  verify->add_option("interp", interp_file, "interpretation file")->required();

  CLI::App* eval = app.add_subcommand("eval", "normalize a closed term");
  eval->add_option("file", file, "term file")->required();
  eval->add_option("args", eval_args, "numeric arguments to apply");

  CLI::App* schema_check =
      app.add_subcommand("schema-check", "sweep a schema over cutoff models");
  schema_check->add_option("schema", schema, "schema name (omit to list)");
  schema_check->add_option("--max-size", max_size, "largest carrier bound M");
  schema_check->add_option("--max-k", max_k, "largest standardness cutoff K");

  CLI::App* corpus = app.add_subcommand("corpus", "fixture catalog");
  corpus->require_subcommand(1);
  CLI::App* clist = corpus->add_subcommand("list", "print the fixture table");
  clist->add_option("selector", selector, "fixture names (comma separated)");
  CLI::App* crun = corpus->add_subcommand("run", "run fixtures end to end");
  crun->add_option("selector", selector, "fixture names (comma separated)");
  crun->add_flag("--bless", bless, "regenerate expected.nf files");
  crun->add_option("--jobs", jobs, "parallel fixture runners");
  crun->add_option("--oracle", oracle, "mu search bound (mu=bounded:<N>)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(normalize))
      return cmd_normalize(file, mode, trace_file, out);
    if (app.got_subcommand(extract))
      return cmd_extract(file, oracle, trace_file, emit, emit_internal);
    if (app.got_subcommand(verify))
      return cmd_verify(sentence_file, witness_file, interp_file);
    if (app.got_subcommand(eval)) return cmd_eval(file, eval_args);
    if (app.got_subcommand(schema_check))
      return cmd_schema_check(schema, max_size, max_k);
    if (app.got_subcommand(corpus)) {
      if (corpus->got_subcommand(clist)) return cmd_corpus_list(selector);
      return cmd_corpus_run(selector, bless, jobs, oracle);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return error_exit_code(e);
  }
  return 2;
}
