// eapr: command-line front end.
//
// exit codes: 0 SAT / proved / true, 1 UNSAT / refuted / false, 2 UNKNOWN,
// 64 usage, 65 parse error, 66 missing file, 70 internal error.

#include "eapr/classify.hpp"
#include "eapr/fragments.hpp"
#include "eapr/model_io.hpp"
#include "eapr/oracle.hpp"
#include "eapr/probsat.hpp"
#include "eapr/semantics.hpp"
#include "eapr/syntax.hpp"
#include "eapr/tableau.hpp"
#include "gen.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#ifndef EAPR_CORPUS
#define EAPR_CORPUS "data/corpus.txt"
#endif

using namespace eapr;

namespace {

constexpr int kUsage = 64, kDataErr = 65, kNoInput = 66, kSoftware = 70;

struct MissingFile : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Probabilistic layer first; bare variables fall back to the modal layer.
Formula parse_any(const std::string& text, const std::string& layer) {
  if (layer == "prob") return parse_prob(text);
  if (layer == "mod") return parse_mod(text);
  try {
    return parse_prob(text);
  } catch (const ParseError& first) {
    try {
      return parse_mod(text);
    } catch (const ParseError&) {
      throw first;
    }
  }
}

std::vector<Formula> read_theory(const std::string& path, const std::string& layer) {
  std::vector<Formula> out;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    auto h = line.find('#');
    if (h != std::string::npos) line.resize(h);
    line = trim(line);
    if (!line.empty()) out.push_back(parse_any(line, layer));
  }
  return out;
}

Formula conj(const std::vector<Formula>& fs) {
  Formula out = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) out = Formula::odot(out, fs[i]);
  return out;
}

int status_code(Status s) { return s == Status::SAT ? 0 : s == Status::UNSAT ? 1 : 2; }
int verdict_code(Verdict v) { return v == Verdict::Proved ? 0 : v == Verdict::Refuted ? 1 : 2; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw MissingFile("cannot write " + path);
  out << text << '\n';
}

int world_index(const EventModel& m, const std::string& w) {
  for (int i = 0; i < m.size(); ++i)
    if (m.names[static_cast<std::size_t>(i)] == w) return i;
  try {
    std::size_t pos = 0;
    int i = std::stoi(w, &pos);
    if (pos == w.size() && i >= 0 && i < m.size()) return i;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("no world " + w);
}

// What sat computed, in a form the callers print or check.
struct SatOutcome {
  Status status = Status::UNKNOWN;
  std::string solver;
  std::string witness;  // JSON when SAT
  std::string note;
  bool verified = false;  // witness re-evaluated to 1 on every input
};

SatOutcome run_sat(const std::vector<Formula>& rules, const std::string& mode, const TableauOptions& topts, bool trace) {
  SatOutcome o;
  TheoryKind kind = classify_theory(rules);
  bool fragment = mode == "fragment" || (mode == "auto" && kind != TheoryKind::Neither);
  if (fragment) {
    if (kind == TheoryKind::Neither) throw std::invalid_argument("input is neither UPR nor EPR+");
    FragmentResult r = fragment_sat(rules);
    o.status = r.status;
    o.solver = std::string("fragment/") + theory_kind_name(kind);
    o.note = r.note;
    if (trace)
      for (const auto& s : r.steps) std::cout << "step: " << s.action << (s.literal.empty() ? "" : " " + s.literal) << '\n';
    if (r.status == Status::SAT) {
      o.verified = std::all_of(rules.begin(), rules.end(), [&](const Formula& f) { return eval_prob(f, r.model, r.world) == 1; });
      o.witness = to_json(r.model);
    }
    return o;
  }
  Formula f = conj(rules);
  if (mode == "auto" && !has_pr(f)) {
    TableauOptions t = topts;
    t.trace = trace;
    SatResult r = sat_mod(f, t);
    if (trace)
      for (const auto& s : r.trace) std::cout << s << '\n';
    o.status = r.status;
    o.solver = "tableau/mod";
    o.note = r.note;
    if (r.status == Status::SAT) {
      o.verified = eval_mod(f, r.model, 0) == 1;
      o.witness = to_json(r.model);
    }
    return o;
  }
  ProbOptions p;
  p.tableau = topts;
  p.tableau.trace = trace;
  p.pathlocal = mode == "pathlocal";
  ProbSatResult r = sat_fb(f, p);
  if (trace)
    for (const auto& s : r.trace) std::cout << s << '\n';
  o.status = r.status;
  o.solver = p.pathlocal ? "tableau/pathlocal" : "tableau/global";
  o.note = r.note;
  if (r.status == Status::SAT) {
    // variables were lifted to Pr atoms; check the lifted rules
    o.verified = true;
    for (const auto& g : rules) o.verified = o.verified && eval_prob(has_var(g) ? lift(g) : g, r.model, r.world) == 1;
    o.witness = to_json(r.model);
  }
  return o;
}

Verdict run_prove(const Formula& f, const TableauOptions& topts, std::string* countermodel) {
  if (!has_pr(f)) {
    ProveResult r = prove_valid(f, topts);
    if (r.verdict == Verdict::Refuted && countermodel) *countermodel = to_json(r.countermodel);
    return r.verdict;
  }
  ProbOptions p;
  p.tableau = topts;
  ProbProveResult r = prove_fb(f, p);
  if (r.verdict == Verdict::Refuted && countermodel) *countermodel = to_json(r.countermodel);
  return r.verdict;
}

std::string verdict_word(Verdict v) { return v == Verdict::Proved ? "proved" : v == Verdict::Refuted ? "refuted" : "unknown"; }

std::string classify_line(const Formula& f) {
  FragmentClass c = classify(f);
  std::string out = tag_name(c.tag);
  if (c.tag == FragmentTag::UPR_rule || c.tag == FragmentTag::EPR_rule) {
    if (auto r = as_rule(f)) {
      std::string body;
      for (const auto& l : r->body) body += (body.empty() ? "" : " (.) ") + to_string(l.to_formula());
      out += "\t" + (body.empty() ? std::string("1") : body) + " -> " + (r->head ? to_string(r->head->to_formula()) : "0");
    }
  }
  return out;
}

// Corpus lines: `command expected input`, fields separated by " | ".
// Theory inputs separate rules with " ; ", entailments put " |= " before the
// conclusion.
struct CorpusCase {
  int line = 0;
  std::string command, expected, input;
};

std::vector<std::string> split(const std::string& s, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t at = 0;
  while (true) {
    auto k = s.find(sep, at);
    out.push_back(trim(s.substr(at, k == std::string::npos ? std::string::npos : k - at)));
    if (k == std::string::npos) return out;
    at = k + sep.size();
  }
}

std::vector<CorpusCase> read_corpus(const std::string& path) {
  std::vector<CorpusCase> out;
  std::istringstream in(slurp(path));
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (trim(line).empty() || trim(line)[0] == '#') continue;
    auto f = split(line, " | ");
    if (f.size() != 3) throw std::invalid_argument("corpus line " + std::to_string(no) + ": expected 3 fields");
    out.push_back({no, f[0], f[1], f[2]});
  }
  return out;
}

std::string run_case(const CorpusCase& c, const TableauOptions& topts) {
  if (c.command == "sat" || c.command == "fragment") {
    std::vector<Formula> rules;
    for (const auto& s : split(c.input, " ; ")) rules.push_back(parse_any(s, "auto"));
    auto o = run_sat(rules, c.command == "fragment" ? "fragment" : "auto", topts, false);
    if (o.status == Status::SAT && !o.verified) return "SAT-unverified";
    return status_name(o.status);
  }
  if (c.command == "prove") return verdict_word(run_prove(parse_any(c.input, "auto"), topts, nullptr));
  if (c.command == "entails") {
    auto parts = split(c.input, " |= ");
    if (parts.size() != 2) throw std::invalid_argument("entails needs ' |= '");
    std::vector<Formula> gamma;
    for (const auto& s : split(parts[0], " ; "))
      if (!s.empty()) gamma.push_back(parse_any(s, "auto"));
    ProbOptions p;
    p.tableau = topts;
    Verdict v = entails(gamma, parse_any(parts[1], "auto"), p);
    return v == Verdict::Proved ? "true" : v == Verdict::Refuted ? "false" : "unknown";
  }
  if (c.command == "classify") return tag_name(classify(parse_any(c.input, "auto")).tag);
  if (c.command == "theory") {
    std::vector<Formula> rules;
    for (const auto& s : split(c.input, " ; ")) rules.push_back(parse_any(s, "auto"));
    return theory_kind_name(classify_theory(rules));
  }
  if (c.command == "oracle") {
    Formula f = parse_any(c.input, "auto");
    OracleBounds b{2, 2, 2};
    return oracle_status_name(has_pr(f) ? oracle_sat_prob(f, b).status : oracle_sat_mod(f, b).status);
  }
  throw std::invalid_argument("unknown corpus command " + c.command);
}

// Closed loop on random formulas: every SAT answer must carry a model at 1.
int random_loop(int n, std::uint64_t seed, const TableauOptions& topts) {
  testgen::GenOptions o;
  o.size = 5;
  o.modal_depth = 1;
  testgen::Gen g(seed, o);
  int sat = 0, unsat = 0, unknown = 0, bad = 0;
  for (int i = 0; i < n; ++i) {
    Formula f = g.prob();
    ProbOptions p;
    p.tableau = topts;
    auto r = sat_fb_global(f, p);
    if (r.status == Status::SAT) {
      ++sat;
      if (eval_prob(f, r.model, r.world) != 1) {
        ++bad;
        std::cout << "FAIL random " << i << ": " << to_string(f) << '\n';
      }
    } else if (r.status == Status::UNSAT) {
      ++unsat;
    } else {
      ++unknown;
    }
  }
  std::cout << "random seed " << seed << ": " << sat << " SAT, " << unsat << " UNSAT, " << unknown << " UNKNOWN, " << bad
            << " bad witnesses\n";
  return bad;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"solver suite for fuzzy probabilistic epistemic-action logic"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string layer = "auto";
  std::uint64_t seed = 1;
  int jobs = 1;
  bool trace = false;
  TableauOptions topts;
  app.add_option("--layer", layer, "formula layer")->check(CLI::IsMember({"auto", "prob", "mod"}));
  app.add_option("--seed", seed, "seed for randomized commands");
  app.add_option("--jobs", jobs, "worker cap (queries run sequentially)")->check(CLI::PositiveNumber);
  app.add_option("--max-steps", topts.max_steps, "tableau rule applications");
  app.add_flag("--trace", trace, "print solver trace");

  std::vector<std::string> inputs;
  std::string theory_file;
  auto add_inputs = [&](CLI::App* s, bool theory) {
    s->add_option("formula", inputs, "formula(s)");
    if (theory) s->add_option("--theory", theory_file, "rules, one per line");
  };

  auto* parse = app.add_subcommand("parse", "parse and print a formula");
  add_inputs(parse, false);

  auto* eval = app.add_subcommand("eval", "value of a formula at a world");
  std::string model_file, world = "0", eval_formula;
  eval->add_option("--model", model_file, "model JSON")->required();
  eval->add_option("--formula", eval_formula, "formula")->required();
  eval->add_option("--world", world, "world name or index");

  auto* sat = app.add_subcommand("sat", "satisfiability at value 1");
  std::string mode = "auto", witness_file;
  sat->add_option("--mode", mode)->check(CLI::IsMember({"global", "pathlocal", "fragment", "auto"}));
  sat->add_option("--witness", witness_file, "write the model as JSON");
  add_inputs(sat, true);

  auto* prove = app.add_subcommand("prove", "validity");
  std::string counter_file;
  prove->add_option("--countermodel", counter_file, "write a countermodel as JSON");
  add_inputs(prove, false);

  auto* entails = app.add_subcommand("entails", "premises entail the conclusion");
  std::string conclusion;
  entails->add_option("-c,--conclusion", conclusion)->required();
  add_inputs(entails, true);

  auto* cls = app.add_subcommand("classify", "fragment tag of each formula");
  add_inputs(cls, true);

  auto* orc = app.add_subcommand("oracle", "bounded brute-force model search");
  OracleBounds bounds;
  orc->add_option("--outer", bounds.outer);
  orc->add_option("--inner", bounds.inner);
  orc->add_option("--grid", bounds.grid);
  orc->add_option("--witness", witness_file);
  add_inputs(orc, false);

  auto* self = app.add_subcommand("selftest", "run the bundled corpus");
  std::string corpus = EAPR_CORPUS;
  int random = 0;
  self->add_option("--corpus", corpus);
  self->add_option("--random", random, "closed-loop checks on random formulas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    std::vector<Formula> fs;
    if (!theory_file.empty()) fs = read_theory(theory_file, layer);
    for (const auto& s : inputs) fs.push_back(parse_any(s, layer));
    auto need = [&](std::size_t n) {
      if (fs.size() < n) throw CLI::ValidationError("input", "missing formula");
    };

    if (parse->parsed()) {
      need(1);
      for (const auto& f : fs) std::cout << (has_pr(f) ? "prob\t" : "mod\t") << to_string(f) << '\n';
      return 0;
    }
    if (eval->parsed()) {
      Formula f = parse_any(eval_formula, layer);
      std::string text = slurp(model_file);
      if (has_pr(f) || text.find("\"mu\"") != std::string::npos) {
        SIModel m = si_model_from_json(text);
        std::cout << eval_prob(has_var(f) ? lift(f) : f, m, world_index(m.outer, world)) << '\n';
      } else {
        ModModel m = mod_model_from_json(text);
        std::cout << eval_mod(f, m, world_index(m.frame, world)) << '\n';
      }
      return 0;
    }
    if (sat->parsed()) {
      need(1);
      auto t0 = std::chrono::steady_clock::now();
      SatOutcome o = run_sat(fs, mode, topts, trace);
      double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      std::cout << status_name(o.status) << '\n';
      std::cerr << "solver " << o.solver << ", " << ms << " ms" << (o.note.empty() ? "" : ", " + o.note) << '\n';
      if (o.status == Status::SAT) {
        if (!o.verified) {
          std::cerr << "witness failed re-evaluation\n";
          return kSoftware;
        }
        if (!witness_file.empty()) write_file(witness_file, o.witness);
      }
      return status_code(o.status);
    }
    if (prove->parsed()) {
      need(1);
      std::string cm;
      Verdict v = run_prove(conj(fs), topts, &cm);
      std::cout << verdict_word(v) << '\n';
      if (v == Verdict::Refuted && !counter_file.empty()) write_file(counter_file, cm);
      return verdict_code(v);
    }
    if (entails->parsed()) {
      ProbOptions p;
      p.tableau = topts;
      Verdict v = eapr::entails(fs, parse_any(conclusion, layer), p);
      std::cout << (v == Verdict::Proved ? "true" : v == Verdict::Refuted ? "false" : "unknown") << '\n';
      return verdict_code(v);
    }
    if (cls->parsed()) {
      need(1);
      for (const auto& f : fs) std::cout << classify_line(f) << '\n';
      if (fs.size() > 1) std::cout << "theory\t" << theory_kind_name(classify_theory(fs)) << '\n';
      return 0;
    }
    if (orc->parsed()) {
      need(1);
      Formula f = conj(fs);
      if (has_pr(f)) {
        auto r = oracle_sat_prob(f, bounds);
        std::cout << oracle_status_name(r.status) << "\t" << r.examined << " models\n";
        if (r.status == OracleStatus::SAT && !witness_file.empty()) write_file(witness_file, to_json(r.model));
        return r.status == OracleStatus::SAT ? 0 : 2;
      }
      auto r = oracle_sat_mod(f, bounds);
      std::cout << oracle_status_name(r.status) << "\t" << r.examined << " models\n";
      if (r.status == OracleStatus::SAT && !witness_file.empty()) write_file(witness_file, to_json(r.model));
      return r.status == OracleStatus::SAT ? 0 : 2;
    }
    if (self->parsed()) {
      int failed = 0, n = 0, bad = 0;
      for (const auto& c : read_corpus(corpus)) {
        ++n;
        std::string got;
        try {
          got = run_case(c, topts);
        } catch (const std::exception& e) {
          got = std::string("error: ") + e.what();
        }
        bool ok = got == c.expected;
        if (!ok) ++failed;
        std::cout << (ok ? "ok   " : "FAIL ") << c.line << "\t" << c.command << "\t" << c.input
                  << (ok ? "" : "\t(expected " + c.expected + ", got " + got + ")") << '\n';
      }
      std::cout << n - failed << "/" << n << " corpus cases passed\n";
      if (random > 0) bad = random_loop(random, seed, topts);
      return failed == 0 && bad == 0 ? 0 : 1;
    }
  } catch (const ParseError& e) {
    std::cerr << e.what() << '\n';
    return kDataErr;
  } catch (const MissingFile& e) {
    std::cerr << e.what() << '\n';
    return kNoInput;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const std::runtime_error& e) {
    // model_io reports unreadable files this way
    std::cerr << e.what() << '\n';
    return std::string(e.what()).find("cannot") != std::string::npos ? kNoInput : kDataErr;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kSoftware;
  }
  return kUsage;
}
