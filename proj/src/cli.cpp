#include "adwords/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include "adwords/acceptance.hpp"
#include "adwords/audit.hpp"
#include "adwords/engines.hpp"
#include "adwords/harness.hpp"
#include "adwords/instance.hpp"
#include "adwords/oracle.hpp"
#include "adwords/report_io.hpp"

namespace adwords {

namespace {

// Bad input detected after flag parsing; maps to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::uint64_t seed = 0;
  std::int64_t trials = 1;
  int jobs = 1;
  std::string out;
  std::string format = "json";
};

void add_output(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out, "Output file (default: stdout)");
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(c.out, std::ios::binary);
  if (!file) throw UsageError("cannot write " + c.out);
  file << text;
}

std::string seed_header(std::uint64_t seed) { return "# seed=" + std::to_string(seed) + "\n"; }

std::string fraction_text(const Ratio& r) {
  std::ostringstream out;
  out << r.numerator << "/" << r.denominator << " (" << std::setprecision(6) << r.value() << ")";
  return out.str();
}

Algorithm algorithm_or_native(const std::string& name, const Instance& instance) {
  if (name.empty()) return native_algorithm(instance.problem_class);
  try {
    return algorithm_from_string(name);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

// --- gen --------------------------------------------------------------------

struct GenArgs {
  std::string family;
  std::string problem_class = "general";
  int n = 10;
  int m = 4;
  Money w = 3;
  Money alpha = 2;
  int k = 3;
  double mu = 0.1;
  double density = 0.5;
};

void describe(const Instance& inst, const std::string& label, std::ostream& info) {
  info << label << "id=" << instance_id(inst);
  if (inst.problem_class == ProblemClass::kGeneral) info << " mu=" << fraction_text(mu(inst));
  info << "\n";
}

int cmd_gen(const GenArgs& g, const Common& c, std::ostream& out, std::ostream& err) {
  const ProblemClass cls = problem_class_from_string(g.problem_class);
  if (g.family == "example_three") {
    const auto [i1, i2, i3] = gen_example_three(g.w);
    const std::filesystem::path dir = c.out.empty() ? "." : c.out;
    std::filesystem::create_directories(dir);
    const Instance* all[] = {&i1, &i2, &i3};
    for (int t = 0; t < 3; ++t) {
      const auto path = dir / ("I" + std::to_string(t + 1) + ".json");
      write_instance(*all[t], path);
      describe(*all[t], path.string() + " ", out);
    }
    return kExitPass;
  }

  Instance inst;
  if (g.family == "upper_triangular") {
    inst = gen_upper_triangular(g.n);
  } else if (g.family == "example_no_surpass") {
    inst = gen_example_no_surpass(g.alpha, g.k);
  } else if (g.family == "random") {
    RandomParams p;
    p.problem_class = cls;
    p.n = g.n;
    p.m = g.m;
    p.density = g.density;
    p.seed = c.seed;
    inst = gen_random(p);
  } else if (g.family == "planted") {
    PlantedParams p;
    p.problem_class = cls;
    p.n = g.n;
    p.m = g.m;
    p.mu_target = g.mu;
    p.budget = g.w;
    p.seed = c.seed;
    inst = gen_planted(p);
  } else {
    throw UsageError("unknown family \"" + g.family + "\"");
  }
  if (c.out.empty()) {
    out << to_json_text(inst);
    describe(inst, "", err);
  } else {
    write_instance(inst, c.out);
    describe(inst, c.out + " ", out);
  }
  return kExitPass;
}

// --- run --------------------------------------------------------------------

int cmd_run(const std::string& path, const std::string& algorithm, const std::string& ranks_path,
            bool trace, const Common& c, std::ostream& out) {
  const Instance inst = read_instance(path);
  const Algorithm alg = algorithm_or_native(algorithm, inst);
  RankAssignment ranks;
  if (!ranks_path.empty()) {
    ranks = read_ranks(ranks_path);
    if (ranks.size() != inst.num_bidders()) {
      throw UsageError("ranks file has " + std::to_string(ranks.size()) + " entries for " +
                       std::to_string(inst.num_bidders()) + " bidders");
    }
  } else {
    ranks = draw_ranks(inst, c.seed);
  }
  RunOptions options;
  options.trace = trace;
  const RunOutcome outcome = run(alg, inst, ranks, options);
  const std::optional<std::uint64_t> seed =
      ranks_path.empty() ? std::optional<std::uint64_t>(c.seed) : std::nullopt;
  if (c.format == "csv") {
    std::ostringstream text;
    if (seed) text << seed_header(*seed);
    text << "query,bidder,bid\n";
    for (const MatchedEdge& e : outcome.matching) {
      text << e.query << "," << e.bidder << "," << e.bid << "\n";
    }
    emit(c, text.str(), out);
  } else {
    Json doc = to_json(outcome, seed);
    if (!ranks_path.empty()) doc["ranks"] = ranks.rank;
    emit(c, dump(doc), out);
  }
  return kExitPass;
}

// --- ratio ------------------------------------------------------------------

int cmd_ratio(const std::string& path, const std::string& algorithm, const Common& c,
              std::ostream& out) {
  const Instance inst = read_instance(path);
  const Algorithm alg = algorithm_or_native(algorithm, inst);
  EstimateOptions options;
  options.jobs = c.jobs;
  options.allow_upper_bound = true;
  const RatioEstimate e = estimate_ratio(inst, alg, c.trials, c.seed, options);
  emit(c, c.format == "csv" ? ratio_csv({e}) : dump(to_json(e)), out);
  return kExitPass;
}

// --- audit ------------------------------------------------------------------

int cmd_audit(const std::string& path, const std::string& ranks_path, const Common& c,
              std::ostream& out) {
  const Instance inst = read_instance(path);
  std::vector<AuditReport> reports;
  if (!ranks_path.empty()) {
    const RankAssignment ranks = read_ranks(ranks_path);
    if (ranks.size() != inst.num_bidders()) {
      throw UsageError("ranks file has " + std::to_string(ranks.size()) + " entries for " +
                       std::to_string(inst.num_bidders()) + " bidders");
    }
    reports.push_back(audit(inst, ranks));
  } else {
    reports.resize(c.trials);
    for_each_trial(c.trials, c.jobs, [&](std::int64_t t) {
      reports[t] = audit(inst, trial_ranks(inst, c.seed, t));
    });
  }
  if (c.format == "csv") {
    std::string text = audit_csv(reports);
    if (ranks_path.empty() && reports.size() != 1) text = seed_header(c.seed) + text;
    emit(c, text, out);
    return kExitPass;
  }
  Json doc = Json::object();
  if (ranks_path.empty()) doc["seed"] = c.seed;
  doc["instance_id"] = instance_id(inst);
  doc["class"] = to_string(inst.problem_class);
  std::int64_t violations = 0, edges = 0, queries = 0, queries_violated = 0, runs_violated = 0;
  bool lemmas_ok = true;
  for (const AuditReport& r : reports) {
    violations += static_cast<std::int64_t>(r.no_surpassing->violations.size());
    edges += r.no_surpassing->edges_tested;
    queries += r.no_surpassing->queries;
    queries_violated += r.no_surpassing->queries_violated;
    if (r.run_violated()) ++runs_violated;
    lemmas_ok = lemmas_ok && r.lemmas_ok();
  }
  Json summary = Json::object();
  summary["runs"] = static_cast<std::int64_t>(reports.size());
  summary["violations"] = violations;
  summary["edge_rate"] = edges ? double(violations) / double(edges) : 0.0;
  summary["query_rate"] = queries ? double(queries_violated) / double(queries) : 0.0;
  summary["run_rate"] = double(runs_violated) / double(reports.size());
  summary["lemmas_ok"] = lemmas_ok;
  doc["summary"] = std::move(summary);
  Json list = Json::array();
  for (const AuditReport& r : reports) list.push_back(to_json(r));
  doc["reports"] = std::move(list);
  emit(c, dump(doc), out);
  return kExitPass;
}

// --- sweep ------------------------------------------------------------------

int cmd_sweep(const std::vector<double>& mus, int m, Money budget, const Common& c,
              std::ostream& out) {
  SweepParams params;
  params.m = m;
  params.budget = budget;
  params.jobs = c.jobs;
  const auto rows = sweep_mu(mus, params, c.trials, c.seed);
  if (c.format == "csv") {
    emit(c, sweep_csv(rows, c.seed), out);
  } else {
    Json doc = Json::object();
    doc["seed"] = c.seed;
    Json list = Json::array();
    for (const SweepRow& r : rows) list.push_back(to_json(r));
    doc["rows"] = std::move(list);
    emit(c, dump(doc), out);
  }
  return kExitPass;
}

// --- verify -----------------------------------------------------------------

int cmd_verify(const std::string& scale, const Common& c, std::ostream& out) {
  AcceptanceOptions options;
  options.scale = scale_from_string(scale);
  options.jobs = c.jobs;
  if (c.seed != 0) options.seed = c.seed;
  std::ostringstream text;
  options.on_result = [&](const CriterionResult& r) {
    if (c.out.empty() && c.format == "json") out << format_result(r) << std::endl;
  };
  const auto results = run_acceptance(options);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  if (c.format == "csv") {
    text << seed_header(options.seed) << "criterion,name,passed,seconds,detail\n";
    for (const auto& r : results) {
      std::string detail = r.detail;
      std::replace(detail.begin(), detail.end(), ',', ';');
      text << r.id << "," << r.name << "," << (r.passed ? 1 : 0) << "," << r.seconds << ","
           << detail << "\n";
    }
    emit(c, text.str(), out);
  } else if (!c.out.empty()) {
    for (const auto& r : results) text << format_result(r) << "\n";
    emit(c, text.str(), out);
  }
  if (c.format == "json") {
    out << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
        << " (scale " << scale << ", seed " << options.seed << ")\n";
  }
  return failed ? kExitFailure : kExitPass;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Budget-oblivious online matching: generators, engines, oracles and audits"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  Common common;
  GenArgs gen;
  std::string path, algorithm, ranks_path, scale = "smoke";
  bool trace = false;
  std::vector<double> mus{0.2, 0.1, 0.05, 0.01};
  int sweep_m = 8;
  Money sweep_budget = 1000;

  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", common.seed, "Master seed (64-bit)")->capture_default_str();
  };
  auto add_trials = [&](CLI::App* cmd) {
    cmd->add_option("--trials", common.trials, "Monte-Carlo trials")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--jobs", common.jobs, "Worker lanes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  CLI::App* g = app.add_subcommand("gen", "Generate an instance");
  g->add_option("--family", gen.family, "Instance family")
      ->required()
      ->check(CLI::IsMember(
          {"upper_triangular", "example_three", "example_no_surpass", "random", "planted"}));
  g->add_option("class", gen.problem_class, "Problem class for random and planted families")
      ->check(CLI::IsMember({"obm", "single_valued", "general"}))
      ->capture_default_str();
  g->add_option("--n", gen.n, "Number of queries")->capture_default_str();
  g->add_option("--m", gen.m, "Number of bidders")->capture_default_str();
  g->add_option("--W", gen.w, "Budget: example_three W, planted general budget scale");
  g->add_option("--alpha", gen.alpha, "example_no_surpass bid alpha")->capture_default_str();
  g->add_option("--k", gen.k, "example_no_surpass query count")->capture_default_str();
  g->add_option("--mu", gen.mu, "planted general mu target")->capture_default_str();
  g->add_option("--density", gen.density, "random edge density")->capture_default_str();
  add_seed(g);
  g->add_option("--out", common.out, "Output file (example_three: directory)");

  CLI::App* r = app.add_subcommand("run", "Run one engine once");
  r->add_option("instance", path, "Instance file")->required();
  r->add_option("algorithm", algorithm,
                "ranking | single_valued | general | greedy | msvv (default: by class)");
  add_seed(r);
  r->add_option("--ranks", ranks_path, "JSON array of per-bidder ranks in [0, 1]");
  r->add_flag("--trace", trace, "Include the per-step trace");
  add_output(r, common);

  CLI::App* ra = app.add_subcommand("ratio", "Estimate the competitive ratio on an instance");
  ra->add_option("instance", path, "Instance file")->required();
  ra->add_option("algorithm", algorithm, "Engine (default: by class)");
  add_seed(ra);
  add_trials(ra);
  add_output(ra, common);

  CLI::App* au = app.add_subcommand("audit", "Audit no-surpassing and the run lemmas");
  au->add_option("instance", path, "Instance file")->required();
  add_seed(au);
  add_trials(au);
  au->add_option("--ranks", ranks_path, "Audit these ranks instead of seeded draws");
  add_output(au, common);

  CLI::App* sw = app.add_subcommand("sweep", "Sweep mu on planted general instances");
  sw->add_option("--mu", mus, "mu targets")->delimiter(',')->capture_default_str();
  sw->add_option("--m", sweep_m, "Bidders per instance")->capture_default_str();
  sw->add_option("--W", sweep_budget, "Budget scale")->capture_default_str();
  add_seed(sw);
  add_trials(sw);
  add_output(sw, common);

  CLI::App* v = app.add_subcommand("verify", "Run the acceptance suite");
  v->add_option("--scale", scale, "Suite scale")
      ->check(CLI::IsMember({"smoke", "full"}))
      ->capture_default_str();
  v->add_option("--seed", common.seed, "Master seed (0: built-in default)");
  v->add_option("--jobs", common.jobs, "Worker lanes")->check(CLI::PositiveNumber);
  add_output(v, common);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (g->parsed()) {
      if (gen.family == "example_three" && g->count("--W") == 0) gen.w = 3;
      if (gen.family == "planted" && g->count("--W") == 0) gen.w = 100;
      return cmd_gen(gen, common, out, err);
    }
    if (r->parsed()) return cmd_run(path, algorithm, ranks_path, trace, common, out);
    if (ra->parsed()) return cmd_ratio(path, algorithm, common, out);
    if (au->parsed()) return cmd_audit(path, ranks_path, common, out);
    if (sw->parsed()) return cmd_sweep(mus, sweep_m, sweep_budget, common, out);
    if (v->parsed()) return cmd_verify(scale, common, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace adwords
