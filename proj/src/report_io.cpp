#include "adwords/report_io.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace adwords {

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

namespace {

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

const Json& require(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) field_error(where, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(where, std::string("missing field \"") + key + "\"");
  return *it;
}

template <class T>
T read_as(const Json& obj, const char* key, const std::string& where) {
  try {
    return require(obj, key, where).get<T>();
  } catch (const nlohmann::json::type_error& e) {
    field_error(where + "." + key, e.what());
  }
}

// Round-trippable text for CSV cells.
std::string num(double x) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10) << x;
  return out.str();
}

Json multiset_json(const CopyMultiset& m) { return Json(m); }

}  // namespace

// --- run outcomes -----------------------------------------------------------

Json to_json(const RunOutcome& outcome, std::optional<std::uint64_t> seed) {
  Json doc = Json::object();
  if (seed) doc["seed"] = *seed;
  Json matching = Json::array();
  for (const MatchedEdge& e : outcome.matching) matching.push_back({e.query, e.bidder, e.bid});
  doc["matching"] = std::move(matching);
  doc["W"] = outcome.real_money;
  doc["Wf"] = outcome.fake_money;
  doc["u"] = outcome.utility;
  doc["r"] = outcome.revenue;
  doc["leftover"] = outcome.leftover;
  doc["degree"] = outcome.degree;
  if (outcome.trace) {
    Json steps = Json::array();
    for (std::size_t i = 0; i < outcome.trace->steps.size(); ++i) {
      const TraceStep& s = outcome.trace->steps[i];
      Json step = Json::object();
      step["query"] = i;
      step["T"] = multiset_json(s.available);
      step["S"] = multiset_json(s.neighbours);
      Json offers = Json::array();
      for (const Offer& o : s.offers) offers.push_back({o.bidder, o.bid, o.effective});
      step["offers"] = std::move(offers);
      step["accepted"] = s.accepted ? Json(s.accepted->bidder) : Json(nullptr);
      steps.push_back(std::move(step));
    }
    doc["trace"] = std::move(steps);
  }
  return doc;
}

RunOutcome outcome_from_json(const Json& doc) {
  RunOutcome out;
  const Json& matching = require(doc, "matching", "outcome");
  if (!matching.is_array()) field_error("outcome.matching", "expected an array");
  for (const Json& e : matching) {
    if (!e.is_array() || e.size() != 3) field_error("outcome.matching", "expected [q, bidder, bid]");
    out.matching.push_back(MatchedEdge{e[0].get<QueryId>(), e[1].get<BidderId>(), e[2].get<Money>()});
  }
  out.real_money = read_as<Money>(doc, "W", "outcome");
  out.fake_money = read_as<Money>(doc, "Wf", "outcome");
  out.utility = read_as<std::vector<double>>(doc, "u", "outcome");
  out.revenue = read_as<std::vector<double>>(doc, "r", "outcome");
  if (doc.contains("leftover")) out.leftover = read_as<std::vector<Money>>(doc, "leftover", "outcome");
  if (doc.contains("degree")) out.degree = read_as<std::vector<Money>>(doc, "degree", "outcome");
  if (doc.contains("trace")) {
    out.trace.emplace();
    for (const Json& step : doc["trace"]) {
      TraceStep s;
      s.available = read_as<CopyMultiset>(step, "T", "outcome.trace");
      s.neighbours = read_as<CopyMultiset>(step, "S", "outcome.trace");
      for (const Json& o : require(step, "offers", "outcome.trace")) {
        s.offers.push_back(Offer{o[0].get<BidderId>(), o[1].get<Money>(), o[2].get<double>()});
      }
      const Json& accepted = require(step, "accepted", "outcome.trace");
      if (!accepted.is_null()) {
        const auto j = accepted.get<BidderId>();
        for (const Offer& o : s.offers) {
          if (o.bidder == j) s.accepted = o;
        }
      }
      out.trace->steps.push_back(std::move(s));
    }
  }
  return out;
}

Json to_json(const OfflineOptimum& opt) {
  Json doc = Json::object();
  doc["value"] = opt.value;
  doc["kind"] = to_string(opt.kind);
  if (opt.witness) {
    Json w = Json::array();
    for (const Assignment& a : *opt.witness) w.push_back({a.query, a.bidder});
    doc["witness"] = std::move(w);
  }
  return doc;
}

OfflineOptimum optimum_from_json(const Json& doc) {
  OfflineOptimum opt;
  opt.value = read_as<Money>(doc, "value", "optimum");
  const auto kind = read_as<std::string>(doc, "kind", "optimum");
  if (kind == "exact") {
    opt.kind = OptimumKind::kExact;
  } else if (kind == "upper_bound") {
    opt.kind = OptimumKind::kUpperBound;
  } else if (kind == "planted_certificate") {
    opt.kind = OptimumKind::kPlantedCertificate;
  } else {
    field_error("optimum.kind", "unknown kind \"" + kind + "\"");
  }
  if (doc.contains("witness")) {
    std::vector<Assignment> w;
    for (const Json& a : doc["witness"]) w.push_back(Assignment{a[0].get<QueryId>(), a[1].get<BidderId>()});
    opt.witness = std::move(w);
  }
  return opt;
}

// --- ranks ------------------------------------------------------------------

std::string ranks_to_json_text(const RankAssignment& ranks) { return Json(ranks.rank).dump() + "\n"; }

RankAssignment ranks_from_json_text(const std::string& text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed ranks file: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError("ranks file must be a JSON array of numbers");
  std::vector<double> w;
  for (std::size_t t = 0; t < doc.size(); ++t) {
    if (!doc[t].is_number()) throw ParseError("ranks[" + std::to_string(t) + "]: expected a number");
    w.push_back(doc[t].get<double>());
  }
  return ranks_from(std::move(w));
}

RankAssignment read_ranks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return ranks_from_json_text(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

// --- audit ------------------------------------------------------------------

Json to_json(const AuditReport& report) {
  Json doc = Json::object();
  doc["seed"] = report.seed ? Json(*report.seed) : Json(nullptr);
  doc["ranks"] = report.ranks;
  if (report.no_surpassing) {
    const NoSurpassReport& ns = *report.no_surpassing;
    Json v = Json::array();
    for (const NoSurpassViolation& x : ns.violations) {
      Json row = Json::object();
      row["query"] = x.query;
      row["bidder"] = x.bidder;
      row["ebid"] = x.effective_bid;
      row["beta"] = x.removal_best;
      row["surpassing_bid"] = x.surpassing_bid;
      row["surpassing_bidder"] = x.surpassing_bidder;
      v.push_back(std::move(row));
    }
    Json ns_doc = Json::object();
    ns_doc["edges_tested"] = ns.edges_tested;
    ns_doc["antecedent_true"] = ns.antecedent_true;
    ns_doc["violations"] = static_cast<std::int64_t>(ns.violations.size());
    ns_doc["queries"] = ns.queries;
    ns_doc["queries_violated"] = ns.queries_violated;
    ns_doc["edge_rate"] = ns.edge_rate();
    ns_doc["query_rate"] = ns.query_rate();
    ns_doc["run_violated"] = report.run_violated();
    ns_doc["records"] = std::move(v);
    doc["no_surpassing"] = std::move(ns_doc);
  }
  if (!report.multiset.empty()) {
    Json ms = Json::array();
    for (const MultisetVerdict& m : report.multiset) {
      Json row = Json::object();
      row["removed"] = m.removed;
      row["steps"] = m.steps;
      row["ok"] = m.ok();
      row["upper_equal_failures"] = m.upper_equal_failures;
      row["lower_subset_failures"] = m.lower_subset_failures;
      row["neighbour_failures"] = m.neighbour_failures;
      ms.push_back(std::move(row));
    }
    doc["multiset"] = std::move(ms);
  }
  if (report.thresholds) {
    const ThresholdVerdict& t = *report.thresholds;
    auto failures = [](const std::vector<ThresholdFailure>& list) {
      Json out = Json::array();
      for (const ThresholdFailure& f : list) {
        Json row = Json::object();
        row["query"] = f.query;
        row["bidder"] = f.bidder;
        row["utility"] = f.utility;
        row["threshold"] = f.threshold;
        row["price"] = f.price;
        out.push_back(std::move(row));
      }
      return out;
    };
    Json th = Json::object();
    th["edges_checked"] = t.edges_checked;
    th["ok"] = t.ok();
    th["dominance_failures"] = failures(t.dominance_failures);
    th["cheap_edges"] = t.cheap_edges;
    th["unmatched_when_cheap"] = failures(t.unmatched_when_cheap);
    doc["thresholds"] = std::move(th);
  }
  return doc;
}

std::string audit_csv(const std::vector<AuditReport>& reports) {
  std::ostringstream out;
  if (reports.size() == 1 && reports.front().seed) out << "# seed=" << *reports.front().seed << "\n";
  out << "seed,query,bidder,ebid,beta,surpassing_bid,surpassing_bidder\n";
  for (const AuditReport& r : reports) {
    if (!r.no_surpassing) continue;
    for (const NoSurpassViolation& v : r.no_surpassing->violations) {
      out << (r.seed ? std::to_string(*r.seed) : std::string()) << "," << v.query << "," << v.bidder
          << "," << num(v.effective_bid) << "," << num(v.removal_best) << "," << num(v.surpassing_bid)
          << "," << v.surpassing_bidder << "\n";
    }
  }
  return out.str();
}

// --- harness ----------------------------------------------------------------

Json to_json(const RatioEstimate& e) {
  Json doc = Json::object();
  doc["seed"] = e.seed;
  doc["instance_id"] = e.instance_id;
  doc["algorithm"] = e.algorithm;
  doc["trials"] = e.trials;
  doc["mean_W"] = e.mean_real;
  doc["mean_Wf"] = e.mean_fake;
  doc["opt"] = e.opt;
  doc["opt_kind"] = to_string(e.opt_kind);
  doc["ratio"] = e.ratio;
  doc["se"] = e.se;
  doc["ci_lo"] = e.ci_lo;
  doc["ci_hi"] = e.ci_hi;
  doc["total_ratio"] = e.total_ratio;
  doc["total_se"] = e.total_se;
  return doc;
}

RatioEstimate ratio_from_json(const Json& doc) {
  RatioEstimate e;
  e.seed = read_as<std::uint64_t>(doc, "seed", "ratio");
  e.instance_id = read_as<std::string>(doc, "instance_id", "ratio");
  e.algorithm = read_as<std::string>(doc, "algorithm", "ratio");
  e.trials = read_as<std::int64_t>(doc, "trials", "ratio");
  e.mean_real = read_as<double>(doc, "mean_W", "ratio");
  e.mean_fake = read_as<double>(doc, "mean_Wf", "ratio");
  e.opt = read_as<Money>(doc, "opt", "ratio");
  e.opt_kind = optimum_from_json(Json{{"value", 0}, {"kind", read_as<std::string>(doc, "opt_kind", "ratio")}}).kind;
  e.ratio = read_as<double>(doc, "ratio", "ratio");
  e.se = read_as<double>(doc, "se", "ratio");
  e.ci_lo = read_as<double>(doc, "ci_lo", "ratio");
  e.ci_hi = read_as<double>(doc, "ci_hi", "ratio");
  e.total_ratio = read_as<double>(doc, "total_ratio", "ratio");
  e.total_se = read_as<double>(doc, "total_se", "ratio");
  return e;
}

std::string ratio_csv(const std::vector<RatioEstimate>& rows) {
  std::ostringstream out;
  if (!rows.empty()) out << "# seed=" << rows.front().seed << "\n";
  out << "instance_id,algorithm,trials,mean_W,mean_Wf,opt,ratio,se,ci_lo,ci_hi,seed,opt_kind,"
         "total_ratio,total_se\n";
  for (const RatioEstimate& e : rows) {
    out << e.instance_id << "," << e.algorithm << "," << e.trials << "," << num(e.mean_real) << ","
        << num(e.mean_fake) << "," << e.opt << "," << num(e.ratio) << "," << num(e.se) << ","
        << num(e.ci_lo) << "," << num(e.ci_hi) << "," << e.seed << "," << to_string(e.opt_kind) << ","
        << num(e.total_ratio) << "," << num(e.total_se) << "\n";
  }
  return out.str();
}

Json to_json(const ContributionEstimate& e) {
  Json doc = Json::object();
  doc["bidder"] = e.target.bidder;
  doc["queries"] = e.target.queries;
  doc["mean"] = e.mean;
  doc["se"] = e.se;
  doc["bound"] = e.bound;
  doc["margin"] = e.margin;
  doc["trials"] = e.trials;
  doc["conditional"] = e.conditional;
  return doc;
}

std::string contribution_csv(const std::vector<ContributionEstimate>& rows, std::uint64_t seed) {
  std::ostringstream out;
  out << "# seed=" << seed << "\n";
  out << "bidder,queries,mean,se,bound,margin,trials,conditional\n";
  for (const ContributionEstimate& e : rows) {
    out << e.target.bidder << ",";
    for (std::size_t t = 0; t < e.target.queries.size(); ++t) {
      out << (t ? " " : "") << e.target.queries[t];
    }
    out << "," << num(e.mean) << "," << num(e.se) << "," << num(e.bound) << "," << num(e.margin) << ","
        << e.trials << "," << (e.conditional ? 1 : 0) << "\n";
  }
  return out.str();
}

Json to_json(const FakeMoneyReport& r) {
  Json doc = Json::object();
  doc["seed"] = r.seed;
  doc["trials"] = r.trials;
  doc["ceiling"] = r.ceiling;
  doc["total_budget"] = r.total_budget;
  doc["mu"] = {r.mu.numerator, r.mu.denominator};
  doc["mean_fraction"] = r.mean_fraction;
  doc["max_fraction"] = r.max_fraction;
  doc["within_mu"] = r.within_mu;
  doc["fake"] = r.fake;
  return doc;
}

Json to_json(const SweepRow& row) {
  Json doc = Json::object();
  doc["mu_target"] = row.mu_target;
  doc["mu_actual"] = row.mu_actual;
  doc["ratio"] = row.ratio;
  doc["wf_fraction"] = row.wf_fraction;
  doc["violations_sampled"] = row.violations_sampled;
  doc["ratio_se"] = row.ratio_se;
  doc["total_ratio"] = row.total_ratio;
  doc["total_se"] = row.total_se;
  doc["wf_fraction_max"] = row.wf_fraction_max;
  doc["audited_runs"] = row.audited_runs;
  doc["trials"] = row.trials;
  doc["queries"] = row.queries;
  doc["wf_within_mu"] = row.wf_within_mu;
  doc["clean_runs"] = row.clean_runs;
  doc["clean_total_ratio"] = row.clean_total_ratio;
  doc["clean_total_se"] = row.clean_total_se;
  return doc;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, std::uint64_t seed) {
  std::ostringstream out;
  out << "# seed=" << seed << "\n";
  out << "mu_target,mu_actual,ratio,wf_fraction,violations_sampled,ratio_se,total_ratio,total_se,"
         "wf_fraction_max,audited_runs,trials,queries,wf_within_mu,clean_runs,clean_total_ratio,"
         "clean_total_se\n";
  for (const SweepRow& r : rows) {
    out << num(r.mu_target) << "," << num(r.mu_actual) << "," << num(r.ratio) << "," << num(r.wf_fraction)
        << "," << r.violations_sampled << "," << num(r.ratio_se) << "," << num(r.total_ratio) << ","
        << num(r.total_se) << "," << num(r.wf_fraction_max) << "," << r.audited_runs << "," << r.trials
        << "," << r.queries << "," << (r.wf_within_mu ? 1 : 0) << "," << r.clean_runs << ","
        << num(r.clean_total_ratio) << "," << num(r.clean_total_se) << "\n";
  }
  return out.str();
}

// --- CSV reading ------------------------------------------------------------

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == name) return c;
  }
  throw ParseError("CSV has no column \"" + name + "\"");
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(s);
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# seed=", 0) == 0) {
      try {
        table.seed = std::stoull(line.substr(7));
      } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) + ": bad seed header");
      }
      continue;
    }
    if (line[0] == '#') continue;
    auto cells = split(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
    } else {
      if (cells.size() != table.header.size()) {
        throw ParseError("line " + std::to_string(line_no) + ": expected " +
                         std::to_string(table.header.size()) + " cells, got " +
                         std::to_string(cells.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace adwords
