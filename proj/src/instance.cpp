#include "adwords/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adwords/rng.hpp"

namespace adwords {

using json = nlohmann::json;

std::string to_string(ProblemClass cls) {
  switch (cls) {
    case ProblemClass::kObm:
      return "obm";
    case ProblemClass::kSingleValued:
      return "single_valued";
    case ProblemClass::kGeneral:
      return "general";
  }
  return "general";
}

ProblemClass problem_class_from_string(const std::string& name) {
  if (name == "obm") return ProblemClass::kObm;
  if (name == "single_valued") return ProblemClass::kSingleValued;
  if (name == "general") return ProblemClass::kGeneral;
  throw std::invalid_argument("unknown problem class '" + name + "'");
}

Money match_cap(const Instance& instance, BidderId j) {
  const Bidder& b = instance.bidders.at(j);
  switch (instance.problem_class) {
    case ProblemClass::kObm:
      return 1;
    case ProblemClass::kSingleValued:
      return b.cap.value_or(1);
    case ProblemClass::kGeneral:
      return b.budget;
  }
  return b.budget;
}

Money single_value(const Instance& instance, BidderId j) {
  const Bidder& b = instance.bidders.at(j);
  if (instance.problem_class == ProblemClass::kObm) return 1;
  return b.value.value_or(1);
}

Money total_budget(const Instance& instance) {
  Money total = 0;
  for (const Bidder& b : instance.bidders) total += b.budget;
  return total;
}

std::optional<Money> find_bid(const Instance& instance, QueryId q, BidderId j) {
  for (const Edge& e : instance.edges.at(q)) {
    if (e.bidder == j) return e.bid;
  }
  return std::nullopt;
}

namespace {

Violation violation(std::optional<QueryId> q, std::optional<BidderId> j,
                    std::string message) {
  return Violation{q, j, std::move(message)};
}

std::vector<Assignment> sorted_by_query(std::vector<Assignment> a) {
  std::sort(a.begin(), a.end(), [](const Assignment& x, const Assignment& y) {
    return x.query < y.query;
  });
  return a;
}

}  // namespace

std::vector<Violation> check_assignment(const Instance& instance,
                                        const std::vector<Assignment>& assignment) {
  std::vector<Violation> out;
  const auto n = static_cast<QueryId>(instance.num_queries());
  const auto m = static_cast<BidderId>(instance.num_bidders());
  std::vector<bool> used(instance.num_queries(), false);
  std::vector<Money> spend(instance.num_bidders(), 0);
  std::vector<Money> count(instance.num_bidders(), 0);
  for (const Assignment& a : assignment) {
    if (a.query < 0 || a.query >= n) {
      out.push_back(violation(a.query, a.bidder, "assigned query out of range"));
      continue;
    }
    if (a.bidder < 0 || a.bidder >= m) {
      out.push_back(violation(a.query, a.bidder, "assigned bidder out of range"));
      continue;
    }
    if (used[a.query]) {
      out.push_back(violation(a.query, a.bidder, "query assigned more than once"));
    }
    used[a.query] = true;
    const auto bid = find_bid(instance, a.query, a.bidder);
    if (!bid) {
      out.push_back(violation(a.query, a.bidder, "assignment uses a non-edge"));
      continue;
    }
    spend[a.bidder] += *bid;
    count[a.bidder] += 1;
  }
  for (BidderId j = 0; j < m; ++j) {
    if (spend[j] > instance.bidders[j].budget) {
      out.push_back(violation(std::nullopt, j, "assignment exceeds budget"));
    }
    if (instance.problem_class == ProblemClass::kSingleValued &&
        count[j] > match_cap(instance, j)) {
      out.push_back(violation(std::nullopt, j, "assignment exceeds k_j"));
    }
  }
  return out;
}

Money assignment_value(const Instance& instance,
                       const std::vector<Assignment>& assignment) {
  Money total = 0;
  for (const Assignment& a : assignment) {
    total += find_bid(instance, a.query, a.bidder).value_or(0);
  }
  return total;
}

std::vector<Violation> validate(const Instance& instance) {
  std::vector<Violation> out;
  const auto m = static_cast<BidderId>(instance.num_bidders());
  const ProblemClass cls = instance.problem_class;

  for (BidderId j = 0; j < m; ++j) {
    const Bidder& b = instance.bidders[j];
    if (b.id != j) {
      out.push_back(violation(std::nullopt, j, "bidder ids must be 0..m-1 in order"));
    }
    if (b.budget < 1) out.push_back(violation(std::nullopt, j, "budget must be >= 1"));
    if (cls == ProblemClass::kObm && b.budget != 1) {
      out.push_back(violation(std::nullopt, j, "OBM budgets must be 1"));
    }
    if (cls == ProblemClass::kSingleValued) {
      if (!b.value || !b.cap) {
        out.push_back(violation(std::nullopt, j, "single-valued bidder needs b and k"));
      } else if (*b.value < 1 || *b.cap < 1) {
        out.push_back(violation(std::nullopt, j, "b and k must be >= 1"));
      } else if (*b.value * *b.cap != b.budget) {
        out.push_back(violation(std::nullopt, j, "budget must equal k * b"));
      }
    }
  }

  for (QueryId q = 0; q < static_cast<QueryId>(instance.num_queries()); ++q) {
    std::set<BidderId> seen;
    for (const Edge& e : instance.edges[q]) {
      if (e.bidder < 0 || e.bidder >= m) {
        out.push_back(violation(q, e.bidder, "edge to unknown bidder"));
        continue;
      }
      if (!seen.insert(e.bidder).second) {
        out.push_back(violation(q, e.bidder, "duplicate edge"));
      }
      if (e.bid < 1) {
        out.push_back(violation(q, e.bidder, "bids must be positive integers"));
        continue;
      }
      const Bidder& b = instance.bidders[e.bidder];
      switch (cls) {
        case ProblemClass::kObm:
          if (e.bid != 1) out.push_back(violation(q, e.bidder, "OBM bids must be 1"));
          break;
        case ProblemClass::kSingleValued:
          if (b.value && e.bid != *b.value) {
            out.push_back(violation(q, e.bidder, "single-valued bid must equal b_j"));
          }
          break;
        case ProblemClass::kGeneral:
          if (e.bid > b.budget) {
            out.push_back(violation(q, e.bidder, "bid exceeds budget"));
          }
          break;
      }
    }
  }

  if (instance.planted_opt) {
    for (Violation& v : check_assignment(instance, instance.planted_opt->assignment)) {
      v.message = "planted_opt: " + v.message;
      out.push_back(std::move(v));
    }
  }
  return out;
}

void require_valid(const Instance& instance) {
  const auto violations = validate(instance);
  if (violations.empty()) return;
  std::ostringstream msg;
  msg << "invalid " << to_string(instance.problem_class) << " instance:";
  for (const Violation& v : violations) {
    msg << "\n  ";
    if (v.query) msg << "query " << *v.query << ": ";
    if (v.bidder) msg << "bidder " << *v.bidder << ": ";
    msg << v.message;
  }
  throw std::invalid_argument(msg.str());
}

Instance as_class(const Instance& instance, ProblemClass target) {
  Instance out = instance;
  out.problem_class = target;
  const auto m = static_cast<BidderId>(instance.num_bidders());
  switch (target) {
    case ProblemClass::kObm:
    case ProblemClass::kGeneral:
      for (Bidder& b : out.bidders) {
        b.value.reset();
        b.cap.reset();
      }
      break;
    case ProblemClass::kSingleValued: {
      std::vector<std::optional<Money>> value(m);
      for (const auto& edges : instance.edges) {
        for (const Edge& e : edges) {
          if (e.bidder < 0 || e.bidder >= m) continue;
          if (value[e.bidder] && *value[e.bidder] != e.bid) {
            throw std::invalid_argument("bidder " + std::to_string(e.bidder) +
                                        " bids more than one value");
          }
          value[e.bidder] = e.bid;
        }
      }
      for (BidderId j = 0; j < m; ++j) {
        Bidder& b = out.bidders[j];
        const Money v = value[j].value_or(1);
        if (b.budget % v != 0) {
          throw std::invalid_argument("bidder " + std::to_string(j) +
                                      ": budget is not a multiple of its bid");
        }
        b.value = v;
        b.cap = b.budget / v;
      }
      break;
    }
  }
  require_valid(out);
  return out;
}

Ratio mu(const Instance& instance) {
  std::vector<Money> max_bid(instance.num_bidders(), 0);
  for (const auto& edges : instance.edges) {
    for (const Edge& e : edges) max_bid.at(e.bidder) = std::max(max_bid[e.bidder], e.bid);
  }
  Ratio best{0, 1};
  for (std::size_t j = 0; j < max_bid.size(); ++j) {
    if (max_bid[j] == 0) continue;
    const Ratio r{max_bid[j] - 1, instance.bidders[j].budget};
    if (best < r) best = r;
  }
  return best;
}

Money fake_money_ceiling(const Instance& instance) {
  std::vector<Money> max_bid(instance.num_bidders(), 0);
  for (const auto& edges : instance.edges) {
    for (const Edge& e : edges) max_bid.at(e.bidder) = std::max(max_bid[e.bidder], e.bid);
  }
  Money total = 0;
  for (Money b : max_bid) total += std::max<Money>(b - 1, 0);
  return total;
}

// --- generators -------------------------------------------------------------

namespace {

std::vector<Bidder> unit_bidders(int m) {
  std::vector<Bidder> out(m);
  for (int j = 0; j < m; ++j) out[j] = Bidder{j, 1, std::nullopt, std::nullopt};
  return out;
}

// Reorders queries by `order` (new position -> old query) and remaps the
// planted assignment accordingly.
Instance permute_queries(Instance in, const std::vector<QueryId>& order) {
  std::vector<QueryId> new_index(order.size());
  std::vector<std::vector<Edge>> edges(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    edges[pos] = std::move(in.edges[order[pos]]);
    new_index[order[pos]] = static_cast<QueryId>(pos);
  }
  in.edges = std::move(edges);
  if (in.planted_opt) {
    for (Assignment& a : in.planted_opt->assignment) a.query = new_index[a.query];
    in.planted_opt->assignment = sorted_by_query(std::move(in.planted_opt->assignment));
  }
  return in;
}

void sort_edges(Instance& instance) {
  for (auto& edges : instance.edges) {
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.bidder < b.bidder; });
  }
}

// Adds up to `count` edges from query q to bidders it does not yet reach.
template <class BidFn>
void add_distractors(std::vector<Edge>& edges, int m, int count, Rng& rng, BidFn bid_for) {
  std::vector<BidderId> candidates;
  for (BidderId j = 0; j < m; ++j) {
    const bool present = std::any_of(edges.begin(), edges.end(),
                                     [j](const Edge& e) { return e.bidder == j; });
    if (!present) candidates.push_back(j);
  }
  rng.shuffle(candidates.begin(), candidates.end());
  const auto take = std::min<std::size_t>(candidates.size(), std::max(count, 0));
  for (std::size_t t = 0; t < take; ++t) {
    edges.push_back(Edge{candidates[t], bid_for(candidates[t])});
  }
}

}  // namespace

Instance gen_upper_triangular(int n) {
  if (n < 1) throw std::invalid_argument("upper_triangular requires n >= 1");
  Instance out;
  out.problem_class = ProblemClass::kObm;
  out.bidders = unit_bidders(n);
  out.edges.resize(n);
  PlantedSolution planted;
  for (int i = 0; i < n; ++i) {
    for (int g = i; g < n; ++g) out.edges[i].push_back(Edge{g, 1});
    planted.assignment.push_back(Assignment{i, i});
  }
  out.planted_opt = std::move(planted);
  return out;
}

std::tuple<Instance, Instance, Instance> gen_example_three(Money w) {
  if (w < 1) throw std::invalid_argument("example_three requires W >= 1");
  Instance base;
  base.problem_class = ProblemClass::kGeneral;
  base.bidders = {Bidder{0, w, std::nullopt, std::nullopt},
                  Bidder{1, w, std::nullopt, std::nullopt}};

  // First W unit queries go to bidder 0 in the planted solution, the big
  // query to the bidder that wants it, and the rest to bidder 1.
  auto make = [&](int special) {
    Instance inst = base;
    PlantedSolution planted;
    for (Money q = 0; q < w; ++q) {
      inst.edges.push_back({Edge{0, 1}, Edge{1, 1}});
      planted.assignment.push_back(Assignment{static_cast<QueryId>(q), 1 - special});
    }
    inst.edges.push_back({Edge{special, w}});
    planted.assignment.push_back(Assignment{static_cast<QueryId>(w), special});
    inst.planted_opt = std::move(planted);
    return inst;
  };

  Instance i3 = base;
  PlantedSolution planted3;
  for (Money q = 0; q < 2 * w; ++q) {
    i3.edges.push_back({Edge{0, 1}, Edge{1, 1}});
    planted3.assignment.push_back(Assignment{static_cast<QueryId>(q), q < w ? 0 : 1});
  }
  i3.planted_opt = std::move(planted3);
  return {make(0), make(1), std::move(i3)};
}

Instance gen_example_no_surpass(Money alpha, int k) {
  if (alpha < 2) throw std::invalid_argument("example_no_surpass requires alpha >= 2");
  if (k < 3) throw std::invalid_argument("example_no_surpass requires k >= 3");
  Instance out;
  out.problem_class = ProblemClass::kGeneral;
  out.bidders = {Bidder{0, alpha * k, std::nullopt, std::nullopt},
                 Bidder{1, (alpha - 1) * (k - 1), std::nullopt, std::nullopt}};
  for (int l = 0; l < k - 1; ++l) out.edges.push_back({Edge{0, alpha}, Edge{1, alpha - 1}});
  out.edges.push_back({Edge{0, alpha}, Edge{1, (alpha - 1) * (k - 1)}});
  return out;
}

Instance gen_random(const RandomParams& p) {
  if (p.n < 1 || p.m < 1) throw std::invalid_argument("random requires n >= 1 and m >= 1");
  if (!(p.density > 0.0 && p.density <= 1.0)) {
    throw std::invalid_argument("density must lie in (0, 1]");
  }
  const ProblemClass cls = p.problem_class;
  if (cls != ProblemClass::kObm && (p.bid_lo < 1 || p.bid_lo > p.bid_hi)) {
    throw std::invalid_argument("bid range must satisfy 1 <= lo <= hi");
  }
  if (cls != ProblemClass::kObm && !(p.budget_value > 0.0)) {
    throw std::invalid_argument("budget policy value must be positive");
  }
  if (cls == ProblemClass::kGeneral && p.budget_policy == BudgetPolicy::kFixed &&
      static_cast<Money>(p.budget_value) < p.bid_hi) {
    throw std::invalid_argument("fixed budget is below the largest possible bid");
  }

  Rng rng(p.seed);
  Instance out;
  out.problem_class = cls;
  out.bidders = unit_bidders(p.m);
  out.edges.resize(p.n);

  std::vector<Money> value(p.m, 1);
  if (cls == ProblemClass::kSingleValued) {
    for (auto& v : value) v = rng.uniform_int(p.bid_lo, p.bid_hi);
  }
  auto draw_bid = [&](BidderId j) -> Money {
    switch (cls) {
      case ProblemClass::kObm:
        return 1;
      case ProblemClass::kSingleValued:
        return value[j];
      case ProblemClass::kGeneral:
        return rng.uniform_int(p.bid_lo, p.bid_hi);
    }
    return 1;
  };

  for (int q = 0; q < p.n; ++q) {
    for (BidderId j = 0; j < p.m; ++j) {
      if (p.density >= 1.0 || rng.bernoulli(p.density)) {
        out.edges[q].push_back(Edge{j, draw_bid(j)});
      }
    }
    if (out.edges[q].empty()) {
      const auto j = static_cast<BidderId>(rng.uniform_int(0, p.m - 1));
      out.edges[q].push_back(Edge{j, draw_bid(j)});
    }
  }

  std::vector<Money> degree(p.m, 0), demand(p.m, 0), max_bid(p.m, 0);
  for (const auto& edges : out.edges) {
    for (const Edge& e : edges) {
      degree[e.bidder] += 1;
      demand[e.bidder] += e.bid;
      max_bid[e.bidder] = std::max(max_bid[e.bidder], e.bid);
    }
  }
  for (BidderId j = 0; j < p.m; ++j) {
    Bidder& b = out.bidders[j];
    if (cls == ProblemClass::kSingleValued) {
      Money k = 1;
      if (p.budget_policy == BudgetPolicy::kFixed) {
        k = std::max<Money>(1, std::llround(p.budget_value));
      } else {
        k = std::max<Money>(1, static_cast<Money>(std::ceil(p.budget_value * degree[j])));
      }
      b.value = value[j];
      b.cap = k;
      b.budget = k * value[j];
    } else if (cls == ProblemClass::kGeneral) {
      if (p.budget_policy == BudgetPolicy::kFixed) {
        b.budget = static_cast<Money>(p.budget_value);
      } else {
        const auto share = static_cast<Money>(std::ceil(p.budget_value * demand[j]));
        b.budget = std::max<Money>({1, max_bid[j], share});
      }
    }
  }
  return out;
}

Instance gen_planted(const PlantedParams& p) {
  if (p.m < 1) throw std::invalid_argument("planted requires m >= 1");
  if (p.distractors < 0) throw std::invalid_argument("distractors must be >= 0");
  Rng rng(p.seed);
  Instance out;
  out.problem_class = p.problem_class;
  out.bidders = unit_bidders(p.m);
  PlantedSolution planted;

  switch (p.problem_class) {
    case ProblemClass::kObm: {
      if (p.n < p.m) throw std::invalid_argument("planted OBM requires n >= m");
      out.edges.resize(p.n);
      for (int q = 0; q < p.n; ++q) {
        if (q < p.m) {
          out.edges[q].push_back(Edge{q, 1});
          planted.assignment.push_back(Assignment{q, q});
        }
        const int extra = q < p.m ? p.distractors : std::max(1, p.distractors);
        add_distractors(out.edges[q], p.m, extra, rng, [](BidderId) { return Money{1}; });
      }
      break;
    }
    case ProblemClass::kSingleValued: {
      if (p.n < p.m) throw std::invalid_argument("planted SINGLE_VALUED requires n >= m");
      if (p.value_hi < 1) throw std::invalid_argument("value_hi must be >= 1");
      std::vector<Money> cap(p.m, 1);
      for (int extra = p.n - p.m; extra > 0; --extra) {
        cap[rng.uniform_int(0, p.m - 1)] += 1;
      }
      for (BidderId j = 0; j < p.m; ++j) {
        const Money v = rng.uniform_int(1, p.value_hi);
        out.bidders[j].value = v;
        out.bidders[j].cap = cap[j];
        out.bidders[j].budget = v * cap[j];
      }
      for (BidderId j = 0; j < p.m; ++j) {
        for (Money c = 0; c < cap[j]; ++c) {
          const auto q = static_cast<QueryId>(out.edges.size());
          out.edges.push_back({Edge{j, *out.bidders[j].value}});
          planted.assignment.push_back(Assignment{q, j});
        }
      }
      for (auto& edges : out.edges) {
        add_distractors(edges, p.m, p.distractors, rng,
                        [&](BidderId l) { return *out.bidders[l].value; });
      }
      break;
    }
    case ProblemClass::kGeneral: {
      if (!(p.mu_target >= 0.0 && p.mu_target <= 1.0)) {
        throw std::invalid_argument("mu_target must lie in [0, 1]");
      }
      if (p.budget < 1) throw std::invalid_argument("budget must be >= 1");
      std::vector<Money> max_bid(p.m, 1);
      for (BidderId j = 0; j < p.m; ++j) {
        const Money b = rng.uniform_int(std::max<Money>(1, p.budget / 2), p.budget);
        out.bidders[j].budget = b;
        auto slack = static_cast<Money>(std::floor(p.mu_target * static_cast<double>(b)));
        while (slack > 0 && static_cast<double>(slack) / static_cast<double>(b) > p.mu_target) {
          --slack;
        }
        max_bid[j] = std::min(b, slack + 1);
      }
      for (BidderId j = 0; j < p.m; ++j) {
        Money remaining = out.bidders[j].budget;
        while (remaining > 0) {
          const Money bid = std::min(remaining, rng.uniform_int(1, max_bid[j]));
          const auto q = static_cast<QueryId>(out.edges.size());
          out.edges.push_back({Edge{j, bid}});
          planted.assignment.push_back(Assignment{q, j});
          remaining -= bid;
        }
      }
      auto distractor_bid = [&](BidderId l) { return rng.uniform_int(1, max_bid[l]); };
      for (auto& edges : out.edges) add_distractors(edges, p.m, p.distractors, rng, distractor_bid);
      while (out.edges.size() < static_cast<std::size_t>(std::max(p.n, 0))) {
        std::vector<Edge> edges;
        add_distractors(edges, p.m, std::max(1, p.distractors), rng, distractor_bid);
        out.edges.push_back(std::move(edges));
      }
      break;
    }
  }

  out.planted_opt = std::move(planted);
  std::vector<QueryId> order(out.edges.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  out = permute_queries(std::move(out), order);
  sort_edges(out);
  return out;
}

// --- file format ------------------------------------------------------------

namespace {

// Emits keys in a fixed order (nlohmann::json sorts object keys, which would
// reorder "id"/"budget"/"b"/"k").
std::string bidder_text(const Bidder& b, ProblemClass cls) {
  std::ostringstream out;
  out << "{\"id\": " << b.id << ", \"budget\": " << b.budget;
  if (cls == ProblemClass::kSingleValued) {
    if (b.value) out << ", \"b\": " << *b.value;
    if (b.cap) out << ", \"k\": " << *b.cap;
  }
  out << "}";
  return out.str();
}

std::string edges_text(const std::vector<Edge>& edges) {
  std::ostringstream out;
  out << "[";
  for (std::size_t t = 0; t < edges.size(); ++t) {
    if (t) out << ", ";
    out << "[" << edges[t].bidder << ", " << edges[t].bid << "]";
  }
  out << "]";
  return out.str();
}

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

Money read_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) field_error(where, "expected an integer");
  return j.get<Money>();
}

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) field_error(where, std::string("missing field \"") + key + "\"");
  return *it;
}

std::string line_context(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t t = 0; t < std::min(byte, text.size()); ++t) {
    if (text[t] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string to_json_text(const Instance& instance) {
  std::ostringstream out;
  out << "{\"class\": \"" << to_string(instance.problem_class) << "\",\n";
  out << " \"n\": " << instance.num_queries() << ",\n";
  out << " \"bidders\": [";
  for (std::size_t j = 0; j < instance.bidders.size(); ++j) {
    out << (j ? ",\n  " : "\n  ") << bidder_text(instance.bidders[j], instance.problem_class);
  }
  out << (instance.bidders.empty() ? "],\n" : "\n ],\n");
  out << " \"edges\": [";
  for (std::size_t q = 0; q < instance.edges.size(); ++q) {
    out << (q ? ",\n  " : "\n  ") << edges_text(instance.edges[q]);
  }
  out << (instance.edges.empty() ? "]" : "\n ]");
  if (instance.planted_opt) {
    out << ",\n \"planted_opt\": {\"assignment\": [";
    const auto& a = instance.planted_opt->assignment;
    for (std::size_t t = 0; t < a.size(); ++t) {
      out << (t ? ", " : "") << "[" << a[t].query << ", " << a[t].bidder << "]";
    }
    out << "]}";
  }
  out << "\n}\n";
  return out.str();
}

Instance from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("malformed JSON at " + line_context(text, e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) field_error("document", "expected a JSON object");

  Instance out;
  const json& cls = require(doc, "class", "document");
  if (!cls.is_string()) field_error("class", "expected a string");
  try {
    out.problem_class = problem_class_from_string(cls.get<std::string>());
  } catch (const std::invalid_argument& e) {
    field_error("class", e.what());
  }

  const Money n = read_int(require(doc, "n", "document"), "n");
  if (n < 0) field_error("n", "must be >= 0");

  const json& bidders = require(doc, "bidders", "document");
  if (!bidders.is_array()) field_error("bidders", "expected an array");
  for (std::size_t j = 0; j < bidders.size(); ++j) {
    const std::string where = "bidders[" + std::to_string(j) + "]";
    const json& b = bidders[j];
    if (!b.is_object()) field_error(where, "expected an object");
    Bidder bidder;
    bidder.id = static_cast<BidderId>(read_int(require(b, "id", where), where + ".id"));
    bidder.budget = read_int(require(b, "budget", where), where + ".budget");
    if (b.contains("b")) bidder.value = read_int(b["b"], where + ".b");
    if (b.contains("k")) bidder.cap = read_int(b["k"], where + ".k");
    out.bidders.push_back(bidder);
  }

  const json& edges = require(doc, "edges", "document");
  if (!edges.is_array()) field_error("edges", "expected an array");
  if (static_cast<Money>(edges.size()) != n) {
    field_error("edges", "has " + std::to_string(edges.size()) + " queries but n = " +
                             std::to_string(n));
  }
  for (std::size_t q = 0; q < edges.size(); ++q) {
    const std::string where = "edges[" + std::to_string(q) + "]";
    if (!edges[q].is_array()) field_error(where, "expected an array of [bidder_id, bid]");
    std::vector<Edge> list;
    for (std::size_t t = 0; t < edges[q].size(); ++t) {
      const std::string at = where + "[" + std::to_string(t) + "]";
      const json& pair = edges[q][t];
      if (!pair.is_array() || pair.size() != 2) field_error(at, "expected [bidder_id, bid]");
      list.push_back(Edge{static_cast<BidderId>(read_int(pair[0], at + "[0]")),
                          read_int(pair[1], at + "[1]")});
    }
    out.edges.push_back(std::move(list));
  }

  if (doc.contains("planted_opt") && !doc["planted_opt"].is_null()) {
    const json& planted = doc["planted_opt"];
    if (!planted.is_object()) field_error("planted_opt", "expected an object");
    const json& a = require(planted, "assignment", "planted_opt");
    if (!a.is_array()) field_error("planted_opt.assignment", "expected an array");
    PlantedSolution sol;
    for (std::size_t t = 0; t < a.size(); ++t) {
      const std::string at = "planted_opt.assignment[" + std::to_string(t) + "]";
      if (!a[t].is_array() || a[t].size() != 2) field_error(at, "expected [query, bidder]");
      sol.assignment.push_back(Assignment{static_cast<QueryId>(read_int(a[t][0], at + "[0]")),
                                          static_cast<BidderId>(read_int(a[t][1], at + "[1]"))});
    }
    out.planted_opt = std::move(sol);
  }
  return out;
}

Instance read_instance(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return from_json_text(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json_text(instance);
}

std::string instance_id(const Instance& instance) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json_text(instance)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << "inst-" << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

}  // namespace adwords
