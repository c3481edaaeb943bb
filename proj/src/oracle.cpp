#include "adwords/oracle.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

namespace adwords {

std::string to_string(OptimumKind kind) {
  switch (kind) {
    case OptimumKind::kExact:
      return "exact";
    case OptimumKind::kUpperBound:
      return "upper_bound";
    case OptimumKind::kPlantedCertificate:
      return "planted_certificate";
  }
  return "exact";
}

namespace {

void require_feasible_witness(const Instance& instance, const OfflineOptimum& opt) {
  if (!opt.witness) return;
  if (!check_assignment(instance, *opt.witness).empty() ||
      assignment_value(instance, *opt.witness) != opt.value) {
    throw std::logic_error("offline optimum produced an infeasible or mispriced witness");
  }
}

std::vector<Assignment> sorted(std::vector<Assignment> a) {
  std::sort(a.begin(), a.end(),
            [](const Assignment& x, const Assignment& y) { return x.query < y.query; });
  return a;
}

}  // namespace

OfflineOptimum opt_obm(const Instance& instance) {
  if (instance.problem_class != ProblemClass::kObm) {
    throw std::invalid_argument("opt_obm requires an OBM instance");
  }
  const auto n = static_cast<int>(instance.num_queries());
  const auto m = static_cast<int>(instance.num_bidders());
  std::vector<int> good_of(n, -1), query_of(m, -1);
  std::vector<int> visited(m, -1);

  // Kuhn's augmenting path search from query q; stamp marks goods seen in
  // this round.
  auto augment = [&](auto&& self, int q, int stamp) -> bool {
    for (const Edge& e : instance.edges[q]) {
      const int g = e.bidder;
      if (visited[g] == stamp) continue;
      visited[g] = stamp;
      if (query_of[g] < 0 || self(self, query_of[g], stamp)) {
        query_of[g] = q;
        good_of[q] = g;
        return true;
      }
    }
    return false;
  };

  Money size = 0;
  for (int q = 0; q < n; ++q) {
    if (augment(augment, q, q)) ++size;
  }
  OfflineOptimum out;
  out.value = size;
  out.kind = OptimumKind::kExact;
  std::vector<Assignment> witness;
  for (int q = 0; q < n; ++q) {
    if (good_of[q] >= 0) witness.push_back(Assignment{q, good_of[q]});
  }
  out.witness = std::move(witness);
  require_feasible_witness(instance, out);
  return out;
}

namespace {

struct FlowArc {
  int to;
  Money capacity;
  Money cost;
};

// Min-cost flow on a small network with integer costs; stops augmenting as
// soon as the cheapest path no longer has negative cost.
class MinCostFlow {
 public:
  explicit MinCostFlow(int nodes) : out_(nodes) {}

  int add_arc(int from, int to, Money capacity, Money cost) {
    out_[from].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back(FlowArc{to, capacity, cost});
    out_[to].push_back(static_cast<int>(arcs_.size()));
    arcs_.push_back(FlowArc{from, 0, -cost});
    return static_cast<int>(arcs_.size()) - 2;
  }

  // Returns the total (negative) cost of the flow found.
  Money minimize(int source, int sink) {
    const auto nodes = out_.size();
    constexpr Money kInf = std::numeric_limits<Money>::max() / 4;
    Money total = 0;
    while (true) {
      // Bellman-Ford with a FIFO queue; residual costs may be negative.
      std::vector<Money> dist(nodes, kInf);
      std::vector<int> via(nodes, -1);
      std::vector<bool> queued(nodes, false);
      std::deque<int> queue{source};
      dist[source] = 0;
      queued[source] = true;
      while (!queue.empty()) {
        const int u = queue.front();
        queue.pop_front();
        queued[u] = false;
        for (int a : out_[u]) {
          const FlowArc& arc = arcs_[a];
          if (arc.capacity <= 0 || dist[u] + arc.cost >= dist[arc.to]) continue;
          dist[arc.to] = dist[u] + arc.cost;
          via[arc.to] = a;
          if (!queued[arc.to]) {
            queued[arc.to] = true;
            queue.push_back(arc.to);
          }
        }
      }
      if (dist[sink] >= 0) break;
      Money push = kInf;
      for (int v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
        push = std::min(push, arcs_[via[v]].capacity);
      }
      for (int v = sink; v != source; v = arcs_[via[v] ^ 1].to) {
        arcs_[via[v]].capacity -= push;
        arcs_[via[v] ^ 1].capacity += push;
      }
      total += push * dist[sink];
    }
    return total;
  }

  Money flow_on(int arc) const { return arcs_[arc ^ 1].capacity; }

 private:
  std::vector<FlowArc> arcs_;
  std::vector<std::vector<int>> out_;
};

}  // namespace

OfflineOptimum opt_single_valued(const Instance& instance) {
  if (instance.problem_class != ProblemClass::kSingleValued &&
      instance.problem_class != ProblemClass::kObm) {
    throw std::invalid_argument("opt_single_valued requires a SINGLE_VALUED instance");
  }
  const auto n = static_cast<int>(instance.num_queries());
  const auto m = static_cast<int>(instance.num_bidders());
  const int source = n + m;
  const int sink = n + m + 1;
  MinCostFlow flow(n + m + 2);
  for (int q = 0; q < n; ++q) flow.add_arc(source, q, 1, 0);
  std::vector<std::pair<Assignment, int>> arcs;
  for (int q = 0; q < n; ++q) {
    for (const Edge& e : instance.edges[q]) {
      const int arc = flow.add_arc(q, n + e.bidder, 1, -single_value(instance, e.bidder));
      arcs.emplace_back(Assignment{q, e.bidder}, arc);
    }
  }
  for (int j = 0; j < m; ++j) flow.add_arc(n + j, sink, match_cap(instance, j), 0);

  OfflineOptimum out;
  out.value = -flow.minimize(source, sink);
  out.kind = OptimumKind::kExact;
  std::vector<Assignment> witness;
  for (const auto& [a, arc] : arcs) {
    if (flow.flow_on(arc) > 0) witness.push_back(a);
  }
  out.witness = sorted(std::move(witness));
  require_feasible_witness(instance, out);
  return out;
}

OfflineOptimum opt_general_bound(const Instance& instance) {
  Money by_queries = 0;
  for (const auto& edges : instance.edges) {
    Money best = 0;
    for (const Edge& e : edges) best = std::max(best, e.bid);
    by_queries += best;
  }
  OfflineOptimum out;
  out.value = std::min(total_budget(instance), by_queries);
  out.kind = OptimumKind::kUpperBound;
  return out;
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const Instance& instance, long long node_limit)
      : instance_(instance), node_limit_(node_limit) {
    order_.resize(instance.num_queries());
    std::iota(order_.begin(), order_.end(), 0);
    auto max_bid = [&](QueryId q) {
      Money best = 0;
      for (const Edge& e : instance.edges[q]) best = std::max(best, e.bid);
      return best;
    };
    std::stable_sort(order_.begin(), order_.end(),
                     [&](QueryId a, QueryId b) { return max_bid(a) > max_bid(b); });
    choice_.assign(instance.num_queries(), -1);
    for (const Bidder& b : instance.bidders) left_.push_back(b.budget);
  }

  OfflineOptimum solve() {
    seed_incumbent();
    search(0, 0);
    OfflineOptimum out;
    out.value = best_value_;
    out.kind = OptimumKind::kExact;
    out.witness = sorted(best_);
    return out;
  }

 private:
  // Greedy by largest feasible bid gives the first incumbent.
  void seed_incumbent() {
    std::vector<Money> left = left_;
    for (QueryId q : order_) {
      const Edge* pick = nullptr;
      for (const Edge& e : instance_.edges[q]) {
        if (e.bid <= left[e.bidder] && (!pick || e.bid > pick->bid)) pick = &e;
      }
      if (!pick) continue;
      left[pick->bidder] -= pick->bid;
      best_value_ += pick->bid;
      best_.push_back(Assignment{q, pick->bidder});
    }
  }

  Money bound(std::size_t depth) const {
    Money by_queries = 0;
    for (std::size_t t = depth; t < order_.size(); ++t) {
      Money best = 0;
      for (const Edge& e : instance_.edges[order_[t]]) {
        if (e.bid <= left_[e.bidder]) best = std::max(best, e.bid);
      }
      by_queries += best;
    }
    const Money by_budgets = std::accumulate(left_.begin(), left_.end(), Money{0});
    return std::min(by_queries, by_budgets);
  }

  void search(std::size_t depth, Money value) {
    if (++nodes_ > node_limit_) throw NodeLimitExceeded(node_limit_);
    if (value > best_value_) {
      best_value_ = value;
      best_.clear();
      for (std::size_t t = 0; t < depth; ++t) {
        if (choice_[t] >= 0) best_.push_back(Assignment{order_[t], choice_[t]});
      }
    }
    if (depth == order_.size() || value + bound(depth) <= best_value_) return;

    const QueryId q = order_[depth];
    std::vector<Edge> options(instance_.edges[q].begin(), instance_.edges[q].end());
    std::stable_sort(options.begin(), options.end(),
                     [](const Edge& a, const Edge& b) { return a.bid > b.bid; });
    for (const Edge& e : options) {
      if (e.bid > left_[e.bidder]) continue;
      left_[e.bidder] -= e.bid;
      choice_[depth] = e.bidder;
      search(depth + 1, value + e.bid);
      left_[e.bidder] += e.bid;
    }
    choice_[depth] = -1;
    search(depth + 1, value);
  }

  const Instance& instance_;
  long long node_limit_;
  long long nodes_ = 0;
  std::vector<QueryId> order_;
  std::vector<BidderId> choice_;  // by depth
  std::vector<Money> left_;
  Money best_value_ = 0;
  std::vector<Assignment> best_;
};

}  // namespace

OfflineOptimum opt_general_exact(const Instance& instance, long long node_limit) {
  OfflineOptimum out = BranchAndBound(instance, node_limit).solve();
  require_feasible_witness(instance, out);
  return out;
}

std::optional<OfflineOptimum> planted_certificate(const Instance& instance) {
  if (!instance.planted_opt) return std::nullopt;
  const auto& a = instance.planted_opt->assignment;
  if (!check_assignment(instance, a).empty()) return std::nullopt;
  const Money value = assignment_value(instance, a);
  if (value != opt_general_bound(instance).value) return std::nullopt;
  OfflineOptimum out;
  out.value = value;
  out.witness = sorted(a);
  out.kind = OptimumKind::kPlantedCertificate;
  return out;
}

OfflineOptimum best_optimum(const Instance& instance, bool allow_upper_bound,
                            long long node_limit) {
  if (auto cert = planted_certificate(instance)) return *cert;
  switch (instance.problem_class) {
    case ProblemClass::kObm:
      return opt_obm(instance);
    case ProblemClass::kSingleValued:
      return opt_single_valued(instance);
    case ProblemClass::kGeneral:
      try {
        return opt_general_exact(instance, node_limit);
      } catch (const NodeLimitExceeded&) {
        if (!allow_upper_bound) throw;
        return opt_general_bound(instance);
      }
  }
  return opt_general_bound(instance);
}

}  // namespace adwords
