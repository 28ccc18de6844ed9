#include <charconv>
#include <sstream>

#include "forge/connectivity.hpp"
#include "forge/errors.hpp"
#include "pipeline_internal.hpp"

namespace forge {

void PipelineConfig::validate() const {
  if (g < 2) throw ParameterError("g must be at least 2");
  if (a1 < 1 || a2 < 1 || a3 < 1 || c < 1) throw ParameterError("distance thresholds must be at least 1");
  if (b1 < 0 || b2 < 0 || b3 < 0) throw ParameterError("fin counts must not be negative");
  if (wall_budget == 0 || routing_budget == 0 || strategy_budget == 0 || reroute_budget == 0 ||
      fallback_budget == 0)
    throw ParameterError("budgets must be positive");
  if (fallback_max_vertices < 0) throw ParameterError("fallback_max_vertices must not be negative");
  if (wall_height < 2 || wall_height % 2) throw ParameterError("wall_height must be even and at least 2");
}

int PipelineConfig::separation() const { return std::max({a1, a2, a3}); }

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || p != value.data() + value.size())
    throw ParameterError("bad value '" + value + "' for " + key);
  return out;
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  std::map<std::string, int*> ints{{"g", &g},   {"a1", &a1}, {"a2", &a2}, {"a3", &a3},
                                   {"c", &c},   {"b1", &b1}, {"b2", &b2}, {"b3", &b3},
                                   {"fallback_max_vertices", &fallback_max_vertices},
                                   {"wall_height", &wall_height}};
  std::map<std::string, std::uint64_t*> budgets{{"wall_budget", &wall_budget},
                                                {"routing_budget", &routing_budget},
                                                {"strategy_budget", &strategy_budget},
                                                {"reroute_budget", &reroute_budget},
                                                {"fallback_budget", &fallback_budget}};
  if (auto it = ints.find(key); it != ints.end())
    *it->second = parse_number<int>(key, value);
  else if (auto jt = budgets.find(key); jt != budgets.end())
    *jt->second = parse_number<std::uint64_t>(key, value);
  else
    throw ParameterError("unknown setting '" + key + "'");
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::kFound: return "found";
    case Outcome::kExhausted: return "exhausted";
    case Outcome::kHypothesisViolated: return "hypothesis-violated";
  }
  return "?";
}

std::string PipelineReport::to_text() const {
  std::ostringstream os;
  os << "format: 1\n";
  os << "outcome: " << to_string(outcome) << "\n";
  if (strategy) os << "strategy: " << to_string(*strategy) << "\n";
  if (!failed_stage.empty()) os << "failed-stage: " << failed_stage << "\n";
  if (violating_pair) os << "violating-pair: " << violating_pair->first << " " << violating_pair->second << "\n";
  if (fallback) os << "fallback: " << to_string(*fallback) << "\n";
  for (const auto& st : trace) {
    os << "stage " << st.stage << (st.ok ? " ok" : " failed") << "\n";
    for (const auto& l : st.lines) os << "  " << l << "\n";
  }
  if (result) {
    for (std::size_t v = 0; v < result->vertex_map.size(); ++v)
      os << "vertex " << v << " " << result->vertex_map[v] << "\n";
    for (const auto& [e, w] : result->edge_map) os << "edge " << e << " " << to_string(w) << "\n";
  }
  return os.str();
}

namespace {

struct StageFailed {
  std::string stage;
};

class Run {
 public:
  Run(GraphPtr g, const std::vector<VertexId>& s, const PipelineConfig& cfg) : g_(std::move(g)), s_(s), cfg_(cfg) {}

  PipelineReport go(const std::optional<Wall>& given) {
    try {
      pipeline(given);
    } catch (const StageFailed& f) {
      rep_.failed_stage = f.stage;
    }
    if (rep_.outcome != Outcome::kFound && rep_.outcome != Outcome::kHypothesisViolated &&
        g_->vertex_count() <= cfg_.fallback_max_vertices)
      fallback();
    return std::move(rep_);
  }

 private:
  StageRecord& stage(const std::string& name) {
    rep_.trace.push_back({name, false, {}});
    return rep_.trace.back();
  }
  [[noreturn]] void fail(StageRecord& st, const std::string& why) {
    st.lines.push_back(why);
    throw StageFailed{st.stage};
  }

  void pipeline(const std::optional<Wall>& given) {
    {
      auto& st = stage("connectivity");
      auto pw = pairwise_k_connected(*g_, s_, 4);
      st.lines.push_back(std::to_string(s_.size()) + " roots checked for 4 edge-disjoint paths pairwise");
      if (pw.failing) {
        rep_.outcome = Outcome::kHypothesisViolated;
        rep_.violating_pair = pw.failing;
        fail(st, "roots " + std::to_string(pw.failing->first) + " and " + std::to_string(pw.failing->second) +
                     " are separated by fewer than 4 edges");
      }
      st.ok = true;
    }
    std::optional<Wall> wall;
    {
      auto& st = stage("wall");
      if (given) {
        if (!(*given->host() == *g_)) throw ParameterError("the given wall lives in a different graph");
        wall = given;
        st.lines.push_back("given wall of height " + std::to_string(wall->height()));
      } else {
        auto r = find_wall(g_, cfg_.wall_height, cfg_.wall_budget);
        st.lines.push_back("search for height " + std::to_string(cfg_.wall_height) + ": " + to_string(r.status) +
                           " after " + std::to_string(r.expansions) + " expansions");
        if (!r.wall) fail(st, "no wall");
        wall = r.wall;
      }
      st.ok = true;
    }
    // the wall's host is g (possibly a different object)
    GraphPtr host = wall->host();
    GrowResult grown;
    {
      auto& st = stage("roots");
      auto diag = diagonal_vertices(*wall);
      std::set<VertexId> d(diag.begin(), diag.end());
      for (VertexId v : s_)
        if (!d.count(v)) fail(st, "root " + std::to_string(v) + " is not on the wall diagonal");
      st.ok = true;
    }
    {
      auto& st = stage("grow");
      try {
        grown = grow_rooted_wall(*g_, *wall, s_, cfg_);
      } catch (const PreconditionError& e) {
        fail(st, e.what());
      }
      st.lines.push_back(std::to_string(grown.initial.size()) + " roots had a fin at the start, " +
                         std::to_string(grown.steps.size()) + " rewired");
      for (const auto& step : grown.steps)
        for (const auto& r : step.repairs) st.lines.push_back(r);
      if (!grown.diagnostic.empty()) fail(st, grown.diagnostic);
      st.ok = true;
    }
    ReductionResult red;
    {
      auto& st = stage("reduce");
      try {
        red = reduce_immersed_wall(grown.map, wall->height(), grown.s0, grown.fins);
      } catch (const HypothesisError& e) {
        fail(st, e.what());
      } catch (const PreconditionError& e) {
        fail(st, e.what());
      }
      st.lines.push_back(std::to_string(red.history.size()) + " lifts, " + std::to_string(red.fins.fins.size()) +
                         " fins kept, " + std::to_string(red.dropped.size()) + " dropped");
      st.ok = true;
    }
    if (red.fins.fins.empty()) {
      auto& st = stage("dispatch");
      fail(st, "no fins left");
    }
    DispatchPlan plan = fins_dispatch(red.fins, cfg_);
    {
      auto& st = stage("dispatch");
      st.lines.push_back(std::to_string(plan.selected.size()) + " fins selected, " + std::to_string(plan.hub.size()) +
                         " in a hub, " + std::to_string(plan.far.size()) + " far, " +
                         std::to_string(plan.near.size()) + " near");
      for (const auto& a : plan.attempts) st.lines.push_back("plan " + to_string(a.strategy) + ": " + a.reason);
      if (plan.attempts.empty()) fail(st, "no strategy applies");
      st.ok = true;
    }
    std::optional<ImmersionMap> m;
    bool exhausted = false;
    for (const auto& a : plan.attempts) {
      auto& st = stage(to_string(a.strategy));
      FinSystem sub{red.fins.wall, {}};
      for (int i : a.fins) sub.fins.push_back(red.fins.fins[i]);
      StrategyOutcome r;
      switch (a.strategy) {
        case Strategy::kLongJumps: r = strategy_long_jumps(sub, cfg_); break;
        case Strategy::kExternalBlob: r = strategy_external_blob(red.fins.wall, a.blob, cfg_); break;
        case Strategy::kInternalBlob: r = strategy_internal_blob(sub, cfg_); break;
        case Strategy::kShortJumps: r = strategy_short_jumps(sub, cfg_); break;
      }
      st.lines = r.trace;
      exhausted = exhausted || r.exhausted;
      if (r.ok()) {
        st.ok = true;
        m = std::move(r.map);
        rep_.strategy = a.strategy;
        break;
      }
      st.lines.push_back(r.failure);
    }
    if (!m) {
      rep_.failed_stage = "strategies";
      throw StageFailed{"strategies"};
    }
    {
      auto& st = stage("pull-back");
      for (std::size_t k = red.history.size(); k-- > 0;) {
        auto r = pull_back_rerouted(*m, red.history[k], red.graphs[k], cfg_.reroute_budget);
        if (!r.ok())
          fail(st, "lift " + to_string(red.history[k]) + ": " +
                       (r.failures.empty() ? std::string("no map") : r.failures.front().reason));
        m = std::move(r.map);
      }
      st.lines.push_back(std::to_string(red.history.size()) + " lifts undone");
      st.ok = true;
    }
    m->host = g_;
    if (!verify(*m).ok() || !is_rooted(*m, s_)) throw Error("pipeline produced an invalid rooted immersion");
    rep_.outcome = Outcome::kFound;
    rep_.result = std::move(m);
  }

  void fallback() {
    auto& st = stage("direct-search");
    ImmersionSearchOptions opt;
    opt.roots = s_;
    opt.budget = cfg_.fallback_budget;
    auto r = find_immersion(g_, grid_pattern(cfg_.g), opt);
    rep_.fallback = r.status;
    st.lines.push_back(to_string(r.status) + " after " + std::to_string(r.expansions) + " expansions");
    if (r.map) {
      st.ok = true;
      rep_.outcome = Outcome::kFound;
      rep_.result = std::move(r.map);
    } else if (r.status == SearchStatus::kNotFound) {
      st.lines.push_back("no rooted immersion exists");
    }
  }

  GraphPtr g_;
  std::vector<VertexId> s_;
  const PipelineConfig& cfg_;
  PipelineReport rep_;
};

}  // namespace

PipelineReport find_grid_immersion(GraphPtr g, const std::vector<VertexId>& s, const PipelineConfig& cfg,
                                   const std::optional<Wall>& wall) {
  cfg.validate();
  if (!g) throw ParameterError("no graph");
  for (VertexId v : s)
    if (!g->has_vertex(v)) throw QueryError("root " + std::to_string(v) + " is not a vertex");
  return Run(std::move(g), s, cfg).go(wall);
}

}  // namespace forge
