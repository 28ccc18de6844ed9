#include <algorithm>
#include <numeric>

#include "forge/errors.hpp"
#include "pipeline_internal.hpp"

namespace forge {

DispatchPlan fins_dispatch(const FinSystem& fs, const PipelineConfig& cfg) {
  if (!fs.wall || fs.fins.empty()) throw ParameterError("dispatch needs a wall and at least one fin");
  const Wall& w = *fs.wall;
  const auto& fins = fs.fins;
  DispatchPlan plan;

  std::vector<int> order(fins.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return w.label_of(fins[a].s).value_or(WallLabel{}) < w.label_of(fins[b].s).value_or(WallLabel{});
  });
  std::vector<VertexId> roots;
  for (int i : order) roots.push_back(fins[i].s);
  for (int p : separated_subset(w, roots, cfg.separation())) plan.selected.push_back(order[p]);
  std::sort(plan.selected.begin(), plan.selected.end(), [&](int a, int b) {
    return w.label_of(fins[a].s).value_or(WallLabel{}) < w.label_of(fins[b].s).value_or(WallLabel{});
  });

  // a fin whose interior is met by many others
  const int b1 = detail::long_count(cfg);
  for (int j : plan.selected) {
    const auto& vs = fins[j].path.vertices;
    std::set<VertexId> inner;
    if (vs.size() > 2) inner.insert(vs.begin() + 1, vs.end() - 1);
    std::vector<int> group;
    for (int i : plan.selected) {
      if (i == j) continue;
      for (VertexId v : fins[i].path.vertices)
        if (inner.count(v)) {
          group.push_back(i);
          break;
        }
    }
    if (static_cast<int>(group.size()) >= 2 * b1) {
      plan.hub.push_back(j);
      plan.hub.insert(plan.hub.end(), group.begin(), group.end());
      break;
    }
  }
  std::set<int> in_hub(plan.hub.begin(), plan.hub.end());
  for (int i : plan.selected) {
    if (in_hub.count(i)) continue;
    (wall_distance(w, fins[i].s, fins[i].t) >= cfg.a2 ? plan.far : plan.near).push_back(i);
  }

  auto pick = [&](const std::vector<int>& ids) {
    std::vector<Fin> out;
    for (int i : ids) out.push_back(fins[i]);
    return out;
  };
  if (!plan.hub.empty()) {
    Attempt a{Strategy::kExternalBlob, plan.hub, "", {}};
    for (int i : plan.hub) a.blob.insert(fins[i].path.edges.begin(), fins[i].path.edges.end());
    a.reason = std::to_string(plan.hub.size() - 1) + " fins meet the interior of the fin at " +
               std::to_string(fins[plan.hub.front()].s);
    plan.attempts.push_back(std::move(a));
  }
  auto sel = pick(plan.selected);
  if (!detail::shared_edge(sel)) {
    std::vector<VertexId> pts;
    for (const Fin& f : sel) {
      pts.push_back(f.s);
      pts.push_back(f.t);
    }
    if (!detail::too_close(w, pts, cfg.a1))
      plan.attempts.push_back({Strategy::kLongJumps, plan.selected,
                               "selected fins are edge-disjoint with all ends at distance >= a1", {}});
  }
  if (!plan.far.empty())
    plan.attempts.push_back({Strategy::kInternalBlob, plan.far,
                             std::to_string(plan.far.size()) + " fins with d(s, t) >= a2", {}});
  if (!plan.near.empty())
    plan.attempts.push_back({Strategy::kShortJumps, plan.near,
                             std::to_string(plan.near.size()) + " fins with d(s, t) < a2", {}});
  return plan;
}

}  // namespace forge
