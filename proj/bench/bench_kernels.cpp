// Serial reference vs OpenMP version of each parallel kernel.
// usage: forge_bench [repetitions]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>

#include "forge/connectivity.hpp"
#include "forge/generators.hpp"
#include "forge/treedecomp.hpp"

using namespace forge;

namespace {

double best_ms(int reps, const std::function<void()>& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t).count());
  }
  return best;
}

MultiGraph random_graph(int n, int m, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::vector<std::pair<VertexId, VertexId>> es;
  for (int k = 0; k < m; ++k) es.emplace_back(static_cast<VertexId>(rng() % n), static_cast<VertexId>(rng() % n));
  return MultiGraph::build(n, es);
}

void row(const char* name, double serial, double parallel, bool same) {
  std::printf("%-34s serial %9.2f ms   openmp %9.2f ms   speedup %5.2fx   %s\n", name, serial, parallel,
              serial / parallel, same ? "same result" : "RESULTS DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
  int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  if (reps < 1) reps = 1;
  std::printf("threads: %d, best of %d\n", omp_get_max_threads(), reps);
  bool all_same = true;

  for (int n : {12, 15, 18}) {
    auto g = random_graph(n, 3 * n, 7u + static_cast<unsigned>(n));
    TreewidthResult s, p;
    double ts = best_ms(reps, [&] { s = exact_treewidth_serial(g, n); });
    double tp = best_ms(reps, [&] { p = exact_treewidth(g, n); });
    bool same = s.width == p.width && s.order == p.order;
    all_same = all_same && same;
    char name[64];
    std::snprintf(name, sizeof name, "exact tree-width, n=%d", n);
    row(name, ts, tp, same);
  }

  for (int h : {8, 16}) {
    std::vector<FinSpec> sp;
    for (int r = 2; r <= h; ++r) sp.push_back({r, FinAttachment::kFar, {}, 1});
    auto [g, fs] = wall_with_fins(h, sp);
    std::vector<VertexId> roots;
    for (const Fin& f : fs.fins) roots.push_back(f.s);
    PairwiseResult s, p;
    double ts = best_ms(reps, [&] { s = pairwise_k_connected_serial(g, roots, 4); });
    double tp = best_ms(reps, [&] { p = pairwise_k_connected(g, roots, 4); });
    bool same = s.ok == p.ok && s.failing == p.failing && s.connectivity == p.connectivity;
    all_same = all_same && same;
    char name[64];
    std::snprintf(name, sizeof name, "pairwise 4-connectivity, h=%d", h);
    row(name, ts, tp, same);
  }
  return all_same ? 0 : 1;
}
