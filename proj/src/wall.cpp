#include "forge/wall.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <limits>
#include <mutex>
#include <sstream>

namespace forge {

std::string to_string(WallLabel l) {
  return "(" + std::to_string(l.i) + "," + std::to_string(l.j) + ")";
}

// ---------------------------------------------------------------------------
// WallLayout

WallLayout::WallLayout(int h) : h_(h) {
  if (h < 2 || h % 2 != 0)
    throw ParameterError("wall height must be even and at least 2, got " + std::to_string(h));
  const int rows = h + 1, cols = 2 * h + 2;
  grid_index_.assign(static_cast<std::size_t>((rows + 2) * (cols + 2)), -1);
  for (int i = 1; i <= rows; ++i)
    for (int j = 1; j <= cols; ++j) {
      if ((i == 1 && j == cols) || (i == rows && j == 1)) continue;
      grid_index_[static_cast<std::size_t>(i * (cols + 2) + j)] = static_cast<int>(labels_.size());
      labels_.push_back({i, j});
    }
  std::vector<std::pair<VertexId, VertexId>> es;
  for (int v = 0; v < vertex_count(); ++v) {
    auto [i, j] = labels_[v];
    if (auto r = find({i, j + 1})) edges_.emplace_back(v, *r);
    if ((i + j) % 2 == 0)
      if (auto d = find({i + 1, j})) edges_.emplace_back(v, *d);
  }
  for (auto [a, b] : edges_) es.emplace_back(a, b);
  graph_ = MultiGraph::build(vertex_count(), es);

  rotation_.resize(labels_.size());
  for (int v = 0; v < vertex_count(); ++v) {
    auto [i, j] = labels_[v];
    auto& rot = rotation_[v];
    if ((i - 1 + j) % 2 == 0)
      if (auto u = find({i - 1, j})) rot.push_back(*u);
    if (auto r = find({i, j + 1})) rot.push_back(*r);
    if ((i + j) % 2 == 0)
      if (auto d = find({i + 1, j})) rot.push_back(*d);
    if (auto l = find({i, j - 1})) rot.push_back(*l);
  }

  // face tracing: after arriving at b from a, leave along the clockwise
  // successor of a in the rotation at b
  std::vector<std::array<bool, 2>> seen(edges_.size(), {false, false});
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e)
    for (bool fwd : {true, false}) {
      if (seen[e][fwd ? 0 : 1]) continue;
      std::vector<Dart> face;
      Dart d{e, fwd};
      while (!seen[d.edge][d.forward ? 0 : 1]) {
        seen[d.edge][d.forward ? 0 : 1] = true;
        face.push_back(d);
        int a = dart_tail(d), b = dart_head(d);
        const auto& rot = rotation_[b];
        auto pos = std::find(rot.begin(), rot.end(), a) - rot.begin();
        int c = rot[static_cast<std::size_t>((pos + 1) % static_cast<long>(rot.size()))];
        int ne = edge_between(b, c);
        d = Dart{ne, edges_[ne].first == b};
      }
      faces_.push_back(std::move(face));
    }
  std::size_t longest = 0;
  for (std::size_t f = 0; f < faces_.size(); ++f)
    if (faces_[f].size() > longest) {
      longest = faces_[f].size();
      outer_ = static_cast<int>(f);
    }
}

bool WallLayout::contains(WallLabel l) const { return find(l).has_value(); }

std::optional<int> WallLayout::find(WallLabel l) const {
  const int cols = 2 * h_ + 2;
  if (l.i < 1 || l.i > h_ + 1 || l.j < 1 || l.j > cols) return std::nullopt;
  int k = grid_index_[static_cast<std::size_t>(l.i * (cols + 2) + l.j)];
  if (k < 0) return std::nullopt;
  return k;
}

int WallLayout::index(WallLabel l) const {
  if (auto k = find(l)) return *k;
  throw ParameterError("label " + to_string(l) + " is not a vertex of the height-" +
                       std::to_string(h_) + " wall");
}

int WallLayout::edge_between(int a, int b) const {
  auto es = graph_.edges_between(a, b);
  return es.empty() ? -1 : es.front();
}

std::vector<int> WallLayout::diagonal() const {
  std::vector<int> out;
  for (int i = 2; i <= h_; ++i) out.push_back(index({i, 2 * i}));
  return out;
}

std::shared_ptr<const WallLayout> wall_layout(int h) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const WallLayout>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[h];
  if (!slot) slot = std::make_shared<const WallLayout>(h);
  return slot;
}

// ---------------------------------------------------------------------------
// Wall

Wall Wall::from_branches(GraphPtr host, int h, std::vector<VertexId> label_images,
                         std::vector<Walk> branches) {
  if (!host) throw InputError("wall without host graph");
  Wall w;
  w.layout_ = wall_layout(h);
  w.host_ = std::move(host);
  const WallLayout& lay = *w.layout_;
  const MultiGraph& g = *w.host_;
  if (static_cast<int>(label_images.size()) != lay.vertex_count())
    throw InputError("wall of height " + std::to_string(h) + " needs " +
                     std::to_string(lay.vertex_count()) + " labelled vertices");
  if (branches.size() != lay.edges().size())
    throw InputError("wall of height " + std::to_string(h) + " needs " +
                     std::to_string(lay.edges().size()) + " branches");
  for (int k = 0; k < lay.vertex_count(); ++k) {
    VertexId v = label_images[k];
    if (!g.has_vertex(v)) throw InputError("label " + to_string(lay.labels()[k]) + " maps outside the host");
    if (!w.label_index_.emplace(v, k).second)
      throw InputError("host vertex " + std::to_string(v) + " carries two labels");
  }
  std::set<VertexId> interior;
  for (std::size_t b = 0; b < branches.size(); ++b) {
    const Walk& p = branches[b];
    auto [la, lb] = lay.edges()[b];
    std::string name = "branch " + to_string(lay.labels()[la]) + "-" + to_string(lay.labels()[lb]);
    if (!p.is_valid_in(g) || !p.is_path() || p.length() < 1)
      throw InputError(name + " is not a path of the host");
    if (p.front() != label_images[la] || p.back() != label_images[lb])
      throw InputError(name + " does not join the images of its labels");
    for (std::size_t k = 1; k + 1 < p.vertices.size(); ++k) {
      VertexId x = p.vertices[k];
      if (w.label_index_.count(x))
        throw InputError(name + " passes through labelled vertex " + std::to_string(x));
      if (!interior.insert(x).second)
        throw InputError("vertex " + std::to_string(x) + " is interior to two branches");
    }
  }
  // contracting branch interiors must give back the elementary wall
  std::vector<std::pair<int, int>> contracted;
  for (const Walk& p : branches) {
    int a = w.label_index_.at(p.front()), b = w.label_index_.at(p.back());
    contracted.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::vector<std::pair<int, int>> expected;
  for (auto [a, b] : lay.edges()) expected.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(contracted.begin(), contracted.end());
  std::sort(expected.begin(), expected.end());
  if (contracted != expected) throw InputError("branch contraction is not the elementary wall");

  w.label_images_ = std::move(label_images);
  w.branches_ = std::move(branches);
  for (const Walk& p : w.branches_) {
    w.vertices_.insert(p.vertices.begin(), p.vertices.end());
    for (EdgeId e : p.edges) {
      if (!w.edges_.insert(e).second) throw InputError("host edge " + std::to_string(e) + " used by two branches");
      auto [a, b] = g.ends(e);
      ++w.wall_degree_[a];
      ++w.wall_degree_[b];
    }
  }
  w.build_faces();
  for (std::size_t f = 0; f < lay.faces().size(); ++f)
    if (static_cast<int>(f) != lay.outer_face() && lay.faces()[f].size() != 6)
      throw InputError("standard drawing has a finite face of length " +
                       std::to_string(lay.faces()[f].size()));
  if (!w.faces_[static_cast<std::size_t>(w.outer_face())].boundary.is_cycle())
    throw InputError("perimeter is not a cycle");
  return w;
}

Wall Wall::from_subdivision_map(const ImmersionMap& m, int h) {
  auto lay = wall_layout(h);
  if (!m.pattern || m.pattern->vertex_count() != lay->vertex_count() ||
      m.pattern->edge_count() != static_cast<int>(lay->edges().size()))
    throw InputError("immersion pattern is not the elementary wall of height " + std::to_string(h));
  if (!is_subdivision_map(m)) throw InputError("immersion is not a subdivision map");
  std::vector<Walk> bs;
  for (std::size_t e = 0; e < lay->edges().size(); ++e) {
    Walk p = m.edge_map.at(static_cast<EdgeId>(e));
    if (p.front() != m.vertex_map[lay->edges()[e].first]) p = p.reversed();
    bs.push_back(std::move(p));
  }
  return from_branches(m.host, h, m.vertex_map, std::move(bs));
}

void Wall::build_faces() {
  const WallLayout& lay = *layout_;
  for (const auto& darts : lay.faces()) {
    Walk bd = Walk::single(label_images_[lay.dart_tail(darts.front())]);
    for (auto d : darts) {
      const Walk& b = branches_[static_cast<std::size_t>(d.edge)];
      bd = bd.joined(d.forward ? b : b.reversed());
    }
    faces_.push_back(Face{std::move(bd)});
  }
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    const Walk& bd = faces_[f].boundary;
    std::set<VertexId> vs(bd.vertices.begin(), bd.vertices.end());
    for (VertexId v : vs) faces_at_[v].push_back(static_cast<int>(f));
  }
}

std::optional<WallLabel> Wall::label_of(VertexId v) const {
  auto it = label_index_.find(v);
  if (it == label_index_.end()) return std::nullopt;
  return layout_->labels()[static_cast<std::size_t>(it->second)];
}

int Wall::degree(VertexId v) const {
  auto it = wall_degree_.find(v);
  return it == wall_degree_.end() ? 0 : it->second;
}

const std::vector<int>& Wall::faces_at(VertexId v) const {
  static const std::vector<int> none;
  auto it = faces_at_.find(v);
  return it == faces_at_.end() ? none : it->second;
}

std::vector<VertexId> Wall::neighbours_clockwise(VertexId v) const {
  std::vector<VertexId> out;
  auto it = label_index_.find(v);
  if (it != label_index_.end()) {
    int k = it->second;
    for (int u : layout_->rotation(k)) {
      const Walk& b = branches_[static_cast<std::size_t>(layout_->edge_between(k, u))];
      out.push_back(b.front() == v ? b.vertices[1] : b.vertices[b.vertices.size() - 2]);
    }
    return out;
  }
  for (const Walk& b : branches_)
    for (std::size_t i = 1; i + 1 < b.vertices.size(); ++i)
      if (b.vertices[i] == v) return {b.vertices[i - 1], b.vertices[i + 1]};
  return out;
}

ImmersionMap Wall::subdivision_map() const {
  ImmersionMap m;
  m.pattern = share(layout_->graph());
  m.host = host_;
  m.vertex_map = label_images_;
  for (std::size_t e = 0; e < branches_.size(); ++e) m.edge_map[static_cast<EdgeId>(e)] = branches_[e];
  return m;
}

// ---------------------------------------------------------------------------
// geometry

std::vector<Walk> branches(const Wall& w) { return w.branches(); }

std::vector<VertexId> diagonal_vertices(const Wall& w) {
  std::vector<VertexId> out;
  for (int k : w.layout().diagonal()) out.push_back(w.label_images()[static_cast<std::size_t>(k)]);
  return out;
}

Wall subwall(const Wall& w, int i1, int j1, int h2) {
  const int h = w.height();
  if (h2 < 2 || h2 % 2 != 0) throw ParameterError("subwall height must be even and at least 2");
  if (i1 % 2 == 0 || j1 % 2 == 0) throw ParameterError("subwall anchors must be odd");
  int i2 = i1 + h2, j2 = j1 + 2 * h2 + 1;
  if (i1 < 1 || j1 < 1 || i2 > h + 1 || j2 > 2 * h + 2)
    throw ParameterError("subwall " + to_string({i1, j1}) + " of height " + std::to_string(h2) +
                         " does not fit in a wall of height " + std::to_string(h));
  auto lay = wall_layout(h2);
  const WallLayout& big = w.layout();
  std::vector<VertexId> imgs;
  for (WallLabel l : lay->labels()) imgs.push_back(w.at({l.i + i1 - 1, l.j + j1 - 1}));
  std::vector<Walk> bs;
  for (auto [a, b] : lay->edges()) {
    WallLabel la = lay->labels()[a], lb = lay->labels()[b];
    int ba = big.index({la.i + i1 - 1, la.j + j1 - 1});
    int bb = big.index({lb.i + i1 - 1, lb.j + j1 - 1});
    int e = big.edge_between(ba, bb);
    Walk p = w.branches()[static_cast<std::size_t>(e)];
    if (p.front() != w.label_images()[static_cast<std::size_t>(ba)]) p = p.reversed();
    bs.push_back(std::move(p));
  }
  return Wall::from_branches(w.host(), h2, std::move(imgs), std::move(bs));
}

namespace {

// 0-1 BFS on the radial graph: nodes are wall vertices and faces. Entering a
// vertex costs one point, stepping between faces across an edge costs one
// point, leaving a vertex into an incident face is free. The start vertex is
// counted as a point too.
std::map<VertexId, int> radial_distances(const Wall& w, VertexId s) {
  if (!w.contains_vertex(s)) throw ParameterError("vertex " + std::to_string(s) + " is not on the wall");
  const int nf = static_cast<int>(w.faces().size());
  std::map<VertexId, int> vdist;
  std::vector<int> fdist(static_cast<std::size_t>(nf), std::numeric_limits<int>::max());
  // face adjacency across edges
  std::map<EdgeId, std::vector<int>> edge_faces;
  for (int f = 0; f < nf; ++f)
    for (EdgeId e : w.faces()[f].boundary.edges) edge_faces[e].push_back(f);
  std::vector<std::vector<int>> across(static_cast<std::size_t>(nf));
  for (auto& [e, fs] : edge_faces)
    for (int a : fs)
      for (int b : fs)
        if (a != b) across[a].push_back(b);

  struct Node {
    bool face;
    int id;
  };
  std::deque<std::pair<Node, int>> q;
  vdist[s] = 1;
  q.push_back({{false, s}, 1});
  while (!q.empty()) {
    auto [node, d] = q.front();
    q.pop_front();
    if (node.face) {
      if (d > fdist[node.id]) continue;
      for (VertexId v : w.faces()[node.id].boundary.vertices) {
        auto it = vdist.find(v);
        if (it == vdist.end() || d + 1 < it->second) {
          vdist[v] = d + 1;
          q.push_back({{false, v}, d + 1});
        }
      }
      for (int g : across[node.id])
        if (d + 1 < fdist[g]) {
          fdist[g] = d + 1;
          q.push_back({{true, g}, d + 1});
        }
    } else {
      if (d > vdist[node.id]) continue;
      for (int f : w.faces_at(node.id))
        if (d < fdist[f]) {
          fdist[f] = d;
          q.push_front({{true, f}, d});
        }
    }
  }
  vdist[s] = 0;
  return vdist;
}

}  // namespace

std::map<VertexId, int> wall_distances_from(const Wall& w, VertexId s) {
  return radial_distances(w, s);
}

int wall_distance(const Wall& w, VertexId s, VertexId t) {
  if (!w.contains_vertex(t)) throw ParameterError("vertex " + std::to_string(t) + " is not on the wall");
  if (s == t) return 0;
  return radial_distances(w, s).at(t);
}

int wall_distance_to_set(const Wall& w, VertexId s, const std::set<VertexId>& targets) {
  auto d = radial_distances(w, s);
  int best = std::numeric_limits<int>::max();
  for (VertexId t : targets)
    if (auto it = d.find(t); it != d.end()) best = std::min(best, it->second);
  return best;
}

Walk perimeter(const Wall& w) { return w.faces()[static_cast<std::size_t>(w.outer_face())].boundary; }

std::set<VertexId> surround(const Wall& w, VertexId v) {
  auto label = w.label_of(v);
  bool diagonal = label && label->i >= 2 && label->i <= w.height() && label->j == 2 * label->i;
  if (!diagonal) throw ParameterError("vertex " + std::to_string(v) + " is not a diagonal vertex");
  const MultiGraph& g = *w.host();
  std::set<VertexId> out{v};
  std::deque<VertexId> q{v};
  while (!q.empty()) {
    VertexId x = q.front();
    q.pop_front();
    for (EdgeId e : g.incident(x)) {
      if (!w.contains_edge(e)) continue;
      VertexId y = g.other_end(e, x);
      if (y == v || out.count(y) || w.degree(y) != 2) continue;
      out.insert(y);
      q.push_back(y);
    }
  }
  return out;
}

std::vector<Violation> validate_fin_system(const FinSystem& fs) {
  std::vector<Violation> out;
  if (!fs.wall) {
    out.push_back({1, "fin system without a wall", {}});
    return out;
  }
  const Wall& w = *fs.wall;
  const MultiGraph& g = *w.host();
  std::set<VertexId> diag;
  for (VertexId d : diagonal_vertices(w)) diag.insert(d);
  std::set<VertexId> roots;
  for (std::size_t i = 0; i < fs.fins.size(); ++i) {
    const Fin& f = fs.fins[i];
    int idx = static_cast<int>(i);
    auto fail = [&](int cond, const std::string& what) {
      out.push_back({cond, "fin " + std::to_string(i) + ": " + what, {idx}});
    };
    if (!diag.count(f.s)) {
      fail(2, "root " + std::to_string(f.s) + " is not a diagonal vertex");
      continue;
    }
    if (!roots.insert(f.s).second) fail(2, "root " + std::to_string(f.s) + " repeated");
    if (!f.path.is_valid_in(g) || !f.path.is_path() || f.path.length() < 1) {
      fail(3, "path is not a path of the host");
      continue;
    }
    if (f.path.front() != f.s || f.path.back() != f.t) fail(3, "path does not join s and t");
    if (!w.contains_vertex(f.t)) fail(3, "t is not a wall vertex");
    else if (surround(w, f.s).count(f.t)) fail(3, "t in surround of s");
    for (EdgeId e : f.path.edges)
      if (w.contains_edge(e)) {
        fail(3, "path uses wall edge " + std::to_string(e));
        break;
      }
  }
  for (std::size_t i = 0; i < fs.fins.size(); ++i)
    for (std::size_t j = 0; j < fs.fins.size(); ++j)
      if (i != j && fs.fins[j].path.contains_vertex(fs.fins[i].s))
        out.push_back({4, "root of fin " + std::to_string(i) + " lies on fin " + std::to_string(j),
                       {static_cast<int>(i), static_cast<int>(j)}});
  return out;
}

// ---------------------------------------------------------------------------
// wall search

namespace {

class WallSearch {
 public:
  WallSearch(GraphPtr g, int h, std::uint64_t budget)
      : g_(std::move(g)), lay_(wall_layout(h)), budget_(budget) {
    const MultiGraph& g0 = *g_;
    const int n = g0.vertex_count();
    adj_.resize(static_cast<std::size_t>(n));
    for (VertexId v = 0; v < n; ++v) {
      std::map<VertexId, EdgeId> best;
      for (EdgeId e : g0.incident(v)) {
        VertexId u = g0.other_end(e, v);
        if (u == v) continue;
        if (!best.count(u)) best[u] = e;
      }
      for (auto [u, e] : best) adj_[v].push_back({u, e});
    }
    used_.assign(static_cast<std::size_t>(n), false);
    image_.assign(static_cast<std::size_t>(lay_->vertex_count()), kNoVertex);
    branch_.assign(lay_->edges().size(), Walk{});
    plan();
  }

  WallSearchResult run() {
    WallSearchResult res;
    bool ok = feasible() && step(0);
    res.expansions = expansions_;
    if (ok) {
      std::vector<Walk> bs = branch_;
      for (std::size_t e = 0; e < bs.size(); ++e)
        if (bs[e].front() != image_[lay_->edges()[e].first]) bs[e] = bs[e].reversed();
      res.wall = Wall::from_branches(g_, lay_->height(), image_, std::move(bs));
      res.status = SearchStatus::kFound;
    } else {
      res.status = exhausted_ ? SearchStatus::kBudgetExhausted : SearchStatus::kNotFound;
    }
    return res;
  }

 private:
  struct Step {
    int vertex;  // layout vertex placed at this step
    int parent;  // layout neighbour it hangs from, -1 for the first one
    std::vector<int> closing;  // other placed neighbours to connect
  };

  bool feasible() const {
    const MultiGraph& w0 = lay_->graph();
    if (g_->vertex_count() < w0.vertex_count()) return false;
    int need3 = 0, have3 = 0;
    for (VertexId v = 0; v < w0.vertex_count(); ++v) need3 += w0.degree(v) >= 3;
    for (const auto& a : adj_) have3 += a.size() >= 3;
    return have3 >= need3;
  }

  // Row-major order, so every brick closes as soon as its last corner is
  // placed. Each vertex hangs from its left neighbour, or from the one above
  // at the start of a row.
  void plan() {
    const MultiGraph& w0 = lay_->graph();
    std::vector<bool> placed(static_cast<std::size_t>(w0.vertex_count()), false);
    for (int v = 0; v < w0.vertex_count(); ++v) {
      Step s{v, -1, {}};
      const auto& rot = lay_->rotation(v);
      for (int u : rot)
        if (placed[u] && s.parent < 0) s.parent = u;
      for (int u : rot)
        if (placed[u] && u != s.parent) s.closing.push_back(u);
      placed[v] = true;
      steps_.push_back(std::move(s));
    }
    remaining_.assign(static_cast<std::size_t>(w0.vertex_count()), 0);
    for (int v = 0; v < w0.vertex_count(); ++v) remaining_[v] = w0.degree(v);
  }

  int free_degree(VertexId y) const {
    int k = 0;
    for (auto [w, e] : adj_[y]) k += !used_[w];
    return k;
  }

  // Every placed vertex needs a fresh neighbour per unrouted branch.
  bool room_left(std::size_t k) const {
    for (std::size_t q = 0; q <= k; ++q) {
      int v = steps_[q].vertex;
      if (remaining_[v] > 0 && free_degree(image_[v]) < remaining_[v]) return false;
    }
    return true;
  }

  void routed(int a, int b, int delta) {
    remaining_[a] -= delta;
    remaining_[b] -= delta;
  }

  bool tick() {
    if (++expansions_ > budget_) exhausted_ = true;
    return !exhausted_;
  }

  bool step(std::size_t k) {
    if (exhausted_) return false;
    if (k == steps_.size()) return true;
    const Step& s = steps_[k];
    const int need = lay_->graph().degree(s.vertex);
    if (s.parent < 0) {
      for (VertexId y = 0; y < static_cast<VertexId>(adj_.size()); ++y) {
        if (static_cast<int>(adj_[y].size()) < need) continue;
        if (!tick()) return false;
        place(s.vertex, y);
        if (close(k, 0)) return true;
        unplace(s.vertex, y);
        if (exhausted_) return false;
      }
      return false;
    }
    const VertexId from = image_[s.parent];
    const int edge = lay_->edge_between(s.parent, s.vertex);
    const int limit = static_cast<int>(adj_.size());
    for (int len = 1; len < limit; ++len) {
      Walk cur = Walk::single(from);
      if (grow(k, edge, need, cur, len)) return true;
      if (exhausted_) return false;
    }
    return false;
  }

  // Paths of exactly len edges from the parent's image to a fresh vertex.
  bool grow(std::size_t k, int edge, int need, Walk& cur, int len) {
    if (!tick()) return false;
    VertexId at = cur.back();
    for (auto [w, e] : adj_[at]) {
      if (used_[w]) continue;
      cur.vertices.push_back(w);
      cur.edges.push_back(e);
      used_[w] = true;
      bool ok = false;
      if (cur.length() == len) {
        if (free_degree(w) + 1 + static_cast<int>(steps_[k].closing.size()) >= need) {
          const Step& s = steps_[k];
          image_[s.vertex] = w;
          branch_[static_cast<std::size_t>(edge)] = cur;
          routed(s.vertex, s.parent, 1);
          ok = close(k, 0);
          if (!ok) {
            routed(s.vertex, s.parent, -1);
            image_[s.vertex] = kNoVertex;
          }
        }
      } else {
        ok = grow(k, edge, need, cur, len);
      }
      if (!ok) used_[w] = false;
      cur.vertices.pop_back();
      cur.edges.pop_back();
      if (ok) return true;
      if (exhausted_) return false;
    }
    return false;
  }

  int s_vertex(std::size_t k) const { return steps_[k].vertex; }

  void place(int v, VertexId y) {
    image_[v] = y;
    used_[y] = true;
  }
  void unplace(int v, VertexId y) {
    image_[v] = kNoVertex;
    used_[y] = false;
  }

  // Connects the vertex of step k to its c-th already placed neighbour.
  bool close(std::size_t k, std::size_t c) {
    const Step& s = steps_[k];
    if (c == s.closing.size()) return room_left(k) && step(k + 1);
    VertexId src = image_[s.vertex], dst = image_[s.closing[c]];
    int edge = lay_->edge_between(s.vertex, s.closing[c]);
    auto dist = distances(dst);
    if (dist[src] == std::numeric_limits<int>::max()) return false;
    const int limit = static_cast<int>(adj_.size());
    for (int len = dist[src]; len < limit; ++len) {
      Walk cur = Walk::single(src);
      if (connect(k, c, edge, dst, cur, len, dist)) return true;
      if (exhausted_) return false;
    }
    return false;
  }

  bool connect(std::size_t k, std::size_t c, int edge, VertexId dst, Walk& cur, int len,
               const std::vector<int>& dist) {
    if (!tick()) return false;
    VertexId at = cur.back();
    int depth = cur.length();
    for (auto [w, e] : adj_[at]) {
      bool last = depth + 1 == len;
      if (w == dst) {
        if (!last) continue;
      } else if (last || used_[w] || dist[w] == std::numeric_limits<int>::max() ||
                 depth + 1 + dist[w] > len) {
        continue;
      }
      cur.vertices.push_back(w);
      cur.edges.push_back(e);
      bool ok;
      if (w == dst) {
        branch_[static_cast<std::size_t>(edge)] = cur;
        routed(s_vertex(k), steps_[k].closing[c], 1);
        ok = close(k, c + 1);
        if (!ok) routed(s_vertex(k), steps_[k].closing[c], -1);
      } else {
        used_[w] = true;
        ok = connect(k, c, edge, dst, cur, len, dist);
        if (!ok) used_[w] = false;
      }
      cur.vertices.pop_back();
      cur.edges.pop_back();
      if (ok) return true;
      if (exhausted_) return false;
    }
    return false;
  }

  std::vector<int> distances(VertexId dst) const {
    std::vector<int> d(adj_.size(), std::numeric_limits<int>::max());
    std::deque<VertexId> q{dst};
    d[dst] = 0;
    while (!q.empty()) {
      VertexId u = q.front();
      q.pop_front();
      for (auto [w, e] : adj_[u]) {
        if (d[w] != std::numeric_limits<int>::max()) continue;
        d[w] = d[u] + 1;
        if (!used_[w]) q.push_back(w);
      }
    }
    return d;
  }

  GraphPtr g_;
  std::shared_ptr<const WallLayout> lay_;
  std::uint64_t budget_;
  std::uint64_t expansions_ = 0;
  bool exhausted_ = false;
  std::vector<std::vector<std::pair<VertexId, EdgeId>>> adj_;
  std::vector<bool> used_;
  std::vector<VertexId> image_;
  std::vector<Walk> branch_;
  std::vector<Step> steps_;
  std::vector<int> remaining_;  // unrouted branches per layout vertex
};

}  // namespace

WallSearchResult find_wall(GraphPtr g, int h, std::uint64_t budget) {
  if (h < 2 || h % 2 != 0) throw ParameterError("wall height must be even and at least 2");
  if (budget == 0) throw ParameterError("search budget must be positive");
  WallSearch search(std::move(g), h, budget);
  return search.run();
}

}  // namespace forge
