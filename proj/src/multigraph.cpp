#include "forge/multigraph.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_map>

namespace forge {

MultiGraph MultiGraph::build(int vertex_count,
                             std::span<const std::pair<VertexId, VertexId>> edges) {
  if (vertex_count < 0) throw ParameterError("negative vertex count");
  MultiGraph g;
  g.incidence_.resize(static_cast<std::size_t>(vertex_count));
  for (std::size_t i = 0; i < edges.size(); ++i) {
    auto [a, b] = edges[i];
    if (a < 0 || a >= vertex_count || b < 0 || b >= vertex_count) {
      std::ostringstream msg;
      msg << "edge entry " << i << " (" << a << "," << b << ") has an endpoint outside [0,"
          << vertex_count << ")";
      throw InputError(msg.str());
    }
    g.insert_edge(a, b);
  }
  return g;
}

void MultiGraph::insert_edge(VertexId a, VertexId b) {
  EdgeId id = next_edge_id();
  slots_.push_back(Endpoints{a, b});
  incidence_[a].push_back(id);
  if (a != b) incidence_[b].push_back(id);
  ++live_edges_;
}

void MultiGraph::check_vertex(VertexId v) const {
  if (!has_vertex(v)) throw QueryError("unknown vertex " + std::to_string(v));
}

Endpoints MultiGraph::ends(EdgeId e) const {
  if (!has_edge(e)) throw QueryError("unknown edge " + std::to_string(e));
  return *slots_[e];
}

bool MultiGraph::is_incident(EdgeId e, VertexId v) const {
  auto [a, b] = ends(e);
  return a == v || b == v;
}

VertexId MultiGraph::other_end(EdgeId e, VertexId v) const {
  auto [a, b] = ends(e);
  if (a == v) return b;
  if (b == v) return a;
  throw QueryError("edge " + std::to_string(e) + " is not incident with vertex " +
                   std::to_string(v));
}

const std::vector<EdgeId>& MultiGraph::incident(VertexId v) const {
  check_vertex(v);
  return incidence_[v];
}

int MultiGraph::degree(VertexId v) const {
  int d = 0;
  for (EdgeId e : incident(v)) d += is_loop(e) ? 2 : 1;
  return d;
}

std::vector<EdgeId> MultiGraph::edge_ids() const {
  std::vector<EdgeId> ids;
  ids.reserve(static_cast<std::size_t>(live_edges_));
  for (EdgeId e = 0; e < next_edge_id(); ++e)
    if (slots_[e]) ids.push_back(e);
  return ids;
}

std::vector<EdgeId> MultiGraph::edges_between(VertexId a, VertexId b) const {
  check_vertex(b);
  std::vector<EdgeId> out;
  for (EdgeId e : incident(a)) {
    auto [x, y] = *slots_[e];
    if ((x == a && y == b) || (x == b && y == a)) out.push_back(e);
  }
  return out;
}

MultiGraph MultiGraph::delete_edges(std::span<const EdgeId> ids) const {
  MultiGraph g = *this;
  std::set<EdgeId> doomed;
  for (EdgeId e : ids) {
    if (!has_edge(e)) throw QueryError("cannot delete unknown edge " + std::to_string(e));
    doomed.insert(e);
  }
  for (EdgeId e : doomed) {
    auto [a, b] = *g.slots_[e];
    g.slots_[e].reset();
    std::erase(g.incidence_[a], e);
    if (a != b) std::erase(g.incidence_[b], e);
    --g.live_edges_;
  }
  return g;
}

std::pair<MultiGraph, EdgeId> MultiGraph::add_edge(VertexId a, VertexId b) const {
  check_vertex(a);
  check_vertex(b);
  MultiGraph g = *this;
  EdgeId id = g.next_edge_id();
  g.insert_edge(a, b);
  return {std::move(g), id};
}

MultiGraph MultiGraph::add_vertices(int count) const {
  if (count < 0) throw ParameterError("negative vertex count");
  MultiGraph g = *this;
  g.incidence_.resize(g.incidence_.size() + static_cast<std::size_t>(count));
  return g;
}

MultiGraph MultiGraph::simplified() const {
  std::set<std::pair<VertexId, VertexId>> seen;
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (EdgeId e : edge_ids()) {
    auto [a, b] = *slots_[e];
    if (a == b) continue;
    auto key = std::minmax(a, b);
    if (seen.insert(key).second) edges.emplace_back(key.first, key.second);
  }
  return build(vertex_count(), edges);
}

bool MultiGraph::operator==(const MultiGraph& other) const {
  if (vertex_count() != other.vertex_count() || live_edges_ != other.live_edges_)
    return false;
  EdgeId top = std::max(next_edge_id(), other.next_edge_id());
  for (EdgeId e = 0; e < top; ++e) {
    bool mine = has_edge(e), theirs = other.has_edge(e);
    if (mine != theirs) return false;
    if (mine) {
      Endpoints x = *slots_[e], y = *other.slots_[e];
      if (std::minmax(x.u, x.v) != std::minmax(y.u, y.v)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

bool Walk::is_valid_in(const MultiGraph& g) const {
  if (vertices.empty() || vertices.size() != edges.size() + 1) return false;
  for (VertexId v : vertices)
    if (!g.has_vertex(v)) return false;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!g.has_edge(edges[i])) return false;
    auto [a, b] = g.ends(edges[i]);
    VertexId x = vertices[i], y = vertices[i + 1];
    if (!((a == x && b == y) || (a == y && b == x))) return false;
  }
  return true;
}

bool Walk::is_path() const {
  std::set<VertexId> seen(vertices.begin(), vertices.end());
  return !vertices.empty() && seen.size() == vertices.size();
}

bool Walk::is_cycle() const {
  if (edges.empty() || vertices.front() != vertices.back()) return false;
  std::set<VertexId> interior(vertices.begin(), vertices.end() - 1);
  if (interior.size() != vertices.size() - 1) return false;
  std::set<EdgeId> es(edges.begin(), edges.end());
  return es.size() == edges.size();
}

bool Walk::contains_vertex(VertexId v) const {
  return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

bool Walk::contains_edge(EdgeId e) const {
  return std::find(edges.begin(), edges.end(), e) != edges.end();
}

Walk Walk::reversed() const {
  Walk w{{vertices.rbegin(), vertices.rend()}, {edges.rbegin(), edges.rend()}};
  return w;
}

Walk Walk::joined(const Walk& tail) const {
  if (tail.empty()) return *this;
  if (empty()) return tail;
  if (back() != tail.front()) throw ParameterError("walks do not meet end to start");
  Walk w = *this;
  w.vertices.insert(w.vertices.end(), tail.vertices.begin() + 1, tail.vertices.end());
  w.edges.insert(w.edges.end(), tail.edges.begin(), tail.edges.end());
  return w;
}

Walk shortcut_to_path(const Walk& w) {
  Walk out;
  std::unordered_map<VertexId, std::size_t> pos;
  for (std::size_t i = 0; i < w.vertices.size(); ++i) {
    VertexId v = w.vertices[i];
    if (auto it = pos.find(v); it != pos.end()) {
      std::size_t keep = it->second;
      for (std::size_t k = keep + 1; k < out.vertices.size(); ++k) pos.erase(out.vertices[k]);
      out.vertices.resize(keep + 1);
      out.edges.resize(keep);
      continue;
    }
    if (i > 0) out.edges.push_back(w.edges[i - 1]);
    pos[v] = out.vertices.size();
    out.vertices.push_back(v);
  }
  return out;
}

std::string to_string(const Walk& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.vertices.size(); ++i) {
    if (i > 0) os << ' ' << w.edges[i - 1] << ' ';
    os << w.vertices[i];
  }
  return os.str();
}

}  // namespace forge
