#include "forge/formats.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

#include "forge/errors.hpp"

namespace forge {

namespace {

struct Line {
  int number;
  std::string text;
};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(int line, const std::string& why) {
  throw InputError("line " + std::to_string(line) + ": " + why);
}

// content lines, header dropped
std::vector<Line> content_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream is(text);
  std::string raw;
  int n = 0;
  bool first = true;
  while (std::getline(is, raw)) {
    ++n;
    std::string t = trim(raw);
    if (t.empty() || t[0] == '#') continue;
    if (first && t.rfind("format:", 0) == 0) {
      first = false;
      if (trim(t.substr(7)) != "1") bad(n, "unsupported format version '" + trim(t.substr(7)) + "'");
      continue;
    }
    first = false;
    out.push_back({n, t});
  }
  return out;
}

int to_int(const std::string& tok, int line) {
  int v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || p != tok.data() + tok.size()) bad(line, "expected an integer, got '" + tok + "'");
  return v;
}

std::vector<int> ints(const std::string& s, int line) {
  std::istringstream is(s);
  std::vector<int> out;
  std::string tok;
  while (is >> tok) out.push_back(to_int(tok, line));
  return out;
}

Walk walk_from(const std::vector<int>& xs, int line) {
  if (xs.empty() || xs.size() % 2 == 0) bad(line, "a walk needs alternating vertex and edge ids, starting and ending with a vertex");
  Walk w;
  for (std::size_t i = 0; i < xs.size(); ++i) (i % 2 ? w.edges : w.vertices).push_back(xs[i]);
  return w;
}

// "a -> b" split
std::pair<std::string, std::string> arrow(const Line& l) {
  auto p = l.text.find("->");
  if (p == std::string::npos) bad(l.number, "missing '->'");
  return {trim(l.text.substr(0, p)), trim(l.text.substr(p + 2))};
}

std::string label_text(WallLabel l) { return "(" + std::to_string(l.i) + "," + std::to_string(l.j) + ")"; }

WallLabel parse_label(const std::string& s, int line) {
  static const std::regex re(R"(\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\))");
  std::smatch m;
  if (!std::regex_match(s, m, re)) bad(line, "expected a label (i,j), got '" + s + "'");
  return {to_int(m[1], line), to_int(m[2], line)};
}

const char* kHeader = "format: 1\n";

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
  if (!out) throw InputError("write to " + path + " failed");
}

MultiGraph parse_graph(const std::string& text) {
  auto lines = content_lines(text);
  if (lines.empty()) throw InputError("line 1: missing 'n m' line");
  auto head = ints(lines[0].text, lines[0].number);
  if (head.size() != 2 || head[0] < 0 || head[1] < 0) bad(lines[0].number, "expected 'n m' with n, m >= 0");
  const int n = head[0], m = head[1];
  if (static_cast<int>(lines.size()) - 1 != m)
    bad(lines.back().number, "expected " + std::to_string(m) + " edge lines, found " +
                                 std::to_string(lines.size() - 1));
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (int k = 1; k <= m; ++k) {
    auto uv = ints(lines[k].text, lines[k].number);
    if (uv.size() != 2) bad(lines[k].number, "expected 'u v'");
    for (int x : uv)
      if (x < 0 || x >= n) bad(lines[k].number, "endpoint " + std::to_string(x) + " is not below n = " + std::to_string(n));
    edges.emplace_back(uv[0], uv[1]);
  }
  return MultiGraph::build(n, edges);
}

std::string serialize_graph(const MultiGraph& g) {
  std::ostringstream os;
  os << kHeader << g.vertex_count() << " " << g.edge_count() << "\n";
  for (EdgeId e : g.edge_ids()) {
    auto [u, v] = g.ends(e);
    os << u << " " << v << "\n";
  }
  return os.str();
}

Walk parse_walk(const std::string& text) { return walk_from(ints(text, 1), 1); }

std::string serialize_walk(const Walk& w) {
  std::ostringstream os;
  for (std::size_t i = 0; i < w.vertices.size(); ++i) {
    if (i) os << " " << w.edges[i - 1] << " ";
    os << w.vertices[i];
  }
  return os.str();
}

ImmersionMap parse_map(const std::string& text, GraphPtr pattern, GraphPtr host) {
  if (!pattern || !host) throw InputError("map needs a pattern and a host");
  ImmersionMap m;
  m.pattern = pattern;
  m.host = host;
  m.vertex_map.assign(static_cast<std::size_t>(pattern->vertex_count()), kNoVertex);
  for (const Line& l : content_lines(text)) {
    auto [lhs, rhs] = arrow(l);
    std::istringstream is(lhs);
    std::string kind, id;
    if (!(is >> kind >> id) || (kind != "v" && kind != "e")) bad(l.number, "expected 'v p -> h' or 'e p -> walk'");
    int p = to_int(id, l.number);
    if (kind == "v") {
      if (!pattern->has_vertex(p)) bad(l.number, "pattern has no vertex " + id);
      auto hv = ints(rhs, l.number);
      if (hv.size() != 1) bad(l.number, "expected one host vertex");
      if (m.vertex_map[p] != kNoVertex) bad(l.number, "vertex " + id + " mapped twice");
      m.vertex_map[p] = hv[0];
    } else {
      if (!pattern->has_edge(p)) bad(l.number, "pattern has no edge " + id);
      if (m.edge_map.count(p)) bad(l.number, "edge " + id + " mapped twice");
      m.edge_map[p] = walk_from(ints(rhs, l.number), l.number);
    }
  }
  return m;
}

std::string serialize_map(const ImmersionMap& m) {
  std::ostringstream os;
  os << kHeader;
  for (std::size_t v = 0; v < m.vertex_map.size(); ++v) os << "v " << v << " -> " << m.vertex_map[v] << "\n";
  for (const auto& [e, w] : m.edge_map) os << "e " << e << " -> " << serialize_walk(w) << "\n";
  return os.str();
}

std::string serialize_grid_labeling(const GridLabeling& l) {
  std::ostringstream os;
  os << kHeader;
  for (int i = 1; i <= l.g; ++i)
    for (int j = 1; j <= l.g; ++j) os << "label: " << i << " " << j << " -> " << l.at(i, j) << "\n";
  return os.str();
}

namespace {

void label_line(const Line& l, std::map<std::pair<int, int>, VertexId>& out) {
  auto [lhs, rhs] = arrow(l);
  auto ij = ints(lhs.substr(6), l.number);
  auto v = ints(rhs, l.number);
  if (ij.size() != 2 || v.size() != 1) bad(l.number, "expected 'label: i j -> vertex'");
  if (!out.emplace(std::pair{ij[0], ij[1]}, v[0]).second) bad(l.number, "label repeated");
}

}  // namespace

std::map<std::pair<int, int>, VertexId> parse_labeling(const std::string& text) {
  std::map<std::pair<int, int>, VertexId> out;
  for (const Line& l : content_lines(text)) {
    if (l.text.rfind("label:", 0) != 0) bad(l.number, "expected 'label: i j -> vertex'");
    label_line(l, out);
  }
  return out;
}

std::string serialize_wall(const Wall& w) {
  const WallLayout& lay = w.layout();
  std::ostringstream os;
  os << kHeader;
  for (int k = 0; k < lay.vertex_count(); ++k)
    os << "label: " << lay.labels()[k].i << " " << lay.labels()[k].j << " -> " << w.label_images()[k] << "\n";
  for (std::size_t e = 0; e < lay.edges().size(); ++e) {
    auto [a, b] = lay.edges()[e];
    os << "branch " << label_text(lay.labels()[a]) << "-" << label_text(lay.labels()[b]) << ": "
       << serialize_walk(w.branches()[e]) << "\n";
  }
  return os.str();
}

Wall parse_wall(const std::string& text, GraphPtr host) {
  std::map<std::pair<int, int>, VertexId> labels;
  std::map<std::pair<WallLabel, WallLabel>, std::pair<Walk, int>> branch;
  int last = 1;
  for (const Line& l : content_lines(text)) {
    last = l.number;
    if (l.text.rfind("label:", 0) == 0) {
      label_line(l, labels);
    } else if (l.text.rfind("branch", 0) == 0) {
      auto colon = l.text.find(':');
      auto dash = l.text.find(")-(");
      if (colon == std::string::npos || dash == std::string::npos || dash > colon)
        bad(l.number, "expected 'branch (i,j)-(i',j'): walk'");
      WallLabel a = parse_label(trim(l.text.substr(6, dash + 1 - 6)), l.number);
      WallLabel b = parse_label(trim(l.text.substr(dash + 2, colon - dash - 2)), l.number);
      Walk w = walk_from(ints(l.text.substr(colon + 1), l.number), l.number);
      if (!branch.emplace(std::pair{std::min(a, b), std::max(a, b)}, std::pair{a < b ? w : w.reversed(), l.number})
               .second)
        bad(l.number, "branch repeated");
    } else {
      bad(l.number, "expected a 'label:' or 'branch' line");
    }
  }
  if (labels.empty()) bad(last, "no labels");
  int rows = 0;
  for (const auto& [ij, v] : labels) rows = std::max(rows, ij.first);
  const int h = rows - 1;
  if (h < 1) bad(last, "labels describe no wall");
  auto lay = wall_layout(h);
  if (static_cast<int>(labels.size()) != lay->vertex_count())
    bad(last, std::to_string(labels.size()) + " labels, a wall of height " + std::to_string(h) + " has " +
                  std::to_string(lay->vertex_count()));
  std::vector<VertexId> images(static_cast<std::size_t>(lay->vertex_count()));
  for (const auto& [ij, v] : labels) {
    auto k = lay->find({ij.first, ij.second});
    if (!k) throw InputError("label (" + std::to_string(ij.first) + "," + std::to_string(ij.second) + ") is not a wall position");
    images[*k] = v;
  }
  std::vector<Walk> walks;
  for (auto [a, b] : lay->edges()) {
    WallLabel la = lay->labels()[a], lb = lay->labels()[b];
    auto it = branch.find({std::min(la, lb), std::max(la, lb)});
    if (it == branch.end()) throw InputError("no branch line for " + label_text(la) + "-" + label_text(lb));
    walks.push_back(la < lb ? it->second.first : it->second.first.reversed());
    branch.erase(it);
  }
  if (!branch.empty()) bad(branch.begin()->second.second, "branch between labels that are not adjacent");
  return Wall::from_branches(std::move(host), h, std::move(images), std::move(walks));
}

std::string serialize_decomposition(const TreeDecomposition& d) {
  std::ostringstream os;
  os << kHeader << "t " << d.tree.vertex_count() << "\n";
  for (EdgeId e : d.tree.edge_ids()) {
    auto [u, v] = d.tree.ends(e);
    os << "T " << u << " " << v << "\n";
  }
  for (const auto& [t, bag] : d.bags) {
    os << "B " << t << ":";
    for (VertexId v : bag) os << " " << v;
    os << "\n";
  }
  return os.str();
}

TreeDecomposition parse_decomposition(const std::string& text) {
  auto lines = content_lines(text);
  if (lines.empty() || lines[0].text.rfind("t ", 0) != 0) bad(lines.empty() ? 1 : lines[0].number, "expected 't n'");
  auto n = ints(lines[0].text.substr(2), lines[0].number);
  if (n.size() != 1 || n[0] < 0) bad(lines[0].number, "expected 't n' with n >= 0");
  std::vector<std::pair<VertexId, VertexId>> edges;
  TreeDecomposition d;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const Line& l = lines[k];
    if (l.text.rfind("T ", 0) == 0) {
      if (!d.bags.empty()) bad(l.number, "tree edges must come before bags");
      auto uv = ints(l.text.substr(2), l.number);
      if (uv.size() != 2) bad(l.number, "expected 'T u v'");
      for (int x : uv)
        if (x < 0 || x >= n[0]) bad(l.number, "tree node " + std::to_string(x) + " out of range");
      edges.emplace_back(uv[0], uv[1]);
    } else if (l.text.rfind("B ", 0) == 0) {
      auto colon = l.text.find(':');
      if (colon == std::string::npos) bad(l.number, "expected 'B t: v1 v2 ...'");
      auto t = ints(l.text.substr(2, colon - 2), l.number);
      if (t.size() != 1 || t[0] < 0 || t[0] >= n[0]) bad(l.number, "bad tree node");
      if (!d.bags.emplace(t[0], ints(l.text.substr(colon + 1), l.number)).second) bad(l.number, "bag repeated");
    } else {
      bad(l.number, "expected 'T u v' or 'B t: ...'");
    }
  }
  d.tree = MultiGraph::build(n[0], edges);
  return d;
}

LiftRecord parse_lift_record(const std::string& line) {
  static const std::regex re(R"(lift\s+(-?\d+):\s*-(\d+)\s+-(\d+)\s+\+(\d+)\((-?\d+),(-?\d+)\))");
  std::smatch m;
  std::string t = trim(line);
  if (!std::regex_match(t, m, re)) throw InputError("expected 'lift v: -d1 -d2 +d0(u1,u2)', got '" + t + "'");
  LiftRecord r;
  r.v = std::stoi(m[1]);
  r.d1 = std::stoi(m[2]);
  r.d2 = std::stoi(m[3]);
  r.d0 = std::stoi(m[4]);
  r.u1 = std::stoi(m[5]);
  r.u2 = std::stoi(m[6]);
  return r;
}

std::string serialize_lift_history(const std::vector<LiftRecord>& history) {
  std::string out = kHeader;
  for (const auto& r : history) out += to_string(r) + "\n";
  return out;
}

std::vector<LiftRecord> parse_lift_history(const std::string& text) {
  std::vector<LiftRecord> out;
  for (const Line& l : content_lines(text)) {
    try {
      out.push_back(parse_lift_record(l.text));
    } catch (const InputError& e) {
      bad(l.number, e.what());
    }
  }
  return out;
}

std::string serialize_fins(const FinSystem& fs) {
  if (!fs.wall) throw InputError("fin system without a wall");
  std::ostringstream os;
  os << kHeader;
  for (const Fin& f : fs.fins) {
    auto l = fs.wall->label_of(f.s);
    if (!l) throw InputError("fin root " + std::to_string(f.s) + " is not a labelled wall vertex");
    os << "fin " << label_text(*l) << ": " << serialize_walk(f.path) << "\n";
  }
  return os.str();
}

std::vector<std::pair<WallLabel, Walk>> parse_fin_lines(const std::string& text) {
  std::vector<std::pair<WallLabel, Walk>> out;
  for (const Line& l : content_lines(text)) {
    auto colon = l.text.find(':');
    if (l.text.rfind("fin", 0) != 0 || colon == std::string::npos) bad(l.number, "expected 'fin (i,j): walk'");
    WallLabel lab = parse_label(trim(l.text.substr(3, colon - 3)), l.number);
    out.emplace_back(lab, walk_from(ints(l.text.substr(colon + 1), l.number), l.number));
  }
  return out;
}

FinSystem parse_fins(const std::string& text, std::shared_ptr<const Wall> wall) {
  if (!wall) throw InputError("fins need a wall");
  FinSystem fs{wall, {}};
  for (auto& [lab, w] : parse_fin_lines(text)) {
    if (!wall->layout().contains(lab)) throw InputError("label " + label_text(lab) + " is not a wall position");
    VertexId s = wall->at(lab);
    if (w.front() != s) throw InputError("fin does not start at the vertex labelled " + label_text(lab));
    fs.fins.push_back({s, w, w.back()});
  }
  return fs;
}

std::vector<int> parse_id_list(const std::string& text) {
  std::vector<int> out;
  for (const Line& l : content_lines(text)) {
    std::string s = l.text;
    std::replace(s.begin(), s.end(), ',', ' ');
    for (int x : ints(s, l.number)) out.push_back(x);
  }
  return out;
}

std::string export_dot(const MultiGraph& g, const Wall* wall, const ImmersionMap* map) {
  static const char* palette[] = {"red", "forestgreen", "orange", "purple", "brown", "deeppink", "gold", "cyan4"};
  std::map<VertexId, std::string> node_label;
  std::map<VertexId, bool> boxed;
  std::map<EdgeId, std::string> colour;
  auto need_vertex = [&](VertexId v, const char* what) {
    if (!g.has_vertex(v)) throw InputError(std::string(what) + " refers to missing vertex " + std::to_string(v));
  };
  auto need_edge = [&](EdgeId e, const char* what) {
    if (!g.has_edge(e)) throw InputError(std::string(what) + " refers to missing edge " + std::to_string(e));
  };
  if (wall) {
    const WallLayout& lay = wall->layout();
    for (int k = 0; k < lay.vertex_count(); ++k) {
      VertexId v = wall->label_images()[k];
      need_vertex(v, "wall overlay");
      node_label[v] = std::to_string(v) + " " + label_text(lay.labels()[k]);
    }
    for (const Walk& b : wall->branches()) {
      for (VertexId v : b.vertices) need_vertex(v, "wall overlay");
      for (EdgeId e : b.edges) {
        need_edge(e, "wall overlay");
        colour[e] = "blue";
      }
    }
  }
  if (map) {
    for (VertexId v : map->vertex_map) {
      need_vertex(v, "map overlay");
      boxed[v] = true;
    }
    int k = 0;
    for (const auto& [pe, w] : map->edge_map) {
      const char* c = palette[k++ % std::size(palette)];
      for (VertexId v : w.vertices) need_vertex(v, "map overlay");
      for (EdgeId e : w.edges) {
        need_edge(e, "map overlay");
        colour[e] = c;
      }
      (void)pe;
    }
  }
  std::ostringstream os;
  os << "graph G {\n";
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    os << "  " << v;
    std::vector<std::string> attrs;
    if (auto it = node_label.find(v); it != node_label.end()) attrs.push_back("label=\"" + it->second + "\"");
    if (boxed.count(v)) attrs.push_back("shape=box");
    if (!attrs.empty()) {
      os << " [";
      for (std::size_t i = 0; i < attrs.size(); ++i) os << (i ? ", " : "") << attrs[i];
      os << "]";
    }
    os << ";\n";
  }
  for (EdgeId e : g.edge_ids()) {
    auto [u, v] = g.ends(e);
    os << "  " << u << " -- " << v << " [label=\"" << e << "\"";
    if (auto it = colour.find(e); it != colour.end()) os << ", color=" << it->second << ", penwidth=2";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace forge
