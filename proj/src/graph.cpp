#include "signcop/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <utility>

#include "signcop/error.hpp"
#include "signcop/rng.hpp"

namespace signcop {

std::vector<int> SignedGraph::signs() const {
  std::vector<int> s;
  s.reserve(edges.size());
  for (const auto& e : edges) s.push_back(e.sign);
  return s;
}

void check_canonical(const SignedGraph& g) {
  std::set<std::pair<NodeId, NodeId>> seen;
  for (std::size_t i = 0; i < g.edges.size(); ++i) {
    const auto& e = g.edges[i];
    const std::string where = "edge " + std::to_string(i) + ": ";
    if (e.src >= g.node_count || e.dst >= g.node_count)
      throw Error(where + "node id out of range");
    if (e.src == e.dst) throw Error(where + "self-loop");
    if (e.src > e.dst) throw Error(where + "not canonical (src > dst)");
    if (e.sign != 1 && e.sign != -1) throw Error(where + "sign must be -1 or +1");
    if (!seen.emplace(e.src, e.dst).second) throw Error(where + "duplicate pair");
  }
}

namespace {

template <class T>
bool parse_number(std::string_view tok, T& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < s.size() && !(s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

}  // namespace

SignedGraph parse_edge_list(std::istream& in) {
  SignedGraph g;
  std::string line;
  std::size_t lineno = 0;
  std::int64_t max_id = -1;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks.size() != 3) throw ParseError("expected 'src dst sign'", lineno);
    std::int64_t src = 0, dst = 0;
    int sign = 0;
    if (!parse_number(toks[0], src) || !parse_number(toks[1], dst))
      throw ParseError("node id is not an integer", lineno);
    if (src < 0 || dst < 0) throw ParseError("negative node id", lineno);
    if (src > std::int64_t{0xFFFFFFFE} || dst > std::int64_t{0xFFFFFFFE})
      throw ParseError("node id too large", lineno);
    if (!parse_number(toks[2], sign) || (sign != 1 && sign != -1))
      throw ParseError("sign must be -1 or 1", lineno);
    g.edges.push_back({static_cast<NodeId>(src), static_cast<NodeId>(dst), sign});
    max_id = std::max({max_id, src, dst});
  }
  g.node_count = static_cast<std::size_t>(max_id + 1);
  return g;
}

SignedGraph load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open edge list: " + path.string());
  return parse_edge_list(in);
}

void write_edge_list(std::ostream& out, const SignedGraph& g) {
  for (const auto& e : g.edges) out << e.src << '\t' << e.dst << '\t' << e.sign << '\n';
}

void save_edge_list(const std::filesystem::path& path, const SignedGraph& g) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write edge list: " + path.string());
  write_edge_list(out, g);
  if (!out) throw Error("write failed: " + path.string());
}

SignedGraph resolve_reciprocal_conflicts(const SignedGraph& g) {
  // pair -> (has positive, has negative)
  std::map<std::pair<NodeId, NodeId>, std::pair<bool, bool>> merged;
  for (const auto& e : g.edges) {
    if (e.src == e.dst) continue;
    auto key = std::minmax(e.src, e.dst);
    auto& flags = merged[{key.first, key.second}];
    (e.sign > 0 ? flags.first : flags.second) = true;
  }
  SignedGraph out;
  out.node_count = g.node_count;
  out.edges.reserve(merged.size());
  for (const auto& [key, flags] : merged)
    out.edges.push_back({key.first, key.second, flags.second ? -1 : 1});
  return out;
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Root is always the smaller id, so roots are component minima.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;
  }
};

}  // namespace

SignedGraph largest_connected_component(const SignedGraph& g) {
  if (g.node_count == 0) return SignedGraph{};
  DisjointSets sets(g.node_count);
  std::vector<bool> touched(g.node_count, false);
  for (const auto& e : g.edges) {
    sets.unite(e.src, e.dst);
    touched[e.src] = touched[e.dst] = true;
  }
  // Isolated nodes are their own singleton components.
  std::vector<std::size_t> size(g.node_count, 0);
  for (std::size_t v = 0; v < g.node_count; ++v) ++size[sets.find(v)];
  std::size_t best = 0;
  for (std::size_t root = 0; root < g.node_count; ++root)
    if (size[root] > size[best]) best = root;  // strict: ties keep the smaller root

  std::vector<NodeId> remap(g.node_count, 0);
  std::size_t next = 0;
  for (std::size_t v = 0; v < g.node_count; ++v)
    if (sets.find(v) == best) remap[v] = static_cast<NodeId>(next++);

  SignedGraph out;
  out.node_count = next;
  for (const auto& e : g.edges)
    if (sets.find(e.src) == best) out.edges.push_back({remap[e.src], remap[e.dst], e.sign});
  std::sort(out.edges.begin(), out.edges.end(), [](const SignedEdge& a, const SignedEdge& b) {
    return std::pair(a.src, a.dst) < std::pair(b.src, b.dst);
  });
  return out;
}

SignedGraph preprocess(const SignedGraph& g) {
  return largest_connected_component(resolve_reciprocal_conflicts(g));
}

EdgeSplit split_edges(const SignedGraph& g, SplitRatios r, std::uint64_t seed) {
  if (!(r.train > 0 && r.val > 0 && r.test > 0))
    throw ConfigError("split ratios must all be positive");
  if (std::abs(r.train + r.val + r.test - 1.0) > 1e-9)
    throw ConfigError("split ratios must sum to 1");
  const std::size_t n = g.edges.size();
  if (n < 3) throw Error("need at least 3 edges to populate train/val/test splits");

  EdgeSplit s;
  s.seed = seed;
  s.edge_order.resize(n);
  std::iota(s.edge_order.begin(), s.edge_order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(s.edge_order[i], s.edge_order[rng.below(i + 1)]);

  // The small epsilon keeps e.g. 0.1 * 30 = 3.0000000000000004 from
  // flooring differently than decimal arithmetic would.
  auto floor_count = [n](double ratio) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(ratio * n + 1e-9)));
  };
  s.m_val = floor_count(r.val);
  s.m_test = floor_count(r.test);
  if (s.m_val + s.m_test >= n) throw Error("too few edges for the requested split ratios");
  s.m_train = n - s.m_val - s.m_test;
  return s;
}

SignedGraph reorder_edges(const SignedGraph& g, std::span<const std::size_t> order) {
  SignedGraph out;
  out.node_count = g.node_count;
  out.edges.reserve(order.size());
  for (std::size_t idx : order) {
    if (idx >= g.edges.size()) throw DimensionError("reorder_edges: index out of range");
    out.edges.push_back(g.edges[idx]);
  }
  return out;
}

SignedGraph generate_two_community(std::size_t n_per_group, double p_intra, double p_inter,
                                   std::uint64_t seed) {
  if (n_per_group < 2) throw ConfigError("n_per_group must be at least 2");
  if (!(p_intra > 0 && p_intra <= 1) || !(p_inter > 0 && p_inter <= 1))
    throw ConfigError("edge probabilities must lie in (0, 1]");
  Rng rng(seed);
  const std::size_t n = n_per_group;
  SignedGraph g;
  g.node_count = 2 * n;
  std::vector<SignedEdge> intra1, intra2, inter;
  for (std::size_t u = 0; u < 2 * n; ++u) {
    for (std::size_t v = u + 1; v < 2 * n; ++v) {
      const bool same = (u < n) == (v < n);
      // One draw per pair, consumed in a fixed order.
      const double draw = rng.uniform();
      const SignedEdge e{static_cast<NodeId>(u), static_cast<NodeId>(v), same ? 1 : -1};
      if (same && draw < p_intra) (u < n ? intra1 : intra2).push_back(e);
      if (!same && draw < p_inter) inter.push_back(e);
    }
  }
  g.edges = std::move(intra1);
  g.edges.insert(g.edges.end(), intra2.begin(), intra2.end());
  g.edges.insert(g.edges.end(), inter.begin(), inter.end());
  return g;
}

std::vector<int> remap_labels(std::span<const int> hard) {
  std::vector<int> out;
  out.reserve(hard.size());
  for (int y : hard) {
    if (y != 1 && y != -1) throw DomainError("label must be -1 or +1");
    out.push_back((y + 1) / 2);
  }
  return out;
}

}  // namespace signcop
