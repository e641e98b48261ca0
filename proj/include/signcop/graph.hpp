#pragma once

// Signed graphs: ingestion, the preprocessing protocol (reciprocal-conflict
// resolution and largest-component extraction), train/val/test splitting
// and the two-community synthetic generator.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace signcop {

using NodeId = std::uint32_t;

struct SignedEdge {
  NodeId src = 0;
  NodeId dst = 0;
  int sign = 1;  // -1 or +1

  bool operator==(const SignedEdge&) const = default;
};

struct SignedGraph {
  std::size_t node_count = 0;
  std::vector<SignedEdge> edges;

  std::size_t edge_count() const noexcept { return edges.size(); }
  std::vector<int> signs() const;
  bool operator==(const SignedGraph&) const = default;
};

// Throws Error describing the first violated invariant: node id out of
// range, self-loop, src ≥ dst, duplicate pair, or a sign outside {-1,+1}.
void check_canonical(const SignedGraph& g);

// Whitespace-separated `src dst sign` per line; lines starting with '#' and
// blank lines are skipped. Returns the raw graph (directions and duplicates
// kept), node_count = 1 + largest id seen.
SignedGraph parse_edge_list(std::istream& in);
SignedGraph load_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const SignedGraph& g);
void save_edge_list(const std::filesystem::path& path, const SignedGraph& g);

// Undirected canonical form (src < dst, sorted). All records of an unordered
// pair are merged; the merged sign is negative if any two records disagree,
// else the common sign. Self-loops are dropped.
SignedGraph resolve_reciprocal_conflicts(const SignedGraph& g);

// Induced subgraph on the largest connected component of the unsigned
// topology, nodes re-indexed densely in ascending original-id order. Ties go
// to the component holding the smallest original node id.
SignedGraph largest_connected_component(const SignedGraph& g);

// resolve_reciprocal_conflicts followed by largest_connected_component.
SignedGraph preprocess(const SignedGraph& g);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

// Edge arrangement with observed (train) edges first, then validation, then
// test: positions [0, m_train), [m_train, m_train + m_val), rest.
struct EdgeSplit {
  std::vector<std::size_t> edge_order;
  std::size_t m_train = 0;
  std::size_t m_val = 0;
  std::size_t m_test = 0;
  std::uint64_t seed = 0;

  std::size_t total() const noexcept { return m_train + m_val + m_test; }
  std::span<const std::size_t> train() const { return {edge_order.data(), m_train}; }
  std::span<const std::size_t> val() const { return {edge_order.data() + m_train, m_val}; }
  std::span<const std::size_t> test() const {
    return {edge_order.data() + m_train + m_val, m_test};
  }
};

// Uniform random permutation under `seed`; val and test receive
// floor(ratio·n) edges (at least one each) and train takes the remainder.
// Throws ConfigError for invalid ratios and Error for fewer than 3 edges.
EdgeSplit split_edges(const SignedGraph& g, SplitRatios ratios, std::uint64_t seed);

// Graph whose edges are listed in `order`.
SignedGraph reorder_edges(const SignedGraph& g, std::span<const std::size_t> order);

// Two groups [0, n) and [n, 2n). Each intra-group pair is a positive edge
// with probability p_intra, each inter-group pair a negative edge with
// probability p_inter. Edges come out grouped: group-1 intra, group-2
// intra, then inter-group.
inline constexpr double kDefaultPIntra = 0.963;
inline constexpr double kDefaultPInter = 0.19;
SignedGraph generate_two_community(std::size_t n_per_group, double p_intra = kDefaultPIntra,
                                   double p_inter = kDefaultPInter, std::uint64_t seed = 0);

// -1 ↦ 0, +1 ↦ 1. Throws DomainError on any other value.
std::vector<int> remap_labels(std::span<const int> hard);

}  // namespace signcop
