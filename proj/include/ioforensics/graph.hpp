#pragma once

#include "ioforensics/archive.hpp"
#include "ioforensics/interactions.hpp"
#include "ioforensics/records.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace iof {

struct EdgeCounts {
  std::uint64_t mention = 0;
  std::uint64_t retweet = 0;
  std::uint64_t reply = 0;
  std::uint64_t quote = 0;

  std::uint64_t weight() const { return mention + retweet + reply + quote; }
  void add(InteractionKind kind, std::uint64_t n = 1);
  bool operator==(const EdgeCounts&) const = default;
};

struct NodeInfo {
  UserId user_id;
  std::optional<Corpus> corpus;  // absent for retained external accounts
  SuspensionStatus suspension = SuspensionStatus::unknown;
  std::optional<bool> explicit_node;  // set once the taxonomy has run

  bool operator==(const NodeInfo&) const = default;
};

struct Edge {
  std::uint32_t source = 0;
  std::uint32_t target = 0;
  EdgeCounts counts;

  bool operator==(const Edge&) const = default;
};

struct TimeWindow {
  Timestamp start{};  // inclusive
  Timestamp end{};    // exclusive
  bool contains(Timestamp t) const { return t >= start && t < end; }
};

struct BuildOptions {
  std::set<Corpus> scope{Corpus::takedown, Corpus::live};
  std::optional<TimeWindow> window;
  bool include_external = false;
};

struct BuildStats {
  std::uint64_t events_seen = 0;
  std::uint64_t events_retained = 0;
  std::uint64_t self_loops_dropped = 0;
  std::uint64_t outside_window = 0;
  std::uint64_t outside_scope = 0;
  std::uint64_t external_dropped = 0;
};

/// Directed interaction graph. Nodes are sorted by user_id; edges are distinct
/// (source, target) pairs sorted lexicographically, each carrying per-kind
/// counts. Never contains self-loops.
class InteractionGraph {
 public:
  InteractionGraph() = default;

  /// Takes ownership of already-validated parts. Nodes must be sorted by
  /// user_id without duplicates; edges sorted, in range, no self-loops, weight ≥ 1.
  InteractionGraph(std::vector<NodeInfo> nodes, std::vector<Edge> edges, BuildStats stats = {});

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::span<const NodeInfo> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  const BuildStats& build_stats() const { return stats_; }

  std::optional<std::uint32_t> index_of(const UserId& id) const;
  bool contains(const UserId& id) const { return index_of(id).has_value(); }
  const EdgeCounts* edge(const UserId& source, const UserId& target) const;
  std::vector<UserId> node_ids() const;

  /// Copy with the explicit flag set on every node (true iff in `explicit_ids`).
  InteractionGraph with_explicit_flags(const std::set<UserId>& explicit_ids) const;

  bool operator==(const InteractionGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
  }

 private:
  std::vector<NodeInfo> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<UserId, std::uint32_t> index_;
  BuildStats stats_;
};

/// Incremental builder for streamed events.
class GraphBuilder {
 public:
  GraphBuilder(const UserDirectory& directory, BuildOptions options);
  void add(const InteractionEvent& event);
  InteractionGraph finish();

 private:
  struct PairHash {
    std::size_t operator()(const std::pair<UserId, UserId>& p) const;
  };
  const UserDirectory& directory_;
  BuildOptions options_;
  BuildStats stats_;
  std::unordered_map<std::pair<UserId, UserId>, EdgeCounts, PairHash> edges_;
};

/// Keeps events whose endpoints are both in scope (and known, unless external
/// accounts are included) and whose timestamp lies in the window.
InteractionGraph build_graph(std::span<const InteractionEvent> events, const UserDirectory& directory,
                             const BuildOptions& options = {});

// ---------------------------------------------------------------------------
// Metrics

struct GraphMetrics {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  double density = 0.0;
  std::optional<std::uint32_t> diameter;
  std::optional<double> avg_path_length;
  /// Nodes in the largest weakly connected component the path metrics cover.
  std::size_t component_size = 0;
  bool estimated = false;  // path metrics from sampled sources

  bool operator==(const GraphMetrics&) const = default;
};

struct MetricsOptions {
  unsigned threads = 0;  // 0: hardware concurrency
  /// BFS from this many random sources instead of all of them. Diameter then
  /// becomes a lower bound. Intended for graphs with millions of nodes.
  std::optional<std::size_t> sample_sources;
  std::uint64_t sample_seed = 0;
};

/// edge_count / (n (n - 1)) on the directed simple graph.
double directed_density(std::size_t node_count, std::size_t edge_count);

/// Density on the directed graph; diameter and mean shortest-path length over
/// all unordered pairs of the largest weakly connected component, on the
/// undirected projection. Path metrics are absent when that component has
/// fewer than 2 nodes.
GraphMetrics metrics(const InteractionGraph& graph, const MetricsOptions& options = {});

/// Undirected projection as adjacency lists (deduplicated, sorted).
std::vector<std::vector<std::uint32_t>> undirected_adjacency(const InteractionGraph& graph);

/// Node indices of the largest weakly connected component, ascending. Ties go
/// to the component holding the smallest node index.
std::vector<std::uint32_t> largest_component(const std::vector<std::vector<std::uint32_t>>& adjacency);

// ---------------------------------------------------------------------------
// Subgraphs

/// Graph without `victims` and every edge touching them. Unknown ids are ignored.
InteractionGraph remove_nodes(const InteractionGraph& graph, const std::set<UserId>& victims);
/// Graph induced by `keep`.
InteractionGraph induced_subgraph(const InteractionGraph& graph, const std::set<UserId>& keep);

// ---------------------------------------------------------------------------
// Export

void write_graphml(std::ostream& out, const InteractionGraph& graph);
/// source,target,mention,retweet,reply,quote,weight
void write_edge_list(std::ostream& out, const InteractionGraph& graph);

}  // namespace iof
