#include "ioforensics/graph.hpp"

#include "ioforensics/parallel.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <random>
#include <stdexcept>

namespace iof {

void EdgeCounts::add(InteractionKind kind, std::uint64_t n) {
  switch (kind) {
    case InteractionKind::mention: mention += n; break;
    case InteractionKind::retweet: retweet += n; break;
    case InteractionKind::reply: reply += n; break;
    case InteractionKind::quote: quote += n; break;
  }
}

InteractionGraph::InteractionGraph(std::vector<NodeInfo> nodes, std::vector<Edge> edges, BuildStats stats)
    : nodes_(std::move(nodes)), edges_(std::move(edges)), stats_(stats) {
  index_.reserve(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i && !(nodes_[i - 1].user_id < nodes_[i].user_id))
      throw std::invalid_argument("graph nodes must be sorted and unique");
    index_.emplace(nodes_[i].user_id, static_cast<std::uint32_t>(i));
  }
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    const Edge& e = edges_[i];
    if (e.source >= nodes_.size() || e.target >= nodes_.size()) throw std::invalid_argument("edge out of range");
    if (e.source == e.target) throw std::invalid_argument("self-loop in graph");
    if (e.counts.weight() == 0) throw std::invalid_argument("edge with zero weight");
    if (i && !(std::pair(edges_[i - 1].source, edges_[i - 1].target) < std::pair(e.source, e.target)))
      throw std::invalid_argument("graph edges must be sorted and unique");
  }
}

std::optional<std::uint32_t> InteractionGraph::index_of(const UserId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const EdgeCounts* InteractionGraph::edge(const UserId& source, const UserId& target) const {
  auto s = index_of(source);
  auto t = index_of(target);
  if (!s || !t) return nullptr;
  auto it = std::lower_bound(edges_.begin(), edges_.end(), std::pair(*s, *t),
                             [](const Edge& e, const std::pair<std::uint32_t, std::uint32_t>& key) {
                               return std::pair(e.source, e.target) < key;
                             });
  if (it == edges_.end() || it->source != *s || it->target != *t) return nullptr;
  return &it->counts;
}

std::vector<UserId> InteractionGraph::node_ids() const {
  std::vector<UserId> ids;
  ids.reserve(nodes_.size());
  for (const auto& n : nodes_) ids.push_back(n.user_id);
  return ids;
}

InteractionGraph InteractionGraph::with_explicit_flags(const std::set<UserId>& explicit_ids) const {
  std::vector<NodeInfo> nodes = nodes_;
  for (auto& n : nodes) n.explicit_node = explicit_ids.count(n.user_id) > 0;
  return InteractionGraph(std::move(nodes), edges_, stats_);
}

// ---------------------------------------------------------------------------

std::size_t GraphBuilder::PairHash::operator()(const std::pair<UserId, UserId>& p) const {
  const std::size_t a = std::hash<UserId>{}(p.first);
  const std::size_t b = std::hash<UserId>{}(p.second);
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

GraphBuilder::GraphBuilder(const UserDirectory& directory, BuildOptions options)
    : directory_(directory), options_(std::move(options)) {}

void GraphBuilder::add(const InteractionEvent& event) {
  ++stats_.events_seen;
  if (options_.window && !options_.window->contains(event.timestamp)) {
    ++stats_.outside_window;
    return;
  }
  auto in_scope = [&](const UserId& id) -> std::optional<bool> {
    const UserRecord* u = directory_.find(id);
    if (!u) return std::nullopt;
    return options_.scope.count(u->corpus) > 0;
  };
  const auto src = in_scope(event.source);
  const auto dst = in_scope(event.target);
  if ((!src || !dst) && !options_.include_external) {
    ++stats_.external_dropped;
    return;
  }
  if ((src && !*src) || (dst && !*dst)) {
    ++stats_.outside_scope;
    return;
  }
  if (event.source == event.target) {
    ++stats_.self_loops_dropped;
    return;
  }
  ++stats_.events_retained;
  edges_[{event.source, event.target}].add(event.kind);
}

InteractionGraph GraphBuilder::finish() {
  std::vector<UserId> ids;
  ids.reserve(edges_.size() * 2);
  for (const auto& [key, counts] : edges_) {
    ids.push_back(key.first);
    ids.push_back(key.second);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<NodeInfo> nodes;
  nodes.reserve(ids.size());
  std::unordered_map<UserId, std::uint32_t> index;
  index.reserve(ids.size());
  for (auto& id : ids) {
    NodeInfo n;
    n.user_id = id;
    if (const UserRecord* u = directory_.find(id)) {
      n.corpus = u->corpus;
      n.suspension = u->suspension_status;
    }
    index.emplace(id, static_cast<std::uint32_t>(nodes.size()));
    nodes.push_back(std::move(n));
  }
  std::vector<Edge> edges;
  edges.reserve(edges_.size());
  for (const auto& [key, counts] : edges_) edges.push_back({index.at(key.first), index.at(key.second), counts});
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.source, a.target) < std::pair(b.source, b.target); });
  edges_.clear();
  return InteractionGraph(std::move(nodes), std::move(edges), stats_);
}

InteractionGraph build_graph(std::span<const InteractionEvent> events, const UserDirectory& directory,
                             const BuildOptions& options) {
  GraphBuilder builder(directory, options);
  for (const auto& e : events) builder.add(e);
  return builder.finish();
}

// ---------------------------------------------------------------------------

double directed_density(std::size_t node_count, std::size_t edge_count) {
  if (node_count < 2) return 0.0;
  const double n = static_cast<double>(node_count);
  return static_cast<double>(edge_count) / (n * (n - 1.0));
}

std::vector<std::vector<std::uint32_t>> undirected_adjacency(const InteractionGraph& graph) {
  std::vector<std::vector<std::uint32_t>> adj(graph.node_count());
  for (const Edge& e : graph.edges()) {
    adj[e.source].push_back(e.target);
    adj[e.target].push_back(e.source);
  }
  for (auto& list : adj) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return adj;
}

std::vector<std::uint32_t> largest_component(const std::vector<std::vector<std::uint32_t>>& adjacency) {
  const std::size_t n = adjacency.size();
  std::vector<std::int32_t> comp(n, -1);
  std::vector<std::uint32_t> best;
  std::vector<std::uint32_t> members;
  std::vector<std::uint32_t> stack;
  std::int32_t next_id = 0;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    members.clear();
    stack.assign(1, s);
    comp[s] = next_id;
    while (!stack.empty()) {
      const std::uint32_t v = stack.back();
      stack.pop_back();
      members.push_back(v);
      for (std::uint32_t w : adjacency[v]) {
        if (comp[w] < 0) {
          comp[w] = next_id;
          stack.push_back(w);
        }
      }
    }
    ++next_id;
    // Components are discovered in order of their smallest index, so strict >
    // keeps the earliest one on ties.
    if (members.size() > best.size()) best = members;
  }
  std::sort(best.begin(), best.end());
  return best;
}

namespace {

struct PathTotals {
  std::uint64_t distance_sum = 0;  // over ordered (source, target) pairs
  std::uint64_t pair_count = 0;
  std::uint32_t max_distance = 0;
};

// Compressed adjacency restricted to one component, relabelled 0..c-1.
struct Csr {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> targets;
};

Csr component_csr(const std::vector<std::vector<std::uint32_t>>& adjacency,
                  const std::vector<std::uint32_t>& members) {
  std::vector<std::uint32_t> local(adjacency.size(), UINT32_MAX);
  for (std::uint32_t i = 0; i < members.size(); ++i) local[members[i]] = i;
  Csr csr;
  csr.offsets.reserve(members.size() + 1);
  csr.offsets.push_back(0);
  for (std::uint32_t v : members) {
    for (std::uint32_t w : adjacency[v]) csr.targets.push_back(local[w]);
    csr.offsets.push_back(static_cast<std::uint32_t>(csr.targets.size()));
  }
  return csr;
}

// Level-synchronous BFS from up to 64 sources at once; bit k of a node's word
// tracks source k. One pass over the edges per BFS level.
PathTotals bfs_batch(const Csr& csr, std::span<const std::uint32_t> sources, std::vector<std::uint64_t>& visited,
                     std::vector<std::uint64_t>& frontier, std::vector<std::uint64_t>& next) {
  const std::size_t c = csr.offsets.size() - 1;
  std::fill(visited.begin(), visited.end(), 0);
  std::fill(frontier.begin(), frontier.end(), 0);
  for (std::size_t k = 0; k < sources.size(); ++k) {
    visited[sources[k]] |= std::uint64_t{1} << k;
    frontier[sources[k]] |= std::uint64_t{1} << k;
  }
  PathTotals totals;
  for (std::uint32_t level = 1;; ++level) {
    std::uint64_t reached = 0;
    for (std::size_t v = 0; v < c; ++v) {
      std::uint64_t acc = 0;
      for (std::uint32_t e = csr.offsets[v]; e < csr.offsets[v + 1]; ++e) acc |= frontier[csr.targets[e]];
      acc &= ~visited[v];
      next[v] = acc;
      reached += static_cast<std::uint64_t>(std::popcount(acc));
    }
    if (reached == 0) break;
    totals.distance_sum += reached * level;
    totals.pair_count += reached;
    totals.max_distance = level;
    for (std::size_t v = 0; v < c; ++v) visited[v] |= next[v];
    frontier.swap(next);
  }
  return totals;
}

PathTotals all_source_paths(const Csr& csr, std::span<const std::uint32_t> sources, unsigned threads) {
  const std::size_t c = csr.offsets.size() - 1;
  const std::size_t batches = (sources.size() + 63) / 64;
  threads = resolve_threads(threads);
  struct Scratch {
    std::vector<std::uint64_t> visited, frontier, next;
    PathTotals totals;
  };
  std::vector<Scratch> scratch(std::min<std::size_t>(threads, std::max<std::size_t>(batches, 1)));
  for (auto& s : scratch) {
    s.visited.resize(c);
    s.frontier.resize(c);
    s.next.resize(c);
  }
  parallel_for(batches, static_cast<unsigned>(scratch.size()), [&](unsigned worker, std::size_t b) {
    Scratch& s = scratch[worker];
    const std::size_t begin = b * 64;
    const std::size_t len = std::min<std::size_t>(64, sources.size() - begin);
    const PathTotals t = bfs_batch(csr, sources.subspan(begin, len), s.visited, s.frontier, s.next);
    s.totals.distance_sum += t.distance_sum;
    s.totals.pair_count += t.pair_count;
    s.totals.max_distance = std::max(s.totals.max_distance, t.max_distance);
  });
  // Integer totals: the reduction is order-independent.
  PathTotals total;
  for (const auto& s : scratch) {
    total.distance_sum += s.totals.distance_sum;
    total.pair_count += s.totals.pair_count;
    total.max_distance = std::max(total.max_distance, s.totals.max_distance);
  }
  return total;
}

}  // namespace

GraphMetrics metrics(const InteractionGraph& graph, const MetricsOptions& options) {
  GraphMetrics m;
  m.node_count = graph.node_count();
  m.edge_count = graph.edge_count();
  m.density = directed_density(m.node_count, m.edge_count);
  if (m.node_count < 2) {
    m.component_size = m.node_count;
    return m;
  }

  const auto adjacency = undirected_adjacency(graph);
  const auto members = largest_component(adjacency);
  m.component_size = members.size();
  if (members.size() < 2) return m;

  const Csr csr = component_csr(adjacency, members);
  std::vector<std::uint32_t> sources(members.size());
  std::iota(sources.begin(), sources.end(), 0u);
  if (options.sample_sources && *options.sample_sources < sources.size()) {
    std::mt19937_64 rng(options.sample_seed);
    std::shuffle(sources.begin(), sources.end(), rng);
    sources.resize(std::max<std::size_t>(*options.sample_sources, 1));
    std::sort(sources.begin(), sources.end());
    m.estimated = true;
  }
  const PathTotals totals = all_source_paths(csr, sources, options.threads);
  m.diameter = totals.max_distance;
  m.avg_path_length = static_cast<double>(totals.distance_sum) / static_cast<double>(totals.pair_count);
  return m;
}

// ---------------------------------------------------------------------------

namespace {

InteractionGraph filter_nodes(const InteractionGraph& graph, const std::function<bool(const UserId&)>& keep) {
  std::vector<std::uint32_t> remap(graph.node_count(), UINT32_MAX);
  std::vector<NodeInfo> nodes;
  for (std::uint32_t i = 0; i < graph.node_count(); ++i) {
    const NodeInfo& n = graph.nodes()[i];
    if (!keep(n.user_id)) continue;
    remap[i] = static_cast<std::uint32_t>(nodes.size());
    nodes.push_back(n);
  }
  std::vector<Edge> edges;
  for (const Edge& e : graph.edges()) {
    if (remap[e.source] == UINT32_MAX || remap[e.target] == UINT32_MAX) continue;
    edges.push_back({remap[e.source], remap[e.target], e.counts});
  }
  return InteractionGraph(std::move(nodes), std::move(edges), graph.build_stats());
}

}  // namespace

InteractionGraph remove_nodes(const InteractionGraph& graph, const std::set<UserId>& victims) {
  return filter_nodes(graph, [&](const UserId& id) { return victims.count(id) == 0; });
}

InteractionGraph induced_subgraph(const InteractionGraph& graph, const std::set<UserId>& keep) {
  return filter_nodes(graph, [&](const UserId& id) { return keep.count(id) > 0; });
}

}  // namespace iof
