#include "ioforensics/removal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace iof {

StratumError::StratumError(std::string stratum, std::size_t quota, std::size_t available)
    : std::runtime_error("stratum '" + stratum + "' has " + std::to_string(available) + " nodes, quota is " +
                         std::to_string(quota)),
      stratum_(std::move(stratum)) {}

std::string stratum_of(const NodeInfo& node, StratifyBy by) {
  if (by == StratifyBy::none) return "all";
  return node.corpus ? std::string(to_string(*node.corpus)) : std::string("external");
}

std::vector<std::size_t> largest_remainder(std::size_t total, const std::vector<std::size_t>& weights) {
  std::size_t weight_sum = 0;
  for (auto w : weights) weight_sum += w;
  std::vector<std::size_t> out(weights.size(), 0);
  if (weight_sum == 0) return out;
  std::vector<std::pair<std::size_t, std::size_t>> remainders;  // (remainder, index)
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const unsigned __int128 scaled = static_cast<unsigned __int128>(total) * weights[i];
    out[i] = static_cast<std::size_t>(scaled / weight_sum);
    remainders.emplace_back(static_cast<std::size_t>(scaled % weight_sum), i);
    assigned += out[i];
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; assigned < total; ++k, ++assigned) ++out[remainders[k].second];
  return out;
}

std::vector<StratumQuota> stratum_quotas(const InteractionGraph& graph, const RemovalExperiment& experiment) {
  std::map<std::string, StratumQuota> by_name;
  for (const NodeInfo& n : graph.nodes()) {
    auto& q = by_name[stratum_of(n, experiment.stratify_by)];
    ++q.available;
  }
  for (const auto& id : experiment.target_set) {
    auto idx = graph.index_of(id);
    if (!idx) throw std::invalid_argument("target node '" + id + "' is not in the graph");
    ++by_name[stratum_of(graph.nodes()[*idx], experiment.stratify_by)].weight;
  }
  const std::size_t size = experiment.sample_size.value_or(experiment.target_set.size());
  if (size > graph.node_count())
    throw std::invalid_argument("sample size " + std::to_string(size) + " exceeds node count " +
                                std::to_string(graph.node_count()));

  std::vector<StratumQuota> quotas;
  std::vector<std::size_t> weights;
  for (auto& [name, q] : by_name) {
    q.stratum = name;
    quotas.push_back(q);
    weights.push_back(q.weight);
  }
  const auto apportioned = largest_remainder(size, weights);
  for (std::size_t i = 0; i < quotas.size(); ++i) {
    quotas[i].quota = apportioned[i];
    if (quotas[i].quota > quotas[i].available)
      throw StratumError(quotas[i].stratum, quotas[i].quota, quotas[i].available);
  }
  return quotas;
}

namespace {

// Unbiased draw from [0, bound); mt19937_64 output is fully specified by the
// standard, so samples are reproducible across standard libraries.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % bound;
  }
}

}  // namespace

std::vector<UserId> draw_stratified_sample(const InteractionGraph& graph, const std::vector<StratumQuota>& quotas,
                                           StratifyBy by, std::uint64_t seed, unsigned trial) {
  std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(trial));
  std::vector<UserId> sample;
  for (const auto& q : quotas) {
    std::vector<std::uint32_t> members;
    for (std::uint32_t i = 0; i < graph.node_count(); ++i)
      if (stratum_of(graph.nodes()[i], by) == q.stratum) members.push_back(i);
    for (std::size_t i = 0; i < q.quota; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(bounded(rng, members.size() - i));
      std::swap(members[i], members[j]);
      sample.push_back(graph.nodes()[members[i]].user_id);
    }
  }
  std::sort(sample.begin(), sample.end());
  return sample;
}

MeanMetrics mean_of(const std::vector<GraphMetrics>& trials) {
  MeanMetrics mean;
  if (trials.empty()) return mean;
  double diameter = 0.0, path = 0.0;
  bool paths = true;
  for (const auto& m : trials) {
    mean.node_count += static_cast<double>(m.node_count);
    mean.edge_count += static_cast<double>(m.edge_count);
    mean.density += m.density;
    if (m.diameter && m.avg_path_length) {
      diameter += *m.diameter;
      path += *m.avg_path_length;
    } else {
      paths = false;
    }
  }
  const double n = static_cast<double>(trials.size());
  mean.node_count /= n;
  mean.edge_count /= n;
  mean.density /= n;
  if (paths) {
    mean.diameter = diameter / n;
    mean.avg_path_length = path / n;
  }
  return mean;
}

RandomBaseline random_removal_baseline(const InteractionGraph& graph, const RemovalExperiment& experiment,
                                       const MetricsOptions& options) {
  RandomBaseline result;
  result.quotas = stratum_quotas(graph, experiment);
  for (unsigned t = 0; t < experiment.trials; ++t) {
    auto sample = draw_stratified_sample(graph, result.quotas, experiment.stratify_by, experiment.seed, t);
    const std::set<UserId> keep(sample.begin(), sample.end());
    result.trials.push_back(metrics(induced_subgraph(graph, keep), options));
    result.samples.push_back(std::move(sample));
  }
  result.mean = mean_of(result.trials);
  return result;
}

// ---------------------------------------------------------------------------

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  // Snap away representation error (e.g. -200.00000000000003) before rounding.
  const double scaled = std::nearbyint(value * scale * 1e6) / 1e6;
  return std::floor(scaled + 0.5) / scale;
}

MetricValues values_of(const GraphMetrics& m) {
  MetricValues v;
  if (m.node_count >= 2) v.density = m.density;
  if (m.diameter) v.diameter = static_cast<double>(*m.diameter);
  v.avg_path_length = m.avg_path_length;
  return v;
}

MetricValues values_of(const MeanMetrics& m) {
  return MetricValues{m.density, m.diameter, m.avg_path_length};
}

MetricValues display_values(const MetricValues& v) {
  MetricValues out;
  if (v.density) out.density = round_half_up(*v.density, 3);
  if (v.diameter) out.diameter = round_half_up(*v.diameter, 1);
  if (v.avg_path_length) out.avg_path_length = round_half_up(*v.avg_path_length, 3);
  return out;
}

namespace {

std::optional<double> percent_change(std::optional<double> before, std::optional<double> after, const char* name,
                                     std::vector<std::string>& undefined) {
  if (!before || !after || *before == 0.0) {
    undefined.emplace_back(name);
    return std::nullopt;
  }
  return (*after - *before) / *before * 100.0;
}

}  // namespace

MetricDeltas delta_report(const MetricValues& before, const MetricValues& after) {
  MetricDeltas d;
  d.density_pct = percent_change(before.density, after.density, "density", d.undefined);
  d.diameter_pct = percent_change(before.diameter, after.diameter, "diameter", d.undefined);
  d.avg_path_length_pct = percent_change(before.avg_path_length, after.avg_path_length, "avg_path_length", d.undefined);
  return d;
}

MetricDeltas delta_report(const GraphMetrics& before, const GraphMetrics& after) {
  return delta_report(values_of(before), values_of(after));
}

}  // namespace iof
