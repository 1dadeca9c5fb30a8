#pragma once

#include "ioforensics/graph.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace iof {

enum class StratifyBy { corpus, none };

/// Random baseline for a targeted subnetwork. Each trial draws a node sample
/// with the size and per-stratum composition of `target_set` and measures the
/// subnetwork induced by the sample.
struct RemovalExperiment {
  std::set<UserId> target_set;
  unsigned trials = 5;
  std::uint64_t seed = 0;
  StratifyBy stratify_by = StratifyBy::corpus;
  /// Draw this many nodes instead of |target_set|; strata quotas are then
  /// apportioned from target_set's composition by largest remainder.
  std::optional<std::size_t> sample_size;
};

struct StratumQuota {
  std::string stratum;
  std::size_t weight = 0;     // members of target_set in this stratum
  std::size_t available = 0;  // graph nodes in this stratum
  std::size_t quota = 0;

  bool operator==(const StratumQuota&) const = default;
};

class StratumError : public std::runtime_error {
 public:
  StratumError(std::string stratum, std::size_t quota, std::size_t available);
  const std::string& stratum() const { return stratum_; }

 private:
  std::string stratum_;
};

/// Mean of each metric over trials. Path metrics are absent if any trial lacks them.
struct MeanMetrics {
  double node_count = 0.0;
  double edge_count = 0.0;
  double density = 0.0;
  std::optional<double> diameter;
  std::optional<double> avg_path_length;
};

struct RandomBaseline {
  std::vector<StratumQuota> quotas;
  std::vector<std::vector<UserId>> samples;  // per trial, sorted
  std::vector<GraphMetrics> trials;
  MeanMetrics mean;
};

std::string stratum_of(const NodeInfo& node, StratifyBy by);

/// Largest-remainder apportionment of `total` over `weights`; ties go to the
/// earlier entry.
std::vector<std::size_t> largest_remainder(std::size_t total, const std::vector<std::size_t>& weights);

/// Quotas per stratum (sorted by stratum name). Throws std::invalid_argument if
/// target_set names a node missing from the graph and StratumError when a
/// stratum has fewer nodes than its quota.
std::vector<StratumQuota> stratum_quotas(const InteractionGraph& graph, const RemovalExperiment& experiment);

/// Sample for one trial, drawn with the generator seeded by seed ^ trial.
std::vector<UserId> draw_stratified_sample(const InteractionGraph& graph, const std::vector<StratumQuota>& quotas,
                                           StratifyBy by, std::uint64_t seed, unsigned trial);

RandomBaseline random_removal_baseline(const InteractionGraph& graph, const RemovalExperiment& experiment,
                                       const MetricsOptions& options = {});

MeanMetrics mean_of(const std::vector<GraphMetrics>& trials);

// ---------------------------------------------------------------------------

/// Values a delta is computed from; built from exact or display-rounded metrics.
struct MetricValues {
  std::optional<double> density;
  std::optional<double> diameter;
  std::optional<double> avg_path_length;
};

MetricValues values_of(const GraphMetrics& m);
MetricValues values_of(const MeanMetrics& m);
/// Density and path length to 3 decimals, diameter to 1 decimal: the
/// precision the statistics table is printed at.
MetricValues display_values(const MetricValues& v);

/// Percent change per metric. A delta is absent (and named in `undefined`) when
/// either side lacks the metric or the baseline is zero.
struct MetricDeltas {
  std::optional<double> density_pct;
  std::optional<double> diameter_pct;
  std::optional<double> avg_path_length_pct;
  std::vector<std::string> undefined;
};

MetricDeltas delta_report(const MetricValues& before, const MetricValues& after);
MetricDeltas delta_report(const GraphMetrics& before, const GraphMetrics& after);

/// Round half up (toward +infinity at exact halves) to `decimals` places,
/// tolerant of binary representation error at the half point.
double round_half_up(double value, int decimals);

}  // namespace iof
