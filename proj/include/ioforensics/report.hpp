#pragma once

#include "ioforensics/graph.hpp"
#include "ioforensics/removal.hpp"
#include "ioforensics/sequel.hpp"
#include "ioforensics/taxonomy.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace iof {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kToolVersion = "1.0.0";

struct ExperimentConfig {
  std::uint64_t seed = 0;
  unsigned trials = 5;
  MetricsOptions metrics;
};

/// One subnetwork of the resilience experiment. Targeted rows carry `metrics`;
/// random rows carry per-trial metrics and their mean. A row that cannot be
/// formed (e.g. no explicit nodes) carries only `absent_reason`.
struct ExperimentRow {
  std::string name;
  std::optional<GraphMetrics> metrics;
  std::vector<GraphMetrics> trials;
  std::optional<MeanMetrics> mean;
  std::vector<StratumQuota> quotas;
  std::optional<std::uint64_t> seed;
  std::optional<MetricDeltas> delta_vs_full;  // on display-rounded values
  std::optional<std::string> absent_reason;

  MetricValues values() const;
};

struct ExperimentTable {
  std::vector<ExperimentRow> rows;  // full, implicit_only, explicit_only, random_implicit, random_explicit
  const ExperimentRow* find(std::string_view name) const;
};

/// Targeted rows come from the explicit/implicit partition; random rows average
/// seeded stratified samples of matching size and corpus composition.
ExperimentTable experiment_table(const InteractionGraph& graph, const ExplicitPartition& partition,
                                 const ExperimentConfig& config);

// JSON (de)serialization of stage results.
Json to_json(const GraphMetrics& m);
GraphMetrics metrics_from_json(const Json& j);
Json to_json(const MeanMetrics& m);
Json to_json(const MetricDeltas& d);
Json to_json(const ExperimentTable& table);
ExperimentTable experiment_table_from_json(const Json& j);
Json to_json(const AccountLabel& l);
AccountLabel label_from_json(const Json& j);
Json to_json(const SequelCandidate& c);
SequelCandidate sequel_from_json(const Json& j);

/// Ratios to 3 decimals, percentages to 1 decimal.
std::string format_ratio(double v);
std::string format_percent(double v);

/// Human-readable tables rendered from the JSON report.
std::string render_text_report(const Json& report);

}  // namespace iof
