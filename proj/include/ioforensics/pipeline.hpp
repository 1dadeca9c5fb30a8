#pragma once

#include "ioforensics/archive.hpp"
#include "ioforensics/graph.hpp"
#include "ioforensics/interactions.hpp"
#include "ioforensics/report.hpp"
#include "ioforensics/sequel.hpp"
#include "ioforensics/taxonomy.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace iof {

/// Invalid or incomplete configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage failed (CLI exit code 3). Artifacts written so far are kept.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error("stage '" + stage + "' failed: " + message), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct NamedWindow {
  std::string name;
  TimeWindow window;
};

struct PipelineConfig {
  std::map<Corpus, std::vector<std::filesystem::path>> corpora;
  std::optional<std::filesystem::path> suspensions;
  std::filesystem::path rules;
  std::optional<CollectionFilter> live_filter;
  SequelThresholds thresholds;
  std::optional<std::uint64_t> seed;
  unsigned trials = 5;
  std::vector<NamedWindow> windows;
  std::optional<std::filesystem::path> classifier_metrics;
  std::optional<std::filesystem::path> classifier_predictions;
  std::filesystem::path output_dir;
  double max_reject_ratio = 0.01;
  unsigned threads = 0;

  /// Throws ConfigError when a referenced input is missing or the seed is unset.
  void validate() const;
};

/// Reads the JSON config; relative paths resolve against the config's directory.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir);

struct CorpusSummary {
  std::size_t files = 0;
  std::size_t rows = 0;
  std::size_t users = 0;
  std::size_t tweets = 0;
  std::size_t rejections = 0;
  std::size_t conflicts = 0;
  std::size_t retweets = 0;
  std::size_t follow_trains = 0;
  std::size_t filtered_out = 0;  // users removed by the collection filter
};

struct IngestedData {
  std::map<Corpus, std::vector<UserRecord>> users;
  std::map<Corpus, std::vector<TweetRecord>> tweets;
  std::map<Corpus, CorpusSummary> summary;
  std::vector<Rejection> rejections;
  std::string digest;  // over input file contents and ingest settings

  std::vector<UserRecord> graph_users() const;  // takedown + live
  std::vector<TweetRecord> graph_tweets() const;
};

IngestedData run_ingest(const PipelineConfig& config);

struct PipelineResult {
  Json report;
  std::filesystem::path report_path;
  std::vector<std::string> stages_run;
  std::vector<std::string> stages_cached;
};

/// ingest → graph → taxonomy → sequels → experiments → report. Deterministic
/// given the config; cached stages are reused when their inputs are unchanged.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Writes the classifier input corpus (JSON-lines, one account per line).
std::size_t export_classifier_corpus(const IngestedData& data, const std::filesystem::path& out_path);

/// Copy of `report` without wall-clock fields, for byte comparisons.
Json strip_volatile(Json report);

}  // namespace iof
