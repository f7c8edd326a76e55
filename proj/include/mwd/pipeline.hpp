#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "mwd/classify.hpp"
#include "mwd/cv.hpp"
#include "mwd/features.hpp"
#include "mwd/select.hpp"
#include "mwd/signal.hpp"

namespace mwd {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kReportSchema = "mwd-report/1";

struct SearchConfig {
  bool enabled{false};
  int n_candidates{100};
  int n_folds{5};
};

struct SelectionConfig {
  RankMethod channel_method{RankMethod::PValue};
  double alpha{0.05};
  std::size_t k_max{0};  // 0 = all channels
  std::vector<SelectMethod> methods{SelectMethod::Rfe, SelectMethod::Ife, SelectMethod::Cife};
  std::vector<std::size_t> ks{15, 40};
  double rho_thres{0.9};
  std::size_t rfe_step{0};  // 0 = 10% of remaining
  std::optional<std::vector<std::string>> channels;  // restrict the feature-selection matrix
};

struct BenchConfig {
  int repeats{5};
  std::vector<std::size_t> channel_counts{2, 8};
  std::vector<int> tree_counts{350, 700};
};

// Precedence: command-line flags > config file > these defaults.
struct PipelineConfig {
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> features_file;
  SynthSpec synth{};
  FeatureConfig features{.include_mse = false};
  std::optional<std::vector<std::string>> channels;
  ClassifierSpec classifier{};
  SearchConfig search{};
  SelectionConfig selection{};
  BenchConfig bench{};
  std::uint64_t seed{0};
  unsigned threads{1};
  std::filesystem::path out{"out"};
};

// Unknown keys are rejected so that typos do not silently fall back to defaults.
PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const PipelineConfig& c);
PipelineConfig load_config(const std::filesystem::path& path);

struct Timing {
  double median_s{0.0};
  double min_s{0.0};
  double max_s{0.0};
  int runs{0};
};

// Median wall time over `repeats` runs on a monotonic clock after one
// discarded warm-up run.
Timing time_median(const std::function<void()>& fn, int repeats);

// Dataset from the manifest, or a synthetic one when no manifest is configured.
SubjectDataset obtain_dataset(const PipelineConfig& c);
// Feature matrix from features_file, or extracted from obtain_dataset().
FeatureMatrix obtain_features(const PipelineConfig& c, nlohmann::json* timing = nullptr);

nlohmann::json eval_to_json(const EvalResult& r);
nlohmann::json selection_to_json(const FeatureSelection& s);

// Each command writes its artifacts under c.out and returns the report.
nlohmann::json cmd_synth(const PipelineConfig& c);
nlohmann::json cmd_extract(const PipelineConfig& c);
nlohmann::json cmd_train(const PipelineConfig& c);
nlohmann::json cmd_evaluate(const PipelineConfig& c);
nlohmann::json cmd_select_channels(const PipelineConfig& c);
nlohmann::json cmd_select_features(const PipelineConfig& c);
nlohmann::json cmd_bench(const PipelineConfig& c);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace mwd
