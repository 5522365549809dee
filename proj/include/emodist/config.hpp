// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emodist/embeddings.hpp"
#include "emodist/eval.hpp"
#include "emodist/model.hpp"
#include "emodist/tasks.hpp"

namespace emodist {

struct ClusterConfig {
  int kmeans_k = 6;
  std::uint64_t kmeans_seed = 11;
  int kmeans_max_iters = 100;
  double alpha = 1.0;
  std::int64_t min_emoji_count = 1000;
  // Cluster-index merge maps; a missing value drops the cluster.
  std::map<int, std::optional<std::string>> merge2;
  std::map<int, std::optional<std::string>> merge3;
};

struct TargetTaskConfig {
  std::string name;
  std::string train_path;
  std::string test_path;
  TargetSchema schema;
};

struct ModelConfig {
  int hidden = 64;
  bool init_from_embeddings = false;
};

struct ExperimentConfig {
  std::string out_dir = "out";
  std::uint64_t master_seed = 1;
  int n_seeds = 10;
  int jobs = 1;
  double dev_fraction = 0.1;

  std::map<std::string, std::string> corpora;   // lang -> raw corpus path
  std::map<std::string, std::string> lexicons;  // lang -> slur lexicon path
  std::vector<std::string> st_languages;

  EmbeddingConfig embedding;
  ClusterConfig clusters;
  std::vector<std::string> source_tasks;  // of kSourceTaskNames
  int ep_top_k = 64;
  int cap_per_class = 0;  // 0 = unlimited

  ModelConfig model;
  TrainConfig train;
  ConditionThresholds condition;
  std::vector<TargetTaskConfig> target_tasks;

  void validate() const;
};

extern const std::vector<std::string> kSourceTaskNames;

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text,
                              const std::string& origin);

// Stable fingerprint of the fields that affect results.
std::string config_hash(const ExperimentConfig& config);

}  // namespace emodist
