// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "emodist/model.hpp"
#include "emodist/tasks.hpp"

namespace emodist {

// Per-class F1 with the documented zero conventions: F1 = 0 when TP = 0 and
// FP+FN > 0, and F1 = 0 for labels absent from both gold and pred. Every
// label of Y enters the unweighted mean.
std::map<std::string, double> per_class_f1(
    const std::vector<std::string>& gold,
    const std::vector<std::string>& pred,
    const std::vector<std::string>& labels);
double macro_f1(const std::vector<std::string>& gold,
                const std::vector<std::string>& pred,
                const std::vector<std::string>& labels);

struct RunResult {
  std::string st_name;  // "baseline" for direct TT training
  std::string tt_name;
  std::uint64_t seed = 0;  // per-run seed derived from the master seed
  int seed_index = 0;
  double macro_f1 = 0.0;
  std::map<std::string, double> per_class_f1;
  int epochs_trained = 0;
  int best_epoch = 0;
};

struct TaskBundle {
  TaskDataset train;
  TaskDataset dev;
  TaskDataset test;
};

struct RunOptions {
  TrainConfig train;  // per-run seeds are derived, the seed field is unused
  ModelDims dims;
  int n_seeds = 10;
  std::uint64_t master_seed = 1;
  int jobs = 1;
  // Optional warm start: copy pre-trained token vectors into each encoder
  // after its seeded random init. Must outlive the call. The vocab should
  // then come from this table so rows line up.
  const EmbeddingTable* init_table = nullptr;
};

// Runs n_seeds independent runs: train the ST and transfer to the TT, or
// train the TT directly when st is null (the baseline). Within one seed the
// baseline and every transfer leg share the same encoder initialization, so
// legs differ only in what the encoder was trained on beforehand. Results
// are ordered by seed index regardless of `jobs`.
std::vector<RunResult> run_experiment(const TaskBundle* st,
                                      const TaskBundle& tt,
                                      const ModelVocab& vocab,
                                      const RunOptions& options,
                                      const std::string& st_name,
                                      const std::string& tt_name);

struct AggregateCell {
  std::string st_name;
  std::string tt_name;
  int n_seeds = 0;
  double mean = 0.0;
  double se = 0.0;  // sample (n−1) standard deviation / √n
  double baseline_mean = 0.0;
  double baseline_se = 0.0;
  double delta = 0.0;      // mean − baseline_mean
  bool equivalent = true;  // |delta| ≤ se + baseline_se
  std::vector<double> scores;
};

AggregateCell aggregate(const std::vector<RunResult>& results,
                        const std::vector<RunResult>& baseline);

struct ConditionThresholds {
  double emoji_high = 0.05;   // emoji_content ≥ 5% counts as high
  double balanced_min = 0.4;  // minority_fraction ≥ 0.4 counts as balanced
};

struct ConditionInfo {
  double emoji_content = 0.0;
  std::string emoji_bucket;  // "low" | "high"
  double minority_fraction = 0.0;
  std::string balance_bucket;  // "balanced" | "unbalanced"
  std::vector<std::string> st_languages;
};

ConditionInfo condition_info(const DatasetStats& tt_stats,
                             const ConditionThresholds& thresholds,
                             const std::vector<std::string>& st_languages);

struct ExperimentReport {
  struct TtBlock {
    std::string tt_name;
    ConditionInfo condition;
    AggregateCell baseline;
    std::vector<AggregateCell> cells;  // one per ST, config order
    std::vector<RunResult> runs;       // baseline + ST runs, seed order
  };
  std::vector<TtBlock> blocks;
  std::map<std::string, std::string> provenance;

  std::string to_json() const;  // deterministic: sorted keys, no timestamps
  std::string to_tsv() const;   // one row per st×tt×seed
  std::string to_text() const;  // per-TT table of ST mean ± se
};

// Writes report.json, report.tsv and report.txt under `dir`.
void save_report(const ExperimentReport& report, const std::string& dir);

}  // namespace emodist
