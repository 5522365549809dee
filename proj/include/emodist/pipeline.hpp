// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <iosfwd>
#include <string>

#include "emodist/config.hpp"

namespace emodist {

// Artifact locations under config.out_dir.
std::string store_path(const ExperimentConfig& config, const std::string& lang);
std::string st_store_path(const ExperimentConfig& config);
std::string embeddings_path(const ExperimentConfig& config);
std::string spec_path(const ExperimentConfig& config, const std::string& name);
std::string st_dataset_path(const ExperimentConfig& config,
                            const std::string& name);

// Each command validates the whole config before touching the filesystem
// and reads earlier stages' artifacts rather than recomputing them.

// Preprocesses every raw corpus into a comment store, writes the combined
// source store and a per-language row-error listing. Returns the number of
// rows that failed to parse (partial failure when > 0).
int cmd_preprocess(const ExperimentConfig& config);

// Trains token embeddings on the combined source store.
void cmd_embed(const ExperimentConfig& config);

// Builds every cluster spec the selected source tasks need, plus a
// human-readable k-means summary.
void cmd_cluster(const ExperimentConfig& config);

// Emits the selected source-task datasets.
void cmd_build_st(const ExperimentConfig& config);

// Runs the full transfer experiment and writes report.{json,tsv,txt}.
void cmd_run(const ExperimentConfig& config);

// Prints the text rendering of an existing report to `out`.
void cmd_report(const ExperimentConfig& config, std::ostream& out);

}  // namespace emodist
