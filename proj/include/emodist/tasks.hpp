// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "emodist/clusters.hpp"
#include "emodist/corpus.hpp"

namespace emodist {

struct Instance {
  std::vector<std::string> tokens;
  std::string label;
  bool had_emoji = false;  // measured before any emoji stripping
  std::string origin_id;   // generating comment or input row
};

enum class DatasetKind { source, target };
enum class Split { train, dev, test };
std::string kind_name(DatasetKind k);
std::string split_name(Split s);

struct TaskDataset {
  std::string name;
  DatasetKind kind = DatasetKind::source;
  Split split = Split::train;
  std::vector<std::string> labels;  // ordered label set Y
  std::vector<Instance> instances;

  // Non-empty, label closure, and emoji-free tokens for source tasks.
  void validate() const;
};

struct DatasetStats {
  std::map<std::string, std::int64_t> label_counts;  // every label of Y
  double minority_fraction = 0.0;  // least-frequent present label share
  double emoji_content = 0.0;      // fraction of instances with ≥1 emoji
};

// One instance per distinct inventory emoji a comment contains, with the
// comment's emoji-stripped tokens. Per-class counts capped by deterministic
// seeded subsampling after a stable sort by comment id.
TaskDataset emit_ep_dataset(const std::vector<Comment>& corpus,
                            const EmojiInventory& inventory,
                            std::int64_t cap_per_class, std::uint64_t seed,
                            const std::string& name = "ep");

// One instance per comment whose mapped emojis agree on a single class;
// conflicting comments are skipped, unmapped emojis ignored.
TaskDataset emit_cluster_dataset(const std::vector<Comment>& corpus,
                                 const ClusterSpec& spec,
                                 std::int64_t cap_per_class,
                                 std::uint64_t seed,
                                 const std::string& name = "");

// Column addressing and label normalization for a target-task file.
// Columns are named when the file has a header, otherwise 0-based indices
// written as decimal strings.
struct TargetSchema {
  std::string text_column;
  std::string label_column;
  bool has_header = true;
  char separator = '\t';  // '\t' or ','
  std::map<std::string, std::string> label_map;  // raw → normalized
  std::vector<std::string> labels;  // normalized Y order; derived if empty

  void validate() const;
};

// Loads and preprocesses one target-task split. Tokens go through the
// corpus pipeline but keep their emojis (transfer targets are real
// comments). Unknown raw labels raise DataError naming the row.
TaskDataset load_target_task(const std::string& path,
                             const TargetSchema& schema,
                             const std::string& name, Split split);

DatasetStats dataset_stats(const TaskDataset& ds);

// Stratified, deterministic dev split. Throws DataError when any label has
// fewer than 2 instances.
std::pair<TaskDataset, TaskDataset> split_train_dev(const TaskDataset& ds,
                                                    double dev_fraction,
                                                    std::uint64_t seed);

// TSV persistence ("label<TAB>space-joined tokens") plus a JSON manifest at
// path + ".manifest.json" with name, kind, split, labels, stats, provenance
// and a content hash.
void save_dataset(const TaskDataset& ds, const std::string& path,
                  const std::map<std::string, std::string>& provenance = {});
TaskDataset load_dataset(const std::string& path);

}  // namespace emodist
