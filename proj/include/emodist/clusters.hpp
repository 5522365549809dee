// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emodist/corpus.hpp"
#include "emodist/frequency.hpp"
#include "emodist/kmeans.hpp"
#include "emodist/pmi.hpp"

namespace emodist {

struct TaskDataset;  // tasks.hpp

// The k most frequent emojis, ordered by count descending then codepoint
// sequence ascending (bytewise UTF-8 comparison preserves codepoint order).
struct EmojiInventory {
  std::vector<std::pair<std::string, std::int64_t>> emojis;
  int requested_k = 0;
  bool truncated = false;  // fewer distinct emojis than requested

  int size() const { return static_cast<int>(emojis.size()); }
  bool contains(const std::string& emoji) const {
    for (const auto& [e, n] : emojis)
      if (e == emoji) return true;
    return false;
  }
};

// Throws DataError when the corpus has no emoji at all.
EmojiInventory top_k_emojis(const FrequencyTable& freqs, int k);

enum class Provenance { kmeans, pmi_swear, pmi_target };
std::string provenance_name(Provenance p);
Provenance provenance_from_name(const std::string& name);

// A named emoji → class labeling scheme, the unit every source task is
// built from.
struct ClusterSpec {
  std::string name;
  Provenance provenance = Provenance::kmeans;
  std::vector<std::string> classes;               // ordered label set
  std::map<std::string, std::string> assignment;  // emoji → class
  std::map<std::string, std::string> metadata;

  // Totality, class closure, and the empty-class flagging rule.
  void validate() const;
  const std::string* class_of(const std::string& emoji) const {
    const auto it = assignment.find(emoji);
    return it == assignment.end() ? nullptr : &it->second;
  }
};

void save_cluster_spec(const ClusterSpec& spec, const std::string& path);
ClusterSpec load_cluster_spec(const std::string& path);

// Applies a manual merge map to k-means clusters. Every cluster index must
// be covered: either mapped to a class label or dropped (nullopt). Indices
// outside the result's range raise ConfigError. Emojis of dropped clusters
// are excluded from the spec.
ClusterSpec merge_clusters(
    const KMeansResult& result,
    const std::map<int, std::optional<std::string>>& merge_map,
    const std::string& name = "kmeans");

// PMI cluster builders. α smooths the PMI table; assignment comparisons are
// exact at any α. min_emoji_count filters by corpus occurrence count.
struct PmiOptions {
  double alpha = 1.0;
  std::int64_t min_emoji_count = 1;
};

// Two classes {slur, neutral}; the counting unit is the comment: n(e,c) =
// number of comments of slur-status c containing e at least once. An emoji
// joins the slur cluster iff pmi(e,slur) > pmi(e,neutral); ties → neutral.
// Throws DataError when no comment contains a slur.
ClusterSpec build_swear_clusters(const std::vector<Comment>& corpus,
                                 const SlurLexicon& lexicon,
                                 const PmiOptions& options,
                                 const std::string& name = "pmi-swear");

// Classes = the target task's label set; each emoji joins the label with
// the largest PMI, ties → lexicographically first label. Emojis absent from
// tt_train are not in the spec. Throws DataError when tt_train has no emoji.
ClusterSpec build_target_clusters(const TaskDataset& tt_train, double alpha,
                                  const std::string& name = "pmi-target");

}  // namespace emodist
