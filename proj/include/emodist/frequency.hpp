// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>

namespace emodist {

struct Comment;

// Token counts over a preprocessed corpus. Covers text tokens and emoji
// tokens alike; merging is commutative so shards can be counted in parallel.
struct FrequencyTable {
  std::unordered_map<std::string, std::int64_t> counts;
  std::int64_t total_tokens = 0;
  std::int64_t total_comments = 0;
  std::int64_t comments_with_emoji = 0;

  std::int64_t count(const std::string& token) const {
    auto it = counts.find(token);
    return it == counts.end() ? 0 : it->second;
  }

  void add_comment(const Comment& c);
  void merge(const FrequencyTable& other);

  // comments_with_emoji / total_comments; 0 for an empty table.
  double emoji_comment_ratio() const {
    return total_comments == 0
               ? 0.0
               : static_cast<double>(comments_with_emoji) / total_comments;
  }
};

template <class CommentRange>
FrequencyTable build_frequency_table(const CommentRange& corpus) {
  FrequencyTable t;
  for (const auto& c : corpus) t.add_comment(c);
  return t;
}

}  // namespace emodist
