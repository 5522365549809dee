// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/frequency.hpp"

#include "emodist/corpus.hpp"

namespace emodist {

void FrequencyTable::add_comment(const Comment& c) {
  for (const auto& t : c.tokens) {
    ++counts[t];
    ++total_tokens;
  }
  for (const auto& e : c.emojis) {
    ++counts[e];
    ++total_tokens;
  }
  ++total_comments;
  if (!c.emojis.empty()) ++comments_with_emoji;
}

void FrequencyTable::merge(const FrequencyTable& other) {
  for (const auto& [tok, n] : other.counts) counts[tok] += n;
  total_tokens += other.total_tokens;
  total_comments += other.total_comments;
  comments_with_emoji += other.comments_with_emoji;
}

}  // namespace emodist
