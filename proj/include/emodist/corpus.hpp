// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "emodist/frequency.hpp"

namespace emodist {

// One raw corpus row as it arrives on disk.
struct RawComment {
  std::string id;
  std::string text;  // UTF-8
  std::string lang;  // ISO 639-1 tag
};

// A preprocessed comment: emoji-free text tokens plus the emojis that were
// removed, each a full grapheme cluster, in occurrence order.
struct Comment {
  std::string id;
  std::vector<std::string> tokens;
  std::vector<std::string> emojis;
  std::string lang;
};

// Per-language slur term sets. Terms are lowercased single tokens.
struct SlurLexicon {
  std::map<std::string, std::set<std::string>> terms;  // lang -> terms

  bool has_language(const std::string& lang) const {
    return terms.count(lang) > 0;
  }
};

// Splits text into word, punctuation, mention/hashtag, URL and emoji tokens.
// Words are lowercased; emoji grapheme clusters stay intact and untouched.
std::vector<std::string> tokenize(const std::string& text);

// Drops mentions, leading retweet markers and pure-punctuation tokens;
// strips the '#' off hashtags. Idempotent.
std::vector<std::string> clean(const std::vector<std::string>& tokens);

// Shortens character runs of length >= 3 to the spelling the corpus uses
// more often: "coooool" becomes "cool" when count(cool) > count(col),
// falling back to the two-character form.
std::string normalize_repeats(const std::string& token,
                              const FrequencyTable& freqs);

// Partitions tokens into (text tokens, emoji tokens), both in original order.
std::pair<std::vector<std::string>, std::vector<std::string>> split_emojis(
    const std::vector<std::string>& tokens);

// True when any token of the comment exactly matches a slur term for the
// comment's language. Tokens are expected to be normalized already.
// Throws DataError when the lexicon has no entry for the language.
bool contains_slur(const Comment& comment, const SlurLexicon& lexicon);

// Full preprocessing of a raw corpus: tokenize, clean, split emojis, then
// repair repeated-character spellings against the frequencies of the cleaned
// corpus. The returned table is computed over the final (normalized) tokens
// so it matches what is stored.
struct PreprocessResult {
  std::vector<Comment> comments;
  FrequencyTable freqs;
};
PreprocessResult preprocess_corpus(const std::vector<RawComment>& raw);

// Single-comment pipeline up to (but not including) repeat normalization:
// tokenize, clean, split emojis.
Comment preprocess_comment(const RawComment& raw);

}  // namespace emodist
