// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/corpus.hpp"

#include <algorithm>

#include "emodist/errors.hpp"
#include "emodist/unicode.hpp"

namespace emodist {

namespace {

bool is_word_char(char32_t cp) {
  return !uni::is_space(cp) && !uni::is_punct(cp) &&
         !uni::is_extended_pictographic(cp) &&
         !uni::is_regional_indicator(cp) && !uni::is_zwj(cp) &&
         !uni::is_tag_char(cp);
}

// Case-insensitive ASCII prefix match at position i.
bool match_ascii_ci(const std::vector<char32_t>& cps, std::size_t i,
                    const char* lit) {
  for (const char* p = lit; *p; ++p, ++i) {
    if (i >= cps.size()) return false;
    char32_t cp = cps[i];
    if (cp >= 'A' && cp <= 'Z') cp += 0x20;
    if (cp != static_cast<char32_t>(*p)) return false;
  }
  return true;
}

bool is_url_start(const std::vector<char32_t>& cps, std::size_t i) {
  return match_ascii_ci(cps, i, "http://") ||
         match_ascii_ci(cps, i, "https://") || match_ascii_ci(cps, i, "www.");
}

std::string lowercased(const std::vector<char32_t>& cps, std::size_t begin,
                       std::size_t end) {
  std::string out;
  for (std::size_t k = begin; k < end; ++k)
    uni::append_utf8(out, uni::to_lower(cps[k]));
  return out;
}

bool is_pure_punct(const std::string& token) {
  const auto cps = uni::decode_utf8(token);
  if (cps.empty()) return false;
  return std::all_of(cps.begin(), cps.end(),
                     [](char32_t cp) { return uni::is_punct(cp); });
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  const auto cps = uni::decode_utf8(text);
  const std::size_t n = cps.size();
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < n) {
    const char32_t cp = cps[i];
    if (uni::is_space(cp) || uni::is_zwj(cp) || uni::is_tag_char(cp)) {
      ++i;
      continue;
    }
    if (is_url_start(cps, i)) {
      std::size_t j = i;
      while (j < n && !uni::is_space(cps[j])) ++j;
      tokens.push_back(lowercased(cps, i, j));
      i = j;
      continue;
    }
    if (const std::size_t e = uni::scan_emoji_cluster(cps, i); e > i) {
      tokens.push_back(uni::encode_utf8(cps.data() + i, cps.data() + e));
      i = e;
      continue;
    }
    if ((cp == '@' || cp == '#') && i + 1 < n && is_word_char(cps[i + 1])) {
      std::size_t j = i + 1;
      while (j < n && is_word_char(cps[j])) ++j;
      tokens.push_back(lowercased(cps, i, j));
      i = j;
      continue;
    }
    if (uni::is_punct(cp)) {
      std::size_t j = i;
      while (j < n && uni::is_punct(cps[j])) ++j;
      tokens.push_back(lowercased(cps, i, j));
      i = j;
      continue;
    }
    if (uni::is_combining_mark(cp)) {  // stray mark with nothing to attach to
      ++i;
      continue;
    }
    // Word: letters/digits/marks, with apostrophes and hyphens kept when
    // they sit between word characters ("don't", "e-mail").
    std::size_t j = i;
    while (j < n) {
      if (is_word_char(cps[j])) {
        ++j;
        continue;
      }
      if ((cps[j] == '\'' || cps[j] == '-') && j > i && j + 1 < n &&
          is_word_char(cps[j + 1])) {
        ++j;
        continue;
      }
      break;
    }
    tokens.push_back(lowercased(cps, i, j));
    i = j;
  }
  return tokens;
}

std::vector<std::string> clean(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (tok.empty()) continue;
    if (is_pure_punct(tok)) continue;
    if (tok.front() == '@' && tok.size() > 1) continue;
    if (out.empty() && tok == "rt") continue;
    std::string t = tok;
    std::size_t hashes = 0;
    while (hashes < t.size() && t[hashes] == '#') ++hashes;
    if (hashes > 0) t.erase(0, hashes);
    if (t.empty()) continue;
    out.push_back(std::move(t));
  }
  return out;
}

std::string normalize_repeats(const std::string& token,
                              const FrequencyTable& freqs) {
  if (uni::is_emoji_token(token)) return token;
  const auto cps = uni::decode_utf8(token);
  bool has_long_run = false;
  for (std::size_t i = 0; i < cps.size();) {
    std::size_t j = i;
    while (j < cps.size() && cps[j] == cps[i]) ++j;
    if (j - i >= 3) {
      has_long_run = true;
      break;
    }
    i = j;
  }
  if (!has_long_run) return token;

  std::vector<char32_t> two, one;
  for (std::size_t i = 0; i < cps.size();) {
    std::size_t j = i;
    while (j < cps.size() && cps[j] == cps[i]) ++j;
    const std::size_t run = j - i;
    const std::size_t keep2 = run >= 3 ? 2 : run;
    const std::size_t keep1 = run >= 3 ? 1 : run;
    two.insert(two.end(), keep2, cps[i]);
    one.insert(one.end(), keep1, cps[i]);
    i = j;
  }
  std::string cand2 = uni::encode_utf8(two);
  std::string cand1 = uni::encode_utf8(one);
  // Ties and unseen candidates fall back to the two-character form.
  return freqs.count(cand1) > freqs.count(cand2) ? cand1 : cand2;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_emojis(
    const std::vector<std::string>& tokens) {
  std::vector<std::string> words, emojis;
  for (const auto& tok : tokens) {
    (uni::is_emoji_token(tok) ? emojis : words).push_back(tok);
  }
  return {std::move(words), std::move(emojis)};
}

bool contains_slur(const Comment& comment, const SlurLexicon& lexicon) {
  const auto it = lexicon.terms.find(comment.lang);
  if (it == lexicon.terms.end())
    throw DataError("no slur lexicon configured for language '" +
                    comment.lang + "'");
  const auto& terms = it->second;
  for (const auto& tok : comment.tokens)
    if (terms.count(tok)) return true;
  return false;
}

Comment preprocess_comment(const RawComment& raw) {
  Comment c;
  c.id = raw.id;
  c.lang = raw.lang;
  auto [words, emojis] = split_emojis(clean(tokenize(raw.text)));
  c.tokens = std::move(words);
  c.emojis = std::move(emojis);
  return c;
}

PreprocessResult preprocess_corpus(const std::vector<RawComment>& raw) {
  PreprocessResult result;
  result.comments.reserve(raw.size());
  for (const auto& r : raw) result.comments.push_back(preprocess_comment(r));

  // Repeat repair consults frequencies of the cleaned (pre-repair) corpus.
  const FrequencyTable cleaned_freqs = build_frequency_table(result.comments);
  for (auto& c : result.comments)
    for (auto& tok : c.tokens) tok = normalize_repeats(tok, cleaned_freqs);

  result.freqs = build_frequency_table(result.comments);
  return result;
}

}  // namespace emodist
