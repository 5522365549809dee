// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

// Minimal Unicode support for social-media text: UTF-8 codec, the
// Extended_Pictographic property, emoji sequence scanning (ZWJ sequences,
// skin-tone modifiers, variation selectors, flags) and case folding for the
// scripts the corpora use. Only what the tokenizer needs, nothing more.
namespace emodist::uni {

// Decodes UTF-8; throws DataError on malformed input.
std::vector<char32_t> decode_utf8(std::string_view s);

void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(const std::vector<char32_t>& cps);
std::string encode_utf8(const char32_t* begin, const char32_t* end);

// Unicode Extended_Pictographic property (emoji-data.txt ranges).
bool is_extended_pictographic(char32_t cp);

// U+1F1E6..U+1F1FF, pairs of which form flag emojis.
inline bool is_regional_indicator(char32_t cp) {
  return cp >= 0x1F1E6 && cp <= 0x1F1FF;
}

// Skin tone modifiers U+1F3FB..U+1F3FF.
inline bool is_emoji_modifier(char32_t cp) {
  return cp >= 0x1F3FB && cp <= 0x1F3FF;
}

inline bool is_variation_selector(char32_t cp) {
  return cp == 0xFE0E || cp == 0xFE0F;
}

inline bool is_zwj(char32_t cp) { return cp == 0x200D; }

// Emoji tag characters (subdivision flag sequences).
inline bool is_tag_char(char32_t cp) { return cp >= 0xE0020 && cp <= 0xE007F; }

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
bool is_combining_mark(char32_t cp);

// Lowercase mapping for ASCII, Latin-1, Latin Extended-A, Greek and
// Cyrillic; other codepoints are returned unchanged.
char32_t to_lower(char32_t cp);

// Scans one emoji grapheme cluster starting at `i`: a pictographic base or
// regional-indicator pair plus its modifiers, variation selectors, ZWJ
// continuations and tag characters. Returns the index one past the cluster,
// or `i` when no cluster starts there.
std::size_t scan_emoji_cluster(const std::vector<char32_t>& cps,
                               std::size_t i);

// A token counts as an emoji when its first codepoint is Extended_Pictographic
// or a regional indicator (so flag sequences land with the emojis rather than
// the text tokens).
bool is_emoji_token(std::string_view token);

}  // namespace emodist::uni
