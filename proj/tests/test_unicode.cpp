// Apache License, Version 2.0, refer to LICENSE.txt
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <vector>

#include "emodist/errors.hpp"
#include "emodist/rng.hpp"
#include "emodist/unicode.hpp"

using namespace emodist;
namespace uni = emodist::uni;

TEST_CASE("utf8 decode and encode round-trip") {
  const std::string samples[] = {
      "",
      "hello",
      "héllo wörld",
      "مرحبا",            // Arabic
      "cześć",                           // Polish
      "\U0001F60D",                                // 😍
      "\U0001F44D\U0001F3FD",                      // 👍🏽
      "\U0001F468‍\U0001F469‍\U0001F467" // family ZWJ sequence
  };
  for (const auto& s : samples) {
    const auto cps = uni::decode_utf8(s);
    CHECK(uni::encode_utf8(cps) == s);
  }
}

TEST_CASE("utf8 decoder rejects malformed input") {
  CHECK_THROWS_AS(uni::decode_utf8(std::string("\xff")), DataError);
  CHECK_THROWS_AS(uni::decode_utf8(std::string("\xc3")), DataError);  // truncated
  CHECK_THROWS_AS(uni::decode_utf8(std::string("\xc0\xaf")), DataError);  // overlong
  CHECK_THROWS_AS(uni::decode_utf8(std::string("\xed\xa0\x80")), DataError);  // surrogate
  CHECK_THROWS_AS(uni::decode_utf8(std::string("\x80")), DataError);  // stray cont.
}

TEST_CASE("extended pictographic membership") {
  CHECK(uni::is_extended_pictographic(0x1F60D));  // 😍
  CHECK(uni::is_extended_pictographic(0x1F44D));  // 👍
  CHECK(uni::is_extended_pictographic(0x2764));   // ❤
  CHECK(uni::is_extended_pictographic(0x00A9));   // ©
  CHECK(uni::is_extended_pictographic(0x2139));   // ℹ
  CHECK(uni::is_extended_pictographic(0x1F923));  // 🤣
  CHECK(uni::is_extended_pictographic(0x1FAE0));  // 🫠
  CHECK_FALSE(uni::is_extended_pictographic('a'));
  CHECK_FALSE(uni::is_extended_pictographic('1'));
  CHECK_FALSE(uni::is_extended_pictographic(0x00E9));   // é
  CHECK_FALSE(uni::is_extended_pictographic(0x1F1E9));  // regional indicator D
  CHECK_FALSE(uni::is_extended_pictographic(0x200D));   // ZWJ
  CHECK_FALSE(uni::is_extended_pictographic(0x1F3FD));  // skin tone
}

TEST_CASE("emoji cluster scanning") {
  auto cluster_len = [](const std::string& s) {
    const auto cps = uni::decode_utf8(s);
    return uni::scan_emoji_cluster(cps, 0) - 0;
  };
  // Simple pictograph.
  CHECK(cluster_len("\U0001F60D") == 1);
  // Base + skin tone modifier.
  CHECK(cluster_len("\U0001F44D\U0001F3FD") == 2);
  // Base + variation selector.
  CHECK(cluster_len("❤️") == 2);
  // Family: three bases joined by ZWJ.
  CHECK(cluster_len("\U0001F468‍\U0001F469‍\U0001F467") == 5);
  // Flag: regional-indicator pair.
  CHECK(cluster_len("\U0001F1E9\U0001F1EA") == 2);
  // Subdivision flag with tag characters.
  CHECK(cluster_len("\U0001F3F4\U000E0067\U000E0062\U000E0073\U000E0063"
                    "\U000E0074\U000E007F") == 7);
  // Not an emoji start: scanner stays put.
  const auto word = uni::decode_utf8("hi");
  CHECK(uni::scan_emoji_cluster(word, 0) == 0);
}

TEST_CASE("emoji cluster scanning does not overrun pair boundaries") {
  // Four regional indicators = two flags, not one blob.
  const auto cps = uni::decode_utf8("\U0001F1E9\U0001F1EA\U0001F1EB\U0001F1F7");
  const auto first_end = uni::scan_emoji_cluster(cps, 0);
  CHECK(first_end == 2);
  CHECK(uni::scan_emoji_cluster(cps, first_end) == 4);
}

TEST_CASE("lowercase mapping across scripts") {
  CHECK(uni::to_lower(U'A') == U'a');
  CHECK(uni::to_lower(U'z') == U'z');
  CHECK(uni::to_lower(0x00C9) == 0x00E9);  // É → é
  CHECK(uni::to_lower(0x00DC) == 0x00FC);  // Ü → ü
  CHECK(uni::to_lower(0x0130) == 0x0069);  // İ → i
  CHECK(uni::to_lower(0x0178) == 0x00FF);  // Ÿ → ÿ
  CHECK(uni::to_lower(0x015A) == 0x015B);  // Ś → ś
  CHECK(uni::to_lower(0x0141) == 0x0142);  // Ł → ł
  CHECK(uni::to_lower(0x0391) == 0x03B1);  // Α → α
  CHECK(uni::to_lower(0x03A9) == 0x03C9);  // Ω → ω
  CHECK(uni::to_lower(0x0414) == 0x0434);  // Д → д
  CHECK(uni::to_lower(0x0401) == 0x0451);  // Ё → ё
  CHECK(uni::to_lower(0x00D7) == 0x00D7);  // × unchanged
  CHECK(uni::to_lower(0x00F7) == 0x00F7);  // ÷ unchanged
  CHECK(uni::to_lower(0x0645) == 0x0645);  // Arabic unchanged
  CHECK(uni::to_lower(U'9') == U'9');
}

TEST_CASE("emoji token classification") {
  CHECK(uni::is_emoji_token("\U0001F60D"));
  CHECK(uni::is_emoji_token("\U0001F44D\U0001F3FD"));
  CHECK(uni::is_emoji_token("\U0001F1E9\U0001F1EA"));  // flag
  CHECK(uni::is_emoji_token("❤️"));
  CHECK_FALSE(uni::is_emoji_token("hello"));
  CHECK_FALSE(uni::is_emoji_token("héllo"));
  CHECK_FALSE(uni::is_emoji_token(""));
  CHECK_FALSE(uni::is_emoji_token(":)"));
}

TEST_CASE("character classes") {
  CHECK(uni::is_space(U' '));
  CHECK(uni::is_space(U'\t'));
  CHECK(uni::is_space(U'\n'));
  CHECK(uni::is_space(0x00A0));
  CHECK_FALSE(uni::is_space(U'x'));
  CHECK(uni::is_punct(U'!'));
  CHECK(uni::is_punct(U','));
  CHECK(uni::is_punct(U'#'));
  CHECK(uni::is_punct(0x2026));  // …
  CHECK(uni::is_punct(0x061F));  // Arabic question mark
  CHECK_FALSE(uni::is_punct(U'a'));
  CHECK_FALSE(uni::is_punct(0x00E9));
}

TEST_CASE("rng is deterministic and seed-derivation separates streams") {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
  }
  bool differs = false;
  Rng a2(42);
  for (int i = 0; i < 100; ++i)
    if (a2.next() != c.next()) differs = true;
  CHECK(differs);

  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("rng uniform and below stay in range") {
  Rng r(123);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto k = r.below(17);
    CHECK(k < 17);
  }
  for (int i = 0; i < 100; ++i) {
    const double v = r.uniform(-0.5, 0.5);
    CHECK(v >= -0.5);
    CHECK(v < 0.5);
  }
}

TEST_CASE("rng shuffle is a permutation and seed-stable") {
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  auto w = v;
  Rng r(9);
  r.shuffle(w);
  auto sorted = w;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == v);

  auto w2 = v;
  Rng r2(9);
  r2.shuffle(w2);
  CHECK(w == w2);
}
