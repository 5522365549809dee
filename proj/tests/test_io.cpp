// Apache License, Version 2.0, refer to LICENSE.txt
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <zlib.h>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "emodist/errors.hpp"
#include "emodist/io.hpp"

using namespace emodist;

namespace {

// Fresh directory per test case, removed on scope exit.
struct TempDir {
  std::filesystem::path path;

  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("emodist_io_test_" + std::to_string(++counter));
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }

  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("write_file and read_file round-trip, creating parent directories") {
  TempDir dir;
  const std::string path = dir.file("a/b/c.txt");
  const std::string content = "line one\nschön \xF0\x9F\x98\x8D\n";
  write_file(path, content);
  CHECK(read_file(path) == content);
  CHECK(file_exists(path));
  CHECK(!file_exists(dir.file("missing.txt")));
}

TEST_CASE("read_lines splits on newlines, strips CR, keeps a last "
          "unterminated line") {
  TempDir dir;
  const std::string path = dir.file("lines.txt");
  write_file(path, "one\r\ntwo\n\nfour");
  const auto lines = read_lines(path);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "one");
  CHECK(lines[1] == "two");
  CHECK(lines[2] == "");
  CHECK(lines[3] == "four");
  CHECK_THROWS_AS(read_lines(dir.file("missing.txt")), DataError);
}

TEST_CASE("read_lines reads gzip-compressed files transparently") {
  TempDir dir;
  const std::string path = dir.file("corpus.jsonl.gz");
  gzFile gz = gzopen(path.c_str(), "wb");
  REQUIRE(gz != nullptr);
  const std::string body = "first line\nsecond line\n";
  REQUIRE(gzwrite(gz, body.data(), static_cast<unsigned>(body.size())) ==
          static_cast<int>(body.size()));
  gzclose(gz);

  const auto lines = read_lines(path);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "first line");
  CHECK(lines[1] == "second line");
}

TEST_CASE("read_jsonl_corpus keeps good rows and reports bad ones by line") {
  TempDir dir;
  const std::string path = dir.file("raw.jsonl");
  write_file(path,
             R"({"id":"1","text":"hello","lang":"en"})"
             "\n"
             "not json\n"
             "[1,2]\n"
             R"({"text":"no id","lang":"en"})"
             "\n"
             R"({"id":"2","text":42,"lang":"en"})"
             "\n"
             "\n"
             R"({"id":"3","text":"weiter","lang":"de"})"
             "\n");
  const CorpusReadResult result = read_jsonl_corpus(path);
  REQUIRE(result.comments.size() == 2);
  CHECK(result.comments[0].id == "1");
  CHECK(result.comments[0].text == "hello");
  CHECK(result.comments[0].lang == "en");
  CHECK(result.comments[1].id == "3");
  CHECK(result.comments[1].lang == "de");

  REQUIRE(result.errors.size() == 4);
  CHECK(result.errors[0].line_no == 2);
  CHECK(result.errors[0].message == "not a JSON object");
  CHECK(result.errors[1].line_no == 3);
  CHECK(result.errors[2].line_no == 4);
  CHECK(result.errors[2].message == "missing or non-string field 'id'");
  CHECK(result.errors[3].line_no == 5);
  CHECK(result.errors[3].message == "missing or non-string field 'text'");
}

TEST_CASE("comment store round-trips tokens, emojis, id and lang") {
  TempDir dir;
  const std::string path = dir.file("store.jsonl");
  std::vector<Comment> comments(2);
  comments[0].id = "a";
  comments[0].tokens = {"so", "schön", "!"};
  comments[0].emojis = {"\xF0\x9F\x98\x8D", "\xF0\x9F\x91\x8D\xF0\x9F\x8F\xBD"};
  comments[0].lang = "de";
  comments[1].id = "b";
  comments[1].tokens = {};
  comments[1].emojis = {};
  comments[1].lang = "en";
  write_comment_store(path, comments);

  const auto loaded = read_comment_store(path);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].id == comments[0].id);
  CHECK(loaded[0].tokens == comments[0].tokens);
  CHECK(loaded[0].emojis == comments[0].emojis);
  CHECK(loaded[0].lang == comments[0].lang);
  CHECK(loaded[1].tokens.empty());
  CHECK(loaded[1].emojis.empty());

  write_file(path, "{\"id\":\"x\"}\n");
  CHECK_THROWS_AS(read_comment_store(path), DataError);
  write_file(path, "garbage\n");
  CHECK_THROWS_AS(read_comment_store(path), DataError);
}

TEST_CASE("load_slur_terms trims, lowercases and deduplicates") {
  TempDir dir;
  const std::string path = dir.file("slurs.de.txt");
  write_file(path, "  Quark \nIDIOT\nidiot\n\nÄrger\n");
  const auto terms = load_slur_terms(path);
  REQUIRE(terms.size() == 3);
  CHECK(terms.count("quark") == 1);
  CHECK(terms.count("idiot") == 1);
  CHECK(terms.count("ärger") == 1);
}

TEST_CASE("load_slur_terms rejects embedded whitespace and empty lexicons") {
  TempDir dir;
  const std::string multi = dir.file("bad.txt");
  write_file(multi, "two words\n");
  CHECK_THROWS_AS(load_slur_terms(multi), DataError);

  const std::string empty = dir.file("empty.txt");
  write_file(empty, "\n   \n");
  CHECK_THROWS_AS(load_slur_terms(empty), DataError);
}

TEST_CASE("lang_from_filename takes the last stem component") {
  CHECK(lang_from_filename("slurs.de.txt") == "de");
  CHECK(lang_from_filename("/some/dir/lexicon.en.txt") == "en");
  CHECK(lang_from_filename("words.txt") == "words");
  CHECK(lang_from_filename("corpus.tr.jsonl.gz") == "jsonl");
}

TEST_CASE("fnv1a64 matches the reference vectors and hash_hex zero-pads") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
  CHECK(fnv1a64("schön \xF0\x9F\x98\x8D") == 0x0c542dc355023358ull);
  CHECK(hash_hex(0xcbf29ce484222325ull) == "cbf29ce484222325");
  CHECK(hash_hex(0x0c542dc355023358ull) == "0c542dc355023358");
}
