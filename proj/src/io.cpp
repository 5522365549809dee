// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/io.hpp"

#include <zlib.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "emodist/errors.hpp"
#include "emodist/unicode.hpp"

namespace emodist {

using nlohmann::json;

std::vector<std::string> read_lines(const std::string& path) {
  // gzopen reads plain files too, so one code path covers .gz and text.
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw DataError("cannot open '" + path + "'");
  std::vector<std::string> lines;
  std::string current;
  char buf[1 << 16];
  int n;
  while ((n = gzread(f, buf, sizeof buf)) > 0) {
    for (int i = 0; i < n; ++i) {
      if (buf[i] == '\n') {
        if (!current.empty() && current.back() == '\r') current.pop_back();
        lines.push_back(std::move(current));
        current.clear();
      } else {
        current.push_back(buf[i]);
      }
    }
  }
  const bool read_error = n < 0;
  gzclose(f);
  if (read_error) throw DataError("read error in '" + path + "'");
  if (!current.empty()) {
    if (current.back() == '\r') current.pop_back();
    lines.push_back(std::move(current));
  }
  return lines;
}

void write_file(const std::string& path, const std::string& content) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  return content;
}

CorpusReadResult read_jsonl_corpus(const std::string& path) {
  CorpusReadResult result;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.empty()) continue;
    const std::size_t line_no = i + 1;
    json row = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (row.is_discarded() || !row.is_object()) {
      result.errors.push_back({line_no, "not a JSON object"});
      continue;
    }
    RawComment c;
    bool ok = true;
    for (const char* field : {"id", "text", "lang"}) {
      const auto it = row.find(field);
      if (it == row.end() || !it->is_string()) {
        result.errors.push_back(
            {line_no, std::string("missing or non-string field '") + field +
                          "'"});
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    c.id = row["id"].get<std::string>();
    c.text = row["text"].get<std::string>();
    c.lang = row["lang"].get<std::string>();
    result.comments.push_back(std::move(c));
  }
  return result;
}

void write_comment_store(const std::string& path,
                         const std::vector<Comment>& comments) {
  std::string out;
  for (const auto& c : comments) {
    json row;
    row["id"] = c.id;
    row["tokens"] = c.tokens;
    row["emojis"] = c.emojis;
    row["lang"] = c.lang;
    out += row.dump();
    out += '\n';
  }
  write_file(path, out);
}

std::vector<Comment> read_comment_store(const std::string& path) {
  std::vector<Comment> comments;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    json row = json::parse(lines[i], nullptr, false);
    if (row.is_discarded() || !row.is_object())
      throw DataError(path + ":" + std::to_string(i + 1) +
                      ": malformed comment record");
    Comment c;
    try {
      c.id = row.at("id").get<std::string>();
      c.tokens = row.at("tokens").get<std::vector<std::string>>();
      c.emojis = row.at("emojis").get<std::vector<std::string>>();
      c.lang = row.at("lang").get<std::string>();
    } catch (const json::exception& e) {
      throw DataError(path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
    comments.push_back(std::move(c));
  }
  return comments;
}

std::set<std::string> load_slur_terms(const std::string& path) {
  std::set<std::string> terms;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string term = lines[i];
    // Trim ASCII edge whitespace.
    const auto begin = term.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = term.find_last_not_of(" \t");
    term = term.substr(begin, end - begin + 1);
    if (term.find_first_of(" \t") != std::string::npos)
      throw DataError(path + ":" + std::to_string(i + 1) +
                      ": slur term contains whitespace");
    std::string lowered;
    for (const char32_t cp : uni::decode_utf8(term))
      uni::append_utf8(lowered, uni::to_lower(cp));
    terms.insert(std::move(lowered));
  }
  if (terms.empty()) throw DataError("slur lexicon '" + path + "' is empty");
  return terms;
}

std::string lang_from_filename(const std::string& path) {
  const std::string stem = std::filesystem::path(path).stem().string();
  const auto dot = stem.rfind('.');
  return dot == std::string::npos ? stem : stem.substr(dot + 1);
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool file_exists(const std::string& path) {
  std::error_code ec;
  return std::filesystem::exists(path, ec);
}

void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) throw DataError("cannot create directory '" + parent.string() + "'");
}

}  // namespace emodist
