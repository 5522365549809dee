// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "emodist/corpus.hpp"

namespace emodist {

// A recoverable per-record problem while reading line-oriented input.
struct RowError {
  std::size_t line_no = 0;  // 1-based
  std::string message;
};

// Lines of a text file; reads gzip-compressed files transparently.
std::vector<std::string> read_lines(const std::string& path);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Raw corpus JSONL: one object per line with `id`, `text`, `lang`.
// Malformed rows are reported and skipped; the rest of the file is kept.
struct CorpusReadResult {
  std::vector<RawComment> comments;
  std::vector<RowError> errors;
};
CorpusReadResult read_jsonl_corpus(const std::string& path);

// Preprocessed comment store JSONL: `id`, `tokens`, `emojis`, `lang`.
void write_comment_store(const std::string& path,
                         const std::vector<Comment>& comments);
std::vector<Comment> read_comment_store(const std::string& path);

// One lowercased term per line; blank lines ignored. Terms with internal
// whitespace violate the lexicon contract and raise DataError.
std::set<std::string> load_slur_terms(const std::string& path);

// Language tag from a lexicon file name: the last dot-separated stem
// component ("slurs.de.txt" → "de", "de.txt" → "de"). Empty when absent.
std::string lang_from_filename(const std::string& path);

// FNV-1a 64-bit content hash, used to stamp manifests.
std::uint64_t fnv1a64(std::string_view data);
std::string hash_hex(std::uint64_t h);

bool file_exists(const std::string& path);
void ensure_parent_dir(const std::string& path);

}  // namespace emodist
