// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/tasks.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <json.hpp>

#include "emodist/errors.hpp"
#include "emodist/io.hpp"
#include "emodist/rng.hpp"
#include "emodist/unicode.hpp"

namespace emodist {

using nlohmann::json;

std::string kind_name(DatasetKind k) {
  return k == DatasetKind::source ? "source" : "target";
}

std::string split_name(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::dev: return "dev";
    case Split::test: return "test";
  }
  throw ConfigError("unknown split");
}

namespace {

DatasetKind kind_from_name(const std::string& s) {
  if (s == "source") return DatasetKind::source;
  if (s == "target") return DatasetKind::target;
  throw DataError("unknown dataset kind '" + s + "'");
}

Split split_from_name(const std::string& s) {
  if (s == "train") return Split::train;
  if (s == "dev") return Split::dev;
  if (s == "test") return Split::test;
  throw DataError("unknown dataset split '" + s + "'");
}

// Stable order by generating comment id, then per-class seeded subsampling
// down to the cap. cap <= 0 means unlimited.
void cap_per_class(std::vector<Instance>& instances,
                   const std::vector<std::string>& labels,
                   std::int64_t cap, std::uint64_t seed) {
  std::stable_sort(instances.begin(), instances.end(),
                   [](const Instance& a, const Instance& b) {
                     return a.origin_id < b.origin_id;
                   });
  if (cap <= 0) return;
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < instances.size(); ++i)
    by_label[instances[i].label].push_back(i);
  std::vector<char> keep(instances.size(), 1);
  for (std::size_t li = 0; li < labels.size(); ++li) {
    const auto it = by_label.find(labels[li]);
    if (it == by_label.end()) continue;
    auto& idx = it->second;
    if (static_cast<std::int64_t>(idx.size()) <= cap) continue;
    Rng rng(derive_seed(seed, li));
    auto pool = idx;
    rng.shuffle(pool);
    for (std::size_t k = static_cast<std::size_t>(cap); k < pool.size(); ++k)
      keep[pool[k]] = 0;
  }
  std::vector<Instance> kept;
  kept.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i)
    if (keep[i]) kept.push_back(std::move(instances[i]));
  instances = std::move(kept);
}

}  // namespace

void TaskDataset::validate() const {
  if (name.empty()) throw DataError("dataset has no name");
  if (labels.empty()) throw DataError("dataset '" + name + "' has no labels");
  std::set<std::string> label_set(labels.begin(), labels.end());
  if (label_set.size() != labels.size())
    throw DataError("dataset '" + name + "' has duplicate labels");
  if (instances.empty())
    throw DataError("dataset '" + name + "' is empty");
  for (const auto& inst : instances) {
    if (!label_set.count(inst.label))
      throw DataError("dataset '" + name + "' instance labeled '" +
                      inst.label + "' outside the label set");
    if (kind == DatasetKind::source)
      for (const auto& tok : inst.tokens)
        if (uni::is_emoji_token(tok))
          throw DataError("source dataset '" + name +
                          "' has an emoji token in instance text");
  }
}

TaskDataset emit_ep_dataset(const std::vector<Comment>& corpus,
                            const EmojiInventory& inventory,
                            std::int64_t cap, std::uint64_t seed,
                            const std::string& name) {
  if (inventory.size() == 0) throw DataError("emoji inventory is empty");
  TaskDataset ds;
  ds.name = name;
  ds.kind = DatasetKind::source;
  ds.split = Split::train;
  for (const auto& [emoji, count] : inventory.emojis)
    ds.labels.push_back(emoji);
  const std::set<std::string> label_set(ds.labels.begin(), ds.labels.end());

  std::set<std::string> seen;
  for (const auto& comment : corpus) {
    seen.clear();
    for (const auto& e : comment.emojis) {
      if (!label_set.count(e)) continue;
      if (!seen.insert(e).second) continue;  // one instance per distinct emoji
      Instance inst;
      inst.tokens = comment.tokens;
      inst.label = e;
      inst.had_emoji = true;
      inst.origin_id = comment.id;
      ds.instances.push_back(std::move(inst));
    }
  }
  if (ds.instances.empty())
    throw DataError("no comment contains an inventory emoji");
  cap_per_class(ds.instances, ds.labels, cap, seed);
  ds.validate();
  return ds;
}

TaskDataset emit_cluster_dataset(const std::vector<Comment>& corpus,
                                 const ClusterSpec& spec, std::int64_t cap,
                                 std::uint64_t seed, const std::string& name) {
  spec.validate();
  TaskDataset ds;
  ds.name = name.empty() ? spec.name : name;
  ds.kind = DatasetKind::source;
  ds.split = Split::train;
  ds.labels = spec.classes;

  std::set<std::string> classes_here;
  for (const auto& comment : corpus) {
    classes_here.clear();
    for (const auto& e : comment.emojis)
      if (const auto* cls = spec.class_of(e)) classes_here.insert(*cls);
    if (classes_here.size() != 1) continue;  // unmapped-only or conflicting
    Instance inst;
    inst.tokens = comment.tokens;
    inst.label = *classes_here.begin();
    inst.had_emoji = true;
    inst.origin_id = comment.id;
    ds.instances.push_back(std::move(inst));
  }
  if (ds.instances.empty())
    throw DataError("cluster spec '" + spec.name +
                    "' labels no comment in this corpus");
  cap_per_class(ds.instances, ds.labels, cap, seed);
  ds.validate();
  return ds;
}

void TargetSchema::validate() const {
  if (text_column.empty()) throw ConfigError("schema lacks a text column");
  if (label_column.empty()) throw ConfigError("schema lacks a label column");
  if (separator != '\t' && separator != ',')
    throw ConfigError("schema separator must be tab or comma");
  if (label_map.empty()) throw ConfigError("schema label map is empty");
  if (!labels.empty()) {
    const std::set<std::string> y(labels.begin(), labels.end());
    if (y.size() != labels.size())
      throw ConfigError("schema labels are not distinct");
    for (const auto& [raw, norm] : label_map)
      if (!y.count(norm))
        throw ConfigError("schema maps '" + raw + "' to '" + norm +
                          "' outside the declared labels");
  }
}

namespace {

// Splits one record line. Comma-separated input honors double-quoted
// fields with "" escapes; tab-separated input is a plain split.
std::vector<std::string> parse_delimited(const std::string& line, char sep) {
  std::vector<std::string> fields;
  if (sep == '\t') {
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    return fields;
  }
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == sep) {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(ch);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string trim_ascii(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t column_of(const std::vector<std::string>& header,
                      const std::string& wanted, bool has_header,
                      const std::string& path) {
  if (has_header) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (trim_ascii(header[i]) == wanted) return i;
    throw DataError(path + ": header has no column '" + wanted + "'");
  }
  try {
    const int idx = std::stoi(wanted);
    if (idx < 0) throw std::invalid_argument("negative");
    return static_cast<std::size_t>(idx);
  } catch (const std::exception&) {
    throw ConfigError("column '" + wanted +
                      "' is not a 0-based index and the file has no header");
  }
}

}  // namespace

TaskDataset load_target_task(const std::string& path,
                             const TargetSchema& schema,
                             const std::string& name, Split split) {
  schema.validate();
  const auto lines = read_lines(path);
  if (lines.empty()) throw DataError("target task file '" + path + "' is empty");

  std::size_t first_row = 0;
  std::vector<std::string> header;
  if (schema.has_header) {
    header = parse_delimited(lines[0], schema.separator);
    first_row = 1;
  }
  const auto text_col =
      column_of(header, schema.text_column, schema.has_header, path);
  const auto label_col =
      column_of(header, schema.label_column, schema.has_header, path);

  TaskDataset ds;
  ds.name = name;
  ds.kind = DatasetKind::target;
  ds.split = split;
  if (!schema.labels.empty()) {
    ds.labels = schema.labels;
  } else {
    std::set<std::string> values;
    for (const auto& [raw, norm] : schema.label_map) values.insert(norm);
    ds.labels.assign(values.begin(), values.end());
  }

  for (std::size_t i = first_row; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t line_no = i + 1;
    const auto fields = parse_delimited(lines[i], schema.separator);
    if (text_col >= fields.size() || label_col >= fields.size())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": too few columns");
    const std::string raw_label = trim_ascii(fields[label_col]);
    const auto mapped = schema.label_map.find(raw_label);
    if (mapped == schema.label_map.end())
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": unknown label '" + raw_label + "'");
    Instance inst;
    // Target text keeps its emojis; only tokenization and cleaning apply.
    inst.tokens = clean(tokenize(fields[text_col]));
    inst.label = mapped->second;
    inst.origin_id = "row:" + std::to_string(line_no);
    ds.instances.push_back(std::move(inst));
  }
  if (ds.instances.empty())
    throw DataError("target task file '" + path + "' has no data rows");

  // Repeat repair against this dataset's own token frequencies.
  FrequencyTable freqs;
  for (const auto& inst : ds.instances) {
    Comment tmp;
    tmp.tokens = inst.tokens;
    freqs.add_comment(tmp);
  }
  for (auto& inst : ds.instances) {
    bool emoji = false;
    for (auto& tok : inst.tokens) {
      tok = normalize_repeats(tok, freqs);
      emoji = emoji || uni::is_emoji_token(tok);
    }
    inst.had_emoji = emoji;
  }
  ds.validate();
  return ds;
}

DatasetStats dataset_stats(const TaskDataset& ds) {
  ds.validate();
  DatasetStats stats;
  for (const auto& label : ds.labels) stats.label_counts[label] = 0;
  std::int64_t with_emoji = 0;
  for (const auto& inst : ds.instances) {
    ++stats.label_counts[inst.label];
    if (inst.had_emoji) ++with_emoji;
  }
  std::int64_t minority = -1;
  for (const auto& [label, count] : stats.label_counts)
    if (count > 0 && (minority < 0 || count < minority)) minority = count;
  const auto total = static_cast<double>(ds.instances.size());
  stats.minority_fraction = static_cast<double>(minority) / total;
  stats.emoji_content = static_cast<double>(with_emoji) / total;
  return stats;
}

std::pair<TaskDataset, TaskDataset> split_train_dev(const TaskDataset& ds,
                                                    double dev_fraction,
                                                    std::uint64_t seed) {
  ds.validate();
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0))
    throw ConfigError("dev_fraction must lie in (0, 1)");
  std::map<std::string, std::vector<std::size_t>> by_label;
  for (std::size_t i = 0; i < ds.instances.size(); ++i)
    by_label[ds.instances[i].label].push_back(i);

  std::vector<char> in_dev(ds.instances.size(), 0);
  for (std::size_t li = 0; li < ds.labels.size(); ++li) {
    const auto it = by_label.find(ds.labels[li]);
    const std::size_t n = it == by_label.end() ? 0 : it->second.size();
    if (n < 2)
      throw DataError("label '" + ds.labels[li] + "' has " +
                      std::to_string(n) +
                      " instances; need at least 2 to split");
    auto pool = it->second;
    Rng rng(derive_seed(seed, li));
    rng.shuffle(pool);
    auto n_dev = static_cast<std::size_t>(
        std::llround(static_cast<double>(n) * dev_fraction));
    n_dev = std::min(std::max<std::size_t>(n_dev, 1), n - 1);
    for (std::size_t k = 0; k < n_dev; ++k) in_dev[pool[k]] = 1;
  }

  TaskDataset train, dev;
  train.name = ds.name;
  train.kind = ds.kind;
  train.split = Split::train;
  train.labels = ds.labels;
  dev = train;
  dev.split = Split::dev;
  for (std::size_t i = 0; i < ds.instances.size(); ++i)
    (in_dev[i] ? dev : train).instances.push_back(ds.instances[i]);
  train.validate();
  dev.validate();
  return {std::move(train), std::move(dev)};
}

void save_dataset(const TaskDataset& ds, const std::string& path,
                  const std::map<std::string, std::string>& provenance) {
  ds.validate();
  std::string tsv;
  for (const auto& inst : ds.instances) {
    tsv += inst.label;
    tsv += '\t';
    for (std::size_t i = 0; i < inst.tokens.size(); ++i) {
      if (i) tsv += ' ';
      tsv += inst.tokens[i];
    }
    tsv += '\n';
  }
  write_file(path, tsv);

  const auto stats = dataset_stats(ds);
  json manifest;
  manifest["name"] = ds.name;
  manifest["kind"] = kind_name(ds.kind);
  manifest["split"] = split_name(ds.split);
  manifest["labels"] = ds.labels;
  manifest["n_instances"] = ds.instances.size();
  manifest["stats"]["label_counts"] = stats.label_counts;
  manifest["stats"]["minority_fraction"] = stats.minority_fraction;
  manifest["stats"]["emoji_content"] = stats.emoji_content;
  manifest["provenance"] = provenance;
  manifest["content_hash"] = hash_hex(fnv1a64(tsv));
  write_file(path + ".manifest.json", manifest.dump(2) + "\n");
}

TaskDataset load_dataset(const std::string& path) {
  const std::string manifest_path = path + ".manifest.json";
  if (!file_exists(manifest_path))
    throw DataError("missing dataset manifest '" + manifest_path + "'");
  json manifest = json::parse(read_file(manifest_path), nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object())
    throw DataError("'" + manifest_path + "' is not a dataset manifest");
  TaskDataset ds;
  try {
    ds.name = manifest.at("name").get<std::string>();
    ds.kind = kind_from_name(manifest.at("kind"));
    ds.split = split_from_name(manifest.at("split"));
    ds.labels = manifest.at("labels").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw DataError(manifest_path + ": " + e.what());
  }

  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto tab = lines[i].find('\t');
    if (tab == std::string::npos)
      throw DataError(path + ":" + std::to_string(i + 1) +
                      ": expected label<TAB>tokens");
    Instance inst;
    inst.label = lines[i].substr(0, tab);
    std::istringstream toks(lines[i].substr(tab + 1));
    std::string tok;
    while (toks >> tok) inst.tokens.push_back(tok);
    inst.origin_id = "row:" + std::to_string(i + 1);
    if (ds.kind == DatasetKind::source) {
      // Source instances exist because their comment contained an emoji.
      inst.had_emoji = true;
    } else {
      for (const auto& t : inst.tokens)
        if (uni::is_emoji_token(t)) {
          inst.had_emoji = true;
          break;
        }
    }
    ds.instances.push_back(std::move(inst));
  }
  ds.validate();
  return ds;
}

}  // namespace emodist
