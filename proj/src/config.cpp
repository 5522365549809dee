// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/config.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "emodist/errors.hpp"
#include "emodist/io.hpp"

namespace emodist {

using nlohmann::json;

const std::vector<std::string> kSourceTaskNames = {
    "ep", "kmeans2", "kmeans3", "pmi-swear", "pmi-target"};

namespace {

[[noreturn]] void fail(const std::string& origin, const std::string& message) {
  throw ConfigError(origin + ": " + message);
}

const json& member(const json& obj, const std::string& key,
                   const std::string& origin) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(origin, "missing required key '" + key + "'");
  return *it;
}

void require_keys(const json& obj, const std::set<std::string>& known,
                  const std::string& origin, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (known.count(it.key()) == 0) {
      fail(origin, "unknown key '" + it.key() + "' in " + where);
    }
  }
}

double as_number(const json& v, const std::string& origin,
                 const std::string& where) {
  if (!v.is_number()) fail(origin, where + " must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& origin, const std::string& where) {
  if (!v.is_number_integer()) fail(origin, where + " must be an integer");
  return v.get<int>();
}

std::int64_t as_int64(const json& v, const std::string& origin,
                      const std::string& where) {
  if (!v.is_number_integer()) fail(origin, where + " must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t as_seed(const json& v, const std::string& origin,
                      const std::string& where) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    fail(origin, where + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& origin,
                      const std::string& where) {
  if (!v.is_string()) fail(origin, where + " must be a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& origin,
             const std::string& where) {
  if (!v.is_boolean()) fail(origin, where + " must be a boolean");
  return v.get<bool>();
}

std::map<int, std::optional<std::string>> parse_merge_map(
    const json& v, const std::string& origin, const std::string& where) {
  if (!v.is_object()) fail(origin, where + " must be an object");
  std::map<int, std::optional<std::string>> out;
  for (auto it = v.begin(); it != v.end(); ++it) {
    int idx = 0;
    try {
      std::size_t pos = 0;
      idx = std::stoi(it.key(), &pos);
      if (pos != it.key().size()) throw std::invalid_argument(it.key());
    } catch (const std::exception&) {
      fail(origin, where + " key '" + it.key() + "' is not a cluster index");
    }
    if (it->is_null()) {
      out[idx] = std::nullopt;
    } else if (it->is_string()) {
      out[idx] = it->get<std::string>();
    } else {
      fail(origin, where + " values must be strings or null");
    }
  }
  return out;
}

EmbeddingConfig parse_embedding(const json& v, const std::string& origin) {
  if (!v.is_object()) fail(origin, "'embedding' must be an object");
  require_keys(v,
               {"dim", "window", "negative_samples", "epochs", "learning_rate",
                "min_count", "emoji_min_count", "unigram_power", "seed"},
               origin, "'embedding'");
  EmbeddingConfig cfg;
  if (v.contains("dim")) cfg.dim = as_int(v["dim"], origin, "embedding.dim");
  if (v.contains("window")) {
    cfg.window = as_int(v["window"], origin, "embedding.window");
  }
  if (v.contains("negative_samples")) {
    cfg.negative_samples =
        as_int(v["negative_samples"], origin, "embedding.negative_samples");
  }
  if (v.contains("epochs")) {
    cfg.epochs = as_int(v["epochs"], origin, "embedding.epochs");
  }
  if (v.contains("learning_rate")) {
    cfg.learning_rate =
        as_number(v["learning_rate"], origin, "embedding.learning_rate");
  }
  if (v.contains("min_count")) {
    cfg.min_count =
        as_int64(v["min_count"], origin, "embedding.min_count");
  }
  if (v.contains("emoji_min_count")) {
    cfg.emoji_min_count =
        as_int64(v["emoji_min_count"], origin, "embedding.emoji_min_count");
  }
  if (v.contains("unigram_power")) {
    cfg.unigram_power =
        as_number(v["unigram_power"], origin, "embedding.unigram_power");
  }
  if (v.contains("seed")) {
    cfg.seed = as_seed(v["seed"], origin, "embedding.seed");
  }
  return cfg;
}

ClusterConfig parse_clusters(const json& v, const std::string& origin) {
  if (!v.is_object()) fail(origin, "'clusters' must be an object");
  require_keys(v,
               {"kmeans_k", "kmeans_seed", "kmeans_max_iters", "alpha",
                "min_emoji_count", "merge2", "merge3"},
               origin, "'clusters'");
  ClusterConfig cfg;
  if (v.contains("kmeans_k")) {
    cfg.kmeans_k = as_int(v["kmeans_k"], origin, "clusters.kmeans_k");
  }
  if (v.contains("kmeans_seed")) {
    cfg.kmeans_seed = as_seed(v["kmeans_seed"], origin, "clusters.kmeans_seed");
  }
  if (v.contains("kmeans_max_iters")) {
    cfg.kmeans_max_iters =
        as_int(v["kmeans_max_iters"], origin, "clusters.kmeans_max_iters");
  }
  if (v.contains("alpha")) {
    cfg.alpha = as_number(v["alpha"], origin, "clusters.alpha");
  }
  if (v.contains("min_emoji_count")) {
    cfg.min_emoji_count =
        as_int64(v["min_emoji_count"], origin, "clusters.min_emoji_count");
  }
  if (v.contains("merge2")) {
    cfg.merge2 = parse_merge_map(v["merge2"], origin, "clusters.merge2");
  }
  if (v.contains("merge3")) {
    cfg.merge3 = parse_merge_map(v["merge3"], origin, "clusters.merge3");
  }
  return cfg;
}

TrainConfig parse_train(const json& v, const std::string& origin) {
  if (!v.is_object()) fail(origin, "'train' must be an object");
  require_keys(v,
               {"max_epochs", "patience", "min_delta", "learning_rate",
                "batch_size", "restore_best"},
               origin, "'train'");
  TrainConfig cfg;
  if (v.contains("max_epochs")) {
    cfg.max_epochs = as_int(v["max_epochs"], origin, "train.max_epochs");
  }
  if (v.contains("patience")) {
    cfg.patience = as_int(v["patience"], origin, "train.patience");
  }
  if (v.contains("min_delta")) {
    cfg.min_delta = as_number(v["min_delta"], origin, "train.min_delta");
  }
  if (v.contains("learning_rate")) {
    cfg.learning_rate =
        as_number(v["learning_rate"], origin, "train.learning_rate");
  }
  if (v.contains("batch_size")) {
    cfg.batch_size = as_int(v["batch_size"], origin, "train.batch_size");
  }
  if (v.contains("restore_best")) {
    cfg.restore_best = as_bool(v["restore_best"], origin, "train.restore_best");
  }
  return cfg;
}

TargetSchema parse_schema(const json& v, const std::string& origin,
                          const std::string& where) {
  if (!v.is_object()) fail(origin, where + " must be an object");
  require_keys(v,
               {"text_column", "label_column", "has_header", "separator",
                "label_map", "labels"},
               origin, where);
  TargetSchema schema;
  schema.text_column = as_string(member(v, "text_column", origin), origin,
                                 where + ".text_column");
  schema.label_column = as_string(member(v, "label_column", origin), origin,
                                  where + ".label_column");
  if (v.contains("has_header")) {
    schema.has_header = as_bool(v["has_header"], origin, where + ".has_header");
  }
  if (v.contains("separator")) {
    const std::string sep =
        as_string(v["separator"], origin, where + ".separator");
    if (sep == "tab") {
      schema.separator = '\t';
    } else if (sep == "comma") {
      schema.separator = ',';
    } else {
      fail(origin, where + ".separator must be \"tab\" or \"comma\"");
    }
  }
  if (v.contains("label_map")) {
    if (!v["label_map"].is_object()) {
      fail(origin, where + ".label_map must be an object");
    }
    for (auto it = v["label_map"].begin(); it != v["label_map"].end(); ++it) {
      schema.label_map[it.key()] =
          as_string(*it, origin, where + ".label_map values");
    }
  }
  if (v.contains("labels")) {
    if (!v["labels"].is_array()) {
      fail(origin, where + ".labels must be an array");
    }
    for (const auto& entry : v["labels"]) {
      schema.labels.push_back(as_string(entry, origin, where + ".labels"));
    }
  }
  return schema;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text,
                              const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": invalid JSON: " + e.what());
  }
  if (!root.is_object()) fail(origin, "config root must be an object");
  require_keys(root,
               {"out_dir", "master_seed", "n_seeds", "jobs", "dev_fraction",
                "corpora", "lexicons", "st_languages", "embedding", "clusters",
                "source_tasks", "ep_top_k", "cap_per_class", "model", "train",
                "condition", "target_tasks"},
               origin, "config");

  ExperimentConfig cfg;
  if (root.contains("out_dir")) {
    cfg.out_dir = as_string(root["out_dir"], origin, "out_dir");
  }
  if (root.contains("master_seed")) {
    cfg.master_seed = as_seed(root["master_seed"], origin, "master_seed");
  }
  if (root.contains("n_seeds")) {
    cfg.n_seeds = as_int(root["n_seeds"], origin, "n_seeds");
  }
  if (root.contains("jobs")) cfg.jobs = as_int(root["jobs"], origin, "jobs");
  if (root.contains("dev_fraction")) {
    cfg.dev_fraction = as_number(root["dev_fraction"], origin, "dev_fraction");
  }

  const json& corpora = member(root, "corpora", origin);
  if (!corpora.is_object()) fail(origin, "'corpora' must be an object");
  for (auto it = corpora.begin(); it != corpora.end(); ++it) {
    cfg.corpora[it.key()] = as_string(*it, origin, "corpora values");
  }
  if (root.contains("lexicons")) {
    if (!root["lexicons"].is_object()) {
      fail(origin, "'lexicons' must be an object");
    }
    for (auto it = root["lexicons"].begin(); it != root["lexicons"].end();
         ++it) {
      cfg.lexicons[it.key()] = as_string(*it, origin, "lexicons values");
    }
  }
  const json& langs = member(root, "st_languages", origin);
  if (!langs.is_array()) fail(origin, "'st_languages' must be an array");
  for (const auto& entry : langs) {
    cfg.st_languages.push_back(as_string(entry, origin, "st_languages"));
  }

  if (root.contains("embedding")) {
    cfg.embedding = parse_embedding(root["embedding"], origin);
  }
  if (root.contains("clusters")) {
    cfg.clusters = parse_clusters(root["clusters"], origin);
  }
  const json& tasks = member(root, "source_tasks", origin);
  if (!tasks.is_array()) fail(origin, "'source_tasks' must be an array");
  for (const auto& entry : tasks) {
    cfg.source_tasks.push_back(as_string(entry, origin, "source_tasks"));
  }
  if (root.contains("ep_top_k")) {
    cfg.ep_top_k = as_int(root["ep_top_k"], origin, "ep_top_k");
  }
  if (root.contains("cap_per_class")) {
    cfg.cap_per_class = as_int(root["cap_per_class"], origin, "cap_per_class");
  }
  if (root.contains("model")) {
    const json& m = root["model"];
    if (!m.is_object()) fail(origin, "'model' must be an object");
    require_keys(m, {"hidden", "init_from_embeddings"}, origin, "'model'");
    if (m.contains("hidden")) {
      cfg.model.hidden = as_int(m["hidden"], origin, "model.hidden");
    }
    if (m.contains("init_from_embeddings")) {
      cfg.model.init_from_embeddings =
          as_bool(m["init_from_embeddings"], origin,
                  "model.init_from_embeddings");
    }
  }
  if (root.contains("train")) cfg.train = parse_train(root["train"], origin);
  if (root.contains("condition")) {
    const json& c = root["condition"];
    if (!c.is_object()) fail(origin, "'condition' must be an object");
    require_keys(c, {"emoji_high", "balanced_min"}, origin, "'condition'");
    if (c.contains("emoji_high")) {
      cfg.condition.emoji_high =
          as_number(c["emoji_high"], origin, "condition.emoji_high");
    }
    if (c.contains("balanced_min")) {
      cfg.condition.balanced_min =
          as_number(c["balanced_min"], origin, "condition.balanced_min");
    }
  }

  const json& tts = member(root, "target_tasks", origin);
  if (!tts.is_array()) fail(origin, "'target_tasks' must be an array");
  for (std::size_t i = 0; i < tts.size(); ++i) {
    const json& t = tts[i];
    const std::string where = "target_tasks[" + std::to_string(i) + "]";
    if (!t.is_object()) fail(origin, where + " must be an object");
    require_keys(t, {"name", "train", "test", "schema"}, origin, where);
    TargetTaskConfig tt;
    tt.name = as_string(member(t, "name", origin), origin, where + ".name");
    tt.train_path =
        as_string(member(t, "train", origin), origin, where + ".train");
    tt.test_path =
        as_string(member(t, "test", origin), origin, where + ".test");
    tt.schema = parse_schema(member(t, "schema", origin), origin,
                             where + ".schema");
    cfg.target_tasks.push_back(std::move(tt));
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  ExperimentConfig cfg = parse_config(read_file(path), path);
  cfg.validate();
  return cfg;
}

void ExperimentConfig::validate() const {
  if (out_dir.empty()) throw ConfigError("config: out_dir must be non-empty");
  if (n_seeds < 2) throw ConfigError("config: n_seeds must be at least 2");
  if (jobs < 1) throw ConfigError("config: jobs must be positive");
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw ConfigError("config: dev_fraction must lie in (0, 1)");
  }
  if (st_languages.empty()) {
    throw ConfigError("config: st_languages must be non-empty");
  }
  for (const auto& lang : st_languages) {
    if (corpora.count(lang) == 0) {
      throw ConfigError("config: st_languages entry '" + lang +
                        "' has no corpus");
    }
  }
  for (const auto& [lang, path] : corpora) {
    if (!file_exists(path)) {
      throw ConfigError("config: corpus for '" + lang + "' not found: " + path);
    }
  }
  embedding.validate();
  train.validate();
  if (model.hidden < 1) {
    throw ConfigError("config: model.hidden must be positive");
  }
  if (source_tasks.empty()) {
    throw ConfigError("config: source_tasks must be non-empty");
  }
  std::set<std::string> seen;
  for (const auto& task : source_tasks) {
    if (std::find(kSourceTaskNames.begin(), kSourceTaskNames.end(), task) ==
        kSourceTaskNames.end()) {
      throw ConfigError("config: unknown source task '" + task + "'");
    }
    if (!seen.insert(task).second) {
      throw ConfigError("config: duplicate source task '" + task + "'");
    }
  }
  if (seen.count("ep") != 0 && ep_top_k < 1) {
    throw ConfigError("config: ep_top_k must be positive");
  }
  if (cap_per_class < 0) {
    throw ConfigError("config: cap_per_class must be non-negative");
  }
  if (clusters.kmeans_k < 1) {
    throw ConfigError("config: clusters.kmeans_k must be positive");
  }
  if (clusters.kmeans_max_iters < 1) {
    throw ConfigError("config: clusters.kmeans_max_iters must be positive");
  }
  if (clusters.alpha < 0.0) {
    throw ConfigError("config: clusters.alpha must be non-negative");
  }
  if (clusters.min_emoji_count < 1) {
    throw ConfigError("config: clusters.min_emoji_count must be positive");
  }
  auto check_merge = [&](const std::map<int, std::optional<std::string>>& m,
                         const std::string& name) {
    if (m.empty()) {
      throw ConfigError("config: clusters." + name +
                        " is required by the selected source tasks");
    }
    bool any_kept = false;
    for (const auto& [idx, cls] : m) {
      if (idx < 0 || idx >= clusters.kmeans_k) {
        throw ConfigError("config: clusters." + name + " references cluster " +
                          std::to_string(idx) + " outside 0.." +
                          std::to_string(clusters.kmeans_k - 1));
      }
      if (cls.has_value()) any_kept = true;
    }
    if (!any_kept) {
      throw ConfigError("config: clusters." + name + " drops every cluster");
    }
  };
  if (seen.count("kmeans2") != 0) check_merge(clusters.merge2, "merge2");
  if (seen.count("kmeans3") != 0) check_merge(clusters.merge3, "merge3");
  if (seen.count("pmi-swear") != 0) {
    for (const auto& lang : st_languages) {
      if (lexicons.count(lang) == 0) {
        throw ConfigError("config: pmi-swear needs a lexicon for '" + lang +
                          "'");
      }
    }
  }
  for (const auto& [lang, path] : lexicons) {
    if (!file_exists(path)) {
      throw ConfigError("config: lexicon for '" + lang +
                        "' not found: " + path);
    }
  }
  if (!(condition.emoji_high > 0.0 && condition.emoji_high < 1.0)) {
    throw ConfigError("config: condition.emoji_high must lie in (0, 1)");
  }
  if (!(condition.balanced_min > 0.0 && condition.balanced_min <= 0.5)) {
    throw ConfigError("config: condition.balanced_min must lie in (0, 0.5]");
  }
  if (target_tasks.empty()) {
    throw ConfigError("config: target_tasks must be non-empty");
  }
  std::set<std::string> tt_names;
  for (const auto& tt : target_tasks) {
    if (tt.name.empty()) {
      throw ConfigError("config: target task names must be non-empty");
    }
    if (!tt_names.insert(tt.name).second) {
      throw ConfigError("config: duplicate target task '" + tt.name + "'");
    }
    if (!file_exists(tt.train_path)) {
      throw ConfigError("config: target task '" + tt.name +
                        "' train file not found: " + tt.train_path);
    }
    if (!file_exists(tt.test_path)) {
      throw ConfigError("config: target task '" + tt.name +
                        "' test file not found: " + tt.test_path);
    }
    tt.schema.validate();
  }
}

std::string config_hash(const ExperimentConfig& config) {
  json j;
  j["master_seed"] = config.master_seed;
  j["n_seeds"] = config.n_seeds;
  j["dev_fraction"] = config.dev_fraction;
  j["st_languages"] = config.st_languages;
  j["embedding"] = {{"dim", config.embedding.dim},
                    {"window", config.embedding.window},
                    {"negative_samples", config.embedding.negative_samples},
                    {"epochs", config.embedding.epochs},
                    {"learning_rate", config.embedding.learning_rate},
                    {"min_count", config.embedding.min_count},
                    {"emoji_min_count", config.embedding.emoji_min_count},
                    {"unigram_power", config.embedding.unigram_power},
                    {"seed", config.embedding.seed}};
  json merge2 = json::object();
  for (const auto& [idx, cls] : config.clusters.merge2) {
    merge2[std::to_string(idx)] = cls.has_value() ? json(*cls) : json(nullptr);
  }
  json merge3 = json::object();
  for (const auto& [idx, cls] : config.clusters.merge3) {
    merge3[std::to_string(idx)] = cls.has_value() ? json(*cls) : json(nullptr);
  }
  j["clusters"] = {{"kmeans_k", config.clusters.kmeans_k},
                   {"kmeans_seed", config.clusters.kmeans_seed},
                   {"kmeans_max_iters", config.clusters.kmeans_max_iters},
                   {"alpha", config.clusters.alpha},
                   {"min_emoji_count", config.clusters.min_emoji_count},
                   {"merge2", merge2},
                   {"merge3", merge3}};
  j["source_tasks"] = config.source_tasks;
  j["ep_top_k"] = config.ep_top_k;
  j["cap_per_class"] = config.cap_per_class;
  j["model"] = {{"hidden", config.model.hidden},
                {"init_from_embeddings", config.model.init_from_embeddings}};
  j["train"] = {{"max_epochs", config.train.max_epochs},
                {"patience", config.train.patience},
                {"min_delta", config.train.min_delta},
                {"learning_rate", config.train.learning_rate},
                {"batch_size", config.train.batch_size},
                {"restore_best", config.train.restore_best}};
  j["condition"] = {{"emoji_high", config.condition.emoji_high},
                    {"balanced_min", config.condition.balanced_min}};
  json tts = json::array();
  for (const auto& tt : config.target_tasks) {
    tts.push_back({{"name", tt.name}});
  }
  j["target_tasks"] = tts;
  return hash_hex(fnv1a64(j.dump()));
}

}  // namespace emodist
