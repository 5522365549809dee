// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/pipeline.hpp"

#include <algorithm>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "emodist/clusters.hpp"
#include "emodist/embeddings.hpp"
#include "emodist/errors.hpp"
#include "emodist/eval.hpp"
#include "emodist/io.hpp"
#include "emodist/kmeans.hpp"
#include "emodist/rng.hpp"
#include "emodist/tasks.hpp"

namespace emodist {

using nlohmann::json;

namespace {

bool selected(const ExperimentConfig& config, const std::string& task) {
  return std::find(config.source_tasks.begin(), config.source_tasks.end(),
                   task) != config.source_tasks.end();
}

std::uint64_t stage_seed(const ExperimentConfig& config,
                         const std::string& tag) {
  return derive_seed(config.master_seed, fnv1a64(tag));
}

std::vector<Comment> read_st_store(const ExperimentConfig& config) {
  const std::string path = st_store_path(config);
  if (!file_exists(path)) {
    throw DataError("comment store not found (run preprocess first): " + path);
  }
  return read_comment_store(path);
}

EmbeddingTable read_embeddings(const ExperimentConfig& config) {
  const std::string path = embeddings_path(config);
  if (!file_exists(path)) {
    throw DataError("embeddings not found (run embed first): " + path);
  }
  return load_embeddings(path);
}

ClusterSpec read_spec(const ExperimentConfig& config, const std::string& name) {
  const std::string path = spec_path(config, name);
  if (!file_exists(path)) {
    throw DataError("cluster spec not found (run cluster first): " + path);
  }
  return load_cluster_spec(path);
}

TaskDataset read_st_dataset(const ExperimentConfig& config,
                            const std::string& name) {
  const std::string path = st_dataset_path(config, name);
  if (!file_exists(path)) {
    throw DataError("source dataset not found (run build-st first): " + path);
  }
  return load_dataset(path);
}

}  // namespace

std::string store_path(const ExperimentConfig& config,
                       const std::string& lang) {
  return config.out_dir + "/corpus." + lang + ".jsonl";
}

std::string st_store_path(const ExperimentConfig& config) {
  return config.out_dir + "/corpus.st.jsonl";
}

std::string embeddings_path(const ExperimentConfig& config) {
  return config.out_dir + "/embeddings.txt";
}

std::string spec_path(const ExperimentConfig& config, const std::string& name) {
  return config.out_dir + "/clusters/" + name + ".json";
}

std::string st_dataset_path(const ExperimentConfig& config,
                            const std::string& name) {
  return config.out_dir + "/st/" + name + ".tsv";
}

int cmd_preprocess(const ExperimentConfig& config) {
  config.validate();
  json errors = json::object();
  int n_errors = 0;
  std::map<std::string, std::vector<Comment>> stores;
  for (const auto& [lang, path] : config.corpora) {
    const CorpusReadResult raw = read_jsonl_corpus(path);
    json list = json::array();
    for (const auto& e : raw.errors) {
      list.push_back({{"line", e.line_no}, {"message", e.message}});
      ++n_errors;
    }
    errors[lang] = std::move(list);
    PreprocessResult pre = preprocess_corpus(raw.comments);
    write_comment_store(store_path(config, lang), pre.comments);
    stores[lang] = std::move(pre.comments);
  }
  std::vector<Comment> st;
  for (const auto& lang : config.st_languages) {
    const auto& part = stores.at(lang);
    st.insert(st.end(), part.begin(), part.end());
  }
  write_comment_store(st_store_path(config), st);
  write_file(config.out_dir + "/preprocess_errors.json", errors.dump(2) + "\n");
  return n_errors;
}

void cmd_embed(const ExperimentConfig& config) {
  config.validate();
  const std::vector<Comment> comments = read_st_store(config);
  const EmbeddingTable table = train_cbow(comments, config.embedding);
  save_embeddings(table, embeddings_path(config));
}

void cmd_cluster(const ExperimentConfig& config) {
  config.validate();
  const bool want_kmeans =
      selected(config, "kmeans2") || selected(config, "kmeans3");
  const bool want_swear = selected(config, "pmi-swear");
  const bool want_target = selected(config, "pmi-target");
  if (!want_kmeans && !want_swear && !want_target) return;

  if (want_kmeans) {
    const std::vector<Comment> comments = read_st_store(config);
    const EmbeddingTable table = read_embeddings(config);
    const FrequencyTable freqs = build_frequency_table(comments);
    const auto vectors =
        emoji_vectors(table, freqs, config.clusters.min_emoji_count);
    const KMeansResult result =
        kmeans(vectors, config.clusters.kmeans_k, config.clusters.kmeans_seed,
               config.clusters.kmeans_max_iters);

    std::vector<int> sizes(static_cast<std::size_t>(result.k()), 0);
    for (const auto& [emoji, cluster] : result.assignment) {
      ++sizes[static_cast<std::size_t>(cluster)];
    }
    const auto tops = cluster_summary(result, table);
    std::ostringstream summary;
    summary.precision(17);
    summary << "k = " << result.k() << ", inertia = " << result.inertia
            << ", iterations = " << result.iterations << "\n";
    for (int c = 0; c < result.k(); ++c) {
      summary << "cluster " << c << " (" << sizes[static_cast<std::size_t>(c)]
              << " emojis):";
      for (const auto& token : tops[static_cast<std::size_t>(c)]) {
        summary << ' ' << token;
      }
      summary << '\n';
    }
    write_file(config.out_dir + "/clusters/kmeans_summary.txt", summary.str());

    if (selected(config, "kmeans2")) {
      save_cluster_spec(merge_clusters(result, config.clusters.merge2,
                                       "kmeans2"),
                        spec_path(config, "kmeans2"));
    }
    if (selected(config, "kmeans3")) {
      save_cluster_spec(merge_clusters(result, config.clusters.merge3,
                                       "kmeans3"),
                        spec_path(config, "kmeans3"));
    }
  }

  if (want_swear) {
    const std::vector<Comment> comments = read_st_store(config);
    SlurLexicon lexicon;
    for (const auto& lang : config.st_languages) {
      lexicon.terms[lang] = load_slur_terms(config.lexicons.at(lang));
    }
    PmiOptions options;
    options.alpha = config.clusters.alpha;
    options.min_emoji_count = config.clusters.min_emoji_count;
    save_cluster_spec(
        build_swear_clusters(comments, lexicon, options, "pmi-swear"),
        spec_path(config, "pmi-swear"));
  }

  if (want_target) {
    for (const auto& tt : config.target_tasks) {
      const TaskDataset train =
          load_target_task(tt.train_path, tt.schema, tt.name, Split::train);
      save_cluster_spec(
          build_target_clusters(train, config.clusters.alpha, "pmi-target"),
          spec_path(config, "pmi-target." + tt.name));
    }
  }
}

void cmd_build_st(const ExperimentConfig& config) {
  config.validate();
  const std::vector<Comment> comments = read_st_store(config);
  const FrequencyTable freqs = build_frequency_table(comments);

  auto emit_from_spec = [&](const std::string& spec_name,
                            const std::string& dataset_name) {
    const ClusterSpec spec = read_spec(config, spec_name);
    TaskDataset ds = emit_cluster_dataset(comments, spec, config.cap_per_class,
                                          stage_seed(config, "st:" + spec_name),
                                          dataset_name);
    std::map<std::string, std::string> provenance;
    provenance["scheme"] = spec.name;
    provenance["scheme_kind"] = provenance_name(spec.provenance);
    provenance["spec_hash"] =
        hash_hex(fnv1a64(read_file(spec_path(config, spec_name))));
    save_dataset(ds, st_dataset_path(config, spec_name), provenance);
  };

  for (const auto& task : config.source_tasks) {
    if (task == "ep") {
      const EmojiInventory inventory = top_k_emojis(freqs, config.ep_top_k);
      const TaskDataset ds =
          emit_ep_dataset(comments, inventory, config.cap_per_class,
                          stage_seed(config, "st:ep"), "ep");
      std::map<std::string, std::string> provenance;
      provenance["scheme"] = "ep";
      provenance["top_k"] = std::to_string(config.ep_top_k);
      provenance["inventory_size"] = std::to_string(inventory.size());
      save_dataset(ds, st_dataset_path(config, "ep"), provenance);
    } else if (task == "pmi-target") {
      for (const auto& tt : config.target_tasks) {
        emit_from_spec("pmi-target." + tt.name, "pmi-target");
      }
    } else {
      emit_from_spec(task, task);
    }
  }
}

void cmd_run(const ExperimentConfig& config) {
  config.validate();

  std::optional<EmbeddingTable> table;
  if (file_exists(embeddings_path(config))) {
    table = load_embeddings(embeddings_path(config));
  }
  if (config.model.init_from_embeddings && !table.has_value()) {
    throw DataError("init_from_embeddings requires trained embeddings (run "
                    "embed first)");
  }

  // Source bundles shared by every target task; pmi-target is per-target.
  std::map<std::string, TaskBundle> st_bundles;
  std::set<std::string> st_tokens;
  auto load_st = [&](const std::string& file_name) {
    const TaskDataset full = read_st_dataset(config, file_name);
    for (const auto& inst : full.instances) {
      st_tokens.insert(inst.tokens.begin(), inst.tokens.end());
    }
    auto [train, dev] =
        split_train_dev(full, config.dev_fraction,
                        stage_seed(config, "split:" + file_name));
    TaskBundle bundle;
    bundle.train = std::move(train);
    bundle.dev = std::move(dev);
    return bundle;
  };
  for (const auto& task : config.source_tasks) {
    if (task == "pmi-target") continue;
    st_bundles[task] = load_st(task);
  }
  std::map<std::string, TaskBundle> pmi_target_bundles;  // tt name → bundle
  if (selected(config, "pmi-target")) {
    for (const auto& tt : config.target_tasks) {
      pmi_target_bundles[tt.name] = load_st("pmi-target." + tt.name);
    }
  }

  RunOptions options;
  options.train = config.train;
  options.dims.dim = config.embedding.dim;
  options.dims.hidden = config.model.hidden;
  options.n_seeds = config.n_seeds;
  options.master_seed = config.master_seed;
  options.jobs = config.jobs;
  if (config.model.init_from_embeddings) options.init_table = &*table;

  ExperimentReport report;
  for (const auto& tt_config : config.target_tasks) {
    const TaskDataset tt_full = load_target_task(
        tt_config.train_path, tt_config.schema, tt_config.name, Split::train);
    TaskBundle tt;
    tt.test = load_target_task(tt_config.test_path, tt_config.schema,
                               tt_config.name, Split::test);
    const DatasetStats stats = dataset_stats(tt_full);
    std::tie(tt.train, tt.dev) =
        split_train_dev(tt_full, config.dev_fraction,
                        stage_seed(config, "split:tt:" + tt_config.name));

    // Warm-started encoders must keep the table's row order; otherwise the
    // vocabulary is the union of source and target tokens so target-only
    // words get trainable rows in every leg.
    ModelVocab vocab;
    if (config.model.init_from_embeddings) {
      vocab = ModelVocab::from_embedding_vocab(table->vocab);
    } else {
      std::set<std::string> tokens = st_tokens;
      for (const auto& inst : tt_full.instances) {
        tokens.insert(inst.tokens.begin(), inst.tokens.end());
      }
      vocab = ModelVocab::from_tokens(
          std::vector<std::string>(tokens.begin(), tokens.end()));
    }

    ExperimentReport::TtBlock block;
    block.tt_name = tt_config.name;
    block.condition =
        condition_info(stats, config.condition, config.st_languages);
    const std::vector<RunResult> baseline_runs = run_experiment(
        nullptr, tt, vocab, options, "baseline", tt_config.name);
    block.baseline = aggregate(baseline_runs, baseline_runs);
    block.runs = baseline_runs;
    for (const auto& task : config.source_tasks) {
      const TaskBundle& st = task == "pmi-target"
                                 ? pmi_target_bundles.at(tt_config.name)
                                 : st_bundles.at(task);
      const std::vector<RunResult> runs =
          run_experiment(&st, tt, vocab, options, task, tt_config.name);
      block.cells.push_back(aggregate(runs, baseline_runs));
      block.runs.insert(block.runs.end(), runs.begin(), runs.end());
    }
    report.blocks.push_back(std::move(block));
  }

  report.provenance["config_hash"] = config_hash(config);
  report.provenance["master_seed"] = std::to_string(config.master_seed);
  report.provenance["n_seeds"] = std::to_string(config.n_seeds);
  report.provenance["embeddings"] =
      table.has_value()
          ? hash_hex(fnv1a64(read_file(embeddings_path(config))))
          : "none";
  for (const auto& task : config.source_tasks) {
    if (task == "ep") continue;
    if (task == "pmi-target") {
      for (const auto& tt : config.target_tasks) {
        const std::string name = "pmi-target." + tt.name;
        report.provenance["spec:" + name] =
            hash_hex(fnv1a64(read_file(spec_path(config, name))));
      }
    } else {
      report.provenance["spec:" + task] =
          hash_hex(fnv1a64(read_file(spec_path(config, task))));
    }
  }
  save_report(report, config.out_dir);
}

void cmd_report(const ExperimentConfig& config, std::ostream& out) {
  const std::string path = config.out_dir + "/report.txt";
  if (!file_exists(path)) {
    throw DataError("report not found (run the experiment first): " + path);
  }
  out << read_file(path);
}

}  // namespace emodist
