// Apache License, Version 2.0, refer to LICENSE.txt
//
// Generates a self-contained demo world: a raw emoji-bearing corpus, a slur
// lexicon, two target tasks (one emoji-rich, one emoji-poor) and a pipeline
// config wired to them, so the full experiment runs without external data.
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "emodist/io.hpp"
#include "emodist/rng.hpp"
#include "emodist/synth.hpp"

using nlohmann::json;

namespace {

void write_raw_corpus(const std::vector<emodist::RawComment>& comments,
                      const std::string& path) {
  std::string body;
  for (const auto& c : comments) {
    json row;
    row["id"] = c.id;
    row["text"] = c.text;
    row["lang"] = c.lang;
    body += row.dump() + "\n";
  }
  emodist::write_file(path, body);
}

json demo_config(const std::string& dir) {
  json cfg;
  cfg["out_dir"] = dir + "/out";
  cfg["master_seed"] = 1;
  cfg["n_seeds"] = 10;
  cfg["jobs"] = 1;
  cfg["dev_fraction"] = 0.1;
  cfg["corpora"] = {{"xx", dir + "/corpus.xx.jsonl"}};
  cfg["lexicons"] = {{"xx", dir + "/slurs.xx.txt"}};
  cfg["st_languages"] = {"xx"};
  cfg["embedding"] = {{"dim", 50},        {"window", 5},
                      {"negative_samples", 5}, {"epochs", 5},
                      {"learning_rate", 0.05}, {"min_count", 2},
                      {"emoji_min_count", 50}, {"seed", 7}};
  cfg["clusters"] = {{"kmeans_k", 2},
                     {"kmeans_seed", 11},
                     {"alpha", 1.0},
                     {"min_emoji_count", 50},
                     {"merge2", {{"0", "c0"}, {"1", "c1"}}},
                     {"merge3", json::object()}};
  cfg["source_tasks"] = {"ep", "kmeans2", "pmi-swear", "pmi-target"};
  cfg["ep_top_k"] = 64;
  cfg["cap_per_class"] = 1000;
  cfg["model"] = {{"hidden", 64}, {"init_from_embeddings", false}};
  cfg["train"] = {{"max_epochs", 10},    {"patience", 3},
                  {"min_delta", 0.01},   {"learning_rate", 0.1},
                  {"batch_size", 32},    {"restore_best", true}};
  cfg["condition"] = {{"emoji_high", 0.05}, {"balanced_min", 0.4}};
  json schema = {{"text_column", "text"},
                 {"label_column", "label"},
                 {"has_header", true},
                 {"separator", "tab"},
                 {"label_map", {{"pos", "positive"}, {"neg", "negative"}}},
                 {"labels", {"negative", "positive"}}};
  cfg["target_tasks"] = json::array();
  cfg["target_tasks"].push_back({{"name", "tt-high"},
                                 {"train", dir + "/tt-high.train.tsv"},
                                 {"test", dir + "/tt-high.test.tsv"},
                                 {"schema", schema}});
  cfg["target_tasks"].push_back({{"name", "tt-low"},
                                 {"train", dir + "/tt-low.train.tsv"},
                                 {"test", dir + "/tt-low.test.tsv"},
                                 {"schema", schema}});
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"generate the bundled synthetic demo world"};
  std::string dir;
  app.add_option("dir", dir, "output directory")->required();
  int n_comments = 6000;
  app.add_option("--comments", n_comments, "corpus size");
  std::uint64_t seed = 1;
  app.add_option("--seed", seed, "generator seed");
  CLI11_PARSE(app, argc, argv);

  try {
    emodist::SynthConfig world;

    emodist::StSynthOptions st;
    st.n_comments = n_comments;
    st.seed = emodist::derive_seed(seed, 1);
    write_raw_corpus(emodist::synth_st_corpus(world, st),
                     dir + "/corpus.xx.jsonl");
    emodist::synth_slur_lexicon(dir + "/slurs.xx.txt");

    emodist::TtSynthOptions high;
    high.n_instances = 600;
    high.emoji_rate = 0.95;
    high.seed = emodist::derive_seed(seed, 2);
    emodist::synth_target_file(world, high, dir + "/tt-high.train.tsv");
    high.n_instances = 400;
    high.seed = emodist::derive_seed(seed, 3);
    emodist::synth_target_file(world, high, dir + "/tt-high.test.tsv");

    emodist::TtSynthOptions low;
    low.n_instances = 600;
    low.emoji_rate = 0.01;
    low.seed = emodist::derive_seed(seed, 4);
    emodist::synth_target_file(world, low, dir + "/tt-low.train.tsv");
    low.n_instances = 400;
    low.seed = emodist::derive_seed(seed, 5);
    emodist::synth_target_file(world, low, dir + "/tt-low.test.tsv");

    emodist::write_file(dir + "/config.json", demo_config(dir).dump(2) + "\n");
    std::cout << "wrote demo world under " << dir << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
