// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/eval.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "emodist/errors.hpp"
#include "emodist/io.hpp"
#include "emodist/rng.hpp"

namespace emodist {

using nlohmann::json;

std::map<std::string, double> per_class_f1(
    const std::vector<std::string>& gold,
    const std::vector<std::string>& pred,
    const std::vector<std::string>& labels) {
  if (gold.empty() || gold.size() != pred.size())
    throw DataError("macro_f1 needs equal-length, non-empty gold and pred");
  std::map<std::string, int> label_index;
  for (std::size_t i = 0; i < labels.size(); ++i)
    label_index.emplace(labels[i], static_cast<int>(i));
  const auto n = labels.size();
  std::vector<std::int64_t> tp(n, 0), fp(n, 0), fn(n, 0);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto g = label_index.find(gold[i]);
    const auto p = label_index.find(pred[i]);
    if (g == label_index.end())
      throw DataError("gold label '" + gold[i] + "' outside the label set");
    if (p == label_index.end())
      throw DataError("predicted label '" + pred[i] +
                      "' outside the label set");
    if (g->second == p->second) {
      ++tp[static_cast<std::size_t>(g->second)];
    } else {
      ++fn[static_cast<std::size_t>(g->second)];
      ++fp[static_cast<std::size_t>(p->second)];
    }
  }
  std::map<std::string, double> f1;
  for (std::size_t c = 0; c < n; ++c) {
    const double precision =
        tp[c] + fp[c] == 0
            ? 0.0
            : static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fp[c]);
    const double recall =
        tp[c] + fn[c] == 0
            ? 0.0
            : static_cast<double>(tp[c]) / static_cast<double>(tp[c] + fn[c]);
    f1[labels[c]] = precision + recall == 0.0
                        ? 0.0
                        : 2.0 * precision * recall / (precision + recall);
  }
  return f1;
}

double macro_f1(const std::vector<std::string>& gold,
                const std::vector<std::string>& pred,
                const std::vector<std::string>& labels) {
  if (labels.empty()) throw DataError("macro_f1 needs a non-empty label set");
  const auto f1 = per_class_f1(gold, pred, labels);
  double total = 0.0;
  for (const auto& [label, score] : f1) total += score;
  return total / static_cast<double>(labels.size());
}

namespace {

RunResult evaluate_run(const Checkpoint& ckpt, const TaskDataset& test,
                       const std::string& st_name, const std::string& tt_name,
                       std::uint64_t seed, int seed_index) {
  std::vector<std::string> gold, pred;
  gold.reserve(test.instances.size());
  pred.reserve(test.instances.size());
  for (const auto& inst : test.instances) {
    gold.push_back(inst.label);
    const int p = predict(inst.tokens, ckpt.encoder, ckpt.head);
    pred.push_back(ckpt.labels[static_cast<std::size_t>(p)]);
  }
  RunResult r;
  r.st_name = st_name;
  r.tt_name = tt_name;
  r.seed = seed;
  r.seed_index = seed_index;
  r.per_class_f1 = per_class_f1(gold, pred, test.labels);
  r.macro_f1 = macro_f1(gold, pred, test.labels);
  r.epochs_trained = ckpt.epochs_trained;
  r.best_epoch = ckpt.best_epoch;
  return r;
}

}  // namespace

std::vector<RunResult> run_experiment(const TaskBundle* st,
                                      const TaskBundle& tt,
                                      const ModelVocab& vocab,
                                      const RunOptions& options,
                                      const std::string& st_name,
                                      const std::string& tt_name) {
  if (options.n_seeds < 2) throw ConfigError("n_seeds must be >= 2");
  options.train.validate();
  if (tt.test.instances.empty())
    throw DataError("target task '" + tt_name + "' has no test split");
  if (options.init_table != nullptr) {
    if (options.init_table->dim() != options.dims.dim)
      throw ConfigError("warm-start table width does not match model dim");
    const ModelVocab table_vocab =
        ModelVocab::from_embedding_vocab(options.init_table->vocab);
    if (table_vocab.content_hash() != vocab.content_hash())
      throw ConfigError(
          "warm-start table vocabulary does not match the model vocabulary");
  }

  std::vector<RunResult> results(static_cast<std::size_t>(options.n_seeds));
  auto run_one = [&](int i) {
    const std::uint64_t run_seed =
        derive_seed(options.master_seed, static_cast<std::uint64_t>(i));
    const std::uint64_t enc_seed = derive_seed(run_seed, 1);
    const std::uint64_t st_seed = derive_seed(run_seed, 2);
    const std::uint64_t tt_seed = derive_seed(run_seed, 3);

    Encoder encoder =
        options.init_table != nullptr
            ? Encoder::from_embedding_table(*options.init_table,
                                            options.dims.hidden, enc_seed)
            : Encoder::random_init(vocab, options.dims, enc_seed);
    TrainConfig tt_config = options.train;
    tt_config.seed = tt_seed;
    Checkpoint ckpt;
    if (st != nullptr) {
      TrainConfig st_config = options.train;
      st_config.seed = st_seed;
      const Checkpoint st_ckpt =
          train(st->train, st->dev, std::move(encoder), st_config, st_name);
      ckpt = transfer(st_ckpt, tt.train, tt.dev, tt_config, tt_name);
    } else {
      ckpt = train(tt.train, tt.dev, std::move(encoder), tt_config, tt_name);
    }
    results[static_cast<std::size_t>(i)] =
        evaluate_run(ckpt, tt.test, st ? st_name : "baseline", tt_name,
                     run_seed, i);
  };

  const int jobs = std::max(1, std::min(options.jobs, options.n_seeds));
  if (jobs == 1) {
    for (int i = 0; i < options.n_seeds; ++i) run_one(i);
    return results;
  }
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= options.n_seeds) return;
        try {
          run_one(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

namespace {

std::pair<double, double> mean_se(const std::vector<double>& xs) {
  const auto n = static_cast<double>(xs.size());
  double mean = 0.0;
  for (const double x : xs) mean += x;
  mean /= n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const double x : xs) ss += (x - mean) * (x - mean);
  const double sample_sd = std::sqrt(ss / (n - 1.0));
  return {mean, sample_sd / std::sqrt(n)};
}

}  // namespace

AggregateCell aggregate(const std::vector<RunResult>& results,
                        const std::vector<RunResult>& baseline) {
  if (results.empty() || baseline.empty())
    throw DataError("aggregate needs non-empty result lists");
  for (const auto& r : results)
    if (r.tt_name != baseline.front().tt_name)
      throw DataError("aggregate: target task mismatch ('" + r.tt_name +
                      "' vs '" + baseline.front().tt_name + "')");
  AggregateCell cell;
  cell.st_name = results.front().st_name;
  cell.tt_name = results.front().tt_name;
  cell.n_seeds = static_cast<int>(results.size());
  for (const auto& r : results) cell.scores.push_back(r.macro_f1);
  std::vector<double> base_scores;
  for (const auto& r : baseline) base_scores.push_back(r.macro_f1);
  std::tie(cell.mean, cell.se) = mean_se(cell.scores);
  std::tie(cell.baseline_mean, cell.baseline_se) = mean_se(base_scores);
  cell.delta = cell.mean - cell.baseline_mean;
  cell.equivalent = std::abs(cell.delta) <= cell.se + cell.baseline_se;
  return cell;
}

ConditionInfo condition_info(const DatasetStats& tt_stats,
                             const ConditionThresholds& thresholds,
                             const std::vector<std::string>& st_languages) {
  ConditionInfo info;
  info.emoji_content = tt_stats.emoji_content;
  info.emoji_bucket =
      tt_stats.emoji_content >= thresholds.emoji_high ? "high" : "low";
  info.minority_fraction = tt_stats.minority_fraction;
  info.balance_bucket = tt_stats.minority_fraction >= thresholds.balanced_min
                            ? "balanced"
                            : "unbalanced";
  info.st_languages = st_languages;
  return info;
}

namespace {

json cell_to_json(const AggregateCell& cell) {
  json j;
  j["st"] = cell.st_name;
  j["tt"] = cell.tt_name;
  j["n_seeds"] = cell.n_seeds;
  j["mean_macro_f1"] = cell.mean;
  j["se"] = cell.se;
  j["baseline_mean"] = cell.baseline_mean;
  j["baseline_se"] = cell.baseline_se;
  j["delta"] = cell.delta;
  j["equivalent"] = cell.equivalent;
  j["scores"] = cell.scores;
  return j;
}

json run_to_json(const RunResult& r) {
  json j;
  j["st"] = r.st_name;
  j["tt"] = r.tt_name;
  j["seed"] = r.seed;
  j["seed_index"] = r.seed_index;
  j["macro_f1"] = r.macro_f1;
  j["per_class_f1"] = r.per_class_f1;
  j["epochs_trained"] = r.epochs_trained;
  j["best_epoch"] = r.best_epoch;
  return j;
}

}  // namespace

std::string ExperimentReport::to_json() const {
  json doc;
  doc["provenance"] = provenance;
  doc["targets"] = json::array();
  for (const auto& block : blocks) {
    json b;
    b["tt"] = block.tt_name;
    b["condition"]["emoji_content"] = block.condition.emoji_content;
    b["condition"]["emoji_bucket"] = block.condition.emoji_bucket;
    b["condition"]["minority_fraction"] = block.condition.minority_fraction;
    b["condition"]["balance_bucket"] = block.condition.balance_bucket;
    b["condition"]["st_languages"] = block.condition.st_languages;
    b["baseline"] = cell_to_json(block.baseline);
    b["cells"] = json::array();
    for (const auto& cell : block.cells) b["cells"].push_back(cell_to_json(cell));
    b["runs"] = json::array();
    for (const auto& run : block.runs) b["runs"].push_back(run_to_json(run));
    doc["targets"].push_back(std::move(b));
  }
  return doc.dump(2) + "\n";
}

std::string ExperimentReport::to_tsv() const {
  std::ostringstream out;
  out.precision(17);
  out << "tt\tst\tseed_index\tseed\tmacro_f1\tepochs_trained\tbest_epoch\n";
  for (const auto& block : blocks)
    for (const auto& run : block.runs)
      out << run.tt_name << '\t' << run.st_name << '\t' << run.seed_index
          << '\t' << run.seed << '\t' << run.macro_f1 << '\t'
          << run.epochs_trained << '\t' << run.best_epoch << '\n';
  return out.str();
}

std::string ExperimentReport::to_text() const {
  std::ostringstream out;
  for (const auto& block : blocks) {
    out << "== " << block.tt_name << " ==\n";
    out << "  emoji content " << block.condition.emoji_content << " ("
        << block.condition.emoji_bucket << "), minority fraction "
        << block.condition.minority_fraction << " ("
        << block.condition.balance_bucket << ")";
    if (!block.condition.st_languages.empty()) {
      out << ", st languages:";
      for (const auto& lang : block.condition.st_languages) out << ' ' << lang;
    }
    out << '\n';
    auto row = [&](const AggregateCell& cell) {
      out << "  " << cell.st_name << ": " << cell.mean << " +/- " << cell.se;
      if (cell.st_name != "baseline") {
        out << "  (delta " << (cell.delta >= 0 ? "+" : "") << cell.delta
            << (cell.equivalent ? ", equivalent to baseline" : "") << ")";
      }
      out << '\n';
    };
    row(block.baseline);
    for (const auto& cell : block.cells) row(cell);
    out << '\n';
  }
  return out.str();
}

void save_report(const ExperimentReport& report, const std::string& dir) {
  write_file(dir + "/report.json", report.to_json());
  write_file(dir + "/report.tsv", report.to_tsv());
  write_file(dir + "/report.txt", report.to_text());
}

}  // namespace emodist
