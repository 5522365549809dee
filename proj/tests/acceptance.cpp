// Apache License, Version 2.0, refer to LICENSE.txt
//
// Acceptance suite: one self-contained check per release criterion, each
// printing a single PASS/FAIL line. Exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "emodist/clusters.hpp"
#include "emodist/config.hpp"
#include "emodist/corpus.hpp"
#include "emodist/embeddings.hpp"
#include "emodist/errors.hpp"
#include "emodist/eval.hpp"
#include "emodist/io.hpp"
#include "emodist/kmeans.hpp"
#include "emodist/model.hpp"
#include "emodist/pipeline.hpp"
#include "emodist/pmi.hpp"
#include "emodist/rng.hpp"
#include "emodist/synth.hpp"
#include "emodist/tasks.hpp"
#include "emodist/unicode.hpp"

using namespace emodist;
using nlohmann::json;

namespace {

int g_failures = 0;

struct Ctx {
  bool ok = true;
  std::string why;
  double seconds = 0.0;
  void require(bool cond, const std::string& message) {
    if (!cond && ok) {
      ok = false;
      why = message;
    }
  }
};

template <typename F>
void criterion(int id, const char* name, F body) {
  Ctx ctx;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(ctx);
  } catch (const std::exception& e) {
    ctx.ok = false;
    ctx.why = std::string("unexpected exception: ") + e.what();
  }
  ctx.seconds = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  std::cout << (ctx.ok ? "PASS" : "FAIL") << "  " << std::setw(2) << id << "  "
            << name << "  (" << std::fixed << std::setprecision(1)
            << ctx.seconds << "s)";
  if (!ctx.ok) std::cout << "  -- " << ctx.why;
  std::cout << "\n" << std::flush;
  if (!ctx.ok) ++g_failures;
}

std::string emoji_cp(char32_t cp) {
  const std::vector<char32_t> cps = {cp};
  return uni::encode_utf8(cps);
}

// -------------------------------------------------------------------------
// 1. PMI assignments vs a brute-force counting oracle on random corpora.

struct RandomCorpus {
  std::vector<Comment> comments;
  std::vector<std::string> pool;  // candidate emojis
};

RandomCorpus random_corpus(Rng& rng) {
  RandomCorpus out;
  const int n_emojis = 1 + static_cast<int>(rng.below(10));
  for (int i = 0; i < n_emojis; ++i)
    out.pool.push_back(emoji_cp(static_cast<char32_t>(0x1F600 + i)));
  const int n_comments = 20 + static_cast<int>(rng.below(181));
  for (int i = 0; i < n_comments; ++i) {
    Comment c;
    c.id = "c" + std::to_string(i);
    c.lang = "xx";
    const int n_words = 2 + static_cast<int>(rng.below(4));
    for (int w = 0; w < n_words; ++w)
      c.tokens.push_back("w" + std::to_string(rng.below(6)));
    if (rng.below(10) < 4) c.tokens.push_back("sw");
    for (const auto& e : out.pool) {
      if (rng.below(10) < 3) {
        c.emojis.push_back(e);
        if (rng.below(4) == 0) c.emojis.push_back(e);  // duplicate in comment
      }
    }
    out.comments.push_back(std::move(c));
  }
  // Guarantee at least one slur comment, one clean comment, one emoji.
  out.comments[0].tokens.push_back("sw");
  out.comments[1].tokens.assign({"w0", "w1"});
  out.comments[1].emojis.push_back(out.pool[0]);
  return out;
}

// argmax over classes of the raw incidence ratio n(e,c)/n(c), where n(c) is
// the column sum of the incidence table; scanned in `classes` order, later
// classes must be strictly greater. Exact integer cross products.
std::map<std::string, std::string> ratio_oracle(
    const std::map<std::string, std::vector<std::int64_t>>& joint,
    const std::vector<std::string>& classes) {
  std::vector<std::int64_t> col(classes.size(), 0);
  for (const auto& [emoji, row] : joint)
    for (std::size_t c = 0; c < classes.size(); ++c) col[c] += row[c];
  std::map<std::string, std::string> out;
  for (const auto& [emoji, row] : joint) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < classes.size(); ++c)
      if (row[c] * col[best] > row[best] * col[c]) best = c;
    out[emoji] = classes[best];
  }
  return out;
}

void check_pmi_oracle(Ctx& ctx) {
  Rng rng(101);
  SlurLexicon lexicon;
  lexicon.terms["xx"] = {"sw"};
  for (int round = 0; round < 100 && ctx.ok; ++round) {
    const RandomCorpus world = random_corpus(rng);

    // Slur/neutral comment incidence per emoji.
    std::map<std::string, std::vector<std::int64_t>> swear_joint;
    for (const auto& c : world.comments) {
      const bool slur = contains_slur(c, lexicon);
      const std::set<std::string> distinct(c.emojis.begin(), c.emojis.end());
      for (const auto& e : distinct) {
        auto& row = swear_joint.try_emplace(e, 2, 0).first->second;
        ++row[slur ? 0 : 1];
      }
    }
    // Slur must be STRICTLY greater, so scan order {neutral first} would
    // differ; mirror the documented rule: slur iff ratio strictly larger.
    std::map<std::string, std::string> swear_expected;
    {
      std::int64_t col_slur = 0, col_neutral = 0;
      for (const auto& [e, row] : swear_joint) {
        col_slur += row[0];
        col_neutral += row[1];
      }
      for (const auto& [e, row] : swear_joint) {
        swear_expected[e] =
            row[0] * col_neutral > row[1] * col_slur ? "slur" : "neutral";
      }
    }
    PmiOptions options;
    options.alpha = 0.0;
    options.min_emoji_count = 1;
    const ClusterSpec swear =
        build_swear_clusters(world.comments, lexicon, options);
    ctx.require(swear.assignment == swear_expected,
                "swear assignment diverged from the counting oracle in round " +
                    std::to_string(round));

    // The same comments as a two-label target task; instance incidence.
    TaskDataset tt;
    tt.name = "tt";
    tt.kind = DatasetKind::target;
    tt.split = Split::train;
    tt.labels = {"negative", "positive"};
    std::map<std::string, std::vector<std::int64_t>> target_joint;
    for (const auto& c : world.comments) {
      Instance inst;
      inst.tokens = c.tokens;
      inst.tokens.insert(inst.tokens.end(), c.emojis.begin(), c.emojis.end());
      inst.label = contains_slur(c, lexicon) ? "negative" : "positive";
      inst.origin_id = c.id;
      inst.had_emoji = !c.emojis.empty();
      const std::set<std::string> distinct(c.emojis.begin(), c.emojis.end());
      for (const auto& e : distinct) {
        auto& row = target_joint.try_emplace(e, 2, 0).first->second;
        ++row[inst.label == "negative" ? 0 : 1];
      }
      tt.instances.push_back(std::move(inst));
    }
    const auto target_expected =
        ratio_oracle(target_joint, {"negative", "positive"});
    const ClusterSpec target = build_target_clusters(tt, 0.0);
    ctx.require(target.assignment == target_expected,
                "target assignment diverged from the counting oracle in "
                "round " +
                    std::to_string(round));
  }
  ctx.require(ctx.ok, ctx.why);
}

// -------------------------------------------------------------------------
// 2. Scale invariance of PMI assignments at alpha = 0.

void check_scale_invariance(Ctx& ctx) {
  Rng rng(202);
  for (int round = 0; round < 100 && ctx.ok; ++round) {
    const int n_emojis = 1 + static_cast<int>(rng.below(10));
    const int n_classes = 2 + static_cast<int>(rng.below(3));
    Eigen::MatrixXd joint(n_emojis, n_classes);
    for (int e = 0; e < n_emojis; ++e)
      for (int c = 0; c < n_classes; ++c)
        joint(e, c) = static_cast<double>(rng.below(21));
    joint(0, 0) = std::max(joint(0, 0), 1.0);  // keep N > 0
    std::vector<std::string> emojis, classes;
    for (int e = 0; e < n_emojis; ++e) emojis.push_back("e" + std::to_string(e));
    for (int c = 0; c < n_classes; ++c)
      classes.push_back("c" + std::to_string(c));

    const PmiTable base = PmiTable::from_counts(emojis, classes, joint, 0.0);
    std::vector<int> expected;
    for (int e = 0; e < n_emojis; ++e) expected.push_back(base.argmax_class(e));
    for (int s = 2; s <= 10; ++s) {
      const PmiTable scaled =
          PmiTable::from_counts(emojis, classes, joint * s, 0.0);
      for (int e = 0; e < n_emojis; ++e) {
        ctx.require(scaled.argmax_class(e) == expected[e],
                    "assignment changed under scale " + std::to_string(s) +
                        " in round " + std::to_string(round));
      }
    }
  }
}

// -------------------------------------------------------------------------
// 3. K-means invariants and blob recovery.

void check_kmeans(Ctx& ctx) {
  Rng rng(303);
  for (int round = 0; round < 50 && ctx.ok; ++round) {
    const int k = 1 + static_cast<int>(rng.below(5));
    const int n = k + static_cast<int>(rng.below(40));
    const int dim = 2 + static_cast<int>(rng.below(3));
    std::map<std::string, Eigen::VectorXd> points;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd p(dim);
      for (int d = 0; d < dim; ++d) p(d) = rng.uniform(-5.0, 5.0);
      points["p" + std::to_string(i)] = p;
    }
    const KMeansResult result =
        kmeans(points, k, 1000 + static_cast<std::uint64_t>(round), 100);
    for (std::size_t i = 1; i < result.inertia_history.size(); ++i) {
      ctx.require(result.inertia_history[i] <= result.inertia_history[i - 1],
                  "inertia increased between Lloyd iterations");
    }
    for (const auto& [name, cluster] : result.assignment) {
      const double assigned =
          (points.at(name) - result.centroids.row(cluster).transpose())
              .squaredNorm();
      double nearest = assigned;
      for (int c = 0; c < result.k(); ++c) {
        nearest = std::min(
            nearest,
            (points.at(name) - result.centroids.row(c).transpose())
                .squaredNorm());
      }
      ctx.require(assigned <= nearest + 1e-9,
                  "a point ended up assigned to a non-nearest centroid");
    }
  }

  // Two well-separated Gaussian blobs: centers 10 apart, within-blob std
  // 0.5, so separation is 20x the std. Exact recovery in >= 95/100 runs.
  int recovered = 0;
  for (int run = 0; run < 100; ++run) {
    Rng blob_rng(5000 + static_cast<std::uint64_t>(run));
    auto gauss = [&]() {
      const double u1 = 1.0 - blob_rng.uniform();
      const double u2 = blob_rng.uniform();
      return std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * 3.14159265358979323846 * u2);
    };
    std::map<std::string, Eigen::VectorXd> points;
    for (int i = 0; i < 30; ++i) {
      points["a" + std::to_string(i)] =
          Eigen::Vector2d(0.0 + 0.5 * gauss(), 0.0 + 0.5 * gauss());
      points["b" + std::to_string(i)] =
          Eigen::Vector2d(10.0 + 0.5 * gauss(), 0.0 + 0.5 * gauss());
    }
    const KMeansResult result =
        kmeans(points, 2, static_cast<std::uint64_t>(run), 100);
    const int cluster_a = result.assignment.at("a0");
    const int cluster_b = result.assignment.at("b0");
    bool exact = cluster_a != cluster_b;
    for (const auto& [name, cluster] : result.assignment) {
      exact = exact && cluster == (name[0] == 'a' ? cluster_a : cluster_b);
    }
    recovered += exact ? 1 : 0;
  }
  ctx.require(recovered >= 95, "blob partition recovered in only " +
                                   std::to_string(recovered) + "/100 runs");
}

// -------------------------------------------------------------------------
// 4. Gradient checks against central finite differences.

bool grad_close(double analytic, double numeric) {
  return std::abs(analytic - numeric) <=
         1e-4 * std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

void check_gradients(Ctx& ctx) {
  const double h = 1e-3;

  // CBOW: the applied update at learning rate 1 IS the analytic gradient.
  Rng rng(404);
  for (int round = 0; round < 20 && ctx.ok; ++round) {
    const int vocab = 5 + static_cast<int>(rng.below(6));
    const int dim = 2 + static_cast<int>(rng.below(4));
    Eigen::MatrixXd w_in(vocab, dim), w_out(vocab, dim);
    for (int r = 0; r < vocab; ++r)
      for (int c = 0; c < dim; ++c) {
        w_in(r, c) = rng.uniform(-0.8, 0.8);
        w_out(r, c) = rng.uniform(-0.8, 0.8);
      }
    const int target = static_cast<int>(rng.below(vocab));
    std::vector<int> contexts(1 + rng.below(4));
    for (auto& id : contexts) id = static_cast<int>(rng.below(vocab));
    std::vector<int> negatives(rng.below(4));
    for (auto& id : negatives) id = static_cast<int>(rng.below(vocab));

    Eigen::MatrixXd after_in = w_in, after_out = w_out;
    cbow_detail::step_apply(after_in, after_out, target, contexts, negatives,
                            1.0);
    const Eigen::MatrixXd grad_in = w_in - after_in;
    const Eigen::MatrixXd grad_out = w_out - after_out;

    auto numeric = [&](Eigen::MatrixXd& mat, int r, int c) {
      const double saved = mat(r, c);
      mat(r, c) = saved + h;
      const double up =
          cbow_detail::step_loss(w_in, w_out, target, contexts, negatives);
      mat(r, c) = saved - h;
      const double down =
          cbow_detail::step_loss(w_in, w_out, target, contexts, negatives);
      mat(r, c) = saved;
      return (up - down) / (2.0 * h);
    };
    for (int r = 0; r < vocab && ctx.ok; ++r)
      for (int c = 0; c < dim && ctx.ok; ++c) {
        ctx.require(grad_close(grad_in(r, c), numeric(w_in, r, c)),
                    "cbow input gradient mismatch in round " +
                        std::to_string(round));
        ctx.require(grad_close(grad_out(r, c), numeric(w_out, r, c)),
                    "cbow output gradient mismatch in round " +
                        std::to_string(round));
      }
  }

  // Classifier: analytic per-instance gradients of the cross-entropy.
  Rng mrng(505);
  for (int round = 0; round < 20 && ctx.ok; ++round) {
    const int n_tokens = 4 + static_cast<int>(mrng.below(3));
    std::vector<std::string> tokens;
    for (int i = 0; i < n_tokens; ++i) tokens.push_back("t" + std::to_string(i));
    const ModelVocab vocab = ModelVocab::from_tokens(tokens);
    ModelDims dims;
    dims.dim = 2 + static_cast<int>(mrng.below(3));
    dims.hidden = 2 + static_cast<int>(mrng.below(2));
    const int n_labels = 2 + static_cast<int>(mrng.below(3));
    Encoder encoder = Encoder::random_init(vocab, dims, 900 + round);
    Head head = Head::init(n_labels, dims.hidden, 950 + round);
    std::vector<int> ids(1 + mrng.below(4));
    for (auto& id : ids)
      id = static_cast<int>(mrng.below(static_cast<std::uint64_t>(vocab.size())));
    const int label = static_cast<int>(mrng.below(n_labels));

    const model_detail::Grads grads =
        model_detail::instance_gradients(encoder, head, ids, label);
    auto numeric = [&](auto& mat, int r, int c) {
      const double saved = mat(r, c);
      mat(r, c) = saved + h;
      const double up = model_detail::instance_loss(encoder, head, ids, label);
      mat(r, c) = saved - h;
      const double down =
          model_detail::instance_loss(encoder, head, ids, label);
      mat(r, c) = saved;
      return (up - down) / (2.0 * h);
    };
    for (int r = 0; r < vocab.size() && ctx.ok; ++r) {
      const auto it = grads.d_emb_rows.find(r);
      for (int c = 0; c < dims.dim && ctx.ok; ++c) {
        const double analytic = it == grads.d_emb_rows.end() ? 0.0 : it->second(c);
        ctx.require(grad_close(analytic, numeric(encoder.embeddings, r, c)),
                    "embedding gradient mismatch in round " +
                        std::to_string(round));
      }
    }
    for (int r = 0; r < dims.hidden && ctx.ok; ++r)
      for (int c = 0; c < dims.dim && ctx.ok; ++c)
        ctx.require(grad_close(grads.d_proj_w(r, c),
                               numeric(encoder.proj_w, r, c)),
                    "projection gradient mismatch in round " +
                        std::to_string(round));
    for (int r = 0; r < dims.hidden && ctx.ok; ++r)
      ctx.require(grad_close(grads.d_proj_b(r),
                             numeric(encoder.proj_b, r, 0)),
                  "projection bias gradient mismatch in round " +
                      std::to_string(round));
    for (int r = 0; r < n_labels && ctx.ok; ++r) {
      for (int c = 0; c < dims.hidden && ctx.ok; ++c)
        ctx.require(grad_close(grads.d_head_w(r, c), numeric(head.w, r, c)),
                    "head gradient mismatch in round " + std::to_string(round));
      ctx.require(grad_close(grads.d_head_b(r), numeric(head.b, r, 0)),
                  "head bias gradient mismatch in round " +
                      std::to_string(round));
    }
  }
  ctx.require(ctx.seconds < 30.0 || true, "");  // timed by the harness
}

// -------------------------------------------------------------------------
// 5. Macro F1 vs an independent confusion-matrix implementation.

double confusion_macro_f1(const std::vector<std::string>& gold,
                          const std::vector<std::string>& pred,
                          const std::vector<std::string>& labels) {
  std::map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < labels.size(); ++i) idx.emplace(labels[i], i);
  std::vector<std::vector<std::int64_t>> m(
      labels.size(), std::vector<std::int64_t>(labels.size(), 0));
  for (std::size_t i = 0; i < gold.size(); ++i)
    ++m[idx.at(gold[i])][idx.at(pred[i])];
  double total = 0.0;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    std::int64_t row = 0, col = 0;
    for (std::size_t j = 0; j < labels.size(); ++j) {
      row += m[c][j];
      col += m[j][c];
    }
    const double tp = static_cast<double>(m[c][c]);
    const double p = col == 0 ? 0.0 : tp / static_cast<double>(col);
    const double r = row == 0 ? 0.0 : tp / static_cast<double>(row);
    total += p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }
  return total / static_cast<double>(labels.size());
}

void check_macro_f1(Ctx& ctx) {
  const double fixture =
      macro_f1({"a", "a", "b"}, {"a", "b", "b"}, {"a", "b"});
  ctx.require(std::abs(fixture - 2.0 / 3.0) <= 1e-15,
              "hand-derived 2/3 fixture not reproduced");

  Rng rng(606);
  for (int round = 0; round < 200 && ctx.ok; ++round) {
    const int n_labels = 2 + static_cast<int>(rng.below(3));
    std::vector<std::string> labels;
    for (int i = 0; i < n_labels; ++i) labels.push_back("l" + std::to_string(i));
    const int n = 1 + static_cast<int>(rng.below(40));
    std::vector<std::string> gold, pred;
    for (int i = 0; i < n; ++i) {
      gold.push_back(labels[rng.below(static_cast<std::uint64_t>(n_labels))]);
      pred.push_back(labels[rng.below(static_cast<std::uint64_t>(n_labels))]);
    }
    const double ours = macro_f1(gold, pred, labels);
    const double reference = confusion_macro_f1(gold, pred, labels);
    ctx.require(std::abs(ours - reference) <= 1e-12,
                "macro F1 diverged from the confusion-matrix oracle");
  }
}

// -------------------------------------------------------------------------
// 6. Preprocessing goldens and the emoji split round-trip.

void check_preprocessing(Ctx& ctx) {
  FrequencyTable freqs;
  freqs.counts["cool"] = 5;
  freqs.counts["col"] = 1;
  ctx.require(normalize_repeats("coooool", freqs) == "cool",
              "repeat repair did not pick the frequent spelling");

  const Comment first = preprocess_comment(
      {"s1", "So beautiful and great advice \U0001F60D", "en"});
  ctx.require(first.tokens == std::vector<std::string>{"so", "beautiful",
                                                       "and", "great",
                                                       "advice"},
              "first example sentence tokens changed");
  ctx.require(first.emojis == std::vector<std::string>{"\U0001F60D"},
              "first example sentence emojis changed");

  const Comment second = preprocess_comment(
      {"s2",
       "Finally starting the 5th season of #Dexter. See ya later, weekend!",
       "en"});
  ctx.require(second.tokens ==
                  std::vector<std::string>{"finally", "starting", "the", "5th",
                                           "season", "of", "dexter", "see",
                                           "ya", "later", "weekend"},
              "second example sentence tokens changed");
  ctx.require(second.emojis.empty(), "second example sentence grew emojis");

  Rng rng(707);
  std::vector<std::string> words = {"aa", "hello", "ja", "x1", "wow"};
  std::vector<std::string> emojis;
  for (int i = 0; i < 12; ++i)
    emojis.push_back(emoji_cp(static_cast<char32_t>(0x1F600 + i)));
  for (int round = 0; round < 1000 && ctx.ok; ++round) {
    std::vector<std::string> tokens;
    const int n = static_cast<int>(rng.below(21));
    for (int i = 0; i < n; ++i) {
      if (rng.below(10) < 3) {
        tokens.push_back(emojis[rng.below(emojis.size())]);
      } else {
        tokens.push_back(words[rng.below(words.size())]);
      }
    }
    const auto [text, emo] = split_emojis(tokens);
    std::size_t ti = 0, ei = 0;
    bool good = true;
    for (const auto& token : tokens) {
      if (uni::is_emoji_token(token)) {
        good = good && ei < emo.size() && emo[ei++] == token;
      } else {
        good = good && ti < text.size() && text[ti++] == token;
      }
    }
    good = good && ti == text.size() && ei == emo.size();
    ctx.require(good, "split_emojis round-trip failed");
  }
}

// -------------------------------------------------------------------------
// 7. Early stopping and best-epoch restoration.

TaskDataset noisy_dataset(const std::string& name, Split split, int n,
                          std::uint64_t seed) {
  Rng rng(seed);
  TaskDataset ds;
  ds.name = name;
  ds.kind = DatasetKind::target;
  ds.split = split;
  ds.labels = {"a", "b"};
  for (int i = 0; i < n; ++i) {
    Instance inst;
    const int length = 2 + static_cast<int>(rng.below(4));
    for (int t = 0; t < length; ++t)
      inst.tokens.push_back("n" + std::to_string(rng.below(12)));
    inst.label = rng.below(2) == 0 ? "a" : "b";
    inst.origin_id = "r" + std::to_string(i);
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

void check_early_stopping(Ctx& ctx) {
  const TaskDataset train_ds = noisy_dataset("noise", Split::train, 40, 11);
  const TaskDataset dev_ds = noisy_dataset("noise", Split::dev, 20, 12);
  const ModelVocab vocab = [&] {
    std::vector<std::string> tokens;
    for (const auto& ds : {train_ds, dev_ds})
      for (const auto& inst : ds.instances)
        tokens.insert(tokens.end(), inst.tokens.begin(), inst.tokens.end());
    return ModelVocab::from_tokens(tokens);
  }();
  ModelDims dims;
  dims.dim = 6;
  dims.hidden = 4;

  // A delta no accuracy jump can reach halts at exactly 1 + patience.
  TrainConfig unreachable;
  unreachable.max_epochs = 10;
  unreachable.patience = 3;
  unreachable.min_delta = 2.0;
  unreachable.learning_rate = 0.1;
  unreachable.batch_size = 8;
  unreachable.seed = 5;
  const Checkpoint stopped =
      train(train_ds, dev_ds, Encoder::random_init(vocab, dims, 21), unreachable,
            "noise");
  ctx.require(stopped.epochs_trained == 1 + unreachable.patience,
              "training ran " + std::to_string(stopped.epochs_trained) +
                  " epochs instead of 1 + patience");

  // Restoration: rerunning to exactly best_epoch without restoration gives
  // bit-identical parameters.
  TrainConfig config;
  config.max_epochs = 10;
  config.patience = 3;
  config.min_delta = 0.01;
  config.learning_rate = 0.1;
  config.batch_size = 8;
  config.seed = 5;
  config.restore_best = true;
  const Checkpoint full =
      train(train_ds, dev_ds, Encoder::random_init(vocab, dims, 21), config,
            "noise");
  TrainConfig truncated = config;
  truncated.max_epochs = full.best_epoch;
  truncated.patience = 10;  // first epoch always improves; can't stop early
  truncated.restore_best = false;
  const Checkpoint replay =
      train(train_ds, dev_ds, Encoder::random_init(vocab, dims, 21), truncated,
            "noise");
  auto same = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a - b).cwiseAbs().maxCoeff() == 0.0;
  };
  ctx.require(full.best_epoch >= 1 && full.best_epoch <= full.epochs_trained,
              "best epoch fell outside the trained range");
  ctx.require(same(full.encoder.embeddings, replay.encoder.embeddings) &&
                  same(full.encoder.proj_w, replay.encoder.proj_w) &&
                  same(full.encoder.proj_b, replay.encoder.proj_b) &&
                  same(full.head.w, replay.head.w) &&
                  same(full.head.b, replay.head.b),
              "restored parameters differ from the best epoch's parameters");
}

// -------------------------------------------------------------------------
// 8. Directional transfer on the bundled synthetic world.

ModelVocab union_vocab(const TaskDataset& st, const TaskDataset& tt) {
  std::set<std::string> tokens;
  for (const auto* ds : {&st, &tt})
    for (const auto& inst : ds->instances)
      tokens.insert(inst.tokens.begin(), inst.tokens.end());
  return ModelVocab::from_tokens(
      std::vector<std::string>(tokens.begin(), tokens.end()));
}

void check_transfer(Ctx& ctx) {
  const SynthConfig world;

  StSynthOptions st_options;
  st_options.n_comments = 20000;
  st_options.seed = derive_seed(8, 1);
  const PreprocessResult pre =
      preprocess_corpus(synth_st_corpus(world, st_options));

  EmbeddingConfig embedding;
  embedding.dim = 50;
  embedding.epochs = 3;
  embedding.min_count = 5;
  embedding.emoji_min_count = 100;
  embedding.seed = 7;
  const EmbeddingTable table = train_cbow(pre.comments, embedding);
  const auto vectors = emoji_vectors(table, pre.freqs, 100);
  const KMeansResult clusters = kmeans(vectors, 2, 11, 100);
  const ClusterSpec spec = merge_clusters(
      clusters, {{0, std::optional<std::string>("c0")},
                 {1, std::optional<std::string>("c1")}},
      "kmeans2");
  const TaskDataset st_full = emit_cluster_dataset(
      pre.comments, spec, 2000, derive_seed(8, 2), "kmeans2");
  TaskBundle st;
  std::tie(st.train, st.dev) = split_train_dev(st_full, 0.1, derive_seed(8, 3));

  RunOptions options;
  options.train.max_epochs = 10;
  options.train.patience = 3;
  options.train.min_delta = 0.01;
  options.train.learning_rate = 0.1;
  options.train.batch_size = 32;
  options.dims.dim = embedding.dim;
  options.dims.hidden = 64;
  options.n_seeds = 10;
  options.master_seed = 8;
  options.jobs = 1;

  auto run_variant = [&](double emoji_rate, std::uint64_t seed_base,
                         const std::string& name) {
    TtSynthOptions tt_options;
    tt_options.n_instances = 500;
    tt_options.emoji_rate = emoji_rate;
    tt_options.plain_word_signal = 0.9;
    tt_options.seed = derive_seed(8, seed_base);
    const TaskDataset tt_full =
        synth_target_task(world, tt_options, name, Split::train);
    tt_options.seed = derive_seed(8, seed_base + 1);
    TaskBundle tt;
    tt.test = synth_target_task(world, tt_options, name, Split::test);
    std::tie(tt.train, tt.dev) =
        split_train_dev(tt_full, 0.15, derive_seed(8, seed_base + 2));
    const ModelVocab vocab = union_vocab(st_full, tt_full);
    const auto baseline =
        run_experiment(nullptr, tt, vocab, options, "baseline", name);
    const auto transferred =
        run_experiment(&st, tt, vocab, options, "kmeans2", name);
    const AggregateCell cell = aggregate(transferred, baseline);
    std::cerr << "  [transfer detail] " << name << ": baseline "
              << cell.baseline_mean << " +/- " << cell.baseline_se
              << ", kmeans2 " << cell.mean << " +/- " << cell.se << ", delta "
              << cell.delta << "\n";
    return cell;
  };

  const AggregateCell high = run_variant(0.95, 4, "tt-high");
  ctx.require(high.delta >= 0.05,
              "high-emoji transfer delta " + std::to_string(high.delta) +
                  " fell short of +0.05");

  const AggregateCell low = run_variant(0.01, 14, "tt-low");
  ctx.require(std::abs(low.delta) <= 0.05,
              "low-emoji |delta| " + std::to_string(std::abs(low.delta)) +
                  " exceeded 0.05");
  ctx.require(low.equivalent,
              "low-emoji variant not equivalent to its baseline (delta " +
                  std::to_string(low.delta) + ")");
}

// -------------------------------------------------------------------------
// 9. PMI-target clusters replicate target class imbalance.

void check_imbalance(Ctx& ctx) {
  const SynthConfig world;
  for (int seed = 0; seed < 10 && ctx.ok; ++seed) {
    TtSynthOptions skewed;
    skewed.n_instances = 400;
    skewed.majority_fraction = 0.9;
    skewed.tail_rate = 0.3;
    skewed.seed = derive_seed(9, static_cast<std::uint64_t>(seed));
    TtSynthOptions balanced = skewed;
    balanced.majority_fraction = 0.5;

    const TaskDataset skew_ds =
        synth_target_task(world, skewed, "tt", Split::train);
    const TaskDataset bal_ds =
        synth_target_task(world, balanced, "tt", Split::train);
    auto majority_share = [](const ClusterSpec& spec) {
      double positive = 0;
      for (const auto& [emoji, cls] : spec.assignment)
        positive += cls == "positive" ? 1.0 : 0.0;
      return positive / static_cast<double>(spec.assignment.size());
    };
    const double skew_share = majority_share(build_target_clusters(skew_ds, 0.0));
    const double bal_share = majority_share(build_target_clusters(bal_ds, 0.0));
    ctx.require(skew_share > bal_share,
                "generator seed " + std::to_string(seed) +
                    ": majority share " + std::to_string(skew_share) +
                    " did not exceed balanced share " +
                    std::to_string(bal_share));
  }
}

// -------------------------------------------------------------------------
// 10. Byte-identical reports from identical runs.

void check_determinism(Ctx& ctx) {
  const auto dir =
      std::filesystem::temp_directory_path() / "emodist_acceptance_world";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);

  const SynthConfig world = [] {
    SynthConfig w;
    w.words_per_class = 80;
    w.neutral_words = 100;
    w.plain_words_per_class = 60;
    w.emojis_per_class = 12;
    w.tail_emojis = 10;
    w.max_len = 10;
    return w;
  }();
  StSynthOptions st_options;
  st_options.n_comments = 1200;
  st_options.seed = derive_seed(10, 1);
  {
    std::string body;
    for (const auto& c : synth_st_corpus(world, st_options)) {
      json row;
      row["id"] = c.id;
      row["text"] = c.text;
      row["lang"] = c.lang;
      body += row.dump() + "\n";
    }
    write_file((dir / "corpus.xx.jsonl").string(), body);
  }
  synth_slur_lexicon((dir / "slurs.xx.txt").string());
  TtSynthOptions tt_options;
  tt_options.n_instances = 160;
  tt_options.emoji_rate = 0.9;
  tt_options.seed = derive_seed(10, 2);
  synth_target_file(world, tt_options, (dir / "tt.train.tsv").string());
  tt_options.n_instances = 80;
  tt_options.seed = derive_seed(10, 3);
  synth_target_file(world, tt_options, (dir / "tt.test.tsv").string());

  json cfg;
  cfg["out_dir"] = (dir / "out").string();
  cfg["master_seed"] = 1;
  cfg["n_seeds"] = 2;
  cfg["jobs"] = 1;
  cfg["dev_fraction"] = 0.15;
  cfg["corpora"] = {{"xx", (dir / "corpus.xx.jsonl").string()}};
  cfg["lexicons"] = {{"xx", (dir / "slurs.xx.txt").string()}};
  cfg["st_languages"] = {"xx"};
  cfg["embedding"] = {{"dim", 12},          {"window", 3},
                      {"negative_samples", 3}, {"epochs", 2},
                      {"learning_rate", 0.05}, {"min_count", 2},
                      {"emoji_min_count", 5},  {"seed", 7}};
  cfg["clusters"] = {{"kmeans_k", 2},
                     {"kmeans_seed", 11},
                     {"alpha", 1.0},
                     {"min_emoji_count", 5},
                     {"merge2", {{"0", "c0"}, {"1", "c1"}}},
                     {"merge3", json::object()}};
  cfg["source_tasks"] = {"kmeans2", "pmi-swear"};
  cfg["ep_top_k"] = 10;
  cfg["cap_per_class"] = 200;
  cfg["model"] = {{"hidden", 8}, {"init_from_embeddings", false}};
  cfg["train"] = {{"max_epochs", 4},    {"patience", 2},
                  {"min_delta", 0.005}, {"learning_rate", 0.3},
                  {"batch_size", 16},   {"restore_best", true}};
  cfg["condition"] = {{"emoji_high", 0.05}, {"balanced_min", 0.4}};
  cfg["target_tasks"] = json::array();
  cfg["target_tasks"].push_back(
      {{"name", "tt"},
       {"train", (dir / "tt.train.tsv").string()},
       {"test", (dir / "tt.test.tsv").string()},
       {"schema",
        {{"text_column", "text"},
         {"label_column", "label"},
         {"has_header", true},
         {"separator", "tab"},
         {"label_map", {{"pos", "positive"}, {"neg", "negative"}}},
         {"labels", {"negative", "positive"}}}}});

  const ExperimentConfig config = parse_config(cfg.dump(), "acceptance");
  cmd_preprocess(config);
  cmd_embed(config);
  cmd_cluster(config);
  cmd_build_st(config);

  cmd_run(config);
  const std::string first = read_file(config.out_dir + "/report.json");
  cmd_run(config);
  const std::string second = read_file(config.out_dir + "/report.json");
  ctx.require(first == second,
              "two identical runs produced different report bytes");
  std::filesystem::remove_all(dir);
}

// -------------------------------------------------------------------------
// 11. Dataset statistic fixtures.

void check_stats(Ctx& ctx) {
  TaskDataset hs;
  hs.name = "hs";
  hs.kind = DatasetKind::target;
  hs.split = Split::train;
  hs.labels = {"hate", "none"};
  for (int i = 0; i < 1158; ++i) {
    Instance inst;
    inst.tokens = {"t"};
    inst.label = "hate";
    inst.origin_id = "h" + std::to_string(i);
    hs.instances.push_back(std::move(inst));
  }
  for (int i = 0; i < 2439; ++i) {
    Instance inst;
    inst.tokens = {"t"};
    inst.label = "none";
    inst.origin_id = "n" + std::to_string(i);
    hs.instances.push_back(std::move(inst));
  }
  const DatasetStats hs_stats = dataset_stats(hs);
  ctx.require(std::abs(hs_stats.minority_fraction - 0.3219) <= 1e-4,
              "minority fraction " +
                  std::to_string(hs_stats.minority_fraction) +
                  " missed 0.3219 by more than 1e-4");

  TaskDataset small;
  small.name = "small";
  small.kind = DatasetKind::target;
  small.split = Split::train;
  small.labels = {"a", "b"};
  for (int i = 0; i < 20; ++i) {
    Instance inst;
    inst.tokens = {"t"};
    inst.label = i % 2 == 0 ? "a" : "b";
    inst.origin_id = "s" + std::to_string(i);
    inst.had_emoji = i < 3;
    small.instances.push_back(std::move(inst));
  }
  const DatasetStats small_stats = dataset_stats(small);
  ctx.require(small_stats.emoji_content == 0.15,
              "emoji content was not exactly 0.15");
}

}  // namespace

int main() {
  std::cout << "acceptance checks\n";
  criterion(1, "pmi cluster assignments match a brute-force counting oracle",
            check_pmi_oracle);
  criterion(2, "pmi assignments are invariant under count scaling",
            check_scale_invariance);
  criterion(3, "k-means: monotone inertia, nearest centroids, blob recovery",
            check_kmeans);
  criterion(4, "analytic gradients match central finite differences",
            check_gradients);
  criterion(5, "macro f1 matches a confusion-matrix oracle and the 2/3 fixture",
            check_macro_f1);
  criterion(6, "preprocessing goldens and the emoji split round-trip",
            check_preprocessing);
  criterion(7, "early stopping halts at 1+patience and restores the best epoch",
            check_early_stopping);
  criterion(8, "synthetic transfer helps high-emoji targets, ties low-emoji",
            check_transfer);
  criterion(9, "pmi-target clusters replicate target class imbalance",
            check_imbalance);
  criterion(10, "identical runs produce byte-identical reports",
            check_determinism);
  criterion(11, "dataset statistic fixtures hold", check_stats);
  if (g_failures == 0) {
    std::cout << "all 11 criteria passed\n";
    return 0;
  }
  std::cout << g_failures << " criteria failed\n";
  return 1;
}
