// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "emodist/corpus.hpp"
#include "emodist/frequency.hpp"
#include "emodist/rng.hpp"

namespace emodist {

struct EmbeddingConfig {
  int dim = 50;
  int window = 5;            // context radius
  int negative_samples = 5;  // negatives per target
  int epochs = 5;
  double learning_rate = 0.05;
  std::int64_t min_count = 1;          // general vocabulary threshold
  std::int64_t emoji_min_count = 1000; // emoji threshold for cluster input
  double unigram_power = 0.75;         // negative-sampling distribution
  std::uint64_t seed = 1;
  bool collect_step_losses = false;

  void validate() const;  // throws ConfigError on violated invariants
};

// Token inventory with deterministic indices: count descending, then token
// lexicographic.
struct Vocab {
  std::vector<std::string> tokens;             // index → token
  std::vector<std::int64_t> counts;            // index → corpus count
  std::unordered_map<std::string, int> index;  // token → index

  int size() const { return static_cast<int>(tokens.size()); }
  // Index of `token`, or -1 when out of vocabulary.
  int lookup(const std::string& token) const {
    const auto it = index.find(token);
    return it == index.end() ? -1 : it->second;
  }
};

Vocab build_vocab(const FrequencyTable& freqs, const EmbeddingConfig& config);

struct EmbeddingTable {
  Vocab vocab;
  Eigen::MatrixXd vectors;  // |V| × dim

  int dim() const { return static_cast<int>(vectors.cols()); }
};

// Per-epoch mean step loss, plus each step's loss when collection is on.
struct CbowTrace {
  std::vector<double> epoch_mean_loss;
  std::vector<double> step_losses;
};

// CBOW with negative sampling over comment token+emoji sequences.
// Deterministic given (corpus, config). Throws DataError when no training
// context exists (corpus shorter than one window) and epochs ≥ 1.
EmbeddingTable train_cbow(const std::vector<Comment>& corpus,
                          const EmbeddingConfig& config);
EmbeddingTable train_cbow_traced(const std::vector<Comment>& corpus,
                                 const EmbeddingConfig& config,
                                 CbowTrace& trace);

// Vectors of emoji tokens whose corpus count reaches `threshold`.
// Deterministic iteration order (std::map). Throws DataError when empty.
std::map<std::string, Eigen::VectorXd> emoji_vectors(
    const EmbeddingTable& table, const FrequencyTable& freqs,
    std::int64_t threshold);

// Text format: header "|V| dim", one "token v1 .. vdim" line per token.
// A `.bin` sidecar with raw little-endian doubles makes reload bit-exact.
void save_embeddings(const EmbeddingTable& table, const std::string& path);
EmbeddingTable load_embeddings(const std::string& path);

// Internals exposed for gradient oracles: one training step is a pure
// function of the step-start parameters; updates are staged, then applied.
namespace cbow_detail {

// Seeded initialization: W_in uniform in [−0.5/dim, +0.5/dim], W_out zero.
void init_weights(int vocab_size, int dim, std::uint64_t seed,
                  Eigen::MatrixXd& w_in, Eigen::MatrixXd& w_out);

// Cumulative unigram^power distribution over vocab indices.
std::vector<double> unigram_cdf(const std::vector<std::int64_t>& counts,
                                double power);
int sample_from_cdf(const std::vector<double>& cdf, double u);

// Negative-sampling loss of one (target, contexts) step; negatives equal to
// the target are skipped, mirroring the update rule.
double step_loss(const Eigen::MatrixXd& w_in, const Eigen::MatrixXd& w_out,
                 int target, const std::vector<int>& contexts,
                 const std::vector<int>& negatives);

// Applies one SGD step (gradients of step_loss at the current parameters);
// returns the pre-update loss.
double step_apply(Eigen::MatrixXd& w_in, Eigen::MatrixXd& w_out, int target,
                  const std::vector<int>& contexts,
                  const std::vector<int>& negatives, double learning_rate);

}  // namespace cbow_detail

}  // namespace emodist
