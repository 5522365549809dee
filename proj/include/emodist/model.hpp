// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "emodist/embeddings.hpp"
#include "emodist/tasks.hpp"

namespace emodist {

// Closed token inventory of a model. Index 0 is the UNK embedding every
// out-of-vocabulary token maps to; index 1 encodes the empty comment.
struct ModelVocab {
  static constexpr int kUnk = 0;
  static constexpr int kEmpty = 1;

  std::vector<std::string> tokens;  // starts with the two special tokens
  std::unordered_map<std::string, int> index;

  static ModelVocab from_tokens(const std::vector<std::string>& tokens);
  static ModelVocab from_embedding_vocab(const Vocab& vocab);

  int size() const { return static_cast<int>(tokens.size()); }
  int lookup(const std::string& token) const {
    const auto it = index.find(token);
    return it == index.end() ? kUnk : it->second;
  }
  std::uint64_t content_hash() const;
};

struct ModelDims {
  int dim = 50;     // embedding width
  int hidden = 64;  // projection width
};

// Trainable embedding → mean pool → tanh projection. Stand-in encoder whose
// parameters are what the source→target transfer copies.
struct Encoder {
  ModelVocab vocab;
  Eigen::MatrixXd embeddings;  // |V| × dim
  Eigen::MatrixXd proj_w;      // hidden × dim
  Eigen::VectorXd proj_b;      // hidden

  int dim() const { return static_cast<int>(embeddings.cols()); }
  int hidden() const { return static_cast<int>(proj_w.rows()); }

  static Encoder random_init(const ModelVocab& vocab, const ModelDims& dims,
                             std::uint64_t seed);
  // Embedding rows copied from a trained table; projection seeded randomly.
  static Encoder from_embedding_table(const EmbeddingTable& table, int hidden,
                                      std::uint64_t seed);
};

// Detachable linear classifier.
struct Head {
  Eigen::MatrixXd w;  // |Y| × hidden
  Eigen::VectorXd b;  // |Y|

  int n_labels() const { return static_cast<int>(w.rows()); }
  // Seeded uniform init in [-0.1, 0.1].
  static Head init(int n_labels, int hidden, std::uint64_t seed);
};

struct TrainConfig {
  int max_epochs = 10;
  int patience = 3;
  double min_delta = 0.01;
  double learning_rate = 0.1;
  int batch_size = 32;
  std::uint64_t seed = 1;
  bool restore_best = true;  // return best-dev-epoch parameters

  void validate() const;
};

struct Checkpoint {
  Encoder encoder;
  Head head;
  std::vector<std::string> labels;  // Y the head was trained against
  std::string task_name;
  TrainConfig config;
  int best_epoch = 0;      // 1-based epoch whose parameters are returned
  int epochs_trained = 0;  // epochs actually run
  double dev_accuracy = 0.0;
  std::vector<double> dev_accuracy_history;
};

// Token ids for one instance: OOV → UNK, empty list → [EMPTY].
std::vector<int> token_ids(const ModelVocab& vocab,
                           const std::vector<std::string>& tokens);

// Mean-pooled, tanh-projected representation.
Eigen::VectorXd encode(const std::vector<std::string>& tokens,
                       const Encoder& encoder);

// Softmax distribution over the head's labels.
Eigen::VectorXd forward(const std::vector<std::string>& tokens,
                        const Encoder& encoder, const Head& head);

// Argmax label index with lowest-index tie-break.
int predict(const std::vector<std::string>& tokens, const Encoder& encoder,
            const Head& head);

// Mini-batch SGD on cross-entropy with early stopping over dev accuracy:
// an epoch improves when accuracy beats the tracked best by ≥ min_delta;
// `patience` consecutive non-improvements stop training. Returns the
// best-dev-epoch parameters (earliest epoch on accuracy ties) unless
// restore_best is off. Deterministic given (datasets, encoder, config).
Checkpoint train(const TaskDataset& train_ds, const TaskDataset& dev_ds,
                 Encoder encoder, const TrainConfig& config,
                 const std::string& task_name);

// Transfer initialization: the source checkpoint's encoder parameters with
// a fresh head for `labels` (the source head is discarded). The head seed
// matches what train() with this config would draw.
std::pair<Encoder, Head> transfer_init(const Checkpoint& source,
                                       const std::vector<std::string>& labels,
                                       const TrainConfig& config);

// Full transfer: initialize from the source checkpoint, then fine-tune the
// whole model (encoder included) on the target task.
Checkpoint transfer(const Checkpoint& source, const TaskDataset& tt_train,
                    const TaskDataset& tt_dev, const TrainConfig& config,
                    const std::string& task_name);

// Binary persistence: JSON header + raw little-endian double blocks;
// reload is bit-exact.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

// Internals exposed for gradient oracles.
namespace model_detail {

struct Grads {
  std::map<int, Eigen::VectorXd> d_emb_rows;  // touched embedding rows
  Eigen::MatrixXd d_proj_w;
  Eigen::VectorXd d_proj_b;
  Eigen::MatrixXd d_head_w;
  Eigen::VectorXd d_head_b;
};

double instance_loss(const Encoder& encoder, const Head& head,
                     const std::vector<int>& ids, int label);
Grads instance_gradients(const Encoder& encoder, const Head& head,
                         const std::vector<int>& ids, int label);

// One SGD step on the mean loss of a batch; returns the pre-update loss.
double batch_step(Encoder& encoder, Head& head,
                  const std::vector<std::vector<int>>& batch_ids,
                  const std::vector<int>& batch_labels, double learning_rate);

}  // namespace model_detail

}  // namespace emodist
