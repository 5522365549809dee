// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <set>

#include <json.hpp>

#include "emodist/errors.hpp"
#include "emodist/io.hpp"
#include "emodist/rng.hpp"

namespace emodist {

using nlohmann::json;

ModelVocab ModelVocab::from_tokens(const std::vector<std::string>& tokens) {
  ModelVocab v;
  v.tokens = {"<unk>", "<empty>"};
  v.index.emplace("<unk>", kUnk);
  v.index.emplace("<empty>", kEmpty);
  for (const auto& tok : tokens) {
    if (tok.empty()) continue;
    if (v.index.emplace(tok, static_cast<int>(v.tokens.size())).second)
      v.tokens.push_back(tok);
  }
  return v;
}

ModelVocab ModelVocab::from_embedding_vocab(const Vocab& vocab) {
  return from_tokens(vocab.tokens);
}

std::uint64_t ModelVocab::content_hash() const {
  std::string all;
  for (const auto& tok : tokens) {
    all += tok;
    all += '\n';
  }
  return fnv1a64(all);
}

Encoder Encoder::random_init(const ModelVocab& vocab, const ModelDims& dims,
                             std::uint64_t seed) {
  if (dims.dim < 1 || dims.hidden < 1)
    throw ConfigError("encoder dims must be >= 1");
  Encoder enc;
  enc.vocab = vocab;
  Rng rng(seed);
  // Wider than the distributional-training init: mean-pooled rows must carry
  // usable gradient signal from the first supervised epoch.
  const double emb_bound = 0.1;
  enc.embeddings.resize(vocab.size(), dims.dim);
  for (int i = 0; i < vocab.size(); ++i)
    for (int j = 0; j < dims.dim; ++j)
      enc.embeddings(i, j) = rng.uniform(-emb_bound, emb_bound);
  const double proj_bound = std::sqrt(6.0 / (dims.dim + dims.hidden));
  enc.proj_w.resize(dims.hidden, dims.dim);
  for (int i = 0; i < dims.hidden; ++i)
    for (int j = 0; j < dims.dim; ++j)
      enc.proj_w(i, j) = rng.uniform(-proj_bound, proj_bound);
  enc.proj_b = Eigen::VectorXd::Zero(dims.hidden);
  return enc;
}

Encoder Encoder::from_embedding_table(const EmbeddingTable& table, int hidden,
                                      std::uint64_t seed) {
  ModelVocab vocab = ModelVocab::from_embedding_vocab(table.vocab);
  ModelDims dims{table.dim(), hidden};
  Encoder enc = random_init(vocab, dims, seed);
  // Rows 0/1 stay at their random init (no pretrained vector exists).
  for (int i = 0; i < table.vocab.size(); ++i) {
    const int row = enc.vocab.lookup(table.vocab.tokens[i]);
    if (row > ModelVocab::kEmpty) enc.embeddings.row(row) = table.vectors.row(i);
  }
  return enc;
}

Head Head::init(int n_labels, int hidden, std::uint64_t seed) {
  if (n_labels < 2) throw ConfigError("head needs >= 2 labels");
  Head head;
  Rng rng(seed);
  head.w.resize(n_labels, hidden);
  for (int i = 0; i < n_labels; ++i)
    for (int j = 0; j < hidden; ++j) head.w(i, j) = rng.uniform(-0.1, 0.1);
  head.b = Eigen::VectorXd::Zero(n_labels);
  return head;
}

void TrainConfig::validate() const {
  if (max_epochs < 1) throw ConfigError("max_epochs must be >= 1");
  if (patience < 1) throw ConfigError("patience must be >= 1");
  if (min_delta < 0) throw ConfigError("min_delta must be >= 0");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

std::vector<int> token_ids(const ModelVocab& vocab,
                           const std::vector<std::string>& tokens) {
  if (tokens.empty()) return {ModelVocab::kEmpty};
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& tok : tokens) ids.push_back(vocab.lookup(tok));
  return ids;
}

namespace model_detail {

namespace {

Eigen::VectorXd pool(const Encoder& encoder, const std::vector<int>& ids) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(encoder.dim());
  for (const int id : ids) x += encoder.embeddings.row(id).transpose();
  x /= static_cast<double>(ids.size());
  return x;
}

// Numerically stable softmax of a logit vector.
Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
  const double m = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - m).exp();
  p /= p.sum();
  return p;
}

struct ForwardState {
  Eigen::VectorXd x;       // pooled embedding
  Eigen::VectorXd a;       // tanh projection
  Eigen::VectorXd probs;   // softmax output
};

ForwardState run_forward(const Encoder& encoder, const Head& head,
                         const std::vector<int>& ids) {
  ForwardState s;
  s.x = pool(encoder, ids);
  s.a = (encoder.proj_w * s.x + encoder.proj_b).array().tanh();
  s.probs = softmax(head.w * s.a + head.b);
  return s;
}

}  // namespace

double instance_loss(const Encoder& encoder, const Head& head,
                     const std::vector<int>& ids, int label) {
  const auto s = run_forward(encoder, head, ids);
  return -std::log(std::max(s.probs(label), 1e-300));
}

Grads instance_gradients(const Encoder& encoder, const Head& head,
                         const std::vector<int>& ids, int label) {
  const auto s = run_forward(encoder, head, ids);
  Grads g;
  Eigen::VectorXd d_logits = s.probs;
  d_logits(label) -= 1.0;
  g.d_head_w = d_logits * s.a.transpose();
  g.d_head_b = d_logits;
  const Eigen::VectorXd d_a = head.w.transpose() * d_logits;
  const Eigen::VectorXd d_z =
      d_a.array() * (1.0 - s.a.array() * s.a.array());
  g.d_proj_w = d_z * s.x.transpose();
  g.d_proj_b = d_z;
  const Eigen::VectorXd d_x = encoder.proj_w.transpose() * d_z;
  const Eigen::VectorXd per_token = d_x / static_cast<double>(ids.size());
  for (const int id : ids) {
    auto [it, fresh] = g.d_emb_rows.try_emplace(id, per_token);
    if (!fresh) it->second += per_token;
  }
  return g;
}

double batch_step(Encoder& encoder, Head& head,
                  const std::vector<std::vector<int>>& batch_ids,
                  const std::vector<int>& batch_labels, double learning_rate) {
  const auto b = batch_ids.size();
  if (b == 0 || b != batch_labels.size())
    throw DataError("batch_step received an empty or mismatched batch");
  const double inv_b = 1.0 / static_cast<double>(b);
  double loss = 0.0;
  std::map<int, Eigen::VectorXd> d_emb;
  Eigen::MatrixXd d_proj_w =
      Eigen::MatrixXd::Zero(encoder.proj_w.rows(), encoder.proj_w.cols());
  Eigen::VectorXd d_proj_b = Eigen::VectorXd::Zero(encoder.proj_b.size());
  Eigen::MatrixXd d_head_w = Eigen::MatrixXd::Zero(head.w.rows(), head.w.cols());
  Eigen::VectorXd d_head_b = Eigen::VectorXd::Zero(head.b.size());
  for (std::size_t i = 0; i < b; ++i) {
    loss += instance_loss(encoder, head, batch_ids[i], batch_labels[i]);
    const Grads g = instance_gradients(encoder, head, batch_ids[i],
                                       batch_labels[i]);
    for (const auto& [row, grad] : g.d_emb_rows) {
      auto [it, fresh] = d_emb.try_emplace(row, grad);
      if (!fresh) it->second += grad;
    }
    d_proj_w += g.d_proj_w;
    d_proj_b += g.d_proj_b;
    d_head_w += g.d_head_w;
    d_head_b += g.d_head_b;
  }
  for (const auto& [row, grad] : d_emb)
    encoder.embeddings.row(row) -=
        (learning_rate * inv_b) * grad.transpose();
  encoder.proj_w -= (learning_rate * inv_b) * d_proj_w;
  encoder.proj_b -= (learning_rate * inv_b) * d_proj_b;
  head.w -= (learning_rate * inv_b) * d_head_w;
  head.b -= (learning_rate * inv_b) * d_head_b;
  return loss * inv_b;
}

}  // namespace model_detail

Eigen::VectorXd encode(const std::vector<std::string>& tokens,
                       const Encoder& encoder) {
  const auto ids = token_ids(encoder.vocab, tokens);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(encoder.dim());
  for (const int id : ids) x += encoder.embeddings.row(id).transpose();
  x /= static_cast<double>(ids.size());
  return (encoder.proj_w * x + encoder.proj_b).array().tanh();
}

Eigen::VectorXd forward(const std::vector<std::string>& tokens,
                        const Encoder& encoder, const Head& head) {
  const Eigen::VectorXd a = encode(tokens, encoder);
  Eigen::VectorXd logits = head.w * a + head.b;
  const double m = logits.maxCoeff();
  Eigen::VectorXd p = (logits.array() - m).exp();
  p /= p.sum();
  return p;
}

int predict(const std::vector<std::string>& tokens, const Encoder& encoder,
            const Head& head) {
  const Eigen::VectorXd p = forward(tokens, encoder, head);
  int best = 0;
  for (int i = 1; i < p.size(); ++i)
    if (p(i) > p(best)) best = i;
  return best;
}

namespace {

int label_index(const std::vector<std::string>& labels,
                const std::string& label) {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  throw DataError("label '" + label + "' not in task label set");
}

}  // namespace

Checkpoint train(const TaskDataset& train_ds, const TaskDataset& dev_ds,
                 Encoder encoder, const TrainConfig& config,
                 const std::string& task_name) {
  config.validate();
  train_ds.validate();
  dev_ds.validate();
  if (train_ds.labels != dev_ds.labels)
    throw DataError("train and dev label sets differ");

  const auto& labels = train_ds.labels;
  Head head = Head::init(static_cast<int>(labels.size()), encoder.hidden(),
                         derive_seed(config.seed, 1));

  std::vector<std::vector<int>> train_ids, dev_ids;
  std::vector<int> train_labels, dev_labels;
  train_ids.reserve(train_ds.instances.size());
  for (const auto& inst : train_ds.instances) {
    train_ids.push_back(token_ids(encoder.vocab, inst.tokens));
    train_labels.push_back(label_index(labels, inst.label));
  }
  dev_ids.reserve(dev_ds.instances.size());
  for (const auto& inst : dev_ds.instances) {
    dev_ids.push_back(token_ids(encoder.vocab, inst.tokens));
    dev_labels.push_back(label_index(labels, inst.label));
  }

  auto dev_accuracy = [&](const Encoder& enc, const Head& hd) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < dev_ids.size(); ++i) {
      Eigen::VectorXd x = Eigen::VectorXd::Zero(enc.dim());
      for (const int id : dev_ids[i]) x += enc.embeddings.row(id).transpose();
      x /= static_cast<double>(dev_ids[i].size());
      const Eigen::VectorXd a = (enc.proj_w * x + enc.proj_b).array().tanh();
      const Eigen::VectorXd logits = hd.w * a + hd.b;
      int best = 0;
      for (int c = 1; c < logits.size(); ++c)
        if (logits(c) > logits(best)) best = c;
      if (best == dev_labels[i]) ++correct;
    }
    return static_cast<double>(correct) /
           static_cast<double>(dev_ids.size());
  };

  Rng shuffle_rng(derive_seed(config.seed, 2));
  std::vector<std::size_t> order(train_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  // Two trackers: the stopping rule counts epochs without a ≥ δ improvement
  // over its own best; restoration keeps the earliest strictly-best epoch.
  double stop_best = -std::numeric_limits<double>::infinity();
  int epochs_without_improvement = 0;
  double restore_best_acc = -std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  Encoder best_encoder;
  Head best_head;

  Checkpoint ckpt;
  std::vector<std::vector<int>> batch_ids;
  std::vector<int> batch_labels;
  int epoch = 0;
  for (epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const auto end = std::min(order.size(),
                                start + static_cast<std::size_t>(config.batch_size));
      batch_ids.clear();
      batch_labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch_ids.push_back(train_ids[order[i]]);
        batch_labels.push_back(train_labels[order[i]]);
      }
      model_detail::batch_step(encoder, head, batch_ids, batch_labels,
                               config.learning_rate);
    }
    const double acc = dev_accuracy(encoder, head);
    ckpt.dev_accuracy_history.push_back(acc);
    if (acc > restore_best_acc) {
      restore_best_acc = acc;
      best_epoch = epoch;
      best_encoder = encoder;
      best_head = head;
    }
    if (acc - stop_best >= config.min_delta) {
      stop_best = acc;
      epochs_without_improvement = 0;
    } else {
      ++epochs_without_improvement;
      if (epochs_without_improvement >= config.patience) break;
    }
  }
  ckpt.epochs_trained = std::min(epoch, config.max_epochs);
  ckpt.best_epoch = best_epoch;
  ckpt.labels = labels;
  ckpt.task_name = task_name;
  ckpt.config = config;
  if (config.restore_best) {
    ckpt.encoder = std::move(best_encoder);
    ckpt.head = std::move(best_head);
    ckpt.dev_accuracy = restore_best_acc;
  } else {
    ckpt.encoder = std::move(encoder);
    ckpt.head = std::move(head);
    ckpt.dev_accuracy = ckpt.dev_accuracy_history.back();
  }
  return ckpt;
}

std::pair<Encoder, Head> transfer_init(const Checkpoint& source,
                                       const std::vector<std::string>& labels,
                                       const TrainConfig& config) {
  // The source head is discarded; only encoder parameters move across.
  Encoder encoder = source.encoder;
  Head head = Head::init(static_cast<int>(labels.size()), encoder.hidden(),
                         derive_seed(config.seed, 1));
  return {std::move(encoder), std::move(head)};
}

Checkpoint transfer(const Checkpoint& source, const TaskDataset& tt_train,
                    const TaskDataset& tt_dev, const TrainConfig& config,
                    const std::string& task_name) {
  return train(tt_train, tt_dev, source.encoder, config, task_name);
}

namespace {

constexpr char kCkptMagic[8] = {'E', 'M', 'O', 'C', 'K', 'P', 'T', '1'};

void write_block(std::ofstream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      out.write(reinterpret_cast<const char*>(&v), sizeof v);
    }
}

void read_block(std::ifstream& in, Eigen::MatrixXd& m, Eigen::Index rows,
                Eigen::Index cols, const std::string& path) {
  m.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double v = 0;
      in.read(reinterpret_cast<char*>(&v), sizeof v);
      if (!in) throw DataError("truncated checkpoint '" + path + "'");
      m(i, j) = v;
    }
}

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  ensure_parent_dir(path);
  json header;
  header["task_name"] = ckpt.task_name;
  header["labels"] = ckpt.labels;
  header["best_epoch"] = ckpt.best_epoch;
  header["epochs_trained"] = ckpt.epochs_trained;
  header["dev_accuracy"] = ckpt.dev_accuracy;
  header["dev_accuracy_history"] = ckpt.dev_accuracy_history;
  header["config"]["max_epochs"] = ckpt.config.max_epochs;
  header["config"]["patience"] = ckpt.config.patience;
  header["config"]["min_delta"] = ckpt.config.min_delta;
  header["config"]["learning_rate"] = ckpt.config.learning_rate;
  header["config"]["batch_size"] = ckpt.config.batch_size;
  header["config"]["seed"] = ckpt.config.seed;
  header["config"]["restore_best"] = ckpt.config.restore_best;
  header["dims"]["dim"] = ckpt.encoder.dim();
  header["dims"]["hidden"] = ckpt.encoder.hidden();
  header["vocab"] = ckpt.encoder.vocab.tokens;
  header["vocab_hash"] = hash_hex(ckpt.encoder.vocab.content_hash());
  const std::string header_str = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out.write(kCkptMagic, sizeof kCkptMagic);
  const std::uint64_t header_len = header_str.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof header_len);
  out.write(header_str.data(),
            static_cast<std::streamsize>(header_str.size()));
  write_block(out, ckpt.encoder.embeddings);
  write_block(out, ckpt.encoder.proj_w);
  write_block(out, ckpt.encoder.proj_b);
  write_block(out, ckpt.head.w);
  write_block(out, ckpt.head.b);
  if (!out) throw DataError("write failed for '" + path + "'");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  char magic[sizeof kCkptMagic];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCkptMagic, sizeof magic) != 0)
    throw DataError("'" + path + "' is not a checkpoint file");
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof header_len);
  std::string header_str(header_len, '\0');
  in.read(header_str.data(), static_cast<std::streamsize>(header_len));
  if (!in) throw DataError("truncated checkpoint header in '" + path + "'");
  json header = json::parse(header_str, nullptr, false);
  if (header.is_discarded())
    throw DataError("corrupt checkpoint header in '" + path + "'");

  Checkpoint ckpt;
  try {
    ckpt.task_name = header.at("task_name").get<std::string>();
    ckpt.labels = header.at("labels").get<std::vector<std::string>>();
    ckpt.best_epoch = header.at("best_epoch").get<int>();
    ckpt.epochs_trained = header.at("epochs_trained").get<int>();
    ckpt.dev_accuracy = header.at("dev_accuracy").get<double>();
    ckpt.dev_accuracy_history =
        header.at("dev_accuracy_history").get<std::vector<double>>();
    const auto& cfg = header.at("config");
    ckpt.config.max_epochs = cfg.at("max_epochs").get<int>();
    ckpt.config.patience = cfg.at("patience").get<int>();
    ckpt.config.min_delta = cfg.at("min_delta").get<double>();
    ckpt.config.learning_rate = cfg.at("learning_rate").get<double>();
    ckpt.config.batch_size = cfg.at("batch_size").get<int>();
    ckpt.config.seed = cfg.at("seed").get<std::uint64_t>();
    ckpt.config.restore_best = cfg.at("restore_best").get<bool>();
    const int dim = header.at("dims").at("dim").get<int>();
    const int hidden = header.at("dims").at("hidden").get<int>();
    const auto vocab_tokens =
        header.at("vocab").get<std::vector<std::string>>();
    ckpt.encoder.vocab.tokens = vocab_tokens;
    for (std::size_t i = 0; i < vocab_tokens.size(); ++i)
      ckpt.encoder.vocab.index.emplace(vocab_tokens[i], static_cast<int>(i));
    const auto n_vocab = static_cast<Eigen::Index>(vocab_tokens.size());
    const auto n_labels = static_cast<Eigen::Index>(ckpt.labels.size());
    read_block(in, ckpt.encoder.embeddings, n_vocab, dim, path);
    read_block(in, ckpt.encoder.proj_w, hidden, dim, path);
    Eigen::MatrixXd tmp;
    read_block(in, tmp, hidden, 1, path);
    ckpt.encoder.proj_b = tmp.col(0);
    read_block(in, ckpt.head.w, n_labels, hidden, path);
    read_block(in, tmp, n_labels, 1, path);
    ckpt.head.b = tmp.col(0);
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
  return ckpt;
}

}  // namespace emodist
