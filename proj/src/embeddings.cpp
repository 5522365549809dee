// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "emodist/errors.hpp"
#include "emodist/io.hpp"
#include "emodist/unicode.hpp"

namespace emodist {

void EmbeddingConfig::validate() const {
  if (dim < 1) throw ConfigError("embedding dim must be >= 1");
  if (window < 1) throw ConfigError("embedding window must be >= 1");
  if (negative_samples < 1)
    throw ConfigError("negative_samples must be >= 1");
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(learning_rate > 0)) throw ConfigError("learning_rate must be > 0");
  if (min_count < 0) throw ConfigError("min_count must be >= 0");
  if (!(unigram_power >= 0))
    throw ConfigError("unigram_power must be >= 0");
}

Vocab build_vocab(const FrequencyTable& freqs, const EmbeddingConfig& config) {
  config.validate();
  std::vector<std::pair<std::string, std::int64_t>> kept;
  kept.reserve(freqs.counts.size());
  for (const auto& [token, count] : freqs.counts)
    if (count >= config.min_count) kept.emplace_back(token, count);
  if (kept.empty())
    throw DataError("vocabulary is empty after min_count filtering");
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab v;
  v.tokens.reserve(kept.size());
  v.counts.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    v.tokens.push_back(kept[i].first);
    v.counts.push_back(kept[i].second);
    v.index.emplace(kept[i].first, static_cast<int>(i));
  }
  return v;
}

namespace cbow_detail {

void init_weights(int vocab_size, int dim, std::uint64_t seed,
                  Eigen::MatrixXd& w_in, Eigen::MatrixXd& w_out) {
  Rng rng(seed);
  const double bound = 0.5 / dim;
  w_in.resize(vocab_size, dim);
  for (int i = 0; i < vocab_size; ++i)
    for (int j = 0; j < dim; ++j) w_in(i, j) = rng.uniform(-bound, bound);
  w_out = Eigen::MatrixXd::Zero(vocab_size, dim);
}

std::vector<double> unigram_cdf(const std::vector<std::int64_t>& counts,
                                double power) {
  std::vector<double> cdf(counts.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    acc += std::pow(static_cast<double>(counts[i]), power);
    cdf[i] = acc;
  }
  for (auto& v : cdf) v /= acc;
  return cdf;
}

int sample_from_cdf(const std::vector<double>& cdf, double u) {
  const double x = u * cdf.back();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  const auto i = static_cast<std::size_t>(it - cdf.begin());
  return static_cast<int>(std::min(i, cdf.size() - 1));
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -log sigmoid(x), stable for large |x|.
inline double log_sigmoid_loss(double x) {
  // log(1 + e^-x): for very negative x this is ≈ -x.
  if (x > 0) return std::log1p(std::exp(-x));
  return -x + std::log1p(std::exp(x));
}

}  // namespace

double step_loss(const Eigen::MatrixXd& w_in, const Eigen::MatrixXd& w_out,
                 int target, const std::vector<int>& contexts,
                 const std::vector<int>& negatives) {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(w_in.cols());
  for (const int c : contexts) h += w_in.row(c).transpose();
  h /= static_cast<double>(contexts.size());
  double loss = log_sigmoid_loss(w_out.row(target).dot(h));
  for (const int n : negatives) {
    if (n == target) continue;
    loss += log_sigmoid_loss(-w_out.row(n).dot(h));
  }
  return loss;
}

double step_apply(Eigen::MatrixXd& w_in, Eigen::MatrixXd& w_out, int target,
                  const std::vector<int>& contexts,
                  const std::vector<int>& negatives, double learning_rate) {
  const auto dim = w_in.cols();
  const double inv_c = 1.0 / static_cast<double>(contexts.size());
  Eigen::VectorXd h = Eigen::VectorXd::Zero(dim);
  for (const int c : contexts) h += w_in.row(c).transpose();
  h *= inv_c;

  // All gradients are taken at the step-start parameters, then applied, so
  // the step is exactly one SGD update of step_loss even with duplicate rows.
  Eigen::VectorXd grad_h = Eigen::VectorXd::Zero(dim);
  std::vector<std::pair<int, double>> out_coeffs;  // row → dLoss/dscore
  const double s_t = w_out.row(target).dot(h);
  double loss = log_sigmoid_loss(s_t);
  out_coeffs.emplace_back(target, sigmoid(s_t) - 1.0);
  for (const int n : negatives) {
    if (n == target) continue;
    const double s_n = w_out.row(n).dot(h);
    loss += log_sigmoid_loss(-s_n);
    out_coeffs.emplace_back(n, sigmoid(s_n));
  }
  for (const auto& [row, g] : out_coeffs) grad_h += g * w_out.row(row).transpose();
  for (const auto& [row, g] : out_coeffs)
    w_out.row(row) -= learning_rate * g * h.transpose();
  const Eigen::RowVectorXd ctx_update =
      (learning_rate * inv_c) * grad_h.transpose();
  for (const int c : contexts) w_in.row(c) -= ctx_update;
  return loss;
}

}  // namespace cbow_detail

EmbeddingTable train_cbow_traced(const std::vector<Comment>& corpus,
                                 const EmbeddingConfig& config,
                                 CbowTrace& trace) {
  config.validate();
  const FrequencyTable freqs = build_frequency_table(corpus);
  Vocab vocab = build_vocab(freqs, config);

  Eigen::MatrixXd w_in, w_out;
  cbow_detail::init_weights(vocab.size(), config.dim, config.seed, w_in,
                            w_out);

  // In-vocabulary id sequences; emojis are ordinary tokens in their comment.
  std::vector<std::vector<int>> sequences;
  sequences.reserve(corpus.size());
  std::size_t n_pairs = 0;
  for (const auto& c : corpus) {
    std::vector<int> seq;
    seq.reserve(c.tokens.size() + c.emojis.size());
    for (const auto& t : c.tokens)
      if (const int id = vocab.lookup(t); id >= 0) seq.push_back(id);
    for (const auto& e : c.emojis)
      if (const int id = vocab.lookup(e); id >= 0) seq.push_back(id);
    if (seq.size() >= 2) n_pairs += seq.size();
    if (!seq.empty()) sequences.push_back(std::move(seq));
  }
  if (config.epochs >= 1 && n_pairs == 0)
    throw DataError(
        "corpus provides no training contexts (shorter than one window)");

  const auto cdf = cbow_detail::unigram_cdf(vocab.counts, config.unigram_power);
  Rng rng(derive_seed(config.seed, 0x9e3779b97f4a7c15ull));
  std::vector<int> contexts, negatives;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    std::size_t epoch_steps = 0;
    for (const auto& seq : sequences) {
      const int len = static_cast<int>(seq.size());
      if (len < 2) continue;
      for (int t = 0; t < len; ++t) {
        contexts.clear();
        const int lo = std::max(0, t - config.window);
        const int hi = std::min(len - 1, t + config.window);
        for (int k = lo; k <= hi; ++k)
          if (k != t) contexts.push_back(seq[k]);
        if (contexts.empty()) continue;
        negatives.clear();
        for (int k = 0; k < config.negative_samples; ++k)
          negatives.push_back(
              cbow_detail::sample_from_cdf(cdf, rng.uniform()));
        const double loss = cbow_detail::step_apply(
            w_in, w_out, seq[t], contexts, negatives, config.learning_rate);
        epoch_loss += loss;
        ++epoch_steps;
        if (config.collect_step_losses) trace.step_losses.push_back(loss);
      }
    }
    trace.epoch_mean_loss.push_back(
        epoch_steps == 0 ? 0.0 : epoch_loss / static_cast<double>(epoch_steps));
  }

  EmbeddingTable table;
  table.vocab = std::move(vocab);
  table.vectors = std::move(w_in);
  return table;
}

EmbeddingTable train_cbow(const std::vector<Comment>& corpus,
                          const EmbeddingConfig& config) {
  CbowTrace trace;
  return train_cbow_traced(corpus, config, trace);
}

std::map<std::string, Eigen::VectorXd> emoji_vectors(
    const EmbeddingTable& table, const FrequencyTable& freqs,
    std::int64_t threshold) {
  std::map<std::string, Eigen::VectorXd> out;
  for (int i = 0; i < table.vocab.size(); ++i) {
    const auto& token = table.vocab.tokens[i];
    if (!uni::is_emoji_token(token)) continue;
    if (freqs.count(token) < threshold) continue;
    out.emplace(token, table.vectors.row(i).transpose());
  }
  if (out.empty())
    throw DataError("no emoji reaches the occurrence threshold " +
                    std::to_string(threshold));
  return out;
}

namespace {

constexpr char kSidecarMagic[8] = {'E', 'M', 'B', 'D', 'B', 'I', 'N', '1'};

}  // namespace

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  ensure_parent_dir(path);
  // Interoperable text format.
  std::ostringstream text;
  text << table.vocab.size() << ' ' << table.dim() << '\n';
  text.precision(17);
  for (int i = 0; i < table.vocab.size(); ++i) {
    text << table.vocab.tokens[i];
    for (int j = 0; j < table.dim(); ++j) text << ' ' << table.vectors(i, j);
    text << '\n';
  }
  write_file(path, text.str());

  // Bit-exact sidecar: sizes, then per token (length, bytes, count, row).
  std::ofstream bin(path + ".bin", std::ios::binary);
  if (!bin) throw DataError("cannot write '" + path + ".bin'");
  bin.write(kSidecarMagic, sizeof kSidecarMagic);
  const std::uint64_t n = static_cast<std::uint64_t>(table.vocab.size());
  const std::uint32_t dim = static_cast<std::uint32_t>(table.dim());
  bin.write(reinterpret_cast<const char*>(&n), sizeof n);
  bin.write(reinterpret_cast<const char*>(&dim), sizeof dim);
  std::vector<double> row(dim);
  for (int i = 0; i < table.vocab.size(); ++i) {
    const auto& tok = table.vocab.tokens[i];
    const std::uint32_t len = static_cast<std::uint32_t>(tok.size());
    bin.write(reinterpret_cast<const char*>(&len), sizeof len);
    bin.write(tok.data(), len);
    const std::int64_t count = table.vocab.counts[i];
    bin.write(reinterpret_cast<const char*>(&count), sizeof count);
    for (std::uint32_t j = 0; j < dim; ++j) row[j] = table.vectors(i, j);
    bin.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(sizeof(double) * dim));
  }
  if (!bin) throw DataError("write failed for '" + path + ".bin'");
}

EmbeddingTable load_embeddings(const std::string& path) {
  const std::string sidecar = path + ".bin";
  if (!file_exists(sidecar))
    throw DataError("missing embedding sidecar '" + sidecar + "'");
  std::ifstream bin(sidecar, std::ios::binary);
  if (!bin) throw DataError("cannot open '" + sidecar + "'");
  char magic[sizeof kSidecarMagic];
  bin.read(magic, sizeof magic);
  if (!bin || std::memcmp(magic, kSidecarMagic, sizeof magic) != 0)
    throw DataError("'" + sidecar + "' is not an embedding sidecar");
  std::uint64_t n = 0;
  std::uint32_t dim = 0;
  bin.read(reinterpret_cast<char*>(&n), sizeof n);
  bin.read(reinterpret_cast<char*>(&dim), sizeof dim);
  if (!bin || dim == 0) throw DataError("corrupt sidecar header");
  EmbeddingTable table;
  table.vectors.resize(static_cast<Eigen::Index>(n), dim);
  std::vector<double> row(dim);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::uint32_t len = 0;
    bin.read(reinterpret_cast<char*>(&len), sizeof len);
    std::string tok(len, '\0');
    bin.read(tok.data(), len);
    std::int64_t count = 0;
    bin.read(reinterpret_cast<char*>(&count), sizeof count);
    bin.read(reinterpret_cast<char*>(row.data()),
             static_cast<std::streamsize>(sizeof(double) * dim));
    if (!bin) throw DataError("corrupt sidecar row in '" + sidecar + "'");
    table.vocab.tokens.push_back(tok);
    table.vocab.counts.push_back(count);
    table.vocab.index.emplace(std::move(tok), static_cast<int>(i));
    for (std::uint32_t j = 0; j < dim; ++j)
      table.vectors(static_cast<Eigen::Index>(i), j) = row[j];
  }
  return table;
}

}  // namespace emodist
