// Apache License, Version 2.0, refer to LICENSE.txt
#include "emodist/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "emodist/errors.hpp"
#include "emodist/io.hpp"
#include "emodist/rng.hpp"
#include "emodist/unicode.hpp"

namespace emodist {

namespace {

std::vector<std::string> emoji_block(char32_t base, int n) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const char32_t cp = base + static_cast<char32_t>(i);
    out.push_back(uni::encode_utf8(&cp, &cp + 1));
  }
  return out;
}

std::vector<std::string> named_words(const std::string& prefix, int n) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.push_back(prefix + std::to_string(i));
  }
  return out;
}

// Zipf-weighted draw over a lexicon: weight of rank r is 1/(r+1)^power.
class ZipfPicker {
 public:
  ZipfPicker(std::size_t n, double power) : cdf_(n) {
    double acc = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      acc += 1.0 / std::pow(static_cast<double>(r + 1), power);
      cdf_[r] = acc;
    }
    for (double& v : cdf_) v /= acc;
  }

  std::size_t pick(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cdf_.begin());
    return std::min(idx, cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

const std::vector<std::string>& slur_terms() {
  static const std::vector<std::string> kTerms = {"sw0", "sw1", "sw2", "sw3"};
  return kTerms;
}

struct Registers {
  std::vector<std::string> pos_words;
  std::vector<std::string> neg_words;
  std::vector<std::string> fillers;
  std::vector<std::string> plain_pos;
  std::vector<std::string> plain_neg;
  std::vector<std::string> pos_emojis;
  std::vector<std::string> neg_emojis;
  std::vector<std::string> tail;
};

Registers make_registers(const SynthConfig& config) {
  Registers reg;
  reg.pos_words = named_words("pw", config.words_per_class);
  reg.neg_words = named_words("nw", config.words_per_class);
  reg.fillers = named_words("fw", config.neutral_words);
  reg.plain_pos = named_words("pp", config.plain_words_per_class);
  reg.plain_neg = named_words("np", config.plain_words_per_class);
  reg.pos_emojis = config.positive_emojis();
  reg.neg_emojis = config.negative_emojis();
  reg.tail = config.tail_emoji_set();
  return reg;
}

void check_config(const SynthConfig& config) {
  if (config.words_per_class < 1 || config.neutral_words < 1 ||
      config.plain_words_per_class < 1 || config.emojis_per_class < 1) {
    throw ConfigError("synth lexicon sizes must be positive");
  }
  if (config.tail_emojis < 0) {
    throw ConfigError("synth tail emoji count must be non-negative");
  }
  if (config.min_len < 1 || config.max_len < config.min_len) {
    throw ConfigError("synth length bounds invalid");
  }
}

int draw_len(const SynthConfig& config, Rng& rng) {
  return config.min_len +
         static_cast<int>(rng.below(
             static_cast<std::uint64_t>(config.max_len - config.min_len + 1)));
}

}  // namespace

std::vector<std::string> SynthConfig::positive_emojis() const {
  return emoji_block(0x1F600, emojis_per_class);
}

std::vector<std::string> SynthConfig::negative_emojis() const {
  return emoji_block(0x1F400, emojis_per_class);
}

std::vector<std::string> SynthConfig::tail_emoji_set() const {
  return emoji_block(0x1F910, tail_emojis);
}

std::vector<RawComment> synth_st_corpus(const SynthConfig& config,
                                        const StSynthOptions& options) {
  check_config(config);
  if (options.n_comments < 1) {
    throw ConfigError("synth corpus size must be positive");
  }
  const Registers reg = make_registers(config);
  const ZipfPicker polar_pick(reg.pos_words.size(), config.zipf_power);
  const ZipfPicker filler_pick(reg.fillers.size(), config.zipf_power);

  Rng rng(options.seed);
  std::vector<RawComment> out;
  out.reserve(static_cast<std::size_t>(options.n_comments));
  for (int i = 0; i < options.n_comments; ++i) {
    const bool positive = rng.uniform() < 0.5;
    const auto& lexicon = positive ? reg.pos_words : reg.neg_words;
    std::vector<std::string> words;
    const int len = draw_len(config, rng);
    for (int w = 0; w < len; ++w) {
      if (rng.uniform() < options.polar_word_rate) {
        words.push_back(lexicon[polar_pick.pick(rng)]);
      } else {
        words.push_back(reg.fillers[filler_pick.pick(rng)]);
      }
    }
    if (!positive && rng.uniform() < options.slur_rate) {
      const auto& terms = slur_terms();
      const std::size_t at = rng.below(words.size() + 1);
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at),
                   terms[rng.below(terms.size())]);
    }
    if (rng.uniform() < options.emoji_rate) {
      const int n_emojis = 1 + (rng.uniform() < 0.3 ? 1 : 0);
      for (int e = 0; e < n_emojis; ++e) {
        bool emoji_positive = positive;
        if (rng.uniform() < options.emoji_noise) emoji_positive = !positive;
        const auto& set = emoji_positive ? reg.pos_emojis : reg.neg_emojis;
        words.push_back(set[rng.below(set.size())]);
      }
    }
    std::string text;
    for (std::size_t w = 0; w < words.size(); ++w) {
      if (w > 0) text += ' ';
      text += words[w];
    }
    RawComment comment;
    comment.id = "s" + std::to_string(i);
    comment.text = text;
    comment.lang = options.lang;
    out.push_back(std::move(comment));
  }
  return out;
}

TaskDataset synth_target_task(const SynthConfig& config,
                              const TtSynthOptions& options,
                              const std::string& name, Split split) {
  check_config(config);
  if (options.n_instances < 1) {
    throw ConfigError("synth target size must be positive");
  }
  if (options.majority_fraction < 0.0 || options.majority_fraction > 1.0) {
    throw ConfigError("synth majority fraction must lie in [0, 1]");
  }
  if (options.tail_rate > 0.0 && config.tail_emojis < 1) {
    throw ConfigError("synth tail rate requires a non-empty tail emoji set");
  }
  const Registers reg = make_registers(config);
  const ZipfPicker polar_pick(reg.pos_words.size(), config.zipf_power);
  const ZipfPicker filler_pick(reg.fillers.size(), config.zipf_power);
  const ZipfPicker plain_pick(reg.plain_pos.size(), config.zipf_power);

  TaskDataset ds;
  ds.name = name;
  ds.kind = DatasetKind::target;
  ds.split = split;
  ds.labels = {"negative", "positive"};

  Rng rng(options.seed);
  for (int i = 0; i < options.n_instances; ++i) {
    const bool positive = rng.uniform() < options.majority_fraction;
    const bool with_emoji = rng.uniform() < options.emoji_rate;
    Instance inst;
    inst.label = positive ? "positive" : "negative";
    inst.origin_id = "synth:" + std::to_string(i);
    inst.had_emoji = with_emoji;
    const int len = draw_len(config, rng);
    if (with_emoji) {
      // Source register: the words the source corpus was built from.
      const auto& lexicon = positive ? reg.pos_words : reg.neg_words;
      for (int w = 0; w < len; ++w) {
        if (rng.uniform() < options.polar_word_rate) {
          inst.tokens.push_back(lexicon[polar_pick.pick(rng)]);
        } else {
          inst.tokens.push_back(reg.fillers[filler_pick.pick(rng)]);
        }
      }
      const int n_emojis = 1 + (rng.uniform() < 0.3 ? 1 : 0);
      for (int e = 0; e < n_emojis; ++e) {
        if (options.tail_rate > 0.0 && rng.uniform() < options.tail_rate) {
          inst.tokens.push_back(reg.tail[rng.below(reg.tail.size())]);
          continue;
        }
        bool emoji_positive = positive;
        if (rng.uniform() < options.emoji_noise) emoji_positive = !positive;
        const auto& set = emoji_positive ? reg.pos_emojis : reg.neg_emojis;
        inst.tokens.push_back(set[rng.below(set.size())]);
      }
    } else {
      // Plain register: words the source corpus never contained.
      const auto& lexicon = positive ? reg.plain_pos : reg.plain_neg;
      const auto& other = positive ? reg.plain_neg : reg.plain_pos;
      for (int w = 0; w < len; ++w) {
        if (rng.uniform() < options.plain_word_signal) {
          inst.tokens.push_back(lexicon[plain_pick.pick(rng)]);
        } else if (rng.uniform() < 0.5) {
          inst.tokens.push_back(other[plain_pick.pick(rng)]);
        } else {
          inst.tokens.push_back(reg.fillers[filler_pick.pick(rng)]);
        }
      }
    }
    ds.instances.push_back(std::move(inst));
  }
  ds.validate();
  return ds;
}

void synth_target_file(const SynthConfig& config, const TtSynthOptions& options,
                       const std::string& path) {
  const TaskDataset ds =
      synth_target_task(config, options, "synth", Split::train);
  std::ostringstream out;
  out << "text\tlabel\n";
  for (const auto& inst : ds.instances) {
    std::string text;
    for (std::size_t w = 0; w < inst.tokens.size(); ++w) {
      if (w > 0) text += ' ';
      text += inst.tokens[w];
    }
    out << text << '\t' << (inst.label == "positive" ? "pos" : "neg") << '\n';
  }
  write_file(path, out.str());
}

void synth_slur_lexicon(const std::string& path) {
  std::string body;
  for (const auto& term : slur_terms()) body += term + "\n";
  write_file(path, body);
}

}  // namespace emodist
