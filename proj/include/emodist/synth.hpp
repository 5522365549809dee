// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "emodist/corpus.hpp"
#include "emodist/tasks.hpp"

namespace emodist {

// Deterministic two-polarity synthetic world. The source corpus pairs a
// positive word register with one emoji set and a negative register with
// another, mirroring the co-occurrence structure distant supervision needs.
// Target-task instances come in two registers: emoji-bearing instances use
// the source-corpus word registers (that is what makes them transferable),
// emoji-free instances use a plain register the source corpus never saw.
struct SynthConfig {
  int words_per_class = 300;        // source-register polarity lexicon size
  int neutral_words = 400;          // source-register filler lexicon
  int plain_words_per_class = 150;  // plain-register polarity lexicons
  int emojis_per_class = 30;
  int tail_emojis = 80;  // label-independent rare emojis (target side)
  int min_len = 4;
  int max_len = 12;
  double zipf_power = 1.0;  // word draw: weight 1/rank^power

  std::vector<std::string> positive_emojis() const;
  std::vector<std::string> negative_emojis() const;
  std::vector<std::string> tail_emoji_set() const;
};

struct StSynthOptions {
  int n_comments = 20000;
  double emoji_rate = 0.9;      // fraction of comments bearing emojis
  double emoji_noise = 0.1;     // probability an emoji flips polarity
  double polar_word_rate = 0.55;  // polarity-lexicon share of words
  double slur_rate = 0.08;  // negative comments carrying a planted slur term
  std::uint64_t seed = 1;
  std::string lang = "xx";
};

std::vector<RawComment> synth_st_corpus(const SynthConfig& config,
                                        const StSynthOptions& options);

struct TtSynthOptions {
  int n_instances = 500;
  double emoji_rate = 0.95;        // emoji-bearing instance share
  double majority_fraction = 0.5;  // share of the designated majority label
  double emoji_noise = 0.1;
  double tail_rate = 0.0;  // emoji draws taken from the neutral tail set
  double polar_word_rate = 0.5;    // emoji-bearing instances (source register)
  double plain_word_signal = 0.8;  // emoji-free instances (plain register)
  std::uint64_t seed = 2;
};

// Labels are {"negative", "positive"}; "positive" is the designated
// majority label when majority_fraction > 0.5.
TaskDataset synth_target_task(const SynthConfig& config,
                              const TtSynthOptions& options,
                              const std::string& name, Split split);

// The same instances rendered as a raw delimited file (header "text<TAB>label",
// raw labels "pos"/"neg") for exercising the target-task loader.
void synth_target_file(const SynthConfig& config, const TtSynthOptions& options,
                       const std::string& path);

// A small slur lexicon file paired with synth_st_corpus: the generator
// plants these terms in a slice of negative comments.
void synth_slur_lexicon(const std::string& path);

}  // namespace emodist
