#pragma once

#include <string>
#include <vector>

#include "lexvit/lexvit.hpp"

namespace lexvit::testing {

inline Lexicon toy_lexicon() { return Lexicon::from_utf8({"ab", "ba", "bb", "bc", "bcd", "c"}); }

// One state per letter, noiseless emissions: the observation spells the word.
inline HmmConfig one_hot_config(std::u32string alphabet = U"abcdz") {
  HmmConfig config;
  config.states_per_letter = 1;
  config.self_loop_prob = 0.5;
  config.emission_peak = 1.0;
  config.alphabet = std::move(alphabet);
  return config;
}

// Every symbol equally likely from every state.
inline HmmConfig uniform_config() {
  HmmConfig config = one_hot_config(U"abcd");
  config.emission_peak = 0.25;
  return config;
}

inline ObservationSequence obs(const HmmConfig& config, std::string_view text) {
  return parse_observations(text, config);
}

inline std::vector<std::string> utf8_words(const std::vector<Hypothesis>& ranking) {
  std::vector<std::string> out;
  for (const auto& h : ranking) out.push_back(utf8::encode(h.word));
  return out;
}

}  // namespace lexvit::testing
