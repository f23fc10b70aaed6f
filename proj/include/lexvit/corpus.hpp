#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lexvit/letter_hmm.hpp"
#include "lexvit/lexicon.hpp"

namespace lexvit {

struct CorpusEntry {
  std::optional<std::u32string> truth;  // from a preceding `# truth <word>` line
  ObservationSequence observations;
  std::string error;  // non-empty when the line could not be parsed
  std::size_t line = 0;
};

// Samples `count` sequences, each from a uniformly chosen lexicon word.
inline std::vector<CorpusEntry> generate_corpus(const Lexicon& lexicon, const HmmConfig& config, std::size_t count,
                                                std::uint64_t seed) {
  std::vector<CorpusEntry> out;
  if (count == 0) return out;
  if (lexicon.empty()) throw ConstructionError("cannot sample from an empty lexicon");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, lexicon.size() - 1);
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const auto& word = lexicon.words()[pick(rng)];
    const std::uint64_t sample_seed = rng();
    out.push_back(CorpusEntry{word, sample_observations(word, config, sample_seed), {}, 0});
  }
  return out;
}

inline std::string format_corpus(const std::vector<CorpusEntry>& corpus, const HmmConfig& config) {
  std::string out;
  for (const auto& entry : corpus) {
    if (entry.truth) out += "# truth " + utf8::encode(*entry.truth) + '\n';
    out += format_observations(entry.observations, config) + '\n';
  }
  return out;
}

// One sequence per non-blank line; `#` lines are comments, except that a
// `# truth <word>` comment labels the next sequence.  Lines with symbols
// outside the alphabet are kept with `error` set.
inline std::vector<CorpusEntry> parse_corpus(std::string_view text, const HmmConfig& config) {
  std::vector<CorpusEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::u32string> pending_truth;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.starts_with('#')) {
      std::istringstream ss(line.substr(1));
      std::string tag, word;
      if (ss >> tag >> word && tag == "truth") pending_truth = utf8::decode(word);
      continue;
    }
    CorpusEntry entry;
    entry.line = line_no;
    entry.truth = std::move(pending_truth);
    pending_truth.reset();
    try {
      entry.observations = parse_observations(line, config);
    } catch (const ValidationError& e) {
      entry.error = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace lexvit
