#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lexvit/letter_hmm.hpp"
#include "lexvit/lexicon.hpp"

// Synthetic lexicons and observations for tests and benchmarks.
namespace lexvit::synth {

inline std::u32string latin_alphabet(std::size_t size) {
  std::u32string out;
  for (std::size_t i = 0; i < size && i < 26; ++i) out.push_back(static_cast<char32_t>(U'a' + i));
  return out;
}

inline std::u32string random_word(std::mt19937_64& rng, std::u32string_view alphabet, std::size_t min_len,
                                  std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> letter(0, alphabet.size() - 1);
  std::u32string w(len(rng), U' ');
  for (auto& c : w) c = alphabet[letter(rng)];
  return w;
}

// `count` distinct random words (fewer if the alphabet cannot supply them).
inline Lexicon random_lexicon(std::mt19937_64& rng, std::size_t count, std::u32string_view alphabet,
                              std::size_t min_len = 1, std::size_t max_len = 8) {
  std::set<std::u32string> words;
  for (std::size_t attempts = 0; words.size() < count && attempts < count * 50; ++attempts)
    words.insert(random_word(rng, alphabet, min_len, max_len));
  return Lexicon::from_words({words.begin(), words.end()});
}

// Every prefix from one pool concatenated with every suffix from another:
// the shape that gives a DAWG the most sharing over the trie.
inline Lexicon prefix_suffix_lexicon(std::size_t prefixes, std::size_t suffixes, std::u32string_view alphabet,
                                     std::uint64_t seed, std::size_t prefix_len = 4, std::size_t suffix_len = 5) {
  std::mt19937_64 rng(seed);
  auto pool = [&](std::size_t count, std::size_t len) {
    std::set<std::u32string> out;
    for (std::size_t attempts = 0; out.size() < count && attempts < count * 100; ++attempts)
      out.insert(random_word(rng, alphabet, len - 1, len + 1));
    return std::vector<std::u32string>(out.begin(), out.end());
  };
  const auto heads = pool(prefixes, prefix_len);
  const auto tails = pool(suffixes, suffix_len);
  std::vector<std::u32string> words;
  words.reserve(heads.size() * tails.size());
  for (const auto& h : heads)
    for (const auto& t : tails) words.push_back(h + t);
  return Lexicon::from_words(std::move(words));
}

inline ObservationSequence random_observations(std::mt19937_64& rng, std::size_t length, std::size_t alphabet_size) {
  std::uniform_int_distribution<SymbolId> pick(0, static_cast<SymbolId>(alphabet_size - 1));
  ObservationSequence out(length);
  for (auto& o : out) o = pick(rng);
  return out;
}

}  // namespace lexvit::synth
