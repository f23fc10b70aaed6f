#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "lexvit/automaton.hpp"
#include "lexvit/decoder.hpp"
#include "lexvit/lexicon_hmm.hpp"

// Brute-force references.  Nothing here shares code with the lexicon-wide
// decoders beyond the model data itself.
namespace lexvit::oracle {

// Canonical DFS rank order on words: first differing letter decides; when one
// word is a prefix of the other, the longer one comes first (letter arcs
// precede the arc to the sink).
inline bool canonical_less(std::u32string_view a, std::u32string_view b) {
  const auto len = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < len; ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return a.size() > b.size();
}

inline std::vector<std::u32string> canonical_order(const Lexicon& lexicon) {
  auto words = lexicon.words();
  std::sort(words.begin(), words.end(), canonical_less);
  return words;
}

// Plain Viterbi over the single-word chain HMM of `word`.
inline LogScore score_word(std::u32string_view word, const LetterModels& models, const HmmConfig& config,
                           const ObservationSequence& obs) {
  const LexiconHmm chain = word_linear_hmm(word, models, config);
  if (obs.empty()) return LogScore::impossible();
  const std::size_t n = chain.state_count();
  std::vector<LogScore> prev(n, LogScore::impossible()), cur(n);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    for (StateId j = 0; j < n; ++j) {
      LogScore best = LogScore::impossible();
      for (const auto& tr : chain.predecessors(j)) {
        const LogScore from = tr.source == kStartState ? (t == 0 ? LogScore::certain() : LogScore::impossible())
                                                       : prev[tr.source];
        best = max(best, from + tr.log_prob);
      }
      cur[j] = best + chain.emission(j, obs[t]);
    }
    std::swap(prev, cur);
  }
  LogScore best = LogScore::impossible();
  for (const auto& f : chain.finals()) best = max(best, prev[f.state] + f.exit_log_prob);
  return best;
}

struct WordScore {
  std::u32string word;
  PathIndex pph = 0;  // canonical rank
  LogScore score;
};

// Every lexicon word with its score, in canonical order.
inline std::vector<WordScore> word_score_table(const Lexicon& lexicon, const LetterModels& models,
                                               const HmmConfig& config, const ObservationSequence& obs) {
  std::vector<WordScore> table;
  const auto words = canonical_order(lexicon);
  table.reserve(words.size());
  for (std::size_t r = 0; r < words.size(); ++r)
    table.push_back({words[r], r, score_word(words[r], models, config, obs)});
  return table;
}

// Top-n words by (score desc, pph asc); impossible words dropped.
inline std::vector<Hypothesis> nbest_exhaustive(const Lexicon& lexicon, const LetterModels& models,
                                                const HmmConfig& config, const ObservationSequence& obs,
                                                std::size_t n) {
  auto table = word_score_table(lexicon, models, config, obs);
  std::erase_if(table, [](const WordScore& w) { return w.score.is_impossible(); });
  std::sort(table.begin(), table.end(), [](const WordScore& a, const WordScore& b) {
    return a.score > b.score || (a.score == b.score && a.pph < b.pph);
  });
  std::vector<Hypothesis> out;
  for (std::size_t i = 0; i < table.size() && i < n; ++i)
    out.push_back(Hypothesis{table[i].word, table[i].pph, table[i].score});
  return out;
}

// Root-to-sink node paths in DFS completion order; the position of a path in
// this list is its ground-truth index.
inline std::vector<std::vector<NodeId>> enumerate_paths_dfs(const NodeAutomaton& a) {
  std::vector<std::vector<NodeId>> paths;
  std::vector<NodeId> path;
  auto walk = [&](auto&& self, NodeId v) -> void {
    path.push_back(v);
    if (v == a.sink())
      paths.push_back(path);
    else
      for (NodeId s : a.node(v).successors) self(self, s);
    path.pop_back();
  };
  walk(walk, a.root());
  return paths;
}

inline std::vector<std::u32string> enumerate_words_dfs(const NodeAutomaton& a) {
  std::vector<std::u32string> words;
  for (const auto& p : enumerate_paths_dfs(a)) {
    std::u32string w;
    for (NodeId v : p)
      if (a.node(v).kind == NodeKind::kLetter) w.push_back(a.node(v).label);
    words.push_back(std::move(w));
  }
  return words;
}

}  // namespace lexvit::oracle
