#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lexvit/automaton.hpp"
#include "lexvit/decoder.hpp"
#include "lexvit/lexicon_hmm.hpp"
#include "lexvit/oracle.hpp"
#include "lexvit/pph.hpp"

// Randomized equivalence suite: path-index bijection, agreement of the three
// 1-best decoders, and agreement of both n-best decoders with the exhaustive
// oracle.
namespace lexvit::verify {

struct Instance {
  Lexicon lexicon;
  HmmConfig config;
  ObservationSequence observations;
  std::uint64_t seed = 0;
};

struct Failure {
  std::string check;
  std::string detail;
};

struct CheckOptions {
  std::size_t max_n = 5;
  bool corrupt_increment = false;  // fault injection: bump the root's first arc increment
};

inline std::string describe(const std::vector<Hypothesis>& ranking) {
  std::string out = "[";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", ranking[i].score.to_double());
    out += (i ? ", (" : "(") + utf8::encode(ranking[i].word) + ' ' + std::to_string(ranking[i].pph) + ' ' + buf + ')';
  }
  return out + "]";
}

inline std::optional<Failure> check_path_index(const AnnotatedAutomaton& annotated) {
  const auto& a = annotated.automaton();
  const auto paths = oracle::enumerate_paths_dfs(a);
  const auto w = annotated.word_count();
  if (paths.size() != w)
    return Failure{"pph-bijection", "DFS found " + std::to_string(paths.size()) + " paths, suff(root)=" + std::to_string(w)};
  std::vector<char> seen(w, 0);
  for (std::size_t pos = 0; pos < paths.size(); ++pos) {
    const PathIndex value = annotated.encode(paths[pos]);
    if (value != pos)
      return Failure{"pph-dfs-order", "path " + utf8::encode(path_word(a, paths[pos])) + " encodes to " +
                                          std::to_string(value) + " at DFS position " + std::to_string(pos)};
    if (value >= w || seen[value]++)
      return Failure{"pph-bijection", "value " + std::to_string(value) + " out of range or repeated"};
    std::vector<NodeId> back;
    try {
      back = decode_path(a, annotated.suff(), value);
    } catch (const std::exception& e) {
      return Failure{"pph-roundtrip", e.what()};
    }
    if (back != paths[pos]) return Failure{"pph-roundtrip", "decode(encode(p)) != p for value " + std::to_string(value)};
  }
  return std::nullopt;
}

inline std::optional<Failure> check_instance(const Instance& inst, const CheckOptions& options = {}) {
  HmmConfig config = inst.config;
  config.routing = Routing::kLexical;  // word-level oracle scores assume lexical routing

  const NodeAutomaton trie = build_trie(inst.lexicon);
  const NodeAutomaton dawg = minimize(trie);
  if (language(dawg) != language(trie)) return Failure{"language", "minimization changed the language"};

  AnnotatedAutomaton annotated(dawg);
  if (options.corrupt_increment) {
    const NodeId root = annotated.automaton().root();
    annotated.corrupt_increment(root, 0, annotated.increments()[root][0] + 1);
  }
  if (auto f = check_path_index(annotated)) return f;
  if (auto f = check_path_index(AnnotatedAutomaton(trie))) return Failure{f->check + "(trie)", f->detail};

  const auto models = make_letter_hmms(inst.lexicon.letters(), config);
  const LexiconHmm hmm = expand(annotated, models, config);
  const auto& obs = inst.observations;
  const std::size_t n_states = hmm.state_count();

  const auto tab = viterbi_tabular(hmm, obs);
  const auto flip = viterbi_flipflop(hmm, obs);
  const auto inplace = viterbi_inplace(hmm, obs);
  if (tab.ranking != flip.ranking || flip.ranking != inplace.ranking)
    return Failure{"1best-agreement", "tabular " + describe(tab.ranking) + " flipflop " + describe(flip.ranking) +
                                          " inplace " + describe(inplace.ranking)};
  if (tab.counters.token_slots != n_states * obs.size() || flip.counters.token_slots != 2 * n_states ||
      inplace.counters.token_slots != n_states)
    return Failure{"token-slots", "unexpected token slot counts"};
  if (!tab.ranking.empty()) {
    const PathIndex traced = annotated.encode(tab.backtracked_path);
    if (traced != tab.ranking[0].pph)
      return Failure{"pph-consistency", "backtracked path encodes to " + std::to_string(traced) + ", token pph " +
                                            std::to_string(tab.ranking[0].pph)};
  }

  const auto truth = oracle::nbest_exhaustive(inst.lexicon, models, config, obs, options.max_n);
  const std::vector<Hypothesis> truth_best(truth.begin(), truth.begin() + std::min<std::size_t>(1, truth.size()));
  if (tab.ranking != truth_best)
    return Failure{"1best-oracle", "decoders " + describe(tab.ranking) + " oracle " + describe(truth_best)};

  for (std::size_t n = 1; n <= options.max_n; ++n) {
    const auto naive = nbest_naive(hmm, obs, n);
    const auto improved = nbest_improved(hmm, obs, n);
    const std::vector<Hypothesis> expected(truth.begin(), truth.begin() + std::min(n, truth.size()));
    if (naive.ranking != expected || improved.ranking != expected)
      return Failure{"nbest-oracle", "n=" + std::to_string(n) + " naive " + describe(naive.ranking) + " improved " +
                                         describe(improved.ranking) + " oracle " + describe(expected)};
    if (improved.counters.merges > naive.counters.merges)
      return Failure{"nbest-merges", "n=" + std::to_string(n) + " improved merges " +
                                         std::to_string(improved.counters.merges) + " > naive " +
                                         std::to_string(naive.counters.merges)};
  }
  return std::nullopt;
}

// Random sub-lexicon of `base` and an observation sequence that is either a
// noisy sample of one of its words or uniform noise.
inline Instance random_instance(const Lexicon& base, const HmmConfig& config, std::uint64_t seed,
                                std::size_t max_words = 40) {
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.seed = seed;
  inst.config = config;
  auto words = base.words();
  std::shuffle(words.begin(), words.end(), rng);
  const std::size_t limit = std::min(words.size(), max_words);
  words.resize(std::uniform_int_distribution<std::size_t>(1, limit)(rng));
  inst.lexicon = Lexicon::from_words(words);

  const auto m = static_cast<SymbolId>(config.alphabet.size());
  std::uniform_int_distribution<SymbolId> any_symbol(0, m - 1);
  std::bernoulli_distribution from_word(0.75), mutate(0.15);
  if (from_word(rng)) {
    const auto& w = inst.lexicon.words()[std::uniform_int_distribution<std::size_t>(0, inst.lexicon.size() - 1)(rng)];
    inst.observations = sample_observations(w, config, rng());
    for (auto& o : inst.observations)
      if (mutate(rng)) o = any_symbol(rng);
  } else {
    inst.observations.resize(std::uniform_int_distribution<std::size_t>(1, 12)(rng));
    for (auto& o : inst.observations) o = any_symbol(rng);
  }
  return inst;
}

// Greedy reduction: drop words, then observation symbols, while the failure
// persists.
inline Instance shrink(Instance inst, const CheckOptions& options) {
  auto fails = [&](const Instance& candidate) {
    try {
      return check_instance(candidate, options).has_value();
    } catch (const std::exception&) {
      return true;
    }
  };
  bool changed = true;
  while (changed) {
    changed = false;
    const auto words = inst.lexicon.words();
    for (std::size_t i = 0; i < words.size() && words.size() > 1; ++i) {
      auto fewer = words;
      fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
      Instance candidate = inst;
      candidate.lexicon = Lexicon::from_words(fewer);
      if (fails(candidate)) {
        inst = std::move(candidate);
        changed = true;
        break;
      }
    }
    if (changed) continue;
    for (std::size_t t = 0; t < inst.observations.size(); ++t) {
      Instance candidate = inst;
      candidate.observations.erase(candidate.observations.begin() + static_cast<std::ptrdiff_t>(t));
      if (fails(candidate)) {
        inst = std::move(candidate);
        changed = true;
        break;
      }
    }
  }
  return inst;
}

inline std::string describe(const Instance& inst, const Failure& failure) {
  std::string out = "check: " + failure.check + "\ndetail: " + failure.detail + "\nseed: " + std::to_string(inst.seed) +
                    "\nlexicon:";
  for (const auto& w : inst.lexicon.words()) out += ' ' + utf8::encode(w);
  out += "\nobservations: " + format_observations(inst.observations, inst.config) + '\n';
  return out;
}

struct Report {
  std::size_t instances = 0;
  std::optional<Instance> counterexample;  // already shrunk
  std::optional<Failure> failure;
};

inline std::uint64_t instance_seed(std::uint64_t seed, std::size_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline Report run(const Lexicon& base, const HmmConfig& config, std::size_t instances, std::uint64_t seed,
                  const CheckOptions& options = {}) {
  Report report;
  for (std::size_t i = 0; i < instances; ++i) {
    Instance inst = random_instance(base, config, instance_seed(seed, i));
    std::optional<Failure> failure;
    try {
      failure = check_instance(inst, options);
    } catch (const std::exception& e) {
      failure = Failure{"exception", e.what()};
    }
    ++report.instances;
    if (failure) {
      Instance small = shrink(inst, options);
      std::optional<Failure> small_failure;
      try {
        small_failure = check_instance(small, options);
      } catch (const std::exception& e) {
        small_failure = Failure{"exception", e.what()};
      }
      report.counterexample = std::move(small);
      report.failure = small_failure ? small_failure : failure;
      break;
    }
  }
  return report;
}

}  // namespace lexvit::verify
