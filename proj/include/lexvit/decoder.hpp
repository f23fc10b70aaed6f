#pragma once

#include <algorithm>
#include <cassert>
#include <concepts>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lexvit/errors.hpp"
#include "lexvit/lexicon_hmm.hpp"
#include "lexvit/score.hpp"

namespace lexvit {

template <std::unsigned_integral Pph = std::uint32_t>
struct Token {
  LogScore score = LogScore::impossible();
  Pph pph = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

// Ranking order shared by every decoder and the oracle: higher score first,
// equal scores broken by the smaller path index.
template <std::unsigned_integral Pph>
constexpr bool outranks(LogScore score, Pph pph, LogScore other_score, Pph other_pph) {
  return score > other_score || (score == other_score && pph < other_pph);
}

template <std::unsigned_integral Pph>
constexpr bool outranks(const Token<Pph>& a, const Token<Pph>& b) {
  return outranks(a.score, a.pph, b.score, b.pph);
}

struct DecodeCounters {
  std::uint64_t ops = 0;          // predecessor (x rank) visits
  std::uint64_t merges = 0;       // candidates entering an n-best merge
  std::uint64_t emissions = 0;    // emission log-probability additions
  std::uint64_t token_slots = 0;  // tokens of storage held across time steps
};

struct Hypothesis {
  std::u32string word;
  PathIndex pph = 0;
  LogScore score;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

struct DecodeResult {
  std::vector<Hypothesis> ranking;  // best first, distinct words
  DecodeCounters counters;
  // Automaton node path (root .. sink) of the winner; only the tabular
  // decoder fills this, by backtracking.
  std::vector<NodeId> backtracked_path;
};

// Up to n tokens with distinct path indices, best first.
template <std::unsigned_integral Pph = std::uint32_t>
class TokenList {
 public:
  explicit TokenList(std::size_t capacity = 1) : capacity_(capacity) { tokens_.reserve(capacity); }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return tokens_.size(); }
  bool empty() const { return tokens_.empty(); }
  const Token<Pph>& operator[](std::size_t k) const { return tokens_[k]; }
  Token<Pph>& operator[](std::size_t k) { return tokens_[k]; }
  std::span<const Token<Pph>> tokens() const { return tokens_; }
  void clear() { tokens_.clear(); }

  // Full merge: a candidate whose pph is already listed replaces that entry
  // only when strictly better.  Returns true if the list changed.
  bool merge(const Token<Pph>& cand) { return merge_from(0, cand); }

  // Merge restricted to positions [from, size): entries before `from` are
  // final and, by construction of the caller, outrank `cand`.  A candidate
  // sharing a pph with a final entry is dropped.
  bool merge_from(std::size_t from, const Token<Pph>& cand) {
    if (cand.score.is_impossible()) return false;
    if (tokens_.size() == capacity_ && !outranks(cand, tokens_.back())) return false;
    auto same = std::find_if(tokens_.begin(), tokens_.end(), [&](const Token<Pph>& t) { return t.pph == cand.pph; });
    if (same != tokens_.end()) {
      if (static_cast<std::size_t>(same - tokens_.begin()) < from || !outranks(cand, *same)) return false;
      tokens_.erase(same);
    }
    const auto first = tokens_.begin() + static_cast<std::ptrdiff_t>(std::min(from, tokens_.size()));
    auto pos = std::find_if(first, tokens_.end(), [&](const Token<Pph>& t) { return outranks(cand, t); });
    tokens_.insert(pos, cand);
    if (tokens_.size() > capacity_) tokens_.pop_back();
    return true;
  }

 private:
  std::size_t capacity_;
  std::vector<Token<Pph>> tokens_;
};

namespace detail {

template <std::unsigned_integral Pph>
void check_decode_inputs(const LexiconHmm& hmm, const ObservationSequence& obs) {
  if (hmm.word_count() > 0 && hmm.word_count() - 1 > std::numeric_limits<Pph>::max())
    throw std::overflow_error("path index type too narrow for " + std::to_string(hmm.word_count()) + " words");
  for (SymbolId o : obs)
    if (o >= hmm.alphabet_size()) throw ValidationError("observation symbol outside the alphabet");
  check_accumulation_headroom(hmm.max_step_magnitude(), obs.size() + 1);
}

template <std::unsigned_integral Pph>
Token<Pph> start_token(bool first_step) {
  return first_step ? Token<Pph>{LogScore::certain(), 0} : Token<Pph>{};
}

// Max over predecessors of delta_{t-1}(i) + log a_ij, then + log b_j(o_t).
// `prev` is read only at predecessor ids, so the caller may pass the array
// being updated as long as predecessors have not been overwritten yet.
template <std::unsigned_integral Pph>
Token<Pph> relax(const LexiconHmm& hmm, StateId j, const Token<Pph>* prev, bool first_step, SymbolId symbol,
                 DecodeCounters& counters) {
  LogScore best = LogScore::impossible();
  Pph best_pph = 0;
  for (const Transition& tr : hmm.predecessors(j)) {
    ++counters.ops;
    const Token<Pph> src = tr.source == kStartState ? start_token<Pph>(first_step) : prev[tr.source];
    const LogScore cand = src.score + tr.log_prob;
    if (cand.is_impossible()) continue;
    const auto pph = static_cast<Pph>(src.pph + tr.pph_increment);
    if (outranks(cand, pph, best, best_pph)) {
      best = cand;
      best_pph = pph;
    }
  }
  ++counters.emissions;
  const LogScore score = best + hmm.emission(j, symbol);
  return score.is_impossible() ? Token<Pph>{} : Token<Pph>{score, best_pph};
}

template <std::unsigned_integral Pph>
std::vector<Hypothesis> harvest_best(const LexiconHmm& hmm, const Token<Pph>* tokens) {
  Token<Pph> best;
  for (const FinalState& f : hmm.finals()) {
    const Token<Pph>& tok = tokens[f.state];
    const LogScore score = tok.score + f.exit_log_prob;
    if (score.is_impossible()) continue;
    const Token<Pph> cand{score, static_cast<Pph>(tok.pph + f.pph_increment)};
    if (outranks(cand, best)) best = cand;
  }
  if (best.score.is_impossible()) return {};
  return {Hypothesis{hmm.automaton().decode(best.pph), best.pph, best.score}};
}

}  // namespace detail

// Reference decoder: the full T x N lattice with back-pointers.  The winning
// word comes from backtracking, not from the path index.
template <std::unsigned_integral Pph = std::uint32_t>
DecodeResult viterbi_tabular(const LexiconHmm& hmm, const ObservationSequence& obs) {
  detail::check_decode_inputs<Pph>(hmm, obs);
  const std::size_t n = hmm.state_count();
  const std::size_t steps = obs.size();
  DecodeResult result;
  result.counters.token_slots = n * steps;
  if (steps == 0) return result;

  struct Cell {
    LogScore score = LogScore::impossible();
    Pph pph = 0;
    StateId back = kStartState;
  };
  std::vector<Cell> lattice(n * steps);

  for (std::size_t t = 0; t < steps; ++t) {
    const Cell* prev = t == 0 ? nullptr : &lattice[(t - 1) * n];
    Cell* cur = &lattice[t * n];
    for (StateId j = 0; j < n; ++j) {
      LogScore best = LogScore::impossible();
      Pph best_pph = 0;
      StateId best_src = kStartState;
      for (const Transition& tr : hmm.predecessors(j)) {
        ++result.counters.ops;
        LogScore src_score = LogScore::impossible();
        Pph src_pph = 0;
        if (tr.source == kStartState) {
          if (t == 0) src_score = LogScore::certain();
        } else if (prev) {
          src_score = prev[tr.source].score;
          src_pph = prev[tr.source].pph;
        }
        const LogScore cand = src_score + tr.log_prob;
        if (cand.is_impossible()) continue;
        const auto pph = static_cast<Pph>(src_pph + tr.pph_increment);
        if (outranks(cand, pph, best, best_pph)) {
          best = cand;
          best_pph = pph;
          best_src = tr.source;
        }
      }
      ++result.counters.emissions;
      const LogScore score = best + hmm.emission(j, obs[t]);
      if (!score.is_impossible()) cur[j] = Cell{score, best_pph, best_src};
    }
  }

  const Cell* last = &lattice[(steps - 1) * n];
  Token<Pph> best;
  StateId best_state = kStartState;
  for (const FinalState& f : hmm.finals()) {
    const LogScore score = last[f.state].score + f.exit_log_prob;
    if (score.is_impossible()) continue;
    const Token<Pph> cand{score, static_cast<Pph>(last[f.state].pph + f.pph_increment)};
    if (outranks(cand, best)) {
      best = cand;
      best_state = f.state;
    }
  }
  if (best_state == kStartState) return result;

  const auto& automaton = hmm.automaton().automaton();
  std::vector<NodeId> reversed{automaton.sink()};
  StateId j = best_state;
  for (std::size_t t = steps; t-- > 0;) {
    const NodeId node = hmm.state(j).node;
    if (reversed.back() != node) reversed.push_back(node);
    j = lattice[t * n + j].back;
  }
  assert(j == kStartState);
  reversed.push_back(automaton.root());
  result.backtracked_path.assign(reversed.rbegin(), reversed.rend());
  result.ranking.push_back(Hypothesis{path_word(automaton, result.backtracked_path), best.pph, best.score});
  return result;
}

// Token passing with separate arrays for t-1 and t; states visited in any order.
template <std::unsigned_integral Pph = std::uint32_t>
DecodeResult viterbi_flipflop(const LexiconHmm& hmm, const ObservationSequence& obs) {
  detail::check_decode_inputs<Pph>(hmm, obs);
  const std::size_t n = hmm.state_count();
  DecodeResult result;
  result.counters.token_slots = 2 * n;
  if (obs.empty()) return result;

  std::vector<Token<Pph>> prev(n), cur(n);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    for (StateId j = 0; j < n; ++j)
      cur[j] = detail::relax<Pph>(hmm, j, prev.data(), t == 0, obs[t], result.counters);
    prev.swap(cur);
  }
  result.ranking = detail::harvest_best<Pph>(hmm, prev.data());
  return result;
}

// Token passing with one array: states are scanned in reverse decode order,
// so every predecessor still holds its t-1 token when it is read.
template <std::unsigned_integral Pph = std::uint32_t>
DecodeResult viterbi_inplace(const LexiconHmm& hmm, const ObservationSequence& obs) {
  detail::check_decode_inputs<Pph>(hmm, obs);
  const std::size_t n = hmm.state_count();
  DecodeResult result;
  result.counters.token_slots = n;
  if (obs.empty()) return result;

  const auto& order = hmm.decode_order();
  std::vector<Token<Pph>> tokens(n);
  for (std::size_t t = 0; t < obs.size(); ++t) {
    for (std::size_t pos = n; pos-- > 0;) {
      const StateId j = order[pos];
      tokens[j] = detail::relax<Pph>(hmm, j, tokens.data(), t == 0, obs[t], result.counters);
    }
  }
  result.ranking = detail::harvest_best<Pph>(hmm, tokens.data());
  return result;
}

namespace detail {

// n-best token storage: n slots per state, laid out contiguously.
template <std::unsigned_integral Pph>
class TokenTable {
 public:
  TokenTable(std::size_t states, std::size_t n) : n_(n), slots_(states * n), sizes_(states, 0) {}

  std::span<const Token<Pph>> list(StateId j) const { return {slots_.data() + j * n_, sizes_[j]}; }

  void store(StateId j, const TokenList<Pph>& list) {
    std::copy(list.tokens().begin(), list.tokens().end(), slots_.begin() + static_cast<std::ptrdiff_t>(j * n_));
    sizes_[j] = static_cast<std::uint32_t>(list.size());
  }

  std::size_t slot_count() const { return slots_.size(); }

 private:
  std::size_t n_;
  std::vector<Token<Pph>> slots_;
  std::vector<std::uint32_t> sizes_;
};

template <std::unsigned_integral Pph>
std::span<const Token<Pph>> source_list(const TokenTable<Pph>& table, StateId source, bool first_step) {
  static const Token<Pph> kStart{LogScore::certain(), 0};
  if (source == kStartState) return first_step ? std::span<const Token<Pph>>(&kStart, 1) : std::span<const Token<Pph>>();
  return table.list(source);
}

// Naive update: every (predecessor, rank) pair builds a complete candidate,
// emission included, and goes through the full merge.
template <std::unsigned_integral Pph>
void update_naive(const LexiconHmm& hmm, StateId j, const TokenTable<Pph>& table, bool first_step, SymbolId symbol,
                  TokenList<Pph>& out, DecodeCounters& counters) {
  out.clear();
  const LogScore emission = hmm.emission(j, symbol);
  for (const Transition& tr : hmm.predecessors(j)) {
    for (const Token<Pph>& src : source_list(table, tr.source, first_step)) {
      ++counters.ops;
      ++counters.emissions;
      const LogScore score = (src.score + tr.log_prob) + emission;
      if (score.is_impossible()) continue;
      ++counters.merges;
      out.merge(Token<Pph>{score, static_cast<Pph>(src.pph + tr.pph_increment)});
    }
  }
}

// Improved update: rank-outer / predecessor-inner.  Rank-k candidates can only
// land at positions >= k, the pph is formed only for candidates that pass the
// merge test, and the emission is added once per surviving rank.
template <std::unsigned_integral Pph>
void update_improved(const LexiconHmm& hmm, StateId j, const TokenTable<Pph>& table, bool first_step,
                     SymbolId symbol, TokenList<Pph>& out, DecodeCounters& counters) {
  out.clear();
  const LogScore emission = hmm.emission(j, symbol);
  if (emission.is_impossible()) return;
  const auto preds = hmm.predecessors(j);
  const std::size_t n = out.capacity();
  for (std::size_t k = 0; k < n; ++k) {
    for (const Transition& tr : preds) {
      const auto src = source_list(table, tr.source, first_step);
      if (src.size() <= k) continue;
      ++counters.ops;
      const LogScore score = src[k].score + tr.log_prob;
      if (score.is_impossible()) continue;
      if (out.size() == n && score < out[n - 1].score) continue;
      const Token<Pph> cand{score, static_cast<Pph>(src[k].pph + tr.pph_increment)};
      if (out.merge_from(k, cand)) ++counters.merges;
    }
    if (out.size() <= k) break;
    out[k].score += emission;
    ++counters.emissions;
  }
}

template <std::unsigned_integral Pph, class Update>
DecodeResult decode_nbest(const LexiconHmm& hmm, const ObservationSequence& obs, std::size_t n, Update update) {
  if (n == 0) throw std::invalid_argument("n-best size must be at least 1");
  check_decode_inputs<Pph>(hmm, obs);
  const std::size_t states = hmm.state_count();
  DecodeResult result;
  result.counters.token_slots = states * n;
  if (obs.empty()) return result;

  TokenTable<Pph> table(states, n);
  TokenList<Pph> scratch(n);
  const auto& order = hmm.decode_order();
  for (std::size_t t = 0; t < obs.size(); ++t) {
    for (std::size_t pos = states; pos-- > 0;) {
      const StateId j = order[pos];
      update(hmm, j, table, t == 0, obs[t], scratch, result.counters);
      table.store(j, scratch);
    }
  }

  std::vector<Token<Pph>> finals;
  for (const FinalState& f : hmm.finals()) {
    for (const Token<Pph>& tok : table.list(f.state)) {
      const LogScore score = tok.score + f.exit_log_prob;
      if (score.is_impossible()) continue;
      finals.push_back({score, static_cast<Pph>(tok.pph + f.pph_increment)});
    }
  }
  std::sort(finals.begin(), finals.end(), [](const auto& a, const auto& b) { return outranks(a, b); });
  for (const auto& tok : finals) {
    if (result.ranking.size() == n) break;
    if (!result.ranking.empty() && result.ranking.back().pph == tok.pph) continue;
    result.ranking.push_back(Hypothesis{hmm.automaton().decode(tok.pph), tok.pph, tok.score});
  }
  return result;
}

}  // namespace detail

template <std::unsigned_integral Pph = std::uint32_t>
DecodeResult nbest_naive(const LexiconHmm& hmm, const ObservationSequence& obs, std::size_t n) {
  return detail::decode_nbest<Pph>(hmm, obs, n, detail::update_naive<Pph>);
}

template <std::unsigned_integral Pph = std::uint32_t>
DecodeResult nbest_improved(const LexiconHmm& hmm, const ObservationSequence& obs, std::size_t n) {
  return detail::decode_nbest<Pph>(hmm, obs, n, detail::update_improved<Pph>);
}

enum class Variant { kTabular, kFlipFlop, kInPlace, kNBestNaive, kNBestImproved };

inline const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kTabular: return "tabular";
    case Variant::kFlipFlop: return "flipflop";
    case Variant::kInPlace: return "inplace";
    case Variant::kNBestNaive: return "nbest-naive";
    case Variant::kNBestImproved: return "nbest-improved";
  }
  return "?";
}

template <std::unsigned_integral Pph>
DecodeResult decode_with(const LexiconHmm& hmm, const ObservationSequence& obs, Variant variant, std::size_t n) {
  switch (variant) {
    case Variant::kTabular: return viterbi_tabular<Pph>(hmm, obs);
    case Variant::kFlipFlop: return viterbi_flipflop<Pph>(hmm, obs);
    case Variant::kInPlace: return viterbi_inplace<Pph>(hmm, obs);
    case Variant::kNBestNaive: return nbest_naive<Pph>(hmm, obs, n);
    case Variant::kNBestImproved: return nbest_improved<Pph>(hmm, obs, n);
  }
  throw std::invalid_argument("unknown decoder variant");
}

// Picks the narrowest path index type that holds W-1.
inline DecodeResult decode(const LexiconHmm& hmm, const ObservationSequence& obs, Variant variant, std::size_t n = 1) {
  if (hmm.word_count() <= std::uint64_t{std::numeric_limits<std::uint32_t>::max()} + 1)
    return decode_with<std::uint32_t>(hmm, obs, variant, n);
  return decode_with<std::uint64_t>(hmm, obs, variant, n);
}

// `rank word pph score` per hypothesis, then the counter trailer.
inline std::string format_result(const DecodeResult& result) {
  std::string out;
  char buf[64];
  for (std::size_t r = 0; r < result.ranking.size(); ++r) {
    const auto& h = result.ranking[r];
    std::snprintf(buf, sizeof buf, "%.12g", h.score.to_double());
    out += std::to_string(r + 1) + ' ' + utf8::encode(h.word) + ' ' + std::to_string(h.pph) + ' ' + buf + '\n';
  }
  out += "# ops=" + std::to_string(result.counters.ops) + " merges=" + std::to_string(result.counters.merges) +
         " token_slots=" + std::to_string(result.counters.token_slots) + '\n';
  return out;
}

}  // namespace lexvit
