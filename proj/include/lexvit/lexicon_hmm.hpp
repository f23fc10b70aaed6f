#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lexvit/automaton.hpp"
#include "lexvit/letter_hmm.hpp"
#include "lexvit/pph.hpp"
#include "lexvit/score.hpp"

namespace lexvit {

using StateId = std::uint32_t;

// Virtual source of every word: holds log 1 before the first observation and
// the impossible score afterwards.  Never occupies a token slot.
inline constexpr StateId kStartState = std::numeric_limits<StateId>::max();

struct HmmStateInfo {
  NodeId node = 0;
  std::uint32_t sub_state = 0;  // position inside the letter model
  char32_t letter = 0;
};

struct Transition {
  StateId source = kStartState;
  LogScore log_prob;
  PathIndex pph_increment = 0;  // 0 inside a letter, the arc increment across nodes
};

struct FinalState {
  StateId state = 0;
  LogScore exit_log_prob;       // release from the exit state into the sink
  PathIndex pph_increment = 0;  // increment of the arc into the sink
};

struct DecodeStats {
  std::size_t state_count = 0;      // N
  double mean_predecessors = 0.0;   // p = (1/N) sum |pred(j)|, self-loops and START included
  std::size_t observation_length = 0;
};

// Flat emitting-state graph obtained by substituting each letter node of an
// automaton with its letter model.  Root and sink are folded away: root arcs
// become START transitions, sink arcs become final states.
//
// Global state ids follow automaton topological order with a node's states
// contiguous (entry first), so decode_order is the identity and the
// in-place decoder simply walks ids downwards.
class LexiconHmm {
 public:
  std::size_t state_count() const { return states_.size(); }
  const HmmStateInfo& state(StateId j) const { return states_.at(j); }
  const std::vector<HmmStateInfo>& states() const { return states_; }

  std::span<const Transition> predecessors(StateId j) const {
    return {transitions_.data() + pred_begin_[j], transitions_.data() + pred_begin_[j + 1]};
  }
  std::size_t transition_count() const { return transitions_.size(); }

  const std::vector<FinalState>& finals() const { return finals_; }
  const std::vector<StateId>& decode_order() const { return decode_order_; }

  LogScore emission(StateId j, SymbolId symbol) const { return emissions_[emission_offset_[j] + symbol]; }
  std::size_t alphabet_size() const { return alphabet_size_; }

  const AnnotatedAutomaton& automaton() const { return automaton_; }
  std::uint64_t word_count() const { return automaton_.word_count(); }

  // Bound on |log a| + |log b| for one time step, for overflow checks.
  LogScore::raw_type max_step_magnitude() const { return max_step_magnitude_; }

  std::size_t start_fanout() const {
    std::size_t n = 0;
    for (const auto& tr : transitions_) n += tr.source == kStartState;
    return n;
  }

 private:
  friend LexiconHmm expand(const AnnotatedAutomaton&, const LetterModels&, const HmmConfig&);

  AnnotatedAutomaton automaton_;
  std::vector<HmmStateInfo> states_;
  std::vector<std::uint32_t> pred_begin_;
  std::vector<Transition> transitions_;
  std::vector<FinalState> finals_;
  std::vector<StateId> decode_order_;
  std::vector<std::size_t> emission_offset_;
  std::vector<LogScore> emissions_;
  std::size_t alphabet_size_ = 0;
  LogScore::raw_type max_step_magnitude_ = 0;
};

inline LogScore routing_weight(const AutomatonNode& node, Routing routing) {
  if (routing == Routing::kLexical || node.successors.size() <= 1) return LogScore::certain();
  return LogScore::from_log(-std::log(static_cast<double>(node.successors.size())));
}

inline LexiconHmm expand(const AnnotatedAutomaton& annotated, const LetterModels& models, const HmmConfig& config) {
  const auto& a = annotated.automaton();
  if (a.size() < 2 || annotated.suff().size() != a.size() || annotated.increments().size() != a.size())
    throw ConstructionError("automaton is not annotated with path increments");
  if (annotated.word_count() > std::numeric_limits<PathIndex>::max())
    throw std::overflow_error("word count exceeds path index width");

  LexiconHmm hmm;
  hmm.automaton_ = annotated;
  hmm.alphabet_size_ = config.alphabet.size();

  // Emission rows, one block per letter model.
  std::map<char32_t, std::size_t> row_base;
  for (const auto& node : a.nodes()) {
    if (node.kind != NodeKind::kLetter || row_base.contains(node.label)) continue;
    const auto it = models.find(node.label);
    if (it == models.end()) throw ConfigError("no letter model for '" + utf8::encode(node.label) + "'");
    const auto& model = it->second;
    if (model.alphabet_size() != hmm.alphabet_size_) throw ConfigError("letter model alphabet size mismatch");
    row_base.emplace(node.label, hmm.emissions_.size());
    for (std::size_t s = 0; s < model.state_count(); ++s)
      for (SymbolId o = 0; o < hmm.alphabet_size_; ++o) hmm.emissions_.push_back(model.emission(s, o));
  }

  std::vector<NodeId> order(a.size());
  for (NodeId v = 0; v < a.size(); ++v) order[a.topo_index(v)] = v;

  constexpr auto kNone = std::numeric_limits<StateId>::max();
  std::vector<StateId> base(a.size(), kNone);
  for (NodeId v : order) {
    const auto& node = a.node(v);
    if (node.kind != NodeKind::kLetter) continue;
    const auto& model = models.at(node.label);
    base[v] = static_cast<StateId>(hmm.states_.size());
    for (std::size_t s = 0; s < model.state_count(); ++s) {
      hmm.states_.push_back({v, static_cast<std::uint32_t>(s), node.label});
      hmm.emission_offset_.push_back(row_base.at(node.label) + s * hmm.alphabet_size_);
    }
  }
  if (hmm.states_.size() >= kStartState) throw ConstructionError("too many HMM states");

  const auto preds = a.predecessors();
  const auto& inc = annotated.increments();
  auto exit_state = [&](NodeId u) { return base[u] + static_cast<StateId>(models.at(a.node(u).label).exit()); };

  LogScore::raw_type max_transition = 0;
  auto push = [&](Transition tr) {
    max_transition = std::max(max_transition, tr.log_prob.magnitude());
    hmm.transitions_.push_back(tr);
  };

  hmm.pred_begin_.reserve(hmm.states_.size() + 1);
  for (StateId j = 0; j < hmm.states_.size(); ++j) {
    hmm.pred_begin_.push_back(static_cast<std::uint32_t>(hmm.transitions_.size()));
    const auto& info = hmm.states_[j];
    const auto& model = models.at(info.letter);
    const std::size_t s = info.sub_state;
    push({j, model.self_loop(s), 0});
    if (s > 0) {
      push({j - 1, model.forward(s - 1), 0});
      continue;
    }
    std::vector<NodeId> sources = preds[info.node];
    std::sort(sources.begin(), sources.end(),
              [&](NodeId x, NodeId y) { return a.topo_index(x) < a.topo_index(y); });
    sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
    for (NodeId u : sources) {
      const auto& un = a.node(u);
      for (std::size_t i = 0; i < un.successors.size(); ++i) {
        if (un.successors[i] != info.node) continue;
        const LogScore route = routing_weight(un, config.routing);
        if (un.kind == NodeKind::kRoot) {
          push({kStartState, route, inc[u][i]});
        } else {
          const auto& um = models.at(un.label);
          push({exit_state(u), um.forward(um.exit()) + route, inc[u][i]});
        }
      }
    }
  }
  hmm.pred_begin_.push_back(static_cast<std::uint32_t>(hmm.transitions_.size()));
  if (hmm.transitions_.size() > std::numeric_limits<std::uint32_t>::max())
    throw ConstructionError("too many HMM transitions");

  for (NodeId v : order) {
    const auto& node = a.node(v);
    if (node.kind != NodeKind::kLetter) continue;
    for (std::size_t i = 0; i < node.successors.size(); ++i) {
      if (node.successors[i] != a.sink()) continue;
      const auto& model = models.at(node.label);
      const LogScore exit_log = model.forward(model.exit()) + routing_weight(node, config.routing);
      max_transition = std::max(max_transition, exit_log.magnitude());
      hmm.finals_.push_back({exit_state(v), exit_log, inc[v][i]});
    }
  }

  LogScore::raw_type max_emission = 0;
  for (auto e : hmm.emissions_) max_emission = std::max(max_emission, e.magnitude());
  hmm.max_step_magnitude_ = max_transition + max_emission;

  hmm.decode_order_.resize(hmm.states_.size());
  for (StateId j = 0; j < hmm.states_.size(); ++j) hmm.decode_order_[j] = j;
  return hmm;
}

inline LexiconHmm expand(const AnnotatedAutomaton& annotated, const HmmConfig& config) {
  std::u32string letters;
  for (const auto& node : annotated.automaton().nodes())
    if (node.kind == NodeKind::kLetter) letters.push_back(node.label);
  return expand(annotated, make_letter_hmms(letters, config), config);
}

// Lexicon HMM of the single-word lexicon {word}; all increments are 0.
inline LexiconHmm word_linear_hmm(std::u32string_view word, const LetterModels& models, const HmmConfig& config) {
  if (word.empty()) throw ValidationError("word must be non-empty");
  const auto lexicon = Lexicon::from_words({std::u32string(word)});
  return expand(AnnotatedAutomaton(build_trie(lexicon)), models, config);
}

inline DecodeStats decode_stats(const LexiconHmm& hmm, std::size_t observation_length) {
  DecodeStats s;
  s.state_count = hmm.state_count();
  s.mean_predecessors = s.state_count == 0 ? 0.0
                                           : static_cast<double>(hmm.transition_count()) /
                                                 static_cast<double>(s.state_count);
  s.observation_length = observation_length;
  return s;
}

// One line per state: global index, automaton node, letter, predecessor count.
inline std::string dump_states(const LexiconHmm& hmm) {
  std::string out;
  for (StateId j = 0; j < hmm.state_count(); ++j) {
    const auto& info = hmm.state(j);
    out += std::to_string(j);
    out += ' ';
    out += std::to_string(info.node);
    out += ' ';
    utf8::append(out, info.letter);
    out += ' ';
    out += std::to_string(hmm.predecessors(j).size());
    out += '\n';
  }
  return out;
}

}  // namespace lexvit
