#include <algorithm>
#include <sstream>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace lexvit;
using lexvit::testing::one_hot_config;
using lexvit::testing::toy_lexicon;

namespace {

LexiconHmm toy_hmm(HmmConfig config = one_hot_config()) {
  return expand(AnnotatedAutomaton(minimize(build_trie(toy_lexicon()))), config);
}

}  // namespace

TEST(Expand, ToyDawgStateCountAndFanout) {
  const auto hmm = toy_hmm();
  EXPECT_EQ(hmm.state_count(), 7u);
  EXPECT_EQ(hmm.start_fanout(), 3u);
  EXPECT_EQ(hmm.word_count(), 6u);
  EXPECT_EQ(decode_stats(hmm, 4).state_count, 7u);
  EXPECT_EQ(decode_stats(hmm, 4).observation_length, 4u);
}

TEST(Expand, CrossNodeIncrementMatchesArc) {
  const auto hmm = toy_hmm();
  const auto& a = hmm.automaton().automaton();
  // Locate the root's 'b' node and the 'c' node that follows it.
  NodeId b = 0, bc = 0;
  for (NodeId s : a.node(a.root()).successors)
    if (a.node(s).label == U'b') b = s;
  for (NodeId s : a.node(b).successors)
    if (s != a.sink() && a.node(s).label == U'c') bc = s;
  ASSERT_NE(bc, 0u);

  bool found = false;
  for (StateId j = 0; j < hmm.state_count(); ++j) {
    if (hmm.state(j).node != bc) continue;
    for (const auto& tr : hmm.predecessors(j)) {
      if (tr.source == kStartState || tr.source == j) continue;
      EXPECT_EQ(hmm.state(tr.source).node, b);
      EXPECT_EQ(tr.pph_increment, 2u);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Expand, SingleWordChain) {
  HmmConfig config = one_hot_config();
  config.states_per_letter = 3;
  const auto hmm = expand(AnnotatedAutomaton(build_trie(Lexicon::from_utf8({"a"}))), config);
  ASSERT_EQ(hmm.state_count(), 3u);
  ASSERT_EQ(hmm.finals().size(), 1u);
  EXPECT_EQ(hmm.finals()[0].state, 2u);
  EXPECT_EQ(hmm.predecessors(0).size(), 2u);  // self-loop + START
  EXPECT_EQ(hmm.predecessors(1).size(), 2u);
  EXPECT_EQ(hmm.predecessors(2).size(), 2u);
}

TEST(Expand, IncrementsZeroInsideNodes) {
  HmmConfig config = one_hot_config();
  config.states_per_letter = 4;
  const auto hmm = toy_hmm(config);
  for (StateId j = 0; j < hmm.state_count(); ++j)
    for (const auto& tr : hmm.predecessors(j))
      if (tr.source != kStartState && hmm.state(tr.source).node == hmm.state(j).node) {
        EXPECT_EQ(tr.pph_increment, 0u);
      }
}

TEST(Expand, StateCountIsStatesPerLetterTimesLetterNodes) {
  for (std::size_t s = 1; s <= 5; ++s) {
    HmmConfig config = one_hot_config();
    config.states_per_letter = s;
    EXPECT_EQ(toy_hmm(config).state_count(), 7 * s);
  }
}

TEST(Expand, DecodeOrderIsTopological) {
  HmmConfig config = one_hot_config();
  config.states_per_letter = 3;
  const auto lex = synth::prefix_suffix_lexicon(6, 5, U"abcdz", 4);
  const auto hmm = expand(AnnotatedAutomaton(minimize(build_trie(lex))), config);
  std::vector<std::size_t> position(hmm.state_count());
  for (std::size_t k = 0; k < hmm.decode_order().size(); ++k) position[hmm.decode_order()[k]] = k;
  for (StateId j = 0; j < hmm.state_count(); ++j)
    for (const auto& tr : hmm.predecessors(j))
      if (tr.source != kStartState && tr.source != j) { EXPECT_LT(position[tr.source], position[j]); }
}

TEST(Expand, EveryWordReachedByIncrementSums) {
  // Sum increments along START -> final state chains; each word's index must
  // appear exactly once.
  const auto hmm = toy_hmm();
  std::vector<std::vector<PathIndex>> reach(hmm.state_count());
  for (StateId j = 0; j < hmm.state_count(); ++j)
    for (const auto& tr : hmm.predecessors(j)) {
      if (tr.source == j) continue;
      if (tr.source == kStartState) {
        reach[j].push_back(tr.pph_increment);
      } else {
        ASSERT_LT(tr.source, j);
        for (PathIndex v : reach[tr.source]) reach[j].push_back(v + tr.pph_increment);
      }
    }
  std::vector<PathIndex> words;
  for (const auto& f : hmm.finals())
    for (PathIndex v : reach[f.state]) words.push_back(v + f.pph_increment);
  std::sort(words.begin(), words.end());
  EXPECT_EQ(words, (std::vector<PathIndex>{0, 1, 2, 3, 4, 5}));
}

TEST(Expand, MissingLetterModelIsAnError) {
  const AnnotatedAutomaton ann(build_trie(toy_lexicon()));
  const auto config = one_hot_config();
  const auto models = make_letter_hmms(U"ab", config);
  EXPECT_THROW(expand(ann, models, config), ConfigError);
  EXPECT_THROW(expand(ann, one_hot_config(U"ab")), ConfigError);
}

TEST(Expand, StochasticRoutingSplitsMass) {
  HmmConfig config = one_hot_config();
  config.routing = Routing::kStochastic;
  const auto hmm = toy_hmm(config);
  for (StateId j = 0; j < hmm.state_count(); ++j)
    for (const auto& tr : hmm.predecessors(j))
      if (tr.source == kStartState) { EXPECT_EQ(tr.log_prob, LogScore::from_log(-std::log(3.0))); }
}

TEST(WordLinearHmm, ChainShapeAndZeroIncrements) {
  HmmConfig config = one_hot_config();
  config.states_per_letter = 2;
  const auto models = make_letter_hmms(U"ab", config);
  const auto hmm = word_linear_hmm(U"ab", models, config);
  EXPECT_EQ(hmm.state_count(), 4u);
  for (StateId j = 0; j < hmm.state_count(); ++j)
    for (const auto& tr : hmm.predecessors(j)) EXPECT_EQ(tr.pph_increment, 0u);
  EXPECT_THROW(word_linear_hmm(U"", models, config), ValidationError);
}

TEST(WordLinearHmm, MatchesExpandOfSingleWordLexicon) {
  const auto config = one_hot_config();
  const auto models = make_letter_hmms(U"c", config);
  const auto linear = word_linear_hmm(U"c", models, config);
  const auto expanded = expand(AnnotatedAutomaton(build_trie(Lexicon::from_utf8({"c"}))), models, config);
  EXPECT_EQ(dump_states(linear), dump_states(expanded));
}

TEST(DecodeStats, ChainMeanPredecessors) {
  HmmConfig config = one_hot_config();
  config.states_per_letter = 50;
  const auto hmm = expand(AnnotatedAutomaton(build_trie(Lexicon::from_utf8({"a"}))), config);
  // 50 self-loops + 49 forward + 1 START, over 50 states.
  EXPECT_DOUBLE_EQ(decode_stats(hmm, 0).mean_predecessors, 100.0 / 50.0);
}

TEST(DumpStates, ToyListing) {
  const auto hmm = toy_hmm();
  std::istringstream in(dump_states(hmm));
  std::string line;
  std::size_t rows = 0, preds = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::size_t j = 0, node = 0, count = 0;
    std::string letter;
    ASSERT_TRUE(fields >> j >> node >> letter >> count) << line;
    EXPECT_EQ(j, rows);
    EXPECT_EQ(count, hmm.predecessors(static_cast<StateId>(j)).size());
    preds += count;
    ++rows;
  }
  EXPECT_EQ(rows, 7u);
  // 7 self-loops plus one entry per automaton arc that does not end at the sink.
  EXPECT_EQ(preds, 7u + 13u - 5u);
}
