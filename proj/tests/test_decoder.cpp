#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace lexvit;
using lexvit::testing::obs;
using lexvit::testing::one_hot_config;
using lexvit::testing::toy_lexicon;
using lexvit::testing::uniform_config;
using lexvit::testing::utf8_words;

namespace {

LexiconHmm toy_hmm(const HmmConfig& config) {
  return expand(AnnotatedAutomaton(minimize(build_trie(toy_lexicon()))), config);
}

constexpr Variant kAllVariants[] = {Variant::kTabular, Variant::kFlipFlop, Variant::kInPlace, Variant::kNBestNaive,
                                    Variant::kNBestImproved};

const LogScore kHalf = LogScore::from_log(std::log(0.5));

}  // namespace

TEST(OneBest, ToyOneHotBcd) {
  const auto config = one_hot_config();
  const auto hmm = toy_hmm(config);
  for (Variant v : kAllVariants) {
    const auto result = decode(hmm, obs(config, "b c d"), v, 3);
    ASSERT_EQ(result.ranking.size(), 1u) << variant_name(v);
    EXPECT_EQ(result.ranking[0].word, U"bcd");
    EXPECT_EQ(result.ranking[0].pph, 3u);
    EXPECT_EQ(result.ranking[0].score, kHalf + kHalf + kHalf);
  }
}

TEST(OneBest, ToyOneHotC) {
  const auto config = one_hot_config();
  const auto hmm = toy_hmm(config);
  const auto result = viterbi_flipflop(hmm, obs(config, "c"));
  ASSERT_EQ(result.ranking.size(), 1u);
  EXPECT_EQ(result.ranking[0].word, U"c");
  EXPECT_EQ(result.ranking[0].pph, 5u);
}

TEST(OneBest, UnmatchedSymbolGivesEmptyRanking) {
  const auto config = one_hot_config();
  const auto hmm = toy_hmm(config);
  for (Variant v : kAllVariants) EXPECT_TRUE(decode(hmm, obs(config, "z"), v, 2).ranking.empty());
}

TEST(OneBest, EmptyObservationGivesEmptyRanking) {
  const auto config = one_hot_config();
  const auto hmm = toy_hmm(config);
  for (Variant v : kAllVariants) {
    const auto result = decode(hmm, {}, v, 2);
    EXPECT_TRUE(result.ranking.empty());
    EXPECT_EQ(result.counters.ops, 0u);
  }
}

TEST(OneBest, UniformTiesBreakToSmallestIndex) {
  const auto config = uniform_config();
  const auto hmm = toy_hmm(config);
  for (Variant v : {Variant::kTabular, Variant::kFlipFlop, Variant::kInPlace}) {
    const auto result = decode(hmm, obs(config, "a a"), v);
    ASSERT_EQ(result.ranking.size(), 1u);
    EXPECT_EQ(result.ranking[0].word, U"ab") << variant_name(v);
    EXPECT_EQ(result.ranking[0].pph, 0u);
  }
}

TEST(OneBest, TabularBacktrackSpellsWinner) {
  const auto config = one_hot_config();
  const auto hmm = toy_hmm(config);
  const auto result = viterbi_tabular(hmm, obs(config, "b b c c d"));
  ASSERT_EQ(result.ranking.size(), 1u);
  const auto& a = hmm.automaton();
  EXPECT_EQ(path_word(a.automaton(), result.backtracked_path), U"bcd");
  EXPECT_EQ(a.encode(result.backtracked_path), result.ranking[0].pph);
}

TEST(OneBest, SingleWordLexiconRecoversItsWord) {
  HmmConfig config;
  config.alphabet = synth::latin_alphabet(26);
  config.emission_peak = 0.6;
  const auto hmm = expand(AnnotatedAutomaton(build_trie(Lexicon::from_utf8({"viterbi"}))), config);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto result = viterbi_inplace(hmm, sample_observations(U"viterbi", config, seed));
    ASSERT_EQ(result.ranking.size(), 1u);
    EXPECT_EQ(result.ranking[0].word, U"viterbi");
  }
}

TEST(OneBest, RejectsSymbolsOutsideAlphabet) {
  const auto config = one_hot_config();
  const auto hmm = toy_hmm(config);
  EXPECT_THROW(viterbi_inplace(hmm, ObservationSequence{0, 99}), ValidationError);
}

TEST(OneBest, NarrowIndexTypeIsRejected) {
  HmmConfig config = one_hot_config(synth::latin_alphabet(26));
  std::mt19937_64 rng(1);
  const auto lex = synth::random_lexicon(rng, 400, synth::latin_alphabet(26), 2, 6);
  ASSERT_GT(lex.size(), 256u);
  const auto hmm = expand(AnnotatedAutomaton(minimize(build_trie(lex))), config);
  EXPECT_THROW(viterbi_inplace<std::uint8_t>(hmm, ObservationSequence{0}), std::overflow_error);
  EXPECT_NO_THROW(viterbi_inplace<std::uint16_t>(hmm, ObservationSequence{0}));
  const auto seq = sample_observations(lex.words()[17], config, 3);
  EXPECT_EQ(viterbi_inplace<std::uint16_t>(hmm, seq).ranking, viterbi_inplace<std::uint64_t>(hmm, seq).ranking);
}

TEST(Counters, TokenSlots) {
  const auto config = one_hot_config();
  const auto hmm = toy_hmm(config);
  const auto o = obs(config, "b c c d");
  EXPECT_EQ(viterbi_tabular(hmm, o).counters.token_slots, 7u * 4u);
  EXPECT_EQ(viterbi_flipflop(hmm, o).counters.token_slots, 2u * 7u);
  EXPECT_EQ(viterbi_inplace(hmm, o).counters.token_slots, 7u);
  EXPECT_EQ(nbest_naive(hmm, o, 3).counters.token_slots, 3u * 7u);
}

TEST(Counters, OneBestOpsEqualTimesPredecessors) {
  const auto config = one_hot_config();
  const auto hmm = toy_hmm(config);
  const auto o = obs(config, "b c c d a");
  for (Variant v : {Variant::kTabular, Variant::kFlipFlop, Variant::kInPlace})
    EXPECT_EQ(decode(hmm, o, v).counters.ops, 5u * hmm.transition_count());
}

TEST(NBest, OneHotOnlyFiniteWord) {
  const auto config = one_hot_config();
  const auto hmm = toy_hmm(config);
  for (auto* fn : {&nbest_naive<std::uint32_t>, &nbest_improved<std::uint32_t>}) {
    const auto result = fn(hmm, obs(config, "b c d"), 3);
    EXPECT_EQ(utf8_words(result.ranking), std::vector<std::string>{"bcd"});
  }
}

TEST(NBest, UniformTwoStepsPicksTwoLetterWordsByIndex) {
  const auto config = uniform_config();
  const auto hmm = toy_hmm(config);
  for (auto* fn : {&nbest_naive<std::uint32_t>, &nbest_improved<std::uint32_t>}) {
    const auto result = fn(hmm, obs(config, "a a"), 4);
    EXPECT_EQ(utf8_words(result.ranking), (std::vector<std::string>{"ab", "ba", "bb", "bc"}));
  }
}

TEST(NBest, GenerousLengthReturnsWholeLexicon) {
  const auto config = uniform_config();
  const auto hmm = toy_hmm(config);
  const auto result = nbest_improved(hmm, obs(config, "a a a"), 6);
  ASSERT_EQ(result.ranking.size(), 6u);
  std::vector<PathIndex> pphs;
  for (const auto& h : result.ranking) {
    pphs.push_back(h.pph);
    EXPECT_EQ(hmm.automaton().encode_word(h.word), h.pph);
  }
  std::sort(pphs.begin(), pphs.end());
  EXPECT_EQ(pphs, (std::vector<PathIndex>{0, 1, 2, 3, 4, 5}));
}

TEST(NBest, RankOneMatchesOneBest) {
  HmmConfig config;
  config.alphabet = U"abcd";
  config.states_per_letter = 2;
  config.emission_peak = 0.7;
  const auto hmm = toy_hmm(config);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    std::mt19937_64 rng(seed);
    const auto o = synth::random_observations(rng, 2 + seed % 9, 4);
    const auto one = viterbi_inplace(hmm, o).ranking;
    EXPECT_EQ(nbest_naive(hmm, o, 1).ranking, one);
    EXPECT_EQ(nbest_improved(hmm, o, 1).ranking, one);
    const auto three = nbest_improved(hmm, o, 3).ranking;
    if (!one.empty()) { EXPECT_EQ(three.front(), one.front()); }
  }
}

TEST(NBest, ZeroIsRejected) {
  const auto config = one_hot_config();
  const auto hmm = toy_hmm(config);
  EXPECT_THROW(nbest_naive(hmm, obs(config, "c"), 0), std::invalid_argument);
  EXPECT_THROW(nbest_improved(hmm, obs(config, "c"), 0), std::invalid_argument);
}

TEST(NBest, ImprovedMergesAndEmissionsNeverExceedNaive) {
  HmmConfig config;
  config.alphabet = U"abcd";
  config.emission_peak = 0.4;
  const auto hmm = toy_hmm(config);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 30; ++i) {
    const auto o = synth::random_observations(rng, 12, 4);
    for (std::size_t n = 1; n <= 6; ++n) {
      const auto naive = nbest_naive(hmm, o, n);
      const auto improved = nbest_improved(hmm, o, n);
      EXPECT_EQ(naive.ranking, improved.ranking);
      EXPECT_LE(improved.counters.merges, naive.counters.merges);
      EXPECT_LE(improved.counters.emissions, naive.counters.emissions);
    }
  }
}

TEST(NBest, StochasticRoutingVariantsAgree) {
  HmmConfig config;
  config.alphabet = U"abcd";
  config.emission_peak = 0.5;
  config.routing = Routing::kStochastic;
  const auto hmm = toy_hmm(config);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 30; ++i) {
    const auto o = synth::random_observations(rng, 3 + i % 7, 4);
    const auto tab = viterbi_tabular(hmm, o);
    EXPECT_EQ(viterbi_flipflop(hmm, o).ranking, tab.ranking);
    EXPECT_EQ(viterbi_inplace(hmm, o).ranking, tab.ranking);
    EXPECT_EQ(nbest_naive(hmm, o, 4).ranking, nbest_improved(hmm, o, 4).ranking);
  }
}

TEST(TokenList, KeepsDistinctIndicesSorted) {
  TokenList<std::uint32_t> list(3);
  const auto s = [](double x) { return LogScore::from_log(x); };
  EXPECT_TRUE(list.merge({s(-2), 7}));
  EXPECT_TRUE(list.merge({s(-1), 4}));
  EXPECT_FALSE(list.merge({s(-3), 7}));  // worse duplicate
  EXPECT_TRUE(list.merge({s(-0.5), 7}));  // better duplicate replaces
  EXPECT_TRUE(list.merge({s(-1), 2}));    // tie: smaller index first
  ASSERT_EQ(list.size(), 3u);
  EXPECT_EQ(list[0].pph, 7u);
  EXPECT_EQ(list[1].pph, 2u);
  EXPECT_EQ(list[2].pph, 4u);
  EXPECT_FALSE(list.merge({s(-5), 9}));  // full and not better than the tail
  EXPECT_FALSE(list.merge({LogScore::impossible(), 1}));
}

TEST(TokenList, MergeFromRespectsFinalPrefix) {
  TokenList<std::uint32_t> list(3);
  const auto s = [](double x) { return LogScore::from_log(x); };
  list.merge({s(-1), 1});
  list.merge({s(-2), 2});
  EXPECT_FALSE(list.merge_from(1, {s(-3), 1}));  // duplicate of a final entry is dropped
  EXPECT_TRUE(list.merge_from(1, {s(-1.5), 3}));
  EXPECT_EQ(list[1].pph, 3u);
}

TEST(Format, ResultLines) {
  const auto config = one_hot_config();
  const auto hmm = toy_hmm(config);
  const auto text = format_result(viterbi_inplace(hmm, obs(config, "b c d")));
  EXPECT_EQ(text, "1 bcd 3 -2.07944154168\n# ops=45 merges=0 token_slots=7\n");
}
