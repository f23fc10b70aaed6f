#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace lexvit;
using lexvit::testing::one_hot_config;

TEST(HmmConfig, DefaultsAndValidation) {
  HmmConfig config;
  EXPECT_EQ(config.states_per_letter, 3u);
  EXPECT_DOUBLE_EQ(config.self_loop_prob, 0.5);
  EXPECT_THROW(config.validate(), ConfigError);  // no alphabet yet
  config.alphabet = U"ab";
  EXPECT_NO_THROW(config.validate());

  auto bad = config;
  bad.self_loop_prob = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = config;
  bad.emission_peak = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = config;
  bad.states_per_letter = 0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = config;
  bad.alphabet = U"aba";
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(MakeLetterHmm, SingleStateTransitions) {
  const auto hmm = make_letter_hmm(U'a', one_hot_config());
  ASSERT_EQ(hmm.state_count(), 1u);
  EXPECT_EQ(hmm.entry(), hmm.exit());
  EXPECT_EQ(hmm.self_loop(0), LogScore::from_log(std::log(0.5)));
  EXPECT_EQ(hmm.forward(0), LogScore::from_log(std::log(0.5)));
}

TEST(MakeLetterHmm, OneHotOffLetterIsImpossible) {
  const auto hmm = make_letter_hmm(U'a', one_hot_config());
  EXPECT_EQ(emission_logprob(hmm, 0, 0), LogScore::certain());
  EXPECT_TRUE(emission_logprob(hmm, 0, 1).is_impossible());
}

TEST(MakeLetterHmm, PeakedRowValues) {
  HmmConfig config = one_hot_config(U"abcd");
  config.emission_peak = 0.8;
  config.states_per_letter = 3;
  const auto hmm = make_letter_hmm(U'c', config);
  EXPECT_EQ(hmm.letter_symbol(), 2u);
  for (std::size_t s = 0; s < 3; ++s) {
    EXPECT_EQ(emission_logprob(hmm, s, 0), LogScore::from_log(std::log(0.2 / 3)));
    EXPECT_EQ(emission_logprob(hmm, s, 2), LogScore::from_log(std::log(0.8)));
  }
}

TEST(MakeLetterHmm, RowsAreNormalized) {
  for (double peak : {0.05, 0.3, 0.8, 0.95, 1.0}) {
    for (std::size_t m : {1u, 2u, 5u, 26u}) {
      HmmConfig config;
      config.alphabet = synth::latin_alphabet(m);
      config.emission_peak = peak;
      config.self_loop_prob = 0.3;
      const auto hmm = make_letter_hmm(U'a', config);
      for (std::size_t s = 0; s < hmm.state_count(); ++s) {
        double total = 0;
        for (SymbolId o = 0; o < m; ++o) total += std::exp(hmm.emission(s, o).to_double());
        EXPECT_NEAR(total, 1.0, 1e-12) << "peak " << peak << " m " << m;
        EXPECT_NEAR(std::exp(hmm.self_loop(s).to_double()) + std::exp(hmm.forward(s).to_double()), 1.0, 1e-12);
      }
    }
  }
}

TEST(MakeLetterHmm, MissingSymbolIsConfigError) {
  EXPECT_THROW(make_letter_hmm(U'q', one_hot_config()), ConfigError);
}

TEST(EmissionLogprob, RangeChecks) {
  const auto hmm = make_letter_hmm(U'a', one_hot_config());
  EXPECT_THROW(emission_logprob(hmm, 1, 0), std::out_of_range);
  EXPECT_THROW(emission_logprob(hmm, 0, 5), std::out_of_range);
}

TEST(Sample, DeterministicWalkSpellsTheWord) {
  HmmConfig config = one_hot_config();
  config.self_loop_prob = 0.0;
  const auto seq = sample_observations(U"bcd", config, 42);
  EXPECT_EQ(format_observations(seq, config), "b c d");
}

TEST(Sample, SameSeedSameSequence) {
  HmmConfig config;
  config.alphabet = synth::latin_alphabet(26);
  EXPECT_EQ(sample_observations(U"hello", config, 9), sample_observations(U"hello", config, 9));
  EXPECT_GE(sample_observations(U"hello", config, 9).size(), 15u);
}

TEST(Sample, GeometricLengthMean) {
  const auto config = one_hot_config();
  double total = 0;
  const int samples = 1000;
  for (int i = 0; i < samples; ++i) total += static_cast<double>(sample_observations(U"a", config, 1000 + i).size());
  const double sigma = std::sqrt(0.5 / (0.5 * 0.5)) / std::sqrt(static_cast<double>(samples));
  EXPECT_NEAR(total / samples, 2.0, 3 * sigma);
}

TEST(Observations, ParseAndFormat) {
  const auto config = one_hot_config();
  const auto seq = parse_observations("  b c\td z ", config);
  EXPECT_EQ(seq, (ObservationSequence{1, 2, 3, 4}));
  EXPECT_EQ(format_observations(seq, config), "b c d z");
  EXPECT_TRUE(parse_observations("", config).empty());
  EXPECT_THROW(parse_observations("b q", config), ValidationError);
  EXPECT_THROW(parse_observations("bc", config), ValidationError);
}

TEST(ConfigFile, ParseFormatRoundTrip) {
  const auto config = parse_hmm_config(
      "# comment\nstates_per_letter = 2\nself_loop_prob=0.25 # inline\nemission_peak=0.9\n"
      "alphabet = a b c\nrouting=stochastic\n");
  EXPECT_EQ(config.states_per_letter, 2u);
  EXPECT_DOUBLE_EQ(config.self_loop_prob, 0.25);
  EXPECT_DOUBLE_EQ(config.emission_peak, 0.9);
  EXPECT_EQ(config.alphabet, U"abc");
  EXPECT_EQ(config.routing, Routing::kStochastic);

  const auto again = parse_hmm_config(format_hmm_config(config));
  EXPECT_EQ(again.states_per_letter, config.states_per_letter);
  EXPECT_EQ(again.self_loop_prob, config.self_loop_prob);
  EXPECT_EQ(again.emission_peak, config.emission_peak);
  EXPECT_EQ(again.alphabet, config.alphabet);
  EXPECT_EQ(again.routing, config.routing);
}

TEST(ConfigFile, Errors) {
  EXPECT_THROW(parse_hmm_config("alphabet=ab\ncolour=red\n"), ParseError);
  EXPECT_THROW(parse_hmm_config("alphabet=ab\nself_loop_prob=half\n"), ParseError);
  EXPECT_THROW(parse_hmm_config("alphabet=ab\nstates_per_letter=1.5\n"), ParseError);
  EXPECT_THROW(parse_hmm_config("alphabet=ab\nrouting=fancy\n"), ParseError);
  EXPECT_THROW(parse_hmm_config("alphabet ab\n"), ParseError);
  EXPECT_THROW(parse_hmm_config("alphabet=ab\nemission_peak=1.5\n"), ConfigError);
  try {
    parse_hmm_config("alphabet=ab\n\nbogus\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}
