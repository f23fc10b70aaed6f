#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lexvit/errors.hpp"
#include "lexvit/score.hpp"
#include "lexvit/utf8.hpp"

namespace lexvit {

using SymbolId = std::uint32_t;
using ObservationSequence = std::vector<SymbolId>;

// How mass leaving a node is split across its outgoing automaton arcs.
enum class Routing {
  kLexical,     // weight 0: pure lexical constraint
  kStochastic,  // -log(out-degree)
};

struct HmmConfig {
  std::size_t states_per_letter = 3;
  double self_loop_prob = 0.5;
  double emission_peak = 0.8;
  std::u32string alphabet;  // observation symbols, in index order
  Routing routing = Routing::kLexical;

  void validate() const {
    if (states_per_letter == 0) throw ConfigError("states_per_letter must be positive");
    if (!(self_loop_prob >= 0.0 && self_loop_prob < 1.0)) throw ConfigError("self_loop_prob must be in [0,1)");
    if (!(emission_peak > 0.0 && emission_peak <= 1.0)) throw ConfigError("emission_peak must be in (0,1]");
    if (alphabet.empty()) throw ConfigError("observation alphabet is empty");
    std::u32string sorted = alphabet;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("observation alphabet repeats a symbol");
  }

  std::optional<SymbolId> symbol_of(char32_t c) const {
    const auto pos = alphabet.find(c);
    if (pos == std::u32string::npos) return std::nullopt;
    return static_cast<SymbolId>(pos);
  }
};

// Left-to-right letter model: state s loops on itself or moves to s+1; the
// exit state's forward mass is released to whatever follows the letter.
class LetterHmm {
 public:
  char32_t letter() const { return letter_; }
  SymbolId letter_symbol() const { return letter_symbol_; }
  std::size_t state_count() const { return self_log_.size(); }
  std::size_t alphabet_size() const { return alphabet_size_; }
  std::size_t entry() const { return 0; }
  std::size_t exit() const { return state_count() - 1; }

  LogScore self_loop(std::size_t state) const { return self_log_.at(state); }
  LogScore forward(std::size_t state) const { return forward_log_.at(state); }
  LogScore emission(std::size_t state, SymbolId symbol) const {
    return emissions_[state * alphabet_size_ + symbol];
  }
  // Probability-space emission row shared by all states (for sampling).
  const std::vector<double>& emission_probs() const { return emission_probs_; }

 private:
  friend LetterHmm make_letter_hmm(char32_t, const HmmConfig&);

  char32_t letter_ = 0;
  SymbolId letter_symbol_ = 0;
  std::size_t alphabet_size_ = 0;
  std::vector<LogScore> self_log_;
  std::vector<LogScore> forward_log_;
  std::vector<LogScore> emissions_;
  std::vector<double> emission_probs_;
};

inline LetterHmm make_letter_hmm(char32_t letter, const HmmConfig& config) {
  config.validate();
  const auto symbol = config.symbol_of(letter);
  if (!symbol)
    throw ConfigError("letter '" + utf8::encode(letter) + "' has no observation symbol in the alphabet");

  LetterHmm hmm;
  hmm.letter_ = letter;
  hmm.letter_symbol_ = *symbol;
  hmm.alphabet_size_ = config.alphabet.size();

  const auto states = config.states_per_letter;
  hmm.self_log_.assign(states, LogScore::from_prob(config.self_loop_prob));
  hmm.forward_log_.assign(states, LogScore::from_prob(1.0 - config.self_loop_prob));

  const auto m = config.alphabet.size();
  hmm.emission_probs_.assign(m, 0.0);
  if (m == 1) {
    hmm.emission_probs_[0] = 1.0;
  } else {
    const double off = (1.0 - config.emission_peak) / static_cast<double>(m - 1);
    std::fill(hmm.emission_probs_.begin(), hmm.emission_probs_.end(), off);
    hmm.emission_probs_[*symbol] = config.emission_peak;
  }
  std::vector<LogScore> row;
  row.reserve(m);
  for (double p : hmm.emission_probs_) row.push_back(LogScore::from_prob(p));
  hmm.emissions_.reserve(states * m);
  for (std::size_t s = 0; s < states; ++s) hmm.emissions_.insert(hmm.emissions_.end(), row.begin(), row.end());
  return hmm;
}

inline LogScore emission_logprob(const LetterHmm& hmm, std::size_t state, SymbolId symbol) {
  if (state >= hmm.state_count()) throw std::out_of_range("letter HMM state out of range");
  if (symbol >= hmm.alphabet_size()) throw std::out_of_range("unknown observation symbol");
  return hmm.emission(state, symbol);
}

using LetterModels = std::map<char32_t, LetterHmm>;

inline LetterModels make_letter_hmms(std::u32string_view letters, const HmmConfig& config) {
  LetterModels models;
  for (char32_t c : letters)
    if (!models.contains(c)) models.emplace(c, make_letter_hmm(c, config));
  return models;
}

// Walks the concatenated letter models of `word`: every state emits at least
// once and repeats with probability self_loop_prob.
inline ObservationSequence sample_observations(std::u32string_view word, const HmmConfig& config,
                                               std::uint64_t seed) {
  const auto models = make_letter_hmms(word, config);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution stay(config.self_loop_prob);
  ObservationSequence out;
  for (char32_t c : word) {
    const auto& hmm = models.at(c);
    std::discrete_distribution<SymbolId> emit(hmm.emission_probs().begin(), hmm.emission_probs().end());
    for (std::size_t s = 0; s < hmm.state_count(); ++s) {
      do {
        out.push_back(emit(rng));
      } while (stay(rng));
    }
  }
  return out;
}

// Whitespace-separated symbols; throws ValidationError on an unknown symbol.
inline ObservationSequence parse_observations(std::string_view line, const HmmConfig& config) {
  ObservationSequence out;
  std::istringstream in{std::string(line)};
  std::string token;
  while (in >> token) {
    std::u32string decoded;
    try {
      decoded = utf8::decode(token);
    } catch (const std::invalid_argument&) {
      throw ValidationError("observation symbol is not valid UTF-8");
    }
    if (decoded.size() != 1) throw ValidationError("observation symbol '" + token + "' is not a single character");
    const auto id = config.symbol_of(decoded[0]);
    if (!id) throw ValidationError("observation symbol '" + token + "' is not in the alphabet");
    out.push_back(*id);
  }
  return out;
}

inline std::string format_observations(const ObservationSequence& seq, const HmmConfig& config) {
  std::string out;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    if (t) out.push_back(' ');
    utf8::append(out, config.alphabet.at(seq[t]));
  }
  return out;
}

// key=value lines; '#' starts a comment.
inline HmmConfig parse_hmm_config(std::string_view text) {
  HmmConfig config;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
  };
  auto number = [&](const std::string& v) {
    std::size_t used = 0;
    double d = 0;
    try {
      d = std::stod(v, &used);
    } catch (const std::exception&) {
      throw ParseError("expected a number, got '" + v + "'", line_no);
    }
    if (used != v.size()) throw ParseError("trailing characters after number '" + v + "'", line_no);
    return d;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "states_per_letter") {
      const double d = number(value);
      if (d < 1 || d != static_cast<double>(static_cast<std::size_t>(d)))
        throw ParseError("states_per_letter must be a positive integer", line_no);
      config.states_per_letter = static_cast<std::size_t>(d);
    } else if (key == "self_loop_prob") {
      config.self_loop_prob = number(value);
    } else if (key == "emission_peak") {
      config.emission_peak = number(value);
    } else if (key == "alphabet") {
      std::u32string symbols;
      try {
        symbols = utf8::decode(value);
      } catch (const std::invalid_argument&) {
        throw ParseError("alphabet is not valid UTF-8", line_no);
      }
      std::erase_if(symbols, [](char32_t c) { return c == U' ' || c == U'\t'; });
      config.alphabet = std::move(symbols);
    } else if (key == "routing") {
      if (value == "lexical")
        config.routing = Routing::kLexical;
      else if (value == "stochastic")
        config.routing = Routing::kStochastic;
      else
        throw ParseError("routing must be 'lexical' or 'stochastic'", line_no);
    } else {
      throw ParseError("unknown key '" + key + "'", line_no);
    }
  }
  config.validate();
  return config;
}

inline HmmConfig read_hmm_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_hmm_config(buf.str());
}

inline std::string format_hmm_config(const HmmConfig& config) {
  std::ostringstream out;
  out.precision(17);
  out << "states_per_letter=" << config.states_per_letter << '\n'
      << "self_loop_prob=" << config.self_loop_prob << '\n'
      << "emission_peak=" << config.emission_peak << '\n'
      << "alphabet=" << utf8::encode(config.alphabet) << '\n'
      << "routing=" << (config.routing == Routing::kLexical ? "lexical" : "stochastic") << '\n';
  return out.str();
}

}  // namespace lexvit
