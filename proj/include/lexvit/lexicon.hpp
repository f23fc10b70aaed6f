#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lexvit/errors.hpp"
#include "lexvit/utf8.hpp"

namespace lexvit {

// A set of distinct non-empty words, kept sorted by code point sequence.
class Lexicon {
 public:
  Lexicon() = default;

  static Lexicon from_words(std::vector<std::u32string> words) {
    for (const auto& w : words)
      if (w.empty()) throw ValidationError("lexicon contains an empty word");
    std::sort(words.begin(), words.end());
    words.erase(std::unique(words.begin(), words.end()), words.end());
    Lexicon lex;
    lex.words_ = std::move(words);
    return lex;
  }

  static Lexicon from_utf8(std::span<const std::string> words) {
    std::vector<std::u32string> decoded;
    decoded.reserve(words.size());
    for (const auto& w : words) decoded.push_back(utf8::decode(w));
    return from_words(std::move(decoded));
  }

  static Lexicon from_utf8(std::initializer_list<std::string_view> words) {
    std::vector<std::u32string> decoded;
    for (auto w : words) decoded.push_back(utf8::decode(w));
    return from_words(std::move(decoded));
  }

  const std::vector<std::u32string>& words() const { return words_; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  bool contains(std::u32string_view word) const {
    return std::binary_search(words_.begin(), words_.end(), word);
  }

  // Distinct letters used by the lexicon, ascending.
  std::u32string letters() const {
    std::u32string out;
    for (const auto& w : words_) out += w;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::vector<std::u32string> words_;
};

// One word per line, surrounding whitespace trimmed, blank lines ignored.
inline Lexicon parse_word_list(std::string_view text) {
  std::vector<std::u32string> words;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r\n");
    try {
      words.push_back(utf8::decode(std::string_view(line).substr(first, last - first + 1)));
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return Lexicon::from_words(std::move(words));
}

inline Lexicon read_word_list(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read word list: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_word_list(buf.str());
}

}  // namespace lexvit
