#pragma once

#include <stdexcept>
#include <string>

namespace lexvit {

// Empty lexicon or other input that cannot produce an automaton.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A word or record that violates a data invariant (empty word, bad symbol).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Automaton graph shape violations: cycles, dangling arcs, unreachable nodes.
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed serialized text (automaton files, config files, observations).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace lexvit
