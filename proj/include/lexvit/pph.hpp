#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lexvit/automaton.hpp"

namespace lexvit {

// Canonical index of a root-originated path: the DFS completion rank of the
// path (or, for a partial path, of its first full extension).  Full paths map
// bijectively onto [0, W-1].
using PathIndex = std::uint64_t;

// Per-node ordered increments, parallel to AutomatonNode::successors.
using ArcIncrements = std::vector<std::vector<PathIndex>>;

// suff(x): number of x-to-sink paths; suff(sink) = 1, suff(root) = W.
inline std::vector<std::uint64_t> compute_suff(const NodeAutomaton& a) {
  std::vector<NodeId> order(a.size());
  for (NodeId v = 0; v < a.size(); ++v) order[a.topo_index(v)] = v;
  std::vector<std::uint64_t> suff(a.size(), 0);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId v = *it;
    if (v == a.sink()) {
      suff[v] = 1;
      continue;
    }
    std::uint64_t total = 0;
    for (NodeId s : a.node(v).successors) {
      if (suff[s] > std::numeric_limits<std::uint64_t>::max() - total)
        throw std::overflow_error("suff count exceeds 64 bits");
      total += suff[s];
    }
    suff[v] = total;
  }
  return suff;
}

// Increment of arc x -> succ(x,i) is the sum of suff over the earlier siblings.
inline ArcIncrements annotate_increments(const NodeAutomaton& a, std::span<const std::uint64_t> suff) {
  if (suff.size() != a.size()) throw std::invalid_argument("suff table does not match automaton");
  ArcIncrements inc(a.size());
  for (NodeId v = 0; v < a.size(); ++v) {
    const auto& succ = a.node(v).successors;
    inc[v].reserve(succ.size());
    PathIndex offset = 0;
    for (NodeId s : succ) {
      inc[v].push_back(offset);
      offset += suff[s];
    }
  }
  return inc;
}

// Sum of arc increments along `path`, which starts at the root and may stop at
// any node.  Throws std::invalid_argument if a step is not an arc.
inline PathIndex encode_path(const NodeAutomaton& a, const ArcIncrements& increments,
                             std::span<const NodeId> path) {
  if (path.empty() || path.front() != a.root())
    throw std::invalid_argument("path must start at the root");
  PathIndex value = 0;
  for (std::size_t k = 1; k < path.size(); ++k) {
    const auto& succ = a.node(path[k - 1]).successors;
    std::size_t i = 0;
    while (i < succ.size() && succ[i] != path[k]) ++i;
    if (i == succ.size())
      throw std::invalid_argument("no arc " + std::to_string(path[k - 1]) + " -> " + std::to_string(path[k]));
    value += increments[path[k - 1]][i];
  }
  return value;
}

// Full path (root .. sink) whose index is `value`: at each node descend into
// the last successor whose cumulative offset does not exceed what remains.
inline std::vector<NodeId> decode_path(const NodeAutomaton& a, std::span<const std::uint64_t> suff,
                                       PathIndex value) {
  if (value >= suff[a.root()])
    throw std::out_of_range("path index " + std::to_string(value) + " outside [0, W-1]");
  std::vector<NodeId> path{a.root()};
  NodeId cur = a.root();
  while (cur != a.sink()) {
    const auto& succ = a.node(cur).successors;
    std::size_t i = 0;
    while (value >= suff[succ[i]]) value -= suff[succ[i++]];
    cur = succ[i];
    path.push_back(cur);
  }
  return path;
}

inline std::u32string path_word(const NodeAutomaton& a, std::span<const NodeId> path) {
  std::u32string word;
  for (NodeId v : path)
    if (a.node(v).kind == NodeKind::kLetter) word.push_back(a.node(v).label);
  return word;
}

inline std::u32string decode_pph(const NodeAutomaton& a, std::span<const std::uint64_t> suff, PathIndex value) {
  const auto path = decode_path(a, suff, value);
  return path_word(a, path);
}

// Automaton together with its cached suff counts and arc increments.
class AnnotatedAutomaton {
 public:
  AnnotatedAutomaton() = default;
  explicit AnnotatedAutomaton(NodeAutomaton automaton)
      : automaton_(std::move(automaton)),
        suff_(compute_suff(automaton_)),
        increments_(annotate_increments(automaton_, suff_)) {}

  const NodeAutomaton& automaton() const { return automaton_; }
  const std::vector<std::uint64_t>& suff() const { return suff_; }
  const ArcIncrements& increments() const { return increments_; }
  std::uint64_t word_count() const { return suff_.empty() ? 0 : suff_[automaton_.root()]; }

  PathIndex encode(std::span<const NodeId> path) const { return encode_path(automaton_, increments_, path); }
  std::u32string decode(PathIndex value) const { return decode_pph(automaton_, suff_, value); }

  // Follows the word letter by letter and finishes on the sink arc.
  std::vector<NodeId> path_of(std::u32string_view word) const {
    std::vector<NodeId> path{automaton_.root()};
    NodeId cur = automaton_.root();
    for (char32_t c : word) {
      NodeId next = automaton_.sink();
      for (NodeId s : automaton_.node(cur).successors)
        if (s != automaton_.sink() && automaton_.node(s).label == c) {
          next = s;
          break;
        }
      if (next == automaton_.sink()) throw std::invalid_argument("word not in automaton");
      path.push_back(cur = next);
    }
    const auto& succ = automaton_.node(cur).successors;
    if (std::find(succ.begin(), succ.end(), automaton_.sink()) == succ.end())
      throw std::invalid_argument("word not in automaton");
    path.push_back(automaton_.sink());
    return path;
  }

  PathIndex encode_word(std::u32string_view word) const { return encode(path_of(word)); }

  // Test hook: overwrite one cached increment (fault injection for verify).
  void corrupt_increment(NodeId node, std::size_t arc, PathIndex value) { increments_.at(node).at(arc) = value; }

 private:
  NodeAutomaton automaton_;
  std::vector<std::uint64_t> suff_;
  ArcIncrements increments_;
};

}  // namespace lexvit
