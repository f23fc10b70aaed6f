#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexvit/errors.hpp"
#include "lexvit/lexicon.hpp"

namespace lexvit {

using NodeId = std::uint32_t;

enum class NodeKind : std::uint8_t { kRoot, kLetter, kSink };

struct AutomatonNode {
  NodeKind kind = NodeKind::kLetter;
  char32_t label = 0;  // 0 for root and sink
  std::vector<NodeId> successors;

  friend bool operator==(const AutomatonNode&, const AutomatonNode&) = default;
};

namespace detail {

// Reverse DFS completion order from `root`, successors visited in list order.
// Nodes unreachable from root are visited afterwards in id order.  Throws
// StructureError on a cycle.
inline std::vector<std::uint32_t> dfs_topological_index(const std::vector<AutomatonNode>& nodes,
                                                        NodeId root) {
  enum : std::uint8_t { kWhite, kGray, kBlack };
  const auto n = nodes.size();
  std::vector<std::uint8_t> color(n, kWhite);
  std::vector<NodeId> finished;
  finished.reserve(n);
  std::vector<std::pair<NodeId, std::size_t>> stack;

  auto visit = [&](NodeId start) {
    if (color[start] != kWhite) return;
    color[start] = kGray;
    stack.emplace_back(start, 0);
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      const auto& succ = nodes[node].successors;
      if (next < succ.size()) {
        const NodeId child = succ[next++];
        if (color[child] == kGray) throw StructureError("automaton contains a cycle");
        if (color[child] == kWhite) {
          color[child] = kGray;
          stack.emplace_back(child, 0);
        }
      } else {
        color[node] = kBlack;
        finished.push_back(node);
        stack.pop_back();
      }
    }
  };

  if (root < n) visit(root);
  for (NodeId v = 0; v < n; ++v) visit(v);

  std::vector<std::uint32_t> index(n);
  for (std::size_t k = 0; k < n; ++k) index[finished[n - 1 - k]] = static_cast<std::uint32_t>(k);
  return index;
}

}  // namespace detail

// Rooted DAG of letter-labelled nodes with a single shared sink.
//
// Arcs only route; letters live on nodes.  Successor lists are ordered, and
// that order defines the canonical DFS used for path indexing.  Instances are
// validated on construction and immutable afterwards.
class NodeAutomaton {
 public:
  NodeAutomaton() = default;

  NodeAutomaton(std::vector<AutomatonNode> nodes, NodeId root, NodeId sink)
      : nodes_(std::move(nodes)), root_(root), sink_(sink) {
    validate();
  }

  const std::vector<AutomatonNode>& nodes() const { return nodes_; }
  const AutomatonNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }
  NodeId root() const { return root_; }
  NodeId sink() const { return sink_; }
  std::uint32_t topo_index(NodeId id) const { return topo_index_.at(id); }
  const std::vector<std::uint32_t>& topo_indices() const { return topo_index_; }
  std::size_t arc_count() const { return arc_count_; }
  // Number of distinct root-to-sink paths (the lexicon size W).
  std::uint64_t word_count() const { return word_count_; }

  // Number of nodes carrying a letter (everything but root and sink).
  std::size_t letter_node_count() const { return nodes_.size() - 2; }

  std::vector<std::vector<NodeId>> predecessors() const {
    std::vector<std::vector<NodeId>> preds(nodes_.size());
    for (NodeId v = 0; v < nodes_.size(); ++v)
      for (NodeId s : nodes_[v].successors) preds[s].push_back(v);
    return preds;
  }

  friend bool operator==(const NodeAutomaton& a, const NodeAutomaton& b) {
    return a.root_ == b.root_ && a.sink_ == b.sink_ && a.nodes_ == b.nodes_;
  }

 private:
  void validate();

  std::vector<AutomatonNode> nodes_;
  NodeId root_ = 0;
  NodeId sink_ = 0;
  std::vector<std::uint32_t> topo_index_;
  std::size_t arc_count_ = 0;
  std::uint64_t word_count_ = 0;
};

inline void NodeAutomaton::validate() {
  const auto n = nodes_.size();
  if (n < 2) throw StructureError("automaton needs at least a root and a sink");
  if (n > std::numeric_limits<NodeId>::max()) throw StructureError("too many nodes");
  if (root_ >= n || sink_ >= n || root_ == sink_) throw StructureError("invalid root or sink id");

  arc_count_ = 0;
  std::vector<std::uint32_t> in_degree(n, 0);
  for (NodeId v = 0; v < n; ++v) {
    const auto& node = nodes_[v];
    const NodeKind expected = v == root_ ? NodeKind::kRoot : v == sink_ ? NodeKind::kSink : NodeKind::kLetter;
    if (node.kind != expected) throw StructureError("node " + std::to_string(v) + " has the wrong kind");
    if (node.kind == NodeKind::kLetter && node.label == 0)
      throw StructureError("letter node " + std::to_string(v) + " has no label");
    if (node.kind != NodeKind::kLetter && node.label != 0)
      throw StructureError("root and sink must be unlabelled");
    for (NodeId s : node.successors) {
      if (s >= n) throw StructureError("arc to unknown node " + std::to_string(s));
      ++in_degree[s];
    }
    arc_count_ += node.successors.size();
  }
  if (in_degree[root_] != 0) throw StructureError("root has predecessors");
  if (!nodes_[sink_].successors.empty()) throw StructureError("sink has successors");

  topo_index_ = detail::dfs_topological_index(nodes_, root_);

  // Forward reachability from root, backward co-reachability to sink, and path
  // counts, all in one pass over topological order.
  std::vector<NodeId> order(n);
  for (NodeId v = 0; v < n; ++v) order[topo_index_[v]] = v;
  std::vector<char> reached(n, 0);
  reached[root_] = 1;
  for (NodeId v : order)
    if (reached[v])
      for (NodeId s : nodes_[v].successors) reached[s] = 1;
  std::vector<std::uint64_t> paths(n, 0);
  paths[sink_] = 1;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const NodeId v = *it;
    for (NodeId s : nodes_[v].successors) {
      if (paths[s] > std::numeric_limits<std::uint64_t>::max() - paths[v])
        throw std::overflow_error("path count exceeds 64 bits");
      paths[v] += paths[s];
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (!reached[v]) throw StructureError("node " + std::to_string(v) + " unreachable from root");
    if (paths[v] == 0) throw StructureError("node " + std::to_string(v) + " cannot reach the sink");
  }
  word_count_ = paths[root_];
}

// Renumbers nodes so that id == topological index (root 0, sink last).
inline NodeAutomaton canonicalize(const NodeAutomaton& a) {
  const auto& topo = a.topo_indices();
  std::vector<AutomatonNode> nodes(a.size());
  for (NodeId v = 0; v < a.size(); ++v) {
    AutomatonNode node = a.node(v);
    for (auto& s : node.successors) s = topo[s];
    nodes[topo[v]] = std::move(node);
  }
  return NodeAutomaton(std::move(nodes), topo[a.root()], topo[a.sink()]);
}

inline std::vector<std::uint32_t> topological_index(const NodeAutomaton& a) { return a.topo_indices(); }

// Trie over the lexicon with one shared sink.  Letter arcs ascend by code
// point; a word-final node's arc to the sink comes last.
inline NodeAutomaton build_trie(const Lexicon& lexicon) {
  if (lexicon.empty()) throw ConstructionError("cannot build an automaton from an empty lexicon");
  struct TrieNode {
    char32_t label = 0;
    std::map<char32_t, NodeId> children;
    bool terminal = false;
  };
  std::vector<TrieNode> trie(1);
  for (const auto& word : lexicon.words()) {
    if (word.empty()) throw ValidationError("lexicon contains an empty word");
    NodeId cur = 0;
    for (char32_t c : word) {
      if (c == 0) throw ValidationError("NUL is not a valid letter");
      auto it = trie[cur].children.find(c);
      if (it == trie[cur].children.end()) {
        const auto id = static_cast<NodeId>(trie.size());
        trie[cur].children.emplace(c, id);
        trie.push_back(TrieNode{c, {}, false});
        cur = id;
      } else {
        cur = it->second;
      }
    }
    trie[cur].terminal = true;
  }

  const auto sink = static_cast<NodeId>(trie.size());
  std::vector<AutomatonNode> nodes(trie.size() + 1);
  for (NodeId v = 0; v < trie.size(); ++v) {
    auto& node = nodes[v];
    node.kind = v == 0 ? NodeKind::kRoot : NodeKind::kLetter;
    node.label = trie[v].label;
    for (const auto& [letter, child] : trie[v].children) node.successors.push_back(child);
    if (trie[v].terminal) node.successors.push_back(sink);
  }
  nodes[sink].kind = NodeKind::kSink;
  return canonicalize(NodeAutomaton(std::move(nodes), 0, sink));
}

// Merges nodes with equal label and equal (already merged) successor lists,
// bottom-up from the sink.  For an automaton whose successor lists never repeat
// a label this yields the minimal node count for its language.
inline NodeAutomaton minimize(const NodeAutomaton& input) {
  struct Signature {
    NodeKind kind;
    char32_t label;
    std::vector<NodeId> successors;
    bool operator==(const Signature&) const = default;
  };
  struct SignatureHash {
    std::size_t operator()(const Signature& s) const {
      std::size_t h = std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(s.kind) << 32) | s.label);
      for (NodeId id : s.successors) h ^= std::hash<NodeId>{}(id) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      return h;
    }
  };

  const auto n = input.size();
  std::vector<NodeId> order(n);
  for (NodeId v = 0; v < n; ++v) order[input.topo_index(v)] = v;

  std::vector<NodeId> rep(n);
  std::vector<AutomatonNode> merged;
  std::unordered_map<Signature, NodeId, SignatureHash> registry;
  registry.reserve(n);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& node = input.node(*it);
    Signature sig{node.kind, node.label, {}};
    sig.successors.reserve(node.successors.size());
    for (NodeId s : node.successors) {
      const NodeId r = rep[s];
      // parallel arcs after merging would duplicate paths
      if (std::find(sig.successors.begin(), sig.successors.end(), r) == sig.successors.end())
        sig.successors.push_back(r);
    }
    auto [pos, inserted] = registry.try_emplace(sig, static_cast<NodeId>(merged.size()));
    if (inserted) merged.push_back(AutomatonNode{sig.kind, sig.label, sig.successors});
    rep[*it] = pos->second;
  }
  return canonicalize(NodeAutomaton(std::move(merged), rep[input.root()], rep[input.sink()]));
}

struct AutomatonStats {
  std::size_t node_count = 0;
  std::size_t arc_count = 0;
  double mean_in_degree = 0.0;  // arcs / nodes
};

inline AutomatonStats stats(const NodeAutomaton& a) {
  return {a.size(), a.arc_count(),
          static_cast<double>(a.arc_count()) / static_cast<double>(a.size())};
}

// Root-to-sink label strings in canonical DFS completion order.
inline std::vector<std::u32string> language(const NodeAutomaton& a) {
  std::vector<std::u32string> words;
  std::u32string prefix;
  std::vector<std::pair<NodeId, std::size_t>> stack{{a.root(), 0}};
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    const auto& succ = a.node(node).successors;
    if (next == succ.size()) {
      if (a.node(node).kind == NodeKind::kLetter) prefix.pop_back();
      stack.pop_back();
      continue;
    }
    const NodeId child = succ[next++];
    if (child == a.sink()) {
      words.push_back(prefix);
    } else {
      prefix.push_back(a.node(child).label);
      stack.emplace_back(child, 0);
    }
  }
  return words;
}

}  // namespace lexvit
