#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "lexvit/automaton.hpp"
#include "lexvit/errors.hpp"
#include "lexvit/pph.hpp"
#include "lexvit/utf8.hpp"

// Automaton text format:
//
//   # lexvit-automaton v1
//   NODES <N> ARCS <A> WORDS <W>
//   node <id> <letter|ROOT|SINK> <topo_index> [<suff>]
//   arc <src> <dst> [<increment>]
//
// Nodes are listed by id; arcs node by node in successor order.  The bracketed
// columns are present together or not at all.
namespace lexvit {

inline constexpr std::string_view kAutomatonMagic = "# lexvit-automaton v1";

namespace detail {

inline std::string format_automaton(const NodeAutomaton& a, const AnnotatedAutomaton* annotated) {
  std::string out;
  out += kAutomatonMagic;
  out += '\n';
  out += "NODES " + std::to_string(a.size()) + " ARCS " + std::to_string(a.arc_count()) + " WORDS " +
         std::to_string(a.word_count()) + '\n';
  for (NodeId v = 0; v < a.size(); ++v) {
    const auto& node = a.node(v);
    out += "node " + std::to_string(v) + ' ';
    if (node.kind == NodeKind::kRoot)
      out += "ROOT";
    else if (node.kind == NodeKind::kSink)
      out += "SINK";
    else
      utf8::append(out, node.label);
    out += ' ' + std::to_string(a.topo_index(v));
    if (annotated) out += ' ' + std::to_string(annotated->suff()[v]);
    out += '\n';
  }
  for (NodeId v = 0; v < a.size(); ++v) {
    const auto& succ = a.node(v).successors;
    for (std::size_t i = 0; i < succ.size(); ++i) {
      out += "arc " + std::to_string(v) + ' ' + std::to_string(succ[i]);
      if (annotated) out += ' ' + std::to_string(annotated->increments()[v][i]);
      out += '\n';
    }
  }
  return out;
}

inline std::uint64_t parse_uint(const std::string& token, std::size_t line) {
  if (token.empty() || token.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError("expected an unsigned integer, got '" + token + "'", line);
  try {
    return std::stoull(token);
  } catch (const std::out_of_range&) {
    throw ParseError("integer out of range: " + token, line);
  }
}

}  // namespace detail

inline std::string format_automaton(const NodeAutomaton& a) { return detail::format_automaton(a, nullptr); }
inline std::string format_automaton(const AnnotatedAutomaton& a) {
  return detail::format_automaton(a.automaton(), &a);
}

struct ParsedAutomaton {
  NodeAutomaton automaton;
  std::optional<std::vector<std::uint64_t>> suff;
  std::optional<ArcIncrements> increments;
};

inline ParsedAutomaton parse_automaton(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.starts_with('#')) continue;
      return true;
    }
    return false;
  };
  auto split = [](const std::string& s) {
    std::vector<std::string> tokens;
    std::istringstream ss(s);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    return tokens;
  };

  if (!std::getline(in, line) || std::string_view(line).substr(0, kAutomatonMagic.size()) != kAutomatonMagic ||
      line.find_first_not_of(" \t\r", kAutomatonMagic.size()) != std::string::npos)
    throw ParseError("missing or unsupported format line (expected '" + std::string(kAutomatonMagic) + "')", 1);
  line_no = 1;
  if (!next_line()) throw ParseError("missing header", line_no);
  auto header = split(line);
  if (header.size() != 6 || header[0] != "NODES" || header[2] != "ARCS" || header[4] != "WORDS")
    throw ParseError("expected 'NODES <N> ARCS <A> WORDS <W>'", line_no);
  const auto node_count = detail::parse_uint(header[1], line_no);
  const auto arc_count = detail::parse_uint(header[3], line_no);
  const auto word_count = detail::parse_uint(header[5], line_no);
  if (node_count < 2 || node_count > std::numeric_limits<NodeId>::max())
    throw ParseError("node count out of range", line_no);

  std::vector<AutomatonNode> nodes(node_count);
  std::vector<std::uint64_t> topo(node_count), suff(node_count);
  std::optional<bool> node_annotated;
  std::optional<NodeId> root, sink;
  for (std::uint64_t v = 0; v < node_count; ++v) {
    if (!next_line()) throw ParseError("missing node lines", line_no);
    auto tok = split(line);
    if ((tok.size() != 4 && tok.size() != 5) || tok[0] != "node") throw ParseError("malformed node line", line_no);
    const bool annotated = tok.size() == 5;
    if (node_annotated && *node_annotated != annotated) throw ParseError("inconsistent node annotation", line_no);
    node_annotated = annotated;
    if (detail::parse_uint(tok[1], line_no) != v) throw ParseError("node ids must be listed in order", line_no);
    auto& node = nodes[v];
    if (tok[2] == "ROOT") {
      if (root) throw ParseError("second ROOT node", line_no);
      node.kind = NodeKind::kRoot;
      root = static_cast<NodeId>(v);
    } else if (tok[2] == "SINK") {
      if (sink) throw ParseError("second SINK node", line_no);
      node.kind = NodeKind::kSink;
      sink = static_cast<NodeId>(v);
    } else {
      std::u32string label;
      try {
        label = utf8::decode(tok[2]);
      } catch (const std::invalid_argument&) {
        throw ParseError("node label is not valid UTF-8", line_no);
      }
      if (label.size() != 1) throw ParseError("node label must be a single letter", line_no);
      node.kind = NodeKind::kLetter;
      node.label = label[0];
    }
    topo[v] = detail::parse_uint(tok[3], line_no);
    if (annotated) suff[v] = detail::parse_uint(tok[4], line_no);
  }
  if (!root || !sink) throw ParseError("automaton needs ROOT and SINK nodes", line_no);

  ArcIncrements increments(node_count);
  std::optional<bool> arc_annotated;
  for (std::uint64_t k = 0; k < arc_count; ++k) {
    if (!next_line()) throw ParseError("missing arc lines", line_no);
    auto tok = split(line);
    if ((tok.size() != 3 && tok.size() != 4) || tok[0] != "arc") throw ParseError("malformed arc line", line_no);
    const bool annotated = tok.size() == 4;
    if (arc_annotated && *arc_annotated != annotated) throw ParseError("inconsistent arc annotation", line_no);
    arc_annotated = annotated;
    const auto src = detail::parse_uint(tok[1], line_no);
    const auto dst = detail::parse_uint(tok[2], line_no);
    if (src >= node_count || dst >= node_count) throw ParseError("arc endpoint out of range", line_no);
    nodes[src].successors.push_back(static_cast<NodeId>(dst));
    if (annotated) increments[src].push_back(detail::parse_uint(tok[3], line_no));
  }
  if (next_line()) throw ParseError("unexpected trailing content", line_no);
  if (node_annotated.value_or(false) != arc_annotated.value_or(false))
    throw ParseError("node and arc annotations must be given together", line_no);

  ParsedAutomaton parsed;
  try {
    parsed.automaton = NodeAutomaton(std::move(nodes), *root, *sink);
  } catch (const StructureError& e) {
    throw ParseError(e.what(), line_no);
  }
  for (NodeId v = 0; v < node_count; ++v)
    if (parsed.automaton.topo_index(v) != topo[v])
      throw ParseError("topological index of node " + std::to_string(v) + " does not match the structure", line_no);
  if (parsed.automaton.word_count() != word_count) throw ParseError("WORDS does not match the path count", line_no);
  if (node_annotated.value_or(false)) {
    parsed.suff = std::move(suff);
    parsed.increments = std::move(increments);
  }
  return parsed;
}

// Parses and recomputes the path annotation; stored annotation values must
// agree with the recomputed ones.
inline AnnotatedAutomaton parse_annotated_automaton(std::string_view text) {
  ParsedAutomaton parsed = parse_automaton(text);
  AnnotatedAutomaton annotated(parsed.automaton);
  if (parsed.suff && (*parsed.suff != annotated.suff() || *parsed.increments != annotated.increments()))
    throw ParseError("stored suff/increment annotation is inconsistent with the automaton", 0);
  return annotated;
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace lexvit
