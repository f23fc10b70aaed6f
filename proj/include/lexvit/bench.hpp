#pragma once

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "lexvit/corpus.hpp"
#include "lexvit/decoder.hpp"
#include "lexvit/lexicon_hmm.hpp"

namespace lexvit {

struct BenchRow {
  std::string structure;  // "trie" or "dawg"
  Variant variant = Variant::kInPlace;
  std::size_t state_count = 0;
  double mean_predecessors = 0.0;
  std::size_t total_length = 0;  // sum of T over sequences
  std::size_t sequences = 0;
  double wall_ms = 0.0;
  std::uint64_t ops = 0;
  std::uint64_t token_slots = 0;  // per session
  std::size_t correct = 0;        // winner equals the truth word
};

inline BenchRow bench_decode(const std::string& structure, const LexiconHmm& hmm, Variant variant,
                             const std::vector<CorpusEntry>& corpus, std::size_t nbest = 1) {
  BenchRow row;
  row.structure = structure;
  row.variant = variant;
  const auto stats = decode_stats(hmm, 0);
  row.state_count = stats.state_count;
  row.mean_predecessors = stats.mean_predecessors;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& entry : corpus) {
    const auto result = decode(hmm, entry.observations, variant, nbest);
    row.total_length += entry.observations.size();
    row.ops += result.counters.ops;
    row.token_slots = result.counters.token_slots;
    if (entry.truth && !result.ranking.empty() && result.ranking.front().word == *entry.truth) ++row.correct;
    ++row.sequences;
  }
  row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return row;
}

inline constexpr const char* kBenchCsvHeader = "structure,variant,N,p,T_total,sequences,wall_ms,ops,token_slots";

inline std::string format_bench_row(const BenchRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%s,%zu,%.6g,%zu,%zu,%.3f,%llu,%llu", row.structure.c_str(),
                variant_name(row.variant), row.state_count, row.mean_predecessors, row.total_length, row.sequences,
                row.wall_ms, static_cast<unsigned long long>(row.ops),
                static_cast<unsigned long long>(row.token_slots));
  return buf;
}

}  // namespace lexvit
