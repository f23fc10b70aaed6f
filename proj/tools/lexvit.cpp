// lexvit: build lexicon automata, generate observations, decode, verify and
// benchmark.  Exit codes: 0 success, 1 verification mismatch, 2 usage or
// input error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lexvit/lexvit.hpp"

namespace {

using namespace lexvit;

constexpr int kExitMismatch = 1;
constexpr int kExitInput = 2;

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
  if (!out) throw std::runtime_error("error writing " + path);
}

std::optional<Variant> parse_variant(const std::string& name) {
  for (auto v : {Variant::kTabular, Variant::kFlipFlop, Variant::kInPlace, Variant::kNBestNaive,
                 Variant::kNBestImproved})
    if (name == variant_name(v)) return v;
  return std::nullopt;
}

int cmd_build(const std::string& wordlist, const std::string& out_path, bool trie) {
  const Lexicon lexicon = read_word_list(wordlist);
  NodeAutomaton automaton = build_trie(lexicon);
  if (!trie) automaton = minimize(automaton);
  const AnnotatedAutomaton annotated(automaton);
  write_file(out_path, format_automaton(annotated));
  const auto s = stats(automaton);
  std::printf("N=%zu arcs=%zu W=%llu p=%.6g\n", s.node_count, s.arc_count,
              static_cast<unsigned long long>(annotated.word_count()), s.mean_in_degree);
  return 0;
}

int cmd_decode(const std::string& automaton_path, const std::string& config_path, const std::string& obs_path,
               std::size_t nbest, const std::string& variant_name_arg) {
  const std::string name = !variant_name_arg.empty() ? variant_name_arg : nbest > 1 ? "nbest-improved" : "inplace";
  const auto variant = parse_variant(name);
  if (!variant) throw std::invalid_argument("unknown variant '" + name + "'");
  const bool ranked = *variant == Variant::kNBestNaive || *variant == Variant::kNBestImproved;
  if (nbest > 1 && !ranked) throw std::invalid_argument("--nbest > 1 needs an n-best variant, not '" + name + "'");
  const AnnotatedAutomaton annotated = parse_annotated_automaton(read_text_file(automaton_path));
  const HmmConfig config = read_hmm_config(config_path);
  const LexiconHmm hmm = expand(annotated, config);
  const auto corpus = parse_corpus(read_text_file(obs_path), config);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& entry = corpus[i];
    if (!entry.error.empty()) {
      std::printf("# error line %zu: %s\n", entry.line, entry.error.c_str());
      continue;
    }
    std::fputs(format_result(decode(hmm, entry.observations, *variant, nbest)).c_str(), stdout);
  }
  return 0;
}

int cmd_gen(const std::string& wordlist, const std::string& config_path, std::size_t count, std::uint64_t seed,
            const std::string& out_path) {
  const Lexicon lexicon = read_word_list(wordlist);
  const HmmConfig config = read_hmm_config(config_path);
  const auto text = format_corpus(generate_corpus(lexicon, config, count, seed), config);
  if (out_path.empty() || out_path == "-")
    std::fputs(text.c_str(), stdout);
  else
    write_file(out_path, text);
  return 0;
}

int cmd_verify(const std::string& wordlist, const std::string& config_path, std::size_t instances, std::uint64_t seed,
               bool inject_fault) {
  const Lexicon lexicon = read_word_list(wordlist);
  const HmmConfig config = read_hmm_config(config_path);
  if (config.routing != Routing::kLexical)
    std::fprintf(stderr, "warning: verify compares against word-level scores and uses lexical routing\n");
  if (instances == 0) {
    std::fprintf(stderr, "warning: no instances requested; nothing verified\n");
    std::printf("PASS 0 instances\n");
    return 0;
  }
  verify::CheckOptions options;
  options.corrupt_increment = inject_fault;
  const auto report = verify::run(lexicon, config, instances, seed, options);
  if (report.failure) {
    std::printf("FAIL after %zu instances\n%s", report.instances,
                verify::describe(*report.counterexample, *report.failure).c_str());
    return kExitMismatch;
  }
  std::printf("PASS %zu instances\n", report.instances);
  return 0;
}

int cmd_bench(const std::string& wordlist, const std::string& config_path, std::size_t sequences, std::uint64_t seed,
              std::size_t prefixes, std::size_t suffixes, const std::vector<std::string>& variant_names) {
  const HmmConfig config = read_hmm_config(config_path);
  Lexicon lexicon;
  if (prefixes > 0 && suffixes > 0) {
    std::u32string letters;
    for (char32_t c : config.alphabet)
      if (c >= U'a' && c <= U'z') letters.push_back(c);
    if (letters.empty()) letters = config.alphabet;
    lexicon = synth::prefix_suffix_lexicon(prefixes, suffixes, letters, seed);
  } else if (!wordlist.empty()) {
    lexicon = read_word_list(wordlist);
  } else {
    throw std::invalid_argument("bench needs a word list or --prefixes/--suffixes");
  }
  std::vector<Variant> variants;
  for (const auto& name : variant_names) {
    const auto v = parse_variant(name);
    if (!v) throw std::invalid_argument("unknown variant '" + name + "'");
    variants.push_back(*v);
  }

  const auto models = make_letter_hmms(lexicon.letters(), config);
  const NodeAutomaton trie = build_trie(lexicon);
  const LexiconHmm trie_hmm = expand(AnnotatedAutomaton(trie), models, config);
  const LexiconHmm dawg_hmm = expand(AnnotatedAutomaton(minimize(trie)), models, config);
  const auto corpus = generate_corpus(lexicon, config, sequences, seed);

  std::printf("%s\n", kBenchCsvHeader);
  for (Variant v : variants) {
    std::printf("%s\n", format_bench_row(bench_decode("trie", trie_hmm, v, corpus)).c_str());
    std::printf("%s\n", format_bench_row(bench_decode("dawg", dawg_hmm, v, corpus)).c_str());
  }
  return 0;
}

int cmd_dump_states(const std::string& automaton_path, const std::string& config_path) {
  const AnnotatedAutomaton annotated = parse_annotated_automaton(read_text_file(automaton_path));
  const HmmConfig config = read_hmm_config(config_path);
  std::fputs(dump_states(expand(annotated, config)).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexicon-constrained Viterbi decoding workbench"};
  app.require_subcommand(1);

  std::string wordlist, out_path, automaton_path, config_path, obs_path, variant;
  bool trie = false, dawg = false, inject_fault = false;
  std::size_t nbest = 1, count = 0, instances = 50, sequences = 10, prefixes = 0, suffixes = 0;
  std::uint64_t seed = 1;
  std::vector<std::string> bench_variants{"inplace", "flipflop"};

  auto* build = app.add_subcommand("build", "compile a word list into a PPH-annotated automaton");
  build->add_option("wordlist", wordlist, "UTF-8 word list, one word per line")->required();
  build->add_option("out", out_path, "output automaton file")->required();
  auto* trie_flag = build->add_flag("--trie", trie, "emit the trie");
  build->add_flag("--dawg", dawg, "emit the minimized DAWG (default)")->excludes(trie_flag);

  auto* dec = app.add_subcommand("decode", "decode observation sequences");
  dec->add_option("automaton", automaton_path)->required();
  dec->add_option("config", config_path)->required();
  dec->add_option("observations", obs_path)->required();
  dec->add_option("--nbest,-n", nbest, "number of hypotheses")->check(CLI::PositiveNumber);
  dec->add_option("--variant", variant, "tabular|flipflop|inplace|nbest-naive|nbest-improved (default inplace, or nbest-improved when -n > 1)");

  auto* gen = app.add_subcommand("gen", "sample observation sequences from lexicon words");
  gen->add_option("wordlist", wordlist)->required();
  gen->add_option("config", config_path)->required();
  gen->add_option("count", count)->required();
  gen->add_option("seed", seed)->required();
  gen->add_option("--out,-o", out_path, "output file (default stdout)");

  auto* ver = app.add_subcommand("verify", "randomized oracle equivalence checks");
  ver->add_option("wordlist", wordlist)->required();
  ver->add_option("config", config_path)->required();
  ver->add_option("--instances", instances);
  ver->add_option("--seed", seed);
  ver->add_flag("--inject-fault", inject_fault, "corrupt one arc increment (self-test)");

  auto* bench = app.add_subcommand("bench", "trie vs DAWG decoding benchmark (CSV)");
  bench->add_option("wordlist", wordlist, "word list (omit with --prefixes/--suffixes)");
  bench->add_option("--config", config_path)->required();
  bench->add_option("--sequences", sequences);
  bench->add_option("--seed", seed);
  bench->add_option("--prefixes", prefixes, "synthetic prefix pool size");
  bench->add_option("--suffixes", suffixes, "synthetic suffix pool size");
  bench->add_option("--variants", bench_variants, "decoder variants to run");

  auto* dump = app.add_subcommand("dump-states", "list lexicon-HMM states");
  dump->add_option("automaton", automaton_path)->required();
  dump->add_option("config", config_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*build) return cmd_build(wordlist, out_path, trie);
    if (*dec) return cmd_decode(automaton_path, config_path, obs_path, nbest, variant);
    if (*gen) return cmd_gen(wordlist, config_path, count, seed, out_path);
    if (*ver) return cmd_verify(wordlist, config_path, instances, seed, inject_fault);
    if (*bench) return cmd_bench(wordlist, config_path, sequences, seed, prefixes, suffixes, bench_variants);
    if (*dump) return cmd_dump_states(automaton_path, config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "lexvit: %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
