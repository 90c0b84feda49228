#pragma once

// Command implementations behind the `recomb` tool. Argument parsing lives in
// tools/recomb.cpp; everything here takes an explicit RunConfig so commands
// can be driven from tests.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "recomb/cooc.hpp"
#include "recomb/dataset.hpp"
#include "recomb/metrics.hpp"
#include "recomb/scfg.hpp"

namespace recomb::cli {

enum class Command { kInduce, kAugment, kCoocGraph, kSample, kEvaluate, kStats };

enum class Strategy { kIdentity, kEntity, kPhrase, kConcat, kCooccurrence };

// "nesting" is accepted as an alias of "phrase", "cooc" of "cooccurrence".
inline Strategy parse_strategy(const std::string& name) {
  static const std::map<std::string, Strategy> names = {
      {"identity", Strategy::kIdentity}, {"entity", Strategy::kEntity},
      {"phrase", Strategy::kPhrase},     {"nesting", Strategy::kPhrase},
      {"concat", Strategy::kConcat},     {"cooccurrence", Strategy::kCooccurrence},
      {"cooc", Strategy::kCooccurrence}};
  auto it = names.find(name);
  if (it == names.end()) throw std::invalid_argument("unknown strategy '" + name + "'");
  return it->second;
}

inline std::set<Strategy> parse_strategies(const std::string& csv) {
  std::set<Strategy> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const auto name = csv.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!name.empty()) out.insert(parse_strategy(name));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

struct RunConfig {
  Command command = Command::kStats;
  std::filesystem::path input;        // dataset TSV, or grammar file for `sample`
  std::filesystem::path predictions;  // `evaluate`
  std::filesystem::path output;
  std::filesystem::path plot_prefix;  // `evaluate`, optional
  std::set<Strategy> strategies;
  int k = 2;
  int min_count = cooc::kDefaultMinCount;
  std::optional<std::size_t> n;  // defaults to the training-set size
  std::optional<std::uint64_t> seed;
  std::size_t window = 0;
  std::size_t max_expansions = scfg::kDefaultMaxExpansions;
  bool append = false;
  bool dedup = true;
  bool concat_nested = false;
};

inline int log_level() {
  const char* v = std::getenv("RECOMB_LOG");
  if (v == nullptr) return 1;
  const std::string s(v);
  if (s == "quiet" || s == "0") return 0;
  if (s == "debug" || s == "2") return 2;
  return 1;
}

// Grammar from every selected SCFG strategy, with rules whose categories
// cannot be expanded removed.
inline scfg::Grammar build_grammar(const Dataset& train, const RunConfig& cfg, std::ostream& log) {
  const auto lexicon = build_entity_lexicon(train);
  std::vector<scfg::Rule> roots;
  scfg::Grammar g;
  auto has = [&](Strategy s) { return cfg.strategies.count(s) > 0; };
  if (has(Strategy::kIdentity)) {
    auto rules = scfg::induce_identity_rules(train);
    roots.insert(roots.end(), rules.begin(), rules.end());
    g.add_all(std::move(rules));
  }
  if (has(Strategy::kEntity)) {
    auto rules = scfg::induce_entity_rules(train, lexicon);
    roots.insert(roots.end(), rules.begin(), rules.end());
    g.add_all(std::move(rules));
  }
  if (has(Strategy::kPhrase)) {
    std::vector<scfg::SkippedExample> skipped;
    scfg::PhraseConfig pc;
    pc.window = cfg.window;
    auto rules = scfg::induce_whole_phrase_rules(train, lexicon, pc, &skipped);
    if (log_level() >= 2)
      for (const auto& s : skipped) log << "phrase: example " << s.example_index << ": " << s.reason << '\n';
    roots.insert(roots.end(), rules.begin(), rules.end());
    g.add_all(std::move(rules));
  }
  if (has(Strategy::kConcat)) {
    if (cfg.k < 2) throw std::invalid_argument("--k must be >= 2 when concat is enabled");
    g.add_all(scfg::induce_concat_rules(train, cfg.k));
    if (cfg.concat_nested) g.add_all(scfg::as_sentence_rules(roots));
  }
  g.prune();
  if (g.rules_for(scfg::kRootCategory).empty()) throw scfg::GrammarError("grammar has no ROOT rules");
  return g;
}

inline bool uses_grammar(const std::set<Strategy>& s) {
  return s.count(Strategy::kIdentity) || s.count(Strategy::kEntity) || s.count(Strategy::kPhrase) ||
         s.count(Strategy::kConcat);
}

inline std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) throw std::invalid_argument("--seed is required");
  return *cfg.seed;
}

inline Dataset augment(const Dataset& train, const RunConfig& cfg, std::ostream& log) {
  const std::uint64_t seed = require_seed(cfg);
  if (cfg.strategies.empty()) throw std::invalid_argument("no strategies selected");
  const std::size_t n = cfg.n.value_or(train.size());
  const bool grammar = uses_grammar(cfg.strategies);
  const bool swaps = cfg.strategies.count(Strategy::kCooccurrence) > 0;
  // With both generators, co-occurrence supplies floor(n/2).
  const std::size_t n_cooc = swaps ? (grammar ? n / 2 : n) : 0;
  const std::size_t n_grammar = n - n_cooc;

  Dataset out;
  out.name = train.name + ".augmented";
  if (cfg.append) out.examples = train.examples;
  if (grammar) {
    const auto g = build_grammar(train, cfg, log);
    if (log_level() >= 1) log << "grammar: " << g.size() << " rules\n";
    auto generated = scfg::generate_augmented(g, n_grammar, seed, cfg.dedup ? &train : nullptr, cfg.max_expansions);
    out.examples.insert(out.examples.end(), generated.examples.begin(), generated.examples.end());
  }
  if (swaps) {
    const auto graph = cooc::build_cooc_graph(train, cfg.min_count);
    const auto lexicon = build_entity_lexicon(train);
    auto generated = cooc::generate_cooc_dataset(train, graph, lexicon, n_cooc, seed ^ 0x9e3779b97f4a7c15ULL);
    out.examples.insert(out.examples.end(), generated.examples.begin(), generated.examples.end());
  }
  return out;
}

inline void print_stats(const Dataset& ds, std::ostream& out) {
  std::map<std::size_t, std::size_t> parens;
  std::size_t source_tokens = 0, target_tokens = 0;
  for (const auto& ex : ds.examples) {
    std::size_t p = 0;
    for (const auto& seg : ex.target.segments) p += lf::open_paren_count(seg);
    ++parens[p];
    source_tokens += ex.source.size();
    target_tokens += ex.target.token_texts().size();
  }
  std::vector<SkippedEntity> skipped;
  const auto lexicon = build_entity_lexicon(ds, lf::default_entity_types(), &skipped);
  out << ds.size() << " examples\n";
  if (!ds.empty()) {
    out << "mean source length: " << static_cast<double>(source_tokens) / ds.size() << '\n';
    out << "mean target length: " << static_cast<double>(target_tokens) / ds.size() << '\n';
  }
  out << "lexicon entries: " << lexicon.size() << '\n';
  out << "unaligned entities: " << skipped.size() << '\n';
  out << "open-paren distribution:\n";
  for (const auto& [p, count] : parens) out << "  " << p << '\t' << count << '\n';
}

// Returns the process exit status. Diagnostics go to `log`; `stats` prints
// to `out`.
inline int run(const RunConfig& cfg, std::ostream& out = std::cout, std::ostream& log = std::cerr) {
  try {
    switch (cfg.command) {
      case Command::kInduce: {
        const auto train = load_dataset(cfg.input);
        const auto g = build_grammar(train, cfg, log);
        scfg::write_grammar(g, cfg.output);
        if (log_level() >= 1) log << "wrote " << g.size() << " rules to " << cfg.output.string() << '\n';
        break;
      }
      case Command::kAugment: {
        const auto train = load_dataset(cfg.input);
        const auto ds = augment(train, cfg, log);
        write_dataset(ds, cfg.output);
        if (log_level() >= 1) log << "wrote " << ds.size() << " examples to " << cfg.output.string() << '\n';
        break;
      }
      case Command::kCoocGraph: {
        const auto train = load_dataset(cfg.input);
        const auto graph = cooc::build_cooc_graph(train, cfg.min_count);
        cooc::write_graph(graph, cfg.output);
        if (log_level() >= 1) log << "wrote " << graph.links().size() << " links to " << cfg.output.string() << '\n';
        break;
      }
      case Command::kSample: {
        const auto g = scfg::read_grammar(cfg.input);
        const std::size_t n = cfg.n.value_or(1);
        const auto ds = scfg::generate_augmented(g, n, require_seed(cfg), nullptr, cfg.max_expansions);
        write_dataset(ds, cfg.output);
        break;
      }
      case Command::kEvaluate: {
        const auto gold = load_dataset(cfg.input);
        const auto preds = metrics::read_predictions(cfg.predictions);
        std::vector<lf::LogicalForm> golds;
        golds.reserve(gold.size());
        for (const auto& ex : gold.examples) golds.push_back(ex.target.single());
        const auto report = metrics::evaluate(preds, golds);
        write_atomically(cfg.output, [&](std::ostream& o) { o << metrics::to_json(report).dump(2) << '\n'; });
        if (!cfg.plot_prefix.empty()) {
          auto hist = cfg.plot_prefix;
          hist += ".iou_errors.tsv";
          write_atomically(hist, [&](std::ostream& o) { metrics::write_iou_histogram_tsv(report, o); });
          auto cx = cfg.plot_prefix;
          cx += ".complexity.tsv";
          write_atomically(cx, [&](std::ostream& o) { metrics::write_complexity_tsv(report, o); });
        }
        if (log_level() >= 1)
          log << "sequence accuracy " << report.sequence_accuracy << ", token accuracy " << report.token_accuracy
              << '\n';
        break;
      }
      case Command::kStats: {
        print_stats(load_dataset(cfg.input), out);
        break;
      }
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace recomb::cli
