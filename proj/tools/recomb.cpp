// recomb: grammar induction, data augmentation and evaluation for semantic
// parsing datasets.
//
//   recomb stats      --data train.tsv
//   recomb induce     --train train.tsv --strategies entity,phrase --out grammar.txt
//   recomb augment    --train train.tsv --strategies entity,phrase,concat --n 600 --seed 7 --out aug.tsv
//   recomb cooc-graph --train train.tsv --min-count 2 --out graph.tsv
//   recomb sample     --grammar grammar.txt --n 10 --seed 1 --out sampled.tsv
//   recomb evaluate   --gold test.tsv --predictions pred.txt --out report.json

#include <string>

#include "CLI11.hpp"
#include "recomb/cli.hpp"

namespace {

using recomb::cli::Command;
using recomb::cli::RunConfig;

void add_strategy_options(CLI::App* app, RunConfig& cfg, std::string& strategies) {
  app->add_option("--strategies", strategies,
                  "Comma-separated subset of identity,entity,phrase (alias nesting),concat,cooccurrence")
      ->required();
  app->add_option("--k", cfg.k, "Concatenation arity")->check(CLI::Range(2, 16));
  app->add_option("--window", cfg.window, "Extra tokens around whole-phrase spans");
  app->add_flag("--concat-nested", cfg.concat_nested, "Concatenate recombinant sentences, not only originals");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Data recombination and evaluation for semantic parsing"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string strategies;
  std::size_t n = 0;
  std::uint64_t seed = 0;

  auto* stats = app.add_subcommand("stats", "Print dataset counts and complexity distribution");
  stats->add_option("--data", cfg.input, "Dataset TSV")->required()->check(CLI::ExistingFile);

  auto* induce = app.add_subcommand("induce", "Induce a synchronous grammar and write it");
  induce->add_option("--train", cfg.input, "Training TSV")->required()->check(CLI::ExistingFile);
  induce->add_option("--out", cfg.output, "Grammar file")->required();
  add_strategy_options(induce, cfg, strategies);

  auto* augment = app.add_subcommand("augment", "Generate an augmented dataset");
  augment->add_option("--train", cfg.input, "Training TSV")->required()->check(CLI::ExistingFile);
  augment->add_option("--out", cfg.output, "Output TSV")->required();
  augment->add_option("--n", n, "Examples to generate (default: training-set size)");
  augment->add_option("--seed", seed, "Random seed")->required();
  augment->add_option("--min-count", cfg.min_count, "Co-occurrence link threshold")->check(CLI::PositiveNumber);
  augment->add_option("--max-expansions", cfg.max_expansions, "Rule applications per sample");
  augment->add_flag("--append", cfg.append, "Prepend the original training examples to the output");
  augment->add_flag("!--no-dedup", cfg.dedup, "Keep generated examples that duplicate originals");
  add_strategy_options(augment, cfg, strategies);

  auto* graph = app.add_subcommand("cooc-graph", "Write the token co-occurrence graph");
  graph->add_option("--train", cfg.input, "Training TSV")->required()->check(CLI::ExistingFile);
  graph->add_option("--out", cfg.output, "Graph TSV")->required();
  graph->add_option("--min-count", cfg.min_count, "Link threshold")->check(CLI::PositiveNumber);

  auto* sample = app.add_subcommand("sample", "Sample examples from a grammar file");
  sample->add_option("--grammar", cfg.input, "Grammar file")->required()->check(CLI::ExistingFile);
  sample->add_option("--out", cfg.output, "Output TSV")->required();
  sample->add_option("--n", n, "Examples to sample")->default_val(1);
  sample->add_option("--seed", seed, "Random seed")->required();
  sample->add_option("--max-expansions", cfg.max_expansions, "Rule applications per sample");

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions against gold logical forms");
  evaluate->add_option("--gold", cfg.input, "Gold TSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--predictions", cfg.predictions, "One prediction per line")
      ->required()
      ->check(CLI::ExistingFile);
  evaluate->add_option("--out", cfg.output, "Report JSON")->required();
  evaluate->add_option("--plot-prefix", cfg.plot_prefix, "Write <prefix>.iou_errors.tsv and <prefix>.complexity.tsv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (stats->parsed()) {
      cfg.command = Command::kStats;
    } else if (induce->parsed()) {
      cfg.command = Command::kInduce;
    } else if (augment->parsed()) {
      cfg.command = Command::kAugment;
    } else if (graph->parsed()) {
      cfg.command = Command::kCoocGraph;
    } else if (sample->parsed()) {
      cfg.command = Command::kSample;
    } else {
      cfg.command = Command::kEvaluate;
    }
    if (!strategies.empty()) cfg.strategies = recomb::cli::parse_strategies(strategies);
    if ((augment->parsed() && augment->count("--n")) || sample->parsed()) cfg.n = n;
    if (augment->parsed() || sample->parsed()) cfg.seed = seed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return recomb::cli::run(cfg);
}
