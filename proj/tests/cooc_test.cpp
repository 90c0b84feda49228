#include <random>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "recomb/cooc.hpp"

namespace {

using recomb::Dataset;
using recomb::Example;
using namespace recomb::cooc;

Dataset from_text(const std::string& text) {
  std::istringstream in(text);
  return recomb::read_dataset(in);
}

const Dataset& corpus() {
  static const Dataset ds = recomb::load_dataset(std::string(RECOMB_DATA_DIR) + "/train.tsv");
  return ds;
}

std::vector<std::vector<std::string>> sources(const Dataset& ds) {
  std::vector<std::vector<std::string>> out;
  for (const auto& ex : ds.examples) out.push_back(ex.source);
  return out;
}

const char* kCapitals =
    "what is the capital of alaska ?\t_answer(NV,(_capital(V0),_loc(V0,NV),_const(V0,_stateid(alaska))))\n"
    "what is the capital of ohio ?\t_answer(NV,(_capital(V0),_loc(V0,NV),_const(V0,_stateid(ohio))))\n"
    "what is the capital of utah ?\t_answer(NV,(_capital(V0),_loc(V0,NV),_const(V0,_stateid(utah))))\n";

TEST(Graph, ThreeCapitals) {
  const auto g = build_cooc_graph(from_text(kCapitals), 1);
  const std::map<TokenPair, int> expected = {{{"alaska", "ohio"}, 1}, {{"alaska", "utah"}, 1}, {{"ohio", "utah"}, 1}};
  EXPECT_EQ(g.links(), expected);
  std::ostringstream out;
  write_graph(g, out);
  EXPECT_EQ(out.str(), "alaska\tohio\t1\nalaska\tutah\t1\nohio\tutah\t1\n");
  EXPECT_TRUE(build_cooc_graph(from_text(kCapitals), 2).links().empty());
}

TEST(Graph, DistinctLengthsGiveNoLinks) {
  const auto ds = from_text("a ?\tx\na b ?\tx\na b c ?\tx\n");
  EXPECT_TRUE(build_cooc_graph(ds, 1).links().empty());
}

TEST(Graph, DuplicatePairsCountSeparately) {
  const auto ds = from_text("a b\tx\na b\tx\na c\tx\n");
  EXPECT_EQ(build_cooc_graph(ds, 1).count("b", "c"), 2);
  EXPECT_EQ(build_cooc_graph(ds, 1).count("b", "b"), 0);
}

TEST(Graph, PunctuationIsNeverAnEndpoint) {
  const auto ds = from_text("what is it ?\tx\nwhat is it .\tx\nwhat is it !\tx\n");
  EXPECT_TRUE(build_cooc_graph(ds, 1).links().empty());
}

TEST(Graph, RejectsZeroMinCount) { EXPECT_THROW(build_cooc_graph(Dataset{}, 0), std::invalid_argument); }

TEST(Graph, AlaskaLinksToManyStatesOnCorpus) {
  const auto g = build_cooc_graph(corpus(), 1);
  const auto lex = recomb::build_entity_lexicon(corpus());
  std::size_t states = 0;
  for (const auto& n : g.neighbors("alaska"))
    for (const auto& e : lex.lookup({n})) states += e.type == "stateid";
  EXPECT_GE(states, 10u);
}

Dataset random_corpus(std::mt19937& rng, std::size_t n) {
  static const std::vector<std::string> vocab = {"what", "is", "the", "capital", "of", "ohio", "utah", "?", "a", "b"};
  Dataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    Example ex;
    const std::size_t len = 2 + rng() % 3;
    for (std::size_t j = 0; j < len; ++j) ex.source.push_back(vocab[rng() % (j == 0 ? 3 : vocab.size())]);
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

TEST(Property, MatchesBruteForce) {
  std::mt19937 rng(2024);
  for (std::size_t n : {0u, 1u, 5u, 40u, 300u, 1000u}) {
    const auto ds = random_corpus(rng, n);
    for (int min_count : {1, 2, 5}) {
      const auto g = build_cooc_graph(ds, min_count);
      ASSERT_EQ(g.links(), oracle::cooc_links(sources(ds), min_count)) << n << " " << min_count;
    }
  }
}

TEST(Property, SymmetricAndMonotone) {
  std::mt19937 rng(5);
  const auto ds = random_corpus(rng, 400);
  const auto g1 = build_cooc_graph(ds, 1);
  for (const auto& [pair, n] : g1.links()) {
    EXPECT_EQ(g1.count(pair.first, pair.second), g1.count(pair.second, pair.first));
    EXPECT_TRUE(g1.neighbors(pair.first).count(pair.second));
    EXPECT_TRUE(g1.neighbors(pair.second).count(pair.first));
  }
  for (int m = 1; m < 8; ++m) {
    const auto lo = build_cooc_graph(ds, m).links();
    for (const auto& [pair, n] : build_cooc_graph(ds, m + 1).links()) EXPECT_TRUE(lo.count(pair));
  }
}

TEST(Swaps, AlaskaToUtah) {
  const auto ds = from_text(kCapitals);
  const auto lex = recomb::build_entity_lexicon(ds);
  const CoocGraph g({{{"alaska", "utah"}, 1}}, 1);
  const auto cands = enumerate_swaps(ds.examples[0], g, lex);
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(cands[0].position, 5u);
  EXPECT_EQ(cands[0].replacement, "utah");
  ASSERT_TRUE(cands[0].target_substitution);
  EXPECT_EQ(*cands[0].target_substitution, (Substitution{"alaska", "utah"}));
  const auto result = apply_swap(cands[0]);
  ASSERT_TRUE(std::holds_alternative<Example>(result));
  const auto& ex = std::get<Example>(result);
  EXPECT_EQ(ex.source_text(), "what is the capital of utah ?");
  EXPECT_EQ(ex.target.render(), "_answer(NV,(_capital(V0),_loc(V0,NV),_const(V0,_stateid(utah))))");
  EXPECT_EQ(ex.origin, recomb::Origin::kCooc);
}

TEST(Swaps, HighestElevationInOklahoma) {
  const auto ds = from_text(
      "what is the highest point in ohio\t_answer(NV,_highest(NV,(_place(NV),_loc(NV,V0),_const(V0,_stateid(ohio)))))\n"
      "what is the highest elevation in ohio\t_answer(NV,_highest(NV,(_place(NV),_loc(NV,V0),_const(V0,_stateid(ohio)))))\n"
      "what is the highest point in oklahoma\t_answer(NV,_highest(NV,(_place(NV),_loc(NV,V0),_const(V0,_stateid(oklahoma)))))\n");
  const auto lex = recomb::build_entity_lexicon(ds);
  const auto g = build_cooc_graph(ds, 1);
  EXPECT_EQ(g.count("point", "elevation"), 1);
  EXPECT_EQ(g.count("ohio", "oklahoma"), 1);
  const auto cands = enumerate_swaps(ds.examples[0], g, lex);
  ASSERT_EQ(cands.size(), 2u);
  EXPECT_EQ(cands[0].replacement, "elevation");
  EXPECT_FALSE(cands[0].target_substitution);
  EXPECT_EQ(cands[1].replacement, "oklahoma");
  EXPECT_EQ(*cands[1].target_substitution, (Substitution{"ohio", "oklahoma"}));

  auto first = std::get<Example>(apply_swap(cands[0]));
  const auto second = enumerate_swaps(first, g, lex);
  auto it = std::find_if(second.begin(), second.end(), [](const auto& c) { return c.replacement == "oklahoma"; });
  ASSERT_NE(it, second.end());
  const auto both = std::get<Example>(apply_swap(*it));
  EXPECT_EQ(both.source_text(), "what is the highest elevation in oklahoma");
  EXPECT_EQ(both.target.render(), ds.examples[2].target.render());
}

TEST(Swaps, ListTheCaliforniaIsKept) {
  const auto ds = from_text(
      "list the states ?\t_answer(NV,_state(NV))\n"
      "what is the capital of california ?\t_answer(NV,(_capital(V0),_loc(V0,NV),_const(V0,_stateid(california))))\n");
  const auto lex = recomb::build_entity_lexicon(ds);
  const CoocGraph g({{{"california", "states"}, 1}}, 1);
  const auto cands = enumerate_swaps(ds.examples[0], g, lex);
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_FALSE(cands[0].target_substitution);
  const auto result = apply_swap(cands[0]);
  ASSERT_TRUE(std::holds_alternative<Example>(result));
  EXPECT_EQ(std::get<Example>(result).source_text(), "list the california ?");
  EXPECT_EQ(std::get<Example>(result).target.render(), "_answer(NV,_state(NV))");
}

TEST(Swaps, UnparseableTargetIsRejected) {
  const auto ds = from_text(kCapitals);
  const auto lex = recomb::build_entity_lexicon(ds);
  const CoocGraph g({{{"alaska", "salt-lake"}, 1}}, 1);
  const auto cands = enumerate_swaps(ds.examples[0], g, lex);
  ASSERT_EQ(cands.size(), 1u);
  EXPECT_EQ(*cands[0].target_substitution, (Substitution{"alaska", "salt-lake"}));
  EXPECT_TRUE(std::holds_alternative<Rejection>(apply_swap(cands[0])));
}

TEST(Swaps, SubstitutionReplacesEveryOccurrence) {
  const auto ds = from_text(
      "rivers in texas or texas ?\t_answer(A,(_river(A),_loc(A,B),_const(B,_stateid(texas)),_const(B,_stateid(texas))))\n");
  SwapCandidate c{ds.examples[0], 2, "utah", Substitution{"texas", "utah"}};
  const auto ex = std::get<Example>(apply_swap(c));
  EXPECT_EQ(ex.target.render(), "_answer(A,(_river(A),_loc(A,B),_const(B,_stateid(utah)),_const(B,_stateid(utah))))");
}

TEST(Swaps, NoLinksNoCandidates) {
  const auto ds = from_text(kCapitals);
  EXPECT_TRUE(enumerate_swaps(ds.examples[0], CoocGraph{}, recomb::build_entity_lexicon(ds)).empty());
}

TEST(Generate, ZeroExhaustedAndDeterministic) {
  const auto small = from_text(kCapitals);
  const auto lex_small = recomb::build_entity_lexicon(small);
  EXPECT_TRUE(generate_cooc_dataset(small, build_cooc_graph(small, 1), lex_small, 0, 1).empty());
  // Every swap among three capitals reproduces an original.
  EXPECT_THROW(generate_cooc_dataset(small, build_cooc_graph(small, 1), lex_small, 1, 1), recomb::scfg::GenerationError);

  const auto lex = recomb::build_entity_lexicon(corpus());
  const auto g = build_cooc_graph(corpus(), 1);
  const auto a = generate_cooc_dataset(corpus(), g, lex, 600, 9);
  const auto b = generate_cooc_dataset(corpus(), g, lex, 600, 9);
  ASSERT_EQ(a.size(), 600u);
  std::set<std::string> originals;
  for (const auto& ex : corpus().examples) originals.insert(ex.key());
  const auto srcs = sources(corpus());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& ex = a.examples[i];
    ASSERT_EQ(ex.key(), b.examples[i].key());
    ASSERT_FALSE(originals.count(ex.key()));
    ASSERT_NO_THROW(recomb::parse_target(ex.target.render()));
    // Some original differs from it in exactly one source position.
    bool one_off = false;
    for (const auto& s : srcs) {
      if (s.size() != ex.source.size()) continue;
      std::size_t d = 0;
      for (std::size_t p = 0; p < s.size(); ++p) d += s[p] != ex.source[p];
      one_off = one_off || d == 1;
    }
    ASSERT_TRUE(one_off) << ex.source_text();
  }
}

}  // namespace
