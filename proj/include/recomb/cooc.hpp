#pragma once

// Co-occurrence swap augmentation.
//
// Two source sentences of equal length that differ in exactly one position
// link the two differing tokens. Linked tokens are then swapped into other
// examples; when the swapped token names an atom of the logical form, the
// atom is replaced as well, and the result is kept only if it still parses.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "recomb/dataset.hpp"
#include "recomb/lf.hpp"
#include "recomb/random.hpp"
#include "recomb/scfg.hpp"

namespace recomb::cooc {

using TokenPair = std::pair<std::string, std::string>;  // first < second

inline TokenPair make_pair_key(const std::string& a, const std::string& b) {
  return a < b ? TokenPair{a, b} : TokenPair{b, a};
}

inline constexpr int kDefaultMinCount = 2;

class CoocGraph {
 public:
  CoocGraph() = default;
  CoocGraph(std::map<TokenPair, int> counts, int min_count)
      : counts_(std::move(counts)), min_count_(min_count) {}

  int min_count() const { return min_count_; }

  // Observation count for {a, b}; 0 if the pair is below threshold.
  int count(const std::string& a, const std::string& b) const {
    if (a == b) return 0;
    auto it = counts_.find(make_pair_key(a, b));
    return it == counts_.end() || it->second < min_count_ ? 0 : it->second;
  }

  // Pairs at or above threshold, sorted.
  std::map<TokenPair, int> links() const {
    std::map<TokenPair, int> out;
    for (const auto& [pair, n] : counts_)
      if (n >= min_count_) out.emplace(pair, n);
    return out;
  }

  std::set<std::string> neighbors(const std::string& token) const {
    std::set<std::string> out;
    for (const auto& [pair, n] : counts_) {
      if (n < min_count_) continue;
      if (pair.first == token) out.insert(pair.second);
      if (pair.second == token) out.insert(pair.first);
    }
    return out;
  }

  // Same counts, different threshold.
  CoocGraph with_min_count(int min_count) const { return CoocGraph(counts_, min_count); }

 private:
  std::map<TokenPair, int> counts_;  // every observed pair, unfiltered
  int min_count_ = 1;
};

// Each unordered pair of equal-length sentences differing at exactly one
// position adds one observation to the differing token pair. Pairs involving
// punctuation are not recorded.
//
// Sentences are bucketed by (length, position, tokens with that position
// blanked); every single-difference pair lands in exactly one bucket, so only
// pairs within a bucket are compared.
inline CoocGraph build_cooc_graph(const Dataset& ds, int min_count = kDefaultMinCount) {
  if (min_count < 1) throw std::invalid_argument("min-count must be >= 1");
  // Bucket key: position + the sentence joined with that slot blanked.
  std::unordered_map<std::string, std::map<std::string, int>> buckets;
  for (const auto& ex : ds.examples) {
    const auto& s = ex.source;
    for (std::size_t p = 0; p < s.size(); ++p) {
      std::string key = std::to_string(s.size()) + ':' + std::to_string(p);
      for (std::size_t i = 0; i < s.size(); ++i) {
        key += '\x1f';
        if (i != p) key += s[i];
      }
      ++buckets[key][s[p]];
    }
  }
  std::map<TokenPair, int> counts;
  for (const auto& [key, tokens] : buckets) {
    if (tokens.size() < 2) continue;
    for (auto a = tokens.begin(); a != tokens.end(); ++a) {
      if (is_punctuation_token(a->first)) continue;
      for (auto b = std::next(a); b != tokens.end(); ++b) {
        if (is_punctuation_token(b->first)) continue;
        counts[{a->first, b->first}] += a->second * b->second;
      }
    }
  }
  return CoocGraph(std::move(counts), min_count);
}

// token-a TAB token-b TAB count, one line per link in lexicographic order.
inline void write_graph(const CoocGraph& g, std::ostream& out) {
  for (const auto& [pair, n] : g.links()) out << pair.first << '\t' << pair.second << '\t' << n << '\n';
}

inline void write_graph(const CoocGraph& g, const std::filesystem::path& path) {
  write_atomically(path, [&](std::ostream& out) { write_graph(g, out); });
}

// ---------------------------------------------------------------------------
// Swaps

struct Substitution {
  std::string before;
  std::string after;
  bool operator==(const Substitution&) const = default;
};

struct SwapCandidate {
  Example base;
  std::size_t position = 0;
  std::string replacement;
  std::optional<Substitution> target_substitution;
};

struct Rejection {
  std::string reason;
};

using SwapResult = std::variant<Example, Rejection>;

namespace detail {

inline bool has_atom(const Target& target, const std::string& atom) {
  for (const auto& seg : target.segments)
    for (const auto& t : seg.tokens)
      if (t.kind == lf::TokenKind::kAtom && t.text == atom) return true;
  return false;
}

// Atom in the target that the source token stands for, with its entity type
// when it came from the lexicon.
inline std::optional<std::pair<std::string, std::string>> target_atom_for(
    const std::string& token, const Target& target, const EntityLexicon& lexicon) {
  for (const auto& entry : lexicon.lookup({token}))
    if (has_atom(target, entry.atom)) return std::pair{entry.atom, entry.type};
  if (has_atom(target, token)) return std::pair{token, std::string()};
  return std::nullopt;
}

inline std::string replacement_atom(const std::string& replacement, const std::string& type,
                                    const EntityLexicon& lexicon) {
  if (!type.empty())
    for (const auto& entry : lexicon.lookup({replacement}))
      if (entry.type == type) return entry.atom;
  return replacement;
}

}  // namespace detail

// One candidate per (position, linked replacement), positions ascending and
// replacements in lexicographic order.
inline std::vector<SwapCandidate> enumerate_swaps(const Example& ex, const CoocGraph& graph,
                                                  const EntityLexicon& lexicon) {
  std::vector<SwapCandidate> out;
  for (std::size_t p = 0; p < ex.source.size(); ++p) {
    const std::string& token = ex.source[p];
    if (is_punctuation_token(token)) continue;
    const auto linked = graph.neighbors(token);
    if (linked.empty()) continue;
    const auto atom = detail::target_atom_for(token, ex.target, lexicon);
    for (const auto& r : linked) {
      SwapCandidate c{ex, p, r, std::nullopt};
      if (atom) c.target_substitution = Substitution{atom->first, detail::replacement_atom(r, atom->second, lexicon)};
      out.push_back(std::move(c));
    }
  }
  return out;
}

inline SwapResult apply_swap(const SwapCandidate& cand) {
  if (cand.position >= cand.base.source.size()) return Rejection{"position out of range"};
  Example ex;
  ex.origin = Origin::kCooc;
  ex.source = cand.base.source;
  ex.source[cand.position] = cand.replacement;
  auto texts = cand.base.target.token_texts();
  if (cand.target_substitution) {
    const auto& [before, after] = *cand.target_substitution;
    std::size_t i = 0;
    for (const auto& seg : cand.base.target.segments) {
      for (const auto& t : seg.tokens) {
        if (t.kind == lf::TokenKind::kAtom && t.text == before) texts[i] = after;
        ++i;
      }
      ++i;  // separator
    }
  }
  try {
    ex.target = parse_target(texts);
  } catch (const std::exception& e) {
    return Rejection{std::string("target does not parse: ") + e.what()};
  }
  return ex;
}

// n accepted swaps drawn without replacement from the (example, candidate)
// pool in seeded random order. Swaps reproducing an original example are
// skipped.
inline Dataset generate_cooc_dataset(const Dataset& ds, const CoocGraph& graph, const EntityLexicon& lexicon,
                                     std::size_t n, std::uint64_t seed) {
  Dataset out;
  out.name = "cooc";
  if (n == 0) return out;

  std::vector<std::pair<std::size_t, std::size_t>> pool;
  std::vector<std::vector<SwapCandidate>> candidates(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    candidates[i] = enumerate_swaps(ds.examples[i], graph, lexicon);
    for (std::size_t j = 0; j < candidates[i].size(); ++j) pool.emplace_back(i, j);
  }
  Rng rng(seed);
  shuffle_in_place(pool, rng);

  std::unordered_set<std::string> originals;
  for (const auto& ex : ds.examples) originals.insert(ex.key());

  for (const auto& [i, j] : pool) {
    if (out.size() == n) break;
    auto result = apply_swap(candidates[i][j]);
    if (auto* ex = std::get_if<Example>(&result); ex != nullptr && !originals.count(ex->key()))
      out.examples.push_back(std::move(*ex));
  }
  if (out.size() < n)
    throw scfg::GenerationError(out.size(), n,
                                "co-occurrence pool exhausted after " + std::to_string(out.size()) + " of " +
                                    std::to_string(n) + " examples (shortfall " +
                                    std::to_string(n - out.size()) + ")");
  return out;
}

}  // namespace recomb::cooc
