#pragma once

// Synchronous context-free grammars over utterance / logical-form pairs.
//
// A rule rewrites a category into a pair of symbol sequences. Nonterminals
// carry a link id; the source and target occurrence with the same link id
// are expanded with the same derivation.
//
//   ROOT    -> (what states border [StateId#0] ?,
//               answer ( NV , ( state ( V0 ) , ... stateid ( [StateId#0] ) ) ) ) )
//   StateId -> ("texas", texas)

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "recomb/dataset.hpp"
#include "recomb/lf.hpp"
#include "recomb/random.hpp"

namespace recomb::scfg {

inline constexpr std::string_view kRootCategory = "ROOT";
inline constexpr std::string_view kSentenceCategory = "SENT";

struct Symbol {
  std::string text;  // terminal token, or category for nonterminals
  int link = -1;     // >= 0 iff nonterminal

  static Symbol terminal(std::string token) { return {std::move(token), -1}; }
  static Symbol nonterminal(std::string category, int link) { return {std::move(category), link}; }

  bool is_nonterminal() const { return link >= 0; }
  auto operator<=>(const Symbol&) const = default;
};

struct Rule {
  std::string lhs;
  std::vector<Symbol> source;
  std::vector<Symbol> target;

  auto operator<=>(const Rule&) const = default;

  bool has_nonterminals() const {
    return std::any_of(source.begin(), source.end(), [](const Symbol& s) { return s.is_nonterminal(); });
  }
};

class GrammarError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Expansion budget exceeded.
class SampleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A derivation produced a target that does not parse.
class InvalidTargetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationError : public std::runtime_error {
 public:
  GenerationError(std::size_t produced, std::size_t requested, const std::string& what)
      : std::runtime_error(what), produced_(produced), requested_(requested) {}
  std::size_t shortfall() const { return requested_ - produced_; }

 private:
  std::size_t produced_;
  std::size_t requested_;
};

// True when the nonterminals of both sides pair up one-to-one by link id and
// category, with link ids unique on each side.
inline bool is_aligned(const Rule& rule) {
  auto links = [](const std::vector<Symbol>& side, std::map<int, std::string>& out) {
    for (const auto& s : side) {
      if (!s.is_nonterminal()) continue;
      if (!out.emplace(s.link, s.text).second) return false;
    }
    return true;
  };
  std::map<int, std::string> src, tgt;
  return links(rule.source, src) && links(rule.target, tgt) && src == tgt;
}

// stateid -> StateId, cityid -> CityId; other names are capitalized.
inline std::string category_for_type(std::string_view type) {
  std::string base(type);
  std::string suffix;
  if (base.size() > 2 && base.ends_with("id")) {
    base.resize(base.size() - 2);
    suffix = "Id";
  }
  if (!base.empty()) base[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(base[0])));
  return base + suffix;
}

inline std::vector<Symbol> terminals(const std::vector<std::string>& tokens) {
  std::vector<Symbol> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(Symbol::terminal(t));
  return out;
}

class Grammar {
 public:
  // Returns false if the rule was already present.
  bool add(Rule rule) {
    if (!is_aligned(rule)) throw GrammarError("misaligned rule for category " + rule.lhs);
    if (!seen_.insert(rule).second) return false;
    rules_[rule.lhs].push_back(std::move(rule));
    return true;
  }

  void add_all(std::vector<Rule> rules) {
    for (auto& r : rules) add(std::move(r));
  }

  const std::vector<Rule>& rules_for(std::string_view category) const {
    static const std::vector<Rule> kNone;
    auto it = rules_.find(std::string(category));
    return it == rules_.end() ? kNone : it->second;
  }

  const std::map<std::string, std::vector<Rule>>& rules() const { return rules_; }

  std::size_t size() const { return seen_.size(); }

  // Categories referenced by some nonterminal but without any rule.
  std::set<std::string> non_generative() const {
    std::set<std::string> out;
    for (const auto& [lhs, rules] : rules_)
      for (const auto& r : rules)
        for (const auto& s : r.source)
          if (s.is_nonterminal() && !rules_.count(s.text)) out.insert(s.text);
    return out;
  }

  // Drops rules that reference non-generative categories until none remain.
  void prune() {
    for (auto missing = non_generative(); !missing.empty(); missing = non_generative()) {
      std::map<std::string, std::vector<Rule>> kept;
      seen_.clear();
      for (auto& [lhs, rules] : rules_) {
        for (auto& r : rules) {
          const bool dead = std::any_of(r.source.begin(), r.source.end(), [&](const Symbol& s) {
            return s.is_nonterminal() && missing.count(s.text);
          });
          if (dead) continue;
          seen_.insert(r);
          kept[lhs].push_back(std::move(r));
        }
      }
      rules_ = std::move(kept);
    }
  }

 private:
  std::map<std::string, std::vector<Rule>> rules_;
  std::set<Rule> seen_;
};

namespace detail {

inline std::vector<Rule> dedup(std::vector<Rule> rules) {
  std::set<Rule> seen;
  std::vector<Rule> out;
  for (auto& r : rules)
    if (seen.insert(r).second) out.push_back(std::move(r));
  return out;
}

inline std::size_t count_phrase(const std::vector<std::string>& tokens, const Phrase& phrase) {
  std::size_t n = 0;
  for (auto at = find_phrase(tokens, phrase); at != std::string::npos;
       at = find_phrase(tokens, phrase, at + 1))
    ++n;
  return n;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Induction

inline std::vector<Rule> induce_identity_rules(const Dataset& ds) {
  std::vector<Rule> rules;
  rules.reserve(ds.size());
  for (const auto& ex : ds.examples)
    rules.push_back({std::string(kRootCategory), terminals(ex.source), terminals(ex.target.token_texts())});
  return rules;
}

// Abstracts one aligned entity at a time: the mention and the target atom
// become a linked nonterminal named after the entity type, and the entity
// itself becomes a lexical rule of that category.
inline std::vector<Rule> induce_entity_rules(const Dataset& ds, const EntityLexicon& lexicon,
                                             const std::set<std::string>& types = lf::default_entity_types()) {
  std::vector<Rule> rules;
  for (const auto& ex : ds.examples) {
    if (ex.target.segments.size() != 1) continue;
    const lf::LogicalForm& form = ex.target.segments.front();
    const auto target_texts = lf::token_texts(form);
    for (const auto& e : lf::extract_entities(form, types)) {
      if (e.has_qualifier) continue;
      const LexiconEntry entry{e.value_tokens, e.type, lf::to_lower(e.atom)};
      if (!lexicon.contains(entry)) continue;
      // The mention and the atom must each be unambiguous.
      if (detail::count_phrase(ex.source, e.value_tokens) != 1) continue;
      if (std::count(target_texts.begin(), target_texts.end(), e.atom) != 1) continue;

      const std::string category = category_for_type(e.type);
      const std::size_t at = find_phrase(ex.source, e.value_tokens);
      Rule root{std::string(kRootCategory), {}, {}};
      for (std::size_t i = 0; i < ex.source.size();) {
        if (i == at) {
          root.source.push_back(Symbol::nonterminal(category, 0));
          i += e.value_tokens.size();
        } else {
          root.source.push_back(Symbol::terminal(ex.source[i++]));
        }
      }
      for (std::size_t i = 0; i < target_texts.size(); ++i)
        root.target.push_back(i == e.token_index ? Symbol::nonterminal(category, 0)
                                                 : Symbol::terminal(target_texts[i]));
      rules.push_back(std::move(root));
      rules.push_back({category, terminals(e.value_tokens), {Symbol::terminal(e.atom)}});
    }
  }
  return detail::dedup(std::move(rules));
}

struct PhraseConfig {
  // Head predicate -> phrase category.
  std::map<std::string, std::string> head_categories = {
      {"state", "State"}, {"city", "City"}, {"river", "River"}, {"place", "Place"}};
  // Extra source tokens added on each side of the minimal aligned span.
  std::size_t window = 0;
  std::set<std::string> entity_types = lf::default_entity_types();
};

struct SkippedExample {
  std::size_t example_index;
  std::string reason;
};

namespace detail {

struct Located {
  const lf::Node* node;
  std::size_t start;  // token index
};

// Preorder search below the answer wrapper for the typed sub-expression: a
// group whose first conjunct has a configured head, or the whole answer body
// when its own head is configured.
inline std::optional<Located> find_typed(const lf::Node& node, std::size_t start, bool is_body,
                                         const PhraseConfig& cfg) {
  if (node.is_group && !node.args.empty() && !node.args.front().is_group &&
      cfg.head_categories.count(lf::bare_head(node.args.front().head)))
    return Located{&node, start};
  if (is_body && !node.is_group && !node.args.empty() &&
      cfg.head_categories.count(lf::bare_head(node.head)))
    return Located{&node, start};
  std::size_t pos = start + (node.is_group ? 0 : 1) + 1;
  for (std::size_t i = 0; i < node.args.size(); ++i) {
    if (i > 0) ++pos;
    if (auto hit = find_typed(node.args[i], pos, false, cfg)) return hit;
    pos += lf::token_span(node.args[i]);
  }
  return std::nullopt;
}

inline std::string typed_head(const lf::Node& node) {
  return lf::bare_head(node.is_group ? node.args.front().head : node.head);
}

// Source tokens naming a head predicate: "state" matches state, states;
// "city" matches city, cities.
inline bool names_head(const std::string& token, const std::string& head) {
  if (token == head || token == head + "s" || token == head + "es") return true;
  return head.size() > 1 && head.back() == 'y' &&
         token == head.substr(0, head.size() - 1) + "ies";
}

}  // namespace detail

// Whole-phrase abstraction. For each example whose answer body contains a
// typed sub-expression, the aligned input phrase is the minimal span covering
// the token naming the head predicate and the mentions of every entity inside
// the sub-expression, widened by cfg.window. Emits
//   (a) ROOT with both the phrase and the sub-expression replaced, and
//   (b) Category -> (phrase, sub-expression) when the sub-expression is the
//       whole answer body.
inline std::vector<Rule> induce_whole_phrase_rules(const Dataset& ds, const EntityLexicon& lexicon,
                                                   const PhraseConfig& cfg = {},
                                                   std::vector<SkippedExample>* skipped = nullptr) {
  std::vector<Rule> rules;
  auto skip = [&](std::size_t i, std::string reason) {
    if (skipped != nullptr) skipped->push_back({i, std::move(reason)});
  };
  for (std::size_t ei = 0; ei < ds.examples.size(); ++ei) {
    const Example& ex = ds.examples[ei];
    if (ex.target.segments.size() != 1) continue;
    const lf::LogicalForm& form = ex.target.segments.front();
    const lf::Node& root = form.root;
    if (root.is_group || lf::bare_head(root.head) != "answer" || root.args.empty()) continue;

    // Token index of the answer body (last argument).
    std::size_t body_start = 2;
    for (std::size_t i = 0; i + 1 < root.args.size(); ++i) body_start += lf::token_span(root.args[i]) + 1;
    const lf::Node& body = root.args.back();
    const auto typed = detail::find_typed(body, body_start, true, cfg);
    if (!typed) continue;

    const std::string head = detail::typed_head(*typed->node);
    const std::string category = cfg.head_categories.at(head);
    const std::size_t sub_begin = typed->start;
    const std::size_t sub_end = sub_begin + lf::token_span(*typed->node);

    std::vector<std::size_t> head_positions;
    for (std::size_t i = 0; i < ex.source.size(); ++i)
      if (detail::names_head(ex.source[i], head)) head_positions.push_back(i);
    if (head_positions.size() != 1) {
      skip(ei, head_positions.empty() ? "no token names head '" + head + "'"
                                      : "head '" + head + "' named more than once");
      continue;
    }
    std::size_t lo = head_positions.front();
    std::size_t hi = lo + 1;

    bool ok = true;
    std::vector<std::pair<std::size_t, std::size_t>> outside_mentions;
    for (const auto& e : lf::extract_entities(form, cfg.entity_types)) {
      const bool inside = e.token_index >= sub_begin && e.token_index < sub_end;
      const std::size_t at = find_phrase(ex.source, e.value_tokens);
      const bool aligned = !e.has_qualifier && at != std::string::npos &&
                           detail::count_phrase(ex.source, e.value_tokens) == 1 &&
                           lexicon.contains({e.value_tokens, e.type, lf::to_lower(e.atom)});
      if (inside) {
        if (!aligned) {
          ok = false;
          skip(ei, "entity '" + e.atom + "' has no unique aligned mention");
          break;
        }
        lo = std::min(lo, at);
        hi = std::max(hi, at + e.value_tokens.size());
      } else if (at != std::string::npos) {
        outside_mentions.emplace_back(at, at + e.value_tokens.size());
      }
    }
    if (!ok) continue;
    lo = lo >= cfg.window ? lo - cfg.window : 0;
    hi = std::min(ex.source.size(), hi + cfg.window);
    for (const auto& [b, e] : outside_mentions) {
      if (b < hi && e > lo) {
        ok = false;
        skip(ei, "phrase span overlaps an entity outside the sub-expression");
        break;
      }
    }
    if (!ok) continue;

    const auto target_texts = lf::token_texts(form);
    Rule abstracted{std::string(kRootCategory), {}, {}};
    for (std::size_t i = 0; i < lo; ++i) abstracted.source.push_back(Symbol::terminal(ex.source[i]));
    abstracted.source.push_back(Symbol::nonterminal(category, 0));
    for (std::size_t i = hi; i < ex.source.size(); ++i) abstracted.source.push_back(Symbol::terminal(ex.source[i]));
    for (std::size_t i = 0; i < sub_begin; ++i) abstracted.target.push_back(Symbol::terminal(target_texts[i]));
    abstracted.target.push_back(Symbol::nonterminal(category, 0));
    for (std::size_t i = sub_end; i < target_texts.size(); ++i) abstracted.target.push_back(Symbol::terminal(target_texts[i]));
    rules.push_back(std::move(abstracted));

    if (typed->node == &body) {
      Rule phrase{category, {}, {}};
      for (std::size_t i = lo; i < hi; ++i) phrase.source.push_back(Symbol::terminal(ex.source[i]));
      for (std::size_t i = sub_begin; i < sub_end; ++i) phrase.target.push_back(Symbol::terminal(target_texts[i]));
      rules.push_back(std::move(phrase));
    }
  }
  return detail::dedup(std::move(rules));
}

// ROOT -> (SENT sep SENT ... , SENT sep SENT ...) with k linked SENT
// nonterminals, plus SENT -> (source, target) for every example.
inline std::vector<Rule> induce_concat_rules(const Dataset& ds, int k,
                                             std::string_view separator = kSegmentSeparator) {
  if (k < 2) throw std::invalid_argument("concatenation needs k >= 2, got " + std::to_string(k));
  Rule root{std::string(kRootCategory), {}, {}};
  for (int i = 0; i < k; ++i) {
    if (i > 0) {
      root.source.push_back(Symbol::terminal(std::string(separator)));
      root.target.push_back(Symbol::terminal(std::string(separator)));
    }
    root.source.push_back(Symbol::nonterminal(std::string(kSentenceCategory), i));
    root.target.push_back(Symbol::nonterminal(std::string(kSentenceCategory), i));
  }
  std::vector<Rule> rules{std::move(root)};
  for (const auto& ex : ds.examples)
    rules.push_back({std::string(kSentenceCategory), terminals(ex.source), terminals(ex.target.token_texts())});
  return detail::dedup(std::move(rules));
}

// Copies ROOT rules under the SENT category so that concatenation composes
// with the other strategies' recombinant sentences.
inline std::vector<Rule> as_sentence_rules(const std::vector<Rule>& root_rules) {
  std::vector<Rule> out;
  for (const auto& r : root_rules) {
    if (r.lhs != kRootCategory) continue;
    Rule copy = r;
    copy.lhs = std::string(kSentenceCategory);
    out.push_back(std::move(copy));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

namespace detail {

struct Expansion {
  std::vector<std::string> source;
  std::vector<std::string> target;
};

class Sampler {
 public:
  Sampler(const Grammar& g, Rng& rng, std::size_t budget) : grammar_(g), rng_(rng), budget_(budget) {}

  Expansion expand(std::string_view category) {
    const auto& candidates = grammar_.rules_for(category);
    if (candidates.empty()) throw GrammarError("no rules for category '" + std::string(category) + "'");
    if (++used_ > budget_)
      throw SampleError("expansion budget of " + std::to_string(budget_) + " exceeded");
    const Rule& rule = candidates[uniform_index(rng_, candidates.size())];

    std::map<int, Expansion> children;
    Expansion out;
    for (const auto& s : rule.source) {
      if (!s.is_nonterminal()) {
        out.source.push_back(s.text);
        continue;
      }
      Expansion child = expand(s.text);
      out.source.insert(out.source.end(), child.source.begin(), child.source.end());
      children.emplace(s.link, std::move(child));
    }
    for (const auto& s : rule.target) {
      if (!s.is_nonterminal()) {
        out.target.push_back(s.text);
        continue;
      }
      const auto& child = children.at(s.link);
      out.target.insert(out.target.end(), child.target.begin(), child.target.end());
    }
    return out;
  }

 private:
  const Grammar& grammar_;
  Rng& rng_;
  std::size_t budget_;
  std::size_t used_ = 0;
};

}  // namespace detail

inline constexpr std::size_t kDefaultMaxExpansions = 100;

// Top-down, leftmost derivation from ROOT choosing uniformly among the rules
// of each category.
inline Example sample(const Grammar& grammar, Rng& rng,
                      std::size_t max_expansions = kDefaultMaxExpansions) {
  auto expansion = detail::Sampler(grammar, rng, max_expansions).expand(kRootCategory);
  Example ex;
  ex.origin = Origin::kRecombinant;
  ex.source = std::move(expansion.source);
  try {
    ex.target = parse_target(expansion.target);
  } catch (const std::exception& e) {
    throw InvalidTargetError(std::string("sampled target does not parse: ") + e.what());
  }
  return ex;
}

inline Example sample(const Grammar& grammar, std::uint64_t seed,
                      std::size_t max_expansions = kDefaultMaxExpansions) {
  Rng rng(seed);
  return sample(grammar, rng, max_expansions);
}

inline constexpr std::size_t kRetryFactor = 10;

// Draws n examples; invalid samples and (when dedup_against is given)
// copies of its examples are discarded and redrawn, up to 10n attempts.
inline Dataset generate_augmented(const Grammar& grammar, std::size_t n, std::uint64_t seed,
                                  const Dataset* dedup_against = nullptr,
                                  std::size_t max_expansions = kDefaultMaxExpansions) {
  Dataset out;
  out.name = "recombinant";
  if (n == 0) return out;
  std::unordered_set<std::string> banned;
  if (dedup_against != nullptr)
    for (const auto& ex : dedup_against->examples) banned.insert(ex.key());

  Rng rng(seed);
  const std::size_t attempts = kRetryFactor * n;
  for (std::size_t a = 0; a < attempts && out.size() < n; ++a) {
    try {
      Example ex = sample(grammar, rng, max_expansions);
      if (banned.count(ex.key())) continue;
      out.examples.push_back(std::move(ex));
    } catch (const SampleError&) {
    } catch (const InvalidTargetError&) {
    }
  }
  if (out.size() < n)
    throw GenerationError(out.size(), n,
                          "generated " + std::to_string(out.size()) + " of " + std::to_string(n) +
                              " examples within " + std::to_string(attempts) + " attempts (shortfall " +
                              std::to_string(n - out.size()) + ")");
  return out;
}

// ---------------------------------------------------------------------------
// Text forms

// Human-readable form:  ROOT -> (what states border StateId ?, answer(...stateid(StateId)...))
// Lexical rules (no nonterminals, lhs other than ROOT) quote the source phrase.
inline std::string format_rule(const Rule& rule) {
  std::string src;
  for (std::size_t i = 0; i < rule.source.size(); ++i) {
    if (i > 0) src += ' ';
    src += rule.source[i].text;
  }
  if (rule.lhs != kRootCategory && !rule.has_nonterminals()) src = '"' + src + '"';
  std::string tgt;
  for (const auto& s : rule.target) {
    if (s.text == kSegmentSeparator && !s.is_nonterminal()) {
      tgt += ' ';
      tgt += s.text;
      tgt += ' ';
    } else {
      tgt += s.text;
    }
  }
  return rule.lhs + " -> (" + src + ", " + tgt + ")";
}

inline std::string format_symbol(const Symbol& s) {
  return s.is_nonterminal() ? "[" + s.text + "#" + std::to_string(s.link) + "]" : s.text;
}

inline Symbol parse_symbol(const std::string& text) {
  if (text.size() > 3 && text.front() == '[' && text.back() == ']') {
    const auto hash = text.rfind('#');
    if (hash != std::string::npos && hash > 1 && hash + 1 < text.size() - 1) {
      const std::string digits = text.substr(hash + 1, text.size() - hash - 2);
      if (std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return Symbol::nonterminal(text.substr(1, hash - 1), std::stoi(digits));
    }
  }
  return Symbol::terminal(text);
}

// Grammar file line: lhs TAB source-symbols TAB target-symbols, symbols
// separated by single spaces, nonterminals written [Category#link].
inline std::string format_rule_line(const Rule& rule) {
  auto side = [](const std::vector<Symbol>& symbols) {
    std::string out;
    for (std::size_t i = 0; i < symbols.size(); ++i) {
      if (i > 0) out += ' ';
      out += format_symbol(symbols[i]);
    }
    return out;
  };
  return rule.lhs + '\t' + side(rule.source) + '\t' + side(rule.target);
}

inline Rule parse_rule_line(const std::string& line, std::size_t line_no = 0) {
  const auto t1 = line.find('\t');
  const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
  if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos || t1 == 0)
    throw GrammarError("line " + std::to_string(line_no) + ": expected lhs<TAB>source<TAB>target");
  auto side = [](const std::string& text) {
    std::vector<Symbol> out;
    std::istringstream in(text);
    std::string tok;
    while (in >> tok) out.push_back(parse_symbol(tok));
    return out;
  };
  Rule r{line.substr(0, t1), side(line.substr(t1 + 1, t2 - t1 - 1)), side(line.substr(t2 + 1))};
  if (!is_aligned(r)) throw GrammarError("line " + std::to_string(line_no) + ": misaligned nonterminals");
  return r;
}

// Categories in lexicographic order, rules in insertion order.
inline void write_grammar(const Grammar& g, std::ostream& out) {
  for (const auto& [lhs, rules] : g.rules())
    for (const auto& r : rules) out << format_rule_line(r) << '\n';
}

inline void write_grammar(const Grammar& g, const std::filesystem::path& path) {
  write_atomically(path, [&](std::ostream& out) { write_grammar(g, out); });
}

inline Grammar read_grammar(std::istream& in) {
  Grammar g;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    g.add(parse_rule_line(line, line_no));
  }
  return g;
}

inline Grammar read_grammar(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_grammar(in);
}

}  // namespace recomb::scfg
