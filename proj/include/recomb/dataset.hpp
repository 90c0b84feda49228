#pragma once

// Utterance / logical-form datasets and the entity lexicon.
//
// On-disk format is TSV, one example per line:
//
//   what states border texas ?<TAB>answer(NV,(state(V0),next_to(V0,NV),const(V0,stateid(texas))))
//
// Concatenated examples carry several logical forms in the target column,
// separated by the " </s> " token.

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "recomb/lf.hpp"

namespace recomb {

inline constexpr std::string_view kSegmentSeparator = "</s>";

enum class Origin { kOriginal, kRecombinant, kCooc };

// One or more logical forms; more than one only for concatenated examples.
struct Target {
  std::vector<lf::LogicalForm> segments;

  std::string render() const {
    std::string out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (i > 0) {
        out += ' ';
        out += kSegmentSeparator;
        out += ' ';
      }
      out += lf::render(segments[i]);
    }
    return out;
  }

  // Token texts, with the separator between segments.
  std::vector<std::string> token_texts() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < segments.size(); ++i) {
      if (i > 0) out.emplace_back(kSegmentSeparator);
      for (const auto& t : segments[i].tokens) out.push_back(t.text);
    }
    return out;
  }

  const lf::LogicalForm& single() const {
    if (segments.size() != 1)
      throw std::invalid_argument("expected a single logical form, found " +
                                  std::to_string(segments.size()) + " segments");
    return segments.front();
  }

  bool operator==(const Target& other) const { return segments == other.segments; }
};

// Splits on the separator and parses each segment. Throws lf::LexError or
// lf::ParseError.
inline Target parse_target(const std::vector<std::string>& texts) {
  Target target;
  std::vector<std::string> seg;
  auto flush = [&] {
    target.segments.push_back(lf::parse(lf::tokens_from_texts(seg)));
    seg.clear();
  };
  for (const auto& t : texts) {
    if (t == kSegmentSeparator) {
      flush();
    } else {
      seg.push_back(t);
    }
  }
  flush();
  return target;
}

inline Target parse_target(std::string_view text) {
  Target target;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = text.find(kSegmentSeparator, start);
    const auto piece = text.substr(start, at == std::string_view::npos ? at : at - start);
    target.segments.push_back(lf::parse(piece));
    if (at == std::string_view::npos) break;
    start = at + kSegmentSeparator.size();
  }
  return target;
}

struct Example {
  std::vector<std::string> source;
  Target target;
  Origin origin = Origin::kOriginal;

  std::string source_text() const {
    std::string out;
    for (std::size_t i = 0; i < source.size(); ++i) {
      if (i > 0) out += ' ';
      out += source[i];
    }
    return out;
  }

  // Identity used for deduplication.
  std::string key() const { return source_text() + '\t' + target.render(); }
};

struct Dataset {
  std::string name;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

class LoadError : public std::runtime_error {
 public:
  LoadError(std::size_t line, const std::string& what)
      : std::runtime_error(what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline bool is_utterance_punctuation(char c) {
  return c == '?' || c == '!' || c == ',' || c == ';' || c == ':';
}

inline bool is_punctuation_token(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), [](char c) {
    return is_utterance_punctuation(c) || c == '.';
  });
}

// Lower-cases and splits on whitespace; ? ! , ; : become separate tokens, as
// does a final full stop.
inline std::vector<std::string> tokenize_utterance(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) tokens.push_back(std::move(cur));
    cur.clear();
  };
  std::size_t end = text.size();
  while (end > 0 && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  const bool final_stop = end > 0 && text[end - 1] == '.';
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      flush();
    } else if (is_utterance_punctuation(c) || (final_stop && i == end - 1)) {
      flush();
      tokens.emplace_back(1, c);
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  flush();
  return tokens;
}

inline Example parse_tsv_line(std::string_view line, std::size_t line_no) {
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos)
    throw LoadError(line_no, "line " + std::to_string(line_no) + ": missing TAB separator");
  Example ex;
  ex.source = tokenize_utterance(line.substr(0, tab));
  if (ex.source.empty())
    throw LoadError(line_no, "line " + std::to_string(line_no) + ": empty utterance");
  try {
    ex.target = parse_target(line.substr(tab + 1));
  } catch (const std::exception& e) {
    throw LoadError(line_no, "line " + std::to_string(line_no) + ": " + e.what());
  }
  return ex;
}

inline Dataset read_dataset(std::istream& in, std::string name = {}) {
  Dataset ds;
  ds.name = std::move(name);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ds.examples.push_back(parse_tsv_line(line, line_no));
  }
  return ds;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_dataset(in, path.stem().string());
}

inline void write_dataset(const Dataset& ds, std::ostream& out) {
  for (const auto& ex : ds.examples) out << ex.source_text() << '\t' << ex.target.render() << '\n';
}

// Writes to a temporary sibling, then renames over the destination.
template <typename Writer>
void write_atomically(const std::filesystem::path& path, Writer&& writer) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
  write_atomically(path, [&](std::ostream& out) { write_dataset(ds, out); });
}

// ---------------------------------------------------------------------------
// Entity lexicon

using Phrase = std::vector<std::string>;

struct LexiconEntry {
  Phrase phrase;
  std::string type;
  std::string atom;

  auto operator<=>(const LexiconEntry&) const = default;
};

struct SkippedEntity {
  std::size_t example_index;
  lf::TypedEntity entity;
  std::string reason;
};

// Phrase -> (type, atom). A phrase may map to more than one typed atom
// ("mississippi" the state and the river).
class EntityLexicon {
 public:
  void add(LexiconEntry entry) { entries_.insert(std::move(entry)); }

  std::vector<LexiconEntry> lookup(const Phrase& phrase) const {
    std::vector<LexiconEntry> out;
    for (auto it = entries_.lower_bound(LexiconEntry{phrase, {}, {}});
         it != entries_.end() && it->phrase == phrase; ++it)
      out.push_back(*it);
    return out;
  }

  bool contains(const LexiconEntry& e) const { return entries_.count(e) > 0; }
  const std::set<LexiconEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::set<LexiconEntry> entries_;
};

// Index of the first occurrence of needle in haystack, or npos.
inline std::size_t find_phrase(const std::vector<std::string>& haystack, const Phrase& needle,
                               std::size_t from = 0) {
  if (needle.empty() || needle.size() > haystack.size()) return std::string::npos;
  for (std::size_t i = from; i + needle.size() <= haystack.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), haystack.begin() + static_cast<long>(i)))
      return i;
  }
  return std::string::npos;
}

inline EntityLexicon build_entity_lexicon(
    const Dataset& ds, const std::set<std::string>& types = lf::default_entity_types(),
    std::vector<SkippedEntity>* skipped = nullptr) {
  EntityLexicon lex;
  for (std::size_t i = 0; i < ds.examples.size(); ++i) {
    const Example& ex = ds.examples[i];
    for (const auto& seg : ex.target.segments) {
      for (auto& entity : lf::extract_entities(seg, types)) {
        std::string reason;
        if (entity.has_qualifier) {
          reason = "qualified entity";
        } else if (find_phrase(ex.source, entity.value_tokens) == std::string::npos) {
          reason = "no verbatim mention";
        }
        if (reason.empty()) {
          lex.add({entity.value_tokens, entity.type, lf::to_lower(entity.atom)});
        } else if (skipped != nullptr) {
          skipped->push_back({i, std::move(entity), std::move(reason)});
        }
      }
    }
  }
  return lex;
}

}  // namespace recomb
