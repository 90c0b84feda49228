#pragma once

// Prolog-style logical forms: lexing, parsing, canonical rendering and
// entity extraction.
//
//   _answer(NV,(_capital(V0),_loc(V0,NV),_const(V0,_stateid(alaska))))
//
// A term is an identifier, an identifier applied to a parenthesized argument
// list, or a bare parenthesized list (a "group", used for conjunctions).

#include <cctype>
#include <cstddef>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace recomb::lf {

enum class TokenKind { kFunctor, kVariable, kAtom, kOpenParen, kCloseParen, kComma };

struct Token {
  std::string text;
  TokenKind kind;

  bool operator==(const Token&) const = default;
};

// Lexical error; offset is the byte offset of the offending character.
class LexError : public std::runtime_error {
 public:
  LexError(std::size_t offset, const std::string& what)
      : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Parse error; token_index is the position in the token stream where the
// problem was detected (== size() for premature end of input).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t token_index, const std::string& what)
      : std::runtime_error(what), token_index_(token_index) {}
  std::size_t token_index() const { return token_index_; }

 private:
  std::size_t token_index_;
};

struct Node {
  std::string head;         // functor or atom; empty for groups
  std::vector<Node> args;   // empty for leaves
  bool is_group = false;

  bool is_leaf() const { return !is_group && args.empty(); }
  bool operator==(const Node&) const = default;
};

struct LogicalForm {
  std::vector<Token> tokens;
  Node root;

  bool operator==(const LogicalForm& other) const { return root == other.root; }
};

inline bool is_identifier_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '.';
}

inline bool is_variable_text(std::string_view text) {
  return !text.empty() && std::isupper(static_cast<unsigned char>(text.front()));
}

inline bool is_punctuation(std::string_view text) {
  return text == "(" || text == ")" || text == ",";
}

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Fixes up identifier kinds: an identifier directly followed by "(" is a
// functor (unless it is a variable), otherwise a variable or an atom.
inline void classify_identifiers(std::vector<Token>& tokens) {
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    Token& t = tokens[i];
    if (t.kind == TokenKind::kOpenParen || t.kind == TokenKind::kCloseParen ||
        t.kind == TokenKind::kComma)
      continue;
    if (is_variable_text(t.text)) {
      t.kind = TokenKind::kVariable;
    } else if (i + 1 < tokens.size() && tokens[i + 1].kind == TokenKind::kOpenParen) {
      t.kind = TokenKind::kFunctor;
    } else {
      t.kind = TokenKind::kAtom;
    }
  }
}

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (c == '(') {
      tokens.push_back({"(", TokenKind::kOpenParen});
      ++i;
    } else if (c == ')') {
      tokens.push_back({")", TokenKind::kCloseParen});
      ++i;
    } else if (c == ',') {
      tokens.push_back({",", TokenKind::kComma});
      ++i;
    } else if (is_identifier_char(c)) {
      std::size_t j = i;
      while (j < text.size() && is_identifier_char(text[j])) ++j;
      tokens.push_back({std::string(text.substr(i, j - i)), TokenKind::kAtom});
      i = j;
    } else {
      throw LexError(i, "unexpected character '" + std::string(1, c) + "' at offset " +
                            std::to_string(i));
    }
  }
  classify_identifiers(tokens);
  return tokens;
}

// Builds tokens from already-split texts; each text must be exactly one token.
inline std::vector<Token> tokens_from_texts(const std::vector<std::string>& texts) {
  std::vector<Token> tokens;
  tokens.reserve(texts.size());
  std::size_t offset = 0;
  for (const auto& text : texts) {
    auto one = tokenize(text);
    if (one.size() != 1 || one.front().text != text)
      throw LexError(offset, "'" + text + "' is not a single logical-form token");
    tokens.push_back(std::move(one.front()));
    offset += text.size();
  }
  classify_identifiers(tokens);
  return tokens;
}

namespace detail {

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

  Node parse() {
    if (tokens_.empty()) throw ParseError(0, "empty logical form");
    Node root = term();
    if (pos_ != tokens_.size())
      throw ParseError(pos_, "trailing input after complete term at token " + std::to_string(pos_));
    return root;
  }

 private:
  const Token* peek() const { return pos_ < tokens_.size() ? &tokens_[pos_] : nullptr; }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(pos_, what + " at token " + std::to_string(pos_));
  }

  Node term() {
    const Token* t = peek();
    if (t == nullptr) fail("unexpected end of input");
    switch (t->kind) {
      case TokenKind::kOpenParen: {
        Node group;
        group.is_group = true;
        group.args = arg_list();
        return group;
      }
      case TokenKind::kCloseParen:
        fail("unbalanced ')'");
      case TokenKind::kComma:
        fail("dangling ','");
      default:
        break;
    }
    Node node;
    node.head = t->text;
    ++pos_;
    if (const Token* next = peek(); next != nullptr && next->kind == TokenKind::kOpenParen)
      node.args = arg_list();
    return node;
  }

  // "(" term ("," term)* ")"
  std::vector<Node> arg_list() {
    ++pos_;  // "("
    std::vector<Node> args;
    if (const Token* t = peek(); t != nullptr && t->kind == TokenKind::kCloseParen)
      fail("empty argument list");
    while (true) {
      args.push_back(term());
      const Token* t = peek();
      if (t == nullptr) fail("unbalanced '(': missing ')'");
      if (t->kind == TokenKind::kCloseParen) {
        ++pos_;
        return args;
      }
      if (t->kind != TokenKind::kComma) fail("expected ',' or ')' but found '" + t->text + "'");
      ++pos_;
    }
  }

  const std::vector<Token>& tokens_;
  std::size_t pos_ = 0;
};

inline void render_into(const Node& node, std::string& out) {
  if (!node.is_group) out += node.head;
  if (node.args.empty()) return;
  out += '(';
  for (std::size_t i = 0; i < node.args.size(); ++i) {
    if (i > 0) out += ',';
    render_into(node.args[i], out);
  }
  out += ')';
}

}  // namespace detail

inline LogicalForm parse(std::vector<Token> tokens) {
  Node root = detail::Parser(tokens).parse();
  return LogicalForm{std::move(tokens), std::move(root)};
}

inline LogicalForm parse(std::string_view text) { return parse(tokenize(text)); }

inline std::string render(const Node& node) {
  std::string out;
  detail::render_into(node, out);
  return out;
}

inline std::string render(const LogicalForm& lf) { return render(lf.root); }

// Canonical spacing: token texts concatenated with no separator.
inline std::string join_canonical(const std::vector<std::string>& texts) {
  std::string out;
  for (const auto& t : texts) out += t;
  return out;
}

inline std::vector<std::string> token_texts(const LogicalForm& lf) {
  std::vector<std::string> out;
  out.reserve(lf.tokens.size());
  for (const auto& t : lf.tokens) out.push_back(t.text);
  return out;
}

inline std::size_t open_paren_count(const LogicalForm& lf) {
  std::size_t n = 0;
  for (const auto& t : lf.tokens) n += t.kind == TokenKind::kOpenParen;
  return n;
}

// Number of tokens the node occupies in canonical rendering.
inline std::size_t token_span(const Node& node) {
  std::size_t n = node.is_group ? 0 : 1;
  if (!node.args.empty()) {
    n += 2 + (node.args.size() - 1);
    for (const auto& a : node.args) n += token_span(a);
  }
  return n;
}

// Head with any leading underscore removed, lower-cased: "_stateid" -> "stateid".
inline std::string bare_head(std::string_view head) {
  if (!head.empty() && head.front() == '_') head.remove_prefix(1);
  return to_lower(head);
}

inline std::vector<std::string> split_underscores(std::string_view atom) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : atom) {
    if (c == '_') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

inline const std::set<std::string>& default_entity_types() {
  static const std::set<std::string> types = {"stateid", "cityid", "riverid", "placeid",
                                              "countryid"};
  return types;
}

struct TypedEntity {
  std::string type;                      // e.g. "stateid"
  std::string atom;                      // target atom as written, e.g. "new_york"
  std::vector<std::string> value_tokens; // {"new", "york"}
  std::size_t token_index = 0;           // position of the atom in the token stream
  // Extra non-placeholder arguments (cityid(austin,tx)); such entities have
  // no verbatim mention to align against.
  bool has_qualifier = false;
};

namespace detail {

inline void collect_entities(const Node& node, std::size_t start,
                             const std::set<std::string>& types,
                             std::vector<TypedEntity>& out) {
  std::size_t pos = start + (node.is_group ? 0 : 1);
  if (!node.args.empty()) {
    if (!node.is_group && types.count(bare_head(node.head)) && node.args.front().is_leaf() &&
        !is_variable_text(node.args.front().head)) {
      TypedEntity e;
      e.type = bare_head(node.head);
      e.atom = node.args.front().head;
      e.value_tokens = split_underscores(e.atom);
      e.token_index = pos + 1;
      for (std::size_t i = 1; i < node.args.size(); ++i) {
        const Node& q = node.args[i];
        if (!(q.is_leaf() && q.head == "_")) e.has_qualifier = true;
      }
      if (!e.value_tokens.empty()) out.push_back(std::move(e));
    }
    ++pos;  // "("
    for (std::size_t i = 0; i < node.args.size(); ++i) {
      if (i > 0) ++pos;  // ","
      collect_entities(node.args[i], pos, types, out);
      pos += token_span(node.args[i]);
    }
  }
}

}  // namespace detail

inline std::vector<TypedEntity> extract_entities(
    const LogicalForm& lf, const std::set<std::string>& types = default_entity_types()) {
  std::vector<TypedEntity> out;
  detail::collect_entities(lf.root, 0, types, out);
  return out;
}

}  // namespace recomb::lf
