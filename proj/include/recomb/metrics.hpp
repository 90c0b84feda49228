#pragma once

// Scoring predicted logical-form token sequences against gold forms.

#include <algorithm>
#include <array>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "recomb/dataset.hpp"
#include "recomb/lf.hpp"

namespace recomb::metrics {

// Decoder output; need not be a valid logical form.
struct Prediction {
  std::vector<std::string> tokens;
};

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline void check_aligned(std::size_t preds, std::size_t golds) {
  if (preds != golds)
    throw UsageError("predictions and golds differ in length (" + std::to_string(preds) + " vs " +
                     std::to_string(golds) + ")");
}

inline bool exact_match(const Prediction& pred, const lf::LogicalForm& gold) {
  return lf::join_canonical(pred.tokens) == lf::render(gold);
}

struct Ratio {
  std::size_t num = 0;
  std::size_t den = 0;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// |multiset(gold) & multiset(pred)| over |gold|.
inline Ratio token_overlap(const Prediction& pred, const lf::LogicalForm& gold) {
  std::map<std::string, std::size_t> available;
  for (const auto& t : pred.tokens) ++available[t];
  Ratio r{0, gold.tokens.size()};
  for (const auto& t : gold.tokens) {
    auto it = available.find(t.text);
    if (it != available.end() && it->second > 0) {
      --it->second;
      ++r.num;
    }
  }
  return r;
}

// Unique non-punctuation tokens; both empty counts as a perfect match.
inline Ratio iou_ratio(const Prediction& pred, const lf::LogicalForm& gold) {
  std::set<std::string> p, g;
  for (const auto& t : pred.tokens)
    if (!lf::is_punctuation(t)) p.insert(t);
  for (const auto& t : gold.tokens)
    if (!lf::is_punctuation(t.text)) g.insert(t.text);
  std::vector<std::string> inter;
  std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(inter));
  const std::size_t uni = p.size() + g.size() - inter.size();
  if (uni == 0) return {1, 1};
  return {inter.size(), uni};
}

inline double iou(const Prediction& pred, const lf::LogicalForm& gold) { return iou_ratio(pred, gold).value(); }

inline double sequence_accuracy(const std::vector<Prediction>& preds, const std::vector<lf::LogicalForm>& golds) {
  check_aligned(preds.size(), golds.size());
  if (golds.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) hits += exact_match(preds[i], golds[i]);
  return static_cast<double>(hits) / static_cast<double>(golds.size());
}

// Macro-averaged over examples.
inline double token_accuracy(const std::vector<Prediction>& preds, const std::vector<lf::LogicalForm>& golds) {
  check_aligned(preds.size(), golds.size());
  if (golds.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < golds.size(); ++i) sum += token_overlap(preds[i], golds[i]).value();
  return sum / static_cast<double>(golds.size());
}

inline constexpr std::size_t kHistogramBuckets = 10;

// Bucket b covers [b/10, (b+1)/10); IoU 1 falls in the last bucket.
inline std::size_t iou_bucket(const Ratio& r) {
  return std::min(kHistogramBuckets - 1, kHistogramBuckets * r.num / r.den);
}

struct ExampleScore {
  bool exact = false;
  bool ast_equal = false;  // prediction parses to the gold tree
  double token_accuracy = 0.0;
  double iou = 0.0;
  std::size_t gold_open_parens = 0;
};

struct Bucket {
  std::size_t count = 0;
  std::size_t correct = 0;
  double accuracy() const { return count == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(count); }
};

struct EvalReport {
  double sequence_accuracy = 0.0;
  double token_accuracy = 0.0;
  double ast_accuracy = 0.0;
  double mean_iou = 0.0;
  std::vector<ExampleScore> per_example;
  std::map<std::size_t, Bucket> complexity_buckets;          // gold open-paren count
  std::map<std::size_t, std::size_t> iou_error_histogram;    // non-empty buckets, errors only
};

inline bool parses_to(const Prediction& pred, const lf::LogicalForm& gold) {
  try {
    return lf::parse(lf::tokens_from_texts(pred.tokens)).root == gold.root;
  } catch (const std::exception&) {
    return false;
  }
}

inline EvalReport evaluate(const std::vector<Prediction>& preds, const std::vector<lf::LogicalForm>& golds) {
  check_aligned(preds.size(), golds.size());
  EvalReport report;
  report.per_example.reserve(golds.size());
  std::size_t exact = 0, ast = 0;
  double tok_sum = 0.0, iou_sum = 0.0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    ExampleScore s;
    s.exact = exact_match(preds[i], golds[i]);
    s.ast_equal = s.exact || parses_to(preds[i], golds[i]);
    s.token_accuracy = token_overlap(preds[i], golds[i]).value();
    const Ratio iou_r = iou_ratio(preds[i], golds[i]);
    s.iou = iou_r.value();
    s.gold_open_parens = lf::open_paren_count(golds[i]);

    exact += s.exact;
    ast += s.ast_equal;
    tok_sum += s.token_accuracy;
    iou_sum += s.iou;
    Bucket& b = report.complexity_buckets[s.gold_open_parens];
    ++b.count;
    b.correct += s.exact;
    if (!s.exact) ++report.iou_error_histogram[iou_bucket(iou_r)];
    report.per_example.push_back(s);
  }
  if (!golds.empty()) {
    const double n = static_cast<double>(golds.size());
    report.sequence_accuracy = static_cast<double>(exact) / n;
    report.ast_accuracy = static_cast<double>(ast) / n;
    report.token_accuracy = tok_sum / n;
    report.mean_iou = iou_sum / n;
  }
  return report;
}

// ---------------------------------------------------------------------------
// I/O

// Splits a prediction line on whitespace. Pieces that lex cleanly as several
// logical-form tokens ("stateid(utah)") are split further; anything else is
// kept verbatim.
inline Prediction parse_prediction_line(const std::string& line) {
  Prediction p;
  std::istringstream in(line);
  std::string piece;
  while (in >> piece) {
    try {
      for (auto& t : lf::tokenize(piece)) p.tokens.push_back(std::move(t.text));
    } catch (const lf::LexError&) {
      p.tokens.push_back(piece);
    }
  }
  return p;
}

inline std::vector<Prediction> read_predictions(std::istream& in) {
  std::vector<Prediction> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(parse_prediction_line(line));
  }
  return out;
}

inline std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return read_predictions(in);
}

inline nlohmann::ordered_json to_json(const EvalReport& r, bool include_per_example = true) {
  nlohmann::ordered_json j;
  j["num_examples"] = r.per_example.size();
  j["sequence_accuracy"] = r.sequence_accuracy;
  j["token_accuracy"] = r.token_accuracy;
  j["ast_accuracy"] = r.ast_accuracy;
  j["mean_iou"] = r.mean_iou;
  auto buckets = nlohmann::ordered_json::array();
  for (const auto& [parens, b] : r.complexity_buckets)
    buckets.push_back({{"open_parens", parens}, {"count", b.count}, {"correct", b.correct}, {"accuracy", b.accuracy()}});
  j["complexity_buckets"] = std::move(buckets);
  auto hist = nlohmann::ordered_json::array();
  for (std::size_t b = 0; b < kHistogramBuckets; ++b) {
    auto it = r.iou_error_histogram.find(b);
    hist.push_back({{"lo", static_cast<double>(b) / kHistogramBuckets},
                    {"hi", static_cast<double>(b + 1) / kHistogramBuckets},
                    {"count", it == r.iou_error_histogram.end() ? 0 : it->second}});
  }
  j["iou_error_histogram"] = std::move(hist);
  if (include_per_example) {
    auto rows = nlohmann::ordered_json::array();
    for (const auto& s : r.per_example)
      rows.push_back({{"exact", s.exact},
                      {"ast_equal", s.ast_equal},
                      {"token_accuracy", s.token_accuracy},
                      {"iou", s.iou},
                      {"gold_open_parens", s.gold_open_parens}});
    j["per_example"] = std::move(rows);
  }
  return j;
}

// Plot data: IoU distribution over incorrect predictions.
inline void write_iou_histogram_tsv(const EvalReport& r, std::ostream& out) {
  out << "bucket_lo\tbucket_hi\tcount\n";
  for (std::size_t b = 0; b < kHistogramBuckets; ++b) {
    auto it = r.iou_error_histogram.find(b);
    out << static_cast<double>(b) / kHistogramBuckets << '\t' << static_cast<double>(b + 1) / kHistogramBuckets
        << '\t' << (it == r.iou_error_histogram.end() ? 0 : it->second) << '\n';
  }
}

// Plot data: accuracy by gold open-paren count.
inline void write_complexity_tsv(const EvalReport& r, std::ostream& out) {
  out << "open_parens\tcount\taccuracy\n";
  for (const auto& [parens, b] : r.complexity_buckets) out << parens << '\t' << b.count << '\t' << b.accuracy() << '\n';
}

}  // namespace recomb::metrics
