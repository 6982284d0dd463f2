#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsvp/embeddings.hpp"

namespace rsvp {

struct MetricConfig {
  // Semantic match threshold for s_iou and the semantic accuracy matcher.
  double tau = 0.5;
  // Dropped after normalization; empty by default.
  std::set<std::string> stopwords;
};
void validate(const MetricConfig& cfg);

// Normalization applied everywhere: lowercase, strip punctuation characters
// (they do not split words: "co-op" -> "coop"), split on whitespace, drop
// stopwords. Pure function of its inputs.
std::vector<std::string> tokenize(const std::string& text,
                                  const MetricConfig& cfg = {});

// Mean of in-vocabulary token vectors, L2-normalized; all-zero vector when
// nothing embeds (empty text, or every token OOV).
std::vector<double> sentence_embedding(const std::string& text,
                                       const EmbeddingTable& table,
                                       const MetricConfig& cfg = {});

// Cosine of the two sentence embeddings, in [-1, 1]; 0 when either side
// has a zero embedding.
double ss(const std::string& pred, const std::string& gt,
          const EmbeddingTable& table, const MetricConfig& cfg = {});

// Bidirectional thresholded token matching over deduplicated token sets:
// (|{a in A matched in B}| + |{b in B matched in A}|) / (|A| + |B|), where a
// token matches when some counterpart has cosine > tau. Both sides empty ->
// 1.0; exactly one empty -> 0.0.
double s_iou(const std::string& pred, const std::string& gt,
             const EmbeddingTable& table, const MetricConfig& cfg = {});

// Sentence BLEU with brevity penalty. Modified n-gram precision per order,
// clipped against the maximum reference count; the geometric mean runs over
// the orders the candidate can populate (so a two-token candidate scored
// with n_max = 4 averages orders 1-2). Empty candidate -> 0.
double bleu_n(const std::string& candidate,
              const std::vector<std::string>& references, int n_max,
              const MetricConfig& cfg = {});

// LCS-based F1 (beta = 1). Both empty -> 1.0; exactly one empty -> 0.0.
double rouge_l(const std::string& candidate, const std::string& reference,
               const MetricConfig& cfg = {});
// Unigram-overlap F1 with the same edge conventions.
double rouge_1(const std::string& candidate, const std::string& reference,
               const MetricConfig& cfg = {});

struct CiderResult {
  std::vector<double> per_item;
  double mean = 0.0;
};

// TF-IDF n-gram cosine form, n = 1..4, x10. IDF comes from reference sets:
// idf(g) = log(N) - log(max(1, df(g))) with df counted once per item.
// Throws std::invalid_argument when the corpus has fewer than two items or
// a candidate has no references.
CiderResult cider(const std::vector<std::string>& candidates,
                  const std::vector<std::vector<std::string>>& references,
                  const MetricConfig& cfg = {});

// Exact matcher: token-normalized equality.
double accuracy(const std::vector<std::string>& preds,
                const std::vector<std::string>& gts,
                const MetricConfig& cfg = {});
// Semantic matcher: ss(pred, gt) > cfg.tau.
double accuracy_semantic(const std::vector<std::string>& preds,
                         const std::vector<std::string>& gts,
                         const EmbeddingTable& table,
                         const MetricConfig& cfg = {});

struct ScoreReport {
  std::string metric;
  std::vector<std::string> ids;
  std::vector<double> scores;  // aligned with ids
  double aggregate = 0.0;      // arithmetic mean
  size_t n() const { return scores.size(); }
};

ScoreReport make_report(const std::string& metric,
                        std::vector<std::string> ids,
                        std::vector<double> scores);

// JSONL {"id": ..., "text": ...} per line.
std::vector<std::pair<std::string, std::string>> read_id_text_jsonl(
    const std::string& path);

nlohmann::ordered_json report_to_json(const ScoreReport& r);
// Aligned plain-text table, one row per metric aggregate.
std::string format_report_table(const std::vector<ScoreReport>& reports);

}  // namespace rsvp
