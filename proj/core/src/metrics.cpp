#include "rsvp/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "rsvp/errors.hpp"

namespace rsvp {
namespace {

// Every public score passes through here: hard-fails on real range
// violations, forgives sub-epsilon float excursions.
double checked(double v, double lo, double hi, const char* what) {
  const double slack = 1e-12;
  if (!(v >= lo - slack && v <= hi + slack))
    throw std::logic_error(std::string(what) + " out of range: " +
                           std::to_string(v));
  return std::clamp(v, lo, hi);
}

using Counts = std::unordered_map<std::string, double>;

// N-grams as separator-joined keys; '\x1f' cannot appear in normalized
// tokens.
Counts ngram_counts(const std::vector<std::string>& tokens, int n) {
  Counts out;
  if (n <= 0 || tokens.size() < static_cast<size_t>(n)) return out;
  for (size_t i = 0; i + n <= tokens.size(); ++i) {
    std::string key = tokens[i];
    for (int k = 1; k < n; ++k) {
      key.push_back('\x1f');
      key += tokens[i + k];
    }
    out[key] += 1.0;
  }
  return out;
}

double counts_total(const Counts& c) {
  double s = 0.0;
  for (const auto& [k, v] : c) s += v;
  return s;
}

double cosine_counts(const Counts& a, const Counts& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [k, v] : a) {
    na += v * v;
    auto it = b.find(k);
    if (it != b.end()) dot += v * it->second;
  }
  for (const auto& [k, v] : b) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::string> embeddable_token_set(const std::string& text,
                                              const EmbeddingTable& table,
                                              const MetricConfig& cfg) {
  std::vector<std::string> tokens = tokenize(text, cfg);
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (auto& t : tokens) {
    if (table.oov == OovPolicy::skip_token && !table.contains(t)) continue;
    if (seen.insert(t).second) out.push_back(std::move(t));
  }
  return out;
}

std::vector<double> token_vector(const std::string& token,
                                 const EmbeddingTable& table) {
  if (const auto* v = table.find(token)) return *v;
  return std::vector<double>(static_cast<size_t>(table.dim), 0.0);
}

}  // namespace

void validate(const MetricConfig& cfg) {
  if (!(cfg.tau > 0.0 && cfg.tau < 1.0))
    throw std::invalid_argument("tau must lie in (0, 1)");
}

std::vector<std::string> tokenize(const std::string& text,
                                  const MetricConfig& cfg) {
  std::vector<std::string> out;
  std::string token;
  auto flush = [&] {
    if (!token.empty() && !cfg.stopwords.count(token)) out.push_back(token);
    token.clear();
  };
  for (char ch : text) {
    unsigned char u = static_cast<unsigned char>(ch);
    if (std::isalnum(u))
      token.push_back(static_cast<char>(std::tolower(u)));
    else if (std::isspace(u))
      flush();
    // punctuation: stripped, does not split the word
  }
  flush();
  return out;
}

std::vector<double> sentence_embedding(const std::string& text,
                                       const EmbeddingTable& table,
                                       const MetricConfig& cfg) {
  std::vector<double> acc(static_cast<size_t>(table.dim), 0.0);
  int used = 0;
  for (const auto& t : tokenize(text, cfg)) {
    const auto* v = table.find(t);
    if (!v) continue;
    for (size_t i = 0; i < acc.size(); ++i) acc[i] += (*v)[i];
    ++used;
  }
  if (used == 0) return acc;  // zero vector
  for (double& x : acc) x /= used;
  double n = l2_norm(acc);
  if (n == 0.0) return std::vector<double>(acc.size(), 0.0);
  for (double& x : acc) x /= n;
  return acc;
}

double ss(const std::string& pred, const std::string& gt,
          const EmbeddingTable& table, const MetricConfig& cfg) {
  validate(cfg);
  auto a = sentence_embedding(pred, table, cfg);
  auto b = sentence_embedding(gt, table, cfg);
  if (l2_norm(a) == 0.0 || l2_norm(b) == 0.0) return 0.0;
  return checked(cosine(a, b), -1.0, 1.0, "ss");
}

double s_iou(const std::string& pred, const std::string& gt,
             const EmbeddingTable& table, const MetricConfig& cfg) {
  validate(cfg);
  auto A = embeddable_token_set(pred, table, cfg);
  auto B = embeddable_token_set(gt, table, cfg);
  if (A.empty() && B.empty()) return 1.0;
  if (A.empty() || B.empty()) return 0.0;

  std::vector<std::vector<double>> va, vb;
  va.reserve(A.size());
  vb.reserve(B.size());
  for (const auto& t : A) va.push_back(token_vector(t, table));
  for (const auto& t : B) vb.push_back(token_vector(t, table));

  size_t matched_a = 0, matched_b = 0;
  std::vector<bool> b_hit(B.size(), false);
  for (size_t i = 0; i < va.size(); ++i) {
    bool hit = false;
    for (size_t j = 0; j < vb.size(); ++j) {
      if (cosine(va[i], vb[j]) > cfg.tau) {
        hit = true;
        b_hit[j] = true;
      }
    }
    if (hit) ++matched_a;
  }
  for (bool h : b_hit)
    if (h) ++matched_b;
  double score = static_cast<double>(matched_a + matched_b) /
                 static_cast<double>(A.size() + B.size());
  return checked(score, 0.0, 1.0, "s_iou");
}

double bleu_n(const std::string& candidate,
              const std::vector<std::string>& references, int n_max,
              const MetricConfig& cfg) {
  if (n_max < 1 || n_max > 4)
    throw std::invalid_argument("bleu_n: n_max must be in 1..4");
  if (references.empty())
    throw std::invalid_argument("bleu_n: need at least one reference");
  std::vector<std::string> c = tokenize(candidate, cfg);
  if (c.empty()) return 0.0;
  std::vector<std::vector<std::string>> refs;
  refs.reserve(references.size());
  for (const auto& r : references) refs.push_back(tokenize(r, cfg));

  double log_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= n_max; ++n) {
    Counts cand = ngram_counts(c, n);
    if (cand.empty()) continue;  // candidate too short to form this order
    Counts clip;
    for (const auto& ref : refs) {
      Counts rc = ngram_counts(ref, n);
      for (const auto& [g, cnt] : rc) {
        auto it = clip.find(g);
        if (it == clip.end() || it->second < cnt) clip[g] = cnt;
      }
    }
    double matched = 0.0;
    for (const auto& [g, cnt] : cand) {
      auto it = clip.find(g);
      if (it != clip.end()) matched += std::min(cnt, it->second);
    }
    if (matched == 0.0) return 0.0;
    log_sum += std::log(matched / counts_total(cand));
    ++orders;
  }
  if (orders == 0) return 0.0;
  double geo = std::exp(log_sum / orders);

  // Effective reference length: closest to the candidate, ties to shorter.
  size_t c_len = c.size();
  size_t r_len = refs[0].size();
  for (const auto& ref : refs) {
    size_t len = ref.size();
    auto dist = [&](size_t l) {
      return l > c_len ? l - c_len : c_len - l;
    };
    if (dist(len) < dist(r_len) || (dist(len) == dist(r_len) && len < r_len))
      r_len = len;
  }
  double bp = 1.0;
  if (c_len < r_len)
    bp = std::exp(1.0 - static_cast<double>(r_len) / static_cast<double>(c_len));
  return checked(bp * geo, 0.0, 1.0, "bleu");
}

namespace {

size_t lcs_length(const std::vector<std::string>& a,
                  const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      if (a[i - 1] == b[j - 1])
        cur[j] = prev[j - 1] + 1;
      else
        cur[j] = std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double f1(double p, double r) {
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

}  // namespace

double rouge_l(const std::string& candidate, const std::string& reference,
               const MetricConfig& cfg) {
  std::vector<std::string> c = tokenize(candidate, cfg);
  std::vector<std::string> r = tokenize(reference, cfg);
  if (c.empty() && r.empty()) return 1.0;
  if (c.empty() || r.empty()) return 0.0;
  double lcs = static_cast<double>(lcs_length(c, r));
  double p = lcs / static_cast<double>(c.size());
  double rec = lcs / static_cast<double>(r.size());
  return checked(f1(p, rec), 0.0, 1.0, "rouge_l");
}

double rouge_1(const std::string& candidate, const std::string& reference,
               const MetricConfig& cfg) {
  std::vector<std::string> c = tokenize(candidate, cfg);
  std::vector<std::string> r = tokenize(reference, cfg);
  if (c.empty() && r.empty()) return 1.0;
  if (c.empty() || r.empty()) return 0.0;
  Counts cc = ngram_counts(c, 1);
  Counts rc = ngram_counts(r, 1);
  double matched = 0.0;
  for (const auto& [g, cnt] : cc) {
    auto it = rc.find(g);
    if (it != rc.end()) matched += std::min(cnt, it->second);
  }
  double p = matched / static_cast<double>(c.size());
  double rec = matched / static_cast<double>(r.size());
  return checked(f1(p, rec), 0.0, 1.0, "rouge_1");
}

CiderResult cider(const std::vector<std::string>& candidates,
                  const std::vector<std::vector<std::string>>& references,
                  const MetricConfig& cfg) {
  const size_t N = candidates.size();
  if (references.size() != N)
    throw std::invalid_argument("cider: candidates/references length mismatch");
  if (N < 2)
    throw std::invalid_argument(
        "cider: corpus must contain at least two items for a meaningful IDF");
  for (const auto& refs : references)
    if (refs.empty())
      throw std::invalid_argument("cider: every candidate needs a reference");

  const int kMaxOrder = 4;
  std::vector<std::vector<std::string>> cand_tok(N);
  std::vector<std::vector<std::vector<std::string>>> ref_tok(N);
  for (size_t i = 0; i < N; ++i) {
    cand_tok[i] = tokenize(candidates[i], cfg);
    for (const auto& r : references[i]) ref_tok[i].push_back(tokenize(r, cfg));
  }

  // Document frequency per order: in how many items' reference sets the
  // n-gram occurs at least once.
  std::vector<std::unordered_map<std::string, double>> df(kMaxOrder);
  for (int n = 1; n <= kMaxOrder; ++n) {
    for (size_t i = 0; i < N; ++i) {
      std::unordered_set<std::string> seen;
      for (const auto& ref : ref_tok[i])
        for (const auto& [g, cnt] : ngram_counts(ref, n)) seen.insert(g);
      for (const auto& g : seen) df[n - 1][g] += 1.0;
    }
  }
  double log_n = std::log(static_cast<double>(N));
  auto idf = [&](int n, const std::string& g) {
    auto it = df[n - 1].find(g);
    double d = it == df[n - 1].end() ? 0.0 : it->second;
    return log_n - std::log(std::max(1.0, d));
  };
  auto tfidf = [&](const std::vector<std::string>& toks, int n) {
    Counts c = ngram_counts(toks, n);
    for (auto& [g, v] : c) v *= idf(n, g);
    return c;
  };

  CiderResult result;
  result.per_item.resize(N, 0.0);
  for (size_t i = 0; i < N; ++i) {
    double item = 0.0;
    for (int n = 1; n <= kMaxOrder; ++n) {
      Counts cv = tfidf(cand_tok[i], n);
      double avg = 0.0;
      for (const auto& ref : ref_tok[i])
        avg += cosine_counts(cv, tfidf(ref, n));
      avg /= static_cast<double>(ref_tok[i].size());
      item += 10.0 * avg;
    }
    item /= kMaxOrder;
    if (item < 0.0) throw std::logic_error("cider went negative");
    result.per_item[i] = item;
  }
  result.mean = std::accumulate(result.per_item.begin(), result.per_item.end(),
                                0.0) /
                static_cast<double>(N);
  return result;
}

double accuracy(const std::vector<std::string>& preds,
                const std::vector<std::string>& gts, const MetricConfig& cfg) {
  if (preds.size() != gts.size() || preds.empty())
    throw std::invalid_argument("accuracy: need equal, non-empty lists");
  size_t hits = 0;
  for (size_t i = 0; i < preds.size(); ++i)
    if (tokenize(preds[i], cfg) == tokenize(gts[i], cfg)) ++hits;
  return checked(static_cast<double>(hits) / preds.size(), 0.0, 1.0,
                 "accuracy");
}

double accuracy_semantic(const std::vector<std::string>& preds,
                         const std::vector<std::string>& gts,
                         const EmbeddingTable& table, const MetricConfig& cfg) {
  if (preds.size() != gts.size() || preds.empty())
    throw std::invalid_argument("accuracy: need equal, non-empty lists");
  validate(cfg);
  size_t hits = 0;
  for (size_t i = 0; i < preds.size(); ++i)
    if (ss(preds[i], gts[i], table, cfg) > cfg.tau) ++hits;
  return checked(static_cast<double>(hits) / preds.size(), 0.0, 1.0,
                 "accuracy");
}

ScoreReport make_report(const std::string& metric, std::vector<std::string> ids,
                        std::vector<double> scores) {
  if (ids.size() != scores.size())
    throw std::invalid_argument("report: ids/scores length mismatch");
  ScoreReport r;
  r.metric = metric;
  r.ids = std::move(ids);
  r.scores = std::move(scores);
  if (!r.scores.empty())
    r.aggregate = std::accumulate(r.scores.begin(), r.scores.end(), 0.0) /
                  static_cast<double>(r.scores.size());
  return r;
}

std::vector<std::pair<std::string, std::string>> read_id_text_jsonl(
    const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("bad JSON on line " + std::to_string(line_no) + ": " +
                           e.what(),
                       line_no);
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("text") ||
        !j["id"].is_string() || !j["text"].is_string())
      throw SchemaError("line " + std::to_string(line_no),
                        "expected {\"id\": string, \"text\": string}");
    out.emplace_back(j["id"].get<std::string>(), j["text"].get<std::string>());
  }
  return out;
}

nlohmann::ordered_json report_to_json(const ScoreReport& r) {
  nlohmann::ordered_json j;
  j["metric"] = r.metric;
  j["n"] = r.n();
  j["aggregate"] = r.aggregate;
  nlohmann::ordered_json per = nlohmann::ordered_json::array();
  for (size_t i = 0; i < r.scores.size(); ++i) {
    nlohmann::ordered_json item;
    item["id"] = r.ids[i];
    item["score"] = r.scores[i];
    per.push_back(std::move(item));
  }
  j["per_sample"] = std::move(per);
  return j;
}

std::string format_report_table(const std::vector<ScoreReport>& reports) {
  size_t name_w = 6;
  for (const auto& r : reports) name_w = std::max(name_w, r.metric.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(name_w) + 2) << "metric"
      << std::right << std::setw(10) << "n" << std::setw(14) << "mean" << '\n';
  for (const auto& r : reports) {
    out << std::left << std::setw(static_cast<int>(name_w) + 2) << r.metric
        << std::right << std::setw(10) << r.n() << std::setw(14) << std::fixed
        << std::setprecision(6) << r.aggregate << '\n';
  }
  return out.str();
}

}  // namespace rsvp
