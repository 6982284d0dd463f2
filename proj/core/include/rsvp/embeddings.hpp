#pragma once

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace rsvp {

// What to do with tokens missing from the table. zero_vector keeps them (a
// zero embedding can never clear a similarity threshold); skip_token drops
// them before any set arithmetic.
enum class OovPolicy { zero_vector, skip_token };

struct EmbeddingTable {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
  OovPolicy oov = OovPolicy::zero_vector;

  bool contains(const std::string& token) const {
    return vectors.count(token) > 0;
  }
  // nullptr when out of vocabulary.
  const std::vector<double>* find(const std::string& token) const;
};

// Text format: one "token v1 v2 ... vD" per line, single-space separated.
// Ragged or non-numeric lines raise ParseError with the line number;
// duplicate tokens are last-wins (a note goes to `warnings` when given).
EmbeddingTable load_embeddings(std::istream& in,
                               std::vector<std::string>* warnings = nullptr);
EmbeddingTable load_embeddings_file(const std::string& path,
                                    std::vector<std::string>* warnings = nullptr);

// 0 when either vector is zero (or lengths differ by construction error).
double cosine(const std::vector<double>& a, const std::vector<double>& b);

double l2_norm(const std::vector<double>& v);

}  // namespace rsvp
