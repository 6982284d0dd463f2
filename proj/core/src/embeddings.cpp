#include "rsvp/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rsvp/errors.hpp"

namespace rsvp {

const std::vector<double>* EmbeddingTable::find(const std::string& token) const {
  auto it = vectors.find(token);
  return it == vectors.end() ? nullptr : &it->second;
}

EmbeddingTable load_embeddings(std::istream& in,
                               std::vector<std::string>* warnings) {
  EmbeddingTable table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string token;
    fields >> token;
    if (token.empty())
      throw ParseError("embeddings: blank token on line " +
                           std::to_string(line_no),
                       line_no);
    std::vector<double> vec;
    std::string field;
    while (fields >> field) {
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != field.size())
        throw ParseError("embeddings: bad number '" + field + "' on line " +
                             std::to_string(line_no),
                         line_no);
      if (!std::isfinite(v))
        throw ParseError("embeddings: non-finite value on line " +
                             std::to_string(line_no),
                         line_no);
      vec.push_back(v);
    }
    if (vec.empty())
      throw ParseError("embeddings: no values on line " +
                           std::to_string(line_no),
                       line_no);
    if (table.dim == 0) {
      table.dim = static_cast<int>(vec.size());
    } else if (static_cast<int>(vec.size()) != table.dim) {
      throw ParseError("embeddings: expected " + std::to_string(table.dim) +
                           " values but got " + std::to_string(vec.size()) +
                           " on line " + std::to_string(line_no),
                       line_no);
    }
    if (table.contains(token) && warnings)
      warnings->push_back("duplicate token '" + token + "' on line " +
                          std::to_string(line_no) + "; keeping the later one");
    table.vectors[token] = std::move(vec);
  }
  return table;
}

EmbeddingTable load_embeddings_file(const std::string& path,
                                    std::vector<std::string>* warnings) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  return load_embeddings(f, warnings);
}

double l2_norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("cosine: length mismatch");
  double dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  double na = l2_norm(a), nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (na * nb);
}

}  // namespace rsvp
