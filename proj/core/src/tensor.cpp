#include "rsvp/tensor.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rsvp/errors.hpp"

namespace rsvp {
namespace {

std::string shape_of(const Tensor2D& t) {
  std::ostringstream s;
  s << t.rows << 'x' << t.cols;
  return s.str();
}

void require_same_shape(const Tensor2D& a, const Tensor2D& b, const char* op) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_of(a) +
                     " vs " + shape_of(b));
}

}  // namespace

Tensor2D::Tensor2D(int r, int c, double fill) : rows(r), cols(c) {
  if (r < 0 || c < 0) throw ShapeError("negative tensor dimensions");
  data.assign(static_cast<size_t>(r) * static_cast<size_t>(c), fill);
}

double& Tensor2D::at(int r, int c) {
  if (r < 0 || r >= rows || c < 0 || c >= cols)
    throw std::out_of_range("tensor index out of range");
  return (*this)(r, c);
}

double Tensor2D::at(int r, int c) const {
  if (r < 0 || r >= rows || c < 0 || c >= cols)
    throw std::out_of_range("tensor index out of range");
  return (*this)(r, c);
}

bool Tensor2D::finite() const {
  for (double v : data)
    if (!std::isfinite(v)) return false;
  return true;
}

Tensor2D tensor_from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  Tensor2D t(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size())
      throw ShapeError("tensor_from_rows: ragged rows");
    for (size_t c = 0; c < rows[r].size(); ++c)
      t(static_cast<int>(r), static_cast<int>(c)) = rows[r][c];
  }
  return t;
}

Tensor2D matmul(const Tensor2D& a, const Tensor2D& b) {
  if (a.cols != b.rows)
    throw ShapeError("matmul: " + shape_of(a) + " * " + shape_of(b));
  Tensor2D out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    for (int k = 0; k < a.cols; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols; ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Tensor2D transpose(const Tensor2D& a) {
  Tensor2D out(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out(j, i) = a(i, j);
  return out;
}

Tensor2D add(const Tensor2D& a, const Tensor2D& b) {
  require_same_shape(a, b, "add");
  Tensor2D out = a;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

Tensor2D sub(const Tensor2D& a, const Tensor2D& b) {
  require_same_shape(a, b, "sub");
  Tensor2D out = a;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

Tensor2D scale(const Tensor2D& a, double s) {
  Tensor2D out = a;
  for (double& v : out.data) v *= s;
  return out;
}

Tensor2D hadamard(const Tensor2D& a, const Tensor2D& b) {
  require_same_shape(a, b, "hadamard");
  Tensor2D out = a;
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
  return out;
}

Tensor2D add_row_bias(const Tensor2D& a, const std::vector<double>& bias) {
  if (static_cast<int>(bias.size()) != a.cols)
    throw ShapeError("add_row_bias: bias length " +
                     std::to_string(bias.size()) + " vs cols " +
                     std::to_string(a.cols));
  Tensor2D out = a;
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out(i, j) += bias[j];
  return out;
}

std::vector<double> colsum(const Tensor2D& a) {
  std::vector<double> out(static_cast<size_t>(a.cols), 0.0);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) out[j] += a(i, j);
  return out;
}

Tensor2D vstack(const std::vector<Tensor2D>& blocks) {
  if (blocks.empty()) throw ShapeError("vstack: no blocks");
  int cols = blocks[0].cols;
  int rows = 0;
  for (const auto& b : blocks) {
    if (b.cols != cols)
      throw ShapeError("vstack: col mismatch " + std::to_string(b.cols) +
                       " vs " + std::to_string(cols));
    rows += b.rows;
  }
  Tensor2D out(rows, cols);
  int at_row = 0;
  for (const auto& b : blocks) {
    for (int i = 0; i < b.rows; ++i)
      for (int j = 0; j < cols; ++j) out(at_row + i, j) = b(i, j);
    at_row += b.rows;
  }
  return out;
}

double max_abs(const Tensor2D& a) {
  double m = 0.0;
  for (double v : a.data) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Tensor2D& a, const Tensor2D& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i)
    m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

bool approx_equal(const Tensor2D& a, const Tensor2D& b, double tol) {
  return a.same_shape(b) && max_abs_diff(a, b) <= tol;
}

nlohmann::ordered_json tensor_to_json(const Tensor2D& t) {
  nlohmann::ordered_json j;
  j["rows"] = t.rows;
  j["cols"] = t.cols;
  j["data"] = t.data;
  return j;
}

Tensor2D tensor_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("rows") || !j.contains("cols") ||
      !j.contains("data"))
    throw SchemaError("tensor", "expected {rows, cols, data}");
  if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer())
    throw SchemaError("tensor.rows/cols", "expected integers");
  Tensor2D t;
  t.rows = j["rows"].get<int>();
  t.cols = j["cols"].get<int>();
  if (t.rows < 0 || t.cols < 0)
    throw SchemaError("tensor.rows/cols", "negative dimension");
  if (!j["data"].is_array())
    throw SchemaError("tensor.data", "expected an array");
  t.data = j["data"].get<std::vector<double>>();
  if (t.data.size() != static_cast<size_t>(t.rows) * static_cast<size_t>(t.cols))
    throw SchemaError("tensor.data",
                      "length " + std::to_string(t.data.size()) +
                          " does not match rows*cols");
  if (!t.finite()) throw SchemaError("tensor.data", "non-finite value");
  return t;
}

void write_tensor_file(const std::string& path, const Tensor2D& t) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << tensor_to_json(t).dump(2) << '\n';
}

Tensor2D read_tensor_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("bad tensor JSON in ") + path + ": " + e.what(),
                     e.byte);
  }
  return tensor_from_json(j);
}

}  // namespace rsvp
