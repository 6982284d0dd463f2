#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace rsvp {

// Dense row-major matrix of doubles. Row index first everywhere.
struct Tensor2D {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Tensor2D() = default;
  Tensor2D(int r, int c, double fill = 0.0);

  double& operator()(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  // Bounds-checked access for non-hot paths.
  double& at(int r, int c);
  double at(int r, int c) const;

  bool same_shape(const Tensor2D& o) const { return rows == o.rows && cols == o.cols; }
  bool finite() const;

  friend bool operator==(const Tensor2D&, const Tensor2D&) = default;
};

// Convenience literal constructor: rows of equal length.
Tensor2D tensor_from_rows(const std::vector<std::vector<double>>& rows);

// Shape-checked arithmetic. All throw ShapeError on mismatch.
Tensor2D matmul(const Tensor2D& a, const Tensor2D& b);
Tensor2D transpose(const Tensor2D& a);
Tensor2D add(const Tensor2D& a, const Tensor2D& b);
Tensor2D sub(const Tensor2D& a, const Tensor2D& b);
Tensor2D scale(const Tensor2D& a, double s);
Tensor2D hadamard(const Tensor2D& a, const Tensor2D& b);

// Adds `bias` (length = cols) to every row.
Tensor2D add_row_bias(const Tensor2D& a, const std::vector<double>& bias);
std::vector<double> colsum(const Tensor2D& a);

// Stacks blocks vertically; all blocks must share cols.
Tensor2D vstack(const std::vector<Tensor2D>& blocks);

double max_abs(const Tensor2D& a);
double max_abs_diff(const Tensor2D& a, const Tensor2D& b);
bool approx_equal(const Tensor2D& a, const Tensor2D& b, double tol);

// Fixture form: {"rows": R, "cols": C, "data": [...]}.
nlohmann::ordered_json tensor_to_json(const Tensor2D& t);
Tensor2D tensor_from_json(const nlohmann::json& j);
void write_tensor_file(const std::string& path, const Tensor2D& t);
Tensor2D read_tensor_file(const std::string& path);

}  // namespace rsvp
