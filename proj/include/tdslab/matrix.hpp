#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tdslab {

// Dense row-major matrix of 64-bit floats. The whole lab runs in double
// precision; value semantics throughout.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

  static Matrix zeros(int r, int c) { return Matrix(r, c); }

  double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }

  double* row_ptr(int r) { return data.data() + static_cast<size_t>(r) * cols; }
  const double* row_ptr(int r) const { return data.data() + static_cast<size_t>(r) * cols; }

  size_t size() const { return data.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }

  void fill(double v);
  bool all_finite() const;
};

// Throws NumericError naming `what` if m contains NaN/Inf.
void ensure_finite(const Matrix& m, const std::string& what);

// ---- kernels -------------------------------------------------------------
// Each kernel has an OpenMP-parallel entry point and a serial reference twin.
// Parallelism partitions independent output elements, so both paths produce
// bit-identical results; tests assert exact equality.

// out = a * b
void matmul(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_serial(const Matrix& a, const Matrix& b, Matrix& out);

// out = a^T * b
void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_tn_serial(const Matrix& a, const Matrix& b, Matrix& out);

// out = a * b^T
void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out);
void matmul_nt_serial(const Matrix& a, const Matrix& b, Matrix& out);

// out += a (shapes must match)
void add_inplace(Matrix& out, const Matrix& a);
// out = a - b
Matrix sub(const Matrix& a, const Matrix& b);
// out = a * s
void scale_inplace(Matrix& m, double s);

double dot_rows(const Matrix& a, int ra, const Matrix& b, int rb);

}  // namespace tdslab
