#include "tdslab/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "tdslab/error.hpp"

namespace tdslab {

namespace {

// Below this many multiply-adds the OpenMP fork/join overhead dominates.
constexpr long kParallelFlopCutoff = 1 << 16;

void check_mul(int ak, int bk, const char* name) {
  if (ak != bk) {
    throw DimensionError(std::string(name) + ": inner dimensions " + std::to_string(ak) +
                         " vs " + std::to_string(bk));
  }
}

}  // namespace

void Matrix::fill(double v) { std::fill(data.begin(), data.end(), v); }

bool Matrix::all_finite() const {
  for (double v : data) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

void ensure_finite(const Matrix& m, const std::string& what) {
  if (!m.all_finite()) throw NumericError(what + " contains non-finite values");
}

void matmul_serial(const Matrix& a, const Matrix& b, Matrix& out) {
  check_mul(a.cols, b.rows, "matmul");
  out = Matrix(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row_ptr(i);
    double* orow = out.row_ptr(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
}

void matmul(const Matrix& a, const Matrix& b, Matrix& out) {
  check_mul(a.cols, b.rows, "matmul");
  long flops = static_cast<long>(a.rows) * a.cols * b.cols;
  if (flops < kParallelFlopCutoff) {
    matmul_serial(a, b, out);
    return;
  }
  out = Matrix(a.rows, b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row_ptr(i);
    double* orow = out.row_ptr(i);
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = b.row_ptr(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
}

void matmul_tn_serial(const Matrix& a, const Matrix& b, Matrix& out) {
  check_mul(a.rows, b.rows, "matmul_tn");
  out = Matrix(a.cols, b.cols);
  for (int i = 0; i < a.cols; ++i) {
    double* orow = out.row_ptr(i);
    for (int k = 0; k < a.rows; ++k) {
      const double aki = a.at(k, i);
      if (aki == 0.0) continue;
      const double* brow = b.row_ptr(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
    }
  }
}

void matmul_tn(const Matrix& a, const Matrix& b, Matrix& out) {
  check_mul(a.rows, b.rows, "matmul_tn");
  long flops = static_cast<long>(a.cols) * a.rows * b.cols;
  if (flops < kParallelFlopCutoff) {
    matmul_tn_serial(a, b, out);
    return;
  }
  out = Matrix(a.cols, b.cols);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.cols; ++i) {
    double* orow = out.row_ptr(i);
    for (int k = 0; k < a.rows; ++k) {
      const double aki = a.at(k, i);
      if (aki == 0.0) continue;
      const double* brow = b.row_ptr(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += aki * brow[j];
    }
  }
}

void matmul_nt_serial(const Matrix& a, const Matrix& b, Matrix& out) {
  check_mul(a.cols, b.cols, "matmul_nt");
  out = Matrix(a.rows, b.rows);
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row_ptr(i);
    double* orow = out.row_ptr(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = b.row_ptr(j);
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      orow[j] = acc;
    }
  }
}

void matmul_nt(const Matrix& a, const Matrix& b, Matrix& out) {
  check_mul(a.cols, b.cols, "matmul_nt");
  long flops = static_cast<long>(a.rows) * a.cols * b.rows;
  if (flops < kParallelFlopCutoff) {
    matmul_nt_serial(a, b, out);
    return;
  }
  out = Matrix(a.rows, b.rows);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = a.row_ptr(i);
    double* orow = out.row_ptr(i);
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = b.row_ptr(j);
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += arow[k] * brow[k];
      orow[j] = acc;
    }
  }
}

void add_inplace(Matrix& out, const Matrix& a) {
  if (!out.same_shape(a)) throw DimensionError("add_inplace: shape mismatch");
  for (size_t i = 0; i < out.data.size(); ++i) out.data[i] += a.data[i];
}

Matrix sub(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw DimensionError("sub: shape mismatch");
  Matrix out(a.rows, a.cols);
  for (size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
  return out;
}

void scale_inplace(Matrix& m, double s) {
  for (double& v : m.data) v *= s;
}

double dot_rows(const Matrix& a, int ra, const Matrix& b, int rb) {
  if (a.cols != b.cols) throw DimensionError("dot_rows: width mismatch");
  const double* x = a.row_ptr(ra);
  const double* y = b.row_ptr(rb);
  double acc = 0.0;
  for (int k = 0; k < a.cols; ++k) acc += x[k] * y[k];
  return acc;
}

}  // namespace tdslab
