// Copyright 2026 The hgdiff Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hgdiff/tensor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace hgdiff {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.front().size();
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    if (rows[i].size() != c) throw std::invalid_argument("Matrix::from_rows: ragged rows");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
  }
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  Matrix m(values.size(), 1);
  std::copy(values.begin(), values.end(), m.data_.begin());
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

std::vector<double> Matrix::col(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_col(std::size_t c, std::span<const double> v) {
  assert(v.size() == rows_);
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = v[r];
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  double m = 0.0;
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) m = std::max(m, std::abs(av[i] - bv[i]));
  return m;
}

// The kernels below use i-k-j loop order so the innermost loop is a
// contiguous axpy. Accumulation order over k is fixed, which keeps results
// bit-reproducible and makes appended zero columns exact no-ops.

namespace {

// c = a (n x k) * b (k x m), all row-major. Every output entry is summed over
// p = 0..k-1 in order starting from zero, whichever path computes it, so a
// row's result does not depend on its position in a.
void gemm(const double* a, const double* b, double* c, std::size_t n, std::size_t k, std::size_t m) {
  constexpr std::size_t R = 4, C = 8;
  std::size_t i = 0;
  for (; i + R <= n; i += R) {
    std::size_t j = 0;
    for (; j + C <= m; j += C) {
      double acc[R][C] = {};
      for (std::size_t p = 0; p < k; ++p) {
        const double* bp = b + p * m + j;
        for (std::size_t r = 0; r < R; ++r) {
          const double av = a[(i + r) * k + p];
          for (std::size_t q = 0; q < C; ++q) acc[r][q] += av * bp[q];
        }
      }
      for (std::size_t r = 0; r < R; ++r)
        for (std::size_t q = 0; q < C; ++q) c[(i + r) * m + j + q] = acc[r][q];
    }
    for (; j < m; ++j) {
      for (std::size_t r = 0; r < R; ++r) {
        double s = 0.0;
        for (std::size_t p = 0; p < k; ++p) s += a[(i + r) * k + p] * b[p * m + j];
        c[(i + r) * m + j] = s;
      }
    }
  }
  for (; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * m + j];
      c[i * m + j] = s;
    }
  }
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
  Matrix c(a.rows(), b.cols());
  gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("matmul_tn: row count mismatch");
  return matmul(transpose(a), b);
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  return t;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) { return matmul(a, transpose(b)); }

Matrix hconcat(std::span<const Matrix* const> blocks) {
  if (blocks.empty()) return {};
  const std::size_t rows = blocks.front()->rows();
  std::size_t cols = 0;
  for (const Matrix* m : blocks) {
    if (m->rows() != rows) throw std::invalid_argument("hconcat: row count mismatch");
    cols += m->cols();
  }
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    double* dst = out.data() + r * cols;
    for (const Matrix* m : blocks) {
      const auto src = m->row(r);
      dst = std::copy(src.begin(), src.end(), dst);
    }
  }
  return out;
}

Matrix slice_cols(const Matrix& a, std::size_t begin, std::size_t width) {
  if (begin + width > a.cols()) throw std::invalid_argument("slice_cols: out of range");
  Matrix out(a.rows(), width);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    const auto src = a.row(r).subspan(begin, width);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

void add_into_cols(Matrix& out, const Matrix& a, std::size_t begin) {
  if (a.rows() != out.rows() || begin + a.cols() > out.cols())
    throw std::invalid_argument("add_into_cols: shape mismatch");
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r).subspan(begin, a.cols());
    const auto src = a.row(r);
    for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
  }
}

}  // namespace hgdiff
