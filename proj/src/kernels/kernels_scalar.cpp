// Copyright 2026 The nasp Authors.
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

#include "nasp/kernels.hpp"

namespace nasp::kernels {
namespace {

void gemv_acc_ref(const double* a, std::size_t rows, std::size_t cols,
                  const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] += acc;
  }
}

void gemv_t_acc_ref(const double* a, std::size_t rows, std::size_t cols,
                    const double* y, double* x) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = a + r * cols;
    const double yr = y[r];
    for (std::size_t c = 0; c < cols; ++c) x[c] += row[c] * yr;
  }
}

void ger_ref(double alpha, const double* u, std::size_t rows, const double* v,
             std::size_t cols, double* a) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double s = alpha * u[r];
    double* row = a + r * cols;
    for (std::size_t c = 0; c < cols; ++c) row[c] += s * v[c];
  }
}

double dot_ref(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void axpy_ref(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

constexpr KernelTable kScalarTable{gemv_acc_ref, gemv_t_acc_ref, ger_ref,
                                   dot_ref, axpy_ref};

}  // namespace

const KernelTable& scalar_table() { return kScalarTable; }

}  // namespace nasp::kernels
