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

#pragma once

// Dense double-precision primitives behind the recurrent models.
//
// Every primitive has a portable scalar reference and, on x86-64, an
// AVX2/FMA variant. The variant is picked once at startup from CPUID and can
// be forced with NASP_KERNELS=scalar|avx2 or set_backend(). All matrices are
// row-major and contiguous.

#include <cstddef>
#include <span>
#include <string_view>

namespace nasp::kernels {

enum class Backend { kScalar, kAvx2 };

std::string_view backend_name(Backend backend);
bool backend_available(Backend backend);
Backend active_backend();
// Throws std::invalid_argument if the backend is not available on this CPU.
void set_backend(Backend backend);

// y += A x, A is rows x cols.
void gemv_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
              std::span<const double> x, std::span<double> y);
// x += A^T y, A is rows x cols.
void gemv_t_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
                std::span<const double> y, std::span<double> x);
// A += alpha * u v^T, A is u.size() x v.size().
void ger(double alpha, std::span<const double> u, std::span<const double> v,
         std::span<double> a);
double dot(std::span<const double> x, std::span<const double> y);
// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// Raw per-backend entry points. Lengths are trusted; the dispatching wrappers
// above do the size checks.
struct KernelTable {
  void (*gemv_acc)(const double* a, std::size_t rows, std::size_t cols,
                   const double* x, double* y);
  void (*gemv_t_acc)(const double* a, std::size_t rows, std::size_t cols,
                     const double* y, double* x);
  void (*ger)(double alpha, const double* u, std::size_t rows, const double* v,
              std::size_t cols, double* a);
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();
// nullptr when the build has no AVX2 variant.
const KernelTable* avx2_table();

}  // namespace nasp::kernels
