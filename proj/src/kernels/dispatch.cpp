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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "nasp/kernels.hpp"

namespace nasp::kernels {

#ifndef NASP_HAVE_AVX2
const KernelTable* avx2_table() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(NASP_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* table_for(Backend backend) {
  switch (backend) {
    case Backend::kScalar:
      return &scalar_table();
    case Backend::kAvx2:
      return cpu_has_avx2() ? avx2_table() : nullptr;
  }
  return nullptr;
}

Backend detect() {
  if (const char* env = std::getenv("NASP_KERNELS")) {
    const std::string choice(env);
    if (choice == "scalar") return Backend::kScalar;
    if (choice == "avx2" && cpu_has_avx2()) return Backend::kAvx2;
  }
  return cpu_has_avx2() ? Backend::kAvx2 : Backend::kScalar;
}

struct Active {
  std::atomic<Backend> backend{detect()};
  std::atomic<const KernelTable*> table{table_for(backend.load())};
};

Active& active() {
  static Active instance;
  return instance;
}

const KernelTable& current() { return *active().table.load(std::memory_order_relaxed); }

void check(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("kernels: size mismatch in ") + what);
}

}  // namespace

std::string_view backend_name(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

bool backend_available(Backend backend) { return table_for(backend) != nullptr; }

Backend active_backend() { return active().backend.load(); }

void set_backend(Backend backend) {
  const KernelTable* table = table_for(backend);
  if (table == nullptr) {
    throw std::invalid_argument("kernels: backend " + std::string(backend_name(backend)) +
                                " not available");
  }
  active().backend.store(backend);
  active().table.store(table);
}

void gemv_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
              std::span<const double> x, std::span<double> y) {
  check(a.size() == rows * cols && x.size() == cols && y.size() == rows, "gemv_acc");
  current().gemv_acc(a.data(), rows, cols, x.data(), y.data());
}

void gemv_t_acc(std::span<const double> a, std::size_t rows, std::size_t cols,
                std::span<const double> y, std::span<double> x) {
  check(a.size() == rows * cols && x.size() == cols && y.size() == rows, "gemv_t_acc");
  current().gemv_t_acc(a.data(), rows, cols, y.data(), x.data());
}

void ger(double alpha, std::span<const double> u, std::span<const double> v,
         std::span<double> a) {
  check(a.size() == u.size() * v.size(), "ger");
  current().ger(alpha, u.data(), u.size(), v.data(), v.size(), a.data());
}

double dot(std::span<const double> x, std::span<const double> y) {
  check(x.size() == y.size(), "dot");
  return current().dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  check(x.size() == y.size(), "axpy");
  current().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace nasp::kernels
