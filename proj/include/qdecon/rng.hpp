// Copyright 2026 the qdecon authors
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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "qdecon/linalg.hpp"

namespace qdecon {

// Deterministic random source.  Avoids std::uniform_real_distribution and
// std::normal_distribution, whose outputs differ across standard library
// implementations; the raw mt19937_64 stream and the maps below are fully
// specified, so identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; pairs are cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Complex standard normal: independent N(0,1) real and imaginary parts.
  Complex complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Derive an independent per-item seed from a base seed; used by batch
// drivers so results do not depend on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Matrix with i.i.d. complex standard normal entries, filled row-major.
inline ComplexMatrix ginibre_matrix(int rows, int cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
  return g;
}

// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal
// phases absorbed into Q, which removes the QR gauge freedom.
inline ComplexMatrix haar_unitary(int d, Rng& rng) {
  if (d < 1) throw InputError("haar_unitary: dimension < 1");
  ComplexMatrix g = ginibre_matrix(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const double m = std::abs(r(i, i));
    const Complex phase = (m > 0.0) ? Complex(r(i, i) / m) : Complex(1.0, 0.0);
    q.col(i) *= phase;
  }
  return q;
}

}  // namespace qdecon
