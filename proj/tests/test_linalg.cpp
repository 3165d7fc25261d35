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

#include <catch2/catch_amalgamated.hpp>

#include "qdecon/linalg.hpp"
#include "qdecon/rng.hpp"

using namespace qdecon;

namespace {

// Independent four-loop Kronecker product, the oracle for tensor_product.
ComplexMatrix kron_oracle(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      for (long k = 0; k < b.rows(); ++k)
        for (long l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

// Independent partial trace by explicit mixed-radix index decoding.
// Keeps the subsystems in `keep` (positions into dims), in factorization
// order, tracing the rest.
ComplexMatrix ptrace_oracle(const ComplexMatrix& x, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  std::vector<bool> kept(n, false);
  for (int k : keep) kept[static_cast<std::size_t>(k)] = true;
  long dk = 1, dt = 1;
  for (int s = 0; s < n; ++s) (kept[s] ? dk : dt) *= dims[s];

  auto compose = [&](long ki, long ti) {
    // Rebuild a full row index from a kept-part index and a traced-part
    // index, both read off big-endian in factorization order.
    std::vector<int> digit(n, 0);
    for (int s = n - 1; s >= 0; --s) {
      if (kept[s]) {
        digit[s] = static_cast<int>(ki % dims[s]);
        ki /= dims[s];
      } else {
        digit[s] = static_cast<int>(ti % dims[s]);
        ti /= dims[s];
      }
    }
    long idx = 0;
    for (int s = 0; s < n; ++s) idx = idx * dims[s] + digit[s];
    return idx;
  };

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (long i = 0; i < dk; ++i)
    for (long j = 0; j < dk; ++j)
      for (long t = 0; t < dt; ++t)
        out(i, j) += x(compose(i, t), compose(j, t));
  return out;
}

ComplexMatrix random_matrix(int rows, int cols, Rng& rng) {
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.complex_normal();
  return m;
}

}  // namespace

TEST_CASE("tensor_product matches the four-loop oracle") {
  Rng rng(101);
  const ComplexMatrix a = random_matrix(3, 2, rng);
  const ComplexMatrix b = random_matrix(2, 4, rng);
  const ComplexMatrix got = tensor_product(a, b);
  const ComplexMatrix want = kron_oracle(a, b);
  REQUIRE(got.rows() == 6);
  REQUIRE(got.cols() == 8);
  REQUIRE(max_abs(ComplexMatrix(got - want)) < 1e-14);
}

TEST_CASE("tensor_product is associative up to exact arithmetic layout") {
  Rng rng(102);
  const ComplexMatrix a = random_matrix(2, 2, rng);
  const ComplexMatrix b = random_matrix(3, 3, rng);
  const ComplexMatrix c = random_matrix(2, 2, rng);
  const ComplexMatrix left = tensor_product(tensor_product(a, b), c);
  const ComplexMatrix right = tensor_product(a, tensor_product(b, c));
  REQUIRE(max_abs(ComplexMatrix(left - right)) < 1e-13);
}

TEST_CASE("partial_trace matches the index-summation oracle") {
  Rng rng(103);
  const Factorization f({"X", "Y", "Z"}, {2, 3, 2});
  ComplexMatrix m = random_matrix(12, 12, rng);
  m = ComplexMatrix(0.5 * (m + m.adjoint()));

  SECTION("keep one subsystem") {
    const ComplexMatrix got = partial_trace(m, f, {"Y"});
    const ComplexMatrix want = ptrace_oracle(m, {2, 3, 2}, {1});
    REQUIRE(max_abs(ComplexMatrix(got - want)) < 1e-13);
  }
  SECTION("keep two subsystems") {
    const ComplexMatrix got = partial_trace(m, f, {"X", "Z"});
    const ComplexMatrix want = ptrace_oracle(m, {2, 3, 2}, {0, 2});
    REQUIRE(max_abs(ComplexMatrix(got - want)) < 1e-13);
  }
  SECTION("keep order is factorization order, not request order") {
    const ComplexMatrix a = partial_trace(m, f, {"Z", "X"});
    const ComplexMatrix b = partial_trace(m, f, {"X", "Z"});
    REQUIRE(max_abs(ComplexMatrix(a - b)) < 1e-15);
  }
  SECTION("keeping everything is the identity") {
    const ComplexMatrix got = partial_trace(m, f, {"X", "Y", "Z"});
    REQUIRE(max_abs(ComplexMatrix(got - m)) < 1e-15);
  }
  SECTION("trace is preserved") {
    const ComplexMatrix got = partial_trace(m, f, {"X"});
    REQUIRE(std::abs(got.trace().real() - m.trace().real()) < 1e-12);
    REQUIRE(std::abs(got.trace().imag() - m.trace().imag()) < 1e-12);
  }
}

TEST_CASE("partial_trace of a product factors correctly") {
  Rng rng(104);
  ComplexMatrix a = random_matrix(2, 2, rng);
  ComplexMatrix b = random_matrix(3, 3, rng);
  const Complex trb = b.trace();
  const Factorization f({"L", "R"}, {2, 3});
  const ComplexMatrix got = partial_trace(tensor_product(a, b), f, {"L"});
  REQUIRE(max_abs(ComplexMatrix(got - trb * a)) < 1e-12);
}

TEST_CASE("permute_subsystems reorders tensor factors") {
  Rng rng(105);
  const ComplexMatrix a = random_matrix(2, 2, rng);
  const ComplexMatrix b = random_matrix(3, 3, rng);
  const ComplexMatrix c = random_matrix(2, 2, rng);
  const Factorization f({"A", "B", "C"}, {2, 3, 2});
  const ComplexMatrix abc = tensor_product(tensor_product(a, b), c);

  SECTION("swap outer factors") {
    const ComplexMatrix got = permute_subsystems(abc, f, {"C", "B", "A"});
    const ComplexMatrix want = tensor_product(tensor_product(c, b), a);
    REQUIRE(max_abs(ComplexMatrix(got - want)) < 1e-13);
  }
  SECTION("cycle") {
    const ComplexMatrix got = permute_subsystems(abc, f, {"B", "C", "A"});
    const ComplexMatrix want = tensor_product(tensor_product(b, c), a);
    REQUIRE(max_abs(ComplexMatrix(got - want)) < 1e-13);
  }
  SECTION("round trip is the identity") {
    const ComplexMatrix fwd = permute_subsystems(abc, f, {"C", "A", "B"});
    const Factorization g = f.selected({"C", "A", "B"});
    const ComplexMatrix back = permute_subsystems(fwd, g, {"A", "B", "C"});
    REQUIRE(max_abs(ComplexMatrix(back - abc)) < 1e-15);
  }
}

TEST_CASE("herm_eig reconstructs, orders descending, and rejects drift") {
  Rng rng(106);
  ComplexMatrix m = random_matrix(6, 6, rng);
  m = ComplexMatrix(0.5 * (m + m.adjoint()));

  const HermEig eig = herm_eig(m);
  REQUIRE(eig.values.size() == 6);
  for (int i = 0; i + 1 < 6; ++i) REQUIRE(eig.values(i) >= eig.values(i + 1));

  ComplexVector wc = eig.values.cast<Complex>();
  const ComplexMatrix rebuilt =
      eig.vectors * wc.asDiagonal() * eig.vectors.adjoint();
  REQUIRE(max_abs(ComplexMatrix(rebuilt - m)) < 1e-12);

  const ComplexMatrix vhv = eig.vectors.adjoint() * eig.vectors;
  REQUIRE(max_abs(ComplexMatrix(vhv - identity_matrix(6))) < 1e-12);

  ComplexMatrix bad = m;
  bad(0, 1) += Complex(0.0, 1e-6);
  REQUIRE_THROWS_AS(herm_eig(bad), InputError);
  REQUIRE_NOTHROW(herm_eig(bad, 1e-5));
}

TEST_CASE("matrix_func implements spectral calculus with the clip rules") {
  Rng rng(107);
  ComplexMatrix g = random_matrix(5, 3, rng);
  ComplexMatrix psd = g * g.adjoint();  // rank 3, PSD

  SECTION("sqrt squares back") {
    const ComplexMatrix s = matrix_sqrt(psd);
    REQUIRE(max_abs(ComplexMatrix(s * s - psd)) < 1e-10);
  }
  SECTION("inv_sqrt is the pseudo-inverse square root on the support") {
    const ComplexMatrix n = matrix_inv_sqrt(psd);
    const ComplexMatrix s = matrix_sqrt(psd);
    // n * psd * n is the projector onto the support (rank 3).
    const ComplexMatrix proj = n * psd * n;
    const HermEig pe = herm_eig(hermitian_part(proj));
    int rank_one = 0;
    for (Eigen::Index i = 0; i < pe.values.size(); ++i) {
      if (pe.values(i) > 0.5) {
        REQUIRE(std::abs(pe.values(i) - 1.0) < 1e-9);
        ++rank_one;
      } else {
        REQUIRE(std::abs(pe.values(i)) < 1e-9);
      }
    }
    REQUIRE(rank_one == 3);
    REQUIRE(max_abs(ComplexMatrix(s - s.adjoint())) < 1e-12);
  }
  SECTION("tiny negatives clip, larger negatives throw") {
    ComplexMatrix nearly = psd;
    nearly -= 0.5e-10 * identity_matrix(5);
    REQUIRE_NOTHROW(matrix_sqrt(nearly));
    ComplexMatrix bad = psd - 1e-6 * identity_matrix(5);
    REQUIRE_THROWS_AS(matrix_sqrt(bad), InputError);
  }
}

TEST_CASE("kernel_projector projects onto the orthogonal complement") {
  Rng rng(108);
  ComplexMatrix g = random_matrix(4, 2, rng);
  ComplexMatrix psd = g * g.adjoint();  // rank 2 in dimension 4
  const ComplexMatrix k = kernel_projector(psd);
  REQUIRE(max_abs(ComplexMatrix(k * psd)) < 1e-10);
  REQUIRE(max_abs(ComplexMatrix(k * k - k)) < 1e-10);
  REQUIRE(std::abs(k.trace().real() - 2.0) < 1e-9);
}

TEST_CASE("Factorization label arithmetic") {
  const Factorization f({"A", "B", "E"}, {2, 3, 4});
  REQUIRE(f.total_dim() == 24);
  REQUIRE(f.dim_of_labels({"A", "E"}) == 8);
  REQUIRE(f.index_of("B") == 1);

  const Factorization r = f.restricted({"E", "A"});
  REQUIRE(r.labels == std::vector<std::string>({"A", "E"}));
  REQUIRE(r.dims == std::vector<int>({2, 4}));

  const Factorization s = f.selected({"E", "A"});
  REQUIRE(s.labels == std::vector<std::string>({"E", "A"}));
  REQUIRE(s.dims == std::vector<int>({4, 2}));

  REQUIRE(f.complement({"B"}) == std::vector<std::string>({"A", "E"}));

  REQUIRE_THROWS_AS(f.index_of("Q"), InputError);
  REQUIRE_THROWS_AS(Factorization({"A", "A"}, {2, 2}).check(), InputError);
  REQUIRE_THROWS_AS(Factorization({"A"}, {0}).check(), InputError);
}

TEST_CASE("hermitian_part and max_abs basics") {
  Rng rng(109);
  const ComplexMatrix m = random_matrix(4, 4, rng);
  const ComplexMatrix h = hermitian_part(m);
  REQUIRE(max_abs(ComplexMatrix(h - h.adjoint())) < 1e-15);
  ComplexMatrix z = zero_matrix(3, 3);
  z(1, 2) = Complex(3.0, -4.0);
  REQUIRE(max_abs(z) == Catch::Approx(5.0));
}
