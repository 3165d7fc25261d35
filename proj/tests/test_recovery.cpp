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

#include "qdecon/entropy.hpp"
#include "qdecon/recovery.hpp"
#include "qdecon/states.hpp"

using namespace qdecon;

namespace {

MarkovBlock random_block(double weight, Rng& rng) {
  MarkovBlock b;
  b.weight = weight;
  b.dim_left = 1;
  b.dim_right = 1;
  b.left = random_mixed_state(Factorization({"x"}, {2}), 2, rng).matrix;
  b.right = random_mixed_state(Factorization({"y"}, {2}), 2, rng).matrix;
  return b;
}

// Re-applies a recovery channel by direct Kraus conjugation, bypassing
// apply_channel entirely; used to re-verify optimizer certificates.
ComplexMatrix kraus_conjugate_on_e(const QuantumChannel& ch,
                                   const ComplexMatrix& rho_be, long db) {
  const long de = ch.in_dim();
  const long dout = ch.out_dim();
  ComplexMatrix out = zero_matrix(static_cast<int>(db * dout),
                                  static_cast<int>(db * dout));
  for (const auto& k : ch.kraus) {
    const ComplexMatrix big = tensor_product(identity_matrix(static_cast<int>(db)), k);
    out += big * rho_be * big.adjoint();
  }
  (void)de;
  return out;
}

}  // namespace

TEST_CASE("uhlmann_fidelity ground truths") {
  Rng rng(80);
  const Factorization f({"S"}, {4});

  SECTION("a state with itself") {
    const LabeledState rho = random_mixed_state(f, 3, rng);
    REQUIRE(uhlmann_fidelity(rho.matrix, rho.matrix) ==
            Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("orthogonal pure states") {
    ComplexMatrix a = zero_matrix(2, 2);
    a(0, 0) = 1.0;
    ComplexMatrix b = zero_matrix(2, 2);
    b(1, 1) = 1.0;
    REQUIRE(uhlmann_fidelity(a, b) == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("pure states give the squared overlap") {
    Rng r2(81);
    const LabeledState psi = random_pure_state(f, r2);
    const LabeledState phi = random_pure_state(f, r2);
    const double overlap =
        (psi.matrix * phi.matrix).trace().real();  // |<psi|phi>|^2
    REQUIRE(uhlmann_fidelity(psi.matrix, phi.matrix) ==
            Catch::Approx(overlap).margin(1e-10));
  }
  SECTION("pure versus mixed is the expectation value") {
    Rng r3(82);
    const LabeledState psi = random_pure_state(f, r3);
    const LabeledState rho = random_mixed_state(f, 4, r3);
    const double expect = (psi.matrix * rho.matrix).trace().real();
    REQUIRE(uhlmann_fidelity(psi.matrix, rho.matrix) ==
            Catch::Approx(expect).margin(1e-10));
  }
  SECTION("symmetry in its arguments") {
    Rng r4(83);
    const LabeledState a = random_mixed_state(f, 2, r4);
    const LabeledState b = random_mixed_state(f, 4, r4);
    REQUIRE(uhlmann_fidelity(a.matrix, b.matrix) ==
            Catch::Approx(uhlmann_fidelity(b.matrix, a.matrix)).margin(1e-10));
  }
  SECTION("label-aware overload aligns subsystem order") {
    Rng r5(84);
    const LabeledState rho = random_mixed_state(
        Factorization({"A", "B"}, {2, 3}), 4, r5);
    const LabeledState swapped = rho.permuted({"B", "A"});
    REQUIRE(uhlmann_fidelity(rho, swapped) ==
            Catch::Approx(1.0).margin(1e-10));
  }
}

TEST_CASE("fidelity_gradient matches central finite differences") {
  Rng rng(85);
  for (int d : {2, 3}) {
    const Factorization f({"S"}, {d});
    for (int rep = 0; rep < 3; ++rep) {
      const LabeledState xi = random_mixed_state(f, d, rng);
      const LabeledState chi = random_mixed_state(f, d, rng);
      const ComplexMatrix g = fidelity_gradient(xi.matrix, chi.matrix);

      // Random Hermitian direction.
      ComplexMatrix delta(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) delta(i, j) = rng.complex_normal();
      delta = hermitian_part(delta);

      const double eps = 1e-6;
      const double fp = uhlmann_fidelity(
          xi.matrix, ComplexMatrix(chi.matrix + eps * delta));
      const double fm = uhlmann_fidelity(
          xi.matrix, ComplexMatrix(chi.matrix - eps * delta));
      const double fd = (fp - fm) / (2.0 * eps);
      const double an = (g * delta).trace().real();
      REQUIRE(an == Catch::Approx(fd).epsilon(1e-5).margin(1e-8));
    }
  }
}

TEST_CASE("fidelity_of_recovery on benchmark states") {
  SECTION("GHZ3 recovers with fidelity one half") {
    const LabeledState g = ghz(3, 2);
    const FoREstimate est =
        fidelity_of_recovery(g, Roles{{"A"}, {"B"}, {"E"}});
    REQUIRE(est.value == Catch::Approx(0.5).margin(1e-6));
    REQUIRE(est.converged);
    // The bound 2^{-I(A;B|E)} = 0.5 is attained, so the start is optimal.
    REQUIRE(est.petz_value == Catch::Approx(0.5).margin(1e-9));
  }
  SECTION("Markov states recover perfectly") {
    Rng rng(86);
    const LabeledState m =
        markov_state({random_block(0.35, rng), random_block(0.65, rng)});
    const FoREstimate est =
        fidelity_of_recovery(m, Roles{{"A"}, {"B"}, {"E"}});
    REQUIRE(est.value >= 1.0 - 1e-8);
    REQUIRE(est.converged);
    REQUIRE(est.petz_value >= 1.0 - 1e-8);
  }
  SECTION("optimizer never falls below its starting point") {
    Rng rng(87);
    const LabeledState s = random_mixed_state(
        Factorization({"A", "B", "E"}, {2, 2, 2}), 8, rng);
    const FoREstimate est =
        fidelity_of_recovery(s, Roles{{"A"}, {"B"}, {"E"}});
    REQUIRE(est.value >= est.petz_value - 1e-9);
    REQUIRE(est.objective_history.size() >= 1);
    REQUIRE(est.objective_history.front() ==
            Catch::Approx(est.petz_value).margin(1e-12));
  }
  SECTION("iteration starvation reports non-convergence") {
    OptimizerConfig cfg;
    cfg.max_iter = 1;
    const FoREstimate est =
        fidelity_of_recovery(ghz(3, 2), Roles{{"A"}, {"B"}, {"E"}}, cfg);
    REQUIRE_FALSE(est.converged);
    REQUIRE(est.iterations == 1);
    // The certificate is still sound.
    REQUIRE(est.value >= 0.4999);
  }
  SECTION("roles must cover the state and stay inside the cap") {
    const LabeledState g = ghz(4, 2);
    REQUIRE_THROWS_AS(
        fidelity_of_recovery(g, Roles{{"A"}, {"B"}, {"E"}}), InputError);
    Rng rng(88);
    const LabeledState big = random_mixed_state(
        Factorization({"A", "B", "E"}, {4, 4, 8}), 4, rng);
    REQUIRE_THROWS_AS(
        fidelity_of_recovery(big, Roles{{"A"}, {"B"}, {"E"}}),
        CapacityError);
  }
}

TEST_CASE("certificates re-verify through direct Kraus application") {
  Rng rng(89);
  const LabeledState s = random_mixed_state(
      Factorization({"A", "B", "E"}, {2, 2, 2}), 6, rng);
  const Roles roles{{"A"}, {"B"}, {"E"}};
  const FoREstimate est = fidelity_of_recovery(s, roles);

  const LabeledState rho_be = s.reduce({"B", "E"});
  const ComplexMatrix recovered =
      kraus_conjugate_on_e(est.channel, rho_be.matrix, 2);
  // Output order of the direct conjugation is (B, A, E); align the state.
  const LabeledState target = s.permuted({"B", "A", "E"});
  const double f = uhlmann_fidelity(target.matrix, recovered);
  REQUIRE(f == Catch::Approx(est.value).margin(1e-10));
}

TEST_CASE("fawzi_renner_residual") {
  SECTION("is nonnegative up to optimizer slack on random states") {
    Rng rng(90);
    for (int i = 0; i < 5; ++i) {
      const LabeledState s = random_mixed_state(
          Factorization({"A", "B", "E"}, {2, 2, 2}), 8, rng);
      REQUIRE(fawzi_renner_residual(s, Roles{{"A"}, {"B"}, {"E"}}) >= -1e-4);
    }
  }
  SECTION("GHZ3 sits exactly on the bound") {
    FoREstimate est;
    const double r =
        fawzi_renner_residual(ghz(3, 2), Roles{{"A"}, {"B"}, {"E"}}, {}, &est);
    // I = 1 and F = 0.5, so I + log2 F = 0.
    REQUIRE(r == Catch::Approx(0.0).margin(1e-5));
    REQUIRE(est.value == Catch::Approx(0.5).margin(1e-6));
  }
}

TEST_CASE("self-duality of the recovery fidelity on pure states") {
  Rng rng(91);
  const LabeledState psi = random_pure_state(
      Factorization({"A", "B", "E", "R"}, {2, 2, 2, 2}), rng);
  double fe = 0.0, fr = 0.0;
  const double resid = for_self_duality_residual(
      psi, Roles{{"A"}, {"B"}, {"E"}}, {"R"}, {}, &fe, &fr);
  REQUIRE(resid <= 1e-3);
  REQUIRE(fe == Catch::Approx(fr).margin(1e-3));

  SECTION("mixed states are rejected") {
    Rng r2(92);
    const LabeledState mixed = random_mixed_state(
        Factorization({"A", "B", "E", "R"}, {2, 2, 2, 2}), 3, r2);
    REQUIRE_THROWS_AS(
        for_self_duality_residual(mixed, Roles{{"A"}, {"B"}, {"E"}}, {"R"}),
        InputError);
  }
}

TEST_CASE("multiplicativity across a tensor product") {
  Rng rng(93);
  // One factor with a trivial environment keeps the joint problem small
  // enough for a unit test; the full-size instances run in the acceptance
  // suite.
  const LabeledState rho = random_mixed_state(
      Factorization({"A", "B", "E"}, {2, 2, 2}), 4, rng);
  const LabeledState sigma = random_mixed_state(
      Factorization({"A", "B", "E"}, {1, 2, 1}), 2, rng);
  double fj = 0.0, f1 = 0.0, f2 = 0.0;
  const double resid =
      for_multiplicativity_residual(rho, Roles{{"A"}, {"B"}, {"E"}}, sigma,
                                    Roles{{"A"}, {"B"}, {"E"}}, {}, &fj, &f1,
                                    &f2);
  REQUIRE(resid <= 1e-3);
  REQUIRE(fj == Catch::Approx(f1 * f2).margin(1e-3));
  // The trivial factor recovers perfectly on its own.
  REQUIRE(f2 == Catch::Approx(1.0).margin(1e-8));
}
