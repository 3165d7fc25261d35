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
#include <cmath>

#include "qdecon/entropy.hpp"
#include "qdecon/states.hpp"

using namespace qdecon;

namespace {

// Scalar oracle for the entropy of an explicit probability vector.
double entropy_oracle(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 1e-12) h -= v * std::log2(v);
  return h;
}

LabeledState diagonal_state(const std::vector<double>& p,
                            const std::string& label) {
  const int d = static_cast<int>(p.size());
  ComplexMatrix m = zero_matrix(d, d);
  for (int i = 0; i < d; ++i) m(i, i) = p[static_cast<std::size_t>(i)];
  return validate_density(m, Factorization({label}, {d}));
}

}  // namespace

TEST_CASE("von_neumann_entropy on hand-built spectra") {
  SECTION("pure state has zero entropy") {
    const LabeledState s = diagonal_state({1.0, 0.0, 0.0}, "A");
    REQUIRE(std::abs(von_neumann_entropy(s)) < 1e-12);
  }
  SECTION("maximally mixed has log2 d") {
    REQUIRE(von_neumann_entropy(maximally_mixed(8, "A")) ==
            Catch::Approx(3.0).margin(1e-12));
  }
  SECTION("skewed spectrum matches the scalar oracle") {
    const std::vector<double> p = {0.5, 0.25, 0.125, 0.125};
    const LabeledState s = diagonal_state(p, "A");
    REQUIRE(von_neumann_entropy(s) ==
            Catch::Approx(entropy_oracle(p)).margin(1e-12));
    // 0.5*1 + 0.25*2 + 2*0.125*3 = 1.75 by hand.
    REQUIRE(von_neumann_entropy(s) == Catch::Approx(1.75).margin(1e-12));
  }
  SECTION("entropy is basis independent") {
    Rng rng(50);
    const std::vector<double> p = {0.6, 0.3, 0.1, 0.0};
    const LabeledState s = diagonal_state(p, "A");
    const ComplexMatrix u = haar_unitary(4, rng);
    const LabeledState rotated = validate_density(
        ComplexMatrix(u * s.matrix * u.adjoint()), s.factorization);
    REQUIRE(von_neumann_entropy(rotated) ==
            Catch::Approx(entropy_oracle(p)).margin(1e-10));
  }
  SECTION("subset entropy reduces first") {
    const LabeledState phi = maximally_entangled(2, "A", "B");
    REQUIRE(std::abs(von_neumann_entropy(phi)) < 1e-12);
    REQUIRE(von_neumann_entropy(phi, {"A"}) ==
            Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("qmi benchmarks") {
  const LabeledState phi = maximally_entangled(2, "A", "B");
  // H(A) + H(B) - H(AB) = 1 + 1 - 0.
  REQUIRE(qmi(phi, {"A"}, {"B"}) == Catch::Approx(2.0).margin(1e-10));

  const LabeledState prod =
      tensor(maximally_mixed(2, "A"), maximally_mixed(2, "B"));
  REQUIRE(std::abs(qmi(prod, {"A"}, {"B"})) < 1e-10);

  REQUIRE_THROWS_AS(qmi(phi, {"A"}, {}), InputError);
  REQUIRE_THROWS_AS(qmi(phi, {"A"}, {"A"}), InputError);
}

TEST_CASE("cqmi benchmarks") {
  SECTION("GHZ3 gives exactly one bit") {
    const LabeledState g = ghz(3, 2);
    REQUIRE(cqmi(g, {"A"}, {"B"}, {"E"}) == Catch::Approx(1.0).margin(1e-10));
  }
  SECTION("maximally entangled pair with product environment gives two bits") {
    const LabeledState s =
        tensor(maximally_entangled(2, "A", "B"), maximally_mixed(2, "E"));
    REQUIRE(cqmi(s, {"A"}, {"B"}, {"E"}) == Catch::Approx(2.0).margin(1e-10));
  }
  SECTION("empty E reduces to qmi") {
    const LabeledState phi = maximally_entangled(2, "A", "B");
    REQUIRE(cqmi(phi, {"A"}, {"B"}, {}) ==
            Catch::Approx(qmi(phi, {"A"}, {"B"})).margin(1e-12));
  }
  SECTION("roles overload agrees") {
    const LabeledState g = ghz(3, 2);
    Roles roles{{"A"}, {"B"}, {"E"}};
    REQUIRE(cqmi(g, roles) ==
            Catch::Approx(cqmi(g, {"A"}, {"B"}, {"E"})).margin(1e-14));
  }
}

TEST_CASE("strong subadditivity on random states") {
  Rng rng(60);
  for (int i = 0; i < 25; ++i) {
    const LabeledState s =
        random_mixed_state(Factorization({"A", "B", "E"}, {2, 2, 2}), 8, rng);
    REQUIRE(cqmi(s, {"A"}, {"B"}, {"E"}) >= -1e-9);
  }
}

TEST_CASE("chain rule residual vanishes") {
  Rng rng(61);
  for (int i = 0; i < 10; ++i) {
    const LabeledState s = random_pure_state(
        Factorization({"A1", "A2", "B", "E"}, {2, 2, 2, 2}), rng);
    REQUIRE(chain_rule_residual(s, {"A1", "A2"}, {"B"}, {"E"}) < 1e-9);
  }
  // Also on mixed states, where no purity argument applies.
  for (int i = 0; i < 5; ++i) {
    const LabeledState s = random_mixed_state(
        Factorization({"A1", "A2", "B", "E"}, {2, 2, 2, 2}), 6, rng);
    REQUIRE(chain_rule_residual(s, {"A1", "A2"}, {"B"}, {"E"}) < 1e-9);
  }
  const LabeledState g = ghz(3, 2);
  REQUIRE_THROWS_AS(chain_rule_residual(g, {}, {"B"}, {"E"}), InputError);
}

TEST_CASE("duality residual vanishes on pure four-party states") {
  Rng rng(62);
  for (int i = 0; i < 10; ++i) {
    const LabeledState s = random_pure_state(
        Factorization({"A", "B", "E", "R"}, {2, 2, 2, 2}), rng);
    REQUIRE(duality_residual(s, {"A"}, {"B"}, {"E"}, {"R"}) < 1e-9);
  }
  SECTION("mixed states are rejected") {
    Rng r2(63);
    const LabeledState s = random_mixed_state(
        Factorization({"A", "B", "E", "R"}, {2, 2, 2, 2}), 4, r2);
    REQUIRE_THROWS_AS(duality_residual(s, {"A"}, {"B"}, {"E"}, {"R"}),
                      InputError);
  }
  SECTION("roles must cover the state") {
    const LabeledState g = ghz(4, 2);
    REQUIRE_THROWS_AS(duality_residual(g, {"A"}, {"B"}, {"E"}, {}),
                      InputError);
  }
}

TEST_CASE("ancilla rate formula") {
  SECTION("computed from entropies independently") {
    Rng rng(64);
    const LabeledState s = random_pure_state(
        Factorization({"A", "B", "E", "R"}, {2, 2, 2, 2}), rng);
    const double via_formula =
        ancilla_rate_formula(s, {"A"}, {"B"}, {"E"}, {"R"});
    const double hae = von_neumann_entropy(s, {"A"}) +
                       von_neumann_entropy(s, {"E"}) -
                       von_neumann_entropy(s, {"A", "E"});
    const double har = von_neumann_entropy(s, {"A"}) +
                       von_neumann_entropy(s, {"R"}) -
                       von_neumann_entropy(s, {"A", "R"});
    const double want = std::max(0.5 * hae - 0.5 * har, 0.0);
    REQUIRE(via_formula == Catch::Approx(want).margin(1e-10));
  }
  SECTION("clamped at zero when R sees more of A than E does") {
    // Purification of a maximally entangled AB pair: A correlates with R
    // only, so the formula's difference is negative and clamps.
    const LabeledState s = tensor(
        tensor(maximally_entangled(2, "A", "R"), maximally_mixed(2, "B")),
        maximally_mixed(1, "E"));
    // This state is mixed (B and E padding are mixed); use its purification.
    const LabeledState psi = purify(s, "R2");
    const double rate = ancilla_rate_formula(
        psi, {"A"}, {"B"}, {"E"}, {"R", "R2"});
    REQUIRE(rate == Catch::Approx(0.0).margin(1e-10));
  }
}

TEST_CASE("analyze_entropies fills the report coherently") {
  SECTION("pure four-party state exposes duality and ancilla rate") {
    Rng rng(65);
    const LabeledState s = random_pure_state(
        Factorization({"A1", "A2", "B", "E", "R"}, {2, 2, 2, 2, 2}), rng);
    Roles roles{{"A1", "A2"}, {"B"}, {"E"}};
    const EntropyReport rep = analyze_entropies(s, roles);
    REQUIRE(rep.entropies.count("A") == 1);
    REQUIRE(rep.entropies.count("ABE") == 1);
    REQUIRE(rep.subset_log_dims.at("A") == Catch::Approx(2.0));
    REQUIRE(rep.qmi_ab ==
            Catch::Approx(qmi(s, {"A1", "A2"}, {"B"})).margin(1e-12));
    REQUIRE(rep.cqmi_ab_given_e ==
            Catch::Approx(cqmi(s, roles)).margin(1e-12));
    REQUIRE(rep.chain_available);
    REQUIRE(rep.chain_residual < 1e-9);
    REQUIRE(rep.duality_available);
    REQUIRE(rep.duality < 1e-9);
    REQUIRE(rep.ancilla_available);
  }
  SECTION("tripartite mixed state has no duality section") {
    Rng rng(66);
    const LabeledState s =
        random_mixed_state(Factorization({"A", "B", "E"}, {2, 2, 2}), 4, rng);
    const EntropyReport rep = analyze_entropies(s, Roles{{"A"}, {"B"}, {"E"}});
    REQUIRE_FALSE(rep.chain_available);
    REQUIRE_FALSE(rep.duality_available);
    REQUIRE_FALSE(rep.ancilla_available);
  }
}
