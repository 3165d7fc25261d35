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

#include <map>
#include <string>
#include <vector>

#include "qdecon/states.hpp"

namespace qdecon {

// Role assignment on a labeled state: which labels play A, B and E.
// Used by the mutual-information helpers, the recovery optimizer and the
// protocol evaluator.  The three sets must be disjoint.
struct Roles {
  std::vector<std::string> a;
  std::vector<std::string> b;
  std::vector<std::string> e;
};

namespace detail {

inline void check_disjoint(const std::vector<std::vector<std::string>>& parts) {
  for (std::size_t i = 0; i < parts.size(); ++i)
    for (std::size_t j = i + 1; j < parts.size(); ++j)
      for (const auto& l : parts[i])
        for (const auto& m : parts[j])
          if (l == m)
            throw InputError("subsystem label '" + l +
                             "' appears in two role sets");
}

inline std::vector<std::string> concat(
    const std::vector<std::vector<std::string>>& parts) {
  std::vector<std::string> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace detail

// Shannon entropy (base 2) of a spectrum; eigenvalues at or below the
// support cutoff contribute zero.
inline double entropy_of_spectrum(const RealVector& w) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double p = w(i);
    if (p > kSupportCutoff) h -= p * std::log2(p);
  }
  return h;
}

// Von Neumann entropy (bits) of the reduced state on `subset`; an empty
// subset means the whole state.
inline double von_neumann_entropy(const LabeledState& rho,
                                  const std::vector<std::string>& subset = {}) {
  const ComplexMatrix m =
      subset.empty() ? rho.matrix
                     : partial_trace(rho.matrix, rho.factorization, subset);
  HermEig eig = herm_eig(m);
  return entropy_of_spectrum(eig.values);
}

// I(A;B) = H(A) + H(B) - H(AB).
inline double qmi(const LabeledState& rho, const std::vector<std::string>& a,
                  const std::vector<std::string>& b) {
  if (a.empty() || b.empty()) throw InputError("qmi: empty role set");
  detail::check_disjoint({a, b});
  rho.factorization.positions_of(detail::concat({a, b}));
  return von_neumann_entropy(rho, a) + von_neumann_entropy(rho, b) -
         von_neumann_entropy(rho, detail::concat({a, b}));
}

// I(A;B|E) = H(AE) + H(BE) - H(E) - H(ABE).  An empty E reduces to qmi.
inline double cqmi(const LabeledState& rho, const std::vector<std::string>& a,
                   const std::vector<std::string>& b,
                   const std::vector<std::string>& e) {
  if (e.empty()) return qmi(rho, a, b);
  if (a.empty() || b.empty()) throw InputError("cqmi: empty role set");
  detail::check_disjoint({a, b, e});
  rho.factorization.positions_of(detail::concat({a, b, e}));
  return von_neumann_entropy(rho, detail::concat({a, e})) +
         von_neumann_entropy(rho, detail::concat({b, e})) -
         von_neumann_entropy(rho, e) -
         von_neumann_entropy(rho, detail::concat({a, b, e}));
}

inline double cqmi(const LabeledState& rho, const Roles& roles) {
  return cqmi(rho, roles.a, roles.b, roles.e);
}

// Residual of the telescoping decomposition
//   I(A1..Ak;B|E) = sum_i I(Ai;B|E A1..A(i-1)),
// which is zero up to floating-point error for every state.
inline double chain_rule_residual(const LabeledState& rho,
                                  const std::vector<std::string>& a_parts,
                                  const std::vector<std::string>& b,
                                  const std::vector<std::string>& e) {
  if (a_parts.empty()) throw InputError("chain_rule_residual: no A parts");
  std::vector<std::string> all_a = a_parts;
  const double lhs = cqmi(rho, all_a, b, e);
  double rhs = 0.0;
  std::vector<std::string> cond = e;
  for (const auto& ai : a_parts) {
    rhs += cqmi(rho, {ai}, b, cond);
    cond.push_back(ai);
  }
  return std::abs(lhs - rhs);
}

namespace detail {

inline void check_pure(const LabeledState& rho, const char* op) {
  if (!rho.is_pure())
    throw InputError(std::string(op) + ": state is not pure");
}

}  // namespace detail

// |I(A;B|E) - I(A;B|R)| for a pure state on A,B,E,R.  Both quantities are
// equal for every pure four-party state.
inline double duality_residual(const LabeledState& rho,
                               const std::vector<std::string>& a,
                               const std::vector<std::string>& b,
                               const std::vector<std::string>& e,
                               const std::vector<std::string>& r) {
  detail::check_disjoint({a, b, e, r});
  const auto all = detail::concat({a, b, e, r});
  if (all.size() != rho.factorization.size())
    throw InputError("duality_residual: roles must cover the whole state");
  rho.factorization.positions_of(all);
  detail::check_pure(rho, "duality_residual");
  return std::abs(cqmi(rho, a, b, e) - cqmi(rho, a, b, r));
}

// Ancilla rate max{ (1/2) I(A;E) - (1/2) I(A;R), 0 } for a pure state on
// A,B,E,R: the entanglement consumed per copy by an encoder that must move
// its output next to E rather than next to R.
inline double ancilla_rate_formula(const LabeledState& rho,
                                   const std::vector<std::string>& a,
                                   const std::vector<std::string>& b,
                                   const std::vector<std::string>& e,
                                   const std::vector<std::string>& r) {
  detail::check_disjoint({a, b, e, r});
  const auto all = detail::concat({a, b, e, r});
  if (all.size() != rho.factorization.size())
    throw InputError("ancilla_rate_formula: roles must cover the whole state");
  rho.factorization.positions_of(all);
  detail::check_pure(rho, "ancilla_rate_formula");
  const double rate = 0.5 * qmi(rho, a, e) - 0.5 * qmi(rho, a, r);
  return rate > 0.0 ? rate : 0.0;
}

// Entropy summary of a tripartite split, with the standard residual checks.
struct EntropyReport {
  // Keys are role names: "A", "B", "E", "AB", "AE", "BE", "ABE".
  std::map<std::string, double> entropies;
  std::map<std::string, double> subset_log_dims;
  double qmi_ab = 0.0;
  double cqmi_ab_given_e = 0.0;
  double chain_residual = 0.0;     // splitting A into its labels
  bool chain_available = false;    // false when A is a single label
  double duality = 0.0;            // vs the leftover labels R, pure states only
  bool duality_available = false;
  double ancilla_rate = 0.0;
  bool ancilla_available = false;
};

inline EntropyReport analyze_entropies(const LabeledState& rho,
                                       const Roles& roles) {
  detail::check_disjoint({roles.a, roles.b, roles.e});
  EntropyReport rep;
  const auto& a = roles.a;
  const auto& b = roles.b;
  const auto& e = roles.e;
  if (a.empty() || b.empty()) throw InputError("analyze_entropies: A and B required");

  const std::vector<std::pair<std::string, std::vector<std::string>>> subsets =
      {{"A", a},
       {"B", b},
       {"E", e},
       {"AB", detail::concat({a, b})},
       {"AE", detail::concat({a, e})},
       {"BE", detail::concat({b, e})},
       {"ABE", detail::concat({a, b, e})}};
  for (const auto& [name, ls] : subsets) {
    if (ls.empty()) continue;
    rep.entropies[name] = von_neumann_entropy(rho, ls);
    rep.subset_log_dims[name] =
        std::log2(static_cast<double>(rho.factorization.dim_of_labels(ls)));
  }

  rep.qmi_ab = qmi(rho, a, b);
  rep.cqmi_ab_given_e = cqmi(rho, a, b, e);

  if (a.size() > 1) {
    rep.chain_residual = chain_rule_residual(rho, a, b, e);
    rep.chain_available = true;
  }

  // If labels remain outside A,B,E and the global state is pure, they form
  // the purifying system R.
  std::vector<std::string> rest =
      rho.factorization.complement(detail::concat({a, b, e}));
  if (!rest.empty() && !e.empty() && rho.is_pure()) {
    rep.duality = duality_residual(rho, a, b, e, rest);
    rep.duality_available = true;
    rep.ancilla_rate = ancilla_rate_formula(rho, a, b, e, rest);
    rep.ancilla_available = true;
  }
  return rep;
}

}  // namespace qdecon
