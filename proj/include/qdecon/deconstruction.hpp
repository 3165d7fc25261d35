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
#include <optional>
#include <string>
#include <vector>

#include "qdecon/recovery.hpp"

namespace qdecon {

// Hard cap on the joint dimension (copies of the state plus ancilla) a
// protocol evaluation will materialize.
inline constexpr long kProtocolDimCap = 256;

// What a protocol must achieve, checked at tolerance epsilon:
//  - Deconstruction: the part kept by the first party is recoverable from
//    E alone, and the (B,E) marginal is undisturbed.
//  - Erasure: the designated output subsystem is maximally mixed and
//    decoupled, and the (B,E) marginal is undisturbed.
enum class ConditionMode { Deconstruction, Erasure };

// A randomized unitary protocol: n copies of the input state, an ancilla,
// and M unitaries applied with uniform probability to the non-B part.
// `acting_input`/`acting_output` give the labeled factorization of the
// space the unitaries act on; empty factorizations mean "synthesize the
// default layout (A copies, ancilla, E copies) at evaluation time".
struct DeconstructionProtocol {
  LabeledState ancilla;
  UnitaryEnsemble ensemble;
  Factorization acting_input;
  Factorization acting_output;
  std::vector<std::string> erase_labels;
  int copies = 1;

  int size() const { return ensemble.size(); }
  double rate_bits() const {
    return std::log2(static_cast<double>(ensemble.size())) / copies;
  }
};

struct ConverseDiagnostic {
  bool available = false;
  double lhs = 0.0;       // copies * I(A;B|E) of the single-copy input
  double rhs_core = 0.0;  // I(kept;B copies|E copies) of omega + log2 M
  double difference = 0.0;
  double epsilon = 0.0;   // the protocol error the bound is gated on
  std::string note;
};

struct ProtocolReport {
  LabeledState omega;          // the averaged output state
  Roles omega_roles;           // roles on omega: kept part / B copies / E copies
  ConditionMode mode = ConditionMode::Deconstruction;
  int copies = 1;
  int ensemble_size = 1;
  long ancilla_dim = 1;
  double rate_bits = 0.0;
  double cqmi_per_copy = 0.0;
  double disturbance_fidelity = 0.0;  // F(omega_BE, rho_BE^(n))
  double erasure_fidelity = 0.0;      // F(omega, pi_erase (x) omega_rest)
  bool erasure_available = false;
  FoREstimate recoverability;
  bool recoverability_available = false;
  double petz_candidate_fidelity = 0.0;
  double epsilon = 0.0;  // worst shortfall of the mode's two conditions
  ConverseDiagnostic converse;
};

namespace detail {

inline std::vector<std::string> copy_labels(const std::vector<std::string>& ls,
                                            int n) {
  if (n == 1) return ls;
  std::vector<std::string> out;
  for (const auto& l : ls)
    for (int c = 1; c <= n; ++c) out.push_back(l + std::to_string(c));
  return out;
}

inline LabeledState trivial_ancilla(const std::string& label = "Ap") {
  LabeledState out;
  out.matrix = identity_matrix(1);
  out.factorization = Factorization({label}, {1});
  return out;
}

inline void check_roles_cover(const LabeledState& rho, const Roles& roles,
                              const char* op) {
  if (roles.a.empty() || roles.b.empty() || roles.e.empty())
    throw InputError(std::string(op) + ": all three role sets are required");
  check_disjoint({roles.a, roles.b, roles.e});
  const auto all = concat({roles.a, roles.b, roles.e});
  if (all.size() != rho.factorization.size())
    throw InputError(std::string(op) + ": roles must cover the whole state");
  rho.factorization.positions_of(all);
}

}  // namespace detail

// Rate bound diagnostic: for a protocol with error epsilon near zero,
//   copies * I(A;B|E)_rho  <=  I(kept;B^n|E^n)_omega + log2 M  (+ slack),
// so the reported difference should be >= -1e-6 whenever epsilon <= 1e-9.
// Requires square M (the residual-correlation bookkeeping splits the
// log2 M term in two equal halves); non-square M reports unavailable.
inline ConverseDiagnostic converse_diagnostic(const LabeledState& single_copy,
                                              const Roles& roles,
                                              const LabeledState& omega,
                                              const Roles& omega_roles,
                                              int copies, int ensemble_size) {
  ConverseDiagnostic d;
  const long m = std::lround(std::sqrt(static_cast<double>(ensemble_size)));
  if (m * m != ensemble_size) {
    d.available = false;
    d.note = "ensemble size is not a perfect square";
    return d;
  }
  d.available = true;
  d.lhs = copies * cqmi(single_copy, roles);
  d.rhs_core = cqmi(omega, omega_roles) +
               std::log2(static_cast<double>(ensemble_size));
  d.difference = d.rhs_core - d.lhs;
  return d;
}

// Runs a protocol on n copies of rho and reports every figure of merit.
// The FoR optimizer runs whenever the output dimension allows it; in
// Deconstruction mode an oversized output is an error, in Erasure mode the
// recoverability field is simply marked unavailable.
inline ProtocolReport evaluate_protocol(
    const LabeledState& rho, const Roles& roles,
    const DeconstructionProtocol& p, ConditionMode mode,
    const std::optional<std::vector<std::string>>& erase_override = {},
    const OptimizerConfig& cfg = {}) {
  detail::check_roles_cover(rho, roles, "evaluate_protocol");
  if (p.copies < 1) throw InputError("evaluate_protocol: copies < 1");

  const int n = p.copies;
  const LabeledState rho_n = n_copies(rho, n);
  const LabeledState full = tensor(rho_n, p.ancilla);
  if (full.dim() > kProtocolDimCap)
    throw CapacityError("evaluate_protocol: joint dimension " +
                        std::to_string(full.dim()) + " exceeds cap " +
                        std::to_string(kProtocolDimCap));

  const std::vector<std::string> a_n = detail::copy_labels(roles.a, n);
  const std::vector<std::string> b_n = detail::copy_labels(roles.b, n);
  const std::vector<std::string> e_n = detail::copy_labels(roles.e, n);

  Factorization acting_in = p.acting_input;
  if (acting_in.labels.empty()) {
    std::vector<std::string> ls = a_n;
    ls.insert(ls.end(), p.ancilla.labels().begin(), p.ancilla.labels().end());
    ls.insert(ls.end(), e_n.begin(), e_n.end());
    acting_in = full.factorization.selected(ls);
  } else {
    // Must address existing labels with matching dimensions and leave B out.
    const std::vector<int> pos =
        full.factorization.positions_of(acting_in.labels);
    for (std::size_t i = 0; i < acting_in.size(); ++i)
      if (full.factorization.dims[static_cast<std::size_t>(pos[i])] !=
          acting_in.dims[i])
        throw InputError("evaluate_protocol: acting dimension mismatch on '" +
                         acting_in.labels[i] + "'");
  }
  for (const auto& l : b_n)
    if (acting_in.has_label(l))
      throw InputError("evaluate_protocol: protocol acts on B label '" + l +
                       "'");
  for (const auto& l : e_n)
    if (!acting_in.has_label(l))
      throw InputError("evaluate_protocol: protocol must cover E label '" + l +
                       "'");
  if (p.ensemble.dim() != acting_in.total_dim())
    throw InputError("evaluate_protocol: ensemble dimension mismatch");

  Factorization acting_out =
      p.acting_output.labels.empty() ? acting_in : p.acting_output;
  acting_out.check();
  if (acting_out.total_dim() != acting_in.total_dim())
    throw InputError("evaluate_protocol: output factorization dimension "
                     "mismatch");
  for (const auto& l : e_n)
    if (!acting_out.has_label(l) ||
        acting_out.dim_of(l) != acting_in.dim_of(l))
      throw InputError("evaluate_protocol: output must preserve E label '" +
                       l + "'");
  for (const auto& l : b_n)
    if (acting_out.has_label(l))
      throw InputError("evaluate_protocol: output label collides with B '" +
                       l + "'");

  const QuantumChannel ch =
      randomizing_channel(p.ensemble, acting_in, acting_out);
  const LabeledState omega = apply_channel(ch, full, acting_in.labels);

  // Everything the first party ends up holding, minus the E copies.
  std::vector<std::string> kept;
  for (const auto& l : acting_out.labels)
    if (std::find(e_n.begin(), e_n.end(), l) == e_n.end()) kept.push_back(l);
  if (kept.empty())
    throw InputError("evaluate_protocol: protocol output keeps nothing");

  ProtocolReport rep;
  rep.omega = omega;
  rep.omega_roles = Roles{kept, b_n, e_n};
  rep.mode = mode;
  rep.copies = n;
  rep.ensemble_size = p.size();
  rep.ancilla_dim = p.ancilla.dim();
  rep.rate_bits = p.rate_bits();
  rep.cqmi_per_copy = cqmi(rho, roles);

  std::vector<std::string> be = b_n;
  be.insert(be.end(), e_n.begin(), e_n.end());
  rep.disturbance_fidelity =
      uhlmann_fidelity(rho_n.reduce(be), omega.reduce(be));

  std::vector<std::string> erase =
      erase_override.has_value() ? *erase_override : p.erase_labels;
  if (!erase.empty()) {
    for (const auto& l : erase)
      if (std::find(kept.begin(), kept.end(), l) == kept.end())
        throw InputError("evaluate_protocol: erase label '" + l +
                         "' is not part of the kept output");
    const Factorization f_er = omega.factorization.restricted(erase);
    LabeledState pi = maximally_mixed(f_er.dims[0], f_er.labels[0]);
    for (std::size_t i = 1; i < f_er.size(); ++i)
      pi = tensor(pi, maximally_mixed(f_er.dims[i], f_er.labels[i]));
    const std::vector<std::string> rest = omega.factorization.complement(erase);
    const LabeledState target = tensor(pi, omega.reduce(rest));
    rep.erasure_fidelity = uhlmann_fidelity(omega, target);
    rep.erasure_available = true;
  } else if (mode == ConditionMode::Erasure) {
    throw InputError("evaluate_protocol: erasure mode needs erase labels");
  }

  if (omega.dim() <= kRecoveryDimCap) {
    rep.recoverability = fidelity_of_recovery(omega, rep.omega_roles, cfg);
    rep.recoverability_available = true;
    rep.petz_candidate_fidelity = rep.recoverability.petz_value;
  } else if (mode == ConditionMode::Deconstruction) {
    throw CapacityError(
        "evaluate_protocol: output dimension " + std::to_string(omega.dim()) +
        " exceeds the recovery optimizer cap " +
        std::to_string(kRecoveryDimCap));
  }

  if (mode == ConditionMode::Deconstruction) {
    rep.epsilon = std::max(1.0 - rep.recoverability.value,
                           1.0 - rep.disturbance_fidelity);
  } else {
    rep.epsilon = std::max(1.0 - rep.erasure_fidelity,
                           1.0 - rep.disturbance_fidelity);
  }

  rep.converse = converse_diagnostic(rho, roles, omega, rep.omega_roles, n,
                                     rep.ensemble_size);
  rep.converse.epsilon = rep.epsilon;
  return rep;
}

// Displacement twirl of all A copies (and a trivial ancilla): the canonical
// protocol that erases A at rate 2*log2 dim(A) per copy.
inline DeconstructionProtocol full_twirl_protocol(const LabeledState& rho,
                                                  const Roles& roles, int n) {
  detail::check_roles_cover(rho, roles, "full_twirl_protocol");
  if (n < 1) throw InputError("full_twirl_protocol: copies < 1");
  double logdim = n * std::log2(static_cast<double>(rho.dim()));
  if (logdim > std::log2(static_cast<double>(kProtocolDimCap)) + 1e-9)
    throw CapacityError("full_twirl_protocol: joint dimension exceeds cap " +
                        std::to_string(kProtocolDimCap));

  const long da = rho.factorization.dim_of_labels(roles.a);
  const long de = rho.factorization.dim_of_labels(roles.e);
  long da_n = 1, de_n = 1;
  for (int c = 0; c < n; ++c) {
    da_n *= da;
    de_n *= de;
  }

  DeconstructionProtocol p;
  p.copies = n;
  p.ancilla = detail::trivial_ancilla();
  const UnitaryEnsemble hw = heisenberg_weyl_ensemble(static_cast<int>(da_n));
  std::vector<ComplexMatrix> us;
  us.reserve(hw.unitaries.size());
  const ComplexMatrix ide = identity_matrix(static_cast<int>(de_n));
  for (const auto& u : hw.unitaries) us.push_back(tensor_product(u, ide));
  p.ensemble = UnitaryEnsemble(std::move(us));
  p.erase_labels = detail::copy_labels(roles.a, n);
  p.erase_labels.push_back(p.ancilla.labels()[0]);
  return p;
}

// The do-nothing protocol: rate zero.  Meets the deconstruction conditions
// exactly when A is already recoverable from E, which is what the
// direct-sum (Markov) states are built to satisfy.
inline DeconstructionProtocol markov_protocol(const LabeledState& rho,
                                              const Roles& roles, int n = 1) {
  detail::check_roles_cover(rho, roles, "markov_protocol");
  if (n < 1) throw InputError("markov_protocol: copies < 1");
  double logdim = n * std::log2(static_cast<double>(rho.dim()));
  if (logdim > std::log2(static_cast<double>(kProtocolDimCap)) + 1e-9)
    throw CapacityError("markov_protocol: joint dimension exceeds cap " +
                        std::to_string(kProtocolDimCap));

  const long da = rho.factorization.dim_of_labels(roles.a);
  const long de = rho.factorization.dim_of_labels(roles.e);
  long dim = 1;
  for (int c = 0; c < n; ++c) dim *= da * de;

  DeconstructionProtocol p;
  p.copies = n;
  p.ancilla = detail::trivial_ancilla();
  p.ensemble =
      UnitaryEnsemble({identity_matrix(static_cast<int>(dim))});
  p.erase_labels = detail::copy_labels(roles.a, n);
  p.erase_labels.push_back(p.ancilla.labels()[0]);
  return p;
}

// Protocol built from an explicit encoding unitary V followed by a
// displacement twirl of the part designated for erasure.  V maps the input
// layout (A copies, ancilla, E copies) to `v_out`, which must carry the E
// copies unchanged; `erase` names the output subsystems to be twirled away.
// The ensemble is {W_i V} with W_i the displacement operators on the erase
// block, so M = dim(erase)^2.
inline DeconstructionProtocol encoder_protocol(
    const LabeledState& rho, const Roles& roles, int n, const ComplexMatrix& v,
    const Factorization& v_out, const LabeledState& theta,
    const std::vector<std::string>& erase) {
  detail::check_roles_cover(rho, roles, "encoder_protocol");
  if (n < 1) throw InputError("encoder_protocol: copies < 1");
  v_out.check();

  const LabeledState rho_n = n_copies(rho, n);
  const LabeledState full = tensor(rho_n, theta);
  if (full.dim() > kProtocolDimCap)
    throw CapacityError("encoder_protocol: joint dimension " +
                        std::to_string(full.dim()) + " exceeds cap " +
                        std::to_string(kProtocolDimCap));

  const std::vector<std::string> a_n = detail::copy_labels(roles.a, n);
  const std::vector<std::string> e_n = detail::copy_labels(roles.e, n);
  std::vector<std::string> in_labels = a_n;
  in_labels.insert(in_labels.end(), theta.labels().begin(),
                   theta.labels().end());
  in_labels.insert(in_labels.end(), e_n.begin(), e_n.end());
  const Factorization acting_in = full.factorization.selected(in_labels);

  const long d = acting_in.total_dim();
  if (v.rows() != d || v.cols() != d)
    throw InputError("encoder_protocol: encoder dimension mismatch");
  const double ures = max_abs(
      ComplexMatrix(v.adjoint() * v - identity_matrix(static_cast<int>(d))));
  if (ures > kHermitianTol)
    throw InputError("encoder_protocol: encoder is not unitary (residual " +
                     std::to_string(ures) + ")");
  if (v_out.total_dim() != d)
    throw InputError("encoder_protocol: output factorization dimension "
                     "mismatch");
  for (const auto& l : e_n)
    if (!v_out.has_label(l) || v_out.dim_of(l) != acting_in.dim_of(l))
      throw InputError("encoder_protocol: output must carry E label '" + l +
                       "' unchanged");
  if (erase.empty()) throw InputError("encoder_protocol: empty erase set");
  for (const auto& l : erase)
    if (std::find(e_n.begin(), e_n.end(), l) != e_n.end())
      throw InputError("encoder_protocol: cannot erase E label '" + l + "'");

  const Factorization f_erase = v_out.restricted(erase);
  const std::vector<std::string> rest_labels = v_out.complement(erase);
  Factorization split = f_erase;
  if (!rest_labels.empty()) {
    const Factorization f_rest = v_out.selected(rest_labels);
    split.labels.insert(split.labels.end(), f_rest.labels.begin(),
                        f_rest.labels.end());
    split.dims.insert(split.dims.end(), f_rest.dims.begin(),
                      f_rest.dims.end());
  }
  const long d_erase = f_erase.total_dim();
  const long d_rest = d / d_erase;

  const UnitaryEnsemble hw =
      heisenberg_weyl_ensemble(static_cast<int>(d_erase));
  std::vector<ComplexMatrix> us;
  us.reserve(hw.unitaries.size());
  const ComplexMatrix idr = identity_matrix(static_cast<int>(d_rest));
  for (const auto& w : hw.unitaries) {
    const ComplexMatrix w_embedded = permute_subsystems(
        tensor_product(w, idr), split, v_out.labels);
    us.push_back(ComplexMatrix(w_embedded * v));
  }

  DeconstructionProtocol p;
  p.copies = n;
  p.ancilla = theta;
  p.ensemble = UnitaryEnsemble(std::move(us));
  p.acting_input = acting_in;
  p.acting_output = v_out;
  p.erase_labels = erase;

  // Two-path consistency: averaging {W_i V} must equal applying V and then
  // twirling the erase block.  Anything else is a wiring bug.
  {
    QuantumChannel vch;
    vch.input = acting_in;
    vch.output = v_out;
    vch.kraus = {v};
    const LabeledState via_v = apply_channel(vch, full, acting_in.labels);
    const LabeledState twirled = twirl_subsystem(via_v, erase);
    const QuantumChannel ens_ch =
        randomizing_channel(p.ensemble, acting_in, v_out);
    const LabeledState direct = apply_channel(ens_ch, full, acting_in.labels);
    const LabeledState aligned =
        twirled.permuted(direct.factorization.labels);
    if (max_abs(ComplexMatrix(direct.matrix - aligned.matrix)) > 1e-10)
      throw Error("encoder_protocol: ensemble/twirl paths disagree");
  }
  return p;
}

}  // namespace qdecon
