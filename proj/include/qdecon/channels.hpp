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
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "qdecon/states.hpp"

namespace qdecon {

// A finite collection of equal-dimension unitaries, used with uniform weight
// 1/M.  The constructor enforces unitarity of every element.
struct UnitaryEnsemble {
  std::vector<ComplexMatrix> unitaries;

  UnitaryEnsemble() = default;
  explicit UnitaryEnsemble(std::vector<ComplexMatrix> us)
      : unitaries(std::move(us)) {
    check();
  }

  int size() const { return static_cast<int>(unitaries.size()); }
  long dim() const { return unitaries.empty() ? 0 : unitaries[0].rows(); }

  void check() const {
    if (unitaries.empty()) throw InputError("ensemble: no unitaries");
    const long d = unitaries[0].rows();
    for (const auto& u : unitaries) {
      if (u.rows() != d || u.cols() != d)
        throw InputError("ensemble: dimension mismatch between elements");
      const double res =
          max_abs(ComplexMatrix(u.adjoint() * u - identity_matrix(static_cast<int>(d))));
      if (res > kHermitianTol)
        throw InputError("ensemble: element is not unitary (residual " +
                         std::to_string(res) + ")");
    }
  }
};

// A completely positive trace-preserving map in Kraus form, with labeled
// input and output factorizations.  Kraus operators are out_dim x in_dim.
struct QuantumChannel {
  Factorization input;
  Factorization output;
  std::vector<ComplexMatrix> kraus;

  long in_dim() const { return input.total_dim(); }
  long out_dim() const { return output.total_dim(); }

  bool is_endomorphic() const { return input == output; }

  // max |sum_k K^dag K - I|: zero for an exactly trace-preserving map.
  double tp_residual() const {
    const long din = in_dim();
    ComplexMatrix acc = zero_matrix(static_cast<int>(din), static_cast<int>(din));
    for (const auto& k : kraus) acc += k.adjoint() * k;
    return max_abs(ComplexMatrix(acc - identity_matrix(static_cast<int>(din))));
  }

  void check_valid(double tol = kChannelTol) const {
    input.check();
    output.check();
    if (kraus.empty()) throw InputError("channel: no Kraus operators");
    for (const auto& k : kraus)
      if (k.rows() != out_dim() || k.cols() != in_dim())
        throw InputError("channel: Kraus operator shape mismatch");
    const double res = tp_residual();
    if (res > tol)
      throw InputError("channel: not trace preserving (residual " +
                       std::to_string(res) + ")");
  }

  // Choi operator J = sum_k vec(K_k) vec(K_k)^dag with the output index
  // outermost; trace-preservation is equivalent to Tr_out J = I_in.
  ComplexMatrix choi() const {
    const long din = in_dim();
    const long dout = out_dim();
    const long dj = dout * din;
    ComplexMatrix j = zero_matrix(static_cast<int>(dj), static_cast<int>(dj));
    for (const auto& k : kraus) {
      ComplexVector v(dj);
      for (long o = 0; o < dout; ++o)
        for (long f = 0; f < din; ++f) v(o * din + f) = k(o, f);
      j += v * v.adjoint();
    }
    return j;
  }
};

// Rebuilds a Kraus decomposition from a Choi operator (output index
// outermost).  Tiny negative eigenvalues are dropped.
inline QuantumChannel channel_from_choi(const ComplexMatrix& j,
                                        const Factorization& input,
                                        const Factorization& output) {
  input.check();
  output.check();
  const long din = input.total_dim();
  const long dout = output.total_dim();
  if (j.rows() != din * dout)
    throw InputError("channel_from_choi: Choi dimension mismatch");
  HermEig eig = herm_eig(hermitian_part(j), 1e-8);
  QuantumChannel ch;
  ch.input = input;
  ch.output = output;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double v = eig.values(i);
    if (v <= 1e-15) continue;
    const double amp = std::sqrt(v);
    ComplexMatrix k(dout, din);
    for (long o = 0; o < dout; ++o)
      for (long f = 0; f < din; ++f) k(o, f) = amp * eig.vectors(o * din + f, i);
    ch.kraus.push_back(std::move(k));
  }
  if (ch.kraus.empty())
    throw InputError("channel_from_choi: Choi operator has empty support");
  return ch;
}

// Applies a channel to the subsystems named by `on` (in channel input
// order).  For an endomorphic channel the acted subsystems keep the state's
// own labels and the original label order is preserved.  Otherwise the
// output subsystems take the channel's output labels and are placed in
// front of the untouched spectators.
inline LabeledState apply_channel(const QuantumChannel& ch,
                                  const LabeledState& rho,
                                  const std::vector<std::string>& on) {
  ch.check_valid();
  if (on.size() != ch.input.size())
    throw InputError("apply_channel: `on` must name one label per channel input");
  const std::vector<int> pos = rho.factorization.positions_of(on);
  for (std::size_t i = 0; i < on.size(); ++i)
    if (rho.factorization.dims[static_cast<std::size_t>(pos[i])] !=
        ch.input.dims[i])
      throw InputError("apply_channel: dimension mismatch on label '" + on[i] +
                       "'");

  const std::vector<std::string> spectators = rho.factorization.complement(on);
  std::vector<std::string> front = on;
  front.insert(front.end(), spectators.begin(), spectators.end());
  ComplexMatrix x = permute_subsystems(rho.matrix, rho.factorization, front);

  const long din = ch.in_dim();
  const long dout = ch.out_dim();
  const long drest = rho.dim() / din;
  const ComplexMatrix idr = identity_matrix(static_cast<int>(drest));
  ComplexMatrix y = zero_matrix(static_cast<int>(dout * drest),
                                static_cast<int>(dout * drest));
  for (const auto& k : ch.kraus) {
    const ComplexMatrix b = tensor_product(k, idr);
    y += b * x * b.adjoint();
  }

  Factorization f_spec = spectators.empty()
                             ? Factorization({}, {})
                             : rho.factorization.selected(spectators);
  Factorization f_out;
  if (ch.is_endomorphic()) {
    f_out = rho.factorization.selected(on);
  } else {
    for (const auto& l : ch.output.labels)
      if (std::find(spectators.begin(), spectators.end(), l) != spectators.end())
        throw InputError("apply_channel: output label '" + l +
                         "' collides with a spectator label");
    f_out = ch.output;
  }
  f_out.labels.insert(f_out.labels.end(), f_spec.labels.begin(),
                      f_spec.labels.end());
  f_out.dims.insert(f_out.dims.end(), f_spec.dims.begin(), f_spec.dims.end());

  LabeledState out = validate_density(y, f_out);
  if (ch.is_endomorphic()) out = out.permuted(rho.factorization.labels);
  return out;
}

// Uniform-mixture channel rho -> (1/M) sum_i U_i rho U_i^dag acting on `f`.
// An optional output factorization reinterprets the (same-dimension) output
// index space, which is how encoding unitaries with a different output
// split are handled.
inline QuantumChannel randomizing_channel(const UnitaryEnsemble& ens,
                                          const Factorization& f) {
  f.check();
  ens.check();
  if (ens.dim() != f.total_dim())
    throw InputError("randomizing_channel: ensemble dimension mismatch");
  QuantumChannel ch;
  ch.input = f;
  ch.output = f;
  const double amp = 1.0 / std::sqrt(static_cast<double>(ens.size()));
  for (const auto& u : ens.unitaries) ch.kraus.push_back(amp * u);
  return ch;
}

inline QuantumChannel randomizing_channel(const UnitaryEnsemble& ens,
                                          const Factorization& f_in,
                                          const Factorization& f_out) {
  QuantumChannel ch = randomizing_channel(ens, f_in);
  f_out.check();
  if (f_out.total_dim() != f_in.total_dim())
    throw InputError("randomizing_channel: output dimension mismatch");
  ch.output = f_out;
  return ch;
}

inline QuantumChannel identity_channel(const Factorization& f) {
  return randomizing_channel(
      UnitaryEnsemble({identity_matrix(static_cast<int>(f.total_dim()))}), f);
}

// Discrete displacement operators X^a Z^b on dimension d, indexed
// i = a*d + b.  X|k> = |k+1 mod d>, Z|k> = exp(2 pi i k / d)|k>.
// Averaging over all d^2 of them replaces a state by the maximally mixed
// one, which is what makes them the canonical randomizing ensemble.
inline UnitaryEnsemble heisenberg_weyl_ensemble(int d) {
  if (d < 1) throw InputError("heisenberg_weyl_ensemble: dimension < 1");
  std::vector<ComplexMatrix> us;
  us.reserve(static_cast<std::size_t>(d) * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      ComplexMatrix u = zero_matrix(d, d);
      for (int k = 0; k < d; ++k) {
        const double phase = 2.0 * std::numbers::pi * b * k / d;
        u((k + a) % d, k) = Complex(std::cos(phase), std::sin(phase));
      }
      us.push_back(std::move(u));
    }
  return UnitaryEnsemble(std::move(us));
}

// Full displacement twirl of the named subsystems: equivalent to tracing
// them out and replacing them by the maximally mixed state, so every
// correlation with the rest is erased while the marginal on the rest is
// untouched.
inline LabeledState twirl_subsystem(const LabeledState& rho,
                                    const std::vector<std::string>& on) {
  const Factorization f_on = rho.factorization.restricted(on);
  const UnitaryEnsemble ens =
      heisenberg_weyl_ensemble(static_cast<int>(f_on.total_dim()));
  return apply_channel(randomizing_channel(ens, f_on), rho, f_on.labels);
}

// Trace-and-replace recovery candidate: X -> sigma (x) X.  The output
// carries sigma's labels followed by the input labels.
inline QuantumChannel append_state_channel(const LabeledState& sigma,
                                           const Factorization& input) {
  input.check();
  for (const auto& l : sigma.labels())
    if (input.has_label(l))
      throw InputError("append_state_channel: label '" + l + "' collides");
  HermEig eig = herm_eig(sigma.matrix);
  QuantumChannel ch;
  ch.input = input;
  ch.output = sigma.factorization;
  ch.output.labels.insert(ch.output.labels.end(), input.labels.begin(),
                          input.labels.end());
  ch.output.dims.insert(ch.output.dims.end(), input.dims.begin(),
                        input.dims.end());
  const long din = input.total_dim();
  const ComplexMatrix idn = identity_matrix(static_cast<int>(din));
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double v = eig.values(i);
    if (v <= kSupportCutoff) continue;
    ComplexMatrix w = eig.vectors.col(i);
    ch.kraus.push_back(std::sqrt(v) * tensor_product(w, idn));
  }
  return ch;
}

// Transpose recovery map of rho_AE with respect to its marginal on `from`:
//   X -> rho_AE^{1/2} (1_A (x) rho_E^{-1/2} X rho_E^{-1/2}) rho_AE^{1/2}.
// Exact on the marginal (maps rho_E back to rho_AE); completed to a
// trace-preserving map off the support of rho_E by trace-and-replace with
// rho_AE.
inline QuantumChannel petz_recovery(const LabeledState& rho_ae,
                                    const std::vector<std::string>& from,
                                    const std::vector<std::string>& recover) {
  if (from.empty() || recover.empty())
    throw InputError("petz_recovery: empty label set");
  std::vector<std::string> order = recover;
  order.insert(order.end(), from.begin(), from.end());
  if (order.size() != rho_ae.factorization.size())
    throw InputError("petz_recovery: from/recover must partition the state");
  const LabeledState rc = rho_ae.permuted(order);

  const Factorization f_from = rc.factorization.selected(from);
  const Factorization f_out = rc.factorization;
  const long da = rc.factorization.dim_of_labels(recover);
  const long de = f_from.total_dim();

  const ComplexMatrix rho_e = partial_trace(rc.matrix, rc.factorization, from);
  const ComplexMatrix s = matrix_sqrt(rc.matrix);
  const ComplexMatrix n = matrix_inv_sqrt(rho_e);

  QuantumChannel ch;
  ch.input = f_from;
  ch.output = f_out;
  for (long a = 0; a < da; ++a)
    ch.kraus.push_back(ComplexMatrix(s.middleCols(a * de, de) * n));

  // Complete off the support of rho_E: states there are traced out and
  // replaced by rho_AE itself.
  HermEig ee = herm_eig(rho_e);
  std::vector<Eigen::Index> kernel;
  for (Eigen::Index i = 0; i < ee.values.size(); ++i)
    if (ee.values(i) <= kSupportCutoff) kernel.push_back(i);
  if (!kernel.empty()) {
    HermEig ae = herm_eig(rc.matrix);
    for (Eigen::Index i = 0; i < ae.values.size(); ++i) {
      if (ae.values(i) <= kSupportCutoff) continue;
      const double amp = std::sqrt(ae.values(i));
      for (Eigen::Index m : kernel)
        ch.kraus.push_back(ComplexMatrix(
            amp * ae.vectors.col(i) * ee.vectors.col(m).adjoint()));
    }
  }
  return ch;
}

// Controlled application of an ensemble: the direct sum of the U_i indexed
// by a maximally entangled control basis.
struct ControlledExtension {
  ComplexMatrix unitary;       // on system (x) control, control innermost
  LabeledState control_state;  // maximally mixed on the control pair
  int block = 0;               // sqrt(M): dimension of each control factor
};

// C = sum_i U_i (x) |Phi_i><Phi_i| where {|Phi_i>} is the displacement
// orbit of the maximally entangled state on an m x m control pair
// (labels A1p, A2p), m = sqrt(M).  Requires M to be a perfect square;
// other ensemble sizes are rejected as a documented restriction.
inline ControlledExtension controlled_ensemble_extension(
    const UnitaryEnsemble& ens) {
  ens.check();
  const int msq = ens.size();
  const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(msq))));
  if (m * m != msq)
    throw InputError(
        "controlled_ensemble_extension: ensemble size must be a perfect "
        "square");
  const long ds = ens.dim();
  const long dc = static_cast<long>(m) * m;

  const UnitaryEnsemble hw = heisenberg_weyl_ensemble(m);
  ComplexVector phi = ComplexVector::Zero(dc);
  const double amp = 1.0 / std::sqrt(static_cast<double>(m));
  for (int k = 0; k < m; ++k) phi(static_cast<long>(k) * m + k) = amp;

  ControlledExtension ext;
  ext.block = m;
  ext.unitary = zero_matrix(static_cast<int>(ds * dc), static_cast<int>(ds * dc));
  for (int i = 0; i < msq; ++i) {
    ComplexVector phi_i = ComplexVector::Zero(dc);
    const ComplexMatrix& w = hw.unitaries[static_cast<std::size_t>(i)];
    for (int k = 0; k < m; ++k)
      for (int j = 0; j < m; ++j)
        phi_i(static_cast<long>(k) * m + j) = amp * w(j, k);
    const ComplexMatrix proj = phi_i * phi_i.adjoint();
    ext.unitary += tensor_product(ens.unitaries[static_cast<std::size_t>(i)], proj);
  }

  const LabeledState mixed1 = maximally_mixed(m, "A1p");
  const LabeledState mixed2 = maximally_mixed(m, "A2p");
  ext.control_state = tensor(mixed1, mixed2);
  return ext;
}

}  // namespace qdecon
