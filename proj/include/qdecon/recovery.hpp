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

#include <string>
#include <vector>

#include "qdecon/channels.hpp"
#include "qdecon/entropy.hpp"

namespace qdecon {

// Regularizer added to a rank-deficient second argument before the inverse
// square root inside the fidelity gradient.
inline constexpr double kRankRegularizer = 1e-12;

// Dimension cap for the recovery optimizer (Choi matrices grow as
// dim(A)*dim(E)^2*dim(B) beyond this).
inline constexpr long kRecoveryDimCap = 64;

// Uhlmann fidelity F(xi, chi) = (Tr sqrt(sqrt(chi) xi sqrt(chi)))^2 of two
// density matrices on the same space.
inline double uhlmann_fidelity(const ComplexMatrix& xi,
                               const ComplexMatrix& chi) {
  if (xi.rows() != xi.cols() || chi.rows() != chi.cols() ||
      xi.rows() != chi.rows())
    throw InputError("uhlmann_fidelity: dimension mismatch");
  const ComplexMatrix s = matrix_sqrt(chi);
  const ComplexMatrix m = hermitian_part(s * xi * s);
  HermEig eig = herm_eig(m);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    const double v = eig.values(i);
    if (v > 0.0) acc += std::sqrt(v);
  }
  return acc * acc;
}

// Label-aware overload: the second state is permuted into the first state's
// subsystem order before comparing, so differing factor orders are fine.
inline double uhlmann_fidelity(const LabeledState& xi, const LabeledState& chi) {
  if (xi.factorization.size() != chi.factorization.size())
    throw InputError("uhlmann_fidelity: states have different label sets");
  const LabeledState aligned = chi.permuted(xi.factorization.labels);
  for (std::size_t i = 0; i < xi.factorization.size(); ++i)
    if (aligned.factorization.dims[i] != xi.factorization.dims[i])
      throw InputError("uhlmann_fidelity: dimension mismatch on label '" +
                       xi.factorization.labels[i] + "'");
  return uhlmann_fidelity(xi.matrix, aligned.matrix);
}

// Gradient of chi -> F(xi, chi):
//   G = sqrt(F) * xi^{1/2} (xi^{1/2} chi xi^{1/2})^{-1/2} xi^{1/2}
// under the support convention, with chi regularized by kRankRegularizer*I
// when rank deficient.  d/dt F(xi, chi + t Delta) = Tr[G Delta] at t = 0.
inline ComplexMatrix fidelity_gradient(const ComplexMatrix& xi,
                                       const ComplexMatrix& chi) {
  if (xi.rows() != xi.cols() || chi.rows() != chi.cols() ||
      xi.rows() != chi.rows())
    throw InputError("fidelity_gradient: dimension mismatch");
  const ComplexMatrix a = matrix_sqrt(xi);

  ComplexMatrix chir = hermitian_part(chi);
  HermEig ce = herm_eig(chir);
  if (ce.values(ce.values.size() - 1) < kSupportCutoff)
    chir += kRankRegularizer *
            identity_matrix(static_cast<int>(chi.rows()));

  const ComplexMatrix y = hermitian_part(a * chir * a);
  HermEig ye = herm_eig(y);
  double sqrt_f = 0.0;
  RealVector w(ye.values.size());
  for (Eigen::Index i = 0; i < ye.values.size(); ++i) {
    const double v = ye.values(i) > 0.0 ? ye.values(i) : 0.0;
    sqrt_f += std::sqrt(v);
    w(i) = (v <= kSupportCutoff) ? 0.0 : 1.0 / std::sqrt(v);
  }
  ComplexVector wc = w.cast<Complex>();
  const ComplexMatrix y_inv_sqrt = ye.vectors * wc.asDiagonal() * ye.vectors.adjoint();
  return hermitian_part(ComplexMatrix(sqrt_f * a * y_inv_sqrt * a));
}

struct OptimizerConfig {
  double tol_obj = 1e-10;   // stop when a step gains less than this
  int max_iter = 5000;
  int dykstra_max_iter = 200;
  double dykstra_tol = 1e-11;
  double armijo = 1e-4;     // sufficient-increase constant
  double min_step = 1e-14;  // line search floor
};

// Result of the recovery optimization.  `value` is recomputed at the end by
// building the channel from the final Choi operator and running it through
// the public channel-application path, so it is a certificate, not the raw
// iterate objective.
struct FoREstimate {
  double value = 0.0;
  double petz_value = 0.0;  // objective at the transpose-map starting point
  QuantumChannel channel;
  int iterations = 0;
  bool converged = false;
  double gradient_norm_final = 0.0;
  std::vector<double> objective_history;
};

namespace detail {

// Fixed-order workspace for the optimizer.  The comparison target is the
// input state permuted to (B, A, E) because the candidate output
// sigma(J) = (id_B (x) R_{E->AE})(rho_BE) naturally carries that order.
// The bilinear maps J -> sigma and G -> Gamma are evaluated as single
// matrix products over paired indices; with per-entry loops they dominate
// the run time at dimension 64.
struct RecoveryProblem {
  long da = 0, db = 0, de = 0, dout = 0;
  ComplexMatrix xi;       // target, ordered (B, A, E)
  ComplexMatrix rho_be;   // ordered (B, E)
  ComplexMatrix sqrt_xi;  // cached; the target never changes
  ComplexMatrix rho2;     // rho_be repacked: rho2[(b,b'),(f,f')]

  void finalize() {
    sqrt_xi = matrix_sqrt(xi);
    rho2 = ComplexMatrix(db * db, de * de);
    for (long b = 0; b < db; ++b)
      for (long bp = 0; bp < db; ++bp)
        for (long f = 0; f < de; ++f)
          for (long fp = 0; fp < de; ++fp)
            rho2(b * db + bp, f * de + fp) = rho_be(b * de + f, bp * de + fp);
  }

  // sigma_{(b,o),(b',o')} = sum_{f,f'} rho_be_{(b,f),(b',f')} J_{(o,f),(o',f')}
  // with o = (a,e) the channel output index.  Pairing row/column indices
  // turns the contraction into rho2 * J2^T.
  ComplexMatrix output_state(const ComplexMatrix& j) const {
    ComplexMatrix j2(dout * dout, de * de);
    for (long o = 0; o < dout; ++o)
      for (long op = 0; op < dout; ++op)
        for (long f = 0; f < de; ++f)
          for (long fp = 0; fp < de; ++fp)
            j2(o * dout + op, f * de + fp) = j(o * de + f, op * de + fp);
    const ComplexMatrix s2 = rho2 * j2.transpose();
    const long ds = db * dout;
    ComplexMatrix sigma(ds, ds);
    for (long b = 0; b < db; ++b)
      for (long bp = 0; bp < db; ++bp)
        for (long o = 0; o < dout; ++o)
          for (long op = 0; op < dout; ++op)
            sigma(b * dout + o, bp * dout + op) = s2(b * db + bp, o * dout + op);
    return hermitian_part(sigma);
  }

  // Adjoint of J -> sigma(J) applied to the fidelity gradient G, so that
  // dF = Tr[Gamma dJ]:
  // Gamma_{(o,f),(o',f')} = sum_{b,b'} G_{(b,o),(b',o')} rho_be_{(b',f'),(b,f)}
  ComplexMatrix choi_gradient(const ComplexMatrix& g) const {
    ComplexMatrix g2(db * db, dout * dout);
    for (long b = 0; b < db; ++b)
      for (long bp = 0; bp < db; ++bp)
        for (long o = 0; o < dout; ++o)
          for (long op = 0; op < dout; ++op)
            g2(b * db + bp, o * dout + op) = g(b * dout + o, bp * dout + op);
    const ComplexMatrix gm2 = g2.transpose() * rho2.conjugate();
    const long dj = dout * de;
    ComplexMatrix gamma(dj, dj);
    for (long o = 0; o < dout; ++o)
      for (long op = 0; op < dout; ++op)
        for (long f = 0; f < de; ++f)
          for (long fp = 0; fp < de; ++fp)
            gamma(o * de + f, op * de + fp) = gm2(o * dout + op, f * de + fp);
    return hermitian_part(gamma);
  }

  double objective(const ComplexMatrix& j) const {
    const ComplexMatrix sigma = output_state(j);
    const ComplexMatrix m = hermitian_part(sqrt_xi * sigma * sqrt_xi);
    HermEig eig = herm_eig(m);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
      if (eig.values(i) > 0.0) acc += std::sqrt(eig.values(i));
    return acc * acc;
  }

  // Gradient of F(xi, .) at sigma using the cached sqrt(xi); sigma is
  // shifted by the rank regularizer unconditionally, which changes nothing
  // at this scale and avoids a rank-detection eigendecomposition.
  ComplexMatrix fidelity_gradient_at(const ComplexMatrix& sigma) const {
    ComplexMatrix y = hermitian_part(sqrt_xi * sigma * sqrt_xi);
    y += kRankRegularizer * identity_matrix(static_cast<int>(y.rows()));
    HermEig ye = herm_eig(y);
    double sqrt_f = 0.0;
    RealVector w(ye.values.size());
    for (Eigen::Index i = 0; i < ye.values.size(); ++i) {
      const double v = ye.values(i) > 0.0 ? ye.values(i) : 0.0;
      sqrt_f += std::sqrt(v);
      w(i) = (v <= kSupportCutoff) ? 0.0 : 1.0 / std::sqrt(v);
    }
    ComplexVector wc = w.cast<Complex>();
    const ComplexMatrix y_inv_sqrt =
        ye.vectors * wc.asDiagonal() * ye.vectors.adjoint();
    return hermitian_part(
        ComplexMatrix(sqrt_f * sqrt_xi * y_inv_sqrt * sqrt_xi));
  }

  ComplexMatrix psd_project(const ComplexMatrix& x) const {
    HermEig eig = herm_eig(hermitian_part(x), 1e-6);
    RealVector w = eig.values.cwiseMax(0.0);
    ComplexVector wc = w.cast<Complex>();
    return hermitian_part(
        ComplexMatrix(eig.vectors * wc.asDiagonal() * eig.vectors.adjoint()));
  }

  // Frobenius projection onto {J : Tr_out J = I_in}.
  ComplexMatrix tp_project(const ComplexMatrix& x) const {
    ComplexMatrix tr_out = zero_matrix(static_cast<int>(de), static_cast<int>(de));
    for (long f = 0; f < de; ++f)
      for (long fp = 0; fp < de; ++fp) {
        Complex acc(0.0, 0.0);
        for (long o = 0; o < dout; ++o) acc += x(o * de + f, o * de + fp);
        tr_out(f, fp) = acc;
      }
    const ComplexMatrix delta =
        (tr_out - identity_matrix(static_cast<int>(de))) /
        static_cast<double>(dout);
    return x - tensor_product(identity_matrix(static_cast<int>(dout)), delta);
  }

  // Dykstra alternating projections onto the PSD cone and the
  // trace-preserving affine slice; converges to the Frobenius-nearest
  // point of their intersection.
  ComplexMatrix project_feasible(const ComplexMatrix& x0,
                                 const OptimizerConfig& cfg) const {
    ComplexMatrix x = hermitian_part(x0);
    ComplexMatrix p = zero_matrix(static_cast<int>(x.rows()),
                                  static_cast<int>(x.cols()));
    ComplexMatrix q = p;
    for (int it = 0; it < cfg.dykstra_max_iter; ++it) {
      const ComplexMatrix y = psd_project(x + p);
      p = x + p - y;
      const ComplexMatrix x_next = tp_project(y + q);
      q = y + q - x_next;
      const double res = max_abs(ComplexMatrix(x_next - y));
      x = x_next;
      if (res <= cfg.dykstra_tol) break;
    }
    return x;
  }
};

// Nearest-channel repair for an almost-feasible Choi iterate: clip the
// spectrum to the PSD cone, then conjugate the output marginal back to the
// identity so a Kraus decomposition is trace preserving to roundoff.
inline ComplexMatrix repair_choi(const ComplexMatrix& j, long dout, long de) {
  const HermEig eig = herm_eig(j, 1e-6);
  ComplexMatrix pos = zero_matrix(static_cast<int>(j.rows()),
                                  static_cast<int>(j.cols()));
  for (long k = 0; k < eig.values.size(); ++k) {
    if (eig.values(k) <= 0.0) continue;
    pos.noalias() +=
        eig.values(k) * eig.vectors.col(k) * eig.vectors.col(k).adjoint();
  }
  ComplexMatrix s = zero_matrix(static_cast<int>(de), static_cast<int>(de));
  for (long f = 0; f < de; ++f)
    for (long fp = 0; fp < de; ++fp) {
      Complex acc = 0.0;
      for (long o = 0; o < dout; ++o) acc += pos(o * de + f, o * de + fp);
      s(f, fp) = acc;
    }
  const ComplexMatrix m = tensor_product(
      identity_matrix(static_cast<int>(dout)), matrix_inv_sqrt(s));
  return hermitian_part(ComplexMatrix(m * pos * m));
}

}  // namespace detail

// Best fidelity achievable by recovering A from E alone:
//   F(A;B|E) = max over channels R_{E->AE} of F(rho_ABE, (id_B (x) R)(rho_BE)).
// Projected gradient ascent on the recovery channel's Choi operator with a
// transpose-map start; the objective is concave, so convergence to the
// global optimum is a property of the problem, not luck.
inline FoREstimate fidelity_of_recovery(const LabeledState& rho,
                                        const Roles& roles,
                                        const OptimizerConfig& cfg = {}) {
  if (roles.a.empty() || roles.b.empty() || roles.e.empty())
    throw InputError("fidelity_of_recovery: all three role sets are required");
  detail::check_disjoint({roles.a, roles.b, roles.e});
  const auto all = detail::concat({roles.a, roles.b, roles.e});
  if (all.size() != rho.factorization.size())
    throw InputError("fidelity_of_recovery: roles must cover the whole state");
  if (rho.dim() > kRecoveryDimCap)
    throw CapacityError("fidelity_of_recovery: dimension " +
                        std::to_string(rho.dim()) + " exceeds cap " +
                        std::to_string(kRecoveryDimCap));

  const LabeledState rc = rho.permuted(all);
  detail::RecoveryProblem prob;
  prob.da = rc.factorization.dim_of_labels(roles.a);
  prob.db = rc.factorization.dim_of_labels(roles.b);
  prob.de = rc.factorization.dim_of_labels(roles.e);
  prob.dout = prob.da * prob.de;
  prob.xi = permute_subsystems(
      rc.matrix, rc.factorization,
      detail::concat({roles.b, roles.a, roles.e}));

  std::vector<std::string> be = roles.b;
  be.insert(be.end(), roles.e.begin(), roles.e.end());
  const LabeledState rho_be = rc.reduce(be);
  prob.rho_be = rho_be.matrix;

  std::vector<std::string> ae = roles.a;
  ae.insert(ae.end(), roles.e.begin(), roles.e.end());
  const QuantumChannel petz =
      petz_recovery(rc.reduce(ae), roles.e, roles.a);

  prob.finalize();
  FoREstimate est;
  ComplexMatrix j = prob.project_feasible(petz.choi(), cfg);
  double f = prob.objective(j);
  est.petz_value = f;
  est.objective_history.push_back(f);

  int iterations = 0;
  bool converged = false;
  ComplexMatrix j_prev, gamma_prev;
  bool have_prev = false;
  while (iterations < cfg.max_iter) {
    const ComplexMatrix sigma = prob.output_state(j);
    const ComplexMatrix g = prob.fidelity_gradient_at(sigma);
    const ComplexMatrix gamma = prob.choi_gradient(g);
    est.gradient_norm_final = gamma.norm();

    // Scale the ascent direction before the unit-step Armijo search:
    // Barzilai-Borwein when a previous step exists, gradient normalization
    // otherwise, so a rank-boundary gradient blowup cannot force dozens of
    // halvings per iteration.
    const double gn = est.gradient_norm_final;
    double alpha = (gn > 1.0) ? 1.0 / gn : 1.0;
    if (have_prev) {
      const ComplexMatrix s = j - j_prev;
      const ComplexMatrix y = gamma - gamma_prev;
      const double ss = (s.adjoint() * s).trace().real();
      const double sy = (s.adjoint() * y).trace().real();
      if (sy < -1e-300) {
        double bb = -ss / sy;
        bb = std::min(bb, 1e6);
        bb = std::max(bb, 1e-8);
        // Trust cap at twice the feasible set's diameter scale; longer
        // trials only feed Dykstra points it cannot project accurately.
        const double cap =
            2.0 * std::sqrt(static_cast<double>(prob.dout * prob.de));
        if (bb * gn > cap) bb = cap / gn;
        alpha = bb;
      }
    }
    const ComplexMatrix dir = alpha * gamma;
    j_prev = j;
    gamma_prev = gamma;
    have_prev = true;

    double t = 1.0;
    bool accepted = false;
    ComplexMatrix j_next;
    double f_next = f;
    while (t >= cfg.min_step) {
      j_next = prob.project_feasible(j + t * dir, cfg);
      f_next = prob.objective(j_next);
      const double pred =
          (gamma.adjoint() * (j_next - j)).trace().real();
      if (f_next - f >= cfg.armijo * pred - 1e-15) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }

    ++iterations;
    double gain = 0.0;
    if (accepted) {
      gain = f_next - f;
      j = j_next;
      f = f_next;
      est.objective_history.push_back(f);
    }
    if (iterations >= cfg.max_iter) {
      converged = false;  // iteration cap wins over the gain criterion
      break;
    }
    if (!accepted || gain < cfg.tol_obj) {
      converged = true;
      break;
    }
  }

  est.iterations = iterations;
  est.converged = converged;

  const ComplexMatrix j_cert = detail::repair_choi(j, prob.dout, prob.de);
  est.channel = channel_from_choi(j_cert, rc.factorization.selected(roles.e),
                                  rc.factorization.selected(ae));
  const LabeledState recovered =
      apply_channel(est.channel, rho_be, roles.e);
  est.value = uhlmann_fidelity(rc, recovered);
  return est;
}

// I(A;B|E) + log2 F(A;B|E): non-negative up to optimizer tolerance, since
// the best recovery fidelity is lower-bounded by 2^{-I(A;B|E)}.
inline double fawzi_renner_residual(const LabeledState& rho, const Roles& roles,
                                    const OptimizerConfig& cfg = {},
                                    FoREstimate* est_out = nullptr) {
  const double i = cqmi(rho, roles);
  FoREstimate est = fidelity_of_recovery(rho, roles, cfg);
  if (est_out) *est_out = est;
  double v = est.value;
  if (v < 1e-300) v = 1e-300;  // guard the log; fidelity this small never occurs
  return i + std::log2(v);
}

// |F(A;B|E) - F(A;B|R)| for a pure state on A,B,E,R; the two recovery
// problems are images of each other under the purification symmetry, so the
// optimal values agree.
inline double for_self_duality_residual(const LabeledState& rho,
                                        const Roles& roles,
                                        const std::vector<std::string>& r,
                                        const OptimizerConfig& cfg = {},
                                        double* f_given_e = nullptr,
                                        double* f_given_r = nullptr) {
  detail::check_disjoint({roles.a, roles.b, roles.e, r});
  const auto all = detail::concat({roles.a, roles.b, roles.e, r});
  if (all.size() != rho.factorization.size())
    throw InputError("for_self_duality_residual: roles must cover the state");
  rho.factorization.positions_of(all);
  detail::check_pure(rho, "for_self_duality_residual");

  auto abe = detail::concat({roles.a, roles.b, roles.e});
  auto abr = detail::concat({roles.a, roles.b, r});
  const FoREstimate fe = fidelity_of_recovery(rho.reduce(abe), roles, cfg);
  Roles roles_r{roles.a, roles.b, r};
  const FoREstimate fr = fidelity_of_recovery(rho.reduce(abr), roles_r, cfg);
  if (f_given_e) *f_given_e = fe.value;
  if (f_given_r) *f_given_r = fr.value;
  return std::abs(fe.value - fr.value);
}

namespace detail {

// One fresh name per sigma label, never colliding with rho labels, sigma
// labels, or names already assigned.
inline std::vector<std::string> disjoint_labels(const Factorization& rho_f,
                                                const Factorization& sig_f) {
  std::vector<std::string> taken = rho_f.labels;
  taken.insert(taken.end(), sig_f.labels.begin(), sig_f.labels.end());
  std::vector<std::string> out;
  for (const auto& base : sig_f.labels) {
    std::string l = base;
    while (std::find(taken.begin(), taken.end(), l) != taken.end()) l += "'";
    taken.push_back(l);
    out.push_back(l);
  }
  return out;
}

}  // namespace detail

// |F(A1 A2; B1 B2 | E1 E2)_{rho (x) sigma} - F1 * F2|: the optimal recovery
// fidelity multiplies across independent problems.
inline double for_multiplicativity_residual(const LabeledState& rho,
                                            const Roles& roles_rho,
                                            const LabeledState& sigma,
                                            const Roles& roles_sigma,
                                            const OptimizerConfig& cfg = {},
                                            double* f_joint = nullptr,
                                            double* f_rho = nullptr,
                                            double* f_sigma = nullptr) {
  // Rename sigma's labels so the two factors never collide, applying one
  // consistent map to the factorization and the role sets.
  const std::vector<std::string> fresh =
      detail::disjoint_labels(rho.factorization, sigma.factorization);
  auto renamed = [&](const std::string& old) {
    return fresh[static_cast<std::size_t>(sigma.factorization.index_of(old))];
  };
  LabeledState sig = sigma;
  sig.factorization.labels = fresh;
  Roles roles_sig;
  for (const auto& l : roles_sigma.a) roles_sig.a.push_back(renamed(l));
  for (const auto& l : roles_sigma.b) roles_sig.b.push_back(renamed(l));
  for (const auto& l : roles_sigma.e) roles_sig.e.push_back(renamed(l));

  const LabeledState joint = tensor(rho, sig);
  Roles roles_joint;
  roles_joint.a = detail::concat({roles_rho.a, roles_sig.a});
  roles_joint.b = detail::concat({roles_rho.b, roles_sig.b});
  roles_joint.e = detail::concat({roles_rho.e, roles_sig.e});

  const FoREstimate fj = fidelity_of_recovery(joint, roles_joint, cfg);
  const FoREstimate f1 = fidelity_of_recovery(rho, roles_rho, cfg);
  const FoREstimate f2 = fidelity_of_recovery(sigma, roles_sigma, cfg);
  if (f_joint) *f_joint = fj.value;
  if (f_rho) *f_rho = f1.value;
  if (f_sigma) *f_sigma = f2.value;
  return std::abs(fj.value - f1.value * f2.value);
}

}  // namespace qdecon
