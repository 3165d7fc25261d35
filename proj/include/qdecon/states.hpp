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

#include <optional>
#include <string>
#include <vector>

#include "qdecon/linalg.hpp"
#include "qdecon/rng.hpp"

namespace qdecon {

// Output dimension guard for n_copies; protocol evaluation applies its own
// tighter caps on top of this.
inline constexpr long kCopiesDimCap = 4096;

// Normalizations silently applied by validate_density are recorded here.
// A repair flag is set only when the corresponding drift exceeds 1e-12;
// smaller deviations are eigensolver noise and are absorbed silently.
struct RepairLog {
  double hermitian_drift = 0.0;
  double trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  bool symmetrized = false;
  bool renormalized = false;
  bool clipped = false;

  bool any() const { return symmetrized || renormalized || clipped; }
};

inline constexpr double kRepairNoise = 1e-12;
inline constexpr double kTraceTol = 1e-8;

// A density matrix together with the labeled tensor factorization of its
// index space.  All reduced/permuted views are computed by label.
struct LabeledState {
  ComplexMatrix matrix;
  Factorization factorization;

  long dim() const { return factorization.total_dim(); }
  const std::vector<std::string>& labels() const { return factorization.labels; }

  LabeledState reduce(const std::vector<std::string>& keep) const {
    LabeledState out;
    out.matrix = partial_trace(matrix, factorization, keep);
    out.factorization = factorization.restricted(keep);
    return out;
  }

  LabeledState permuted(const std::vector<std::string>& order) const {
    LabeledState out;
    out.matrix = permute_subsystems(matrix, factorization, order);
    out.factorization = factorization.selected(order);
    return out;
  }

  bool is_pure(double tol = 1e-9) const {
    HermEig eig = herm_eig(matrix);
    return eig.values.size() > 0 && eig.values(0) >= 1.0 - tol;
  }
};

// Checks (and mildly repairs) a candidate density matrix.  Symmetrizes,
// clips eigenvalues in [-1e-10, 0) to zero, renormalizes trace drift up to
// 1e-8.  Errors: eigenvalue below -1e-10, trace drift above 1e-8, dimension
// mismatch with the factorization.
inline LabeledState validate_density(const ComplexMatrix& x,
                                     const Factorization& f,
                                     RepairLog* log = nullptr) {
  detail::check_square_matches(x, f, "validate_density");
  RepairLog rep;

  rep.hermitian_drift = max_abs(ComplexMatrix(x - x.adjoint()));
  ComplexMatrix h = hermitian_part(x);
  rep.symmetrized = rep.hermitian_drift > kRepairNoise;

  HermEig eig = herm_eig(h);
  rep.min_eigenvalue = eig.values(eig.values.size() - 1);
  if (rep.min_eigenvalue < -kEigenvalueClip)
    throw InputError("validate_density: negative eigenvalue " +
                     std::to_string(rep.min_eigenvalue));
  bool has_negative = rep.min_eigenvalue < 0.0;
  if (has_negative) {
    RealVector w = eig.values.cwiseMax(0.0);
    ComplexVector wc = w.cast<Complex>();
    h = eig.vectors * wc.asDiagonal() * eig.vectors.adjoint();
    h = hermitian_part(h);
    rep.clipped = rep.min_eigenvalue < -kRepairNoise;
  }

  const double tr = h.trace().real();
  rep.trace_drift = std::abs(tr - 1.0);
  if (rep.trace_drift > kTraceTol)
    throw InputError("validate_density: trace deviates from 1 by " +
                     std::to_string(rep.trace_drift));
  if (rep.trace_drift > 0.0) h /= tr;
  rep.renormalized = rep.trace_drift > kRepairNoise;

  if (log) *log = rep;
  LabeledState out;
  out.matrix = std::move(h);
  out.factorization = f;
  return out;
}

inline LabeledState maximally_mixed(int d, const std::string& label) {
  if (d < 1) throw InputError("maximally_mixed: dimension < 1");
  LabeledState out;
  out.matrix = identity_matrix(d) / static_cast<double>(d);
  out.factorization = Factorization({label}, {d});
  return out;
}

// Projector onto (1/sqrt(d)) sum_k |kk>.
inline LabeledState maximally_entangled(int d, const std::string& left,
                                        const std::string& right) {
  if (d < 1) throw InputError("maximally_entangled: dimension < 1");
  ComplexVector phi = ComplexVector::Zero(static_cast<long>(d) * d);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) phi(static_cast<long>(k) * d + k) = amp;
  LabeledState out;
  out.matrix = phi * phi.adjoint();
  out.factorization = Factorization({left, right}, {d, d});
  return out;
}

// (1/sqrt(d)) sum_k |k...k> on `parties` subsystems of dimension d.
// Default labels: 2 parties (A,B), 3 (A,B,E), 4 (A,B,E,R), else Q1..Qn.
inline LabeledState ghz(int parties, int d,
                        std::vector<std::string> labels = {}) {
  if (parties < 2) throw InputError("ghz: need at least 2 parties");
  if (d < 2) throw InputError("ghz: local dimension < 2");
  if (labels.empty()) {
    switch (parties) {
      case 2: labels = {"A", "B"}; break;
      case 3: labels = {"A", "B", "E"}; break;
      case 4: labels = {"A", "B", "E", "R"}; break;
      default:
        for (int i = 1; i <= parties; ++i)
          labels.push_back("Q" + std::to_string(i));
    }
  }
  if (static_cast<int>(labels.size()) != parties)
    throw InputError("ghz: label count does not match parties");
  long total = 1;
  for (int p = 0; p < parties; ++p) total *= d;
  ComplexVector g = ComplexVector::Zero(total);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int k = 0; k < d; ++k) {
    long idx = 0;
    for (int p = 0; p < parties; ++p) idx = idx * d + k;
    g(idx) = amp;
  }
  LabeledState out;
  out.matrix = g * g.adjoint();
  out.factorization = Factorization(labels, std::vector<int>(parties, d));
  return out;
}

// Haar-style random pure state: normalized complex Gaussian vector.
inline LabeledState random_pure_state(const Factorization& f, Rng& rng) {
  f.check();
  const long d = f.total_dim();
  ComplexVector v(d);
  for (long i = 0; i < d; ++i) v(i) = rng.complex_normal();
  v.normalize();
  LabeledState out;
  out.matrix = v * v.adjoint();
  out.factorization = f;
  return out;
}

// Random mixed state of the given rank: GG^dag / Tr for a d x rank Ginibre G.
inline LabeledState random_mixed_state(const Factorization& f, int rank,
                                       Rng& rng) {
  f.check();
  const long d = f.total_dim();
  if (rank < 1 || rank > d)
    throw InputError("random_mixed_state: rank out of range");
  ComplexMatrix g = ginibre_matrix(static_cast<int>(d), rank, rng);
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  LabeledState out;
  out.matrix = hermitian_part(m);
  out.factorization = f;
  return out;
}

// One block of a direct-sum Markov construction: weight p_j, a state on
// A (x) eL_j and a state on eR_j (x) B.
struct MarkovBlock {
  double weight = 0.0;
  ComplexMatrix left;   // on A (x) eL_j, dimension dim_a * dim_left
  ComplexMatrix right;  // on eR_j (x) B, dimension dim_right * dim_b
  int dim_left = 1;     // |eL_j|
  int dim_right = 1;    // |eR_j|
};

// Builds sum_j p_j rho_{A eL_j} (x) rho_{eR_j B} on (A, E, B) with
// E = direct sum of eL_j (x) eR_j.  Off-block coherences are exactly zero by
// construction.  By design these states have zero conditional correlation
// between A and B given E, and the recovery map reconstructing A from E
// is exact on them.
inline LabeledState markov_state(
    const std::vector<MarkovBlock>& blocks,
    const std::vector<std::string>& labels = {"A", "E", "B"}) {
  if (blocks.empty()) throw InputError("markov_state: no blocks");
  if (labels.size() != 3) throw InputError("markov_state: need 3 labels");

  // Infer dA and dB from the first block; every block must agree.
  const auto& b0 = blocks[0];
  if (b0.dim_left < 1 || b0.dim_right < 1)
    throw InputError("markov_state: block dimension < 1");
  if (b0.left.rows() % b0.dim_left != 0 || b0.right.rows() % b0.dim_right != 0)
    throw InputError("markov_state: block shape mismatch");
  const int da = static_cast<int>(b0.left.rows()) / b0.dim_left;
  const int db = static_cast<int>(b0.right.rows()) / b0.dim_right;

  double wsum = 0.0;
  int de = 0;
  for (const auto& b : blocks) {
    if (b.weight < -1e-12) throw InputError("markov_state: negative weight");
    if (b.left.rows() != b.left.cols() || b.right.rows() != b.right.cols())
      throw InputError("markov_state: block matrices not square");
    if (b.left.rows() != static_cast<long>(da) * b.dim_left ||
        b.right.rows() != static_cast<long>(b.dim_right) * db)
      throw InputError("markov_state: inconsistent block dimensions");
    wsum += b.weight;
    de += b.dim_left * b.dim_right;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw InputError("markov_state: weights do not sum to 1");

  const long total = static_cast<long>(da) * de * db;
  ComplexMatrix m = zero_matrix(static_cast<int>(total), static_cast<int>(total));

  // Global index on (A, E, B): (a * de + e) * db + b, with the direct-sum E
  // index e = block_offset_j + l * dim_right_j + r.
  long e_off = 0;
  for (const auto& blk : blocks) {
    const int dl = blk.dim_left;
    const int dr = blk.dim_right;
    for (int a = 0; a < da; ++a)
      for (int ap = 0; ap < da; ++ap)
        for (int l = 0; l < dl; ++l)
          for (int lp = 0; lp < dl; ++lp)
            for (int r = 0; r < dr; ++r)
              for (int rp = 0; rp < dr; ++rp)
                for (int b = 0; b < db; ++b)
                  for (int bp = 0; bp < db; ++bp) {
                    const Complex val =
                        blk.weight *
                        blk.left(static_cast<long>(a) * dl + l,
                                 static_cast<long>(ap) * dl + lp) *
                        blk.right(static_cast<long>(r) * db + b,
                                  static_cast<long>(rp) * db + bp);
                    if (val == Complex(0.0, 0.0)) continue;
                    const long e = e_off + static_cast<long>(l) * dr + r;
                    const long ep = e_off + static_cast<long>(lp) * dr + rp;
                    const long row = (static_cast<long>(a) * de + e) * db + b;
                    const long col = (static_cast<long>(ap) * de + ep) * db + bp;
                    m(row, col) += val;
                  }
    e_off += static_cast<long>(dl) * dr;
  }

  Factorization f(labels, {da, de, db});
  return validate_density(m, f);
}

// Tensor product of two states on disjoint label sets.
inline LabeledState tensor(const LabeledState& a, const LabeledState& b) {
  for (const auto& l : b.labels())
    if (a.factorization.has_label(l))
      throw InputError("tensor: label '" + l + "' present on both factors");
  LabeledState out;
  out.matrix = tensor_product(a.matrix, b.matrix);
  out.factorization.labels = a.factorization.labels;
  out.factorization.dims = a.factorization.dims;
  out.factorization.labels.insert(out.factorization.labels.end(),
                                  b.factorization.labels.begin(),
                                  b.factorization.labels.end());
  out.factorization.dims.insert(out.factorization.dims.end(),
                                b.factorization.dims.begin(),
                                b.factorization.dims.end());
  return out;
}

// n-fold tensor power.  For n = 1 the state is returned unchanged; for
// n > 1 each label X becomes X1..Xn and copies of the same original label
// are grouped together (A1..An, B1..Bn, ...).
inline LabeledState n_copies(const LabeledState& rho, int n) {
  if (n < 1) throw InputError("n_copies: n < 1");
  if (n == 1) return rho;
  double logdim = static_cast<double>(n) * std::log2(static_cast<double>(rho.dim()));
  if (logdim > std::log2(static_cast<double>(kCopiesDimCap)) + 1e-9)
    throw CapacityError("n_copies: output dimension exceeds cap " +
                        std::to_string(kCopiesDimCap));

  LabeledState cur;
  cur.matrix = rho.matrix;
  cur.factorization = Factorization({}, {});
  for (int c = 1; c <= n; ++c) {
    Factorization fc;
    for (std::size_t i = 0; i < rho.factorization.size(); ++i) {
      fc.labels.push_back(rho.factorization.labels[i] + std::to_string(c));
      fc.dims.push_back(rho.factorization.dims[i]);
    }
    if (c == 1) {
      cur.factorization = fc;
    } else {
      cur.matrix = tensor_product(cur.matrix, rho.matrix);
      cur.factorization.labels.insert(cur.factorization.labels.end(),
                                      fc.labels.begin(), fc.labels.end());
      cur.factorization.dims.insert(cur.factorization.dims.end(),
                                    fc.dims.begin(), fc.dims.end());
    }
  }
  cur.factorization.check();  // rejects collisions with pre-suffixed labels

  std::vector<std::string> grouped;
  for (const auto& l : rho.factorization.labels)
    for (int c = 1; c <= n; ++c) grouped.push_back(l + std::to_string(c));
  return cur.permuted(grouped);
}

// Standard purification.  The purifier dimension equals the rank of rho
// (eigenvalues above the support cutoff).
inline LabeledState purify(const LabeledState& rho,
                           const std::string& purifier_label) {
  if (rho.factorization.has_label(purifier_label))
    throw InputError("purify: purifier label collides with '" +
                     purifier_label + "'");
  HermEig eig = herm_eig(rho.matrix);
  std::vector<int> kept;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) > kSupportCutoff) kept.push_back(static_cast<int>(i));
  const int rank = static_cast<int>(kept.size());
  if (rank == 0) throw InputError("purify: state has empty support");

  const long d = rho.dim();
  ComplexVector psi = ComplexVector::Zero(d * rank);
  for (int k = 0; k < rank; ++k) {
    const double amp = std::sqrt(eig.values(kept[static_cast<std::size_t>(k)]));
    for (long i = 0; i < d; ++i)
      psi(i * rank + k) = amp * eig.vectors(i, kept[static_cast<std::size_t>(k)]);
  }
  LabeledState out;
  out.matrix = psi * psi.adjoint();
  out.factorization = rho.factorization;
  out.factorization.labels.push_back(purifier_label);
  out.factorization.dims.push_back(rank);
  return out;
}

}  // namespace qdecon
