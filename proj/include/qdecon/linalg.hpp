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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#ifdef QDECON_HAVE_LAPACKE
#include <lapacke.h>
#endif

namespace qdecon {

using Complex = std::complex<double>;

// All matrices are dense, complex, row-major.  Subsystem indexing is
// big-endian: the first label in a factorization varies slowest.
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

// Shared numerical policy.
inline constexpr double kHermitianTol = 1e-10;   // max |X - X^dag| tolerated
inline constexpr double kEigenvalueClip = 1e-10; // below -clip is an error
inline constexpr double kSupportCutoff = 1e-12;  // spectrum <= cutoff: no support
inline constexpr double kChannelTol = 1e-9;      // TP / CP slack for channels

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent user input (bad labels, dims, files, spectra).
class InputError : public Error {
 public:
  using Error::Error;
};

// Request exceeds a documented dimension cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

inline double max_abs(const ComplexMatrix& x) {
  if (x.size() == 0) return 0.0;
  return x.cwiseAbs().maxCoeff();
}

inline ComplexMatrix identity_matrix(int d) {
  return ComplexMatrix::Identity(d, d);
}

inline ComplexMatrix zero_matrix(int rows, int cols) {
  return ComplexMatrix::Zero(rows, cols);
}

// An ordered list of labeled subsystems.  Defines the tensor index layout of
// every matrix that carries one: row index = sum_k i_k * stride_k with the
// last subsystem contiguous.
struct Factorization {
  std::vector<std::string> labels;
  std::vector<int> dims;

  Factorization() = default;
  Factorization(std::vector<std::string> l, std::vector<int> d)
      : labels(std::move(l)), dims(std::move(d)) {}

  std::size_t size() const { return labels.size(); }

  long total_dim() const {
    long d = 1;
    for (int k : dims) d *= k;
    return d;
  }

  void check() const {
    if (labels.size() != dims.size())
      throw InputError("factorization: labels/dims length mismatch");
    if (labels.empty()) throw InputError("factorization: empty");
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i].empty()) throw InputError("factorization: empty label");
      if (dims[i] < 1)
        throw InputError("factorization: dimension < 1 for label '" +
                         labels[i] + "'");
      for (std::size_t j = i + 1; j < labels.size(); ++j)
        if (labels[i] == labels[j])
          throw InputError("factorization: duplicate label '" + labels[i] +
                           "'");
    }
  }

  bool has_label(const std::string& l) const {
    return std::find(labels.begin(), labels.end(), l) != labels.end();
  }

  int index_of(const std::string& l) const {
    auto it = std::find(labels.begin(), labels.end(), l);
    if (it == labels.end())
      throw InputError("unknown subsystem label '" + l + "'");
    return static_cast<int>(it - labels.begin());
  }

  int dim_of(const std::string& l) const { return dims[index_of(l)]; }

  // Positions of the given labels, each must exist and appear once.
  std::vector<int> positions_of(const std::vector<std::string>& ls) const {
    std::vector<int> pos;
    pos.reserve(ls.size());
    for (const auto& l : ls) {
      int p = index_of(l);
      if (std::find(pos.begin(), pos.end(), p) != pos.end())
        throw InputError("repeated subsystem label '" + l + "'");
      pos.push_back(p);
    }
    return pos;
  }

  // Sub-factorization of `keep` in this factorization's own order.
  Factorization restricted(const std::vector<std::string>& keep) const {
    std::vector<int> pos = positions_of(keep);
    std::sort(pos.begin(), pos.end());
    Factorization out;
    for (int p : pos) {
      out.labels.push_back(labels[p]);
      out.dims.push_back(dims[p]);
    }
    return out;
  }

  // Sub-factorization of `ls` in the order given.
  Factorization selected(const std::vector<std::string>& ls) const {
    std::vector<int> pos = positions_of(ls);
    Factorization out;
    for (int p : pos) {
      out.labels.push_back(labels[p]);
      out.dims.push_back(dims[p]);
    }
    return out;
  }

  // Labels not in `ls`, in this factorization's order.
  std::vector<std::string> complement(const std::vector<std::string>& ls) const {
    std::vector<int> pos = positions_of(ls);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (std::find(pos.begin(), pos.end(), static_cast<int>(i)) == pos.end())
        out.push_back(labels[i]);
    return out;
  }

  long dim_of_labels(const std::vector<std::string>& ls) const {
    long d = 1;
    for (const auto& l : ls) d *= dim_of(l);
    return d;
  }

  bool operator==(const Factorization& o) const {
    return labels == o.labels && dims == o.dims;
  }
};

namespace detail {

// Row-major strides: stride of the last subsystem is 1.
inline std::vector<long> strides(const std::vector<int>& dims) {
  std::vector<long> s(dims.size(), 1);
  for (int i = static_cast<int>(dims.size()) - 2; i >= 0; --i)
    s[i] = s[i + 1] * dims[i + 1];
  return s;
}

// Global-index offsets reached by sweeping the subsystems at `positions`
// (compact index counts row-major over them, all other subsystems fixed at 0).
inline std::vector<long> subset_offsets(const Factorization& f,
                                        const std::vector<int>& positions) {
  const std::vector<long> st = strides(f.dims);
  long count = 1;
  for (int p : positions) count *= f.dims[p];
  std::vector<long> offs(static_cast<std::size_t>(count), 0);
  std::vector<int> idx(positions.size(), 0);
  for (long c = 0; c < count; ++c) {
    long g = 0;
    for (std::size_t k = 0; k < positions.size(); ++k)
      g += static_cast<long>(idx[k]) * st[static_cast<std::size_t>(positions[k])];
    offs[static_cast<std::size_t>(c)] = g;
    for (int k = static_cast<int>(positions.size()) - 1; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] <
          f.dims[static_cast<std::size_t>(positions[static_cast<std::size_t>(k)])])
        break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  return offs;
}

inline void check_square_matches(const ComplexMatrix& x, const Factorization& f,
                                 const char* op) {
  f.check();
  if (x.rows() != x.cols())
    throw InputError(std::string(op) + ": matrix not square");
  if (x.rows() != f.total_dim())
    throw InputError(std::string(op) +
                     ": matrix dimension does not match factorization");
}

}  // namespace detail

// Kronecker product; the first argument's indices are outermost.
inline ComplexMatrix tensor_product(const ComplexMatrix& a,
                                    const ComplexMatrix& b) {
  ComplexMatrix out = Eigen::kroneckerProduct(a, b);
  return out;
}

// Trace out all subsystems not listed in `keep`.  The result lives on the
// kept subsystems in the factorization's own label order.
inline ComplexMatrix partial_trace(const ComplexMatrix& x,
                                   const Factorization& f,
                                   const std::vector<std::string>& keep) {
  detail::check_square_matches(x, f, "partial_trace");
  if (keep.empty()) throw InputError("partial_trace: empty keep set");
  std::vector<int> kept = f.positions_of(keep);
  std::sort(kept.begin(), kept.end());
  std::vector<int> traced;
  for (int i = 0; i < static_cast<int>(f.size()); ++i)
    if (std::find(kept.begin(), kept.end(), i) == kept.end())
      traced.push_back(i);

  const std::vector<long> ko = detail::subset_offsets(f, kept);
  const std::vector<long> to = detail::subset_offsets(f, traced);
  const long dk = static_cast<long>(ko.size());

  ComplexMatrix out = zero_matrix(static_cast<int>(dk), static_cast<int>(dk));
  for (long i = 0; i < dk; ++i)
    for (long j = 0; j < dk; ++j) {
      Complex acc(0.0, 0.0);
      for (long t : to) acc += x(ko[static_cast<std::size_t>(i)] + t,
                                 ko[static_cast<std::size_t>(j)] + t);
      out(i, j) = acc;
    }
  return out;
}

// Reorder subsystems.  `order` must be a permutation of f.labels; the result
// is the same operator expressed in the permuted index layout.  Works for
// arbitrary (not necessarily Hermitian) operators.
inline ComplexMatrix permute_subsystems(const ComplexMatrix& x,
                                        const Factorization& f,
                                        const std::vector<std::string>& order) {
  detail::check_square_matches(x, f, "permute_subsystems");
  if (order.size() != f.size())
    throw InputError("permute_subsystems: order is not a permutation");
  std::vector<int> pos = f.positions_of(order);

  const std::vector<long> old_st = detail::strides(f.dims);
  std::vector<int> new_dims(order.size());
  for (std::size_t k = 0; k < order.size(); ++k)
    new_dims[k] = f.dims[static_cast<std::size_t>(pos[k])];

  const long d = f.total_dim();
  std::vector<long> map(static_cast<std::size_t>(d));
  std::vector<int> idx(order.size(), 0);
  for (long c = 0; c < d; ++c) {
    long g = 0;
    for (std::size_t k = 0; k < order.size(); ++k)
      g += static_cast<long>(idx[k]) * old_st[static_cast<std::size_t>(pos[k])];
    map[static_cast<std::size_t>(c)] = g;
    for (int k = static_cast<int>(order.size()) - 1; k >= 0; --k) {
      if (++idx[static_cast<std::size_t>(k)] < new_dims[static_cast<std::size_t>(k)])
        break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }

  ComplexMatrix out(d, d);
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j)
      out(i, j) = x(map[static_cast<std::size_t>(i)],
                    map[static_cast<std::size_t>(j)]);
  return out;
}

struct HermEig {
  RealVector values;      // descending
  ComplexMatrix vectors;  // columns, matching `values`
};

namespace detail {

#ifdef QDECON_HAVE_LAPACKE
// Divide-and-conquer Hermitian solver; noticeably faster than the
// tridiagonal QL iteration above dimension ~16.  Returns false on any
// LAPACK failure so the caller can fall back.
inline bool herm_eig_lapacke(const ComplexMatrix& h, RealVector& values,
                             ComplexMatrix& vectors) {
  const lapack_int n = static_cast<lapack_int>(h.rows());
  vectors = h;
  values.resize(n);
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_ROW_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(vectors.data()), n,
      values.data());
  return info == 0;
}
#endif

}  // namespace detail

// Eigendecomposition of a Hermitian matrix.  Rejects inputs whose
// anti-Hermitian part exceeds `tol`; symmetrizes before solving.
inline HermEig herm_eig(const ComplexMatrix& x, double tol = kHermitianTol) {
  if (x.rows() != x.cols()) throw InputError("herm_eig: matrix not square");
  const double drift = max_abs(ComplexMatrix(x - x.adjoint()));
  if (drift > tol)
    throw InputError("herm_eig: matrix not Hermitian (drift " +
                     std::to_string(drift) + ")");
  ComplexMatrix h = 0.5 * (x + x.adjoint());
  HermEig out;
#ifdef QDECON_HAVE_LAPACKE
  RealVector w;
  ComplexMatrix v;
  if (detail::herm_eig_lapacke(h, w, v)) {
    out.values = w.reverse();
    out.vectors = v.rowwise().reverse();
    return out;
  }
#endif
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  if (es.info() != Eigen::Success)
    throw Error("herm_eig: eigensolver failed to converge");
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  return out;
}

enum class MatrixFunc { Sqrt, Log2, InvSqrt };

// Spectral function of a PSD matrix.  Eigenvalues in [-kEigenvalueClip, 0)
// are clipped to zero; more negative is an error.  Log2 and InvSqrt treat
// eigenvalues <= kSupportCutoff as outside the support (mapped to 0), which
// makes InvSqrt the pseudo-inverse square root.
inline ComplexMatrix matrix_func(const ComplexMatrix& x, MatrixFunc fn) {
  HermEig eig = herm_eig(x);
  RealVector w(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    double v = eig.values(i);
    if (v < -kEigenvalueClip)
      throw InputError("matrix_func: negative eigenvalue " + std::to_string(v));
    if (v < 0.0) v = 0.0;
    switch (fn) {
      case MatrixFunc::Sqrt:
        w(i) = std::sqrt(v);
        break;
      case MatrixFunc::Log2:
        w(i) = (v <= kSupportCutoff) ? 0.0 : std::log2(v);
        break;
      case MatrixFunc::InvSqrt:
        w(i) = (v <= kSupportCutoff) ? 0.0 : 1.0 / std::sqrt(v);
        break;
    }
  }
  ComplexVector wc = w.cast<Complex>();
  ComplexMatrix out = eig.vectors * wc.asDiagonal() * eig.vectors.adjoint();
  return out;
}

inline ComplexMatrix matrix_sqrt(const ComplexMatrix& x) {
  return matrix_func(x, MatrixFunc::Sqrt);
}

inline ComplexMatrix matrix_inv_sqrt(const ComplexMatrix& x) {
  return matrix_func(x, MatrixFunc::InvSqrt);
}

// Projector onto the kernel (complement of the support) of a PSD matrix.
inline ComplexMatrix kernel_projector(const ComplexMatrix& x) {
  HermEig eig = herm_eig(x);
  ComplexMatrix out = zero_matrix(static_cast<int>(x.rows()),
                                  static_cast<int>(x.cols()));
  for (Eigen::Index i = 0; i < eig.values.size(); ++i)
    if (eig.values(i) <= kSupportCutoff)
      out += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
  return out;
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& x) {
  return 0.5 * (x + x.adjoint());
}

}  // namespace qdecon
