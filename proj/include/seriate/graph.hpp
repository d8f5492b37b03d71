#ifndef SERIATE_GRAPH_HPP
#define SERIATE_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "seriate/errors.hpp"
#include "seriate/pqtree.hpp"

namespace seriate {

using SparseMat = Eigen::SparseMatrix<double>;

namespace detail {

inline double sparse_max_abs(const SparseMat& m) {
  double mx = 0.0;
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMat::InnerIterator it(m, k); it; ++it)
      mx = std::max(mx, std::abs(it.value()));
  return mx;
}

inline void check_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols())
    throw dimension_error("matrix is not square");
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     m.cwiseAbs().maxCoeff();
  const double dev = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (dev > tol)
    throw symmetry_error("matrix is asymmetric by " + std::to_string(dev));
}

inline void check_symmetric(const SparseMat& m) {
  if (m.rows() != m.cols())
    throw dimension_error("matrix is not square");
  const double tol =
      10.0 * std::numeric_limits<double>::epsilon() * sparse_max_abs(m);
  SparseMat diff = m - SparseMat(m.transpose());
  const double dev = sparse_max_abs(diff);
  if (dev > tol)
    throw symmetry_error("matrix is asymmetric by " + std::to_string(dev));
}

}  // namespace detail

// Rectangular units x types matrix, dense or sparse, with optional labels.
// Entries must be nonnegative and both dimensions at least 1.
class DataMatrix {
public:
  static DataMatrix dense(Eigen::MatrixXd entries,
                          std::vector<std::string> row_labels = {},
                          std::vector<std::string> col_labels = {}) {
    validate_dims(entries.rows(), entries.cols());
    if (entries.size() > 0 && entries.minCoeff() < 0.0)
      throw contract_error("data matrix entries must be nonnegative");
    return DataMatrix(std::move(entries), std::move(row_labels),
                      std::move(col_labels));
  }

  static DataMatrix sparse(SparseMat entries,
                           std::vector<std::string> row_labels = {},
                           std::vector<std::string> col_labels = {}) {
    validate_dims(entries.rows(), entries.cols());
    for (int k = 0; k < entries.outerSize(); ++k)
      for (SparseMat::InnerIterator it(entries, k); it; ++it)
        if (it.value() < 0.0)
          throw contract_error("data matrix entries must be nonnegative");
    entries.makeCompressed();
    return DataMatrix(std::move(entries), std::move(row_labels),
                      std::move(col_labels));
  }

  int rows() const {
    return is_sparse() ? static_cast<int>(std::get<SparseMat>(storage_).rows())
                       : static_cast<int>(std::get<Eigen::MatrixXd>(storage_).rows());
  }
  int cols() const {
    return is_sparse() ? static_cast<int>(std::get<SparseMat>(storage_).cols())
                       : static_cast<int>(std::get<Eigen::MatrixXd>(storage_).cols());
  }
  bool is_sparse() const { return std::holds_alternative<SparseMat>(storage_); }

  double coeff(int i, int j) const {
    return is_sparse() ? std::get<SparseMat>(storage_).coeff(i, j)
                       : std::get<Eigen::MatrixXd>(storage_)(i, j);
  }

  const Eigen::MatrixXd& dense_data() const {
    return std::get<Eigen::MatrixXd>(storage_);
  }
  const SparseMat& sparse_data() const { return std::get<SparseMat>(storage_); }

  Eigen::MatrixXd to_dense() const {
    return is_sparse() ? Eigen::MatrixXd(std::get<SparseMat>(storage_))
                       : std::get<Eigen::MatrixXd>(storage_);
  }

  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& col_labels() const { return col_labels_; }

private:
  template <typename S>
  DataMatrix(S storage, std::vector<std::string> rl, std::vector<std::string> cl)
      : storage_(std::move(storage)),
        row_labels_(std::move(rl)),
        col_labels_(std::move(cl)) {
    if (!row_labels_.empty() &&
        row_labels_.size() != static_cast<std::size_t>(rows()))
      throw dimension_error("row label count does not match row count");
    if (!col_labels_.empty() &&
        col_labels_.size() != static_cast<std::size_t>(cols()))
      throw dimension_error("column label count does not match column count");
  }

  static void validate_dims(Eigen::Index r, Eigen::Index c) {
    if (r < 1 || c < 1) throw dimension_error("matrix dimensions must be >= 1");
  }

  std::variant<Eigen::MatrixXd, SparseMat> storage_;
  std::vector<std::string> row_labels_;
  std::vector<std::string> col_labels_;
};

// Square symmetric matrix, dense or sparse. Symmetry is checked on
// construction within 10*eps*max|entry|; entries are stored as given.
class SymMatrix {
public:
  static SymMatrix dense(Eigen::MatrixXd entries) {
    if (entries.rows() < 1) throw dimension_error("matrix dimensions must be >= 1");
    detail::check_symmetric(entries);
    return SymMatrix(std::move(entries));
  }

  static SymMatrix sparse(SparseMat entries) {
    if (entries.rows() < 1) throw dimension_error("matrix dimensions must be >= 1");
    detail::check_symmetric(entries);
    entries.makeCompressed();
    return SymMatrix(std::move(entries));
  }

  int size() const {
    return is_sparse() ? static_cast<int>(std::get<SparseMat>(storage_).rows())
                       : static_cast<int>(std::get<Eigen::MatrixXd>(storage_).rows());
  }
  bool is_sparse() const { return std::holds_alternative<SparseMat>(storage_); }

  double coeff(int i, int j) const {
    return is_sparse() ? std::get<SparseMat>(storage_).coeff(i, j)
                       : std::get<Eigen::MatrixXd>(storage_)(i, j);
  }

  const Eigen::MatrixXd& dense_data() const {
    return std::get<Eigen::MatrixXd>(storage_);
  }
  const SparseMat& sparse_data() const { return std::get<SparseMat>(storage_); }

  Eigen::MatrixXd to_dense() const {
    return is_sparse() ? Eigen::MatrixXd(std::get<SparseMat>(storage_))
                       : std::get<Eigen::MatrixXd>(storage_);
  }

  // Minimum over all n^2 entries; for sparse storage an absent entry counts
  // as 0.
  double min_coeff() const {
    if (!is_sparse()) return dense_data().minCoeff();
    const SparseMat& m = sparse_data();
    double mn = m.nonZeros() < static_cast<std::int64_t>(m.rows()) * m.cols()
                    ? 0.0
                    : std::numeric_limits<double>::infinity();
    for (int k = 0; k < m.outerSize(); ++k)
      for (SparseMat::InnerIterator it(m, k); it; ++it)
        mn = std::min(mn, it.value());
    return mn;
  }

  // Calls f(i, j, value) for every stored nonzero (both triangles for
  // sparse storage, full scan for dense).
  template <typename F>
  void for_each_nonzero(F&& f) const {
    if (is_sparse()) {
      const SparseMat& m = sparse_data();
      for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMat::InnerIterator it(m, k); it; ++it)
          if (it.value() != 0.0)
            f(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    } else {
      const Eigen::MatrixXd& m = dense_data();
      for (int j = 0; j < m.cols(); ++j)
        for (int i = 0; i < m.rows(); ++i)
          if (m(i, j) != 0.0) f(i, j, m(i, j));
    }
  }

  // Neighbors of 0-based row i in the graph of nonzero off-diagonal entries.
  template <typename F>
  void for_each_neighbor(int i, F&& f) const {
    if (is_sparse()) {
      // symmetric, so column i enumerates row i
      const SparseMat& m = sparse_data();
      for (SparseMat::InnerIterator it(m, i); it; ++it)
        if (it.row() != i && it.value() != 0.0) f(static_cast<int>(it.row()));
    } else {
      const Eigen::MatrixXd& m = dense_data();
      for (int j = 0; j < m.cols(); ++j)
        if (j != i && m(i, j) != 0.0) f(j);
    }
  }

  // Principal submatrix on the given 0-based indices, same storage kind.
  SymMatrix submatrix(const std::vector<int>& idx) const {
    const int m = static_cast<int>(idx.size());
    if (!is_sparse()) {
      Eigen::MatrixXd out(m, m);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) out(a, b) = dense_data()(idx[a], idx[b]);
      return SymMatrix(std::move(out));
    }
    std::vector<int> where(static_cast<std::size_t>(size()), -1);
    for (int a = 0; a < m; ++a) where[static_cast<std::size_t>(idx[a])] = a;
    std::vector<Eigen::Triplet<double>> trip;
    const SparseMat& src = sparse_data();
    for (int a = 0; a < m; ++a) {
      const int col = idx[a];
      for (SparseMat::InnerIterator it(src, col); it; ++it) {
        const int r = where[static_cast<std::size_t>(it.row())];
        if (r >= 0) trip.emplace_back(r, a, it.value());
      }
    }
    SparseMat out(m, m);
    out.setFromTriplets(trip.begin(), trip.end());
    out.makeCompressed();
    return SymMatrix(std::move(out));
  }

private:
  explicit SymMatrix(Eigen::MatrixXd m) : storage_(std::move(m)) {}
  explicit SymMatrix(SparseMat m) : storage_(std::move(m)) {}

  std::variant<Eigen::MatrixXd, SparseMat> storage_;
};

// L = D - F with d_i the full row sum of F, diagonal included; the net
// diagonal of L is therefore d_i - f_ii = sum of the off-diagonal row.
struct Laplacian {
  SymMatrix matrix;
  Eigen::VectorXd degrees;

  int size() const { return matrix.size(); }
};

// Index sets (1-based unit ids) partitioning {1..n}, each sorted ascending,
// listed by smallest member.
using ComponentList = std::vector<std::vector<int>>;

// S = A A^T. For 0/1 data s_ij counts the types shared by units i and j.
inline SymMatrix similarity(const DataMatrix& a) {
  if (a.is_sparse()) {
    const SparseMat& m = a.sparse_data();
    SparseMat s = (m * SparseMat(m.transpose())).pruned();
    // products of a matrix with its own transpose can come out asymmetric
    // by roundoff; rebuild the upper triangle from the lower
    SparseMat lower = s.triangularView<Eigen::Lower>();
    SparseMat sym = SparseMat(lower.transpose()).triangularView<Eigen::StrictlyUpper>();
    sym += lower;
    return SymMatrix::sparse(std::move(sym));
  }
  const Eigen::MatrixXd& m = a.dense_data();
  Eigen::MatrixXd s = m * m.transpose();
  s = ((s + s.transpose()) / 2.0).eval();
  return SymMatrix::dense(std::move(s));
}

inline Laplacian laplacian(const SymMatrix& f) {
  const int n = f.size();
  Eigen::VectorXd deg = Eigen::VectorXd::Zero(n);
  f.for_each_nonzero([&](int i, int, double v) {
    if (v < 0.0)
      throw contract_error("laplacian requires a nonnegative matrix");
    deg[i] += v;
  });
  if (!f.is_sparse()) {
    Eigen::MatrixXd l = -f.dense_data();
    for (int i = 0; i < n; ++i) l(i, i) += deg[i];
    return Laplacian{SymMatrix::dense(std::move(l)), std::move(deg)};
  }
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(f.sparse_data().nonZeros()) + static_cast<std::size_t>(n));
  f.for_each_nonzero([&](int i, int j, double v) {
    if (i != j) trip.emplace_back(i, j, -v);
  });
  for (int i = 0; i < n; ++i)
    trip.emplace_back(i, i, deg[i] - f.coeff(i, i));
  SparseMat l(n, n);
  l.setFromTriplets(trip.begin(), trip.end());
  l.makeCompressed();
  return Laplacian{SymMatrix::sparse(std::move(l)), std::move(deg)};
}

namespace detail {

// Iterative depth-first traversal; recursion depth would scale with the
// component size.
inline std::vector<int> visit_zero_based(const SymMatrix& f, int root,
                                         std::vector<char>& seen) {
  std::vector<int> stack{root};
  std::vector<int> comp;
  seen[static_cast<std::size_t>(root)] = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    comp.push_back(u);
    f.for_each_neighbor(u, [&](int v) {
      if (!seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = 1;
        stack.push_back(v);
      }
    });
  }
  std::sort(comp.begin(), comp.end());
  return comp;
}

}  // namespace detail

// Connected components of the graph whose edges are the nonzero off-diagonal
// entries of f.
inline ComponentList components(const SymMatrix& f) {
  const int n = f.size();
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  ComponentList out;
  out.reserve(100);  // hint only; the list grows as far as needed
  for (int s = 0; s < n; ++s) {
    if (seen[static_cast<std::size_t>(s)]) continue;
    std::vector<int> comp = detail::visit_zero_based(f, s, seen);
    for (int& u : comp) ++u;
    out.push_back(std::move(comp));
  }
  return out;
}

// Connected component containing `root` (1-based), sorted ascending.
inline std::vector<int> visit(const SymMatrix& f, int root) {
  if (root < 1 || root > f.size())
    throw addressing_error("root index " + std::to_string(root) +
                           " outside 1.." + std::to_string(f.size()));
  std::vector<char> seen(static_cast<std::size_t>(f.size()), 0);
  std::vector<int> comp = detail::visit_zero_based(f, root - 1, seen);
  for (int& u : comp) ++u;
  return comp;
}

// Robinson form: rows nondecreasing toward the diagonal from the left,
// nonincreasing away from it to the right, with slack tau.
inline bool is_r_matrix(const SymMatrix& s, double tau = 0.0) {
  const int n = s.size();
  const Eigen::MatrixXd m = s.to_dense();
  for (int i = 0; i < n; ++i) {
    double runmax = -std::numeric_limits<double>::infinity();
    for (int k = 0; k <= i; ++k) {
      if (m(i, k) < runmax - tau) return false;
      runmax = std::max(runmax, m(i, k));
    }
    double runmin = std::numeric_limits<double>::infinity();
    for (int k = i; k < n; ++k) {
      if (m(i, k) > runmin + tau) return false;
      runmin = std::min(runmin, m(i, k));
    }
  }
  return true;
}

// Half-bandwidth: max |i-j| over nonzero entries.
inline int bandwidth(const SymMatrix& f) {
  int bw = 0;
  f.for_each_nonzero([&](int i, int j, double) {
    bw = std::max(bw, std::abs(i - j));
  });
  return bw;
}

// Simultaneous row/column reordering: result(i,j) = f(p[i], p[j]).
// p must be a permutation of {1..n}.
inline SymMatrix apply_perm(const SymMatrix& f, const Permutation& p) {
  const int n = f.size();
  if (static_cast<int>(p.size()) != n)
    throw dimension_error("permutation length " + std::to_string(p.size()) +
                          " does not match matrix size " + std::to_string(n));
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int u = p[static_cast<std::size_t>(i)];
    if (u < 1 || u > n)
      throw dimension_error("permutation entry " + std::to_string(u) +
                            " outside 1.." + std::to_string(n));
    idx[static_cast<std::size_t>(i)] = u - 1;
  }
  if (!f.is_sparse()) {
    Eigen::MatrixXd out(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        out(i, j) = f.dense_data()(idx[static_cast<std::size_t>(i)],
                                   idx[static_cast<std::size_t>(j)]);
    return SymMatrix::dense(std::move(out));
  }
  std::vector<int> pos(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = i;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(f.sparse_data().nonZeros()));
  f.for_each_nonzero([&](int i, int j, double v) {
    trip.emplace_back(pos[static_cast<std::size_t>(i)], pos[static_cast<std::size_t>(j)], v);
  });
  SparseMat out(n, n);
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return SymMatrix::sparse(std::move(out));
}

// Row reordering of a data matrix: result row i = a row p[i]. Row labels
// follow the rows.
inline DataMatrix apply_perm_rows(const DataMatrix& a, const Permutation& p) {
  const int n = a.rows();
  if (static_cast<int>(p.size()) != n)
    throw dimension_error("permutation length does not match row count");
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int u = p[static_cast<std::size_t>(i)];
    if (u < 1 || u > n)
      throw dimension_error("permutation entry " + std::to_string(u) +
                            " outside 1.." + std::to_string(n));
    idx[static_cast<std::size_t>(i)] = u - 1;
  }
  std::vector<std::string> labels;
  if (!a.row_labels().empty()) {
    labels.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      labels.push_back(a.row_labels()[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])]);
  }
  if (!a.is_sparse()) {
    Eigen::MatrixXd out(n, a.cols());
    for (int i = 0; i < n; ++i)
      out.row(i) = a.dense_data().row(idx[static_cast<std::size_t>(i)]);
    return DataMatrix::dense(std::move(out), std::move(labels), a.col_labels());
  }
  std::vector<int> pos(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pos[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])] = i;
  std::vector<Eigen::Triplet<double>> trip;
  const SparseMat& src = a.sparse_data();
  for (int k = 0; k < src.outerSize(); ++k)
    for (SparseMat::InnerIterator it(src, k); it; ++it)
      trip.emplace_back(pos[static_cast<std::size_t>(it.row())],
                        static_cast<int>(it.col()), it.value());
  SparseMat out(n, a.cols());
  out.setFromTriplets(trip.begin(), trip.end());
  out.makeCompressed();
  return DataMatrix::sparse(std::move(out), std::move(labels), a.col_labels());
}

// Elementwise absolute value, same storage kind.
inline SymMatrix abs_entries(const SymMatrix& f) {
  if (!f.is_sparse()) return SymMatrix::dense(f.dense_data().cwiseAbs());
  SparseMat m = f.sparse_data();
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMat::InnerIterator it(m, k); it; ++it)
      it.valueRef() = std::abs(it.value());
  return SymMatrix::sparse(std::move(m));
}

}  // namespace seriate

#endif  // SERIATE_GRAPH_HPP
