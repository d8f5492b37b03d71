#ifndef SERIATE_SPECTRAL_HPP
#define SERIATE_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "seriate/detail/random.hpp"
#include "seriate/errors.hpp"
#include "seriate/graph.hpp"

namespace seriate {

// Tuning parameters for the seriation pipeline.
//
//   tau        tolerance separating "equal" from "different" values, used for
//              eigenvalue multiplicity and Fiedler-vector tie grouping.
//              Absolute, hence scale-sensitive: rescale the similarity matrix
//              if its entries are very large or very small.
//   translate  subtract the global minimum entry before each sort step
//   nlarge     below this size a dense-stored matrix gets the full
//              eigendecomposition; at or above it the iterative solver runs
//   neig       eigenpairs per iterative-solver window
//   force_large  when set, overrides the solver selection outright
//   perm_cap   enumeration limit for all_perms
//   seed       seed for randomized helpers (test-matrix generation, sampling)
struct SerOptions {
  double tau = 1e-8;
  bool translate = true;
  int nlarge = 1000;
  int neig = 3;
  std::optional<bool> force_large;
  std::uint64_t perm_cap = 1'000'000;
  std::optional<std::uint64_t> seed;

  void validate() const {
    if (!(tau > 0.0)) throw contract_error("tau must be positive");
    if (neig < 2) throw contract_error("neig must be at least 2");
    if (nlarge < 3) throw contract_error("nlarge must be at least 3");
  }
};

// Fiedler eigenpair data of a connected graph's Laplacian. `vectors` holds
// `multiplicity` orthonormal columns spanning the Fiedler eigenspace, each
// orthogonal to the all-ones vector.
struct FiedlerResult {
  double fiedler_value = 0.0;
  int multiplicity = 0;
  Eigen::MatrixXd vectors;
  int zero_multiplicity = 0;
};

// Sorted grouping of a vector's entries: values closer than tau (as
// consecutive sorted neighbors) share a group. Groups come back in ascending
// level order; indices are 1-based positions in the input vector; a group's
// level is its smallest member value.
struct DistinctGroups {
  std::vector<std::vector<int>> groups;
  std::vector<double> levels;
};

inline DistinctGroups distinct(const Eigen::VectorXd& x, double tau) {
  DistinctGroups out;
  const int n = static_cast<int>(x.size());
  if (n == 0) return out;
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return x[a] < x[b]; });
  std::vector<int> group{order[0] + 1};
  double level = x[order[0]];
  double prev = x[order[0]];
  for (int k = 1; k < n; ++k) {
    const int i = order[static_cast<std::size_t>(k)];
    if (x[i] - prev < tau) {
      group.push_back(i + 1);
    } else {
      out.groups.push_back(std::move(group));
      out.levels.push_back(level);
      group = {i + 1};
      level = x[i];
    }
    prev = x[i];
  }
  out.groups.push_back(std::move(group));
  out.levels.push_back(level);
  return out;
}

namespace detail {

// Flip sign so that the first entry (in index order) of magnitude above tau
// is positive; keeps the two reading directions deterministic run to run.
inline void canonicalize_sign(Eigen::Ref<Eigen::VectorXd> v, double tau) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > tau) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

inline double laplacian_scale(const Laplacian& l) {
  // ||L||_inf; row sums of |entries| are at most twice the degree
  double scale = 0.0;
  for (Eigen::Index i = 0; i < l.degrees.size(); ++i)
    scale = std::max(scale, 2.0 * l.degrees[i]);
  return std::max(scale, 1.0);
}

struct EigenPairs {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // column k pairs with values[k]
};

// Smallest eigenpairs of L restricted to the complement of span{e}, by
// shift-invert Lanczos with sequential deflation: one Lanczos run per
// eigenpair, each deflating e/sqrt(n) and every converged vector. A single
// Krylov sequence cannot separate copies of a repeated eigenvalue, so
// multiplicities are recovered by the deflation rounds rather than by one
// wide run.
inline EigenPairs smallest_eigenpairs_deflated(const Laplacian& lap, int count,
                                               long max_total_iters) {
  const int n = lap.size();
  const double scale = laplacian_scale(lap);
  const double sigma = std::max(1e-4 * lap.degrees.mean(), 1e-12 * scale);
  const double resid_tol = 1e-10 * scale;

  SparseMat shifted = lap.matrix.is_sparse()
                          ? SparseMat(lap.matrix.sparse_data())
                          : SparseMat(lap.matrix.to_dense().sparseView());
  for (int i = 0; i < n; ++i) shifted.coeffRef(i, i) += sigma;
  shifted.makeCompressed();
  Eigen::SimplicialLDLT<SparseMat> solver(shifted);
  if (solver.info() != Eigen::Success)
    throw convergence_error("factorization of the shifted Laplacian failed", 0);

  Eigen::MatrixXd deflation(n, count + 1);
  deflation.col(0) = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  int locked = 1;

  auto project_out = [&](Eigen::VectorXd& v) {
    for (int c = 0; c < locked; ++c)
      v -= deflation.col(c).dot(v) * deflation.col(c);
  };

  EigenPairs out;
  out.vectors.resize(n, count);
  long iters_used = 0;
  rng64 rng(0x5eb1a7e5eedULL);

  for (int round = 0; round < count; ++round) {
    const int dim_left = n - locked;
    const int m_max = std::min(dim_left, 300);

    Eigen::MatrixXd basis(n, m_max);
    std::vector<double> alpha, beta;  // Lanczos tridiagonal
    Eigen::VectorXd q(n);
    for (int i = 0; i < n; ++i) q[i] = gauss(rng);
    project_out(q);
    if (q.norm() < 1e-14) {
      for (int i = 0; i < n; ++i) q[i] = gauss(rng);
      project_out(q);
    }
    q.normalize();

    double theta = 0.0;
    Eigen::VectorXd ritz(n);
    bool converged = false;
    int m = 0;
    while (m < m_max) {
      basis.col(m) = q;
      Eigen::VectorXd w = solver.solve(q);
      project_out(w);
      const double a = q.dot(w);
      alpha.push_back(a);
      w -= a * q;
      if (m > 0) w -= beta.back() * basis.col(m - 1);
      // full reorthogonalization keeps the basis clean long enough to
      // resolve near-multiple shifted eigenvalues
      for (int c = 0; c <= m; ++c) w -= basis.col(c).dot(w) * basis.col(c);
      project_out(w);
      const double b = w.norm();
      ++m;
      ++iters_used;
      if (iters_used > max_total_iters)
        throw convergence_error("eigensolver exceeded the iteration budget",
                                iters_used);

      const bool breakdown = b < 1e-13;
      if (breakdown || m == m_max || m % 5 == 0) {
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) tri(i, i) = alpha[static_cast<std::size_t>(i)];
        for (int i = 0; i + 1 < m; ++i) {
          tri(i, i + 1) = beta[static_cast<std::size_t>(i)];
          tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        const int top = m - 1;  // largest theta = smallest Laplacian eigenvalue
        theta = es.eigenvalues()[top];
        ritz = basis.leftCols(m) * es.eigenvectors().col(top);
        ritz.normalize();
        const double lambda = 1.0 / theta - sigma;
        Eigen::VectorXd lv = lap.matrix.is_sparse()
                                 ? Eigen::VectorXd(lap.matrix.sparse_data() * ritz)
                                 : Eigen::VectorXd(lap.matrix.dense_data() * ritz);
        const double resid = (lv - lambda * ritz).norm();
        if (resid <= resid_tol || (breakdown && m >= 1) || m == m_max) {
          if (resid > resid_tol && !(breakdown || m == dim_left))
            throw convergence_error(
                "Lanczos did not reach the residual tolerance", iters_used);
          converged = true;
          break;
        }
      }
      beta.push_back(b);
      q = w / b;
    }
    if (!converged)
      throw convergence_error("Lanczos did not converge", iters_used);

    const double lambda = 1.0 / theta - sigma;
    out.values.push_back(lambda);
    out.vectors.col(round) = ritz;
    deflation.col(locked++) = ritz;
  }

  // Deflation rounds find eigenvalues in ascending order only up to the
  // convergence tolerance; return them properly sorted.
  std::vector<int> order(out.values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return out.values[static_cast<std::size_t>(a)] < out.values[static_cast<std::size_t>(b)];
  });
  EigenPairs sorted;
  sorted.vectors.resize(n, count);
  for (int k = 0; k < count; ++k) {
    sorted.values.push_back(out.values[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]);
    sorted.vectors.col(k) = out.vectors.col(order[static_cast<std::size_t>(k)]);
  }
  return sorted;
}

inline FiedlerResult fiedler_dense(const Laplacian& lap, const SerOptions& opts) {
  const int n = lap.size();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap.matrix.to_dense());
  if (es.info() != Eigen::Success)
    throw convergence_error("dense eigendecomposition failed", 0);
  const Eigen::VectorXd& w = es.eigenvalues();

  int zero_mult = 0;
  while (zero_mult < n && w[zero_mult] <= opts.tau) ++zero_mult;
  if (zero_mult == 0)
    throw contract_error("input is not a graph Laplacian: no zero eigenvalue");
  if (zero_mult >= 2)
    throw reducibility_error("Laplacian has " + std::to_string(zero_mult) +
                             " zero eigenvalues: the graph is disconnected");

  const double lambda_f = w[1];
  int mult = 1;
  while (1 + mult < n && w[1 + mult] - lambda_f < opts.tau) ++mult;

  FiedlerResult r;
  r.fiedler_value = lambda_f;
  r.multiplicity = mult;
  r.zero_multiplicity = 1;
  r.vectors = es.eigenvectors().middleCols(1, mult);
  // polish away any e-component, then restore orthonormality
  const Eigen::VectorXd e = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  for (int c = 0; c < mult; ++c) {
    Eigen::VectorXd v = r.vectors.col(c);
    v -= e.dot(v) * e;
    for (int p = 0; p < c; ++p)
      v -= r.vectors.col(p).dot(v) * r.vectors.col(p);
    r.vectors.col(c) = v.normalized();
  }
  for (int c = 0; c < mult; ++c)
    canonicalize_sign(r.vectors.col(c), opts.tau);
  return r;
}

inline FiedlerResult fiedler_iterative(const Laplacian& lap,
                                       const SerOptions& opts) {
  const int n = lap.size();
  const long max_total_iters = 10L * n;
  int window = std::min(std::max(opts.neig, 2), n - 1);

  for (;;) {
    EigenPairs pairs = smallest_eigenpairs_deflated(lap, window, max_total_iters);

    int extra_zeros = 0;
    while (extra_zeros < window && pairs.values[static_cast<std::size_t>(extra_zeros)] <= opts.tau)
      ++extra_zeros;
    if (extra_zeros >= 1)
      throw reducibility_error(
          "Laplacian has " + std::to_string(1 + extra_zeros) +
          " zero eigenvalues: the graph is disconnected");

    const double lambda_f = pairs.values[0];
    int mult = 1;
    while (mult < window && pairs.values[static_cast<std::size_t>(mult)] - lambda_f < opts.tau)
      ++mult;

    // A window entirely inside the Fiedler cluster cannot certify the
    // multiplicity unless it already spans the whole deflated space.
    if (mult == window && window < n - 1) {
      window = std::min(2 * window, n - 1);
      continue;
    }

    FiedlerResult r;
    r.fiedler_value = lambda_f;
    r.multiplicity = mult;
    r.zero_multiplicity = 1;
    r.vectors = pairs.vectors.leftCols(mult);
    for (int c = 0; c < mult; ++c)
      canonicalize_sign(r.vectors.col(c), opts.tau);
    return r;
  }
}

}  // namespace detail

// Fiedler value, its multiplicity within tau, and an orthonormal basis of the
// corresponding eigenspace. The dense path decomposes the whole Laplacian;
// the iterative path (sparse storage, size >= nlarge, or force_large) walks
// a small window of smallest eigenpairs and widens it until the multiplicity
// is certain. Disconnected input raises reducibility_error.
inline FiedlerResult fiedler(const Laplacian& lap, const SerOptions& opts = {}) {
  opts.validate();
  const int n = lap.size();
  if (n < 2) throw contract_error("fiedler needs a matrix of size >= 2");
  const bool iterative =
      opts.force_large.value_or(lap.matrix.is_sparse() || n >= opts.nlarge);
  if (!iterative || n < 4) return detail::fiedler_dense(lap, opts);
  return detail::fiedler_iterative(lap, opts);
}

}  // namespace seriate

#endif  // SERIATE_SPECTRAL_HPP
