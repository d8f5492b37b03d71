#ifndef SERIATE_SERIATION_HPP
#define SERIATE_SERIATION_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "seriate/errors.hpp"
#include "seriate/graph.hpp"
#include "seriate/pqtree.hpp"
#include "seriate/spectral.hpp"

namespace seriate {

// Outcome of a seriation run. The tree's frontier is a permutation of {1..n}.
// is_pre_r_certified means every Fiedler value met during the recursion was
// simple and every branch finished normally; it excludes M-nodes by
// construction.
struct SeriationResult {
  PQTree tree;
  bool has_mnode = false;
  bool is_pre_r_certified = false;
};

// Subtract the global minimum so the smallest entry becomes 0. Leaves the
// Fiedler vectors unchanged. Sparse storage survives only the no-op case;
// shifting by a nonzero constant fills the matrix, so the result goes dense.
inline SymMatrix translate(const SymMatrix& f) {
  const double alpha = f.min_coeff();
  if (alpha == 0.0) return f;
  const int n = f.size();
  Eigen::MatrixXd out = f.to_dense().array() - alpha;
  // clamp tiny negatives from the subtraction
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (out(i, j) < 0.0 && out(i, j) > -1e-30) out(i, j) = 0.0;
  return SymMatrix::dense(std::move(out));
}

namespace detail {

inline std::string index_set_string(const std::vector<int>& units) {
  std::string s = "{";
  for (std::size_t i = 0; i < units.size() && i < 16; ++i) {
    if (i) s += ",";
    s += std::to_string(units[i]);
  }
  if (units.size() > 16) s += ",...";
  return s + "}";
}

// One recursion step of the spectral sort on the submatrix `f`, whose rows
// map to global unit ids through `units` (1-based, ascending within a call).
inline PQTree spectral_sort_step(const SymMatrix& f, const std::vector<int>& units,
                                 const SerOptions& opts, int depth, int depth_cap,
                                 bool& saw_mnode) {
  if (depth > depth_cap)
    throw contract_error("seriation recursion exceeded depth " +
                         std::to_string(depth_cap));
  try {
    std::optional<SymMatrix> translated;
    if (opts.translate) translated = translate(f);
    const SymMatrix& cur = translated ? *translated : f;
    const ComponentList comps = components(cur);
    if (comps.size() > 1) {
      std::vector<PQTree> children;
      children.reserve(comps.size());
      for (const std::vector<int>& comp : comps) {
        std::vector<int> idx, sub_units;
        idx.reserve(comp.size());
        sub_units.reserve(comp.size());
        for (int u : comp) {
          idx.push_back(u - 1);
          sub_units.push_back(units[static_cast<std::size_t>(u - 1)]);
        }
        if (comp.size() == 1) {
          children.push_back(PQTree::leaf(sub_units[0]));
        } else {
          children.push_back(spectral_sort_step(cur.submatrix(idx), sub_units,
                                                opts, depth + 1, depth_cap,
                                                saw_mnode));
        }
      }
      return PQTree::pnode(std::move(children));
    }

    const int n = cur.size();
    if (n == 1) return PQTree::leaf(units[0]);
    if (n == 2) return PQTree::pnode({PQTree::leaf(units[0]), PQTree::leaf(units[1])});

    const Laplacian lap = laplacian(cur);
    const FiedlerResult fr = fiedler(lap, opts);
    if (fr.multiplicity > 1) {
      saw_mnode = true;
      return PQTree::mnode(units);
    }

    const DistinctGroups groups = distinct(fr.vectors.col(0), opts.tau);
    if (groups.groups.size() == 1) {
      // every Fiedler entry equal within tau: nothing to order by
      saw_mnode = true;
      return PQTree::mnode(units);
    }

    std::vector<PQTree> children;
    children.reserve(groups.groups.size());
    for (const std::vector<int>& g : groups.groups) {
      if (g.size() == 1) {
        children.push_back(PQTree::leaf(units[static_cast<std::size_t>(g[0] - 1)]));
        continue;
      }
      std::vector<int> idx, sub_units;
      idx.reserve(g.size());
      sub_units.reserve(g.size());
      std::vector<int> sorted_g(g);
      std::sort(sorted_g.begin(), sorted_g.end());
      for (int local : sorted_g) {
        idx.push_back(local - 1);
        sub_units.push_back(units[static_cast<std::size_t>(local - 1)]);
      }
      children.push_back(spectral_sort_step(cur.submatrix(idx), sub_units, opts,
                                            depth + 1, depth_cap, saw_mnode));
    }
    // two tie groups admit exactly {forward, reverse}, which is P-node
    // semantics; a Q-node would be improper at arity 2
    if (children.size() == 2) return PQTree::pnode(std::move(children));
    return PQTree::qnode(std::move(children));
  } catch (error& e) {
    e.add_context("at index set " + index_set_string(units));
    throw;
  }
}

inline std::vector<int> iota_units(int n) {
  std::vector<int> units(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) units[static_cast<std::size_t>(i)] = i + 1;
  return units;
}

inline void check_nonnegative_input(const SymMatrix& f, const SerOptions& opts) {
  if (!opts.translate && f.min_coeff() < 0.0)
    throw contract_error(
        "similarity matrix has negative entries and translation is off");
}

}  // namespace detail

// Recursive spectral sort: translate, split into connected components,
// order each irreducible block by its Fiedler vector, recurse into groups of
// equal vector entries, and flag multiple Fiedler values as M-nodes.
inline SeriationResult spectral_sort(const SymMatrix& f,
                                     const SerOptions& opts = {}) {
  opts.validate();
  detail::check_nonnegative_input(f, opts);
  const int n = f.size();
  bool saw_mnode = false;
  PQTree tree = detail::spectral_sort_step(f, detail::iota_units(n), opts, 0,
                                           std::max(n, 8), saw_mnode);
  return SeriationResult{std::move(tree), saw_mnode, !saw_mnode};
}

// Same tree as spectral_sort, with the top-level connected components
// processed by a pool of `workers` threads. Children are assembled by
// component position, so the result is identical to the sequential run.
// The first error in component order wins; pending components are skipped.
inline SeriationResult parallel_spectral_sort(const SymMatrix& f,
                                              const SerOptions& opts,
                                              int workers) {
  opts.validate();
  if (workers < 1) throw contract_error("workers must be >= 1");
  detail::check_nonnegative_input(f, opts);

  const int n = f.size();
  const std::vector<int> units = detail::iota_units(n);
  std::optional<SymMatrix> translated;
  if (opts.translate) translated = translate(f);
  const SymMatrix& cur = translated ? *translated : f;
  const ComponentList comps = components(cur);

  if (comps.size() <= 1) return spectral_sort(f, opts);

  struct Task {
    SymMatrix matrix;
    std::vector<int> units;
    PQTree result = PQTree::leaf(0);
    bool mnode = false;
    std::exception_ptr failure;
  };
  std::vector<Task> tasks;
  tasks.reserve(comps.size());
  for (const std::vector<int>& comp : comps) {
    std::vector<int> idx, sub_units;
    for (int u : comp) {
      idx.push_back(u - 1);
      sub_units.push_back(units[static_cast<std::size_t>(u - 1)]);
    }
    tasks.push_back(Task{cur.submatrix(idx), std::move(sub_units)});
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> cancelled{false};
  const int depth_cap = std::max(n, 8);
  auto run = [&]() {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= tasks.size() || cancelled.load()) return;
      Task& t = tasks[k];
      try {
        if (t.units.size() == 1) {
          t.result = PQTree::leaf(t.units[0]);
        } else {
          t.result = detail::spectral_sort_step(t.matrix, t.units, opts, 1,
                                                depth_cap, t.mnode);
        }
      } catch (...) {
        t.failure = std::current_exception();
        cancelled.store(true);
      }
    }
  };

  const int nthreads = std::min<int>(workers, static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(run);
  for (std::thread& t : pool) t.join();

  for (Task& t : tasks)
    if (t.failure) std::rethrow_exception(t.failure);
  if (cancelled.load())
    throw contract_error("parallel seriation was cancelled without a recorded error");

  bool saw_mnode = false;
  std::vector<PQTree> children;
  children.reserve(tasks.size());
  for (Task& t : tasks) {
    saw_mnode = saw_mnode || t.mnode;
    children.push_back(std::move(t.result));
  }
  PQTree tree = PQTree::pnode(std::move(children));
  return SeriationResult{std::move(tree), saw_mnode, !saw_mnode};
}

// Seriation of a units x types data matrix through its similarity S = A A^T.
inline SeriationResult seriate(const DataMatrix& a, const SerOptions& opts = {}) {
  return spectral_sort(similarity(a), opts);
}

// Orderings reachable from a multiple Fiedler value: draw random coefficient
// vectors, combine the orthonormal eigenspace basis, argsort each combination
// and keep the distinct permutations. Requires multiplicity >= 2.
inline std::set<Permutation> sample_mnode_perms(const SymMatrix& f,
                                                int n_samples,
                                                std::uint64_t seed,
                                                const SerOptions& opts = {}) {
  opts.validate();
  if (n_samples < 1) throw contract_error("n_samples must be >= 1");
  const Laplacian lap = laplacian(f);
  const FiedlerResult fr = fiedler(lap, opts);
  if (fr.multiplicity < 2)
    throw contract_error("Fiedler value is simple: nothing to sample");

  const int n = f.size();
  const int m = fr.multiplicity;
  detail::rng64 rng(seed);
  std::set<Permutation> out;
  Eigen::VectorXd coeff(m), v(n);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int s = 0; s < n_samples; ++s) {
    for (int c = 0; c < m; ++c) coeff[c] = detail::gauss(rng);
    v = fr.vectors * coeff;
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i + 1;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return v[a - 1] < v[b - 1]; });
    out.insert(Permutation(order));
  }
  return out;
}

}  // namespace seriate

#endif  // SERIATE_SERIATION_HPP
