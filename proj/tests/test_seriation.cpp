#include <catch2/catch_amalgamated.hpp>

#include <numeric>

#include "seriate/io.hpp"
#include "seriate/seriation.hpp"
#include "test_helpers.hpp"

using namespace seriate;

namespace {

SymMatrix dense(const Eigen::MatrixXd& m) { return SymMatrix::dense(m); }

bool frontier_is(const SeriationResult& r, const std::vector<int>& order) {
  return r.tree.frontier().order() == order;
}

// map a result permutation of apply_perm(F, q) back to F's unit ids
Permutation relabel_through(const Permutation& p, const Permutation& q) {
  std::vector<int> out;
  out.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    out.push_back(q[static_cast<std::size_t>(p[i] - 1)]);
  return Permutation(std::move(out));
}

}  // namespace

TEST_CASE("translate shifts the minimum to zero") {
  const SymMatrix f = dense(testhelp::cycle_similarity());
  CHECK(translate(f).to_dense() == f.to_dense());  // min already 0

  const SymMatrix shifted =
      dense(testhelp::cycle_similarity().array() + 5.0);
  CHECK(translate(shifted).to_dense() == f.to_dense());

  CHECK(translate(translate(shifted)).to_dense() ==
        translate(shifted).to_dense());
}

TEST_CASE("spectral_sort reproduces the 10x10 worked example") {
  const SeriationResult r = spectral_sort(dense(testhelp::f10()));
  CHECK(r.tree.kind() == PQTree::Kind::Q);
  CHECK(r.tree.children().size() == 10);
  for (const PQTree& c : r.tree.children()) CHECK(c.is_leaf());
  CHECK(!r.has_mnode);
  CHECK(r.is_pre_r_certified);
  CHECK(nperm(r.tree) == 2);
  CHECK((frontier_is(r, testhelp::f10_order()) ||
         frontier_is(r, testhelp::f10_order_rev())));

  const std::set<Permutation> got = testhelp::perm_set(r.tree);
  const std::set<Permutation> want{Permutation(testhelp::f10_order()),
                                   Permutation(testhelp::f10_order_rev())};
  CHECK(got == want);

  // either ordering takes F back to the R matrix, entry for entry
  for (const Permutation& p : got)
    CHECK(apply_perm(dense(testhelp::f10()), p).to_dense() == testhelp::r10());
}

TEST_CASE("a diagonal matrix decomposes into leaves under a P node") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d.diagonal() << 3, 1, 2;
  const SeriationResult r = spectral_sort(dense(d));
  CHECK(r.tree == PQTree::pnode({1, 2, 3}));
  CHECK(r.is_pre_r_certified);
}

TEST_CASE("tiny inputs") {
  const SeriationResult one =
      spectral_sort(dense(Eigen::MatrixXd::Constant(1, 1, 7.0)));
  CHECK(one.tree == PQTree::leaf(1));

  Eigen::MatrixXd two(2, 2);
  two << 2, 1, 1, 2;
  const SeriationResult r = spectral_sort(dense(two));
  CHECK(r.tree == PQTree::pnode({1, 2}));
}

TEST_CASE("a multiple Fiedler value yields an M node over the index set") {
  const SeriationResult r = spectral_sort(dense(testhelp::cycle_similarity()));
  CHECK(r.tree == PQTree::mnode({1, 2, 3, 4, 5}));
  CHECK(r.has_mnode);
  CHECK(!r.is_pre_r_certified);
}

TEST_CASE("two tie groups become a P node") {
  // duplicate pairs: the Fiedler vector takes two values, each twice
  Eigen::MatrixXd f(4, 4);
  f << 2, 2, 1, 1,
       2, 2, 1, 1,
       1, 1, 2, 2,
       1, 1, 2, 2;
  const SeriationResult r = spectral_sort(dense(f));
  CHECK(r.tree == PQTree::pnode({PQTree::pnode({1, 2}), PQTree::pnode({3, 4})}));
  CHECK(r.is_pre_r_certified);
  CHECK(testhelp::perm_set(r.tree) ==
        testhelp::brute_force_r_orderings(dense(f)));
}

TEST_CASE("seriate drives the similarity pipeline") {
  const SeriationResult id =
      seriate::seriate(DataMatrix::dense(Eigen::MatrixXd::Identity(4, 4)));
  CHECK(id.tree == PQTree::pnode({1, 2, 3, 4}));

  const SeriationResult cyc =
      seriate::seriate(DataMatrix::dense(testhelp::cycle_incidence()));
  CHECK(cyc.tree == PQTree::mnode({1, 2, 3, 4, 5}));
}

TEST_CASE("the permuted burial table comes back as a single Q node") {
  const DataMatrix a = bornholm();
  detail::rng64 rng(12345);
  const Permutation rowperm(detail::random_permutation(a.rows(), rng));
  const DataMatrix shuffled = apply_perm_rows(a, rowperm);
  const SeriationResult r = seriate::seriate(shuffled);
  CHECK(r.tree.kind() == PQTree::Kind::Q);
  CHECK(r.tree.children().size() == 11);
  for (const PQTree& c : r.tree.children()) CHECK(c.is_leaf());
  CHECK(r.is_pre_r_certified);

  const SymMatrix s = similarity(shuffled);
  const int before = bandwidth(similarity(a));
  const int after = bandwidth(apply_perm(s, one_perm(r.tree)));
  CHECK(after <= before);
}

TEST_CASE("a simple Fiedler value with indistinguishable entries becomes an M node") {
  // scaling the matrix blows up eigenvalue gaps while the unit-norm Fiedler
  // vector keeps entries below 1, so tau = 1 merges them into a single group
  const SymMatrix f = dense(testhelp::f10() * 1e12);
  SerOptions opts;
  opts.tau = 1.0;
  const SeriationResult r = spectral_sort(f, opts);
  CHECK(r.tree.kind() == PQTree::Kind::M);
  CHECK(r.has_mnode);
  CHECK(!r.is_pre_r_certified);
}

TEST_CASE("errors from the recursion carry the index set") {
  SerOptions opts;
  opts.tau = 100.0;  // every eigenvalue collapses into the zero group
  try {
    spectral_sort(dense(testhelp::cycle_similarity()), opts);
    FAIL("expected reducibility_error");
  } catch (const reducibility_error& e) {
    CHECK(std::string(e.what()).find("at index set {1,2,3,4,5}") !=
          std::string::npos);
  }
}

TEST_CASE("negative entries require translation") {
  Eigen::MatrixXd m(2, 2);
  m << 1, -1, -1, 1;
  SerOptions opts;
  opts.translate = false;
  CHECK_THROWS_AS(spectral_sort(dense(m), opts), contract_error);
  CHECK_NOTHROW(spectral_sort(dense(m)));
}

TEST_CASE("sampling the cycle eigenspace finds exactly ten orderings") {
  const SymMatrix f = dense(testhelp::cycle_similarity());
  const std::set<Permutation> got = sample_mnode_perms(f, 10000, 20260809);

  std::set<Permutation> want;
  for (const auto& o : testhelp::cycle_sampled_orders()) want.insert(Permutation(o));
  REQUIRE(want.size() == 10);
  CHECK(got == want);

  // five orderings once each reversal is identified with its partner
  std::set<Permutation> canon;
  for (const Permutation& p : got) canon.insert(std::min(p, p.reversed()));
  CHECK(canon.size() == 5);

  // every sampled ordering produces the same reordered matrix
  for (const Permutation& p : got)
    CHECK(apply_perm(f, p).to_dense() == testhelp::cycle_reordered());

  CHECK(sample_mnode_perms(f, 1, 7).size() == 1);
}

TEST_CASE("sampling requires a multiple Fiedler value") {
  CHECK_THROWS_AS(sample_mnode_perms(dense(testhelp::f10()), 10, 1),
                  contract_error);
}

TEST_CASE("parallel runs produce the sequential tree") {
  const TestMatrix tm = test_matrix({64, 8, 2, true, 5});
  const SeriationResult seq = spectral_sort(tm.matrix);
  for (int workers : {1, 2, 4, 8}) {
    const SeriationResult par = parallel_spectral_sort(tm.matrix, {}, workers);
    CHECK(par.tree == seq.tree);
    CHECK(par.has_mnode == seq.has_mnode);
    CHECK(par.is_pre_r_certified == seq.is_pre_r_certified);
  }

  // single-component input degenerates to the sequential path
  const SeriationResult a = spectral_sort(dense(testhelp::f10()));
  const SeriationResult b =
      parallel_spectral_sort(dense(testhelp::f10()), {}, 8);
  CHECK(a.tree == b.tree);

  CHECK_THROWS_AS(parallel_spectral_sort(tm.matrix, {}, 0), contract_error);
}

TEST_CASE("property: the frontier is a permutation of the unit set") {
  detail::rng64 rng(1001);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + static_cast<int>(detail::uniform_index(rng, 10));
    Eigen::MatrixXd m = testhelp::random_r_matrix(n, rng, trial % 2 == 0);
    const Permutation q(detail::random_permutation(n, rng));
    const SymMatrix f = apply_perm(dense(m), q);
    const SeriationResult r = spectral_sort(f);
    std::vector<int> sorted(r.tree.frontier().order());
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(static_cast<std::size_t>(n));
    std::iota(expect.begin(), expect.end(), 1);
    CHECK(sorted == expect);
  }
}

TEST_CASE("property: tree orderings equal the exhaustive R-form search") {
  detail::rng64 rng(909);
  int done = 0;
  while (done < 30) {
    const int n = 4 + static_cast<int>(detail::uniform_index(rng, 4));
    Eigen::MatrixXd m = testhelp::random_r_matrix(n, rng, done % 2 == 0);
    const Permutation q(detail::random_permutation(n, rng));
    const SymMatrix f = apply_perm(dense(m), q);
    const SeriationResult r = spectral_sort(f);
    if (!r.is_pre_r_certified) continue;
    ++done;
    CHECK(testhelp::perm_set(r.tree) == testhelp::brute_force_r_orderings(f));
    CHECK(is_r_matrix(apply_perm(f, one_perm(r.tree))));
  }
}

TEST_CASE("property: translation by a constant does not change the tree") {
  detail::rng64 rng(33);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 4 + static_cast<int>(detail::uniform_index(rng, 6));
    Eigen::MatrixXd m = testhelp::random_r_matrix(n, rng, false);
    m.array() += 0.5;  // keep it irreducible
    const SeriationResult base = spectral_sort(dense(m));
    for (double c : {1.0, 7.5}) {
      const SeriationResult shifted =
          spectral_sort(dense(Eigen::MatrixXd(m.array() + c)));
      CHECK(shifted.tree == base.tree);
    }
  }
}

TEST_CASE("property: relabeling permutes the encoded orderings") {
  detail::rng64 rng(4242);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 4 + static_cast<int>(detail::uniform_index(rng, 4));
    Eigen::MatrixXd m = testhelp::random_r_matrix(n, rng, trial % 3 == 0);
    const SymMatrix f = dense(m);
    const Permutation q(detail::random_permutation(n, rng));
    const SymMatrix relabeled = apply_perm(f, q);

    const SeriationResult rf = spectral_sort(f);
    const SeriationResult rg = spectral_sort(relabeled);
    if (rf.has_mnode || rg.has_mnode) continue;

    std::set<Permutation> mapped;
    for (const Permutation& p : testhelp::perm_set(rg.tree))
      mapped.insert(relabel_through(p, q));
    CHECK(mapped == testhelp::perm_set(rf.tree));
  }
}
