#include <catch2/catch_amalgamated.hpp>

#include <regex>
#include <sstream>
#include <thread>

#include "seriate/pqtree.hpp"
#include "test_helpers.hpp"

using namespace seriate;

TEST_CASE("node factories enforce properness") {
  CHECK(PQTree::pnode({1, 2, 3}).kind() == PQTree::Kind::P);
  CHECK(PQTree::qnode({4, 5, 6}).kind() == PQTree::Kind::Q);
  CHECK(PQTree::mnode({1, 2}).kind() == PQTree::Kind::M);
  CHECK(PQTree::leaf(7).label() == 7);

  // two children suffice for P, arbitrary subtree children allowed
  const PQTree mixed = PQTree::pnode(
      {PQTree::leaf(4), PQTree::qnode({1, 2, 3})});
  CHECK(mixed.children().size() == 2);

  CHECK_THROWS_AS(PQTree::pnode(std::vector<int>{1}), structural_error);
  CHECK_THROWS_AS(PQTree::qnode({1, 2}), structural_error);
  CHECK_THROWS_AS(PQTree::mnode(std::vector<int>{1}), structural_error);
  CHECK_THROWS_AS(PQTree::leaf(-1), structural_error);

  // a unit may appear only once among the leaves
  CHECK_THROWS_AS(PQTree::pnode({1, 2, 1}), structural_error);
  CHECK_THROWS_AS(
      PQTree::pnode({PQTree::qnode({1, 2, 3}), PQTree::qnode({3, 4, 5})}),
      structural_error);
}

TEST_CASE("frontier reads leaves left to right") {
  const PQTree t = testhelp::nested_tree();
  CHECK(t.frontier().order() == std::vector<int>{1, 2, 3, 4, 5, 6});
  CHECK(t.leaf_count() == 6);
  CHECK(PQTree::leaf(3).frontier().order() == std::vector<int>{3});
}

TEST_CASE("nperm counts admissible permutations") {
  CHECK(nperm(PQTree::leaf(7)) == 1);
  CHECK(nperm(testhelp::nested_tree()) == 24);

  std::vector<int> ten(10);
  for (int i = 0; i < 10; ++i) ten[static_cast<std::size_t>(i)] = i + 1;
  CHECK(nperm(PQTree::qnode(ten)) == 2);

  CHECK(nperm(PQTree::mnode({1, 2, 3, 4, 5})) == 120);  // M counts as P
}

TEST_CASE("nperm overflow is an error, not a wraparound") {
  std::vector<int> many(21);
  for (int i = 0; i < 21; ++i) many[static_cast<std::size_t>(i)] = i + 1;
  CHECK_THROWS_AS(nperm(PQTree::pnode(many)), overflow_error);  // 21! > 2^64

  // 20! fits
  many.pop_back();
  CHECK(nperm(PQTree::pnode(many)) == 2432902008176640000ULL);
}

TEST_CASE("all_perms enumerates the nested example in table order") {
  const std::vector<Permutation> got = all_perms(testhelp::nested_tree());
  const auto want = testhelp::nested_tree_orders();
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i)
    CHECK(got[i].order() == want[i]);
}

TEST_CASE("all_perms small cases") {
  const std::vector<Permutation> q = all_perms(PQTree::qnode({4, 5, 6}));
  REQUIRE(q.size() == 2);
  CHECK(q[0].order() == std::vector<int>{4, 5, 6});
  CHECK(q[1].order() == std::vector<int>{6, 5, 4});

  const std::vector<Permutation> p = all_perms(PQTree::pnode({1, 2}));
  REQUIRE(p.size() == 2);
  CHECK(p[0].order() == std::vector<int>{1, 2});
  CHECK(p[1].order() == std::vector<int>{2, 1});
}

TEST_CASE("all_perms respects the cap") {
  std::vector<int> eight(8);
  for (int i = 0; i < 8; ++i) eight[static_cast<std::size_t>(i)] = i + 1;
  const PQTree t = PQTree::pnode(eight);  // 8! = 40320
  try {
    all_perms(t, 1000);
    FAIL("expected size_error");
  } catch (const size_error& e) {
    CHECK(e.count() == 40320);
  }
  CHECK(all_perms(t, 40320).size() == 40320);
}

TEST_CASE("one_perm is the stored frontier") {
  CHECK(one_perm(PQTree::qnode({4, 5, 6})).order() == std::vector<int>{4, 5, 6});
  CHECK(one_perm(PQTree::leaf(3)).order() == std::vector<int>{3});
}

TEST_CASE("subtree addresses nodes by child path") {
  const PQTree t = testhelp::nested_tree();
  CHECK(subtree(t, std::vector<int>{0}) == PQTree::pnode({1, 2, 3}));
  CHECK(subtree(t, std::vector<int>{}) == t);
  CHECK(subtree(t, std::vector<int>{1, 2}) == PQTree::leaf(6));
  CHECK_THROWS_AS(subtree(PQTree::leaf(1), std::vector<int>{0}), addressing_error);
  CHECK_THROWS_AS(subtree(t, std::vector<int>{2}), addressing_error);
  CHECK_THROWS_AS(subtree(t, std::vector<int>{0, -1}), addressing_error);
}

TEST_CASE("json serialization round-trips") {
  CHECK(to_json(PQTree::leaf(1)) == R"({"kind":"leaf","label":1})");

  const PQTree t = testhelp::nested_tree();
  CHECK(from_json(to_json(t)) == t);

  const PQTree m = PQTree::mnode({1, 2, 3});
  CHECK(from_json(to_json(m)) == m);
}

TEST_CASE("json parse errors carry a position") {
  try {
    from_json("{\"kind\":\"leaf\",");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.position() > 0);
  }
  CHECK_THROWS_AS(from_json(R"({"kind":"tower","children":[]})"), parse_error);
  CHECK_THROWS_AS(from_json(R"({"kind":"leaf"})"), parse_error);
  CHECK_THROWS_AS(from_json(R"({"kind":"p","children":"no"})"), parse_error);
  // schema-valid JSON with improper arity fails structurally
  CHECK_THROWS_AS(
      from_json(R"({"kind":"q","children":[{"kind":"leaf","label":1}]})"),
      structural_error);
}

TEST_CASE("dot output shapes follow node kinds") {
  const std::string dot = to_dot(PQTree::qnode({4, 5, 6}));
  CHECK(std::count(dot.begin(), dot.end(), '{') == 1);
  CHECK(std::count(dot.begin(), dot.end(), '}') == 1);

  std::size_t boxes = 0, triangles = 0;
  for (std::size_t pos = 0; (pos = dot.find("shape=box", pos)) != std::string::npos; ++pos) ++boxes;
  for (std::size_t pos = 0; (pos = dot.find("shape=triangle", pos)) != std::string::npos; ++pos) ++triangles;
  CHECK(boxes == 1);
  CHECK(triangles == 3);
}

TEST_CASE("dot output parses as a digraph") {
  detail::rng64 rng(7);
  const PQTree t = testhelp::random_tree(12, rng);
  const std::string dot = to_dot(t);

  static const std::regex node_re(R"(^  (n\d+) \[shape=(circle|box|diamond|triangle), label=\".*\"\];$)");
  static const std::regex edge_re(R"(^  (n\d+) -> (n\d+);$)");
  std::set<std::string> declared;
  std::istringstream in(dot);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "digraph pqtree {");
  bool root_seen = false;
  while (std::getline(in, line)) {
    if (line == "}") break;
    std::smatch m;
    if (std::regex_match(line, m, node_re)) {
      if (!root_seen) {
        CHECK(m[1] == "n0");  // root first
        root_seen = true;
      }
      declared.insert(m[1]);
    } else if (std::regex_match(line, m, edge_re)) {
      CHECK(declared.count(m[1]) == 1);
      CHECK(declared.count(m[2]) == 1);
    } else {
      FAIL("unparseable DOT line: " + line);
    }
  }
}

TEST_CASE("dot labels leaves with supplied names") {
  const std::string dot =
      to_dot(PQTree::qnode({1, 2, 3}), {"alpha", "beta", "gamma"});
  CHECK(dot.find("label=\"alpha\"") != std::string::npos);
  CHECK(dot.find("label=\"gamma\"") != std::string::npos);
}

TEST_CASE("text format is stable") {
  CHECK(to_text(testhelp::nested_tree()) ==
        "P\n"
        "  P\n"
        "    Leaf(1)\n"
        "    Leaf(2)\n"
        "    Leaf(3)\n"
        "  Q\n"
        "    Leaf(4)\n"
        "    Leaf(5)\n"
        "    Leaf(6)\n");
}

TEST_CASE("property: enumeration matches the count and is duplicate-free") {
  detail::rng64 rng(20260809);
  int checked = 0;
  while (checked < 40) {
    const int n = 2 + static_cast<int>(detail::uniform_index(rng, 9));
    const PQTree t = testhelp::random_tree(n, rng);
    const std::uint64_t count = nperm(t);
    if (count > 10'000) continue;
    ++checked;
    const std::vector<Permutation> all = all_perms(t, 10'000);
    CHECK(all.size() == count);
    const std::set<Permutation> dedup(all.begin(), all.end());
    CHECK(dedup.size() == count);

    // one_perm is among them, and every row is a permutation of {1..n}
    CHECK(dedup.count(one_perm(t)) == 1);
    std::vector<int> sorted(one_perm(t).order());
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < n; ++i) CHECK(sorted[static_cast<std::size_t>(i)] == i + 1);
  }
}

TEST_CASE("property: reversal closure at a Q root") {
  detail::rng64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<PQTree> children;
    const int k = 3 + static_cast<int>(detail::uniform_index(rng, 3));
    int next_label = 1;
    for (int c = 0; c < k; ++c) {
      const int sz = 1 + static_cast<int>(detail::uniform_index(rng, 3));
      if (sz == 1) {
        children.push_back(PQTree::leaf(next_label++));
      } else {
        std::vector<int> labels;
        for (int i = 0; i < std::max(sz, 2); ++i) labels.push_back(next_label++);
        children.push_back(PQTree::pnode(labels));
      }
    }
    const PQTree t = PQTree::qnode(std::move(children));
    const std::set<Permutation> all = testhelp::perm_set(t, 100'000);
    for (const Permutation& p : all) CHECK(all.count(p.reversed()) == 1);
  }
}

TEST_CASE("property: json round trip on random trees") {
  detail::rng64 rng(123);
  for (int trial = 0; trial < 25; ++trial) {
    const PQTree t = testhelp::random_tree(
        2 + static_cast<int>(detail::uniform_index(rng, 20)), rng);
    CHECK(from_json(to_json(t)) == t);
  }
}

TEST_CASE("trees are safe to read concurrently") {
  const PQTree t = testhelp::nested_tree();
  std::vector<std::thread> readers;
  std::vector<std::uint64_t> counts(8, 0);
  for (int k = 0; k < 8; ++k)
    readers.emplace_back([&t, &counts, k] {
      for (int i = 0; i < 200; ++i) counts[static_cast<std::size_t>(k)] += nperm(t);
    });
  for (std::thread& th : readers) th.join();
  for (std::uint64_t c : counts) CHECK(c == 200 * 24);
}
