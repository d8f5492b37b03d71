#ifndef SERIATE_PQTREE_HPP
#define SERIATE_PQTREE_HPP

#include <algorithm>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "seriate/errors.hpp"

namespace seriate {

// An ordering of unit indices. Entries are distinct unit ids; a frontier of a
// subtree carries that subtree's unit set, a full seriation result carries
// {1..n}. Positions are 0-based, unit ids are whatever the tree stores
// (1-based throughout this library).
class Permutation {
public:
  Permutation() = default;

  explicit Permutation(std::vector<int> order) : order_(std::move(order)) {
    std::set<int> seen;
    for (int u : order_) {
      if (u < 0) throw contract_error("permutation entries must be nonnegative");
      if (!seen.insert(u).second)
        throw contract_error("permutation repeats unit " + std::to_string(u));
    }
  }

  std::size_t size() const { return order_.size(); }
  int operator[](std::size_t pos) const { return order_[pos]; }
  const std::vector<int>& order() const { return order_; }

  Permutation reversed() const {
    std::vector<int> r(order_.rbegin(), order_.rend());
    return Permutation(std::move(r));
  }

  // Inverse permutation; requires entries to be exactly {1..n}.
  Permutation inverse() const {
    const int n = static_cast<int>(order_.size());
    std::vector<int> inv(order_.size(), 0);
    for (int pos = 0; pos < n; ++pos) {
      const int u = order_[static_cast<std::size_t>(pos)];
      if (u < 1 || u > n)
        throw contract_error("inverse requires a permutation of {1..n}");
      inv[static_cast<std::size_t>(u - 1)] = pos + 1;
    }
    return Permutation(std::move(inv));
  }

  bool is_identity() const {
    for (std::size_t i = 0; i < order_.size(); ++i)
      if (order_[i] != static_cast<int>(i) + 1) return false;
    return true;
  }

  auto operator<=>(const Permutation&) const = default;

private:
  std::vector<int> order_;
};

// Rooted tree over a unit set: P-nodes admit every child order, Q-nodes admit
// the given order and its reverse, leaves carry unit indices. M-nodes mark an
// index set where the seriation step met a multiple Fiedler value; for
// counting and enumeration they behave like P-nodes, which makes the encoded
// family an upper bound on the admissible one.
//
// Trees are immutable values: construct through the factories, then only read.
// Properness is enforced on construction: P needs >= 2 children, Q >= 3,
// M >= 2, and no unit index may appear twice among the leaves.
class PQTree {
public:
  enum class Kind { P, Q, M, Leaf };

  static PQTree leaf(int label) {
    if (label < 0) throw structural_error("leaf label must be nonnegative");
    return PQTree(Kind::Leaf, label, {});
  }

  static PQTree pnode(std::vector<PQTree> children) {
    return internal(Kind::P, std::move(children), 2, "P-node needs at least 2 children");
  }
  static PQTree pnode(const std::vector<int>& labels) {
    return pnode(wrap(labels));
  }

  static PQTree qnode(std::vector<PQTree> children) {
    return internal(Kind::Q, std::move(children), 3, "Q-node needs at least 3 children");
  }
  static PQTree qnode(const std::vector<int>& labels) {
    return qnode(wrap(labels));
  }

  static PQTree mnode(std::vector<PQTree> children) {
    return internal(Kind::M, std::move(children), 2, "M-node needs at least 2 children");
  }
  static PQTree mnode(const std::vector<int>& labels) {
    return mnode(wrap(labels));
  }

  Kind kind() const { return kind_; }
  bool is_leaf() const { return kind_ == Kind::Leaf; }

  int label() const {
    if (!is_leaf()) throw contract_error("label() on a non-leaf node");
    return label_;
  }

  const std::vector<PQTree>& children() const { return children_; }

  std::size_t leaf_count() const {
    if (is_leaf()) return 1;
    std::size_t n = 0;
    for (const PQTree& c : children_) n += c.leaf_count();
    return n;
  }

  // Left-to-right leaf labels, i.e. the tree's own admissible ordering.
  Permutation frontier() const {
    std::vector<int> out;
    out.reserve(leaf_count());
    collect_frontier(out);
    return Permutation(std::move(out));
  }

  bool contains_mnode() const {
    if (kind_ == Kind::M) return true;
    for (const PQTree& c : children_)
      if (c.contains_mnode()) return true;
    return false;
  }

  bool operator==(const PQTree& other) const {
    if (kind_ != other.kind_ || label_ != other.label_) return false;
    return children_ == other.children_;
  }

private:
  PQTree(Kind kind, int label, std::vector<PQTree> children)
      : kind_(kind), label_(label), children_(std::move(children)) {}

  static std::vector<PQTree> wrap(const std::vector<int>& labels) {
    std::vector<PQTree> out;
    out.reserve(labels.size());
    for (int l : labels) out.push_back(leaf(l));
    return out;
  }

  static PQTree internal(Kind kind, std::vector<PQTree> children,
                         std::size_t min_arity, const char* arity_message) {
    if (children.size() < min_arity) throw structural_error(arity_message);
    PQTree t(kind, -1, std::move(children));
    std::set<int> labels;
    t.collect_labels(labels);
    return t;
  }

  void collect_labels(std::set<int>& labels) const {
    if (is_leaf()) {
      if (!labels.insert(label_).second)
        throw structural_error("unit " + std::to_string(label_) +
                               " appears more than once among the leaves");
      return;
    }
    for (const PQTree& c : children_) c.collect_labels(labels);
  }

  void collect_frontier(std::vector<int>& out) const {
    if (is_leaf()) {
      out.push_back(label_);
      return;
    }
    for (const PQTree& c : children_) c.collect_frontier(out);
  }

  Kind kind_;
  int label_;
  std::vector<PQTree> children_;
};

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw overflow_error("permutation count exceeds 64 bits");
  return r;
}

inline std::uint64_t checked_factorial(std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 2; i <= k; ++i) r = checked_mul(r, i);
  return r;
}

}  // namespace detail

// Number of admissible permutations: 1 per leaf, x2 per Q-node, xk! per
// P- or M-node with k children. Overflow raises instead of wrapping.
inline std::uint64_t nperm(const PQTree& t) {
  if (t.is_leaf()) return 1;
  std::uint64_t p = 1;
  for (const PQTree& c : t.children()) p = detail::checked_mul(p, nperm(c));
  if (t.kind() == PQTree::Kind::Q) return detail::checked_mul(2, p);
  return detail::checked_mul(detail::checked_factorial(t.children().size()), p);
}

namespace detail {

// Frontiers of all trees equivalent to t, as rows. Order is deterministic:
// child-position permutations in lexicographic order (for Q: forward then
// reversed), and within a fixed arrangement the rightmost child's variants
// cycle fastest.
inline std::vector<std::vector<int>> enumerate_frontiers(const PQTree& t) {
  if (t.is_leaf()) return {{t.label()}};

  const std::size_t k = t.children().size();
  std::vector<std::vector<std::vector<int>>> variants;
  variants.reserve(k);
  for (const PQTree& c : t.children()) variants.push_back(enumerate_frontiers(c));

  std::vector<std::vector<std::size_t>> arrangements;
  std::vector<std::size_t> order(k);
  for (std::size_t i = 0; i < k; ++i) order[i] = i;
  if (t.kind() == PQTree::Kind::Q) {
    arrangements.push_back(order);
    arrangements.emplace_back(order.rbegin(), order.rend());
  } else {
    do {
      arrangements.push_back(order);
    } while (std::next_permutation(order.begin(), order.end()));
  }

  std::vector<std::vector<int>> out;
  std::vector<std::size_t> pick(k, 0);
  for (const auto& arr : arrangements) {
    std::fill(pick.begin(), pick.end(), 0);
    for (;;) {
      std::vector<int> row;
      for (std::size_t slot = 0; slot < k; ++slot) {
        const auto& part = variants[arr[slot]][pick[slot]];
        row.insert(row.end(), part.begin(), part.end());
      }
      out.push_back(std::move(row));
      // odometer, rightmost slot fastest
      std::size_t slot = k;
      while (slot > 0) {
        --slot;
        if (++pick[slot] < variants[arr[slot]].size()) break;
        pick[slot] = 0;
        if (slot == 0) goto next_arrangement;
      }
    }
  next_arrangement:;
  }
  return out;
}

}  // namespace detail

// All admissible permutations of t, at most `cap` of them. The count is
// established first; exceeding the cap raises size_error carrying it.
inline std::vector<Permutation> all_perms(const PQTree& t,
                                          std::uint64_t cap = 1'000'000) {
  const std::uint64_t n = nperm(t);
  if (n > cap)
    throw size_error("tree encodes " + std::to_string(n) +
                         " permutations, over the cap of " + std::to_string(cap),
                     n);
  std::vector<std::vector<int>> rows = detail::enumerate_frontiers(t);
  std::vector<Permutation> out;
  out.reserve(rows.size());
  for (auto& r : rows) out.emplace_back(std::move(r));
  return out;
}

// One admissible permutation: the frontier as stored, no transformation.
inline Permutation one_perm(const PQTree& t) { return t.frontier(); }

// Subtree addressed by a path of 0-based child positions; [] is the root.
inline const PQTree& subtree(const PQTree& t, std::span<const int> path) {
  const PQTree* node = &t;
  for (std::size_t depth = 0; depth < path.size(); ++depth) {
    const int i = path[depth];
    if (i < 0 || static_cast<std::size_t>(i) >= node->children().size())
      throw addressing_error("no child " + std::to_string(i) +
                             " at path depth " + std::to_string(depth));
    node = &node->children()[static_cast<std::size_t>(i)];
  }
  return *node;
}

inline const PQTree& subtree(const PQTree& t, const std::vector<int>& path) {
  return subtree(t, std::span<const int>(path));
}

namespace detail {

inline nlohmann::json tree_to_json(const PQTree& t) {
  nlohmann::json j;
  switch (t.kind()) {
    case PQTree::Kind::Leaf:
      j["kind"] = "leaf";
      j["label"] = t.label();
      return j;
    case PQTree::Kind::P:
      j["kind"] = "p";
      break;
    case PQTree::Kind::Q:
      j["kind"] = "q";
      break;
    case PQTree::Kind::M:
      j["kind"] = "m";
      break;
  }
  nlohmann::json ch = nlohmann::json::array();
  for (const PQTree& c : t.children()) ch.push_back(tree_to_json(c));
  j["children"] = std::move(ch);
  return j;
}

inline PQTree tree_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
    throw parse_error("node must be an object with a string \"kind\"", 0);
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "leaf") {
    if (!j.contains("label") || !j["label"].is_number_integer())
      throw parse_error("leaf node needs an integer \"label\"", 0);
    return PQTree::leaf(j["label"].get<int>());
  }
  if (!j.contains("children") || !j["children"].is_array())
    throw parse_error("internal node needs a \"children\" array", 0);
  std::vector<PQTree> children;
  children.reserve(j["children"].size());
  for (const auto& c : j["children"]) children.push_back(tree_from_json(c));
  if (kind == "p") return PQTree::pnode(std::move(children));
  if (kind == "q") return PQTree::qnode(std::move(children));
  if (kind == "m") return PQTree::mnode(std::move(children));
  throw parse_error("unknown node kind \"" + kind + "\"", 0);
}

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

// JSON document per the schema
//   {"kind":"p"|"q"|"m","children":[...]} | {"kind":"leaf","label":int}
inline std::string to_json(const PQTree& t) {
  return detail::tree_to_json(t).dump();
}

inline PQTree from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw parse_error(std::string("invalid JSON: ") + e.what(), e.byte);
  }
  return detail::tree_from_json(j);
}

// Graphviz digraph, root declared first; P-nodes are circles, Q-nodes boxes,
// M-nodes diamonds, leaves triangles. When the optional label table has an
// entry for a unit index, the leaf is captioned with it.
inline std::string to_dot(const PQTree& t,
                          const std::vector<std::string>& leaf_names = {}) {
  std::string nodes, edges;
  int counter = 0;
  auto emit = [&](auto&& self, const PQTree& node) -> int {
    const int id = counter++;
    const std::string name = "n" + std::to_string(id);
    switch (node.kind()) {
      case PQTree::Kind::P:
        nodes += "  " + name + " [shape=circle, label=\"P\"];\n";
        break;
      case PQTree::Kind::Q:
        nodes += "  " + name + " [shape=box, label=\"Q\"];\n";
        break;
      case PQTree::Kind::M:
        nodes += "  " + name + " [shape=diamond, label=\"M\"];\n";
        break;
      case PQTree::Kind::Leaf: {
        const int l = node.label();
        std::string caption = std::to_string(l);
        if (l >= 1 && static_cast<std::size_t>(l) <= leaf_names.size() &&
            !leaf_names[static_cast<std::size_t>(l - 1)].empty())
          caption = detail::dot_escape(leaf_names[static_cast<std::size_t>(l - 1)]);
        nodes += "  " + name + " [shape=triangle, label=\"" + caption + "\"];\n";
        break;
      }
    }
    for (const PQTree& c : node.children()) {
      const int child_id = self(self, c);
      edges += "  " + name + " -> n" + std::to_string(child_id) + ";\n";
    }
    return id;
  };
  emit(emit, t);
  return "digraph pqtree {\n" + nodes + edges + "}\n";
}

// Indented text form, one node per line: stable for golden-file comparison.
inline std::string to_text(const PQTree& t) {
  std::string out;
  auto emit = [&](auto&& self, const PQTree& node, int depth) -> void {
    out.append(static_cast<std::size_t>(2 * depth), ' ');
    switch (node.kind()) {
      case PQTree::Kind::P: out += "P\n"; break;
      case PQTree::Kind::Q: out += "Q\n"; break;
      case PQTree::Kind::M: out += "M\n"; break;
      case PQTree::Kind::Leaf:
        out += "Leaf(" + std::to_string(node.label()) + ")\n";
        return;
    }
    for (const PQTree& c : node.children()) self(self, c, depth + 1);
  };
  emit(emit, t, 0);
  return out;
}

}  // namespace seriate

#endif  // SERIATE_PQTREE_HPP
