#ifndef SERIATE_IO_HPP
#define SERIATE_IO_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "seriate/detail/random.hpp"
#include "seriate/errors.hpp"
#include "seriate/graph.hpp"
#include "seriate/pqtree.hpp"

namespace seriate {

enum class MatrixFormat { matrix_market, csv };
enum class MatrixKind { data, similarity };

// Input description: format is inferred from the extension (.mtx, .csv)
// unless set explicitly.
struct MatrixFile {
  std::string path;
  std::optional<MatrixFormat> format;
  MatrixKind kind = MatrixKind::data;
};

// A matrix read from disk plus any unit (row) labels the file carried.
struct LoadedMatrix {
  std::variant<DataMatrix, SymMatrix> matrix;
  std::vector<std::string> unit_labels;

  bool is_similarity() const { return std::holds_alternative<SymMatrix>(matrix); }
  const DataMatrix& data() const { return std::get<DataMatrix>(matrix); }
  const SymMatrix& similarity() const { return std::get<SymMatrix>(matrix); }
};

namespace detail {

inline std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline bool parse_double(std::string_view tok, double& out) {
  const char* end = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && p == end;
}

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

struct MmHeader {
  bool coordinate = true;
  bool pattern = false;
  bool symmetric = false;
};

inline MmHeader parse_mm_header(const std::string& line) {
  auto tok = split_ws(line);
  if (tok.size() < 5 || tok[0] != "%%MatrixMarket" || lowercase(std::string(tok[1])) != "matrix")
    throw parse_error("not a Matrix Market file: bad banner", 1);
  MmHeader h;
  const std::string fmt = lowercase(std::string(tok[2]));
  const std::string field = lowercase(std::string(tok[3]));
  const std::string sym = lowercase(std::string(tok[4]));
  if (fmt == "coordinate") h.coordinate = true;
  else if (fmt == "array") h.coordinate = false;
  else throw parse_error("unsupported Matrix Market format \"" + fmt + "\"", 1);
  if (field == "pattern") h.pattern = true;
  else if (field != "real" && field != "integer")
    throw parse_error("unsupported Matrix Market field \"" + field + "\"", 1);
  if (sym == "symmetric") h.symmetric = true;
  else if (sym != "general")
    throw parse_error("unsupported Matrix Market symmetry \"" + sym + "\"", 1);
  return h;
}

struct ParsedMatrix {
  int rows = 0;
  int cols = 0;
  bool sparse = true;
  std::vector<Eigen::Triplet<double>> entries;  // sparse
  Eigen::MatrixXd dense;
};

inline ParsedMatrix read_matrix_market_stream(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw parse_error("empty file", 1);
  ++lineno;
  const MmHeader h = parse_mm_header(line);

  auto next_content_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      if (line[0] == '%') continue;
      if (split_ws(line).empty()) continue;
      return true;
    }
    return false;
  };

  if (!next_content_line()) throw parse_error("missing size line", lineno + 1);
  auto tok = split_ws(line);
  ParsedMatrix m;
  m.sparse = h.coordinate;
  double r = 0, c = 0, nnz = 0;
  if (h.coordinate) {
    if (tok.size() != 3 || !parse_double(tok[0], r) || !parse_double(tok[1], c) ||
        !parse_double(tok[2], nnz))
      throw parse_error("bad coordinate size line", lineno);
  } else {
    if (tok.size() != 2 || !parse_double(tok[0], r) || !parse_double(tok[1], c))
      throw parse_error("bad array size line", lineno);
  }
  m.rows = static_cast<int>(r);
  m.cols = static_cast<int>(c);
  if (m.rows < 1 || m.cols < 1) throw parse_error("matrix dimensions must be >= 1", lineno);

  if (h.coordinate) {
    m.entries.reserve(static_cast<std::size_t>(nnz) * (h.symmetric ? 2 : 1));
    for (long k = 0; k < static_cast<long>(nnz); ++k) {
      if (!next_content_line())
        throw parse_error("file ends after " + std::to_string(k) + " of " +
                              std::to_string(static_cast<long>(nnz)) + " entries",
                          lineno + 1);
      tok = split_ws(line);
      const std::size_t expected = h.pattern ? 2 : 3;
      double i = 0, j = 0, v = 1.0;
      if (tok.size() != expected || !parse_double(tok[0], i) || !parse_double(tok[1], j) ||
          (!h.pattern && !parse_double(tok[2], v)))
        throw parse_error("bad entry line", lineno);
      const int ii = static_cast<int>(i) - 1, jj = static_cast<int>(j) - 1;
      if (ii < 0 || ii >= m.rows || jj < 0 || jj >= m.cols)
        throw parse_error("entry indices out of range", lineno);
      m.entries.emplace_back(ii, jj, v);
      if (h.symmetric && ii != jj) m.entries.emplace_back(jj, ii, v);
    }
  } else {
    m.dense = Eigen::MatrixXd::Zero(m.rows, m.cols);
    // array data is column-major; symmetric files store the lower triangle
    for (int j = 0; j < m.cols; ++j) {
      for (int i = h.symmetric ? j : 0; i < m.rows; ++i) {
        if (!next_content_line()) throw parse_error("file ends inside array data", lineno + 1);
        tok = split_ws(line);
        double v = 0;
        if (tok.size() != 1 || !parse_double(tok[0], v))
          throw parse_error("bad array value line", lineno);
        m.dense(i, j) = v;
        if (h.symmetric) m.dense(j, i) = v;
      }
    }
  }
  return m;
}

inline ParsedMatrix read_csv_stream(std::istream& in,
                                    std::vector<std::string>& row_labels,
                                    std::vector<std::string>& col_labels) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first_line = true;
  bool labeled_rows = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    for (std::string& c : cells) {
      while (!c.empty() && std::isspace(static_cast<unsigned char>(c.front()))) c.erase(c.begin());
      while (!c.empty() && std::isspace(static_cast<unsigned char>(c.back()))) c.pop_back();
    }
    double v;
    if (first_line) {
      first_line = false;
      // a non-numeric first row is a header of column labels; a leading
      // empty cell means the data rows start with row labels
      if (!cells.empty() && !parse_double(cells.back(), v)) {
        if (cells[0].empty() || !parse_double(cells[0], v)) {
          labeled_rows = cells[0].empty();
          col_labels.assign(cells.begin() + (labeled_rows ? 1 : 0), cells.end());
          continue;
        }
      }
    }
    std::vector<double> row;
    std::size_t begin = 0;
    if (!cells.empty() && !parse_double(cells[0], v)) {
      row_labels.push_back(cells[0]);
      labeled_rows = true;
      begin = 1;
    } else if (labeled_rows) {
      throw parse_error("row label missing", lineno);
    }
    for (std::size_t k = begin; k < cells.size(); ++k) {
      if (!parse_double(cells[k], v))
        throw parse_error("cell \"" + cells[k] + "\" is not a number", lineno);
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.back().size())
      throw parse_error("row has " + std::to_string(row.size()) +
                            " cells, expected " + std::to_string(rows.back().size()),
                        lineno);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw parse_error("no data rows", lineno ? lineno : 1);
  ParsedMatrix m;
  m.sparse = false;
  m.rows = static_cast<int>(rows.size());
  m.cols = static_cast<int>(rows[0].size());
  m.dense.resize(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j) m.dense(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

inline LoadedMatrix finish_load(ParsedMatrix&& m, MatrixKind kind,
                                std::vector<std::string> row_labels,
                                std::vector<std::string> col_labels) {
  using Loaded = std::variant<DataMatrix, SymMatrix>;
  auto build = [&]() -> Loaded {
    if (kind == MatrixKind::similarity) {
      if (m.sparse) {
        SparseMat s(m.rows, m.cols);
        s.setFromTriplets(m.entries.begin(), m.entries.end());
        return SymMatrix::sparse(std::move(s));
      }
      return SymMatrix::dense(std::move(m.dense));
    }
    if (m.sparse) {
      SparseMat s(m.rows, m.cols);
      s.setFromTriplets(m.entries.begin(), m.entries.end());
      return DataMatrix::sparse(std::move(s), row_labels, col_labels);
    }
    return DataMatrix::dense(std::move(m.dense), row_labels, col_labels);
  };
  return LoadedMatrix{build(), std::move(row_labels)};
}

}  // namespace detail

inline MatrixFormat infer_format(const std::string& path) {
  const std::size_t dot = path.rfind('.');
  const std::string ext = dot == std::string::npos
                              ? std::string()
                              : detail::lowercase(path.substr(dot + 1));
  if (ext == "mtx" || ext == "mm") return MatrixFormat::matrix_market;
  if (ext == "csv") return MatrixFormat::csv;
  throw usage_error("cannot infer matrix format from \"" + path +
                    "\"; pass the format explicitly");
}

inline LoadedMatrix read_matrix_stream(std::istream& in, MatrixFormat format,
                                       MatrixKind kind) {
  std::vector<std::string> row_labels, col_labels;
  detail::ParsedMatrix m = format == MatrixFormat::matrix_market
                               ? detail::read_matrix_market_stream(in)
                               : detail::read_csv_stream(in, row_labels, col_labels);
  return detail::finish_load(std::move(m), kind, std::move(row_labels),
                             std::move(col_labels));
}

inline LoadedMatrix read_matrix(const MatrixFile& f) {
  std::ifstream in(f.path);
  if (!in) throw parse_error("cannot open \"" + f.path + "\"", 0);
  const MatrixFormat format = f.format ? *f.format : infer_format(f.path);
  return read_matrix_stream(in, format, f.kind);
}

namespace detail {

inline std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

// Matrix Market writers. Sparse symmetric matrices use coordinate/symmetric
// with the lower triangle; dense ones use array/general. Values are printed
// with 17 significant digits so that read(write(M)) is bit-exact.
inline void write_matrix_market(std::ostream& out, const SymMatrix& m) {
  const int n = m.size();
  if (m.is_sparse()) {
    std::vector<Eigen::Triplet<double>> lower;
    m.for_each_nonzero([&](int i, int j, double v) {
      if (i >= j) lower.emplace_back(i, j, v);
    });
    std::sort(lower.begin(), lower.end(), [](const auto& a, const auto& b) {
      return a.col() != b.col() ? a.col() < b.col() : a.row() < b.row();
    });
    out << "%%MatrixMarket matrix coordinate real symmetric\n";
    out << n << " " << n << " " << lower.size() << "\n";
    for (const auto& t : lower)
      out << t.row() + 1 << " " << t.col() + 1 << " "
          << detail::format_value(t.value()) << "\n";
    return;
  }
  out << "%%MatrixMarket matrix array real symmetric\n";
  out << n << " " << n << "\n";
  for (int j = 0; j < n; ++j)
    for (int i = j; i < n; ++i)
      out << detail::format_value(m.dense_data()(i, j)) << "\n";
}

inline void write_matrix_market(std::ostream& out, const DataMatrix& m) {
  if (m.is_sparse()) {
    std::vector<Eigen::Triplet<double>> entries;
    const SparseMat& s = m.sparse_data();
    for (int k = 0; k < s.outerSize(); ++k)
      for (SparseMat::InnerIterator it(s, k); it; ++it)
        if (it.value() != 0.0)
          entries.emplace_back(static_cast<int>(it.row()),
                               static_cast<int>(it.col()), it.value());
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << " " << m.cols() << " " << entries.size() << "\n";
    for (const auto& t : entries)
      out << t.row() + 1 << " " << t.col() + 1 << " "
          << detail::format_value(t.value()) << "\n";
    return;
  }
  out << "%%MatrixMarket matrix array real general\n";
  out << m.rows() << " " << m.cols() << "\n";
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      out << detail::format_value(m.dense_data()(i, j)) << "\n";
}

inline void write_csv(std::ostream& out, const DataMatrix& m) {
  const bool rl = !m.row_labels().empty();
  if (!m.col_labels().empty()) {
    // with row labels the header gets a leading empty cell
    for (std::size_t j = 0; j < m.col_labels().size(); ++j)
      out << (j || rl ? "," : "") << m.col_labels()[j];
    out << "\n";
  }
  for (int i = 0; i < m.rows(); ++i) {
    if (rl) out << m.row_labels()[static_cast<std::size_t>(i)];
    for (int j = 0; j < m.cols(); ++j)
      out << (j || rl ? "," : "") << detail::format_value(m.coeff(i, j));
    out << "\n";
  }
}

// The 11x12 burial/fibula incidence table for the Bornholm site, with tomb
// and fibula identifiers as labels.
inline DataMatrix bornholm() {
  static const int data[11][12] = {
      {1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0, 0},
      {0, 1, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0},
      {1, 1, 0, 1, 1, 0, 1, 1, 0, 0, 0, 0},
      {0, 1, 1, 0, 1, 0, 0, 1, 1, 0, 0, 0},
      {0, 0, 0, 0, 1, 1, 0, 0, 0, 1, 0, 0},
      {0, 0, 1, 1, 0, 0, 1, 1, 0, 1, 0, 0},
      {0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 1, 0},
      {0, 0, 0, 0, 0, 0, 0, 1, 0, 1, 0, 0},
      {0, 0, 0, 0, 0, 0, 0, 1, 1, 0, 0, 1},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 1},
      {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1}};
  Eigen::MatrixXd m(11, 12);
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 12; ++j) m(i, j) = data[i][j];
  return DataMatrix::dense(
      std::move(m),
      {"Mollebakken 2", "Kobbea 11", "Mollebakken 1", "Levka 2",
       "Grodbygard 324", "Melsted 8", "Bokul 7", "Heslergaard 11", "Bokul 12",
       "Slamrebjerg 142", "Nexo 6"},
      {"G3", "F27", "S1", "F26", "N2", "F24", "P6", "F25", "P5", "P4", "N1",
       "F23"});
}

// Specification of a generated block test problem: n/block_size banded
// blocks of half-bandwidth bw, hidden behind a seeded symmetric permutation.
struct TestMatrixSpec {
  int n = 0;
  int block_size = 0;
  int bw = 2;
  bool sparse = true;
  std::uint64_t seed = 0;
};

struct TestMatrix {
  SymMatrix matrix;
  ComponentList planted;      // true component partition of `matrix`
  Permutation planted_perm;   // matrix == apply_perm(block_diagonal, planted_perm)
};

// Block-diagonal test matrix. Each block is the banded Toeplitz matrix
// b_ij = max(0, bw+1-|i-j|), which is an R-matrix, so the blocks are
// irreducible seriation problems with a known answer.
inline TestMatrix test_matrix(const TestMatrixSpec& spec) {
  if (spec.n < 1 || spec.block_size < 1)
    throw contract_error("test matrix needs n >= 1 and block_size >= 1");
  if (spec.n % spec.block_size != 0)
    throw contract_error("block_size must divide n");
  if (spec.bw < 0 || spec.bw >= spec.block_size)
    throw contract_error("bw must satisfy 0 <= bw < block_size");

  const int n = spec.n;
  const int bs = spec.block_size;
  detail::rng64 rng(spec.seed);
  const std::vector<int> perm = detail::random_permutation(n, rng);

  // entry value between original indices a and b (same block only)
  auto value = [&](int a, int b) -> double {
    if (a / bs != b / bs) return 0.0;
    const int d = std::abs(a - b);
    return d > spec.bw ? 0.0 : static_cast<double>(spec.bw + 1 - d);
  };

  SymMatrix matrix = [&] {
    if (spec.sparse) {
      std::vector<Eigen::Triplet<double>> trip;
      for (int i = 0; i < n; ++i) {
        const int oi = perm[static_cast<std::size_t>(i)] - 1;
        for (int j = 0; j < n; ++j) {
          const double v = value(oi, perm[static_cast<std::size_t>(j)] - 1);
          if (v != 0.0) trip.emplace_back(i, j, v);
        }
      }
      SparseMat s(n, n);
      s.setFromTriplets(trip.begin(), trip.end());
      return SymMatrix::sparse(std::move(s));
    }
    Eigen::MatrixXd d(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d(i, j) = value(perm[static_cast<std::size_t>(i)] - 1,
                        perm[static_cast<std::size_t>(j)] - 1);
    return SymMatrix::dense(std::move(d));
  }();

  // planted partition: positions of each original block (or of each unit,
  // when bw = 0 leaves the blocks internally disconnected)
  const int group_size = spec.bw == 0 ? 1 : bs;
  ComponentList planted;
  for (int g = 0; g < n / group_size; ++g) planted.emplace_back();
  for (int i = 0; i < n; ++i) {
    const int oi = perm[static_cast<std::size_t>(i)] - 1;
    planted[static_cast<std::size_t>(oi / group_size)].push_back(i + 1);
  }
  for (auto& g : planted) std::sort(g.begin(), g.end());
  std::sort(planted.begin(), planted.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });

  return TestMatrix{std::move(matrix), std::move(planted), Permutation(perm)};
}

// Symmetric sparse matrix with ~density*n^2 nonzero off-diagonal entries,
// values uniform on [-1, 1]. Used by the bandwidth-reduction experiment,
// which takes entries in absolute value before seriation.
inline SymMatrix random_sparse_sym(int n, double density, std::uint64_t seed) {
  if (n < 1) throw contract_error("n must be >= 1");
  if (!(density >= 0.0 && density <= 1.0))
    throw contract_error("density must be in [0, 1]");
  detail::rng64 rng(seed);
  const long target_pairs = std::lround(density * n * static_cast<double>(n) / 2.0);
  std::set<std::pair<int, int>> used;
  std::vector<Eigen::Triplet<double>> trip;
  long placed = 0;
  while (placed < target_pairs) {
    int i = static_cast<int>(detail::uniform_index(rng, static_cast<std::uint64_t>(n)));
    int j = static_cast<int>(detail::uniform_index(rng, static_cast<std::uint64_t>(n)));
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    if (!used.insert({i, j}).second) continue;
    double v = 2.0 * detail::uniform01(rng) - 1.0;
    if (v == 0.0) v = 0.5;
    trip.emplace_back(i, j, v);
    trip.emplace_back(j, i, v);
    ++placed;
  }
  SparseMat s(n, n);
  s.setFromTriplets(trip.begin(), trip.end());
  return SymMatrix::sparse(std::move(s));
}

enum class TreeFormat { json, dot, text };

inline TreeFormat tree_format_from_string(std::string_view s) {
  if (s == "json") return TreeFormat::json;
  if (s == "dot") return TreeFormat::dot;
  if (s == "text") return TreeFormat::text;
  throw usage_error("unknown tree format \"" + std::string(s) +
                    "\" (expected json, dot, or text)");
}

inline std::string write_tree(const PQTree& t, TreeFormat format,
                              const std::vector<std::string>& labels = {}) {
  switch (format) {
    case TreeFormat::json: return to_json(t);
    case TreeFormat::dot: return to_dot(t, labels);
    case TreeFormat::text: return to_text(t);
  }
  throw usage_error("unknown tree format tag");
}

}  // namespace seriate

#endif  // SERIATE_IO_HPP
