// Command-line front end for the seriation library.
//
// Subcommands: sort, perms, count, apply, bandwidth, gen, subtree.
// Matrices are read from Matrix Market (.mtx) or CSV (.csv) files, "-" reads
// stdin; PQ-trees travel as JSON. Results go to stdout, diagnostics to
// stderr. Exit codes: 0 success, 1 error, 2 success with an M-node in the
// tree (the ordering problem was ill-posed).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seriate/seriate.hpp"

namespace {

struct CommonOpts {
  std::string input;
  std::string input_format;  // "", "mtx", "csv", "json"
  bool similarity = false;
  bool absolute = false;
  std::string format = "text";
  std::string output;
  int workers = 0;
  seriate::SerOptions ser;
  bool no_translate = false;
};

void add_matrix_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("input", o.input, "input file, or - for stdin")->required();
  cmd->add_option("--input-format", o.input_format,
                  "input format: mtx, csv, or json (default: by extension)");
  cmd->add_flag("--similarity", o.similarity,
                "input is already a similarity matrix; skip A*A^T");
  cmd->add_flag("--abs", o.absolute,
                "take entries in absolute value before seriation");
  cmd->add_option("--tau", o.ser.tau, "equality tolerance")->capture_default_str();
  cmd->add_flag("--no-translate", o.no_translate,
                "do not shift entries so the minimum becomes 0");
  cmd->add_option("--neig", o.ser.neig, "eigenpairs per iterative-solver window")
      ->capture_default_str();
  cmd->add_option("--nlarge", o.ser.nlarge,
                  "dense eigendecomposition below this size")
      ->capture_default_str();
  cmd->add_flag_callback(
      "--force-large", [&o] { o.ser.force_large = true; },
      "force the iterative eigensolver");
  cmd->add_option("--perm-cap", o.ser.perm_cap, "enumeration cap")
      ->capture_default_str();
  cmd->add_option_function<std::uint64_t>(
      "--seed", [&o](std::uint64_t s) { o.ser.seed = s; },
      "seed for randomized helpers");
  cmd->add_option("--workers", o.workers,
                  "worker threads for the component loop (0 = sequential)")
      ->capture_default_str();
}

seriate::MatrixFormat matrix_format(const CommonOpts& o) {
  if (o.input_format == "mtx" || o.input_format == "mm")
    return seriate::MatrixFormat::matrix_market;
  if (o.input_format == "csv") return seriate::MatrixFormat::csv;
  if (!o.input_format.empty())
    throw seriate::usage_error("unknown input format \"" + o.input_format + "\"");
  if (o.input == "-") return seriate::MatrixFormat::matrix_market;
  return seriate::infer_format(o.input);
}

bool input_is_tree(const CommonOpts& o) {
  if (o.input_format == "json") return true;
  if (!o.input_format.empty() || o.input == "-") return false;
  const std::size_t dot = o.input.rfind('.');
  return dot != std::string::npos && o.input.substr(dot + 1) == "json";
}

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw seriate::parse_error("cannot open \"" + path + "\"", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

seriate::LoadedMatrix load_matrix(const CommonOpts& o) {
  const seriate::MatrixKind kind = o.similarity ? seriate::MatrixKind::similarity
                                                : seriate::MatrixKind::data;
  if (o.input == "-")
    return seriate::read_matrix_stream(std::cin, matrix_format(o), kind);
  std::ifstream in(o.input);
  if (!in) throw seriate::parse_error("cannot open \"" + o.input + "\"", 0);
  return seriate::read_matrix_stream(in, matrix_format(o), kind);
}

struct SortOutcome {
  seriate::SeriationResult result;
  seriate::SymMatrix matrix;  // the similarity matrix that was sorted
  std::vector<std::string> labels;
};

SortOutcome sort_input(const CommonOpts& o) {
  seriate::SerOptions ser = o.ser;
  ser.translate = !o.no_translate;
  seriate::LoadedMatrix loaded = load_matrix(o);
  seriate::SymMatrix sim = loaded.is_similarity()
                               ? loaded.similarity()
                               : seriate::similarity(loaded.data());
  if (o.absolute) sim = seriate::abs_entries(sim);
  seriate::SeriationResult r =
      o.workers > 0 ? seriate::parallel_spectral_sort(sim, ser, o.workers)
                    : seriate::spectral_sort(sim, ser);
  return SortOutcome{std::move(r), std::move(sim), std::move(loaded.unit_labels)};
}

std::ostream& open_output(const CommonOpts& o, std::ofstream& file) {
  if (o.output.empty() || o.output == "-") return std::cout;
  file.open(o.output);
  if (!file) throw seriate::usage_error("cannot write \"" + o.output + "\"");
  return file;
}

std::string summary_line(const seriate::SeriationResult& r) {
  std::string np;
  try {
    np = std::to_string(seriate::nperm(r.tree));
  } catch (const seriate::overflow_error&) {
    np = "overflow";
  }
  return "nperm=" + np + " mnode=" + (r.has_mnode ? "yes" : "no") +
         " pre_R=" + (r.is_pre_r_certified ? "yes" : "no");
}

int cmd_sort(const CommonOpts& o) {
  SortOutcome s = sort_input(o);
  std::ofstream file;
  std::ostream& out = open_output(o, file);
  const std::string tree = seriate::write_tree(
      s.result.tree, seriate::tree_format_from_string(o.format), s.labels);
  out << tree;
  if (tree.empty() || tree.back() != '\n') out << "\n";
  out << summary_line(s.result) << "\n";
  return s.result.has_mnode ? 2 : 0;
}

int cmd_count(const CommonOpts& o) {
  std::optional<seriate::PQTree> tree;
  bool mnode = false;
  if (input_is_tree(o)) {
    tree = seriate::from_json(slurp(o.input));
    mnode = tree->contains_mnode();
  } else {
    SortOutcome s = sort_input(o);
    tree = std::move(s.result.tree);
    mnode = s.result.has_mnode;
  }
  try {
    std::cout << seriate::nperm(*tree) << "\n";
  } catch (const seriate::overflow_error&) {
    std::cout << "overflow\n";
  }
  return mnode ? 2 : 0;
}

int cmd_perms(const CommonOpts& o) {
  std::optional<seriate::PQTree> tree;
  bool mnode = false;
  if (input_is_tree(o)) {
    tree = seriate::from_json(slurp(o.input));
    mnode = tree->contains_mnode();
  } else {
    SortOutcome s = sort_input(o);
    tree = std::move(s.result.tree);
    mnode = s.result.has_mnode;
  }
  std::ofstream file;
  std::ostream& out = open_output(o, file);
  for (const seriate::Permutation& p : seriate::all_perms(*tree, o.ser.perm_cap)) {
    for (std::size_t i = 0; i < p.size(); ++i) out << (i ? " " : "") << p[i];
    out << "\n";
  }
  return mnode ? 2 : 0;
}

int cmd_apply(const CommonOpts& o, const std::string& which) {
  SortOutcome s = sort_input(o);
  seriate::Permutation p = [&] {
    if (which == "first") return seriate::one_perm(s.result.tree);
    std::uint64_t index = 0;
    try {
      index = std::stoull(which);
    } catch (const std::exception&) {
      throw seriate::usage_error("--which must be \"first\" or a 1-based index");
    }
    const std::vector<seriate::Permutation> all =
        seriate::all_perms(s.result.tree, o.ser.perm_cap);
    if (index < 1 || index > all.size())
      throw seriate::usage_error("--which index outside 1.." +
                                 std::to_string(all.size()));
    return all[index - 1];
  }();
  seriate::SymMatrix reordered = seriate::apply_perm(s.matrix, p);
  std::ofstream file;
  std::ostream& out = open_output(o, file);
  seriate::write_matrix_market(out, reordered);
  return s.result.has_mnode ? 2 : 0;
}

int cmd_bandwidth(const CommonOpts& o) {
  SortOutcome s = sort_input(o);
  const seriate::Permutation p = seriate::one_perm(s.result.tree);
  const int before = seriate::bandwidth(s.matrix);
  const int after = seriate::bandwidth(seriate::apply_perm(s.matrix, p));
  std::cout << "bandwidth before: " << before << "\n";
  std::cout << "bandwidth after:  " << after << "\n";
  return s.result.has_mnode ? 2 : 0;
}

int cmd_subtree(const CommonOpts& o, const std::string& path_spec) {
  const seriate::PQTree tree = seriate::from_json(slurp(o.input));
  std::vector<int> path;
  std::istringstream ss(path_spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    try {
      path.push_back(std::stoi(part));
    } catch (const std::exception&) {
      throw seriate::usage_error("--path expects comma-separated child indices");
    }
  }
  const seriate::PQTree& sub = seriate::subtree(tree, path);
  std::ofstream file;
  std::ostream& out = open_output(o, file);
  const std::string text =
      seriate::write_tree(sub, seriate::tree_format_from_string(o.format));
  out << text;
  if (text.empty() || text.back() != '\n') out << "\n";
  return 0;
}

struct GenOpts {
  std::string kind = "blocks";
  int n = 64;
  int block_size = 16;
  int bw = 2;
  bool dense = false;
  double density = 0.002;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_gen(const GenOpts& g) {
  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!g.output.empty() && g.output != "-") {
    file.open(g.output);
    if (!file) throw seriate::usage_error("cannot write \"" + g.output + "\"");
    out = &file;
  }
  if (g.kind == "blocks") {
    seriate::TestMatrixSpec spec{g.n, g.block_size, g.bw, !g.dense, g.seed};
    seriate::write_matrix_market(*out, seriate::test_matrix(spec).matrix);
  } else if (g.kind == "sparse") {
    seriate::write_matrix_market(*out,
                                 seriate::random_sparse_sym(g.n, g.density, g.seed));
  } else if (g.kind == "bornholm") {
    seriate::write_csv(*out, seriate::bornholm());
  } else {
    throw seriate::usage_error("unknown --kind \"" + g.kind +
                               "\" (expected blocks, sparse, or bornholm)");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral seriation: order units so similar ones sit together"};
  app.require_subcommand(1);

  CommonOpts sort_o, perms_o, count_o, apply_o, band_o, sub_o;
  std::string which = "first";
  std::string path_spec;
  GenOpts gen_o;

  CLI::App* c_sort = app.add_subcommand("sort", "seriate a matrix and print the PQ-tree");
  add_matrix_flags(c_sort, sort_o);
  c_sort->add_option("--format", sort_o.format, "tree format: text, json, or dot")
      ->capture_default_str();
  c_sort->add_option("-o,--output", sort_o.output, "output file (default stdout)");

  CLI::App* c_perms = app.add_subcommand("perms", "list all admissible permutations");
  add_matrix_flags(c_perms, perms_o);
  c_perms->add_option("-o,--output", perms_o.output, "output file (default stdout)");

  CLI::App* c_count = app.add_subcommand("count", "print the number of admissible permutations");
  add_matrix_flags(c_count, count_o);

  CLI::App* c_apply = app.add_subcommand("apply", "reorder the matrix by an admissible permutation");
  add_matrix_flags(c_apply, apply_o);
  c_apply->add_option("--which", which, "\"first\" or a 1-based permutation index")
      ->capture_default_str();
  c_apply->add_option("-o,--output", apply_o.output, "output file (default stdout)");

  CLI::App* c_band = app.add_subcommand("bandwidth", "report half-bandwidth before and after seriation");
  add_matrix_flags(c_band, band_o);

  CLI::App* c_sub = app.add_subcommand("subtree", "extract a subtree from a PQ-tree JSON file");
  c_sub->add_option("input", sub_o.input, "PQ-tree JSON file, or - for stdin")->required();
  c_sub->add_option("--path", path_spec, "comma-separated 0-based child indices (empty = root)");
  c_sub->add_option("--format", sub_o.format, "tree format: text, json, or dot")
      ->capture_default_str();
  c_sub->add_option("-o,--output", sub_o.output, "output file (default stdout)");

  CLI::App* c_gen = app.add_subcommand("gen", "generate a test matrix or dataset");
  c_gen->add_option("--kind", gen_o.kind, "blocks, sparse, or bornholm")->capture_default_str();
  c_gen->add_option("--n", gen_o.n, "matrix size")->capture_default_str();
  c_gen->add_option("--block-size", gen_o.block_size, "size of each diagonal block")
      ->capture_default_str();
  c_gen->add_option("--bw", gen_o.bw, "half-bandwidth of each block")->capture_default_str();
  c_gen->add_flag("--dense", gen_o.dense, "emit dense (array) storage");
  c_gen->add_option("--density", gen_o.density, "nonzero fraction for --kind sparse")
      ->capture_default_str();
  c_gen->add_option("--seed", gen_o.seed, "random seed")->capture_default_str();
  c_gen->add_option("-o,--output", gen_o.output, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_sort->parsed()) return cmd_sort(sort_o);
    if (c_perms->parsed()) return cmd_perms(perms_o);
    if (c_count->parsed()) return cmd_count(count_o);
    if (c_apply->parsed()) return cmd_apply(apply_o, which);
    if (c_band->parsed()) return cmd_bandwidth(band_o);
    if (c_sub->parsed()) return cmd_subtree(sub_o, path_spec);
    if (c_gen->parsed()) return cmd_gen(gen_o);
  } catch (const seriate::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
