#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lip4::cli {

enum class OutputFormat { csv, json };
OutputFormat parse_format(std::string_view name);

/// A method in a sweep, written "name" or "name:iters" in the config.
struct BenchMethod {
  std::string name;
  int iters = 0;
  /// Label used in output rows and to match the reference, e.g. "gram:12".
  std::string label;
};

enum class BenchProblem { matrix, conv };

struct BenchConfig {
  BenchProblem problem = BenchProblem::conv;
  /// Axis name -> values. matrix: rows, cols. conv: c_in, c_out, n, k.
  std::map<std::string, std::vector<std::size_t>> grid;
  /// Set when the grid used the "c" axis: c_out follows c_in.
  bool square_channels = false;
  std::vector<BenchMethod> methods;
  std::string reference;
  int repetitions = 1;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> output;
  OutputFormat format = OutputFormat::csv;
};

/// One result for (grid point, repetition, method), or an aggregate over repetitions.
struct BenchRow {
  std::string row_type;  // sample, mean, std
  std::vector<std::size_t> point;
  int rep = -1;  // -1 for aggregates
  std::string method;
  double value = 0.0;
  double reference_value = 0.0;
  double diff = 0.0;
  double error_ratio = 0.0;
  double abs_error_ratio = 0.0;
  double seconds = 0.0;
};

struct BenchResult {
  std::vector<std::string> axes;
  std::vector<BenchRow> rows;
};

/// Parses and validates the config document. Throws FormatError on malformed
/// JSON and InvalidArgument when the reference is not one of the methods.
BenchConfig parse_bench_config(std::string_view json_text);

/// Runs the sweep on `workers` threads. Rows come out in grid order regardless.
BenchResult run_bench(const BenchConfig& config, unsigned workers);

void write_bench_csv(std::ostream& out, const BenchResult& result);
void write_bench_json(std::ostream& out, const BenchResult& result);

}  // namespace lip4::cli
