#include "lip4/cli/bench.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "lip4/conv/conv_spectrum.hpp"
#include "lip4/dense/estimators.hpp"
#include "lip4/error.hpp"
#include "lip4/linalg/random.hpp"

namespace lip4::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> matrix_axes = {"rows", "cols"};
const std::vector<std::string> conv_axes = {"c_in", "c_out", "n", "k"};
const std::vector<std::string> conv_methods = {"gram", "exact", "power", "power-zero"};

const std::vector<std::string>& axes_for(BenchProblem problem) {
  return problem == BenchProblem::matrix ? matrix_axes : conv_axes;
}

int default_iters(std::string_view method, BenchProblem problem) {
  if (method == "power" || method == "power-zero") return 100;
  if (method == "gram") return problem == BenchProblem::conv ? 5 : 12;
  if (method == "gram-naive" || method == "eigen") return 12;
  return 0;
}

std::uint64_t mix(std::uint64_t x) {
  // splitmix64 finalizer
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t instance_seed(std::uint64_t seed, std::size_t point, int rep) {
  return mix(seed ^ mix(point * 1000003ULL + static_cast<std::uint64_t>(rep)));
}

BenchMethod parse_method(const std::string& spec, BenchProblem problem) {
  BenchMethod m;
  const auto colon = spec.find(':');
  m.name = spec.substr(0, colon);
  if (problem == BenchProblem::matrix) {
    parse_dense_method(m.name);
  } else if (std::find(conv_methods.begin(), conv_methods.end(), m.name) == conv_methods.end()) {
    throw InvalidArgument("unknown conv bench method '" + m.name +
                          "' (expected gram, exact, power or power-zero)");
  }
  if (colon == std::string::npos) {
    m.iters = default_iters(m.name, problem);
  } else {
    try {
      m.iters = std::stoi(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw FormatError("bad iteration count in method '" + spec + "'");
    }
    if (m.iters < 1) throw InvalidArgument("iteration count must be >= 1 in '" + spec + "'");
  }
  m.label = spec;
  return m;
}

std::vector<std::vector<std::size_t>> grid_points(const BenchConfig& config) {
  const auto& axes = axes_for(config.problem);
  std::vector<std::vector<std::size_t>> points{{}};
  for (const auto& axis : axes) {
    const auto& values = config.grid.at(axis);
    std::vector<std::vector<std::size_t>> next;
    if (config.square_channels && axis == "c_out") {
      for (auto& p : points) p.push_back(p.back());
      continue;
    }
    for (const auto& p : points)
      for (auto v : values) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    points = std::move(next);
  }
  return points;
}

struct Sample {
  double value = 0.0;
  double seconds = 0.0;
};

std::vector<Sample> run_instance(const BenchConfig& config, const std::vector<std::size_t>& point,
                                 std::uint64_t seed) {
  std::vector<Sample> out;
  if (config.problem == BenchProblem::matrix) {
    const auto g = gaussian_matrix(point[0], point[1], seed);
    for (const auto& m : config.methods) {
      const auto r = estimate(parse_dense_method(m.name), g, std::max(m.iters, 1), seed + 1);
      out.push_back({r.value, r.elapsed_seconds});
    }
    return out;
  }
  ConvKernel kernel{gaussian_filter(point[1], point[0], point[3], seed), point[2],
                    Padding::circular, 1};
  for (const auto& m : config.methods) {
    ConvBoundReport r;
    if (m.name == "gram")
      r = gram_conv(kernel, m.iters);
    else if (m.name == "exact")
      r = exact_conv_spectrum(kernel);
    else if (m.name == "power")
      r = conv_power_iteration(kernel, m.iters, seed + 1);
    else
      r = conv_power_iteration(with_geometry(kernel, kernel.n(), Padding::zero), m.iters, seed + 1);
    out.push_back({r.value, r.elapsed_seconds});
  }
  return out;
}

std::string number(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

}  // namespace

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw InvalidArgument("unknown format '" + std::string(name) + "' (expected csv or json)");
}

BenchConfig parse_bench_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("bench config: ") + e.what());
  }
  BenchConfig config;
  try {
    for (const auto& [key, value] : doc.items()) {
      static const std::vector<std::string> known = {"problem", "grid",   "methods", "reference",
                                                     "repetitions", "seed", "output", "format"};
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw FormatError("bench config: unknown field '" + key + "'");
    }
    const auto problem = doc.at("problem").get<std::string>();
    if (problem == "matrix")
      config.problem = BenchProblem::matrix;
    else if (problem == "conv")
      config.problem = BenchProblem::conv;
    else
      throw FormatError("bench config: problem must be 'matrix' or 'conv'");

    const auto& axes = axes_for(config.problem);
    for (const auto& [key, value] : doc.at("grid").items()) {
      // "c" sets c_in and c_out together.
      const bool square = config.problem == BenchProblem::conv && key == "c";
      if (!square && std::find(axes.begin(), axes.end(), key) == axes.end())
        throw FormatError("bench config: unknown grid axis '" + key + "'");
      auto values = value.get<std::vector<std::size_t>>();
      if (values.empty() || std::find(values.begin(), values.end(), 0U) != values.end())
        throw FormatError("bench config: grid axis '" + key + "' needs positive values");
      if (square) {
        if (doc.at("grid").contains("c_in") || doc.at("grid").contains("c_out"))
          throw FormatError("bench config: axis 'c' cannot be combined with c_in or c_out");
        config.grid["c_in"] = values;
        config.grid["c_out"] = values;
        config.square_channels = true;
      } else {
        config.grid[key] = std::move(values);
      }
    }
    for (const auto& axis : axes)
      if (!config.grid.contains(axis))
        throw FormatError("bench config: grid is missing axis '" + axis + "'");

    for (const auto& m : doc.at("methods").get<std::vector<std::string>>())
      config.methods.push_back(parse_method(m, config.problem));
    if (config.methods.empty()) throw FormatError("bench config: no methods");
    config.reference = doc.at("reference").get<std::string>();
    config.repetitions = doc.value("repetitions", 1);
    if (config.repetitions < 1) throw FormatError("bench config: repetitions must be >= 1");
    config.seed = doc.value("seed", std::uint64_t{0});
    if (doc.contains("output")) config.output = doc.at("output").get<std::string>();
    if (doc.contains("format")) config.format = parse_format(doc.at("format").get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("bench config: ") + e.what());
  }

  const bool has_reference =
      std::any_of(config.methods.begin(), config.methods.end(),
                  [&](const BenchMethod& m) { return m.label == config.reference; });
  if (!has_reference)
    throw InvalidArgument("bench config: reference method '" + config.reference +
                          "' is not in the method set");
  if (config.problem == BenchProblem::conv)
    for (auto n : config.grid.at("n"))
      for (auto k : config.grid.at("k"))
        if (k > n)
          throw InvalidArgument("bench config: k = " + std::to_string(k) + " exceeds n = " +
                                std::to_string(n));
  return config;
}

BenchResult run_bench(const BenchConfig& config, unsigned workers) {
  const auto points = grid_points(config);
  const std::size_t reps = static_cast<std::size_t>(config.repetitions);
  const std::size_t tasks = points.size() * reps;
  std::vector<std::vector<Sample>> samples(tasks);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t task = next++; task < tasks; task = next++) {
      try {
        const std::size_t p = task / reps;
        const int rep = static_cast<int>(task % reps);
        samples[task] = run_instance(config, points[p], instance_seed(config.seed, p, rep));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  workers = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(tasks)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  std::size_t ref_index = 0;
  for (std::size_t m = 0; m < config.methods.size(); ++m)
    if (config.methods[m].label == config.reference) ref_index = m;

  BenchResult result;
  result.axes = axes_for(config.problem);
  for (std::size_t p = 0; p < points.size(); ++p) {
    std::vector<std::vector<BenchRow>> by_method(config.methods.size());
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const auto& s = samples[p * reps + rep];
      const double ref = s[ref_index].value;
      for (std::size_t m = 0; m < config.methods.size(); ++m) {
        BenchRow row{"sample", points[p], static_cast<int>(rep), config.methods[m].label};
        row.value = s[m].value;
        row.reference_value = ref;
        row.diff = m == ref_index ? 0.0 : row.value - ref;
        row.error_ratio = m == ref_index ? 0.0 : (ref != 0.0 ? row.value / ref - 1.0 : 0.0);
        row.abs_error_ratio = std::abs(row.error_ratio);
        row.seconds = s[m].seconds;
        result.rows.push_back(row);
        by_method[m].push_back(row);
      }
    }
    for (std::size_t m = 0; m < config.methods.size(); ++m) {
      const auto& rows = by_method[m];
      auto stat = [&](auto field, bool want_std) {
        double mean = 0.0;
        for (const auto& r : rows) mean += r.*field;
        mean /= static_cast<double>(rows.size());
        if (!want_std) return mean;
        if (rows.size() < 2) return 0.0;
        double var = 0.0;
        for (const auto& r : rows) var += (r.*field - mean) * (r.*field - mean);
        return std::sqrt(var / static_cast<double>(rows.size() - 1));
      };
      for (bool want_std : {false, true}) {
        BenchRow agg{want_std ? "std" : "mean", points[p], -1, config.methods[m].label};
        agg.value = stat(&BenchRow::value, want_std);
        agg.reference_value = stat(&BenchRow::reference_value, want_std);
        agg.diff = stat(&BenchRow::diff, want_std);
        agg.error_ratio = stat(&BenchRow::error_ratio, want_std);
        agg.abs_error_ratio = stat(&BenchRow::abs_error_ratio, want_std);
        agg.seconds = stat(&BenchRow::seconds, want_std);
        result.rows.push_back(agg);
      }
    }
  }
  return result;
}

void write_bench_csv(std::ostream& out, const BenchResult& result) {
  out << "# lip4-bench v1\n";
  out << "row_type";
  for (const auto& a : result.axes) out << ',' << a;
  out << ",rep,method,value,reference_value,diff,error_ratio,abs_error_ratio,seconds\n";
  for (const auto& r : result.rows) {
    out << r.row_type;
    for (auto v : r.point) out << ',' << v;
    out << ',' << (r.rep >= 0 ? std::to_string(r.rep) : std::string{}) << ',' << r.method << ','
        << number(r.value) << ',' << number(r.reference_value) << ',' << number(r.diff) << ','
        << number(r.error_ratio) << ',' << number(r.abs_error_ratio) << ',' << number(r.seconds)
        << '\n';
  }
}

void write_bench_json(std::ostream& out, const BenchResult& result) {
  json doc;
  doc["schema"] = "lip4-bench v1";
  doc["axes"] = result.axes;
  doc["rows"] = json::array();
  for (const auto& r : result.rows) {
    json row;
    row["row_type"] = r.row_type;
    for (std::size_t a = 0; a < result.axes.size(); ++a) row[result.axes[a]] = r.point[a];
    row["rep"] = r.rep >= 0 ? json(r.rep) : json(nullptr);
    row["method"] = r.method;
    row["value"] = r.value;
    row["reference_value"] = r.reference_value;
    row["diff"] = r.diff;
    row["error_ratio"] = r.error_ratio;
    row["abs_error_ratio"] = r.abs_error_ratio;
    row["seconds"] = r.seconds;
    doc["rows"].push_back(row);
  }
  out << doc.dump(2) << '\n';
}

}  // namespace lip4::cli
