#include "lip4/cli/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "lip4/cli/bench.hpp"
#include "lip4/conv/conv_spectrum.hpp"
#include "lip4/conv/lipk.hpp"
#include "lip4/dense/estimators.hpp"
#include "lip4/error.hpp"
#include "lip4/linalg/random.hpp"
#include "lip4/linalg/svd.hpp"
#include "lip4/network/network.hpp"

namespace lip4::cli {

namespace {

using nlohmann::json;

std::string number(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

// Writes to `path`, or to `fallback` when no path is given.
void emit(const std::optional<std::string>& path, std::ostream& fallback,
          const std::string& content) {
  if (!path) {
    fallback << content;
    return;
  }
  std::ofstream file(*path, std::ios::trunc);
  if (!file) throw FormatError("cannot write output file '" + *path + "'");
  file << content;
}

struct CommonOptions {
  std::optional<std::string> out;
  std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOptions& common) {
  cmd->add_option("--out", common.out, "Write machine-readable results to this file");
  cmd->add_option("--format", common.format, "Output format for --out")
      ->check(CLI::IsMember({"csv", "json"}));
}

// ---------------------------------------------------------------------------

struct MatrixArgs {
  std::optional<std::string> input;
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool complex_entries = false;
  std::string method = "gram";
  std::optional<int> iters;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> data_seed;
  bool trace = false;
  CommonOptions common;
};

int matrix_command(const MatrixArgs& args, std::ostream& out) {
  ComplexMatrix g;
  if (args.input) {
    g = read_lipk_matrix(*args.input);
  } else {
    if (args.rows == 0 || args.cols == 0)
      throw InvalidArgument("matrix: give --input or both --rows and --cols");
    g = gaussian_matrix(args.rows, args.cols, args.data_seed.value_or(args.seed), args.complex_entries);
  }
  const DenseMethod method = parse_dense_method(args.method);
  const int iters = args.iters.value_or(method == DenseMethod::power_iteration ? 100 : 12);
  const auto report = estimate(method, g, iters, args.seed);

  const auto fmt = parse_format(args.common.format);
  if (args.trace) {
    const double reference = spectral_norm_exact(g);
    std::ostringstream body;
    if (fmt == OutputFormat::csv) {
      body << "# lip4-matrix-trace v1\niter,value,abs_error\n";
      for (std::size_t i = 0; i < report.trace.size(); ++i)
        body << i + 1 << ',' << number(report.trace[i]) << ','
             << number(std::abs(report.trace[i] - reference)) << '\n';
    } else {
      json doc{{"method", to_string(method)}, {"reference", reference}, {"trace", json::array()}};
      for (std::size_t i = 0; i < report.trace.size(); ++i)
        doc["trace"].push_back({{"iter", i + 1},
                                {"value", report.trace[i]},
                                {"abs_error", std::abs(report.trace[i] - reference)}});
      body << doc.dump(2) << '\n';
    }
    emit(args.common.out, out, body.str());
    if (!args.common.out) return 0;
  }

  out << "method: " << to_string(method) << '\n'
      << "shape: " << g.shape_string() << '\n'
      << "value: " << number(report.value) << '\n'
      << "iterations: " << report.iterations << '\n'
      << "elapsed_seconds: " << number(report.elapsed_seconds) << '\n';
  if (args.common.out && !args.trace) {
    std::ostringstream body;
    if (fmt == OutputFormat::csv) {
      body << "# lip4-matrix v1\nmethod,rows,cols,value,iterations,elapsed_seconds\n"
           << to_string(method) << ',' << g.rows() << ',' << g.cols() << ','
           << number(report.value) << ',' << report.iterations << ','
           << number(report.elapsed_seconds) << '\n';
    } else {
      body << json{{"method", to_string(method)},
                   {"rows", g.rows()},
                   {"cols", g.cols()},
                   {"value", report.value},
                   {"iterations", report.iterations},
                   {"elapsed_seconds", report.elapsed_seconds},
                   {"trace", report.trace}}
                  .dump(2)
           << '\n';
    }
    emit(args.common.out, out, body.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct KernelArgs {
  std::optional<std::string> kernel;
  std::size_t c_in = 0;
  std::size_t c_out = 0;
  std::size_t k = 0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> data_seed;
};

void add_kernel_options(CLI::App* cmd, KernelArgs& args) {
  cmd->add_option("--kernel", args.kernel, "LIPK filter file (c_out, c_in, k, k)");
  cmd->add_option("--c-in", args.c_in, "Synthetic kernel input channels");
  cmd->add_option("--c-out", args.c_out, "Synthetic kernel output channels");
  cmd->add_option("-k,--k", args.k, "Synthetic kernel size");
  cmd->add_option("-n,--n", args.n, "Input spatial size")->required();
  cmd->add_option("--seed", args.seed, "Seed for power iteration (and synthetic kernels)");
  cmd->add_option("--data-seed", args.data_seed, "Seed for the synthetic kernel (default: --seed)");
}

ConvKernel load_kernel(const KernelArgs& args, Padding padding) {
  ConvKernel kernel;
  if (args.kernel) {
    kernel.filter = read_lipk(*args.kernel);
  } else {
    if (args.c_in == 0 || args.c_out == 0 || args.k == 0)
      throw InvalidArgument("give --kernel or all of --c-in, --c-out, --k");
    kernel.filter = gaussian_filter(args.c_out, args.c_in, args.k, args.data_seed.value_or(args.seed));
  }
  kernel.input_size = args.n;
  kernel.padding = padding;
  kernel.validate_spectral();
  return kernel;
}

struct ConvArgs {
  KernelArgs kernel;
  std::string method = "gram";
  std::string padding = "circular";
  std::optional<int> iters;
  std::optional<std::size_t> n0;
  CommonOptions common;
};

int conv_command(const ConvArgs& args, std::ostream& out) {
  const Padding padding = parse_padding(args.padding);
  const ConvKernel kernel = load_kernel(args.kernel, padding);
  if (padding == Padding::zero && args.method != "power")
    throw InvalidArgument("conv: zero padding is only supported by --method power");
  if (args.n0 && args.method != "gram")
    throw InvalidArgument("conv: --n0 applies to --method gram only");

  ConvBoundReport report;
  if (args.method == "gram") {
    const int iters = args.iters.value_or(5);
    report = args.n0 ? gram_conv_subsampled(kernel, *args.n0, iters) : gram_conv(kernel, iters);
  } else if (args.method == "exact") {
    report = exact_conv_spectrum(kernel);
  } else if (args.method == "power") {
    report = conv_power_iteration(kernel, args.iters.value_or(100), args.kernel.seed);
  } else {
    throw InvalidArgument("unknown conv method '" + args.method + "' (expected gram, exact or power)");
  }

  const auto block = report.argmax_block.value_or(std::pair<std::size_t, std::size_t>{0, 0});
  const std::string argmax_u = report.argmax_block ? std::to_string(block.first) : "";
  const std::string argmax_v = report.argmax_block ? std::to_string(block.second) : "";
  const std::string argmax = report.argmax_block ? argmax_u + "," + argmax_v : "-";
  out << "method: " << to_string(report.method) << '\n'
      << "filter: " << kernel.c_out() << "x" << kernel.c_in() << "x" << kernel.k() << "x"
      << kernel.k() << '\n'
      << "n: " << kernel.n() << '\n'
      << "padding: " << to_string(kernel.padding) << '\n'
      << "value: " << number(report.value) << '\n'
      << "argmax_frequency: " << argmax << '\n'
      << "iterations: " << report.iterations << '\n'
      << "elapsed_seconds: " << number(report.elapsed_seconds) << '\n';

  if (args.common.out) {
    std::ostringstream body;
    if (parse_format(args.common.format) == OutputFormat::csv) {
      body << "# lip4-conv v1\nmethod,c_out,c_in,k,n,padding,value,argmax_u,argmax_v,"
              "iterations,elapsed_seconds\n"
           << to_string(report.method) << ',' << kernel.c_out() << ',' << kernel.c_in() << ','
           << kernel.k() << ',' << kernel.n() << ',' << to_string(kernel.padding) << ','
           << number(report.value) << ','
           << argmax_u << ',' << argmax_v << ','
           << report.iterations << ',' << number(report.elapsed_seconds) << '\n';
    } else {
      json doc{{"method", to_string(report.method)},
               {"filter", {kernel.c_out(), kernel.c_in(), kernel.k(), kernel.k()}},
               {"n", kernel.n()},
               {"padding", to_string(kernel.padding)},
               {"value", report.value},
               {"iterations", report.iterations},
               {"elapsed_seconds", report.elapsed_seconds},
               {"trace", report.trace}};
      doc["argmax_frequency"] =
          report.argmax_block
              ? json::array({block.first, block.second})
              : json(nullptr);
      body << doc.dump(2) << '\n';
    }
    emit(args.common.out, out, body.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct NetworkArgs {
  std::string spec;
  std::string method = "gram";
  int iters = 7;
  std::uint64_t seed = 0;
  CommonOptions common;
};

int network_command(const NetworkArgs& args, std::ostream& out) {
  const NetworkSpec net = load_network(args.spec);
  const LayerOptions options{parse_network_estimator(args.method), args.iters, args.seed};
  const auto report = network_bound(net, options);

  out << "network: " << net.name << '\n' << "estimator: " << to_string(report.estimator) << '\n';
  out << std::left << std::setw(6) << "index" << std::setw(19) << "kind" << std::setw(32)
      << "shape" << std::setw(24) << "bound"
      << "seconds\n";
  for (const auto& l : report.per_layer)
    out << std::setw(6) << l.index << std::setw(19) << l.kind << std::setw(32) << l.description
        << std::setw(24) << number(l.bound) << number(l.elapsed_seconds) << '\n';
  out << "total: " << number(report.total) << '\n';

  if (args.common.out) {
    std::ostringstream body;
    if (parse_format(args.common.format) == OutputFormat::csv) {
      body << "# lip4-network v1\nindex,kind,shape,bound,seconds\n";
      for (const auto& l : report.per_layer)
        body << l.index << ',' << l.kind << ",\"" << l.description << "\"," << number(l.bound)
             << ',' << number(l.elapsed_seconds) << '\n';
      body << "total,,," << number(report.total) << ",\n";
    } else {
      json doc{{"network", net.name},
               {"estimator", to_string(report.estimator)},
               {"total", report.total},
               {"per_layer", json::array()}};
      for (const auto& l : report.per_layer)
        doc["per_layer"].push_back({{"index", l.index},
                                    {"kind", l.kind},
                                    {"shape", l.description},
                                    {"bound", l.bound},
                                    {"seconds", l.elapsed_seconds}});
      body << doc.dump(2) << '\n';
    }
    emit(args.common.out, out, body.str());
  }
  return 0;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

int bench_command(const BenchArgs& args, std::ostream& out) {
  std::ifstream in(args.config);
  if (!in) throw FormatError("cannot open bench config '" + args.config + "'");
  std::stringstream text;
  text << in.rdbuf();
  BenchConfig config = parse_bench_config(text.str());
  if (args.out) config.output = *args.out;
  if (args.format) config.format = parse_format(*args.format);

  const auto result = run_bench(config, worker_count());
  std::ostringstream body;
  if (config.format == OutputFormat::csv)
    write_bench_csv(body, result);
  else
    write_bench_json(body, result);
  emit(config.output ? std::optional<std::string>(config.output->string()) : std::nullopt, out,
       body.str());
  return 0;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
  KernelArgs kernel;
  int iters = 12;
  int power_iters = 2000;
  CommonOptions common;
};

int compare_command(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  const ConvKernel circular = load_kernel(args.kernel, Padding::circular);
  const ConvKernel zero = with_geometry(circular, circular.n(), Padding::zero);

  const auto bound = gram_conv(circular, args.iters);
  json doc{{"circular_bound", bound.value}};
  out << "circular_bound: " << number(bound.value) << '\n';
  if (!can_materialize(circular)) {
    err << "warning: operator exceeds " << materialize_limit
        << " rows or columns; reporting the circular bound only\n";
  } else {
    const auto estimate = conv_power_iteration(zero, args.power_iters, args.kernel.seed);
    const double circular_exact = spectral_norm_exact(materialize_conv_operator(circular));
    const double zero_exact = spectral_norm_exact(materialize_conv_operator(zero));
    const double gap = estimate.value - bound.value;
    const double exact_gap = zero_exact - circular_exact;
    out << "zero_padding_estimate: " << number(estimate.value) << '\n'
        << "gap: " << number(gap) << '\n'
        << "circular_exact: " << number(circular_exact) << '\n'
        << "zero_padding_exact: " << number(zero_exact) << '\n'
        << "exact_gap: " << number(exact_gap) << '\n';
    doc["zero_padding_estimate"] = estimate.value;
    doc["gap"] = gap;
    doc["circular_exact"] = circular_exact;
    doc["zero_padding_exact"] = zero_exact;
    doc["exact_gap"] = exact_gap;
  }
  if (args.common.out) {
    std::ostringstream body;
    if (parse_format(args.common.format) == OutputFormat::csv) {
      body << "# lip4-compare v1\nquantity,value\n";
      for (const auto& [key, value] : doc.items()) body << key << ',' << number(value.get<double>()) << '\n';
    } else {
      body << doc.dump(2) << '\n';
    }
    emit(args.common.out, out, body.str());
  }
  return 0;
}

}  // namespace

unsigned worker_count() {
  if (const char* env = std::getenv("LIP4_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified spectral-norm and Lipschitz bounds via Gram iteration", "lip4"};
  app.require_subcommand(1);

  MatrixArgs matrix;
  auto* m = app.add_subcommand("matrix", "Spectral norm of a dense matrix");
  m->add_option("--input", matrix.input, "LIPK matrix file (rows, cols, 1, 1)");
  m->add_option("--rows", matrix.rows, "Rows of a synthetic Gaussian matrix");
  m->add_option("--cols", matrix.cols, "Columns of a synthetic Gaussian matrix");
  m->add_flag("--complex", matrix.complex_entries, "Complex Gaussian entries");
  m->add_option("--method", matrix.method, "power, gram, gram-naive, svd or eigen");
  m->add_option("--iters", matrix.iters, "Iterations (gram 12, power 100)");
  m->add_option("--seed", matrix.seed, "Seed for power iteration (and synthetic input)");
  m->add_option("--data-seed", matrix.data_seed, "Seed for the synthetic matrix (default: --seed)");
  m->add_flag("--trace", matrix.trace, "Per-iteration error against the SVD reference");
  add_common(m, matrix.common);

  ConvArgs conv;
  auto* c = app.add_subcommand("conv", "Spectral norm of a convolutional layer");
  add_kernel_options(c, conv.kernel);
  c->add_option("--method", conv.method, "gram, exact or power");
  c->add_option("--padding", conv.padding, "circular or zero (power only)");
  c->add_option("--iters", conv.iters, "Iterations (gram 5, power 100)");
  c->add_option("--n0", conv.n0, "Sub-sampled spatial size for gram");
  add_common(c, conv.common);

  NetworkArgs network;
  auto* nw = app.add_subcommand("network", "Lipschitz bound of a whole network");
  nw->add_option("spec", network.spec, "Network JSON document")->required();
  nw->add_option("--method", network.method, "gram, exact or power");
  nw->add_option("--iters", network.iters, "Iterations for gram/power");
  nw->add_option("--seed", network.seed, "Power-iteration seed");
  add_common(nw, network.common);

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Sweep a synthetic problem grid");
  b->add_option("config", bench.config, "Bench config JSON")->required();
  b->add_option("--out", bench.out, "Output file (overrides config)");
  b->add_option("--format", bench.format, "csv or json (overrides config)")
      ->check(CLI::IsMember({"csv", "json"}));

  CompareArgs compare;
  auto* cmp = app.add_subcommand("compare", "Circular bound vs zero-padding operator norm");
  add_kernel_options(cmp, compare.kernel);
  cmp->add_option("--iters", compare.iters, "Gram iterations");
  cmp->add_option("--power-iters", compare.power_iters, "Zero-padding power iterations");
  add_common(cmp, compare.common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : static_cast<int>(ExitCode::usage);
  }

  try {
    if (m->parsed()) return matrix_command(matrix, out);
    if (c->parsed()) return conv_command(conv, out);
    if (nw->parsed()) return network_command(network, out);
    if (b->parsed()) return bench_command(bench, out);
    if (cmp->parsed()) return compare_command(compare, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.exit_code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical);
  }
  return static_cast<int>(ExitCode::usage);
}

}  // namespace lip4::cli
