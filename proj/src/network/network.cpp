#include "lip4/network/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lip4/conv/conv_spectrum.hpp"
#include "lip4/conv/lipk.hpp"
#include "lip4/dense/estimators.hpp"
#include "lip4/error.hpp"
#include "lip4/stopwatch.hpp"

namespace lip4 {

namespace {

using nlohmann::json;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

const std::set<std::string, std::less<>> one_lipschitz = {"relu", "sigmoid", "tanh"};

// Rethrows the active exception with `prefix` prepended, keeping its category.
[[noreturn]] void rethrow_with(const std::string& prefix) {
  try {
    throw;
  } catch (const FormatError& e) {
    throw FormatError(prefix + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(prefix + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(prefix + e.what());
  } catch (const json::exception& e) {
    throw FormatError(prefix + e.what());
  }
}

double conv_bound(const ConvLayer& layer, NetworkEstimator estimator, const LayerOptions& opt) {
  switch (estimator) {
    case NetworkEstimator::gram:
      return gram_conv(with_geometry(layer.kernel, layer.kernel.n(), Padding::circular), opt.n_iter)
          .value;
    case NetworkEstimator::exact:
      return exact_conv_spectrum(with_geometry(layer.kernel, layer.kernel.n(), Padding::circular))
          .value;
    case NetworkEstimator::power:
      return conv_power_iteration(layer.kernel, opt.n_iter, opt.seed).value;
  }
  throw InvalidArgument("unknown estimator");
}

double dense_bound(const DenseLayer& layer, NetworkEstimator estimator, const LayerOptions& opt) {
  switch (estimator) {
    case NetworkEstimator::gram: return gram_rescaled(layer.matrix, opt.n_iter).value;
    case NetworkEstimator::exact: return svd_exact(layer.matrix).value;
    case NetworkEstimator::power: return power_iteration(layer.matrix, opt.n_iter, opt.seed).value;
  }
  throw InvalidArgument("unknown estimator");
}

}  // namespace

std::string_view to_string(NetworkEstimator estimator) noexcept {
  switch (estimator) {
    case NetworkEstimator::gram: return "gram";
    case NetworkEstimator::exact: return "exact";
    case NetworkEstimator::power: return "power";
  }
  return "unknown";
}

NetworkEstimator parse_network_estimator(std::string_view name) {
  for (auto e : {NetworkEstimator::gram, NetworkEstimator::exact, NetworkEstimator::power})
    if (to_string(e) == name) return e;
  throw InvalidArgument("unknown estimator '" + std::string(name) +
                        "' (expected gram, exact or power)");
}

std::string_view kind_name(const LayerSpec& layer) noexcept {
  return std::visit(overloaded{
                        [](const ConvLayer&) { return std::string_view("conv"); },
                        [](const DenseLayer&) { return std::string_view("dense"); },
                        [](const ActivationLayer&) { return std::string_view("activation"); },
                        [](const CustomActivationLayer&) {
                          return std::string_view("custom_activation");
                        },
                        [](const MaxPoolLayer&) { return std::string_view("maxpool"); },
                        [](const BatchNormLayer&) { return std::string_view("batchnorm"); },
                        [](const ResidualBlock&) { return std::string_view("residual"); },
                    },
                    layer.payload);
}

std::string describe(const LayerSpec& layer) {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const ConvLayer& c) {
                   out << c.kernel.c_out() << "x" << c.kernel.c_in() << "x" << c.kernel.k() << "x"
                       << c.kernel.k() << " n=" << c.kernel.n() << " " << to_string(c.kernel.padding);
                 },
                 [&](const DenseLayer& d) { out << d.matrix.shape_string(); },
                 [&](const ActivationLayer& a) { out << a.name; },
                 [&](const CustomActivationLayer& a) { out << "L=" << a.lipschitz; },
                 [&](const MaxPoolLayer& p) {
                   out << "k=" << p.k << " stride=" << p.stride << " n=" << p.n;
                 },
                 [&](const BatchNormLayer& b) { out << b.gamma.size() << " channels"; },
                 [&](const ResidualBlock& r) { out << r.inner.size() << " inner layers"; },
             },
             layer.payload);
  return out.str();
}

double maxpool_bound(const MaxPoolLayer& pool) {
  if (pool.k == 0 || pool.stride == 0 || pool.n == 0)
    throw InvalidArgument("maxpool: k, stride and n must be positive");
  if (pool.k > pool.n) throw InvalidArgument("maxpool: k exceeds input size");
  const std::size_t reach = std::min(pool.k, pool.n - pool.k + 1);
  const auto reps = static_cast<double>((reach + pool.stride - 1) / pool.stride);
  return reps * reps;
}

double batchnorm_bound(const BatchNormLayer& bn) {
  if (bn.gamma.empty() || bn.gamma.size() != bn.variance.size())
    throw InvalidArgument("batchnorm: gamma and variance must be non-empty and equally long");
  if (!(bn.eps > 0.0)) throw InvalidArgument("batchnorm: eps must be positive");
  double best = 0.0;
  for (std::size_t i = 0; i < bn.gamma.size(); ++i) {
    if (bn.variance[i] < 0.0) throw InvalidArgument("batchnorm: negative variance");
    best = std::max(best, std::abs(bn.gamma[i]) / std::sqrt(bn.variance[i] + bn.eps));
  }
  return best;
}

double layer_bound(const LayerSpec& layer, const LayerOptions& options) {
  return std::visit(
      overloaded{
          [&](const ConvLayer& c) {
            return conv_bound(c, c.estimator.value_or(options.estimator), options);
          },
          [&](const DenseLayer& d) {
            return dense_bound(d, d.estimator.value_or(options.estimator), options);
          },
          [](const ActivationLayer& a) -> double {
            if (!one_lipschitz.contains(a.name))
              throw InvalidArgument("activation '" + a.name +
                                    "' is not known to be 1-Lipschitz; declare it as "
                                    "custom_activation with an explicit constant");
            return 1.0;
          },
          [](const CustomActivationLayer& a) {
            if (!(a.lipschitz >= 0.0) || !std::isfinite(a.lipschitz))
              throw InvalidArgument("custom_activation: Lipschitz constant must be finite and >= 0");
            return a.lipschitz;
          },
          [](const MaxPoolLayer& p) { return maxpool_bound(p); },
          [](const BatchNormLayer& b) { return batchnorm_bound(b); },
          [&](const ResidualBlock& r) {
            double inner = 1.0;
            for (std::size_t i = 0; i < r.inner.size(); ++i) {
              try {
                inner *= layer_bound(r.inner[i], options);
              } catch (...) {
                rethrow_with("inner layer " + std::to_string(i) + ": ");
              }
            }
            return 1.0 + inner;
          },
      },
      layer.payload);
}

NetworkBoundReport network_bound(const NetworkSpec& net, const LayerOptions& options) {
  if (net.layers.empty()) throw InvalidArgument("network '" + net.name + "' has no layers");
  NetworkBoundReport report;
  report.estimator = options.estimator;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const auto& layer = net.layers[i];
    Stopwatch clock;
    double bound = 0.0;
    try {
      bound = layer_bound(layer, options);
    } catch (...) {
      rethrow_with("layer " + std::to_string(i) + " (" + std::string(kind_name(layer)) + "): ");
    }
    report.per_layer.push_back({i, std::string(kind_name(layer)), describe(layer), bound,
                                clock.seconds()});
    report.total *= bound;
  }
  return report;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

void check_fields(const json& j, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw FormatError("layer must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw FormatError("unknown field '" + key + "'");
  }
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  return j.at(key).get<T>();
}

std::size_t positive(const json& j, const char* key) {
  const auto v = required<long long>(j, key);
  if (v <= 0) throw FormatError(std::string("field '") + key + "' must be positive");
  return static_cast<std::size_t>(v);
}

std::optional<NetworkEstimator> optional_estimator(const json& j) {
  if (!j.contains("estimator")) return std::nullopt;
  return parse_network_estimator(j.at("estimator").get<std::string>());
}

LayerSpec parse_layer(const json& j, const std::filesystem::path& base_dir);

std::vector<LayerSpec> parse_layers(const json& layers, const std::filesystem::path& base_dir,
                                    const std::string& prefix) {
  if (!layers.is_array()) throw FormatError(prefix + "'layers' must be an array");
  std::vector<LayerSpec> out;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    try {
      out.push_back(parse_layer(layers[i], base_dir));
    } catch (...) {
      rethrow_with(prefix + "layer " + std::to_string(i) + ": ");
    }
  }
  return out;
}

LayerSpec parse_layer(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object() || !j.contains("kind")) throw FormatError("layer needs a 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "conv") {
    check_fields(j, {"kind", "weights", "input_size", "padding", "stride", "estimator"});
    ConvLayer c;
    c.kernel.filter = read_lipk(base_dir / required<std::string>(j, "weights"));
    c.kernel.input_size = positive(j, "input_size");
    if (j.contains("padding")) c.kernel.padding = parse_padding(j.at("padding").get<std::string>());
    if (j.contains("stride")) c.kernel.stride = positive(j, "stride");
    c.kernel.validate_spectral();
    c.estimator = optional_estimator(j);
    return {std::move(c)};
  }
  if (kind == "dense") {
    check_fields(j, {"kind", "weights", "estimator"});
    DenseLayer d{read_lipk_matrix(base_dir / required<std::string>(j, "weights")),
                 optional_estimator(j)};
    return {std::move(d)};
  }
  if (kind == "activation") {
    check_fields(j, {"kind", "name"});
    return {ActivationLayer{required<std::string>(j, "name")}};
  }
  if (kind == "custom_activation") {
    check_fields(j, {"kind", "lipschitz"});
    return {CustomActivationLayer{required<double>(j, "lipschitz")}};
  }
  if (kind == "maxpool") {
    check_fields(j, {"kind", "k", "stride", "n"});
    MaxPoolLayer p{positive(j, "k"), positive(j, "stride"), positive(j, "n")};
    maxpool_bound(p);
    return {p};
  }
  if (kind == "batchnorm") {
    check_fields(j, {"kind", "gamma", "variance", "eps"});
    BatchNormLayer b{required<std::vector<double>>(j, "gamma"),
                     required<std::vector<double>>(j, "variance"), 1e-5};
    if (j.contains("eps")) b.eps = j.at("eps").get<double>();
    batchnorm_bound(b);
    return {std::move(b)};
  }
  if (kind == "residual") {
    check_fields(j, {"kind", "layers"});
    if (!j.contains("layers")) throw FormatError("missing field 'layers'");
    return {ResidualBlock{parse_layers(j.at("layers"), base_dir, "inner ")}};
  }
  throw FormatError("unknown layer kind '" + kind + "'");
}

}  // namespace

NetworkSpec parse_network(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("network JSON: ") + e.what());
  }
  try {
    check_fields(doc, {"name", "layers"});
    NetworkSpec net;
    net.name = doc.value("name", std::string{});
    if (!doc.contains("layers")) throw FormatError("missing field 'layers'");
    net.layers = parse_layers(doc.at("layers"), base_dir, "");
    if (net.layers.empty()) throw FormatError("network has no layers");
    return net;
  } catch (const InvalidArgument& e) {
    // Bad values inside the document are input-format problems.
    throw FormatError(e.what());
  } catch (const json::exception& e) {
    throw FormatError(std::string("network JSON: ") + e.what());
  }
}

NetworkSpec load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open network spec '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_network(buffer.str(), path.parent_path());
}

}  // namespace lip4
