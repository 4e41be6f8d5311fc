#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lip4/conv/conv_kernel.hpp"
#include "lip4/linalg/complex_matrix.hpp"

namespace lip4 {

/// How conv and dense layers are bounded.
enum class NetworkEstimator { gram, exact, power };

std::string_view to_string(NetworkEstimator estimator) noexcept;
NetworkEstimator parse_network_estimator(std::string_view name);

struct LayerSpec;

struct ConvLayer {
  ConvKernel kernel;
  std::optional<NetworkEstimator> estimator;  // overrides the network-wide choice
};

struct DenseLayer {
  ComplexMatrix matrix;
  std::optional<NetworkEstimator> estimator;
};

/// One of the 1-Lipschitz activations: relu, sigmoid, tanh.
struct ActivationLayer {
  std::string name;
};

/// Any other activation, with its Lipschitz constant declared by the user.
struct CustomActivationLayer {
  double lipschitz = 1.0;
};

struct MaxPoolLayer {
  std::size_t k = 0;
  std::size_t stride = 0;
  std::size_t n = 0;
};

struct BatchNormLayer {
  std::vector<double> gamma;
  std::vector<double> variance;
  double eps = 1e-5;
};

/// x -> x + inner(x).
struct ResidualBlock {
  std::vector<LayerSpec> inner;
};

struct LayerSpec {
  std::variant<ConvLayer, DenseLayer, ActivationLayer, CustomActivationLayer, MaxPoolLayer,
               BatchNormLayer, ResidualBlock>
      payload;
};

struct NetworkSpec {
  std::string name;
  std::vector<LayerSpec> layers;
};

/// "conv", "dense", "activation", "custom_activation", "maxpool", "batchnorm", "residual".
std::string_view kind_name(const LayerSpec& layer) noexcept;

/// Short human description, e.g. "16x16x3x3 n=32" for a conv layer.
std::string describe(const LayerSpec& layer);

struct LayerOptions {
  NetworkEstimator estimator = NetworkEstimator::gram;
  int n_iter = 7;
  std::uint64_t seed = 0;
};

/// ceil(min(k, n - k + 1) / stride)^2
double maxpool_bound(const MaxPoolLayer& pool);

/// max_i |gamma_i| / sqrt(variance_i + eps)
double batchnorm_bound(const BatchNormLayer& bn);

/// Lipschitz bound of a single layer. Residual blocks give 1 + prod(inner bounds).
double layer_bound(const LayerSpec& layer, const LayerOptions& options);

struct LayerBound {
  std::size_t index = 0;
  std::string kind;
  std::string description;
  double bound = 0.0;
  double elapsed_seconds = 0.0;
};

struct NetworkBoundReport {
  double total = 1.0;
  std::vector<LayerBound> per_layer;
  NetworkEstimator estimator = NetworkEstimator::gram;
};

/// Product of the top-level layer bounds. Errors are rethrown with the layer index.
NetworkBoundReport network_bound(const NetworkSpec& net, const LayerOptions& options);

/// Parses the JSON network document; weight paths resolve against `base_dir`.
/// Throws FormatError on schema violations, naming the offending layer.
NetworkSpec parse_network(std::string_view json_text, const std::filesystem::path& base_dir);
NetworkSpec load_network(const std::filesystem::path& path);

}  // namespace lip4
