#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lip4 {

/// Row-major real 4-D tensor, used for convolution filters (c_out, c_in, kh, kw).
class RealTensor4 {
 public:
  using Dims = std::array<std::size_t, 4>;

  RealTensor4() = default;
  explicit RealTensor4(Dims dims);
  RealTensor4(Dims dims, std::vector<double> entries);

  [[nodiscard]] const Dims& dims() const noexcept { return dims_; }
  [[nodiscard]] std::size_t dim(std::size_t axis) const noexcept { return dims_[axis]; }
  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t o, std::size_t i, std::size_t a, std::size_t b) noexcept {
    return data_[index(o, i, a, b)];
  }
  double operator()(std::size_t o, std::size_t i, std::size_t a, std::size_t b) const noexcept {
    return data_[index(o, i, a, b)];
  }

  [[nodiscard]] std::span<double> data() noexcept { return data_; }
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

 private:
  [[nodiscard]] std::size_t index(std::size_t o, std::size_t i, std::size_t a,
                                  std::size_t b) const noexcept {
    return ((o * dims_[1] + i) * dims_[2] + a) * dims_[3] + b;
  }

  Dims dims_{};
  std::vector<double> data_;
};

}  // namespace lip4
