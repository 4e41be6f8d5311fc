#include "lip4/linalg/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lip4/error.hpp"

namespace lip4 {

namespace {

std::size_t product(const RealTensor4::Dims& dims) {
  std::size_t p = 1;
  for (auto d : dims) {
    if (d == 0) throw InvalidArgument("RealTensor4: dimensions must be positive");
    p *= d;
  }
  return p;
}

}  // namespace

RealTensor4::RealTensor4(Dims dims) : dims_(dims), data_(product(dims), 0.0) {}

RealTensor4::RealTensor4(Dims dims, std::vector<double> entries)
    : dims_(dims), data_(std::move(entries)) {
  if (data_.size() != product(dims_))
    throw InvalidArgument("RealTensor4: expected " + std::to_string(product(dims_)) +
                          " entries, got " + std::to_string(data_.size()));
  if (!std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); }))
    throw InvalidArgument("RealTensor4: non-finite entry");
}

}  // namespace lip4
