#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "lip4/linalg/complex_matrix.hpp"
#include "lip4/linalg/tensor.hpp"

namespace lip4 {

// LIPK container:
//   "LIPK" | u16 version | u32 c_out | u32 c_in | u32 kh | u32 kw | f64[...] row-major
// All integers and floats little-endian.
inline constexpr std::uint16_t lipk_version = 1;

RealTensor4 read_lipk(std::istream& in);
RealTensor4 read_lipk(const std::filesystem::path& path);
void write_lipk(std::ostream& out, const RealTensor4& tensor);
void write_lipk(const std::filesystem::path& path, const RealTensor4& tensor);

/// Dense matrices are stored as (rows, cols, 1, 1) tensors.
ComplexMatrix read_lipk_matrix(const std::filesystem::path& path);
void write_lipk_matrix(const std::filesystem::path& path, const ComplexMatrix& matrix);

}  // namespace lip4
