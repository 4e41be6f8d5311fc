#include "lip4/conv/lipk.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "lip4/error.hpp"

namespace lip4 {

namespace {

constexpr std::array<char, 4> magic = {'L', 'I', 'P', 'K'};
// Refuse absurd headers before allocating.
constexpr std::uint64_t max_entries = std::uint64_t{1} << 31;

template <typename T>
void put_le(std::ostream& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  const U bits = std::bit_cast<U>(value);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in, const char* what) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  std::array<unsigned char, sizeof(T)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw FormatError(std::string("LIPK: truncated while reading ") + what);
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(bytes[i]) << (8 * i);
  return std::bit_cast<T>(bits);
}

}  // namespace

RealTensor4 read_lipk(std::istream& in) {
  std::array<char, 4> head{};
  in.read(head.data(), head.size());
  if (!in || head != magic) throw FormatError("LIPK: bad magic");
  const auto version = get_le<std::uint16_t>(in, "version");
  if (version != lipk_version)
    throw FormatError("LIPK: unsupported version " + std::to_string(version));
  RealTensor4::Dims dims{};
  std::uint64_t count = 1;
  for (auto& d : dims) {
    d = get_le<std::uint32_t>(in, "dimensions");
    if (d == 0) throw FormatError("LIPK: zero dimension");
    count *= d;
    if (count > max_entries) throw FormatError("LIPK: tensor too large");
  }
  std::vector<double> entries(count);
  for (auto& x : entries) {
    x = get_le<double>(in, "entries");
    if (!std::isfinite(x)) throw FormatError("LIPK: non-finite entry");
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("LIPK: trailing bytes");
  return {dims, std::move(entries)};
}

RealTensor4 read_lipk(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open LIPK file '" + path.string() + "'");
  try {
    return read_lipk(in);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_lipk(std::ostream& out, const RealTensor4& tensor) {
  out.write(magic.data(), magic.size());
  put_le<std::uint16_t>(out, lipk_version);
  for (auto d : tensor.dims()) put_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  for (double x : tensor.data()) put_le<double>(out, x);
  if (!out) throw FormatError("LIPK: write failed");
}

void write_lipk(const std::filesystem::path& path, const RealTensor4& tensor) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot create LIPK file '" + path.string() + "'");
  write_lipk(out, tensor);
}

ComplexMatrix read_lipk_matrix(const std::filesystem::path& path) {
  const auto t = read_lipk(path);
  if (t.dim(2) != 1 || t.dim(3) != 1)
    throw FormatError(path.string() + ": dense matrix must have 1x1 spatial dims");
  std::vector<Complex> entries(t.data().begin(), t.data().end());
  return {t.dim(0), t.dim(1), std::move(entries)};
}

void write_lipk_matrix(const std::filesystem::path& path, const ComplexMatrix& matrix) {
  RealTensor4 t({matrix.rows(), matrix.cols(), 1, 1});
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const Complex z = matrix.data()[i];
    if (z.imag() != 0.0) throw InvalidArgument("LIPK stores real matrices only");
    t.data()[i] = z.real();
  }
  write_lipk(path, t);
}

}  // namespace lip4
