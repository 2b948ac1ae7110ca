#include "ctqw/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "ctqw/errors.hpp"

namespace ctqw {

namespace {

template <class UInt>
void put_le(std::vector<char>& buf, UInt v) {
  for (std::size_t b = 0; b < sizeof(UInt); ++b)
    buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

template <class UInt>
UInt get_le(const char* p) {
  UInt v = 0;
  for (std::size_t b = 0; b < sizeof(UInt); ++b)
    v |= static_cast<UInt>(static_cast<unsigned char>(p[b])) << (8 * b);
  return v;
}

template <class Real>
using Bits = std::conditional_t<sizeof(Real) == 4, std::uint32_t, std::uint64_t>;

template <class Real>
DensityMatrix<Real> decode_payload(const std::vector<char>& data, std::uint32_t dim) {
  DensityMatrix<Real> rho(dim);
  auto packed = rho.packed();
  const char* p = data.data() + kSnapshotHeaderSize;
  for (auto& v : packed) {
    const Real re = std::bit_cast<Real>(get_le<Bits<Real>>(p));
    const Real im = std::bit_cast<Real>(get_le<Bits<Real>>(p + sizeof(Real)));
    v = {re, im};
    p += 2 * sizeof(Real);
  }
  return rho;
}

}  // namespace

template <class Real>
void write_density_snapshot(const DensityMatrix<Real>& rho, const std::filesystem::path& path) {
  if (rho.dim() > std::numeric_limits<std::uint32_t>::max())
    throw CapacityError("density dimension does not fit the snapshot header");
  std::vector<char> buf;
  buf.reserve(kSnapshotHeaderSize + rho.packed().size() * 2 * sizeof(Real));
  buf.insert(buf.end(), std::begin(kSnapshotMagic), std::end(kSnapshotMagic));
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(rho.dim()));
  buf.push_back(sizeof(Real) == 4 ? 0 : 1);
  buf.insert(buf.end(), 3, 0);
  for (const auto& v : rho.packed()) {
    put_le(buf, std::bit_cast<Bits<Real>>(v.real()));
    put_le(buf, std::bit_cast<Bits<Real>>(v.imag()));
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

AnyDensity read_density_snapshot(const std::filesystem::path& path,
                                 std::optional<std::uint32_t> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < kSnapshotHeaderSize) throw FormatError(path.string() + ": truncated header");
  if (std::memcmp(data.data(), kSnapshotMagic, sizeof kSnapshotMagic) != 0)
    throw FormatError(path.string() + ": bad magic");
  const auto dim = get_le<std::uint32_t>(data.data() + 8);
  const auto flag = static_cast<unsigned char>(data[12]);
  if (flag > 1) throw FormatError(path.string() + ": unknown precision flag");
  if (expected_dim && *expected_dim != dim)
    throw FormatError(path.string() + ": header dimension " + std::to_string(dim) +
                      " does not match expected " + std::to_string(*expected_dim));

  const std::uint64_t entries = DensityMatrix<double>::packed_size(dim);
  const std::uint64_t real_bytes = flag == 0 ? 4 : 8;
  if (data.size() != kSnapshotHeaderSize + entries * 2 * real_bytes)
    throw FormatError(path.string() + ": payload length does not match dimension " +
                      std::to_string(dim));
  if (flag == 0) return decode_payload<float>(data, dim);
  return decode_payload<double>(data, dim);
}

template void write_density_snapshot<float>(const DensityMatrix<float>&,
                                            const std::filesystem::path&);
template void write_density_snapshot<double>(const DensityMatrix<double>&,
                                             const std::filesystem::path&);

}  // namespace ctqw
