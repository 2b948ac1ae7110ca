#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <variant>

#include "ctqw/density.hpp"

namespace ctqw {

// Density snapshot file, little-endian:
//   bytes 0..7    magic "CTQWRHO1"
//   bytes 8..11   u32 dimension
//   byte  12      precision flag, 0 = single, 1 = double
//   bytes 13..15  reserved, zero
// followed by the packed lower triangle, row-major, as (re, im) pairs.
inline constexpr char kSnapshotMagic[8] = {'C', 'T', 'Q', 'W', 'R', 'H', 'O', '1'};
inline constexpr std::size_t kSnapshotHeaderSize = 16;

template <class Real>
void write_density_snapshot(const DensityMatrix<Real>& rho, const std::filesystem::path& path);

using AnyDensity = std::variant<DensityMatrix<float>, DensityMatrix<double>>;

// Throws FormatError on a bad header, a dimension other than
// `expected_dim` (when given), or a payload of the wrong length.
AnyDensity read_density_snapshot(const std::filesystem::path& path,
                                 std::optional<std::uint32_t> expected_dim = std::nullopt);

}  // namespace ctqw
