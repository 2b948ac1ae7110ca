#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace ctqw {

using SiteIndex = std::int64_t;
using JointIndex = std::uint32_t;

// Marks topology slots without a genuine neighbor (open boundaries).
inline constexpr JointIndex kNoNeighbor = std::numeric_limits<JointIndex>::max();

enum class Boundary { periodic, open };

Boundary parse_boundary(std::string_view name);
std::string_view to_string(Boundary b);

// A single forward hop along one lattice direction. Backward hops are the
// mirror images and are never stored separately.
struct Move {
  int direction;
  int offset;  // 1..k_half[direction]
};

class LatticeTopology {
 public:
  LatticeTopology() = default;
  LatticeTopology(std::vector<int> dims, std::vector<int> k_half, Boundary boundary);

  int q() const noexcept { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const noexcept { return dims_; }
  const std::vector<int>& k_half() const noexcept { return k_half_; }
  Boundary boundary() const noexcept { return boundary_; }

  // N = prod N_i.
  SiteIndex sites() const noexcept { return sites_; }
  // k = sum 2 k_i.
  int neighbor_count() const noexcept { return 2 * static_cast<int>(moves_.size()); }

  // Forward moves in canonical order: direction-major, then offset.
  const std::vector<Move>& forward_moves() const noexcept { return moves_; }
  int links_per_site() const noexcept { return static_cast<int>(moves_.size()); }
  // Dense id of the link leaving `site` by forward move `move`. Ids exist for
  // every (site, move) pair; under open boundaries some are never used.
  std::int64_t link_id(SiteIndex site, int move) const noexcept {
    return site * links_per_site() + move;
  }
  std::int64_t link_count() const noexcept { return sites_ * links_per_site(); }

  std::vector<int> coordinates(SiteIndex site) const;
  SiteIndex site(std::span<const int> coords) const;

  // Site reached from `site` by moving `sign * offset` along `direction`;
  // empty when an open boundary is crossed.
  std::optional<SiteIndex> hop(SiteIndex site, int direction, int offset, int sign) const;

  // Central site, coordinate N_i / 2 along every direction.
  SiteIndex center() const;

 private:
  std::vector<int> dims_;
  std::vector<int> k_half_;
  Boundary boundary_ = Boundary::periodic;
  SiteIndex sites_ = 0;
  std::vector<SiteIndex> strides_;
  std::vector<Move> moves_;
};

// Validates q against the per-direction lists before constructing.
LatticeTopology build_lattice(int q, std::vector<int> dims, std::vector<int> k_half,
                              Boundary boundary);

class JointSpace {
 public:
  JointSpace() = default;
  JointSpace(LatticeTopology lattice, int particles);

  int particles() const noexcept { return particles_; }
  const LatticeTopology& lattice() const noexcept { return lattice_; }
  // N^m
  std::uint64_t dim() const noexcept { return dim_; }
  int k_total() const noexcept { return lattice_.neighbor_count(); }
  // Number of forward (stored) hops per joint row: m*k/2.
  int forward_slots() const noexcept { return particles_ * lattice_.links_per_site(); }
  // Upper bound on nonzeros per Hamiltonian row, diagonal included.
  int row_width() const noexcept { return particles_ * k_total() + 1; }
  // (mk+1)/N^m
  double filling_factor() const noexcept {
    return static_cast<double>(row_width()) / static_cast<double>(dim_);
  }

 private:
  LatticeTopology lattice_;
  int particles_ = 0;
  std::uint64_t dim_ = 0;
};

// Row-major mixed-radix encoding: alpha = sum_p x_p * N^(m-1-p).
JointIndex joint_index(std::span<const SiteIndex> positions, const JointSpace& space);
std::vector<SiteIndex> joint_positions(JointIndex alpha, const JointSpace& space);
// Stride of particle p inside the joint index.
std::uint64_t particle_stride(const JointSpace& space, int particle);

// Shared index table of Hamiltonian nonzeros. Row layout:
//   slot 0                  diagonal (alpha itself)
//   slots 1 .. F            forward hops, particle-major then forward move
//   slots F+1 .. 2F         backward hops, same order
// with F = m*k/2. Slot F+s of row alpha is the row whose slot s points back
// to alpha, so only the first F+1 columns carry values.
class TopologyMatrix {
 public:
  TopologyMatrix() = default;
  TopologyMatrix(std::uint64_t rows, int forward_slots, std::vector<JointIndex> indices,
                 std::vector<std::uint32_t> valid_count);

  std::uint64_t rows() const noexcept { return rows_; }
  int cols_per_row() const noexcept { return 2 * forward_slots_ + 1; }
  int forward_slots() const noexcept { return forward_slots_; }

  std::span<const JointIndex> row(std::uint64_t alpha) const noexcept {
    return {indices_.data() + alpha * cols_per_row(), static_cast<std::size_t>(cols_per_row())};
  }
  JointIndex at(std::uint64_t alpha, int slot) const noexcept {
    return indices_[alpha * cols_per_row() + slot];
  }
  // Genuine neighbors in the row, diagonal excluded.
  std::uint32_t valid_count(std::uint64_t alpha) const noexcept { return valid_count_[alpha]; }

  std::span<const JointIndex> indices() const noexcept { return indices_; }

 private:
  std::uint64_t rows_ = 0;
  int forward_slots_ = 0;
  std::vector<JointIndex> indices_;
  std::vector<std::uint32_t> valid_count_;
};

TopologyMatrix build_topology(const JointSpace& space);

}  // namespace ctqw
