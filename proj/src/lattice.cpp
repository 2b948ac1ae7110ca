#include "ctqw/lattice.hpp"

#include <string>

#include "ctqw/errors.hpp"

namespace ctqw {

Boundary parse_boundary(std::string_view name) {
  if (name == "periodic") return Boundary::periodic;
  if (name == "open") return Boundary::open;
  throw ConfigError("boundary must be \"periodic\" or \"open\", got \"" + std::string(name) + "\"");
}

std::string_view to_string(Boundary b) {
  return b == Boundary::periodic ? "periodic" : "open";
}

LatticeTopology::LatticeTopology(std::vector<int> dims, std::vector<int> k_half,
                                 Boundary boundary)
    : dims_(std::move(dims)), k_half_(std::move(k_half)), boundary_(boundary) {
  if (dims_.empty()) throw ConfigError("lattice needs at least one direction");
  if (dims_.size() != k_half_.size())
    throw ConfigError("dims has " + std::to_string(dims_.size()) + " directions but k_half has " +
                      std::to_string(k_half_.size()));
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const auto dir = std::to_string(i);
    if (dims_[i] < 2) throw ConfigError("direction " + dir + ": N_i must be >= 2");
    if (k_half_[i] < 1) throw ConfigError("direction " + dir + ": k_i must be >= 1");
    if (2 * k_half_[i] >= dims_[i])
      throw ConfigError("direction " + dir + ": 2*k_i = " + std::to_string(2 * k_half_[i]) +
                        " must be < N_i = " + std::to_string(dims_[i]));
  }

  strides_.assign(dims_.size(), 1);
  sites_ = 1;
  for (std::size_t i = dims_.size(); i-- > 0;) {
    strides_[i] = sites_;
    sites_ *= dims_[i];
    if (sites_ > (SiteIndex{1} << 40)) throw CapacityError("lattice has too many sites");
  }
  for (int dir = 0; dir < q(); ++dir)
    for (int d = 1; d <= k_half_[dir]; ++d) moves_.push_back({dir, d});
}

std::vector<int> LatticeTopology::coordinates(SiteIndex site) const {
  std::vector<int> coords(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i)
    coords[i] = static_cast<int>((site / strides_[i]) % dims_[i]);
  return coords;
}

SiteIndex LatticeTopology::site(std::span<const int> coords) const {
  if (coords.size() != dims_.size()) throw IndexError("coordinate rank mismatch");
  SiteIndex s = 0;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (coords[i] < 0 || coords[i] >= dims_[i])
      throw IndexError("coordinate " + std::to_string(coords[i]) + " out of range in direction " +
                       std::to_string(i));
    s += coords[i] * strides_[i];
  }
  return s;
}

std::optional<SiteIndex> LatticeTopology::hop(SiteIndex site, int direction, int offset,
                                              int sign) const {
  const int n = dims_[direction];
  const int c = static_cast<int>((site / strides_[direction]) % n);
  int target = c + sign * offset;
  if (target < 0 || target >= n) {
    if (boundary_ == Boundary::open) return std::nullopt;
    target = ((target % n) + n) % n;
  }
  return site + static_cast<SiteIndex>(target - c) * strides_[direction];
}

SiteIndex LatticeTopology::center() const {
  std::vector<int> coords(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) coords[i] = dims_[i] / 2;
  return site(coords);
}

LatticeTopology build_lattice(int q, std::vector<int> dims, std::vector<int> k_half,
                              Boundary boundary) {
  if (q < 1) throw ConfigError("q must be >= 1");
  if (static_cast<std::size_t>(q) != dims.size())
    throw ConfigError("q = " + std::to_string(q) + " but dims lists " +
                      std::to_string(dims.size()) + " directions");
  return LatticeTopology(std::move(dims), std::move(k_half), boundary);
}

JointSpace::JointSpace(LatticeTopology lattice, int particles)
    : lattice_(std::move(lattice)), particles_(particles) {
  if (particles_ < 1) throw ConfigError("particle count m must be >= 1");
  dim_ = 1;
  const auto n = static_cast<std::uint64_t>(lattice_.sites());
  for (int p = 0; p < particles_; ++p) {
    dim_ *= n;
    // Indices must stay strictly below the kNoNeighbor sentinel.
    if (dim_ >= kNoNeighbor)
      throw CapacityError("joint dimension N^m exceeds the 32-bit index capacity");
  }
}

std::uint64_t particle_stride(const JointSpace& space, int particle) {
  std::uint64_t stride = 1;
  const auto n = static_cast<std::uint64_t>(space.lattice().sites());
  for (int p = particle + 1; p < space.particles(); ++p) stride *= n;
  return stride;
}

JointIndex joint_index(std::span<const SiteIndex> positions, const JointSpace& space) {
  if (positions.size() != static_cast<std::size_t>(space.particles()))
    throw IndexError("expected " + std::to_string(space.particles()) + " positions, got " +
                     std::to_string(positions.size()));
  const SiteIndex n = space.lattice().sites();
  std::uint64_t alpha = 0;
  for (SiteIndex x : positions) {
    if (x < 0 || x >= n)
      throw IndexError("position " + std::to_string(x) + " outside [0, " + std::to_string(n) + ")");
    alpha = alpha * static_cast<std::uint64_t>(n) + static_cast<std::uint64_t>(x);
  }
  return static_cast<JointIndex>(alpha);
}

std::vector<SiteIndex> joint_positions(JointIndex alpha, const JointSpace& space) {
  if (alpha >= space.dim())
    throw IndexError("joint index " + std::to_string(alpha) + " outside [0, " +
                     std::to_string(space.dim()) + ")");
  const auto n = static_cast<std::uint64_t>(space.lattice().sites());
  std::vector<SiteIndex> pos(space.particles());
  std::uint64_t rest = alpha;
  for (int p = space.particles(); p-- > 0;) {
    pos[p] = static_cast<SiteIndex>(rest % n);
    rest /= n;
  }
  return pos;
}

TopologyMatrix::TopologyMatrix(std::uint64_t rows, int forward_slots,
                               std::vector<JointIndex> indices,
                               std::vector<std::uint32_t> valid_count)
    : rows_(rows),
      forward_slots_(forward_slots),
      indices_(std::move(indices)),
      valid_count_(std::move(valid_count)) {
  if (indices_.size() != rows_ * static_cast<std::uint64_t>(cols_per_row()) ||
      valid_count_.size() != rows_)
    throw ConfigError("topology table dimensions are inconsistent");
}

TopologyMatrix build_topology(const JointSpace& space) {
  const LatticeTopology& lat = space.lattice();
  const std::uint64_t rows = space.dim();
  const int f_per_particle = lat.links_per_site();
  const int forward = space.forward_slots();
  const int width = 2 * forward + 1;

  const std::uint64_t cells = rows * static_cast<std::uint64_t>(width);
  if (cells / static_cast<std::uint64_t>(width) != rows || cells > (std::uint64_t{1} << 36))
    throw CapacityError("topology table of " + std::to_string(rows) + " x " +
                        std::to_string(width) + " entries exceeds capacity");

  std::vector<std::uint64_t> strides(space.particles());
  for (int p = 0; p < space.particles(); ++p) strides[p] = particle_stride(space, p);

  std::vector<JointIndex> indices(cells);
  std::vector<std::uint32_t> valid(rows, 0);
  const auto& moves = lat.forward_moves();

  for (std::uint64_t alpha = 0; alpha < rows; ++alpha) {
    JointIndex* row = indices.data() + alpha * width;
    row[0] = static_cast<JointIndex>(alpha);
    const auto pos = joint_positions(static_cast<JointIndex>(alpha), space);
    std::uint32_t count = 0;
    for (int p = 0; p < space.particles(); ++p) {
      for (int f = 0; f < f_per_particle; ++f) {
        const int slot = 1 + p * f_per_particle + f;
        for (int sign : {+1, -1}) {
          const int s = sign > 0 ? slot : slot + forward;
          const auto dest = lat.hop(pos[p], moves[f].direction, moves[f].offset, sign);
          if (!dest) {
            row[s] = kNoNeighbor;
            continue;
          }
          const auto delta = static_cast<std::int64_t>(*dest) - pos[p];
          row[s] = static_cast<JointIndex>(static_cast<std::int64_t>(alpha) +
                                           delta * static_cast<std::int64_t>(strides[p]));
          ++count;
        }
      }
    }
    valid[alpha] = count;
  }
  return TopologyMatrix(rows, forward, std::move(indices), std::move(valid));
}

}  // namespace ctqw
