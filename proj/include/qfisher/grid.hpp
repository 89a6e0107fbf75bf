#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>

#include "qfisher/error.hpp"

namespace qfisher {

/// One uniformly sampled axis with both endpoints included.
struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 8;

  double spacing() const noexcept { return (hi - lo) / static_cast<double>(n - 1); }
  double coord(std::size_t i) const noexcept {
    // Last point pinned to hi so endpoints are exact.
    return i + 1 == n ? hi : lo + static_cast<double>(i) * spacing();
  }
  bool operator==(const Axis&) const = default;
};

/// Uniform rectangular grid in 1 to 3 dimensions, row-major with the last axis fastest.
class Grid {
 public:
  static constexpr std::size_t kMaxDim = 3;
  static constexpr std::size_t kMinPoints = 8;

  Grid() : Grid(1, {{Axis{0.0, 1.0, kMinPoints}}}) {}

  Grid(std::size_t dim, const std::array<Axis, kMaxDim>& axes) : dim_(dim), axes_(axes) {
    if (dim_ < 1 || dim_ > kMaxDim) {
      throw InvalidArgument("grid dimension must be 1, 2 or 3 (got " + std::to_string(dim_) + ")");
    }
    size_ = 1;
    for (std::size_t d = 0; d < dim_; ++d) {
      const Axis& a = axes_[d];
      if (a.n < kMinPoints) {
        throw InvalidArgument("grid axis " + std::to_string(d) + " needs at least 8 points (got " +
                              std::to_string(a.n) + ")");
      }
      if (!(a.lo < a.hi)) {
        throw InvalidArgument("grid axis " + std::to_string(d) + " requires lo < hi");
      }
      size_ *= a.n;
    }
    for (std::size_t d = dim_; d < kMaxDim; ++d) axes_[d] = Axis{0.0, 0.0, 1};
    std::size_t s = 1;
    for (std::size_t d = dim_; d-- > 0;) {
      strides_[d] = s;
      s *= axes_[d].n;
    }
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return size_; }
  const Axis& axis(std::size_t d) const noexcept { return axes_[d]; }
  std::size_t n(std::size_t d) const noexcept { return axes_[d].n; }
  double spacing(std::size_t d) const noexcept { return axes_[d].spacing(); }
  std::size_t stride(std::size_t d) const noexcept { return strides_[d]; }

  /// Volume element h_0 * ... * h_{dim-1}.
  double cell_volume() const noexcept {
    double v = 1.0;
    for (std::size_t d = 0; d < dim_; ++d) v *= spacing(d);
    return v;
  }

  double box_volume() const noexcept {
    double v = 1.0;
    for (std::size_t d = 0; d < dim_; ++d) v *= axes_[d].hi - axes_[d].lo;
    return v;
  }

  std::array<std::size_t, kMaxDim> unflatten(std::size_t flat) const noexcept {
    std::array<std::size_t, kMaxDim> idx{0, 0, 0};
    for (std::size_t d = 0; d < dim_; ++d) {
      idx[d] = flat / strides_[d];
      flat %= strides_[d];
    }
    return idx;
  }

  std::array<double, kMaxDim> coords(std::size_t flat) const noexcept {
    const auto idx = unflatten(flat);
    std::array<double, kMaxDim> x{0.0, 0.0, 0.0};
    for (std::size_t d = 0; d < dim_; ++d) x[d] = axes_[d].coord(idx[d]);
    return x;
  }

  bool on_boundary(std::size_t flat) const noexcept {
    const auto idx = unflatten(flat);
    for (std::size_t d = 0; d < dim_; ++d) {
      if (idx[d] == 0 || idx[d] + 1 == axes_[d].n) return true;
    }
    return false;
  }

  std::string describe() const {
    std::ostringstream os;
    os << dim_ << "D";
    for (std::size_t d = 0; d < dim_; ++d) {
      os << (d == 0 ? " " : " x ") << "[" << axes_[d].lo << "," << axes_[d].hi << "]:" << axes_[d].n;
    }
    return os.str();
  }

  bool operator==(const Grid& o) const noexcept {
    if (dim_ != o.dim_) return false;
    for (std::size_t d = 0; d < dim_; ++d) {
      if (!(axes_[d] == o.axes_[d])) return false;
    }
    return true;
  }

 private:
  std::size_t dim_;
  std::array<Axis, kMaxDim> axes_;
  std::array<std::size_t, kMaxDim> strides_{1, 1, 1};
  std::size_t size_ = 0;
};

/// Builds a grid from per-axis bounds and point counts; both spans must have `dim` entries.
inline Grid make_grid(std::size_t dim, std::span<const std::array<double, 2>> bounds,
                      std::span<const std::size_t> n) {
  if (dim < 1 || dim > Grid::kMaxDim) {
    throw InvalidArgument("grid dimension must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
  }
  if (bounds.size() != dim || n.size() != dim) {
    throw InvalidArgument("grid needs exactly one (lo, hi) pair and one point count per dimension");
  }
  std::array<Axis, Grid::kMaxDim> axes{};
  for (std::size_t d = 0; d < dim; ++d) axes[d] = Axis{bounds[d][0], bounds[d][1], n[d]};
  return Grid(dim, axes);
}

/// 1D convenience overload.
inline Grid make_grid(double lo, double hi, std::size_t n) {
  const std::array<double, 2> b{lo, hi};
  return make_grid(1, std::span<const std::array<double, 2>>(&b, 1), std::span<const std::size_t>(&n, 1));
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw InvalidArgument(std::string(what) + ": fields live on different grids");
}

}  // namespace qfisher
