#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "qfisher/error.hpp"

namespace qfisher {

/// Square band matrix with `bw` sub- and super-diagonals, factored in place by LU without pivoting.
///
/// With bw == 1 this is the Thomas algorithm. No pivoting is needed for the Crank-Nicolson
/// matrices I + i*beta*H (H real symmetric): their Hermitian part is the identity.
template <class T>
class BandedLU {
 public:
  BandedLU(std::size_t n, std::size_t bw) : n_(n), bw_(bw), width_(2 * bw + 1), a_(n * width_, T{}) {}

  std::size_t size() const noexcept { return n_; }
  std::size_t bandwidth() const noexcept { return bw_; }

  T& at(std::size_t i, std::size_t j) { return a_[i * width_ + (j + bw_ - i)]; }
  T at(std::size_t i, std::size_t j) const { return a_[i * width_ + (j + bw_ - i)]; }

  bool in_band(std::size_t i, std::size_t j) const noexcept {
    return (j + bw_ >= i) && (i + bw_ >= j) && i < n_ && j < n_;
  }

  void factor() {
    for (std::size_t k = 0; k < n_; ++k) {
      const T pivot = at(k, k);
      if (pivot == T{}) throw NumericalError("banded LU: zero pivot");
      const std::size_t last = std::min(n_ - 1, k + bw_);
      for (std::size_t i = k + 1; i <= last; ++i) {
        const T l = at(i, k) / pivot;
        at(i, k) = l;
        for (std::size_t j = k + 1; j <= last; ++j) at(i, j) -= l * at(k, j);
      }
    }
    factored_ = true;
  }

  /// Solves A x = b in place; factor() must have been called.
  void solve(std::span<T> x) const {
    if (!factored_) throw InvalidArgument("banded LU: solve before factor");
    if (x.size() != n_) throw InvalidArgument("banded LU: right-hand side size mismatch");
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t first = i > bw_ ? i - bw_ : 0;
      T acc = x[i];
      for (std::size_t k = first; k < i; ++k) acc -= at(i, k) * x[k];
      x[i] = acc;
    }
    for (std::size_t i = n_; i-- > 0;) {
      const std::size_t last = std::min(n_ - 1, i + bw_);
      T acc = x[i];
      for (std::size_t j = i + 1; j <= last; ++j) acc -= at(i, j) * x[j];
      x[i] = acc / at(i, i);
    }
  }

 private:
  std::size_t n_;
  std::size_t bw_;
  std::size_t width_;
  std::vector<T> a_;
  bool factored_ = false;
};

}  // namespace qfisher
