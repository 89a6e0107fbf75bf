#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "qfisher/error.hpp"

namespace qfisher {

/// Unit system shared by every computation.
///
/// Base constants are hbar, mass, omega and kT. The diffusion coefficient
/// D = hbar / 2m and the heat scale alpha = 1 / (omega hbar) are derived.
/// kT defaults to hbar * omega, so that 1/alpha == kT in the default setup.
class PhysicalConstants {
 public:
  PhysicalConstants() : PhysicalConstants(1.0, 1.0, 1.0) {}

  PhysicalConstants(double hbar, double mass, double omega, std::optional<double> kT = std::nullopt)
      : hbar_(hbar), mass_(mass), omega_(omega), kT_(kT.value_or(hbar * omega)) {
    check("hbar", hbar_);
    check("mass", mass_);
    check("omega", omega_);
    check("kT", kT_);
  }

  double hbar() const noexcept { return hbar_; }
  double mass() const noexcept { return mass_; }
  double omega() const noexcept { return omega_; }
  double kT() const noexcept { return kT_; }

  /// Diffusion coefficient hbar / 2m.
  double D() const noexcept { return hbar_ / (2.0 * mass_); }
  /// Inverse intrinsic energy 1 / (omega hbar).
  double alpha() const noexcept { return 1.0 / (omega_ * hbar_); }

  bool operator==(const PhysicalConstants&) const = default;

 private:
  static void check(const char* name, double v) {
    if (!(std::isfinite(v) && v > 0.0)) {
      throw InvalidArgument(std::string("physical constant '") + name + "' must be finite and > 0");
    }
  }

  double hbar_;
  double mass_;
  double omega_;
  double kT_;
};

}  // namespace qfisher
