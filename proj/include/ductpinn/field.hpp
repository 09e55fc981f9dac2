#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include "ductpinn/errors.hpp"

namespace ductpinn {

enum class Provenance { pinn, shooting, analytic };

inline std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::pinn: return "pinn";
    case Provenance::shooting: return "shooting";
    case Provenance::analytic: return "analytic";
  }
  return "unknown";
}

/// Complex acoustic field sampled on a strictly increasing grid over [0, L].
/// `pressure_dx` and `velocity` are optional (empty when not available).
struct FieldSolution {
  std::vector<double> x;                          // [m]
  std::vector<std::complex<double>> pressure;     // [Pa]
  std::vector<std::complex<double>> pressure_dx;  // [Pa/m]
  std::vector<std::complex<double>> velocity;     // [m/s]
  Provenance provenance = Provenance::shooting;

  std::size_t size() const { return x.size(); }
  bool has_velocity() const { return !velocity.empty(); }
  bool has_pressure_dx() const { return !pressure_dx.empty(); }

  void validate() const {
    if (x.size() < 2) throw Error(ErrorCode::InvalidArgument, "field needs at least two points");
    if (pressure.size() != x.size())
      throw Error(ErrorCode::InvalidArgument, "pressure samples do not match grid");
    if (!pressure_dx.empty() && pressure_dx.size() != x.size())
      throw Error(ErrorCode::InvalidArgument, "pressure derivative samples do not match grid");
    if (!velocity.empty() && velocity.size() != x.size())
      throw Error(ErrorCode::InvalidArgument, "velocity samples do not match grid");
    for (std::size_t i = 1; i < x.size(); ++i)
      if (!(x[i] > x[i - 1])) throw Error(ErrorCode::InvalidArgument, "grid must be strictly increasing");
  }
};

/// N linearly spaced points on [0, L] including both ends.
inline std::vector<double> linspace(double length, std::size_t count) {
  if (count < 2) throw Error(ErrorCode::InvalidArgument, "need at least two grid points");
  std::vector<double> x(count);
  for (std::size_t i = 0; i < count; ++i)
    x[i] = length * static_cast<double>(i) / static_cast<double>(count - 1);
  x.back() = length;
  return x;
}

}  // namespace ductpinn
