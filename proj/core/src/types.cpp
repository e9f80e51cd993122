#include "whgrav/types.hpp"

#include <cmath>
#include <string>

#include "whgrav/error.hpp"

namespace whgrav {

Lambda Lambda::from_int(int value) {
  if (value != 1 && value != -1) {
    throw Error(ErrorKind::Config, "lambda must be +1 or -1, got " + std::to_string(value));
  }
  return Lambda(value);
}

Complex Lambda::fixed_point() const { return value_ == -1 ? Complex(1.0, 0.0) : kI; }

double Lambda::fixed_angle() const { return value_ == -1 ? 0.0 : kPi / 2.0; }

WeylPoint::WeylPoint(double rho, double v) : rho_(rho), v_(v) {
  if (!(rho > 0.0) || !std::isfinite(rho) || !std::isfinite(v)) {
    throw Error(ErrorKind::Domain, "Weyl point requires finite rho > 0",
                {{"rho", rho}, {"v", v}});
  }
}

nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw Error(ErrorKind::Parse, "expected a number or [re, im] pair");
}

double max_abs(std::span<const Complex> values) {
  double m = 0.0;
  for (const auto& z : values) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace whgrav
