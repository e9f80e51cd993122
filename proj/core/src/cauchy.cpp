#include "whgrav/cauchy.hpp"

#include <cmath>
#include <unsupported/Eigen/FFT>

#include "whgrav/error.hpp"

namespace whgrav {

namespace {

constexpr double kNodeSnap = 1e-14;
constexpr int kMaxUnwrapNodes = 4096;

std::optional<int> node_index(const Contour& c, Complex tau) {
  const auto nodes = c.nodes();
  const double tol = kNodeSnap * c.scale();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    if (std::abs(nodes[k] - tau) <= tol) return static_cast<int>(k);
  }
  return std::nullopt;
}

std::vector<Complex> fft_forward(const std::vector<Complex>& x) {
  Eigen::FFT<double> fft;
  std::vector<Complex> out;
  fft.fwd(out, x);
  return out;
}

std::vector<Complex> fft_inverse(const std::vector<Complex>& x) {
  Eigen::FFT<double> fft;
  std::vector<Complex> out;
  fft.inv(out, x);
  return out;
}

struct Resolved {
  BoundarySamples samples;
  std::vector<double> increments;
};

Resolved resolve_phase(const BoundarySamples& input) {
  BoundarySamples current = input;
  for (;;) {
    const auto& f = current.values;
    const int n = static_cast<int>(f.size());
    const double scale = max_abs(f);
    for (int k = 0; k < n; ++k) {
      if (scale == 0.0 || std::abs(f[k]) <= 1e-14 * scale) {
        throw Error(ErrorKind::ZeroOnContour, "function vanishes on the contour",
                    {{"node", k}, {"tau", complex_to_json(current.contour->nodes()[k])}});
      }
    }
    std::vector<double> inc(n);
    bool resolved = true;
    for (int k = 0; k < n; ++k) {
      inc[k] = std::arg(f[(k + 1) % n] / f[k]);
      if (std::abs(inc[k]) >= kPi / 2.0) resolved = false;
    }
    if (resolved) return {std::move(current), std::move(inc)};
    if (!current.closed_form || 2 * n > kMaxUnwrapNodes) {
      throw Error(ErrorKind::Resolution,
                  "phase increment between adjacent nodes is too large to unwrap",
                  {{"node_count", n}});
    }
    current = BoundarySamples::sample(current.contour->with_node_count(2 * n), current.closed_form);
  }
}

}  // namespace

BoundarySamples::BoundarySamples(ContourPtr c, std::vector<Complex> v, ScalarFn f)
    : contour(std::move(c)), values(std::move(v)), closed_form(std::move(f)) {
  if (!contour) throw Error(ErrorKind::Domain, "boundary samples need a contour");
  if (static_cast<int>(values.size()) != contour->node_count()) {
    throw Error(ErrorKind::Domain, "sample count does not match node count",
                {{"samples", values.size()}, {"nodes", contour->node_count()}});
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k].real()) || !std::isfinite(values[k].imag())) {
      throw Error(ErrorKind::Evaluation, "non-finite boundary sample",
                  {{"node", k}, {"tau", complex_to_json(contour->nodes()[k])}});
    }
  }
}

BoundarySamples BoundarySamples::sample(ContourPtr contour, ScalarFn f) {
  std::vector<Complex> v;
  v.reserve(contour->node_count());
  for (auto z : contour->nodes()) v.push_back(f(z));
  return BoundarySamples(std::move(contour), std::move(v), std::move(f));
}

std::vector<Complex> node_derivative(const Contour& contour, const std::vector<Complex>& values) {
  const int n = contour.node_count();
  auto coeffs = fft_forward(values);
  for (int k = 0; k < n; ++k) {
    const int mode = k <= n / 2 ? k : k - n;
    coeffs[k] *= (k == n / 2) ? Complex(0.0) : kI * static_cast<double>(mode);
  }
  auto dfdt = fft_inverse(coeffs);
  const double dt = 2.0 * kPi / n;
  const auto w = contour.weights();
  for (int k = 0; k < n; ++k) dfdt[k] /= (w[k] / dt);
  return dfdt;
}

std::vector<Complex> plus_boundary_quadrature(const BoundarySamples& samples) {
  const auto& c = *samples.contour;
  const auto z = c.nodes();
  const auto w = c.weights();
  const auto& f = samples.values;
  const int n = c.node_count();
  const auto df = node_derivative(c, f);
  std::vector<Complex> plus(n);
  const Complex inv2pii = 1.0 / (2.0 * kPi * kI);
  for (int j = 0; j < n; ++j) {
    Complex s = w[j] * df[j];
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      s += w[k] * (f[k] - f[j]) / (z[k] - z[j]);
    }
    plus[j] = f[j] + inv2pii * s;
  }
  return plus;
}

std::vector<Complex> plus_boundary_fourier(const BoundarySamples& samples) {
  if (!samples.contour->is_unit_circle()) {
    throw Error(ErrorKind::Config, "Fourier splitting requires the unit-circle contour");
  }
  const int n = samples.contour->node_count();
  auto coeffs = fft_forward(samples.values);
  for (int k = 0; k < n; ++k) {
    if (k == n / 2) {
      coeffs[k] *= 0.5;
    } else if (k > n / 2) {
      coeffs[k] = 0.0;
    }
  }
  return fft_inverse(coeffs);
}

std::vector<Complex> laurent_coefficients(const BoundarySamples& samples) {
  if (!samples.contour->is_unit_circle()) {
    throw Error(ErrorKind::Config, "Laurent coefficients are read off the unit circle only");
  }
  const int n = samples.contour->node_count();
  const double theta = samples.contour->lambda().fixed_angle();
  const auto coeffs = fft_forward(samples.values);
  std::vector<Complex> out(n);
  for (int mode = -n / 2 + 1; mode <= n / 2; ++mode) {
    const int k = mode >= 0 ? mode : mode + n;
    out[mode + n / 2 - 1] = coeffs[k] / static_cast<double>(n) * std::polar(1.0, -mode * theta);
  }
  return out;
}

ProjectionSplit::ProjectionSplit(const BoundarySamples& samples, ProjectionMethod method)
    : contour_(samples.contour), method_(method) {
  if (method_ == ProjectionMethod::Auto) {
    method_ = contour_->is_unit_circle() ? ProjectionMethod::Fourier : ProjectionMethod::Quadrature;
  }
  plus_ = method_ == ProjectionMethod::Fourier ? plus_boundary_fourier(samples)
                                               : plus_boundary_quadrature(samples);
  minus_.resize(plus_.size());
  for (std::size_t k = 0; k < plus_.size(); ++k) minus_[k] = samples.values[k] - plus_[k];
  plus_zero_ = plus(0.0);
}

Complex ProjectionSplit::plus(Complex tau) const {
  if (auto k = node_index(*contour_, tau)) return plus_[*k];
  const auto z = contour_->nodes();
  const auto w = contour_->weights();
  Complex num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const Complex q = w[k] / (z[k] - tau);
    num += q * plus_[k];
    den += q;
  }
  return num / den;
}

Complex ProjectionSplit::plus_derivative(Complex tau) const {
  if (auto k = node_index(*contour_, tau)) return node_derivative(*contour_, plus_)[*k];
  const auto z = contour_->nodes();
  const auto w = contour_->weights();
  Complex num = 0.0, den = 0.0, dnum = 0.0, dden = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const Complex r = 1.0 / (z[k] - tau);
    const Complex q = w[k] * r;
    num += q * plus_[k];
    den += q;
    dnum += q * r * plus_[k];
    dden += q * r;
  }
  const Complex value = num / den;
  return (dnum - value * dden) / den;
}

Complex ProjectionSplit::minus(Complex tau) const {
  if (auto k = node_index(*contour_, tau)) return minus_[*k];
  const auto z = contour_->nodes();
  const auto w = contour_->weights();
  Complex num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const Complex q = w[k] / (z[k] - tau);
    num += q * minus_[k];
    den += q * tau / z[k];
  }
  return num / den;
}

Complex ProjectionSplit::minus_derivative(Complex tau) const {
  if (auto k = node_index(*contour_, tau)) return node_derivative(*contour_, minus_)[*k];
  const auto z = contour_->nodes();
  const auto w = contour_->weights();
  Complex num = 0.0, den = 0.0, dnum = 0.0, dden = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const Complex r = 1.0 / (z[k] - tau);
    const Complex q = w[k] * r;
    num += q * minus_[k];
    den += q * tau / z[k];
    dnum += q * r * minus_[k];
    dden += q * r;
  }
  const Complex value = num / den;
  return (dnum - value * dden) / den;
}

std::vector<Complex> ProjectionSplit::plus_taylor(int order) const {
  const auto z = contour_->nodes();
  const auto w = contour_->weights();
  std::vector<Complex> c(order + 1, 0.0);
  const Complex inv2pii = 1.0 / (2.0 * kPi * kI);
  for (std::size_t k = 0; k < z.size(); ++k) {
    Complex zp = 1.0 / z[k];
    for (int n = 0; n <= order; ++n) {
      c[n] += w[k] * plus_[k] * zp;
      zp /= z[k];
    }
  }
  for (auto& x : c) x *= inv2pii;
  return c;
}

Complex cauchy_plus(const BoundarySamples& samples, Complex tau) {
  if (samples.contour->locate(tau) != PointLocation::Inside) {
    throw Error(ErrorKind::Domain, "cauchy_plus requires a point strictly inside the contour",
                {{"tau", complex_to_json(tau)}});
  }
  return ProjectionSplit(samples).plus(tau);
}

Complex cauchy_minus(const BoundarySamples& samples, Complex tau) {
  if (samples.contour->locate(tau) != PointLocation::Outside) {
    throw Error(ErrorKind::Domain, "cauchy_minus requires a point strictly outside the contour",
                {{"tau", complex_to_json(tau)}});
  }
  return ProjectionSplit(samples).minus(tau);
}

WindingResult winding_report(const BoundarySamples& samples) {
  const auto r = resolve_phase(samples);
  double total = 0.0;
  for (double d : r.increments) total += d;
  const double turns = total / (2.0 * kPi);
  const double rounded = std::round(turns);
  return {static_cast<int>(rounded), std::abs(turns - rounded), r.samples.contour->node_count()};
}

int winding_index(const BoundarySamples& samples) { return winding_report(samples).index; }

BoundarySamples continuous_log(const BoundarySamples& samples) {
  auto r = resolve_phase(samples);
  double total = 0.0;
  for (double d : r.increments) total += d;
  const int index = static_cast<int>(std::lround(total / (2.0 * kPi)));
  if (index != 0) {
    throw Error(ErrorKind::NoCanonicalFactorization,
                "nonzero winding index: no canonical factorization", {{"index", index}});
  }
  const auto& f = r.samples.values;
  const int n = static_cast<int>(f.size());
  std::vector<Complex> logs(n);
  double phase = std::arg(f[0]);
  for (int k = 0; k < n; ++k) {
    logs[k] = Complex(std::log(std::abs(f[k])), phase);
    phase += r.increments[k];
  }
  ScalarFn closed;
  if (r.samples.closed_form) {
    auto contour = r.samples.contour;
    auto base = r.samples.closed_form;
    closed = [contour, base, logs, f](Complex tau) {
      const auto z = contour->nodes();
      std::size_t best = 0;
      double best_d = std::abs(z[0] - tau);
      for (std::size_t k = 1; k < z.size(); ++k) {
        const double d = std::abs(z[k] - tau);
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      return logs[best] + std::log(base(tau) / f[best]);
    };
  }
  return BoundarySamples(r.samples.contour, std::move(logs), std::move(closed));
}

ScalarFactorization::ScalarFactorization(const BoundarySamples& log_samples,
                                         ProjectionMethod method)
    : log_samples_(log_samples),
      split_(log_samples, method),
      log_normalization_(split_.plus_at_zero()) {}

Complex ScalarFactorization::log_plus(Complex tau) const {
  const auto loc = log_samples_.contour->locate(tau);
  if (loc != PointLocation::Outside) return split_.plus(tau) - log_normalization_;
  if (!log_samples_.closed_form) {
    throw Error(ErrorKind::Domain, "plus factor is evaluable outside the contour only with a closed form",
                {{"tau", complex_to_json(tau)}});
  }
  return log_samples_.closed_form(tau) - split_.minus(tau) - log_normalization_;
}

Complex ScalarFactorization::log_minus(Complex tau) const {
  const auto loc = log_samples_.contour->locate(tau);
  if (loc != PointLocation::Inside) return split_.minus(tau) + log_normalization_;
  if (!log_samples_.closed_form) {
    throw Error(ErrorKind::Domain, "minus factor is evaluable inside the contour only with a closed form",
                {{"tau", complex_to_json(tau)}});
  }
  return log_samples_.closed_form(tau) - split_.plus(tau) + log_normalization_;
}

ScalarFactorization scalar_canonical_factorization(const BoundarySamples& samples) {
  return ScalarFactorization(continuous_log(samples));
}

double factorization_residual(const ScalarFactorization& fac, const BoundarySamples& samples) {
  const auto z = samples.contour->nodes();
  double worst = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) {
    const Complex product = fac.minus(z[k]) * fac.plus(z[k]);
    worst = std::max(worst, std::abs(product - samples.values[k]));
  }
  return worst / max_abs(samples.values);
}

double bessel_contour_j0(double rho, const Contour& contour) {
  const Complex s = contour.integrate([rho](Complex z) {
    return std::exp(0.5 * rho * (z - 1.0 / z)) / z;
  });
  return (s / (2.0 * kPi * kI)).real();
}

}  // namespace whgrav
