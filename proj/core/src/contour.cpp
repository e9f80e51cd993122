#include "whgrav/contour.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include "whgrav/error.hpp"

namespace whgrav {

namespace {

double bump_shape(double u, double width) {
  return std::exp((std::cos(u) - 1.0) / (width * width));
}

double bump_shape_derivative(double u, double width) {
  return -std::sin(u) / (width * width) * bump_shape(u, width);
}

Contour::Curve log_curve(const std::vector<Bump>& bumps, Lambda lambda) {
  const Complex offset = kI * lambda.fixed_angle();
  auto eta = [bumps](double t) {
    Complex e = kI * t;
    for (const auto& b : bumps) {
      e += b.amplitude * (bump_shape(t - b.center, b.width) - bump_shape(-t - b.center, b.width));
    }
    return e;
  };
  auto eta_prime = [bumps](double t) {
    Complex e = kI;
    for (const auto& b : bumps) {
      e += b.amplitude *
           (bump_shape_derivative(t - b.center, b.width) +
            bump_shape_derivative(-t - b.center, b.width));
    }
    return e;
  };
  Contour::Curve c;
  c.position = [offset, eta](double t) { return std::exp(offset + eta(t)); };
  c.velocity = [offset, eta, eta_prime](double t) {
    return std::exp(offset + eta(t)) * eta_prime(t);
  };
  return c;
}

void check_node_count(int node_count) {
  if (node_count < 8 || node_count % 2 != 0) {
    throw Error(ErrorKind::Config, "node_count must be even and at least 8",
                {{"node_count", node_count}});
  }
}

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool segments_intersect(Complex p1, Complex p2, Complex q1, Complex q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

nlohmann::json bumps_to_json(const std::vector<Bump>& bumps) {
  auto arr = nlohmann::json::array();
  for (const auto& b : bumps) {
    arr.push_back({{"center", b.center}, {"width", b.width}, {"amplitude", complex_to_json(b.amplitude)}});
  }
  return arr;
}

}  // namespace

std::string_view to_string(PointLocation location) {
  switch (location) {
    case PointLocation::Inside: return "inside";
    case PointLocation::Outside: return "outside";
    case PointLocation::OnContour: return "on_contour";
  }
  return "unknown";
}

nlohmann::json AdmissibilityReport::to_json() const {
  return {{"admissible", admissible},
          {"simple", simple},
          {"winding_about_origin", winding_about_origin},
          {"symmetry_defect", symmetry_defect},
          {"fixed_point_defect", fixed_point_defect},
          {"failures", failures}};
}

Contour::Contour(Curve curve, Lambda lambda, int node_count, Kind kind, std::vector<Bump> bumps,
                 nlohmann::json descriptor)
    : curve_(std::move(curve)),
      lambda_(lambda),
      kind_(kind),
      bumps_(std::move(bumps)),
      descriptor_(std::move(descriptor)) {
  check_node_count(node_count);
  nodes_.resize(node_count);
  weights_.resize(node_count);
  const double dt = 2.0 * kPi / node_count;
  scale_ = 0.0;
  for (int k = 0; k < node_count; ++k) {
    const double t = dt * k;
    nodes_[k] = curve_.position(t);
    weights_[k] = curve_.velocity(t) * dt;
    scale_ = std::max(scale_, std::abs(nodes_[k]));
  }
  for (int k = 0; k < node_count; ++k) {
    max_spacing_ = std::max(max_spacing_, std::abs(nodes_[(k + 1) % node_count] - nodes_[k]));
  }

  const int m = std::clamp(8 * node_count, 2048, 16384);
  polyline_.resize(m);
  for (int j = 0; j < m; ++j) polyline_[j] = curve_.position(2.0 * kPi * j / m);
  double area = 0.0;
  for (int j = 0; j < m; ++j) {
    const Complex a = polyline_[j];
    const Complex b = polyline_[(j + 1) % m];
    area += cross(a, b);
    max_segment_ = std::max(max_segment_, std::abs(b - a));
  }
  orientation_ = area >= 0.0 ? 1.0 : -1.0;
}

ContourPtr Contour::unit_circle(Lambda lambda, int node_count) {
  nlohmann::json desc{{"kind", "circle"}, {"lambda", lambda.value()}, {"nodes", node_count}};
  return ContourPtr(new Contour(log_curve({}, lambda), lambda, node_count, Kind::Circle, {},
                                std::move(desc)));
}

ContourPtr Contour::deformed(std::vector<Bump> bumps, Lambda lambda, int node_count) {
  if (bumps.empty()) return unit_circle(lambda, node_count);
  for (const auto& b : bumps) {
    if (!(b.width > 0.0) || !std::isfinite(b.width) || !std::isfinite(b.center) ||
        !std::isfinite(b.amplitude.real()) || !std::isfinite(b.amplitude.imag())) {
      throw Error(ErrorKind::Geometry, "bump parameters must be finite with positive width");
    }
  }
  nlohmann::json desc{{"kind", "deformed"},
                      {"lambda", lambda.value()},
                      {"nodes", node_count},
                      {"bumps", bumps_to_json(bumps)}};
  auto curve = log_curve(bumps, lambda);
  ContourPtr c(new Contour(std::move(curve), lambda, node_count, Kind::Deformed, std::move(bumps),
                           std::move(desc)));
  if (!c->polyline_simple() || c->polyline_winding(0.0) != 1) {
    throw Error(ErrorKind::Geometry,
                "symmetrized profile does not give a simple curve around the origin",
                c->descriptor());
  }
  return c;
}

ContourPtr Contour::from_curve(Curve curve, Lambda lambda, int node_count,
                               nlohmann::json descriptor) {
  if (descriptor.empty()) descriptor = {{"kind", "raw"}, {"lambda", lambda.value()}, {"nodes", node_count}};
  return ContourPtr(
      new Contour(std::move(curve), lambda, node_count, Kind::Raw, {}, std::move(descriptor)));
}

ContourPtr Contour::from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "contour: expected an object");
  const auto kind = doc.value("kind", std::string("circle"));
  if (!doc.contains("lambda") || !doc["lambda"].is_number_integer()) {
    throw Error(ErrorKind::Parse, "contour.lambda: required integer +1 or -1");
  }
  const Lambda lambda = Lambda::from_int(doc["lambda"].get<int>());
  const int nodes = doc.value("nodes", kDefaultNodeCount);
  if (kind == "circle") return unit_circle(lambda, nodes);
  if (kind != "deformed") throw Error(ErrorKind::Parse, "contour.kind: unknown kind '" + kind + "'");
  std::vector<Bump> bumps;
  if (doc.contains("bumps")) {
    if (!doc["bumps"].is_array()) throw Error(ErrorKind::Parse, "contour.bumps: expected an array");
    for (std::size_t i = 0; i < doc["bumps"].size(); ++i) {
      const auto& b = doc["bumps"][i];
      const std::string path = "contour.bumps[" + std::to_string(i) + "]";
      if (!b.is_object() || !b.contains("center") || !b.contains("width") || !b.contains("amplitude")) {
        throw Error(ErrorKind::Parse, path + ": needs center, width and amplitude");
      }
      try {
        bumps.push_back({b["center"].get<double>(), b["width"].get<double>(),
                         complex_from_json(b["amplitude"])});
      } catch (const nlohmann::json::exception&) {
        throw Error(ErrorKind::Parse, path + ": center and width must be numbers");
      } catch (const Error&) {
        throw Error(ErrorKind::Parse, path + ".amplitude: expected a number or [re, im]");
      }
    }
  }
  return deformed(std::move(bumps), lambda, nodes);
}

double Contour::parameter(int k) const { return 2.0 * kPi * k / node_count(); }

ContourPtr Contour::with_node_count(int node_count) const {
  auto desc = descriptor_;
  desc["nodes"] = node_count;
  switch (kind_) {
    case Kind::Circle: return unit_circle(lambda_, node_count);
    case Kind::Deformed: return deformed(bumps_, lambda_, node_count);
    case Kind::Raw: return from_curve(curve_, lambda_, node_count, std::move(desc));
  }
  return nullptr;
}

Contour::Nearest Contour::nearest(Complex p) const {
  if (kind_ == Kind::Circle) {
    const double t = std::arg(p) - lambda_.fixed_angle();
    return {t < 0.0 ? t + 2.0 * kPi : t, std::abs(std::abs(p) - 1.0)};
  }
  const int m = static_cast<int>(polyline_.size());
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    const double d = std::norm(polyline_[j] - p);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  const double step = 2.0 * kPi / m;
  const double lo = step * (best - 1);
  const double hi = step * (best + 1);
  double t = step * best;
  // Newton on h(t) = Re(conj(τ − p)·τ'), the derivative of |τ − p|²/2.
  const double e = 1e-5;
  for (int it = 0; it < 40; ++it) {
    const Complex d = curve_.position(t) - p;
    const Complex v = curve_.velocity(t);
    const double h = (std::conj(d) * v).real();
    const Complex acc = (curve_.velocity(t + e) - curve_.velocity(t - e)) / (2.0 * e);
    const double hp = std::norm(v) + (std::conj(d) * acc).real();
    if (!(hp > 0.0)) break;
    double next = std::clamp(t - h / hp, lo, hi);
    if (std::abs(next - t) < 1e-16 * (1.0 + std::abs(t))) {
      t = next;
      break;
    }
    t = next;
  }
  double d = std::abs(curve_.position(t) - p);
  const double dv = std::sqrt(best_d);
  if (dv < d) {
    d = dv;
    t = step * best;
  }
  return {t, d};
}

int Contour::polyline_winding(Complex p) const {
  const int m = static_cast<int>(polyline_.size());
  double total = 0.0;
  for (int j = 0; j < m; ++j) {
    const Complex a = polyline_[j] - p;
    const Complex b = polyline_[(j + 1) % m] - p;
    total += std::arg(b / a);
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

bool Contour::polyline_simple() const {
  const int m = static_cast<int>(polyline_.size());
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  auto xmin = [&](int j) {
    return std::min(polyline_[j].real(), polyline_[(j + 1) % m].real());
  };
  auto xmax = [&](int j) {
    return std::max(polyline_[j].real(), polyline_[(j + 1) % m].real());
  };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return xmin(a) < xmin(b); });
  for (int a = 0; a < m; ++a) {
    const int i = order[a];
    const double right = xmax(i);
    const Complex p1 = polyline_[i];
    const Complex p2 = polyline_[(i + 1) % m];
    const double ylo = std::min(p1.imag(), p2.imag());
    const double yhi = std::max(p1.imag(), p2.imag());
    for (int b = a + 1; b < m && xmin(order[b]) <= right; ++b) {
      const int j = order[b];
      if (j == i || (j + 1) % m == i || (i + 1) % m == j) continue;
      const Complex q1 = polyline_[j];
      const Complex q2 = polyline_[(j + 1) % m];
      if (std::max(q1.imag(), q2.imag()) < ylo || std::min(q1.imag(), q2.imag()) > yhi) continue;
      if (segments_intersect(p1, p2, q1, q2)) return false;
    }
  }
  return true;
}

PointLocation Contour::locate(Complex p, double rel_tol) const {
  const auto n = nearest(p);
  if (kind_ == Kind::Circle) {
    if (n.distance < rel_tol * scale_) return PointLocation::OnContour;
    return std::abs(p) < 1.0 ? PointLocation::Inside : PointLocation::Outside;
  }
  if (n.distance < rel_tol * scale_) return PointLocation::OnContour;
  if (n.distance < 2.0 * max_segment_) {
    const Complex v = curve_.velocity(n.t);
    const Complex d = p - curve_.position(n.t);
    const double side = cross(v, d) * orientation_;
    return side > 0.0 ? PointLocation::Inside : PointLocation::Outside;
  }
  return polyline_winding(p) != 0 ? PointLocation::Inside : PointLocation::Outside;
}

AdmissibilityReport Contour::admissibility(double rel_tol) const {
  AdmissibilityReport r;
  r.simple = polyline_simple();
  if (!r.simple) r.failures.emplace_back("not simple: the curve intersects itself");
  if (distance(0.0) < rel_tol * scale_) {
    r.winding_about_origin = 0;
    r.failures.emplace_back("does not encircle origin: origin lies on the curve");
  } else {
    r.winding_about_origin = polyline_winding(0.0);
    if (r.winding_about_origin != 1) {
      r.failures.emplace_back("does not encircle origin: winding number " +
                              std::to_string(r.winding_about_origin));
    }
  }
  const int n = node_count();
  for (int k = 0; k < n; ++k) {
    const Complex image = involution(nodes_[k], lambda_);
    double d = std::abs(image - nodes_[(n - k) % n]);
    if (d > rel_tol * scale_) d = distance(image);
    r.symmetry_defect = std::max(r.symmetry_defect, d / scale_);
  }
  if (r.symmetry_defect > rel_tol) r.failures.emplace_back("not i_lambda-invariant");
  const Complex pf = lambda_.fixed_point();
  r.fixed_point_defect = std::max(distance(pf), distance(-pf)) / scale_;
  if (r.fixed_point_defect > rel_tol) r.failures.emplace_back("fixed points +-p_F not on the curve");
  r.admissible = r.failures.empty();
  return r;
}

Complex Contour::integrate(std::span<const Complex> values) const {
  if (values.size() != nodes_.size()) {
    throw Error(ErrorKind::Domain, "sample count does not match node count");
  }
  Complex s = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) s += values[k] * weights_[k];
  return s;
}

Complex Contour::integrate(const std::function<Complex(Complex)>& f) const {
  Complex s = 0.0;
  for (std::size_t k = 0; k < nodes_.size(); ++k) s += f(nodes_[k]) * weights_[k];
  return s;
}

ContourPtr unit_circle(Lambda lambda, int node_count) {
  return Contour::unit_circle(lambda, node_count);
}

ContourPtr deformed_contour(std::vector<Bump> bumps, Lambda lambda, int node_count) {
  return Contour::deformed(std::move(bumps), lambda, node_count);
}

Complex involution(Complex tau, Lambda lambda) {
  if (tau == Complex(0.0)) throw Error(ErrorKind::Domain, "involution undefined at tau = 0");
  return -lambda.real() / tau;
}

PointLocation locate(const Contour& contour, Complex point) { return contour.locate(point); }

AdmissibilityReport is_admissible(const Contour& contour) { return contour.admissibility(); }

namespace {

struct Constraint {
  double s;
  bool inside;
};

struct Ray {
  double t;
  std::vector<Constraint> items;
  double s_in = -std::numeric_limits<double>::infinity();
  double s_out = std::numeric_limits<double>::infinity();
  bool fixed = false;
};

struct DesignParams {
  double width;
  double margin;
  double offset;  // hook center offset in widths
  double overshoot;  // angular overshoot of the hook tip in widths
};

std::vector<Bump> design_bumps(const std::vector<Ray>& rays, const DesignParams& p, int sign) {
  std::vector<Bump> bumps;
  for (const auto& ray : rays) {
    const double self = 1.0 - bump_shape(2.0 * ray.t, p.width);
    const bool star = !ray.fixed && self >= 0.5 && ray.s_in < ray.s_out - 2.0 * p.margin;
    if (star) {
      double target;
      if (!std::isfinite(ray.s_in)) {
        target = ray.s_out - p.margin;
      } else if (!std::isfinite(ray.s_out)) {
        target = ray.s_in + p.margin;
      } else {
        target = 0.5 * (ray.s_in + ray.s_out);
      }
      bumps.push_back({ray.t, p.width, Complex(target / self, 0.0)});
      continue;
    }
    double reach = std::isfinite(ray.s_in) ? ray.s_in + p.margin : 0.0;
    if (std::isfinite(ray.s_out)) reach = std::max(reach, -ray.s_out + p.margin);
    reach = std::max(reach, p.margin);
    const double delta = p.offset * p.width;
    const Complex a(reach, -sign * (delta + p.overshoot * p.width));
    bumps.push_back({ray.t + sign * delta, p.width, a});
    if (!ray.fixed) bumps.push_back({ray.t - sign * delta, p.width, -a});
  }
  return bumps;
}

}  // namespace

ContourPtr enclosing_contour(std::span<const Complex> inside, std::span<const Complex> outside,
                             Lambda lambda, int node_count) {
  struct Item {
    Complex z;
    bool inside;
  };
  std::vector<Item> items;
  for (auto z : inside) items.push_back({z, true});
  for (auto z : outside) items.push_back({z, false});
  for (const auto& it : items) {
    if (std::abs(it.z) == 0.0 || !std::isfinite(it.z.real()) || !std::isfinite(it.z.imag())) {
      throw Error(ErrorKind::Geometry, "cannot place 0 or a non-finite point relative to a contour");
    }
  }

  std::vector<Ray> rays;
  const double theta_f = lambda.fixed_angle();
  for (const auto& it : items) {
    const Complex q = std::log(it.z) - kI * theta_f;
    double s = q.real();
    double t = std::remainder(q.imag(), 2.0 * kPi);
    bool in = it.inside;
    if (t < 0.0) {
      s = -s;
      t = -t;
      in = !in;
    }
    auto found = std::find_if(rays.begin(), rays.end(),
                              [&](const Ray& r) { return std::abs(r.t - t) < 1e-9; });
    if (found == rays.end()) {
      rays.push_back({t, {}});
      found = rays.end() - 1;
    }
    found->items.push_back({s, in});
  }

  std::vector<Ray> violated;
  for (auto& ray : rays) {
    ray.fixed = ray.t < 1e-9 || kPi - ray.t < 1e-9;
    bool bad = false;
    for (const auto& c : ray.items) {
      if (c.inside) {
        ray.s_in = std::max(ray.s_in, c.s);
        bad = bad || c.s >= 0.0;
      } else {
        ray.s_out = std::min(ray.s_out, c.s);
        bad = bad || c.s <= 0.0;
      }
      if (ray.fixed && std::abs(c.s) < 1e-9) {
        throw Error(ErrorKind::Geometry, "a fixed point of the involution cannot be placed off the contour");
      }
    }
    if (bad) violated.push_back(ray);
  }

  if (violated.empty()) return unit_circle(lambda, node_count);

  auto satisfied = [&](const Contour& c, double& clearance) {
    clearance = std::numeric_limits<double>::infinity();
    for (const auto& it : items) {
      const Complex partner = involution(it.z, lambda);
      const auto loc = c.locate(it.z);
      const auto loc_partner = c.locate(partner);
      const auto want = it.inside ? PointLocation::Inside : PointLocation::Outside;
      const auto want_partner = it.inside ? PointLocation::Outside : PointLocation::Inside;
      if (loc != want || loc_partner != want_partner) return false;
      clearance = std::min(clearance, c.distance(it.z) / std::abs(it.z));
      clearance = std::min(clearance, c.distance(partner) / std::abs(partner));
    }
    return true;
  };

  static const double widths[] = {0.3, 0.2, 0.15, 0.1, 0.07};
  static const double margins[] = {0.3, 0.15};
  static const double offsets[] = {2.0, 2.5, 3.0};
  static const double overshoots[] = {1.0, 0.5, 1.5};
  constexpr double kGoodClearance = 0.08;

  ContourPtr best;
  double best_clearance = 0.0;
  for (double w : widths) {
    for (double m : margins) {
      for (double off : offsets) {
        for (double over : overshoots) {
          for (int sign : {1, -1}) {
            const auto bumps = design_bumps(violated, {w, m, off, over}, sign);
            ContourPtr c;
            try {
              c = Contour::deformed(bumps, lambda, node_count);
            } catch (const Error&) {
              continue;
            }
            double clearance = 0.0;
            if (!satisfied(*c, clearance)) continue;
            if (clearance > best_clearance) {
              best_clearance = clearance;
              best = c;
            }
            if (best_clearance >= kGoodClearance) return best;
          }
        }
      }
    }
  }
  if (!best) {
    throw Error(ErrorKind::Geometry, "no admissible contour found for the requested point placement");
  }
  return best;
}

}  // namespace whgrav
