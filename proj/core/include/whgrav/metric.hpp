#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "whgrav/factorize.hpp"
#include "whgrav/types.hpp"
#include "whgrav/verify.hpp"

namespace whgrav {

/// J_0 or J_1 at real x; J_1 is odd.
double bessel_j(int order, double x);

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct DeltaB {
  double delta;
  double b_tilde;
};

/// Reads (Δ, B̃) from M = [[Δ + B̃²/Δ, B̃/Δ], [B̃/Δ, 1/Δ]].
DeltaB extract_delta_b(const Matrix2& m, double tolerance = 1e-10);
Matrix2 assemble_m(double delta, double b_tilde);

/// The real 2×2 matrix of a two-channel diagonal solution. Refuses
/// solutions that are not unimodular pairs or not real.
Matrix2 solution_matrix(const CanonicalSolution& sol, double tolerance = 1e-10);

/// Per point: every channel has |Im M_j| ≤ tolerance·max(1, |M_j|).
std::vector<bool> realness_domain(const std::vector<std::vector<Complex>>& m_values,
                                  double tolerance = 1e-10);

/// A_ρ and A_v per channel at a point.
using AEvaluator = std::function<std::pair<std::vector<Complex>, std::vector<Complex>>(const WeylPoint&)>;

AEvaluator a_from_family(const SolutionFamily& family);

struct PsiGrid {
  std::vector<double> rho;
  std::vector<double> v;
  /// ρ-leg first, row-major: index i·|v| + j.
  std::vector<double> psi;
  /// max |ψ(ρ-leg first) − ψ(v-leg first)|.
  double path_residual = 0.0;

  double at(std::size_t i, std::size_t j) const { return psi[i * v.size() + j]; }
};

/// ψ on the rectilinear targets rho × v by Gauss-Legendre quadrature of
/// ∂_ρψ = ¼ρ Σ(A_ρ² − λA_v²), ∂_vψ = ½ρ Σ A_ρA_v along axis-parallel legs
/// from `base`, where ψ = base_value.
PsiGrid integrate_psi(const AEvaluator& a, const std::vector<double>& rho,
                      const std::vector<double>& v, Lambda lambda, const WeylPoint& base,
                      double base_value = 0.0);

/// Shifts ψ so that it equals `value` at target (i, j).
void anchor_psi(PsiGrid& grid, std::size_t i, std::size_t j, double value);

/// (2b e^{−ak})² (k²ρ²J₀² + k²ρ²J₁² − 2k cos²(kv) ρ J₀J₁), J at kρ.
double einstein_rosen_psi(double k, double a, double b, const WeylPoint& p);
/// exp(4b e^{−ak} cos(kv) J₀(kρ)).
double einstein_rosen_delta(double k, double a, double b, const WeylPoint& p);

/// ∫₀^∞ e^{−ak} cos(kv) J₀(kρ) dk = Re[1/√((a − iv)² + ρ²)], a > 0.
double pulse_integral(double a, const WeylPoint& p);
/// The two algebraic forms i/√((v+ia)²−ρ²) ± i/√((v−ia)²−ρ²), principal roots.
Complex pulse_decomposition(double a, const WeylPoint& p, bool difference);
/// Closed-form ψ of the pulse wave; a = 0 is a domain error.
double pulse_psi(double a, double b, const WeylPoint& p);

struct Rational {
  std::int64_t num;
  std::int64_t den;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct KasnerExponents {
  int n;
  Rational p1;
  Rational p2;
  Rational p3;
};

/// p₁ = n(n−1)/(n²−n+1), p₂ = (1−n)/(n²−n+1), p₃ = n/(n²−n+1), reduced.
KasnerExponents kasner_exponents(int n);
/// Σp = 1 and Σp² = 1 in exact rational arithmetic.
bool kasner_identities_hold(const KasnerExponents& e);
/// The n ≥ 1 producing the given exponents; a validation error when none does.
int kasner_index_for(const Rational& p1, const Rational& p2, const Rational& p3);

/// Descriptor of ds² = −dt² + Σ t^{2p_i} dx_i² with ρ = t^{1−p₁}, v = (1−p₁)x₁,
/// e^ψ = cρ^{2n²}; c defaults to 2^{−2n}/(1−p₁)². Includes a numeric check of
/// the metric components at sample times.
nlohmann::json kasner_line_element(int n, std::optional<double> c = std::nullopt);

struct MetricRow {
  double rho;
  double v;
  double delta;
  double b;
  double psi;
  bool real;
};

struct MetricData {
  Lambda lambda = Lambda::minus();
  int sigma = 1;
  int epsilon = -1;
  WeylPoint base_point{1.0, 0.0};
  double integration_constant = 0.0;
  double psi_path_residual = 0.0;
  std::vector<MetricRow> rows;
};

/// Δ and B from the solutions, ψ by integrate_psi; Δ and ψ are NaN outside
/// the real domain.
MetricData assemble_metric(const SolutionFamily& family, const Grid& grid, Lambda lambda,
                           const WeylPoint& base, double base_value = 0.0, int sigma = 1,
                           int epsilon = -1);

/// Columns rho,v,delta,B,psi,real_mask with 17 significant digits.
void write_metric_csv(std::ostream& out, const MetricData& data);

}  // namespace whgrav
