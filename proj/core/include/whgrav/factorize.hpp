#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "whgrav/cauchy.hpp"
#include "whgrav/contour.hpp"
#include "whgrav/monodromy.hpp"
#include "whgrav/types.hpp"

namespace whgrav {

enum class Backend { Auto, QuadratureCauchy, PartialFraction, RationalZeroPole, Composite };

std::string_view to_string(Backend backend);
Backend backend_from_string(std::string_view name);

/// log X_j for one channel: analytic inside Γ (up to the zeros a deformation
/// introduces) with log X_j(0) = 0.
class PlusFactor {
 public:
  virtual ~PlusFactor() = default;
  virtual Complex log_value(Complex tau) const = 0;
  virtual Complex log_derivative(Complex tau) const = 0;
  /// Taylor coefficients of log X_j at 0, orders 0..order.
  virtual std::vector<Complex> log_taylor(int order) const = 0;

  Complex value(Complex tau) const { return std::exp(log_value(tau)); }
};

using PlusFactorPtr = std::shared_ptr<const PlusFactor>;

/// (1 − τ/root)^multiplicity
struct RootFactor {
  Complex root;
  int multiplicity = 0;
};

struct PoleResidue {
  Complex pole;
  Complex residue;
};

/// Exact P± of a rational exponent: residue terms split by the side of
/// their pole, and the Laurent polynomial part split by sign of the power.
struct PartialFractionSplit {
  std::vector<PoleResidue> plus_poles;
  std::vector<PoleResidue> minus_poles;
  /// Coefficients of τ^n, n ≥ 0.
  std::vector<Complex> plus_poly;
  /// Coefficients of τ^{−n}, n ≥ 1, stored at index n − 1.
  std::vector<Complex> minus_poly;

  Complex plus(Complex tau) const;
  Complex plus_derivative(Complex tau) const;
  Complex minus(Complex tau) const;
  Complex plus_at_zero() const;
};

/// Rational split (ω(τ) − a)^N = minus(τ)·plus(τ) with plus(0) = 1.
struct RationalSplit {
  Complex normalization;
  std::vector<RootFactor> plus_roots;
  /// (1 − root/τ)^multiplicity factors of the minus side.
  std::vector<RootFactor> minus_roots;

  Complex plus(Complex tau) const;
  Complex minus(Complex tau) const;
};

PlusFactorPtr identity_factor();
PlusFactorPtr quadrature_factor(ScalarFactorization fac, ScalarFn dlog_closed = {});
PlusFactorPtr rational_factor(std::vector<RootFactor> roots);
PlusFactorPtr partial_fraction_factor(PartialFractionSplit split);
PlusFactorPtr sum_factor(std::vector<PlusFactorPtr> parts);
PlusFactorPtr negated_factor(PlusFactorPtr inner);

RationalSplit rational_zero_pole_factorize(const ChannelExpr& channel, const WeylPoint& point,
                                           const Contour& contour);
PartialFractionSplit partial_fraction_projection(const ChannelExpr& channel,
                                                 const WeylPoint& point, const Contour& contour);

struct ChannelSolution {
  Complex log_m;
  PlusFactorPtr x;
  Backend backend = Backend::QuadratureCauchy;
  /// ∂_ρ log M_j and ∂_v log M_j.
  Complex a_rho;
  Complex a_v;

  Complex m() const { return std::exp(log_m); }
};

struct DeformationTerm {
  Complex omega;
  int multiplicity = 1;
};

/// Per-channel multisets of spectral parameters.
struct DeformationSpec {
  std::vector<std::vector<DeformationTerm>> channels;

  /// ω with multiplicity n on channel 0 and −n on channel 1.
  static DeformationSpec unimodular(Complex omega, int n);
  static DeformationSpec from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
  bool empty() const;
};

/// One factor R(τ) = (τ_i/τ̃_i)(τ − τ̃_i)/(τ − τ_i) with τ_i the root of ω_i
/// outside Γ and τ̃_i = −λ/τ_i the root inside.
struct DeformationFactor {
  Complex tau_i;
  Complex tau_tilde_i;
  Lambda lambda = Lambda::minus();

  Complex value(Complex tau) const;
  /// τ_i/τ̃_i = −λτ_i².
  Complex alpha() const { return tau_i / tau_tilde_i; }
};

DeformationFactor deformation_factor(Complex omega, const WeylPoint& point, const Contour& contour);

struct CanonicalSolution {
  WeylPoint point{1.0, 0.0};
  Lambda lambda = Lambda::minus();
  ContourPtr contour;
  std::vector<ChannelSolution> channels;
  bool meromorphic = false;
  /// The monodromy this solution factorizes, when known.
  std::optional<DiagonalMonodromy> monodromy;
  nlohmann::json provenance;

  std::size_t size() const { return channels.size(); }
  Complex m(std::size_t j) const { return channels[j].m(); }
  Complex x(std::size_t j, Complex tau) const { return channels[j].x->value(tau); }
};

struct SolveOptions {
  Backend backend = Backend::Auto;
  ProjectionMethod projection = ProjectionMethod::Auto;
};

CanonicalSolution canonical_solve(const DiagonalMonodromy& mono, const WeylPoint& point,
                                  ContourPtr contour, SolveOptions options = {});

CanonicalSolution deform(const CanonicalSolution& sol, const DeformationSpec& spec);
CanonicalSolution invert_solution(const CanonicalSolution& sol);
CanonicalSolution multiply_solutions(const CanonicalSolution& a, const CanonicalSolution& b);
CanonicalSolution identity_solution(const WeylPoint& point, ContourPtr contour,
                                    std::size_t channels = 2);

/// max over nodes and channels of |𝓜_j(τ) − X_j(−λ/τ) M_j X_j(τ)| / max|𝓜_j|.
double factorization_residual(const CanonicalSolution& sol);

/// Taylor coefficients of X_j (not its log) at 0, orders 0..order.
std::vector<Complex> x_taylor(const CanonicalSolution& sol, std::size_t channel, int order);

nlohmann::json to_json(const CanonicalSolution& sol);

}  // namespace whgrav
