#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "whgrav/cauchy.hpp"
#include "whgrav/contour.hpp"
#include "whgrav/spectral.hpp"
#include "whgrav/types.hpp"

namespace whgrav {

/// c·e^{−damping·k}·cos(kω)
struct CosTerm {
  Complex c;
  double k;
  double damping = 0.0;
};

/// c·e^{−damping·k}·sin(kω)
struct SinTerm {
  Complex c;
  double k;
  double damping = 0.0;
};

/// c/(ω − a)
struct PoleTerm {
  Complex c;
  double a;
};

/// c/(ω² + a²)
struct InvQuadTerm {
  Complex c;
  double a;
};

/// c·ω^p
struct PowerTerm {
  Complex c;
  int p;
};

using ExpTerm = std::variant<CosTerm, SinTerm, PoleTerm, InvQuadTerm, PowerTerm>;

/// exp(Σ terms). `strip`, when set, bounds |Im ω| on the contour image.
struct ExpSum {
  std::vector<ExpTerm> terms;
  std::optional<double> strip;
};

/// (ω − a)^n
struct MonomialPower {
  double a;
  int n;
};

struct ChannelExpr;

struct ProductExpr {
  std::vector<ChannelExpr> factors;
};

struct ChannelExpr {
  std::variant<ExpSum, MonomialPower, ProductExpr> form;
};

Complex exponent(const ExpSum& sum, Complex omega);
Complex exponent_derivative(const ExpSum& sum, Complex omega);

Complex evaluate_channel(const ChannelExpr& expr, Complex omega);
/// ∂_ω log of the channel.
Complex dlog_channel(const ChannelExpr& expr, Complex omega);
/// The exact logarithm when the channel is a product of ExpSums.
std::optional<Complex> exact_log_channel(const ChannelExpr& expr, Complex omega);
/// Poles, zeros and essential singularities in the ω-plane.
std::vector<Complex> singular_points(const ChannelExpr& expr);

bool is_exp_only(const ChannelExpr& expr);
/// True when every factor is an ExpSum whose terms are rational in ω.
bool has_rational_exponent(const ChannelExpr& expr);
/// True when every factor is a MonomialPower.
bool is_monomial_product(const ChannelExpr& expr);

struct DiagonalMonodromy {
  Lambda lambda = Lambda::minus();
  std::vector<ChannelExpr> channels;
  std::string name;

  std::size_t size() const { return channels.size(); }
};

DiagonalMonodromy parse_monodromy(const nlohmann::json& doc);
nlohmann::json to_json(const DiagonalMonodromy& mono);

/// diag(e^{g}, e^{−g}), g = 4b e^{−ak} cos(kω).
DiagonalMonodromy einstein_rosen(double k, double a, double b, Lambda lambda = Lambda::minus());
/// diag((ω−a)^N, (ω−a)^{−N}).
DiagonalMonodromy kasner(double a, int n, Lambda lambda = Lambda::minus());
/// diag(e^{f}, e^{−f}), f = 4ab/(ω² + a²).
DiagonalMonodromy pulse(double a, double b, Lambda lambda = Lambda::minus());
/// diag(c, 1/c).
DiagonalMonodromy constant_monodromy(Complex c, Lambda lambda = Lambda::minus());
/// Channelwise product of two monodromies with equal channel counts.
DiagonalMonodromy multiply(const DiagonalMonodromy& a, const DiagonalMonodromy& b);
DiagonalMonodromy inverse(const DiagonalMonodromy& m);

/// Presets by name: "einstein_rosen" {k,a,b}, "kasner" {a,N}, "pulse" {a,b},
/// "constant" {c}; "lambda" optional.
DiagonalMonodromy preset(const std::string& name, const nlohmann::json& params);

/// Channel values at ω(τ) for a point.
Complex evaluate_on_curve(const ChannelExpr& expr, Complex tau, const WeylPoint& point,
                          Lambda lambda);

/// Samples of every channel of 𝓜_{ρ,v} on the contour. Raises an
/// inadmissible-contour error when a singularity of a channel maps onto Γ
/// or the image leaves a declared strip.
std::vector<BoundarySamples> compose_on_contour(const DiagonalMonodromy& mono,
                                                const WeylPoint& point, ContourPtr contour);

/// max over nodes and channels of |𝓜(i_λ(τ_k)) − 𝓜(τ_k)|.
double symmetry_residual(const DiagonalMonodromy& mono, const WeylPoint& point,
                         const Contour& contour);
/// max over nodes of |Π_j 𝓜_j(τ_k) − 1|.
double determinant_deviation(const DiagonalMonodromy& mono, const WeylPoint& point,
                             const Contour& contour);

}  // namespace whgrav
