#include "brw/stable.hpp"

#include <cmath>
#include <stdexcept>

namespace brw {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// G(2-a)/(a-1) * c, the common prefactor of all exponents here.
double prefactor(double alpha, double c) {
  return std::tgamma(2.0 - alpha) / (alpha - 1.0) * c;
}

// Exponent G(2-a)/(a-1) cEff |t|^a (cos(pi a/2) - i sin(pi a/2) sgn t),
// built from |t| so that Hermitian symmetry holds exactly in floating point.
std::complex<double> stable_exponent(double alpha, double cEff, double t) {
  const double at = std::abs(t);
  const double mag = prefactor(alpha, cEff) * std::pow(at, alpha);
  const double half = 0.5 * kPi * alpha;
  const double re = mag * std::cos(half);
  const double im = -mag * std::sin(half);
  return {re, t < 0.0 ? -im : im};
}

void require_weights(std::span<const double> w, const char* who) {
  if (w.empty()) throw std::invalid_argument(std::string(who) + ": empty mixing weights");
}

// Average of exp(base * w) over the mixing weights.
std::complex<double> mix_average(std::complex<double> base,
                                 std::span<const double> w) {
  std::complex<double> acc{0.0, 0.0};
  for (double wi : w) acc += std::exp(base * wi);
  return acc / static_cast<double>(w.size());
}

}  // namespace

StableSpec::StableSpec(double alpha_, double c_) : alpha(alpha_), c(c_) {
  if (!(alpha > 1.0 && alpha < 2.0))
    throw std::invalid_argument("StableSpec: alpha in (1,2) required");
  if (!(c > 0.0)) throw std::invalid_argument("StableSpec: c > 0 required");
  sigmaAlpha = prefactor(alpha, c) * std::abs(std::cos(0.5 * kPi * alpha));
}

double StableSpec::sigma() const {
  return std::pow(sigmaAlpha, 1.0 / alpha);
}

ARSpec::ARSpec(double phi_, StableSpec base_) : phi(phi_), base(base_) {
  if (!(phi > 0.0 && phi < 1.0))
    throw std::invalid_argument("ARSpec: phi in (0,1) required");
}

std::complex<double> cf_Q(const StableSpec& spec, double t) {
  return std::exp(stable_exponent(spec.alpha, spec.c, t));
}

std::complex<double> cf_U0(const ARSpec& ar, double t) {
  const double denom = 1.0 - std::pow(ar.phi, ar.base.alpha);
  return std::exp(stable_exponent(ar.base.alpha, ar.base.c / denom, t));
}

double cf_U0_product_error_bound(const ARSpec& ar, int J, double t) {
  // |cf_U0 - prod_{j<=J}| <= |missing exponent|; the exponent modulus is
  // sigmaAlpha/|cos(pi a/2)| per unit of |t|^a c-mass.
  const double alpha = ar.base.alpha;
  const double phiA = std::pow(ar.phi, alpha);
  const double tailMass = std::pow(phiA, J + 1) / (1.0 - phiA);
  return prefactor(alpha, ar.base.c) * std::pow(std::abs(t), alpha) * tailMass;
}

double sample_Q(const StableSpec& spec, StreamRng& rng) {
  // Standard skewed-stable generator in the one-parameterization,
  // specialized to beta = 1, alpha in (1,2):
  //   B = atan(beta tan(pi a/2))/a = pi (a-2)/(2a),  S = |cos(pi a/2)|^{-1/a}
  //   X = S sin(a(V+B)) / cos(V)^{1/a} * (cos(V - a(V+B))/W)^{(1-a)/a}
  // which has CF exp(-|t|^a (1 - i tan(pi a/2) sgn t)); scaling by sigma
  // matches cf_Q (verified by the ECF oracle in the tests).
  const double alpha = spec.alpha;
  const double b = kPi * (alpha - 2.0) / (2.0 * alpha);
  const double s = std::pow(std::abs(std::cos(0.5 * kPi * alpha)), -1.0 / alpha);
  const double v = kPi * (rng.next_unit() - 0.5);
  const double w = rng.next_exponential();
  const double x = s * std::sin(alpha * (v + b)) /
                   std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - alpha * (v + b)) / w,
                            (1.0 - alpha) / alpha);
  return spec.sigma() * x;
}

namespace {

int series_depth(const ARSpec& ar) {
  // Truncation J with CF-exponent error below 1e-8 at |t| = 5.
  const double alpha = ar.base.alpha;
  const double phiA = std::pow(ar.phi, alpha);
  const double full = prefactor(alpha, ar.base.c) * std::pow(5.0, alpha) /
                      (1.0 - phiA);
  const double target = 1e-8 / full;
  const int J =
      static_cast<int>(std::ceil(std::log(target) / std::log(phiA))) + 1;
  return std::max(J, 1);
}

}  // namespace

double sample_U0(const ARSpec& ar, StreamRng& rng) {
  const int J = series_depth(ar);
  double acc = 0.0, phij = 1.0;
  for (int j = 0; j <= J; ++j) {
    acc += phij * sample_Q(ar.base, rng);
    phij *= ar.phi;
  }
  return acc;
}

double sample_U0_direct(const ARSpec& ar, StreamRng& rng) {
  const double scale =
      std::pow(1.0 - std::pow(ar.phi, ar.base.alpha), -1.0 / ar.base.alpha);
  return scale * sample_Q(ar.base, rng);
}

std::vector<double> sample_U_path(const ARSpec& ar, int r, StreamRng& rng) {
  if (r < 1) throw std::invalid_argument("sample_U_path: r >= 1 required");
  std::vector<double> path(static_cast<std::size_t>(r));
  path[0] = sample_U0(ar, rng);
  for (int k = 1; k < r; ++k)
    path[k] = ar.phi * path[k - 1] + sample_Q(ar.base, rng);
  return path;
}

std::complex<double> mixture_cf(const StableSpec& spec, double kappa,
                                std::span<const double> mixWeights, double t) {
  require_weights(mixWeights, "mixture_cf");
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::invalid_argument("mixture_cf: kappa in (0,1) required");
  const auto base = stable_exponent(spec.alpha, spec.c / (1.0 - kappa), t);
  return mix_average(base, mixWeights);
}

std::vector<double> cramer_wold_gammas(std::span<const double> betas,
                                       double kappa, double alpha) {
  if (betas.empty())
    throw std::invalid_argument("cramer_wold_gammas: betas nonempty");
  const std::size_t r = betas.size();
  std::vector<double> gamma(r, 0.0);
  const double step = std::pow(kappa, 1.0 / alpha);
  // gamma_i = beta_i + step * gamma_{i+1}, computed backwards.
  double acc = 0.0;
  for (std::size_t i = r; i-- > 0;) {
    acc = betas[i] + step * acc;
    gamma[i] = acc;
  }
  return gamma;
}

std::complex<double> fdd_limit_cf(const StableSpec& spec, double kappa,
                                  std::span<const double> betas,
                                  std::span<const double> mixWeights,
                                  double t) {
  require_weights(mixWeights, "fdd_limit_cf");
  const auto gamma = cramer_wold_gammas(betas, kappa, spec.alpha);
  // |gamma_i w^{1/a} t|^a = |gamma_i t|^a w, so the whole product is
  // exp(base * w) with a weight-independent base.
  std::complex<double> base =
      stable_exponent(spec.alpha, spec.c / (1.0 - kappa), gamma[0] * t);
  for (std::size_t i = 1; i < gamma.size(); ++i)
    base += stable_exponent(spec.alpha, spec.c, gamma[i] * t);
  return mix_average(base, mixWeights);
}

std::complex<double> two_sided_limit_cf(double alpha, double c1, double c2,
                                        std::span<const double> mixWeights,
                                        double t) {
  require_weights(mixWeights, "two_sided_limit_cf");
  if (c1 < 0.0 || c2 < 0.0)
    throw std::invalid_argument("two_sided_limit_cf: c1, c2 >= 0 required");
  if (c1 + c2 == 0.0) return {1.0, 0.0};
  const auto pos = stable_exponent(alpha, c1, t);
  // The c2 side carries (cos + i sin sgn t), i.e. stable_exponent at -t.
  const auto neg = stable_exponent(alpha, c2, -t);
  return mix_average(pos + neg, mixWeights);
}

}  // namespace brw
