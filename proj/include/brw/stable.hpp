#pragma once

#include <complex>
#include <span>
#include <vector>

#include "brw/rng.hpp"

namespace brw {

// Spectrally positive alpha-stable innovation law, parameterized by the
// tail pair (alpha, c):
//   E[e^{itQ}] = exp( G(2-a)/(a-1) c |t|^a (cos(pi a/2) - i sin(pi a/2) sgn t) ).
// In the classical one-parameterization this is S(sigma, beta=1, mu=0)
// with sigma^alpha = c G(2-a)/(a-1) |cos(pi a/2)|.
struct StableSpec {
  double alpha;       // in (1,2)
  double c;           // > 0
  double sigmaAlpha;  // sigma^alpha
  double beta = 1.0;
  double mu = 0.0;

  StableSpec(double alpha_, double c_);
  double sigma() const;
};

// Stationary AR(1) driven by StableSpec innovations: U_k = phi U_{k-1} + Q_k.
struct ARSpec {
  double phi;  // in (0,1), phi = kappa^{1/alpha}
  StableSpec base;

  ARSpec(double phi_, StableSpec base_);
};

// Characteristic function of Q.
std::complex<double> cf_Q(const StableSpec& spec, double t);

// Characteristic function of the stationary marginal U_0:
// same as cf_Q with c replaced by c/(1-phi^alpha).
std::complex<double> cf_U0(const ARSpec& ar, double t);

// Error bound for approximating cf_U0 by the truncated product
// prod_{j=0..J} cf_Q(phi^j t).
double cf_U0_product_error_bound(const ARSpec& ar, int J, double t);

// One draw of Q via the trigonometric (uniform + exponential) method.
double sample_Q(const StableSpec& spec, StreamRng& rng);

// One stationary draw of U_0 via the truncated series sum_j phi^j Q_{-j};
// J is chosen so the CF-exponent truncation error is below 1e-8 on |t|<=5.
double sample_U0(const ARSpec& ar, StreamRng& rng);

// Direct route used as a cross-check: a single stable draw scaled by
// (1-phi^alpha)^{-1/alpha}.
double sample_U0_direct(const ARSpec& ar, StreamRng& rng);

// (U_0, ..., U_{r-1}) started from the stationary law.
std::vector<double> sample_U_path(const ARSpec& ar, int r, StreamRng& rng);

// Empirical average over mixing weights w (samples of W(alpha theta)) of
// exp( G(2-a)/(a-1) c w/(1-kappa) |t|^a (cos - i sin sgn t) ).
std::complex<double> mixture_cf(const StableSpec& spec, double kappa,
                                std::span<const double> mixWeights, double t);

// Cramer-Wold coefficients gamma_i = sum_{j=i..r} beta_j kappa^{(j-i)/alpha}.
std::vector<double> cramer_wold_gammas(std::span<const double> betas,
                                       double kappa, double alpha);

// Limit CF of sum_j beta_j kappa^{-(n-j)/alpha}(W - W_{n-j}):
// E[ Phi(gamma_0 W^{1/a} t) prod_{i>=1} Psi(gamma_i W^{1/a} t) ] averaged
// over the empirical mixing weights.
std::complex<double> fdd_limit_cf(const StableSpec& spec, double kappa,
                                  std::span<const double> betas,
                                  std::span<const double> mixWeights, double t);

// Two-sided mixture CF with tail constants (c1, c2):
// E[ exp( G(2-a)/(a-1) w |t|^a ((c1+c2)cos - i(c1-c2) sin sgn t) ) ].
std::complex<double> two_sided_limit_cf(double alpha, double c1, double c2,
                                        std::span<const double> mixWeights,
                                        double t);

}  // namespace brw
