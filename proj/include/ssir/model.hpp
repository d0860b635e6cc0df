#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ssir {

/// Rates and noise intensities of the two-compartment stochastic SIR system
///
///   dS = [a1 − b1 S − I f(S,I)] dt + σ1 S dB1 − I g(S,I) dB3
///   dI = [−b2 I + I f(S,I)] dt + σ2 I dB2 + I g(S,I) dB3
struct ModelParams {
  double a1 = 0.0;      ///< recruitment
  double b1 = 0.0;      ///< susceptible death rate
  double b2 = 0.0;      ///< infected removal rate
  double sigma1 = 0.0;  ///< S-noise intensity
  double sigma2 = 0.0;  ///< I-noise intensity
};

struct DerivedConstants {
  double c1;  ///< b1 + σ1²/2
  double c2;  ///< b2 + σ2²/2
  double a;   ///< 2 c1 / σ1², boundary law shape
  double b;   ///< 2 a1 / σ1², boundary law scale
};

/// Throws std::invalid_argument unless a1, b1, b2, σ1 > 0, σ2 ≥ 0, all finite.
void validate(const ModelParams& params);

/// Same as validate() but admits a1 = 0, which the simulator accepts (the
/// boundary process is then geometric Brownian motion).
void validate_for_simulation(const ModelParams& params);

DerivedConstants derive_constants(const ModelParams& params);

/// A point of the open positive quadrant.
struct State {
  double s = 0.0;
  double i = 0.0;
};

enum class IncidenceKind { bilinear, holling2, beddington_deangelis, nonlinear, ratio_example, custom };

std::string_view to_string(IncidenceKind kind);
/// Throws std::invalid_argument for an unknown name.
IncidenceKind parse_incidence_kind(std::string_view name);

/// Per-capita incidence f or incidence noise g as a function of (s, i).
using RateFunction = std::function<double(double s, double i)>;

/// The pair (f, g) with the declared constants F, G, K of the standing
/// assumptions. F(S, I) = I f(S, I) is derived on demand (see incidence()).
struct IncidenceModel {
  RateFunction f;
  RateFunction g;
  double lipschitz_F = 0.0;
  double lipschitz_G = 0.0;
  double bound_K = 0.0;
  IncidenceKind kind = IncidenceKind::custom;
  bool satisfies_assumption = false;
  /// g vanishes identically (comparison arguments apply).
  bool noise_free = false;
  /// i f(s, i) / s is uniformly bounded.
  bool bounded_incidence_ratio = false;
  std::string description;

  double incidence(double s, double i) const { return i * f(s, i); }
};

using Coefficients = std::map<std::string, double, std::less<>>;

/// Builds a catalog model. Coefficients by kind:
///   bilinear             beta, [m]          f = βs,                  g = m s
///   holling2             beta, m1           f = βs / (m1 + s)
///   beddington_deangelis beta, m1, m2       f = βs / (1 + m1 s + m2 i)
///   nonlinear            beta, l, h, m2     f = βs i^(l−1) / (1 + m2 i^h)
///   ratio_example        c, m               f = cs / (1+s+i), g = ms / (1+s+i)
/// Noise coefficients m may be zero; every other coefficient must be positive.
/// Throws std::invalid_argument on unknown kind, missing, unknown or
/// non-positive coefficients.
IncidenceModel make_catalog_incidence(IncidenceKind kind, const Coefficients& coefficients);

IncidenceModel make_custom_incidence(RateFunction f, RateFunction g, double lipschitz_F,
                                     double lipschitz_G, double bound_K, bool satisfies_assumption,
                                     bool noise_free = false);

/// f ≡ g ≡ 0.
IncidenceModel zero_incidence();

struct ValidationOptions {
  double s_max = 100.0;
  double i_max = 100.0;
  std::size_t sample_budget = 10000;
  double tolerance = 1e-9;  ///< relative slack on every declared bound
};

struct ClauseResult {
  std::string name;
  bool passed = true;
  /// Largest observed (|difference| / declared bound) or value / bound.
  double worst_ratio = 0.0;
  double worst_s = 0.0;
  double worst_i = 0.0;
};

struct ValidationReport {
  std::vector<ClauseResult> clauses;
  std::size_t samples = 0;

  bool all_passed() const;
  /// Throws std::out_of_range for an unknown clause name.
  const ClauseResult& clause(std::string_view name) const;
};

/// Spot-checks the standing assumptions on quasi-random (Halton) samples of
/// [0, s_max] × [0, i_max], each paired with a log-uniform perturbation, plus
/// the edges s = 0 and i = 0. Clauses:
///   nonnegative, f_zero_at_s0, g_zero_at_s0, f_lipschitz_s, f_lipschitz_i,
///   g_lipschitz_s, g_lipschitz_i, ig_lipschitz_s, g_bounded
/// Throws std::invalid_argument if sample_budget < 1000.
ValidationReport validate_assumption(const IncidenceModel& model, const ValidationOptions& options = {});

}  // namespace ssir
