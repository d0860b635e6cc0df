#include "ssir/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ssir {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument(std::string("model parameter ") + name + " must be finite");
  }
}

void require_positive(double value, const char* name) {
  require_finite(value, name);
  if (!(value > 0.0)) {
    throw std::invalid_argument(std::string("model parameter ") + name + " must be positive");
  }
}

void require_nonnegative(double value, const char* name) {
  require_finite(value, name);
  if (!(value >= 0.0)) {
    throw std::invalid_argument(std::string("model parameter ") + name + " must be non-negative");
  }
}

class CoefficientReader {
 public:
  CoefficientReader(IncidenceKind kind, const Coefficients& coefficients)
      : kind_(kind), coefficients_(coefficients) {}

  double positive(const std::string& name) {
    const double v = lookup(name, true, 0.0);
    if (!(v > 0.0) || !std::isfinite(v)) fail(name, "must be positive and finite");
    return v;
  }

  double noise(const std::string& name, bool required) {
    const double v = lookup(name, required, 0.0);
    if (!(v >= 0.0) || !std::isfinite(v)) fail(name, "must be non-negative and finite");
    return v;
  }

  void reject_unused() const {
    for (const auto& [name, value] : coefficients_) {
      if (std::find(used_.begin(), used_.end(), name) == used_.end()) {
        fail(name, "is not a coefficient of this incidence kind");
      }
    }
  }

 private:
  double lookup(const std::string& name, bool required, double fallback) {
    used_.push_back(name);
    const auto it = coefficients_.find(name);
    if (it == coefficients_.end()) {
      if (required) fail(name, "is required");
      return fallback;
    }
    return it->second;
  }

  [[noreturn]] void fail(const std::string& name, const char* what) const {
    std::ostringstream msg;
    msg << to_string(kind_) << " incidence: coefficient '" << name << "' " << what;
    throw std::invalid_argument(msg.str());
  }

  IncidenceKind kind_;
  const Coefficients& coefficients_;
  std::vector<std::string> used_;
};

double halton(std::size_t index, std::size_t base) {
  double result = 0.0;
  double f = 1.0;
  while (index > 0) {
    f /= static_cast<double>(base);
    result += f * static_cast<double>(index % base);
    index /= base;
  }
  return result;
}

/// Accumulates one Lipschitz-type clause: |Δ| ≤ bound · distance.
class LipschitzClause {
 public:
  LipschitzClause(std::string name, double bound, double tolerance)
      : bound_(bound), tolerance_(tolerance) {
    result_.name = std::move(name);
  }

  void check(double v1, double v2, double distance, double s, double i) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    double ratio;
    bool ok;
    if (!std::isfinite(v1) || !std::isfinite(v2)) {
      ratio = kInf;
      ok = false;
    } else {
      const double diff = std::abs(v1 - v2);
      const double roundoff = 8.0 * eps * (std::abs(v1) + std::abs(v2));
      const double allowed = bound_ * distance * (1.0 + tolerance_) + roundoff;
      ok = diff <= allowed;
      const double scale = bound_ * distance;
      ratio = scale > 0.0 ? diff / scale : (diff > roundoff ? kInf : 0.0);
    }
    record(ok, ratio, s, i);
  }

  void record(bool ok, double ratio, double s, double i) {
    if (!ok) result_.passed = false;
    if (ratio > result_.worst_ratio || std::isnan(ratio)) {
      result_.worst_ratio = std::isnan(ratio) ? kInf : ratio;
      result_.worst_s = s;
      result_.worst_i = i;
    }
  }

  ClauseResult result() const { return result_; }

 private:
  double bound_;
  double tolerance_;
  ClauseResult result_;
};

}  // namespace

void validate_for_simulation(const ModelParams& p) {
  require_nonnegative(p.a1, "a1");
  require_positive(p.b1, "b1");
  require_positive(p.b2, "b2");
  require_positive(p.sigma1, "sigma1");
  require_nonnegative(p.sigma2, "sigma2");
}

void validate(const ModelParams& p) {
  validate_for_simulation(p);
  require_positive(p.a1, "a1");
}

DerivedConstants derive_constants(const ModelParams& p) {
  validate(p);
  const double s1sq = p.sigma1 * p.sigma1;
  DerivedConstants k{};
  k.c1 = p.b1 + 0.5 * s1sq;
  k.c2 = p.b2 + 0.5 * p.sigma2 * p.sigma2;
  k.a = 2.0 * k.c1 / s1sq;
  k.b = 2.0 * p.a1 / s1sq;
  if (!std::isfinite(k.a) || !std::isfinite(k.b) || !std::isfinite(k.c1) || !std::isfinite(k.c2)) {
    throw std::invalid_argument("derived constants overflow");
  }
  return k;
}

std::string_view to_string(IncidenceKind kind) {
  switch (kind) {
    case IncidenceKind::bilinear: return "bilinear";
    case IncidenceKind::holling2: return "holling2";
    case IncidenceKind::beddington_deangelis: return "beddington_deangelis";
    case IncidenceKind::nonlinear: return "nonlinear";
    case IncidenceKind::ratio_example: return "ratio_example";
    case IncidenceKind::custom: return "custom";
  }
  return "unknown";
}

IncidenceKind parse_incidence_kind(std::string_view name) {
  for (auto kind : {IncidenceKind::bilinear, IncidenceKind::holling2,
                    IncidenceKind::beddington_deangelis, IncidenceKind::nonlinear,
                    IncidenceKind::ratio_example, IncidenceKind::custom}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown incidence kind '" + std::string(name) + "'");
}

IncidenceModel make_catalog_incidence(IncidenceKind kind, const Coefficients& coefficients) {
  CoefficientReader read(kind, coefficients);
  IncidenceModel model;
  model.kind = kind;
  std::ostringstream desc;
  desc << to_string(kind);

  switch (kind) {
    case IncidenceKind::bilinear: {
      const double beta = read.positive("beta");
      const double m = read.noise("m", false);
      model.f = [beta](double s, double) { return beta * s; };
      model.g = [m](double s, double) { return m * s; };
      model.lipschitz_F = beta;
      model.lipschitz_G = m;
      model.bound_K = m > 0.0 ? kInf : 0.0;
      // Linear noise m·s is unbounded, and i·g is not Lipschitz in s.
      model.satisfies_assumption = m == 0.0;
      model.noise_free = m == 0.0;
      model.bounded_incidence_ratio = false;
      desc << "(beta=" << beta << ", m=" << m << ")";
      break;
    }
    case IncidenceKind::holling2: {
      const double beta = read.positive("beta");
      const double m1 = read.positive("m1");
      model.f = [beta, m1](double s, double) { return beta * s / (m1 + s); };
      model.g = [](double, double) { return 0.0; };
      model.lipschitz_F = beta / m1;
      model.satisfies_assumption = true;
      model.noise_free = true;
      desc << "(beta=" << beta << ", m1=" << m1 << ")";
      break;
    }
    case IncidenceKind::beddington_deangelis: {
      const double beta = read.positive("beta");
      const double m1 = read.positive("m1");
      const double m2 = read.positive("m2");
      model.f = [beta, m1, m2](double s, double i) { return beta * s / (1.0 + m1 * s + m2 * i); };
      model.g = [](double, double) { return 0.0; };
      // ∂f/∂s ≤ β and |∂f/∂i| ≤ β m2 s / (1 + m1 s)² ≤ β m2 / (4 m1).
      model.lipschitz_F = std::max(beta, beta * m2 / (4.0 * m1));
      model.satisfies_assumption = true;
      model.noise_free = true;
      model.bounded_incidence_ratio = true;
      desc << "(beta=" << beta << ", m1=" << m1 << ", m2=" << m2 << ")";
      break;
    }
    case IncidenceKind::nonlinear: {
      const double beta = read.positive("beta");
      const double l = read.positive("l");
      const double h = read.positive("h");
      const double m2 = read.positive("m2");
      model.f = [beta, l, h, m2](double s, double i) {
        if (s == 0.0) return 0.0;
        if (i == 0.0) {
          if (l > 1.0) return 0.0;
          if (l == 1.0) return beta * s;
          return kInf;
        }
        return beta * s * std::pow(i, l - 1.0) / (1.0 + m2 * std::pow(i, h));
      };
      model.g = [](double, double) { return 0.0; };
      // Nominal slope in s at i = 0; ∂f/∂i grows with s, so the global
      // Lipschitz clause fails and the model is flagged.
      model.lipschitz_F = beta;
      model.satisfies_assumption = false;
      model.noise_free = true;
      model.bounded_incidence_ratio = l == h;
      desc << "(beta=" << beta << ", l=" << l << ", h=" << h << ", m2=" << m2 << ")";
      break;
    }
    case IncidenceKind::ratio_example: {
      const double c = read.positive("c");
      const double m = read.noise("m", true);
      model.f = [c](double s, double i) { return c * s / (1.0 + s + i); };
      model.g = [m](double s, double i) { return m * s / (1.0 + s + i); };
      model.lipschitz_F = c;
      model.lipschitz_G = m;
      model.bound_K = m;
      model.satisfies_assumption = true;
      model.noise_free = m == 0.0;
      model.bounded_incidence_ratio = true;
      desc << "(c=" << c << ", m=" << m << ")";
      break;
    }
    case IncidenceKind::custom:
      throw std::invalid_argument("custom incidence has no catalog coefficients; use make_custom_incidence");
  }
  read.reject_unused();
  model.description = desc.str();
  return model;
}

IncidenceModel make_custom_incidence(RateFunction f, RateFunction g, double lipschitz_F,
                                     double lipschitz_G, double bound_K, bool satisfies_assumption,
                                     bool noise_free) {
  if (!f || !g) throw std::invalid_argument("custom incidence: f and g must be callable");
  IncidenceModel model;
  model.f = std::move(f);
  model.g = std::move(g);
  model.lipschitz_F = lipschitz_F;
  model.lipschitz_G = lipschitz_G;
  model.bound_K = bound_K;
  model.kind = IncidenceKind::custom;
  model.satisfies_assumption = satisfies_assumption;
  model.noise_free = noise_free;
  model.description = "custom";
  return model;
}

IncidenceModel zero_incidence() {
  auto zero = [](double, double) { return 0.0; };
  auto model = make_custom_incidence(zero, zero, 0.0, 0.0, 0.0, true, true);
  model.bounded_incidence_ratio = true;
  model.description = "zero";
  return model;
}

bool ValidationReport::all_passed() const {
  return std::all_of(clauses.begin(), clauses.end(), [](const ClauseResult& c) { return c.passed; });
}

const ClauseResult& ValidationReport::clause(std::string_view name) const {
  for (const auto& c : clauses) {
    if (c.name == name) return c;
  }
  throw std::out_of_range("no validation clause named '" + std::string(name) + "'");
}

ValidationReport validate_assumption(const IncidenceModel& model, const ValidationOptions& opt) {
  if (opt.sample_budget < 1000) {
    throw std::invalid_argument("validate_assumption: sample_budget must be at least 1000");
  }
  const auto& f = model.f;
  const auto& g = model.g;
  const double tol = opt.tolerance;

  LipschitzClause nonnegative("nonnegative", 0.0, tol);
  LipschitzClause f_zero("f_zero_at_s0", 0.0, tol);
  LipschitzClause g_zero("g_zero_at_s0", 0.0, tol);
  LipschitzClause f_s("f_lipschitz_s", model.lipschitz_F, tol);
  LipschitzClause f_i("f_lipschitz_i", model.lipschitz_F, tol);
  LipschitzClause g_s("g_lipschitz_s", model.lipschitz_G, tol);
  LipschitzClause g_i("g_lipschitz_i", model.lipschitz_G, tol);
  LipschitzClause ig_s("ig_lipschitz_s", model.lipschitz_G, tol);
  LipschitzClause g_bound("g_bounded", 0.0, tol);

  auto check_sign = [&](double s, double i) {
    const double fv = f(s, i);
    const double gv = g(s, i);
    const bool ok = !std::isnan(fv) && !std::isnan(gv) && fv >= 0.0 && gv >= 0.0;
    nonnegative.record(ok, ok ? 0.0 : std::max(-fv, -gv), s, i);
  };
  auto check_bound = [&](double s, double i) {
    const double gv = g(s, i);
    const double K = model.bound_K;
    const bool ok = !std::isnan(gv) && gv <= K * (1.0 + tol);
    const double ratio = K > 0.0 ? gv / K : (gv > 0.0 ? kInf : 0.0);
    g_bound.record(ok, std::isnan(gv) ? kInf : ratio, s, i);
  };

  for (std::size_t j = 1; j <= opt.sample_budget; ++j) {
    const double s = opt.s_max * halton(j, 2);
    const double i = opt.i_max * halton(j, 3);
    const double step = std::pow(10.0, -4.0 + 5.0 * halton(j, 5));

    check_sign(s, i);
    check_sign(s, 0.0);
    check_bound(s, i);

    const double f0 = f(0.0, i);
    f_zero.record(f0 == 0.0, std::abs(f0), 0.0, i);
    const double g0 = g(0.0, i);
    g_zero.record(g0 == 0.0, std::abs(g0), 0.0, i);

    const double f_si = f(s, i);
    const double g_si = g(s, i);
    f_s.check(f_si, f(s + step, i), step, s, i);
    f_i.check(f_si, f(s, i + step), step, s, i);
    f_i.check(f(s, 0.0), f(s, step), step, s, 0.0);
    g_s.check(g_si, g(s + step, i), step, s, i);
    g_i.check(g_si, g(s, i + step), step, s, i);
    g_i.check(g(s, 0.0), g(s, step), step, s, 0.0);
    ig_s.check(i * g_si, i * g(s + step, i), step, s, i);
  }

  ValidationReport report;
  report.samples = opt.sample_budget;
  for (const auto* clause : {&nonnegative, &f_zero, &g_zero, &f_s, &f_i, &g_s, &g_i, &ig_s, &g_bound}) {
    report.clauses.push_back(clause->result());
  }
  return report;
}

}  // namespace ssir
