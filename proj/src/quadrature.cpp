#include "ssir/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ssir {

namespace {

// Abscissae of the 15-point Kronrod rule; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double lo;
  double hi;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

double checked_eval(const std::function<double(double)>& fn, double x) {
  const double y = fn(x);
  if (!std::isfinite(y)) {
    std::ostringstream msg;
    msg << "integrand evaluation failure at x = " << x << " (value " << y << ")";
    throw std::domain_error(msg.str());
  }
  return y;
}

Segment kronrod15(const std::function<double(double)>& fn, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = checked_eval(fn, center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double abs_sum = std::abs(kronrod);
  std::array<double, 7> f1{}, f2{};
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = checked_eval(fn, center - dx);
    f2[j] = checked_eval(fn, center + dx);
    const double pair = f1[j] + f2[j];
    kronrod += kWgk[j] * pair;
    abs_sum += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::abs(fc - mean);
  for (std::size_t j = 0; j < 7; ++j) {
    asc += kWgk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double result = kronrod * half;
  const double res_abs = abs_sum * std::abs(half);
  const double res_asc = asc * std::abs(half);
  double error = std::abs((kronrod - gauss) * half);
  if (res_asc != 0.0 && error != 0.0) {
    error = res_asc * std::min(1.0, std::pow(200.0 * error / res_asc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (res_abs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    error = std::max(50.0 * eps * res_abs, error);
  }
  return {lo, hi, result, error};
}

}  // namespace

QuadratureResult integrate_gauss_kronrod(const std::function<double(double)>& integrand, double lo,
                                         double hi, const QuadratureOptions& options) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("integrate_gauss_kronrod: bounds must be finite");
  }
  QuadratureResult out;
  if (lo == hi) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Segment> heap;
  heap.push(kronrod15(integrand, lo, hi));
  out.evaluations = 15;
  double total = heap.top().value;
  double total_error = heap.top().error;

  auto tolerance = [&] { return std::max(options.abs_tol, options.rel_tol * std::abs(total)); };

  while (total_error > tolerance() && heap.size() < options.max_intervals) {
    const Segment worst = heap.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    // Interval can no longer be split in floating point.
    if (mid <= worst.lo || mid >= worst.hi) break;
    heap.pop();
    const Segment left = kronrod15(integrand, worst.lo, mid);
    const Segment right = kronrod15(integrand, mid, worst.hi);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum from the segments so the running updates do not accumulate roundoff.
  out.intervals = heap.size();
  std::vector<Segment> segments;
  segments.reserve(heap.size());
  while (!heap.empty()) {
    segments.push_back(heap.top());
    heap.pop();
  }
  std::sort(segments.begin(), segments.end(),
            [](const Segment& a, const Segment& b) { return a.lo < b.lo; });
  out.value = 0.0;
  out.abs_error = 0.0;
  for (const auto& s : segments) {
    out.value += s.value;
    out.abs_error += s.error;
  }
  out.converged = out.abs_error <= std::max(options.abs_tol, options.rel_tol * std::abs(out.value));
  return out;
}

}  // namespace ssir
