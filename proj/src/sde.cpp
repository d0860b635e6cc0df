#include "ssir/sde.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "ssir/random.hpp"
#include "ssir/util.hpp"

namespace ssir {

namespace {

using Increments = std::array<double, 3>;
using StreamMask = std::array<bool, 3>;

// Bridge draws for step n live at counter n * kBridgeSlots + node.
constexpr std::uint64_t kBridgeSlots = 128;

struct SimConstants {
  double a1, c1, c2, sigma1, sigma2;

  explicit SimConstants(const ModelParams& p)
      : a1(p.a1),
        c1(p.b1 + 0.5 * p.sigma1 * p.sigma1),
        c2(p.b2 + 0.5 * p.sigma2 * p.sigma2),
        sigma1(p.sigma1),
        sigma2(p.sigma2) {}
};

class BridgeDraws {
 public:
  explicit BridgeDraws(const Provenance& prov)
      : streams_{RandomStream(prov.master_seed, stream_tag::bridge_base + 1, prov.trajectory_index),
                 RandomStream(prov.master_seed, stream_tag::bridge_base + 2, prov.trajectory_index),
                 RandomStream(prov.master_seed, stream_tag::bridge_base + 3, prov.trajectory_index)} {}

  double normal(int k, std::uint64_t step, std::uint32_t node) const {
    return streams_[static_cast<std::size_t>(k)].normal_at(step * kBridgeSlots + node);
  }

 private:
  std::array<RandomStream, 3> streams_;
};

class GeneratedSource {
 public:
  GeneratedSource(const Provenance& prov, double dt)
      : streams_{RandomStream(prov.master_seed, stream_tag::brownian_base + 1, prov.trajectory_index),
                 RandomStream(prov.master_seed, stream_tag::brownian_base + 2, prov.trajectory_index),
                 RandomStream(prov.master_seed, stream_tag::brownian_base + 3, prov.trajectory_index)},
        sqrt_dt_(std::sqrt(dt)),
        bridge_(prov) {}

  double dB(int k, std::uint64_t step) const {
    return sqrt_dt_ * streams_[static_cast<std::size_t>(k)].normal_at(step);
  }
  const BridgeDraws& bridge() const { return bridge_; }

 private:
  std::array<RandomStream, 3> streams_;
  double sqrt_dt_;
  BridgeDraws bridge_;
};

class BundleSource {
 public:
  explicit BundleSource(const BrownianBundle& bundle) : bundle_(bundle), bridge_(bundle.provenance) {}

  double dB(int k, std::uint64_t step) const {
    return bundle_.increments[static_cast<std::size_t>(k)][static_cast<Eigen::Index>(step)];
  }
  const BridgeDraws& bridge() const { return bridge_; }

 private:
  const BrownianBundle& bundle_;
  BridgeDraws bridge_;
};

template <class Source>
Increments increments_at(const Source& src, std::uint64_t step, const StreamMask& used) {
  Increments dB{};
  for (int k = 0; k < 3; ++k) {
    if (used[static_cast<std::size_t>(k)]) dB[static_cast<std::size_t>(k)] = src.dB(k, step);
  }
  return dB;
}

// Stiffness guard: while needs_split(h) holds, halve the step, splitting each
// used increment through a Brownian bridge midpoint draw. A substep still
// stiff at the deepest level is flagged so the caller can integrate the
// recruitment term exactly.
template <class NeedsSplit, class Advance>
void advance_guarded(const BridgeDraws& bridge, std::uint64_t step, std::uint32_t node, int depth,
                     double h, const Increments& dB, const StreamMask& used, NeedsSplit& needs_split,
                     Advance& advance) {
  if (depth < kMaxRefinement && needs_split(h)) {
    Increments left{}, right{};
    const double half_sd = 0.5 * std::sqrt(h);
    for (std::size_t k = 0; k < 3; ++k) {
      if (!used[k]) continue;
      left[k] = 0.5 * dB[k] + half_sd * bridge.normal(static_cast<int>(k), step, node);
      right[k] = dB[k] - left[k];
    }
    advance_guarded(bridge, step, 2 * node, depth + 1, 0.5 * h, left, used, needs_split, advance);
    advance_guarded(bridge, step, 2 * node + 1, depth + 1, 0.5 * h, right, used, needs_split, advance);
  } else {
    advance(h, dB, needs_split(h));
  }
}

// ln S increment from a1/S over h: Euler, or ln(1 + a1·h/S) when unresolved.
double recruitment(double a1, double log_s, double h, bool unresolved) {
  const double rate = a1 * std::exp(-log_s);
  return unresolved ? std::log1p(rate * h) : rate * h;
}

[[noreturn]] void throw_step_error(const char* what, std::uint64_t step) {
  std::ostringstream msg;
  msg << what << " at step " << step;
  throw StepError(msg.str(), step);
}

LogState full_step(const LogState& st, const SimConstants& k, const IncidenceModel& model,
                   const Increments& dB, double h, std::uint64_t step, bool unresolved = false) {
  const double s = std::exp(st.log_s);
  const double i = std::exp(st.log_i);
  const double f = model.f(s, i);
  const double g = model.g(s, i);
  const double ratio = std::exp(st.log_i - st.log_s);
  const double rg = ratio * g;
  LogState next;
  next.log_s = st.log_s + recruitment(k.a1, st.log_s, h, unresolved) +
               (-k.c1 - ratio * f - 0.5 * rg * rg) * h + k.sigma1 * dB[0] - rg * dB[2];
  next.log_i = st.log_i + (-k.c2 + f - 0.5 * g * g) * h + k.sigma2 * dB[1] + g * dB[2];
  if (!std::isfinite(next.log_s) || !std::isfinite(next.log_i)) {
    throw_step_error("non-finite state in full-system step", step);
  }
  next.log_s = std::max(next.log_s, kFloorLog);
  next.log_i = std::max(next.log_i, kFloorLog);
  return next;
}

void check_spec(const SimulationSpec& spec) {
  if (!(spec.dt > 0.0) || !std::isfinite(spec.dt)) {
    throw std::invalid_argument("simulation: dt must be positive");
  }
  if (!(spec.horizon >= spec.dt) || !std::isfinite(spec.horizon)) {
    throw std::invalid_argument("simulation: horizon must be at least dt");
  }
  if (spec.store_stride == 0) throw std::invalid_argument("simulation: store_stride must be positive");
}

void check_initial(const State& initial) {
  if (!(initial.s > 0.0) || !(initial.i > 0.0) || !std::isfinite(initial.s) || !std::isfinite(initial.i)) {
    throw std::invalid_argument("simulation: initial state must lie in the open positive quadrant");
  }
}

TrajectoryPath allocate_path(const SimulationSpec& spec, bool coupled) {
  const auto n_store = static_cast<Eigen::Index>(spec.n_steps() / spec.store_stride + 1);
  TrajectoryPath path;
  path.times.resize(n_store);
  for (Eigen::Index k = 0; k < n_store; ++k) {
    path.times[k] = static_cast<double>(static_cast<std::size_t>(k) * spec.store_stride) * spec.dt;
  }
  path.log_s.resize(n_store);
  path.log_i.resize(n_store);
  path.s.resize(n_store);
  path.i.resize(n_store);
  if (coupled) {
    path.phi.resize(n_store);
    path.log_gap.resize(n_store);
  }
  path.provenance = {spec.master_seed, spec.trajectory_index};
  path.dt = spec.dt;
  path.store_stride = spec.store_stride;
  return path;
}

template <class Source>
Eigen::VectorXd boundary_impl(const ModelParams& params, double u, const Source& src, std::size_t n_steps,
                              double dt, std::size_t stride) {
  validate_for_simulation(params);
  if (!(u >= 0.0) || !std::isfinite(u)) throw std::invalid_argument("simulate_boundary: u must be >= 0");
  if (stride == 0) throw std::invalid_argument("simulate_boundary: store_stride must be positive");
  const SimConstants k(params);
  Eigen::VectorXd phi(static_cast<Eigen::Index>(n_steps / stride + 1));
  phi[0] = u;
  if (u == 0.0 && k.a1 == 0.0) {
    phi.setZero();
    return phi;
  }

  std::uint64_t first = 0;
  double log_phi;
  if (u > 0.0) {
    log_phi = std::log(u);
  } else {
    // φ = 0 has no log; one natural-coordinate step: φ1 = (a1 − b1·0)dt + σ1·0·dB1.
    log_phi = std::log(k.a1 * dt);
    first = 1;
    if (stride == 1) phi[1] = std::exp(log_phi);
  }

  const StreamMask used{true, false, false};
  auto needs_split = [&](double h) { return k.a1 * h * std::exp(-log_phi) > 0.5; };
  std::uint64_t current = 0;
  auto advance = [&](double h, const Increments& dB, bool unresolved) {
    log_phi += recruitment(k.a1, log_phi, h, unresolved) - k.c1 * h + k.sigma1 * dB[0];
    if (!std::isfinite(log_phi)) throw_step_error("non-finite state in boundary step", current);
    log_phi = std::max(log_phi, kFloorLog);
  };
  for (std::uint64_t step = first; step < n_steps; ++step) {
    current = step;
    const Increments dB = increments_at(src, step, used);
    advance_guarded(src.bridge(), step, 1, 0, dt, dB, used, needs_split, advance);
    if ((step + 1) % stride == 0) phi[static_cast<Eigen::Index>((step + 1) / stride)] = std::exp(log_phi);
  }
  return phi;
}

template <class Source>
TrajectoryPath full_impl(const ModelParams& params, const IncidenceModel& model, const State& initial,
                         const SimulationSpec& spec, const Source& src) {
  const SimConstants k(params);
  const std::size_t n_steps = spec.n_steps();
  TrajectoryPath path = allocate_path(spec, false);
  LogState st{std::log(initial.s), std::log(initial.i)};
  auto store = [&](Eigen::Index idx) {
    path.log_s[idx] = st.log_s;
    path.log_i[idx] = st.log_i;
    path.s[idx] = std::exp(st.log_s);
    path.i[idx] = std::exp(st.log_i);
  };
  store(0);

  const StreamMask used{true, true, true};
  std::uint64_t current = 0;
  auto needs_split = [&](double h) { return k.a1 * h * std::exp(-st.log_s) > 0.5; };
  auto advance = [&](double h, const Increments& dB, bool unresolved) {
    st = full_step(st, k, model, dB, h, current, unresolved);
  };
  for (std::uint64_t step = 0; step < n_steps; ++step) {
    current = step;
    const Increments dB = increments_at(src, step, used);
    advance_guarded(src.bridge(), step, 1, 0, spec.dt, dB, used, needs_split, advance);
    if ((step + 1) % spec.store_stride == 0) store(static_cast<Eigen::Index>((step + 1) / spec.store_stride));
  }
  return path;
}

}  // namespace

std::size_t SimulationSpec::n_steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

BrownianBundle BrownianBundle::coarsened() const {
  if (n_steps % 2 != 0) throw std::invalid_argument("coarsened: n_steps must be even");
  BrownianBundle out;
  out.dt = 2.0 * dt;
  out.n_steps = n_steps / 2;
  out.provenance = provenance;
  const auto half = static_cast<Eigen::Index>(out.n_steps);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& fine = increments[k];
    out.increments[k] = fine(Eigen::seqN(0, half, 2)) + fine(Eigen::seqN(1, half, 2));
  }
  return out;
}

BrownianBundle make_bundle(std::uint64_t master_seed, std::uint32_t trajectory_index, double dt,
                           std::size_t n_steps) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("make_bundle: dt must be positive");
  if (n_steps < 1) throw std::invalid_argument("make_bundle: n_steps must be at least 1");
  BrownianBundle bundle;
  bundle.dt = dt;
  bundle.n_steps = n_steps;
  bundle.provenance = {master_seed, trajectory_index};
  const GeneratedSource src(bundle.provenance, dt);
  for (int k = 0; k < 3; ++k) {
    auto& inc = bundle.increments[static_cast<std::size_t>(k)];
    inc.resize(static_cast<Eigen::Index>(n_steps));
    for (std::size_t step = 0; step < n_steps; ++step) inc[static_cast<Eigen::Index>(step)] = src.dB(k, step);
  }
  return bundle;
}

LogState step_full(const LogState& state, const ModelParams& params, const IncidenceModel& model,
                   double dB1, double dB2, double dB3, double dt, std::uint64_t step_index) {
  return full_step(state, SimConstants(params), model, {dB1, dB2, dB3}, dt, step_index);
}

TrajectoryPath simulate_full(const ModelParams& params, const IncidenceModel& model, const State& initial,
                             const SimulationSpec& spec) {
  validate_for_simulation(params);
  check_spec(spec);
  check_initial(initial);
  const GeneratedSource src({spec.master_seed, spec.trajectory_index}, spec.dt);
  return full_impl(params, model, initial, spec, src);
}

Eigen::VectorXd simulate_boundary(const ModelParams& params, double u, const BrownianBundle& bundle,
                                  std::size_t store_stride) {
  return boundary_impl(params, u, BundleSource(bundle), bundle.n_steps, bundle.dt, store_stride);
}

Eigen::VectorXd simulate_boundary(const ModelParams& params, double u, const SimulationSpec& spec) {
  check_spec(spec);
  const GeneratedSource src({spec.master_seed, spec.trajectory_index}, spec.dt);
  return boundary_impl(params, u, src, spec.n_steps(), spec.dt, spec.store_stride);
}

TrajectoryPath simulate_coupled(const ModelParams& params, const IncidenceModel& model,
                                const State& initial, const SimulationSpec& spec) {
  validate_for_simulation(params);
  check_spec(spec);
  check_initial(initial);
  const SimConstants k(params);
  const GeneratedSource src({spec.master_seed, spec.trajectory_index}, spec.dt);
  const std::size_t n_steps = spec.n_steps();
  TrajectoryPath path = allocate_path(spec, true);

  // delta = ln S − ln φ
  double log_phi = std::log(initial.s);
  double delta = 0.0;
  double log_i = std::log(initial.i);
  auto store = [&](Eigen::Index idx) {
    const double log_s = log_phi + delta;
    path.log_s[idx] = log_s;
    path.log_i[idx] = log_i;
    path.s[idx] = std::exp(log_s);
    path.i[idx] = std::exp(log_i);
    path.phi[idx] = std::exp(log_phi);
    path.log_gap[idx] = log_phi + std::log(std::abs(std::expm1(delta)));
  };
  store(0);

  const StreamMask used{true, true, true};
  std::uint64_t current = 0;
  auto needs_split = [&](double h) {
    return k.a1 * h * std::exp(-std::min(log_phi, log_phi + delta)) > 0.5;
  };
  auto advance = [&](double h, const Increments& dB, bool unresolved) {
    const double log_s = log_phi + delta;
    const double s = std::exp(log_s);
    const double i = std::exp(log_i);
    const double f = model.f(s, i);
    const double g = model.g(s, i);
    const double ratio = std::exp(log_i - log_s);
    const double rg = ratio * g;
    const double phi_recruit = recruitment(k.a1, log_phi, h, unresolved);
    // recruitment difference between S and φ; (a1/φ)·expm1(−delta)·h in the Euler case
    const double gap_recruit = unresolved ? recruitment(k.a1, log_s, h, true) - phi_recruit
                                          : phi_recruit * std::expm1(-delta);
    const double next_delta = delta + gap_recruit + (-ratio * f - 0.5 * rg * rg) * h - rg * dB[2];
    const double next_log_phi = log_phi + phi_recruit - k.c1 * h + k.sigma1 * dB[0];
    const double next_log_i = log_i + (-k.c2 + f - 0.5 * g * g) * h + k.sigma2 * dB[1] + g * dB[2];
    if (!std::isfinite(next_delta) || !std::isfinite(next_log_phi) || !std::isfinite(next_log_i)) {
      throw_step_error("non-finite state in coupled step", current);
    }
    log_phi = std::max(next_log_phi, kFloorLog);
    delta = std::max(next_delta, kFloorLog - log_phi);
    log_i = std::max(next_log_i, kFloorLog);
  };
  for (std::uint64_t step = 0; step < n_steps; ++step) {
    current = step;
    const Increments dB = increments_at(src, step, used);
    advance_guarded(src.bridge(), step, 1, 0, spec.dt, dB, used, needs_split, advance);
    if ((step + 1) % spec.store_stride == 0) store(static_cast<Eigen::Index>((step + 1) / spec.store_stride));
  }
  return path;
}

std::vector<TrajectoryPath> simulate_ensemble(const ModelParams& params, const IncidenceModel& model,
                                              const State& initial, const SimulationSpec& spec,
                                              std::size_t n_paths, SimulationKind kind,
                                              std::uint32_t first_index, unsigned threads) {
  std::vector<TrajectoryPath> paths(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t j) {
    SimulationSpec one = spec;
    one.trajectory_index = first_index + static_cast<std::uint32_t>(j);
    paths[j] = kind == SimulationKind::coupled ? simulate_coupled(params, model, initial, one)
                                               : simulate_full(params, model, initial, one);
  });
  return paths;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryPath& path) {
  os << "# seed=" << path.provenance.master_seed << '\n'
     << "# trajectory=" << path.provenance.trajectory_index << '\n'
     << "# dt=" << format_double(path.dt) << '\n'
     << "# store_stride=" << path.store_stride << '\n';
  const bool phi = path.has_phi();
  os << (phi ? "t,S,I,phi,lnS,lnI\n" : "t,S,I,lnS,lnI\n");
  for (Eigen::Index k = 0; k < path.size(); ++k) {
    os << format_double(path.times[k]) << ',' << format_double(path.s[k]) << ',' << format_double(path.i[k]);
    if (phi) os << ',' << format_double(path.phi[k]);
    os << ',' << format_double(path.log_s[k]) << ',' << format_double(path.log_i[k]) << '\n';
  }
}

}  // namespace ssir
