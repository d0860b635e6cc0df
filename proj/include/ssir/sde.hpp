#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "ssir/model.hpp"

namespace ssir {

/// ln-coordinates are clamped below at this value (≈ 1e-300).
inline constexpr double kFloorLog = -690.0;

/// The clamp reflects, so a decayed ln I hovers just above the floor rather
/// than on it; anything below this counts as numerically extinct.
inline constexpr double kExtinctLog = kFloorLog + 50.0;

/// Maximum dyadic refinement depth of the stiffness guard (2^6 substeps).
inline constexpr int kMaxRefinement = 6;

/// Thrown when a step produces a non-finite state.
class StepError : public std::runtime_error {
 public:
  StepError(const std::string& what, std::uint64_t step) : std::runtime_error(what), step_(step) {}
  std::uint64_t step() const { return step_; }

 private:
  std::uint64_t step_;
};

struct Provenance {
  std::uint64_t master_seed = 0;
  std::uint32_t trajectory_index = 0;
};

/// Increments of B1, B2, B3 on a uniform grid. Stream k of trajectory j is
/// the counter domain (j, k, step) of the master seed, so regenerating with
/// the same arguments is bit-identical.
struct BrownianBundle {
  double dt = 0.0;
  std::size_t n_steps = 0;
  std::array<Eigen::VectorXd, 3> increments;
  Provenance provenance;

  /// dB_k, k ∈ {1, 2, 3}.
  const Eigen::VectorXd& dB(int k) const { return increments.at(static_cast<std::size_t>(k - 1)); }

  /// Same path on the grid of spacing 2·dt (pairwise sums); n_steps must be even.
  BrownianBundle coarsened() const;
};

BrownianBundle make_bundle(std::uint64_t master_seed, std::uint32_t trajectory_index, double dt,
                           std::size_t n_steps);

/// One explicit Euler–Maruyama step of the Itô log-dynamics
///
///   d ln S = [a1/S − c1 − I f/S − ½ (I g/S)²] dt + σ1 dB1 − (I g/S) dB3
///   d ln I = [−c2 + f − ½ g²] dt + σ2 dB2 + g dB3
///
/// with f, g evaluated at (S, I). Both outputs are clamped below at
/// kFloorLog. Throws StepError (carrying step_index) on a non-finite result.
struct LogState {
  double log_s = 0.0;
  double log_i = 0.0;
};

LogState step_full(const LogState& state, const ModelParams& params, const IncidenceModel& model,
                   double dB1, double dB2, double dB3, double dt, std::uint64_t step_index = 0);

struct SimulationSpec {
  double horizon = 200.0;
  double dt = 1e-3;
  std::uint64_t master_seed = 0;
  std::uint32_t trajectory_index = 0;
  std::size_t store_stride = 1;

  std::size_t n_steps() const;
};

/// Stored samples of one trajectory. Index k corresponds to time
/// k · store_stride · dt.
struct TrajectoryPath {
  Eigen::VectorXd times;
  Eigen::VectorXd log_s;
  Eigen::VectorXd log_i;
  Eigen::VectorXd s;
  Eigen::VectorXd i;
  /// Boundary solution driven by the same B1 (coupled runs only, else empty).
  Eigen::VectorXd phi;
  /// ln|S − φ| from the tracked log-ratio ln S − ln φ; −∞ where S = φ
  /// (coupled runs only).
  Eigen::VectorXd log_gap;
  Provenance provenance;
  double dt = 0.0;
  std::size_t store_stride = 1;

  Eigen::Index size() const { return times.size(); }
  bool has_phi() const { return phi.size() > 0; }
  /// Whether I is numerically extinct (ln I within the floor band) at stored index k.
  bool floored(Eigen::Index k) const { return log_i[k] < kExtinctLog; }
};

/// Full system from `initial` (both components > 0). The increments are
/// generated on the fly and equal those of make_bundle for the same
/// (seed, index, dt, n_steps).
TrajectoryPath simulate_full(const ModelParams& params, const IncidenceModel& model, const State& initial,
                             const SimulationSpec& spec);

/// Boundary equation dφ = (a1 − b1 φ) dt + σ1 φ dB1 driven by bundle.dB(1),
/// stepped as d ln φ = (a1/φ − c1) dt + σ1 dB1. u = 0 takes one explicit
/// natural-coordinate step first. Returns φ at every store_stride-th step.
Eigen::VectorXd simulate_boundary(const ModelParams& params, double u, const BrownianBundle& bundle,
                                  std::size_t store_stride = 1);

/// As above with the B1 increments generated on the fly.
Eigen::VectorXd simulate_boundary(const ModelParams& params, double u, const SimulationSpec& spec);

/// Full system and boundary equation on one shared path, φ(0) = initial.s.
/// The integrator carries (ln φ, ln S − ln φ, ln I); the middle component is
/// the exact difference of the two log-EM recursions, so |S − φ| keeps full
/// relative precision after it drops below the rounding level of S.
TrajectoryPath simulate_coupled(const ModelParams& params, const IncidenceModel& model,
                                const State& initial, const SimulationSpec& spec);

enum class SimulationKind { full, coupled };

/// Trajectories first_index, first_index + 1, ... in parallel; output is
/// ordered by trajectory index and independent of the thread count.
std::vector<TrajectoryPath> simulate_ensemble(const ModelParams& params, const IncidenceModel& model,
                                              const State& initial, const SimulationSpec& spec,
                                              std::size_t n_paths, SimulationKind kind,
                                              std::uint32_t first_index = 0, unsigned threads = 0);

/// CSV with "# key=value" provenance lines, then t,S,I[,phi],lnS,lnI.
void write_trajectory_csv(std::ostream& os, const TrajectoryPath& path);

}  // namespace ssir
