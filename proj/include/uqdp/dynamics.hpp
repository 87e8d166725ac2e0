// Copyright 2026 The uqdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uqdp/linalg.hpp"
#include "uqdp/model.hpp"

namespace uqdp {

/// Raised when a propagation loses norm beyond the accepted bound.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FrameKind {
  Lab,
  Rotating,  // interaction picture with respect to the static Hamiltonian
};

struct ScheduleSegment {
  double duration = 0.0;
  std::vector<DriveTerm> drives;  // times are absolute, windows set to the segment
};

struct Schedule {
  std::vector<ScheduleSegment> segments;
  double dt = 0.0;
  FrameKind frame = FrameKind::Lab;
  std::vector<std::string> warnings;

  double duration() const;
  bool empty() const { return duration() == 0.0; }
  /// Appends a segment starting where the schedule currently ends.
  void append(double duration, std::vector<DriveTerm> drives);
};

/// Fastest angular frequency present: spectral radius of the static part plus
/// drive and noise bounds plus the largest drive frequency.
double max_energy_scale(const ComplexMatrix& h_static, const Schedule& schedule, double noise_bound = 0.0);

/// Step count per period of the fastest scale used when a schedule asks for
/// an automatic step. Must stay >= 40.
inline constexpr double kDefaultStepsPerPeriod = 640.0;

/// dt = 2 pi / (steps_per_period * max_energy_scale).
double auto_time_step(const ComplexMatrix& h_static, const Schedule& schedule,
                      double steps_per_period = kDefaultStepsPerPeriod);

struct PropagationResult {
  ComplexMatrix final;  // columns are the propagated initial columns
  double norm_drift = 0.0;
  bool flagged = false;  // norm_drift above 1e-8
  std::size_t steps = 0;
  std::vector<double> sample_times;
  std::vector<ComplexMatrix> samples;
};

struct PropagateOptions {
  /// Record the state every n steps (0 disables).
  std::size_t sample_every = 0;
  /// Called after every step with (time, current columns).
  std::function<void(double, const ComplexMatrix&)> observer;
  double max_norm_drift = 1e-6;
  /// Skip the dt <= period/40 check (convergence studies).
  bool allow_coarse_step = false;
};

/// Classical RK4 for i d|psi>/dt = H(t)|psi> with H = h_static + drives + V_n(t).
/// `initial` holds one state per column; pass the identity for the full
/// propagator. `noise` may be null. In the rotating frame the integrated
/// generator is e^{i H0 t}(H(t) - H0)e^{-i H0 t}.
PropagationResult propagate(const ComplexMatrix& h_static, const Schedule& schedule, const NoiseCoupling* noise,
                            const ComplexMatrix& initial, const PropagateOptions& options = {});

PropagationResult propagate(const ComplexMatrix& h_static, const Schedule& schedule, const NoiseCoupling* noise,
                            const StateVector& initial, const PropagateOptions& options = {});

/// Exponential-midpoint propagation with noise frozen over each step of size
/// `step`; used for long free-evolution runs. Returns states at the requested
/// step indices (ascending).
std::vector<StateVector> propagate_piecewise_exact(const ComplexMatrix& h_static, const NoiseCoupling& noise,
                                                   const StateVector& initial, double step,
                                                   std::span<const std::size_t> record_steps);

/// e^{i H0 T} U: lab-frame propagator mapped into the rotating frame.
ComplexMatrix to_rotating_frame(const ComplexMatrix& h_static, double duration, const ComplexMatrix& propagator);

/// <b_i| U |b_j>
ComplexMatrix projected_gate(const ComplexMatrix& propagator, std::span<const StateVector> basis);

/// |Tr(T^dag M)| / d
double process_overlap(const ComplexMatrix& target, const ComplexMatrix& projected);
/// (Tr(M^dag M) + |Tr(T^dag M)|^2) / (d (d + 1)); equals the average gate
/// fidelity of the projected map, phase invariant.
double average_gate_fidelity(const ComplexMatrix& target, const ComplexMatrix& projected);
/// Largest population lost from the subspace over the basis inputs. Accepts
/// the full propagator or the D x k matrix of propagated basis states.
double leakage(const ComplexMatrix& propagator, std::span<const StateVector> basis);

/// exp(i theta/2 * P) for a Hermitian involution P.
ComplexMatrix rotation(const ComplexMatrix& pauli, double theta);

/// 2 lambda cos(splitting t) sigma_z1 for theta/(2 lambda); target exp(i theta X/2).
Schedule gate_UX(const UqdpPairSpec& spec, double theta, double lambda,
                 SubspacePolicy policy = SubspacePolicy::RequireProtection);
/// Static delta_E_m sigma_x1 sigma_x2 for theta/(2 delta_E_m); target exp(i theta Z/2).
Schedule gate_UZ(const UqdpPairSpec& spec, double theta, double delta_E_m);
/// Modulated coupling for duration_factor * pi/(4 lambda_c); target
/// exp[i pi (X1X2 + Y1Y2)/4].
Schedule gate_UC(const TwoEncodedQubitSystem& system, double duration_factor = 1.0);

ComplexMatrix uc_target();

struct UcCalibration {
  double duration = 0.0;
  double duration_factor = 0.0;  // duration / (pi/(4 lambda_c))
  double fidelity = 0.0;
  double leakage = 0.0;
  Schedule schedule;
};

/// Scans durations in [0.5, 4] x nominal with one noiseless propagation and
/// keeps the one with the highest average gate fidelity to U_C.
UcCalibration calibrate_UC(const TwoEncodedQubitSystem& system);

/// 2 lambda_p cos((E3 - E1) t) sigma_x1 for pi/(2 lambda_p |<3|sigma_x1|1>|).
Schedule prepare_encoded_state(const UqdpPairSpec& spec, double lambda_p);

struct ReadoutPlan {
  Schedule schedule;
  std::size_t product_index_for_3 = 1;  // |up down>
  std::size_t product_index_for_4 = 2;  // |down up>
};

/// Quarter rotation whose drive phase is chosen so that, in the lab frame at
/// the end of the pulse, |3> lands on |up down> and |4> on |down up>.
ReadoutPlan readout_rotation(const UqdpPairSpec& spec, double lambda);

}  // namespace uqdp
