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

#include "uqdp/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

namespace uqdp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinStepsPerPeriod = 40.0;

double spectral_radius(const ComplexMatrix& h) {
  const EigenSystem eig = eigendecompose_hermitian(h);
  return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

/// Noise values of one channel at t0 + j*dt/2, j in [0, 2n].
///
/// Over a short window the trajectory is evaluated from its Taylor series at
/// the window centre, truncated where the remainder drops below 1e-17 of the
/// amplitude sum; otherwise each point is summed directly.
std::vector<double> half_step_values(const NoiseTrajectory& traj, double t0, double dt, std::size_t n) {
  const std::size_t points = 2 * n + 1;
  const auto omega = traj.omega();
  if (omega.empty()) return std::vector<double>(points, 0.0);
  const double w_max = *std::max_element(omega.begin(), omega.end());
  const double half_span = 0.5 * dt * static_cast<double>(n);
  const double x = w_max * half_span;
  if (x < 0.5) {
    std::size_t order = 1;
    double term = x;
    while (term > 1e-17 && order < 24) {
      ++order;
      term *= x / static_cast<double>(order);
    }
    const double tc = t0 + half_span;
    const auto coeff = traj.coefficient();
    const auto phase = traj.phase();
    std::vector<double> deriv(order + 1, 0.0);
    for (std::size_t k = 0; k < omega.size(); ++k) {
      const double arg = omega[k] * tc + phase[k];
      const double c = std::cos(arg), s = std::sin(arg);
      double wp = coeff[k];
      for (std::size_t p = 0; p <= order; ++p) {
        // d^p/dt^p cos(arg) cycles through cos, -sin, -cos, sin.
        const double f = (p % 4 == 0) ? c : (p % 4 == 1) ? -s : (p % 4 == 2) ? -c : s;
        deriv[p] += wp * f;
        wp *= omega[k];
      }
    }
    std::vector<double> out(points);
    for (std::size_t j = 0; j < points; ++j) {
      const double tau = t0 + 0.5 * dt * static_cast<double>(j) - tc;
      double v = 0.0;
      for (std::size_t p = order + 1; p-- > 0;) v = v * tau / static_cast<double>(p + 1) + deriv[p];
      out[j] = v;
    }
    return out;
  }
  return traj.sample_uniform(t0, 0.5 * dt, points);
}

/// out = -i h psi, skipping structural zeros of h.
void apply_generator(const ComplexMatrix& h, const ComplexMatrix& psi, ComplexMatrix& out) {
  const std::size_t n = h.rows(), m = psi.cols();
  auto o = out.data();
  std::fill(o.begin(), o.end(), cplx{});
  const auto p = psi.data();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      const cplx hrk = h(r, k);
      if (hrk == cplx{}) continue;
      const cplx g{hrk.imag(), -hrk.real()};  // -i * hrk
      for (std::size_t c = 0; c < m; ++c) o[r * m + c] += g * p[k * m + c];
    }
  }
}

double column_norm_drift(const ComplexMatrix& psi, const std::vector<double>& ref) {
  double drift = 0.0;
  for (std::size_t c = 0; c < psi.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < psi.rows(); ++r) s += std::norm(psi(r, c));
    drift = std::max(drift, std::abs(std::sqrt(s) - ref[c]));
  }
  return drift;
}

struct RotatingFrame {
  EigenSystem eig;
  ComplexMatrix w_adj;

  explicit RotatingFrame(const ComplexMatrix& h0) : eig(eigendecompose_hermitian(h0)), w_adj(eig.vectors.adjoint()) {}

  /// Generator in the H0 eigenbasis: D(t) W^dag (H - H0) W D(t)^dag.
  ComplexMatrix transform(const ComplexMatrix& v, double t) const {
    ComplexMatrix out = w_adj * v * eig.vectors;
    for (std::size_t i = 0; i < out.rows(); ++i) {
      for (std::size_t j = 0; j < out.cols(); ++j) {
        out(i, j) *= std::polar(1.0, (eig.values[i] - eig.values[j]) * t);
      }
    }
    return out;
  }
};

}  // namespace

double Schedule::duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

void Schedule::append(double duration, std::vector<DriveTerm> drives) {
  const double start = this->duration();
  for (auto& d : drives) d = d.windowed(start, start + duration);
  segments.push_back(ScheduleSegment{duration, std::move(drives)});
}

double max_energy_scale(const ComplexMatrix& h_static, const Schedule& schedule, double noise_bound) {
  double drive_bound = 0.0;
  double omega_max = 0.0;
  for (const auto& seg : schedule.segments) {
    double seg_bound = 0.0;
    for (const auto& d : seg.drives) {
      seg_bound += 2.0 * std::abs(d.amplitude) * d.op.norm_frobenius() / std::sqrt(static_cast<double>(d.op.rows()));
      omega_max = std::max(omega_max, std::abs(d.omega));
    }
    drive_bound = std::max(drive_bound, seg_bound);
  }
  return std::max(spectral_radius(h_static) + drive_bound + noise_bound, omega_max);
}

double auto_time_step(const ComplexMatrix& h_static, const Schedule& schedule, double steps_per_period) {
  return kTwoPi / (steps_per_period * max_energy_scale(h_static, schedule));
}

PropagationResult propagate(const ComplexMatrix& h_static, const Schedule& schedule, const NoiseCoupling* noise,
                            const ComplexMatrix& initial, const PropagateOptions& options) {
  const std::size_t dim = h_static.rows();
  if (!h_static.is_square() || initial.rows() != dim) throw std::invalid_argument("propagate: dimension mismatch");
  if (noise != nullptr && noise->size() > 0 && (std::size_t{1} << noise->n_qubits()) != dim) {
    throw std::invalid_argument("propagate: noise coupling acts on a different Hilbert space");
  }

  PropagationResult result;
  result.final = initial;
  if (schedule.duration() == 0.0) return result;

  const double dt_limit = kTwoPi / (kMinStepsPerPeriod * max_energy_scale(h_static, schedule));
  const double dt = schedule.dt > 0.0 ? schedule.dt : auto_time_step(h_static, schedule);
  if (!options.allow_coarse_step && dt > dt_limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "propagate: dt = " << dt << " s exceeds 1/40 of the fastest period (" << dt_limit << " s)";
    throw std::invalid_argument(msg.str());
  }

  std::optional<RotatingFrame> frame;
  if (schedule.frame == FrameKind::Rotating) frame.emplace(h_static);

  std::vector<double> ref_norm(initial.cols());
  for (std::size_t c = 0; c < initial.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < dim; ++r) s += std::norm(initial(r, c));
    ref_norm[c] = std::sqrt(s);
  }

  ComplexMatrix psi = frame ? frame->w_adj * initial : initial;
  ComplexMatrix k1(dim, psi.cols()), k2 = k1, k3 = k1, k4 = k1, tmp = k1;
  ComplexMatrix h_now(dim, dim), h_mid(dim, dim), h_end(dim, dim);
  const std::size_t n_noise = noise != nullptr ? noise->size() : 0;
  std::vector<double> noise_now(n_noise);

  double t_seg = 0.0;
  std::size_t step = 0;
  for (const auto& seg : schedule.segments) {
    if (seg.duration <= 0.0) continue;
    const auto n = static_cast<std::size_t>(std::ceil(seg.duration / dt - 1e-9));
    const double h = seg.duration / static_cast<double>(n);
    std::vector<std::vector<double>> nv(n_noise);
    for (std::size_t c = 0; c < n_noise; ++c) nv[c] = half_step_values(noise->trajectories()[c], t_seg, h, n);

    // Generator at half-step index j (time t_seg + j h/2).
    auto assemble = [&](std::size_t j, ComplexMatrix& out) {
      const double t = t_seg + 0.5 * h * static_cast<double>(j);
      ComplexMatrix hh = frame ? ComplexMatrix(dim, dim) : h_static;
      for (const auto& d : seg.drives) {
        const double c = d.coefficient(t);
        if (c != 0.0) hh.add_scaled(d.op, c);
      }
      for (std::size_t c = 0; c < n_noise; ++c) noise_now[c] = nv[c][j];
      if (n_noise > 0) noise->accumulate(hh, noise_now);
      out = frame ? frame->transform(hh, t) : std::move(hh);
    };

    assemble(0, h_now);
    for (std::size_t i = 0; i < n; ++i) {
      assemble(2 * i + 1, h_mid);
      assemble(2 * i + 2, h_end);

      apply_generator(h_now, psi, k1);
      tmp = psi;
      tmp.add_scaled(k1, 0.5 * h);
      apply_generator(h_mid, tmp, k2);
      tmp = psi;
      tmp.add_scaled(k2, 0.5 * h);
      apply_generator(h_mid, tmp, k3);
      tmp = psi;
      tmp.add_scaled(k3, h);
      apply_generator(h_end, tmp, k4);

      psi.add_scaled(k1, h / 6.0);
      psi.add_scaled(k2, h / 3.0);
      psi.add_scaled(k3, h / 3.0);
      psi.add_scaled(k4, h / 6.0);
      std::swap(h_now, h_end);
      ++step;

      const double t = t_seg + h * static_cast<double>(i + 1);
      result.norm_drift = std::max(result.norm_drift, column_norm_drift(psi, ref_norm));
      if (result.norm_drift > options.max_norm_drift) {
        std::ostringstream msg;
        msg << "norm drift " << result.norm_drift << " at t = " << t << " s exceeds " << options.max_norm_drift
            << "; reduce the time step";
        throw NumericalError(msg.str());
      }
      if (options.observer || (options.sample_every > 0 && step % options.sample_every == 0)) {
        const ComplexMatrix current = frame ? frame->eig.vectors * psi : psi;
        if (options.observer) options.observer(t, current);
        if (options.sample_every > 0 && step % options.sample_every == 0) {
          result.sample_times.push_back(t);
          result.samples.push_back(current);
        }
      }
    }
    t_seg += seg.duration;
  }
  result.final = frame ? frame->eig.vectors * psi : psi;
  result.steps = step;
  result.flagged = result.norm_drift > 1e-8;
  return result;
}

PropagationResult propagate(const ComplexMatrix& h_static, const Schedule& schedule, const NoiseCoupling* noise,
                            const StateVector& initial, const PropagateOptions& options) {
  const std::array<StateVector, 1> cols{initial};
  return propagate(h_static, schedule, noise, from_columns(cols), options);
}

std::vector<StateVector> propagate_piecewise_exact(const ComplexMatrix& h_static, const NoiseCoupling& noise,
                                                   const StateVector& initial, double step,
                                                   std::span<const std::size_t> record_steps) {
  if (!(step > 0.0)) throw std::invalid_argument("propagate_piecewise_exact: step must be positive");
  if (!std::is_sorted(record_steps.begin(), record_steps.end())) {
    throw std::invalid_argument("propagate_piecewise_exact: record steps must be ascending");
  }
  std::vector<StateVector> out;
  if (record_steps.empty()) return out;
  const std::size_t n = record_steps.back();
  std::vector<std::vector<double>> mid(noise.size());
  for (std::size_t c = 0; c < noise.size(); ++c) mid[c] = noise.trajectories()[c].sample_uniform(0.5 * step, step, n);

  StateVector psi = initial;
  std::vector<double> values(noise.size());
  std::size_t next = 0;
  for (std::size_t j = 0; j <= n; ++j) {
    while (next < record_steps.size() && record_steps[next] == j) {
      out.push_back(psi);
      ++next;
    }
    if (j == n) break;
    ComplexMatrix h = h_static;
    for (std::size_t c = 0; c < noise.size(); ++c) values[c] = mid[c][j];
    noise.accumulate(h, values);
    psi = expm_hermitian(h, step) * psi;
  }
  return out;
}

ComplexMatrix to_rotating_frame(const ComplexMatrix& h_static, double duration, const ComplexMatrix& propagator) {
  return expm_hermitian(h_static, -duration) * propagator;
}

ComplexMatrix projected_gate(const ComplexMatrix& propagator, std::span<const StateVector> basis) {
  return project(propagator, basis);
}

double process_overlap(const ComplexMatrix& target, const ComplexMatrix& projected) {
  return std::abs((target.adjoint() * projected).trace()) / static_cast<double>(target.rows());
}

double average_gate_fidelity(const ComplexMatrix& target, const ComplexMatrix& projected) {
  const double d = static_cast<double>(target.rows());
  const double tr = std::norm((target.adjoint() * projected).trace());
  const double purity = (projected.adjoint() * projected).trace().real();
  return (purity + tr) / (d * (d + 1.0));
}

double leakage(const ComplexMatrix& propagator, std::span<const StateVector> basis) {
  // A square propagator acts on the basis; a D x k matrix already holds the
  // propagated basis states as columns.
  const bool columns = !propagator.is_square() || (basis.size() > 0 && propagator.cols() == basis.size() &&
                                                   basis[0].dim() != propagator.cols());
  double worst = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const StateVector out = columns ? column(propagator, i) : propagator * basis[i];
    double kept = 0.0;
    for (const auto& c : basis) kept += std::norm(inner(c, out));
    worst = std::max(worst, 1.0 - kept);
  }
  return worst;
}

ComplexMatrix rotation(const ComplexMatrix& pauli, double theta) {
  ComplexMatrix out = std::cos(0.5 * theta) * ComplexMatrix::identity(pauli.rows());
  out.add_scaled(pauli, cplx{0.0, std::sin(0.5 * theta)});
  return out;
}

Schedule gate_UX(const UqdpPairSpec& spec, double theta, double lambda, SubspacePolicy policy) {
  if (!(lambda > 0.0)) throw std::invalid_argument("gate_UX: drive amplitude must be positive");
  const EncodedSubspace enc = encoded_subspace(spec, policy);
  Schedule s;
  s.frame = FrameKind::Rotating;
  if (theta == 0.0) return s;
  const double half_splitting = 0.5 * std::abs(enc.splitting);
  if (lambda > 0.3 * half_splitting) {
    std::ostringstream msg;
    msg << "RWA: lambda/E_m = " << lambda / half_splitting << " exceeds 0.3";
    s.warnings.push_back(msg.str());
  }
  const DriveTerm drive{.op = pauli_operator({PauliAxis::Z, 0}, 2),
                        .amplitude = lambda,
                        .omega = enc.splitting,
                        .phase = theta < 0.0 ? std::numbers::pi : 0.0};
  s.append(std::abs(theta) / (2.0 * lambda), {drive});
  s.dt = auto_time_step(build_pair_hamiltonian(spec), s);
  return s;
}

Schedule gate_UZ(const UqdpPairSpec& spec, double theta, double delta_E_m) {
  if (delta_E_m == 0.0) throw std::invalid_argument("gate_UZ: coupling increment must be nonzero");
  Schedule s;
  s.frame = FrameKind::Rotating;
  if (theta == 0.0) return s;
  const double duration = theta / (2.0 * delta_E_m);
  const double value = duration < 0.0 ? -delta_E_m : delta_E_m;
  const ComplexMatrix xx = pauli_operator({PauliAxis::X, 0}, 2) * pauli_operator({PauliAxis::X, 1}, 2);
  s.append(std::abs(duration), {DriveTerm::constant(xx, value)});
  s.dt = auto_time_step(build_pair_hamiltonian(spec), s);
  return s;
}

Schedule gate_UC(const TwoEncodedQubitSystem& system, double duration_factor) {
  Schedule s;
  s.frame = FrameKind::Rotating;
  if (system.lambda_c == 0.0 || duration_factor == 0.0) return s;
  const double nominal = std::numbers::pi / (4.0 * std::abs(system.lambda_c));
  s.append(duration_factor * nominal, system.coupling);
  s.dt = auto_time_step(system.h_static, s);
  return s;
}

ComplexMatrix uc_target() {
  const ComplexMatrix x = pauli_matrix(PauliAxis::X);
  const ComplexMatrix y = pauli_matrix(PauliAxis::Y);
  const ComplexMatrix gen = kron(x, x) + kron(y, y);
  return expm_hermitian(gen, -std::numbers::pi / 4.0);
}

UcCalibration calibrate_UC(const TwoEncodedQubitSystem& system) {
  if (system.lambda_c == 0.0) throw std::invalid_argument("calibrate_UC: coupling is zero");
  const double nominal = std::numbers::pi / (4.0 * std::abs(system.lambda_c));
  Schedule scan = gate_UC(system, 4.0);
  scan.frame = FrameKind::Lab;
  const auto basis = system.encoded_basis();
  std::array<double, 4> energy{};
  for (std::size_t i = 0; i < 4; ++i) energy[i] = inner(basis[i], system.h_static * basis[i]).real();
  const ComplexMatrix target = uc_target();

  UcCalibration best;
  best.fidelity = -1.0;
  PropagateOptions opts;
  opts.observer = [&](double t, const ComplexMatrix& u) {
    if (t < 0.5 * nominal) return;
    ComplexMatrix m = project(u, basis);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) m(i, j) *= std::polar(1.0, energy[i] * t);
    }
    const double f = average_gate_fidelity(target, m);
    if (f > best.fidelity) {
      best.fidelity = f;
      best.duration = t;
      best.leakage = 1.0 - (m.adjoint() * m).trace().real() / 4.0;
    }
  };
  propagate(system.h_static, scan, nullptr, ComplexMatrix::identity(system.h_static.rows()), opts);
  best.duration_factor = best.duration / nominal;
  best.schedule = gate_UC(system, best.duration_factor);
  return best;
}

Schedule prepare_encoded_state(const UqdpPairSpec& spec, double lambda_p) {
  if (!(lambda_p > 0.0)) throw std::invalid_argument("prepare_encoded_state: drive amplitude must be positive");
  const PairEigenbasis eb = pair_eigenbasis(spec);
  const ComplexMatrix x1 = pauli_operator({PauliAxis::X, 0}, 2);
  const double element = std::abs(inner(eb.states[2], x1 * eb.states[0]));
  Schedule s;
  s.frame = FrameKind::Lab;
  const DriveTerm drive{.op = x1, .amplitude = lambda_p, .omega = eb.energies[2] - eb.energies[0]};
  s.append(std::numbers::pi / (2.0 * lambda_p * element), {drive});
  s.dt = auto_time_step(build_pair_hamiltonian(spec), s);
  return s;
}

ReadoutPlan readout_rotation(const UqdpPairSpec& spec, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("readout_rotation: drive amplitude must be positive");
  const EncodedSubspace enc = encoded_subspace(spec);
  const double duration = std::numbers::pi / (4.0 * lambda);
  ReadoutPlan plan;
  plan.schedule.frame = FrameKind::Lab;
  const double phase = std::remainder(-0.5 * std::numbers::pi - enc.splitting * duration, 2.0 * std::numbers::pi);
  const DriveTerm drive{.op = pauli_operator({PauliAxis::Z, 0}, 2),
                        .amplitude = lambda,
                        .omega = enc.splitting,
                        .phase = phase};
  plan.schedule.append(duration, {drive});
  plan.schedule.dt = auto_time_step(build_pair_hamiltonian(spec), plan.schedule);
  return plan;
}

}  // namespace uqdp
