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

#include "uqdp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "uqdp/parallel.hpp"

namespace uqdp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kTrajectoryStream = 0x7472616a;  // "traj"
constexpr std::uint64_t kPointStream = 0x706f696e;       // "poin"
constexpr std::size_t kBlock = 32;

struct MeanAndError {
  double mean = 0.0;
  double standard_error = 0.0;
};

MeanAndError mean_and_error(const std::vector<double>& x) {
  MeanAndError r;
  if (x.empty()) return r;
  const double n = static_cast<double>(x.size());
  r.mean = pairwise_sum(x) / n;
  if (x.size() < 2) return r;
  std::vector<double> dev(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) dev[i] = (x[i] - r.mean) * (x[i] - r.mean);
  r.standard_error = std::sqrt(pairwise_sum(dev) / (n - 1.0) / n);
  return r;
}

std::vector<NoiseChannel> active_channels(const EnsembleConfig& ensemble, std::size_t n_qubits) {
  return ensemble.channels.empty() ? default_channels(n_qubits) : ensemble.channels;
}

double interpolate(const std::vector<double>& y, double h, double t) {
  const double x = t / h;
  const auto j = static_cast<std::size_t>(std::floor(x));
  if (j + 1 >= y.size()) return y.back();
  const double f = x - static_cast<double>(j);
  return y[j] + f * (y[j + 1] - y[j]);
}

/// Ensemble-summed coherence on the fine grid t_j = j h, j in [0, n].
struct CoherenceRun {
  std::vector<double> magnitude;
  std::vector<double> standard_error;
};

CoherenceRun coherence_run(const DephasingTarget& target, const EnsembleConfig& ensemble, DephasingMethod method,
                           double h, std::size_t n_steps) {
  using Kind = DephasingTarget::Kind;
  const std::size_t n_qubits = target.kind == Kind::Bare ? 1 : 2;
  const FrequencyGrid grid = make_frequency_grid(ensemble.spectrum);
  const std::size_t points = n_steps + 1;
  const std::vector<NoiseChannel> channels = ensemble.channels.empty() ? target_channels(target) : ensemble.channels;

  // Static pieces of the full method (and of the doublet's effective method).
  ComplexMatrix h_static;
  StateVector state_a, state_b;
  double gap = 0.0;
  std::vector<ComplexMatrix> doublet_ops;
  if (target.kind == Kind::Doublet) {
    const JaynesCummingsSystem jc = jaynes_cummings_system(target.jc);
    for (const auto& ch : channels) doublet_ops.push_back(jc_noise_operator(jc, ch));
    h_static = jc.hamiltonian;
    state_a = jc.doublet(target.doublet, 0);
    state_b = jc.doublet(target.doublet, 1);
    const auto& e = jc.doublet_energies.at(target.doublet - 1);
    gap = e[0] - e[1];
  } else if (method == DephasingMethod::Full) {
    if (target.kind == Kind::Bare) {
      h_static = target.E_z * pauli_matrix(PauliAxis::Z);
      state_a = StateVector::basis(2, 0);
      state_b = StateVector::basis(2, 1);
      gap = 2.0 * target.E_z;
    } else {
      h_static = build_pair_hamiltonian(target.pair);
      const EncodedSubspace enc = encoded_subspace(target.pair);
      state_a = enc.state3;
      state_b = enc.state4;
      gap = enc.energy3 - enc.energy4;
    }
  }
  std::optional<SplittingShift> shift;
  if (target.kind == Kind::Doublet && method == DephasingMethod::Effective) {
    shift = splitting_shift(h_static, doublet_ops, state_a, state_b);
  }
  std::vector<std::size_t> record(points);
  for (std::size_t j = 0; j < points; ++j) record[j] = j;

  auto member = [&](std::size_t k) {
    const std::uint64_t seed = trajectory_seed(ensemble.base_seed, k);
    std::vector<NoiseTrajectory> trajs;
    for (const auto& ch : channels) trajs.push_back(sample_trajectory(ensemble.spectrum, grid, ch, seed));
    if (target.kind == Kind::Doublet) return NoiseCoupling(std::move(trajs), doublet_ops);
    return NoiseCoupling(n_qubits, std::move(trajs));
  };

  auto run_one = [&](std::size_t k, std::vector<cplx>& out) {
    const NoiseCoupling noise = member(k);
    if (method == DephasingMethod::Full) {
      const StateVector psi0 = std::sqrt(0.5) * (state_a + state_b);
      const auto states = propagate_piecewise_exact(h_static, noise, psi0, h, record);
      for (std::size_t j = 0; j < points; ++j) {
        const double t = h * static_cast<double>(j);
        out[j] = 2.0 * inner(state_a, states[j]) * std::conj(inner(state_b, states[j])) * std::polar(1.0, gap * t);
      }
      return;
    }
    // Effective method: splitting deviation on the grid, then trapezoidal phase.
    std::vector<double> delta(points);
    if (shift) {
      std::vector<std::vector<double>> v;
      for (const auto& traj : noise.trajectories()) v.push_back(traj.sample_uniform(0.0, h, points));
      std::vector<double> values(v.size());
      for (std::size_t j = 0; j < points; ++j) {
        for (std::size_t c = 0; c < v.size(); ++c) values[c] = v[c][j];
        delta[j] = (*shift)(values);
      }
    }
    std::vector<double> x[2], z[2];
    for (std::size_t q = 0; q < n_qubits; ++q) {
      x[q].assign(points, 0.0);
      z[q].assign(points, 0.0);
    }
    for (const auto& traj : noise.trajectories()) {
      const NoiseChannel ch = traj.channel();
      if (shift || ch.axis == NoiseAxis::Y) continue;
      auto& dst = ch.axis == NoiseAxis::X ? x[ch.qubit] : z[ch.qubit];
      dst = traj.sample_uniform(0.0, h, points);
    }
    for (std::size_t j = 0; j < points && !shift; ++j) {
      if (target.kind == Kind::Bare) {
        delta[j] = 2.0 * z[0][j] + x[0][j] * x[0][j] / target.E_z;
      } else {
        const double E_m = target.pair.E_mx;
        delta[j] = -2.0 * (effective_z_coefficient(target.pair.E_z, E_m, x[0][j], x[1][j], z[0][j], z[1][j]) + E_m);
      }
    }
    double phi = 0.0;
    out[0] = 1.0;
    for (std::size_t j = 1; j < points; ++j) {
      phi += 0.5 * h * (delta[j - 1] + delta[j]);
      out[j] = std::polar(1.0, -phi);
    }
  };

  const std::size_t n = ensemble.n_trajectories;
  std::vector<cplx> total(points);
  std::vector<std::vector<cplx>> slots(std::min(kBlock, n), std::vector<cplx>(points));
  for (std::size_t k0 = 0; k0 < n; k0 += kBlock) {
    const std::size_t count = std::min(kBlock, n - k0);
    parallel_for(count, ensemble.threads, [&](std::size_t b) { run_one(k0 + b, slots[b]); });
    for (std::size_t b = 0; b < count; ++b) {
      for (std::size_t j = 0; j < points; ++j) total[j] += slots[b][j];
    }
  }

  CoherenceRun run;
  run.magnitude.resize(points);
  run.standard_error.resize(points);
  const double nn = static_cast<double>(n);
  for (std::size_t j = 0; j < points; ++j) {
    const double c = std::abs(total[j] / nn);
    run.magnitude[j] = c;
    run.standard_error[j] = n > 1 ? std::sqrt(std::max(0.0, 1.0 - c * c) / (nn - 1.0)) : 0.0;
  }
  return run;
}

}  // namespace

std::uint64_t trajectory_seed(std::uint64_t base_seed, std::size_t k) {
  return counter_hash(base_seed, kTrajectoryStream, k, 0);
}

std::uint64_t point_seed(std::uint64_t base_seed, std::size_t i) {
  return counter_hash(base_seed, kPointStream, i, 0);
}

std::vector<NoiseChannel> default_channels(std::size_t n_qubits) {
  std::vector<NoiseChannel> out;
  for (std::size_t q = 0; q < n_qubits; ++q) {
    out.push_back({NoiseAxis::X, q});
    out.push_back({NoiseAxis::Z, q});
  }
  return out;
}

NoiseCoupling ensemble_member(const EnsembleConfig& ensemble, const FrequencyGrid& grid, std::size_t n_qubits,
                              std::size_t k) {
  const std::uint64_t seed = trajectory_seed(ensemble.base_seed, k);
  std::vector<NoiseTrajectory> trajs;
  for (const auto& ch : active_channels(ensemble, n_qubits)) {
    trajs.push_back(sample_trajectory(ensemble.spectrum, grid, ch, seed));
  }
  return NoiseCoupling(n_qubits, std::move(trajs));
}

DephasingTarget DephasingTarget::bare(double E_z) {
  DephasingTarget t;
  t.kind = Kind::Bare;
  t.E_z = E_z;
  return t;
}

DephasingTarget DephasingTarget::encoded(const UqdpPairSpec& pair) {
  DephasingTarget t;
  t.kind = Kind::Encoded;
  t.E_z = pair.E_z;
  t.pair = pair;
  return t;
}

DephasingTarget DephasingTarget::polariton(const JaynesCummingsSpec& jc, std::size_t n) {
  DephasingTarget t;
  t.kind = Kind::Doublet;
  t.E_z = jc.E_z;
  t.jc = jc;
  t.doublet = n;
  return t;
}

std::vector<NoiseChannel> target_channels(const DephasingTarget& target) {
  switch (target.kind) {
    case DephasingTarget::Kind::Bare: return default_channels(1);
    case DephasingTarget::Kind::Encoded: return default_channels(2);
    case DephasingTarget::Kind::Doublet: return {{NoiseAxis::X, 0}, {NoiseAxis::Z, 0}, {NoiseAxis::X, 1}};
  }
  return {};
}

double SplittingShift::operator()(std::span<const double> v) const {
  const std::size_t n = linear.size();
  double s = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    if (v[c] == 0.0) continue;
    double row = linear[c];
    for (std::size_t d = 0; d < n; ++d) row += quadratic[c * n + d] * v[d];
    s += row * v[c];
  }
  return s;
}

SplittingShift splitting_shift(const ComplexMatrix& h, std::span<const ComplexMatrix> operators, const StateVector& a,
                               const StateVector& b) {
  const EigenSystem eig = eigendecompose_hermitian(h);
  const std::size_t dim = eig.values.size();
  auto locate = [&](const StateVector& s) {
    for (std::size_t k = 0; k < dim; ++k) {
      if (std::norm(inner(eig.vector(k), s)) > 1.0 - 1e-8) return k;
    }
    throw std::invalid_argument("splitting_shift: state is not an eigenstate");
  };
  const double scale = std::max({std::abs(eig.values.front()), std::abs(eig.values.back()), 1e-300});
  const std::size_t n = operators.size();
  SplittingShift out;
  out.linear.assign(n, 0.0);
  out.quadratic.assign(n * n, 0.0);
  const std::pair<std::size_t, double> levels[2] = {{locate(a), 1.0}, {locate(b), -1.0}};
  for (const auto& [k, sign] : levels) {
    const StateVector vk = eig.vector(k);
    std::vector<StateVector> images;
    for (const auto& op : operators) images.push_back(op * vk);
    for (std::size_t m = 0; m < dim; ++m) {
      const StateVector vm = eig.vector(m);
      std::vector<cplx> elem(n);
      for (std::size_t c = 0; c < n; ++c) elem[c] = inner(vm, images[c]);
      if (m == k) {
        for (std::size_t c = 0; c < n; ++c) out.linear[c] += sign * elem[c].real();
        continue;
      }
      const double denom = eig.values[k] - eig.values[m];
      const bool coupled = std::any_of(elem.begin(), elem.end(), [](cplx e) { return std::abs(e) > 1e-12; });
      if (!coupled) continue;
      if (std::abs(denom) < 1e-12 * scale) throw std::invalid_argument("splitting_shift: degenerate level");
      for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t d = 0; d < n; ++d) {
          out.quadratic[c * n + d] += sign * (std::conj(elem[c]) * elem[d]).real() / denom;
        }
      }
    }
  }
  return out;
}

double quasi_static_rate(const DephasingTarget& target, const NoiseSpectrum& spectrum) {
  if (target.kind == DephasingTarget::Kind::Doublet) {
    const JaynesCummingsSystem jc = jaynes_cummings_system(target.jc);
    const auto channels = target_channels(target);
    std::vector<ComplexMatrix> ops;
    std::vector<double> var;
    for (const auto& ch : channels) {
      ops.push_back(jc_noise_operator(jc, ch));
      var.push_back(spectrum.integrated_power(ch.axis));
    }
    const SplittingShift s =
        splitting_shift(jc.hamiltonian, ops, jc.doublet(target.doublet, 0), jc.doublet(target.doublet, 1));
    // Gaussian v: Var(L.v + v^T Q v) = sum L_c^2 s_c^2 + 2 sum Qsym_cd^2 s_c^2 s_d^2.
    const std::size_t n = ops.size();
    double total = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      total += s.linear[c] * s.linear[c] * var[c];
      for (std::size_t d = 0; d < n; ++d) {
        const double q = 0.5 * (s.quadratic[c * n + d] + s.quadratic[d * n + c]);
        total += 2.0 * q * q * var[c] * var[d];
      }
    }
    return std::sqrt(total);
  }
  const double vx = spectrum.integrated_power(NoiseAxis::X);
  const double vz = spectrum.integrated_power(NoiseAxis::Z);
  if (target.kind == DephasingTarget::Kind::Bare) {
    return std::sqrt(4.0 * vz + 2.0 * vx * vx / (target.E_z * target.E_z));
  }
  const double E_z = target.pair.E_z;
  const double E_m = std::hypot(target.pair.E_mx, target.pair.E_my);
  if (E_m == 0.0) return std::sqrt(4.0 * vz);
  return std::sqrt(4.0 * vx * vx * E_m * E_m / std::pow(E_z, 4) + 8.0 * vz * vz / (E_m * E_m));
}

DephasingResult dephasing_time(const DephasingTarget& target, const EnsembleConfig& ensemble, DephasingMethod method,
                               const DephasingOptions& options) {
  ensemble.spectrum.validate();
  if (ensemble.n_trajectories == 0) throw std::invalid_argument("dephasing_time: ensemble is empty");
  if (target.kind == DephasingTarget::Kind::Encoded) {
    if (!target.pair.uqdp_valid()) throw std::invalid_argument("no protected subspace: E_mx = E_my = 0");
    if (method == DephasingMethod::Effective && (!target.pair.is_x_coupled() || target.pair.a0 != 1.0)) {
      throw std::invalid_argument("effective dephasing needs the x-coupled pair with a0 = 1");
    }
  }
  if (target.kind == DephasingTarget::Kind::Doublet) {
    if (target.doublet < 1 || target.doublet >= target.jc.n_max) {
      throw std::invalid_argument("doublet index must lie in [1, n_max - 1]");
    }
    if (target.jc.J == 0.0) throw std::invalid_argument("doublet is degenerate at J = 0");
  }
  if (options.steps_per_horizon < 16) throw std::invalid_argument("dephasing_time: steps_per_horizon < 16");

  const double rate = quasi_static_rate(target, ensemble.spectrum);
  const double t_est = rate > 0.0 ? std::sqrt(2.0) / rate : 0.0;
  double horizon = options.horizon > 0.0 ? options.horizon : (t_est > 0.0 ? 3.0 * t_est : options.max_horizon);
  horizon = std::min(horizon, options.max_horizon);
  const double h_noise = kTwoPi / (32.0 * ensemble.spectrum.omega_uv);

  DephasingResult result;
  result.n_trajectories = ensemble.n_trajectories;
  CoherenceRun run;
  double h = 0.0;
  for (;;) {
    h = std::min(horizon / static_cast<double>(options.steps_per_horizon), h_noise);
    auto n_steps = static_cast<std::size_t>(std::ceil(horizon / h - 1e-9));
    bool last = horizon >= options.max_horizon;
    if (n_steps > options.max_steps) {
      n_steps = options.max_steps;
      horizon = h * static_cast<double>(n_steps);
      last = true;
    }
    h = horizon / static_cast<double>(n_steps);
    run = coherence_run(target, ensemble, method, h, n_steps);
    result.horizon = horizon;
    result.step = h;
    result.steps = n_steps;
    const bool crossed =
        std::any_of(run.magnitude.begin(), run.magnitude.end(), [](double c) { return c <= std::exp(-1.0); });
    if (crossed || last || ensemble.spectrum.amplitude == 0.0) break;
    horizon = std::min(2.0 * horizon, options.max_horizon);
  }

  const double threshold = std::exp(-1.0);
  result.lower_bound = true;
  result.T_phi = result.horizon;
  for (std::size_t j = 1; j < run.magnitude.size(); ++j) {
    if (run.magnitude[j] <= threshold) {
      const double c0 = run.magnitude[j - 1], c1 = run.magnitude[j];
      const double f = c0 == c1 ? 0.0 : (c0 - threshold) / (c0 - c1);
      result.T_phi = h * (static_cast<double>(j - 1) + f);
      result.lower_bound = false;
      const double slope = (c0 - c1) / h;
      if (slope > 0.0) {
        result.T_phi_standard_error = 0.5 * (run.standard_error[j - 1] + run.standard_error[j]) / slope;
      }
      break;
    }
  }
  if (!result.lower_bound) {
    const double c_half = interpolate(run.magnitude, h, 0.5 * result.T_phi);
    if (c_half > 0.0 && c_half < 1.0) result.decay_exponent = std::log(-1.0 / std::log(c_half)) / std::log(2.0);
  }

  const std::size_t m = std::max<std::size_t>(options.output_points, 2);
  result.times.push_back(0.0);
  result.coherence.push_back(run.magnitude.front());
  result.standard_error.push_back(run.standard_error.front());
  for (std::size_t i = 0; i + 1 < m; ++i) {
    const double t = result.horizon * std::pow(10.0, -6.0 + 6.0 * static_cast<double>(i) / static_cast<double>(m - 2));
    result.times.push_back(t);
    result.coherence.push_back(interpolate(run.magnitude, h, t));
    result.standard_error.push_back(interpolate(run.standard_error, h, t));
  }
  return result;
}

ResidualDephasing residual_dephasing_rate(const UqdpPairSpec& spec, const EnsembleConfig& ensemble) {
  const EncodedSubspace enc = encoded_subspace(spec);
  const FrequencyGrid grid = make_frequency_grid(ensemble.spectrum);
  const std::size_t n = ensemble.n_trajectories;
  if (n == 0) throw std::invalid_argument("residual_dephasing_rate: ensemble is empty");
  std::vector<double> samples(n);
  parallel_for(n, ensemble.threads, [&](std::size_t k) {
    const NoiseCoupling noise = ensemble_member(ensemble, grid, 2, k);
    double s = 0.0;
    for (std::size_t c = 0; c < noise.size(); ++c) {
      const ComplexMatrix& op = noise.operators()[c];
      const double diag = inner(enc.state4, op * enc.state4).real() - inner(enc.state3, op * enc.state3).real();
      s += diag * noise.trajectories()[c].value(0.0);
    }
    samples[k] = 0.5 * s * s;
  });
  const MeanAndError me = mean_and_error(samples);
  return {me.mean, me.standard_error};
}

std::vector<ComplexMatrix> pauli_basis(std::size_t d) {
  if (d < 2 || (d & (d - 1)) != 0) throw std::invalid_argument("pauli_basis: dimension must be a power of two");
  std::vector<ComplexMatrix> out{ComplexMatrix::identity(1)};
  for (std::size_t size = 1; size < d; size *= 2) {
    std::vector<ComplexMatrix> next;
    for (const auto& m : out) {
      for (PauliAxis a : {PauliAxis::I, PauliAxis::X, PauliAxis::Y, PauliAxis::Z}) next.push_back(kron(m, pauli_matrix(a)));
    }
    out = std::move(next);
  }
  return out;
}

ChannelEstimate ChannelEstimate::from_images(std::size_t dim, std::vector<ComplexMatrix> images) {
  ChannelEstimate ch;
  ch.dim = dim;
  ch.basis = pauli_basis(dim);
  if (images.size() != ch.basis.size()) throw std::invalid_argument("ChannelEstimate: wrong number of images");
  for (const auto& m : images) {
    if (m.rows() != dim || m.cols() != dim) throw std::invalid_argument("ChannelEstimate: image dimension mismatch");
  }
  ch.image = images;
  ch.trajectory_images = {std::move(images)};
  ch.trace_defect = 1.0 - ch.image[0].trace().real() / static_cast<double>(dim);
  for (const auto& m : ch.image) ch.hermiticity_defect = std::max(ch.hermiticity_defect, max_abs_diff(m, m.adjoint()));
  return ch;
}

std::vector<ComplexMatrix> sample_transfers(const ComplexMatrix& h_static, const Schedule& schedule,
                                            std::span<const StateVector> basis, std::size_t n_qubits,
                                            const EnsembleConfig* ensemble) {
  const ComplexMatrix columns = from_columns(basis);
  const ComplexMatrix columns_adj = columns.adjoint();
  std::vector<double> energy(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) energy[i] = inner(basis[i], h_static * basis[i]).real();

  // Lab-frame integration is cheaper per step; the frame change is applied to
  // the encoded block at the end.
  Schedule lab = schedule;
  lab.frame = FrameKind::Lab;
  const double duration = schedule.duration();
  const bool rotate = schedule.frame == FrameKind::Rotating;

  const std::size_t n = ensemble != nullptr ? ensemble->n_trajectories : 1;
  if (n == 0) throw std::invalid_argument("sample_transfers: ensemble is empty");
  std::optional<FrequencyGrid> grid;
  if (ensemble != nullptr) grid = make_frequency_grid(ensemble->spectrum);

  std::vector<ComplexMatrix> out(n);
  parallel_for(n, ensemble != nullptr ? ensemble->threads : 1, [&](std::size_t k) {
    PropagationResult res;
    if (ensemble != nullptr) {
      const NoiseCoupling noise = ensemble_member(*ensemble, *grid, n_qubits, k);
      res = propagate(h_static, lab, &noise, columns);
    } else {
      res = propagate(h_static, lab, nullptr, columns);
    }
    ComplexMatrix m = columns_adj * res.final;
    if (rotate) {
      for (std::size_t i = 0; i < m.rows(); ++i) {
        const cplx ph = std::polar(1.0, energy[i] * duration);
        for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) *= ph;
      }
    }
    out[k] = std::move(m);
  });
  return out;
}

ComplexMatrix apply_transfer(const ComplexMatrix& transfer, const ComplexMatrix& b) {
  const EigenSystem eig = eigendecompose_hermitian(b);
  ComplexMatrix out(transfer.rows(), transfer.rows());
  for (std::size_t k = 0; k < eig.values.size(); ++k) {
    if (eig.values[k] == 0.0) continue;
    const StateVector psi = transfer * eig.vector(k);
    out.add_scaled(outer(psi, psi), eig.values[k]);
  }
  return out;
}

ChannelEstimate channel_from_transfers(std::vector<ComplexMatrix> transfers) {
  if (transfers.empty()) throw std::invalid_argument("channel_from_transfers: no transfers");
  const std::size_t d = transfers.front().rows();
  const auto basis = pauli_basis(d);
  std::vector<EigenSystem> eig;
  eig.reserve(basis.size());
  for (const auto& b : basis) eig.push_back(eigendecompose_hermitian(b));

  std::vector<std::vector<ComplexMatrix>> per(transfers.size(), std::vector<ComplexMatrix>(basis.size()));
  for (std::size_t k = 0; k < transfers.size(); ++k) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      ComplexMatrix img(d, d);
      for (std::size_t e = 0; e < d; ++e) {
        const StateVector psi = transfers[k] * eig[i].vector(e);
        img.add_scaled(outer(psi, psi), eig[i].values[e]);
      }
      per[k][i] = std::move(img);
    }
  }
  std::vector<ComplexMatrix> mean(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    std::vector<ComplexMatrix> column(transfers.size());
    for (std::size_t k = 0; k < transfers.size(); ++k) column[k] = per[k][i];
    mean[i] = (1.0 / static_cast<double>(transfers.size())) * pairwise_sum(column);
  }
  ChannelEstimate ch = ChannelEstimate::from_images(d, std::move(mean));
  ch.trajectory_images = std::move(per);
  ch.transfers = std::move(transfers);
  return ch;
}

ChannelEstimate reconstruct_channel(const ComplexMatrix& h_static, const Schedule& schedule,
                                    std::span<const StateVector> basis, std::size_t n_qubits,
                                    const EnsembleConfig* ensemble) {
  if (basis.size() != 2 && basis.size() != 4) throw std::invalid_argument("reconstruct_channel: d must be 2 or 4");
  return channel_from_transfers(sample_transfers(h_static, schedule, basis, n_qubits, ensemble));
}

ComplexMatrix channel_image(const ChannelEstimate& channel, const ComplexMatrix& b) {
  const double d = static_cast<double>(channel.dim);
  ComplexMatrix out(channel.dim, channel.dim);
  for (std::size_t i = 0; i < channel.basis.size(); ++i) {
    const cplx c = (channel.basis[i] * b).trace() / d;
    if (c != cplx{}) out.add_scaled(channel.image[i], c);
  }
  return out;
}

namespace {

FidelityReport fidelity_sum(const ChannelEstimate& channel, const ComplexMatrix& target,
                            const std::vector<std::size_t>& terms, double offset, double scale) {
  if (target.rows() != channel.dim) throw std::invalid_argument("fidelity: target dimension mismatch");
  std::vector<ComplexMatrix> conj(channel.basis.size());
  for (std::size_t i : terms) conj[i] = target * channel.basis[i] * target.adjoint();
  std::vector<double> per(channel.trajectory_images.size());
  for (std::size_t k = 0; k < per.size(); ++k) {
    double s = 0.0;
    for (std::size_t i : terms) s += (conj[i] * channel.trajectory_images[k][i]).trace().real();
    per[k] = offset + scale * s;
  }
  const MeanAndError me = mean_and_error(per);
  return {me.mean, me.standard_error, per.size()};
}

}  // namespace

FidelityReport fidelity_FX(const ChannelEstimate& channel, const ComplexMatrix& target) {
  if (channel.dim != 2) throw std::invalid_argument("fidelity_FX needs a single-qubit channel");
  return fidelity_sum(channel, target, {1, 2, 3}, 0.5, 1.0 / 12.0);
}

FidelityReport fidelity_FC(const ChannelEstimate& channel, const ComplexMatrix& target, FcTerms terms) {
  if (channel.dim != 4) throw std::invalid_argument("fidelity_FC needs a two-qubit channel");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < 16; ++i) {
    if (terms == FcTerms::Full16 || (i / 4 != 0 && i % 4 != 0)) idx.push_back(i);
  }
  return fidelity_sum(channel, target, idx, 0.2, 1.0 / 80.0);
}

}  // namespace uqdp
