#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "conveyor/lattice.hpp"
#include "conveyor/potentials.hpp"

namespace conveyor {

enum class TrajKind {
  linear,
  parabolic,
  adiabatic_sine,
  classical_ansatz,
  fourier,
  sampled,
};

std::string to_string(TrajKind k);
TrajKind traj_kind_from_string(const std::string& s);

// Conveyor-belt position program x_trap(t): 0 at t <= 0, d at t >= tau.
class Trajectory {
 public:
  static Trajectory linear(double d, double tau);
  static Trajectory parabolic(double d, double tau);
  static Trajectory adiabatic_sine(double d, double tau);
  // Jump ansatz: +dx at t=0, -2dx at tau/2, +dx at tau around a constant
  // acceleration profile; throws InfeasibleError when tau < tau_cb(d).
  static Trajectory classical_ansatz(double d, double tau,
                                     const LatticeParams& p);
  // x(t) = d(1-cos(pi t/tau))/2 + sum_j b_j sin(pi j t/tau); b is 1-based
  // via b[j-1].
  static Trajectory fourier(double d, double tau, std::vector<double> b);
  static Trajectory sampled(double d, double tau, std::vector<double> times,
                            std::vector<double> xs);

  TrajKind kind() const { return kind_; }
  double d() const { return d_; }
  double tau() const { return tau_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double jump() const { return jump_; }  // classical_ansatz only

  double position(double t) const;
  // dx/dt inside (0, tau); jumps excluded (one-sided at the pieces)
  double velocity(double t) const;

  PositionFn fn() const;
  // forward then time-reversed: length 2*tau, ends back at 0
  PositionFn round_trip_fn() const;

  nlohmann::json to_json() const;
  static Trajectory from_json(const nlohmann::json& j);

 private:
  Trajectory() = default;
  TrajKind kind_ = TrajKind::linear;
  double d_ = 0.0;
  double tau_ = 0.0;
  std::vector<double> coeffs_;
  double jump_ = 0.0;
  std::vector<double> sample_t_, sample_x_;
};

// Classical speed-limit duration for transport over d = n sites:
// tau_ho * sqrt(2n/pi).
double tau_cb(double d, const LatticeParams& p);

// Worst-case duration needed to reach fidelity F with the given protocol
// family, from the closed-form infidelity envelopes.
enum class EnvelopeProtocol { linear, parabolic, adiabatic };
double envelope_duration(EnvelopeProtocol pr, double F, double l_qgt,
                         const LatticeParams& p);

// Least-squares sine-series fit of traj minus the cosine carrier, on 4096
// uniform samples. Returns b_1..b_jmax; optional L2 reconstruction error.
std::vector<double> project_to_fourier(const Trajectory& traj, int j_max,
                                       double* recon_err = nullptr);

struct FeasibilityLimits {
  double max_slew_rad_per_us = 0.84;
  double bandwidth_hz = 800e3;
};

struct FeasibilityReport {
  double max_slew_rad_per_us = 0.0;
  double max_freq_hz = 0.0;  // highest nonzero Fourier component
  bool slew_ok = true;
  bool bandwidth_ok = true;
  bool pass() const { return slew_ok && bandwidth_ok; }
};

FeasibilityReport feasibility_check(const Trajectory& traj,
                                    const FeasibilityLimits& lim,
                                    const LatticeParams& p);

// Largest Fourier index whose frequency stays within the actuator bandwidth,
// capped for tractable search spaces. Warns (returns via flag) when the cap
// bites below the depth-set bandwidth requirement.
int default_j_max(double tau, const FeasibilityLimits& lim,
                  const LatticeParams& p, bool* cap_warning = nullptr);

}  // namespace conveyor
