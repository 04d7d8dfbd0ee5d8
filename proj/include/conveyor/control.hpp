#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "conveyor/lattice.hpp"
#include "conveyor/trajectory.hpp"

namespace conveyor {

// Uniformly sampled position signal. Positions are in units of the lattice
// wavelength, so one site is 0.5 and the drive phase is 4*pi*x.
struct SampledSignal {
  double dt_us = 0.05;
  double t0_us = 0.0;
  std::vector<double> x;

  double duration_us() const {
    return x.empty() ? 0.0 : dt_us * static_cast<double>(x.size() - 1);
  }
};

// Actuator kernel: a pure delay followed by a sampled smooth response.
struct ImpulseResponse {
  std::vector<double> samples;
  double dt_us = 0.05;
  double delay_us = 0.0;

  int delay_taps() const;
  double dc_gain() const;
};

// delay + first-order low-pass model of the drive electronics
ImpulseResponse default_kernel(double delay_us = 0.4,
                               double cutoff_hz = 800e3,
                               double dt_us = 0.05);

ImpulseResponse unit_kernel(double dt_us = 0.05);

struct Plant {
  ImpulseResponse kernel;
  double slew_limit_rad_per_us = 0.84;
  double noise_rms_nm = 0.0;
  double lambda_nm = 865.9;
  unsigned long long seed = 0;
};

// convolution, then sample-wise slew saturation, then optional noise
SampledSignal apply_plant(const SampledSignal& drive, const Plant& plant);

// Tikhonov-regularized inverse filter applied to the signal derivative.
// reg scales the peak of |H|^2. The result is returned on a window padded
// on both sides so the drive can move before the target does.
SampledSignal deconvolve(const SampledSignal& target,
                         const ImpulseResponse& kernel, double reg = 1e-3);

struct CompensationResult {
  SampledSignal drive;
  std::vector<double> residual_history;  // max |error| per iteration, in x/lambda
  bool converged = false;
};

// Pre-distortion loop: deconvolve a corrected target, measure the plant
// output against the true target, fold gain * error back into the corrected
// target, repeat. Diverging residuals raise InstabilityError.
CompensationResult iterate_compensation(const SampledSignal& target,
                                        const Plant& plant, double gain = 0.4,
                                        int max_iter = 10, double tol = 5e-4);

// trajectory in internal units -> SI-sampled signal in x/lambda
SampledSignal sample_trajectory(const Trajectory& traj, const LatticeParams& p,
                                double dt_us = 0.05);

double max_phase_slew(const SampledSignal& s);  // rad/us

// worst |a - b| over the window where both are defined
double signal_mismatch(const SampledSignal& a, const SampledSignal& b);

void write_signal_csv(std::ostream& os, const SampledSignal& s);
SampledSignal read_signal_csv(std::istream& is);
void write_kernel_csv(std::ostream& os, const ImpulseResponse& k);
ImpulseResponse read_kernel_csv(std::istream& is);

}  // namespace conveyor
