#include "conveyor/control.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "conveyor/errors.hpp"
#include "conveyor/fft.hpp"

namespace conveyor {

namespace {

constexpr double kPhasePerLambda = 4.0 * M_PI;  // phi = 2k x = 4 pi (x/lambda)

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

int padding_taps(const ImpulseResponse& k) {
  return static_cast<int>(k.samples.size()) + k.delay_taps() + 16;
}

void check_rate(double a, double b, const char* what) {
  if (std::fabs(a - b) > 1e-9 * std::max(1.0, std::fabs(a)))
    throw ConfigError(std::string(what) +
                      ": sample spacings differ, resample the input first");
}

// edge-held value
double at_held(const std::vector<double>& v, long i) {
  if (i < 0) return v.front();
  if (i >= static_cast<long>(v.size())) return v.back();
  return v[static_cast<size_t>(i)];
}

SampledSignal pad_signal(const SampledSignal& s, int taps) {
  SampledSignal out;
  out.dt_us = s.dt_us;
  out.t0_us = s.t0_us - taps * s.dt_us;
  out.x.reserve(s.x.size() + 2 * static_cast<size_t>(taps));
  out.x.insert(out.x.end(), static_cast<size_t>(taps), s.x.front());
  out.x.insert(out.x.end(), s.x.begin(), s.x.end());
  out.x.insert(out.x.end(), static_cast<size_t>(taps), s.x.back());
  return out;
}

// inverse filter on an already padded window, same time base out
std::vector<double> deconvolve_core(const std::vector<double>& x,
                                    const ImpulseResponse& kernel, double reg) {
  if (x.size() < 2) return x;
  size_t m = x.size();
  int delay = kernel.delay_taps();
  size_t n = next_pow2(m + kernel.samples.size() + static_cast<size_t>(delay));
  Fft fft(n);

  std::vector<std::complex<double>> H(n, 0.0), dsig(n, 0.0);
  for (size_t k = 0; k < kernel.samples.size(); ++k)
    H[k + static_cast<size_t>(delay)] = kernel.samples[k];
  for (size_t i = 0; i + 1 < m; ++i) dsig[i] = x[i + 1] - x[i];

  fft.forward(H.data());
  fft.forward(dsig.data());

  double peak = 0.0;
  for (auto& c : H) peak = std::max(peak, std::norm(c));
  double floor = reg * peak;
  for (size_t j = 0; j < n; ++j)
    dsig[j] = dsig[j] * std::conj(H[j]) / (std::norm(H[j]) + floor);
  fft.inverse(dsig.data());

  std::vector<double> u(m);
  u[0] = x[0];
  for (size_t i = 0; i + 1 < m; ++i) u[i + 1] = u[i] + dsig[i].real();
  return u;
}

}  // namespace

int ImpulseResponse::delay_taps() const {
  return static_cast<int>(std::lround(delay_us / dt_us));
}

double ImpulseResponse::dc_gain() const {
  double s = 0.0;
  for (double v : samples) s += v;
  return s;
}

ImpulseResponse default_kernel(double delay_us, double cutoff_hz,
                               double dt_us) {
  if (!(cutoff_hz > 0.0) || !(dt_us > 0.0) || delay_us < 0.0)
    throw ConfigError("kernel needs positive cutoff and sample spacing");
  double tc_us = 1e6 / (2.0 * M_PI * cutoff_hz);
  ImpulseResponse k;
  k.dt_us = dt_us;
  k.delay_us = delay_us;
  size_t len = static_cast<size_t>(std::ceil(14.0 * tc_us / dt_us)) + 1;
  k.samples.resize(len);
  double sum = 0.0;
  for (size_t i = 0; i < len; ++i) {
    k.samples[i] = std::exp(-(static_cast<double>(i) * dt_us) / tc_us);
    sum += k.samples[i];
  }
  for (auto& v : k.samples) v /= sum;
  return k;
}

ImpulseResponse unit_kernel(double dt_us) {
  ImpulseResponse k;
  k.dt_us = dt_us;
  k.samples = {1.0};
  return k;
}

SampledSignal apply_plant(const SampledSignal& drive, const Plant& plant) {
  if (drive.x.empty()) throw ConfigError("empty drive signal");
  if (!(plant.slew_limit_rad_per_us > 0.0))
    throw ConfigError("plant slew limit must be positive");
  check_rate(drive.dt_us, plant.kernel.dt_us, "apply_plant");

  const auto& h = plant.kernel.samples;
  int delay = plant.kernel.delay_taps();
  size_t n = drive.x.size();
  SampledSignal out;
  out.dt_us = drive.dt_us;
  out.t0_us = drive.t0_us;
  out.x.resize(n);
  for (size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (size_t k = 0; k < h.size(); ++k)
      acc += h[k] * at_held(drive.x, static_cast<long>(i) - delay -
                                         static_cast<long>(k));
    out.x[i] = acc;
  }

  double max_step =
      plant.slew_limit_rad_per_us * drive.dt_us / kPhasePerLambda;
  for (size_t i = 1; i < n; ++i)
    out.x[i] = std::clamp(out.x[i], out.x[i - 1] - max_step,
                          out.x[i - 1] + max_step);

  if (plant.noise_rms_nm > 0.0) {
    std::mt19937_64 rng(plant.seed);
    std::normal_distribution<double> noise(0.0,
                                           plant.noise_rms_nm / plant.lambda_nm);
    for (auto& v : out.x) v += noise(rng);
  }
  return out;
}

SampledSignal deconvolve(const SampledSignal& target,
                         const ImpulseResponse& kernel, double reg) {
  if (target.x.empty()) throw ConfigError("empty target signal");
  if (std::fabs(kernel.dc_gain()) < 1e-9)
    throw ConfigError("kernel DC gain is zero, cannot invert");
  check_rate(target.dt_us, kernel.dt_us, "deconvolve");
  SampledSignal padded = pad_signal(target, padding_taps(kernel));
  padded.x = deconvolve_core(padded.x, kernel, reg);
  return padded;
}

CompensationResult iterate_compensation(const SampledSignal& target,
                                        const Plant& plant, double gain,
                                        int max_iter, double tol) {
  if (max_iter < 1) throw ConfigError("iterate_compensation needs max_iter >= 1");
  check_rate(target.dt_us, plant.kernel.dt_us, "iterate_compensation");

  int taps = padding_taps(plant.kernel);
  SampledSignal truth = pad_signal(target, taps);
  SampledSignal corrected = truth;

  CompensationResult res;
  for (int it = 0; it < max_iter; ++it) {
    res.drive = corrected;
    res.drive.x = deconvolve_core(corrected.x, plant.kernel, 1e-3);
    SampledSignal actual = apply_plant(res.drive, plant);
    double worst = 0.0;
    std::vector<double> err(truth.x.size());
    for (size_t i = 0; i < truth.x.size(); ++i) {
      err[i] = actual.x[i] - truth.x[i];
      worst = std::max(worst, std::fabs(err[i]));
    }
    res.residual_history.push_back(worst);
    if (worst < tol) {
      res.converged = true;
      break;
    }
    size_t nh = res.residual_history.size();
    if (nh >= 4 && res.residual_history[nh - 1] > res.residual_history[nh - 2] &&
        res.residual_history[nh - 2] > res.residual_history[nh - 3] &&
        res.residual_history[nh - 3] > res.residual_history[nh - 4])
      throw InstabilityError("pre-distortion loop diverging",
                             res.residual_history);
    for (size_t i = 0; i < corrected.x.size(); ++i)
      corrected.x[i] -= gain * err[i];
  }
  return res;
}

SampledSignal sample_trajectory(const Trajectory& traj, const LatticeParams& p,
                                double dt_us) {
  double unit = p.time_unit_us();
  double dur_us = traj.tau() * unit;
  size_t n = static_cast<size_t>(std::ceil(dur_us / dt_us)) + 1;
  SampledSignal s;
  s.dt_us = dt_us;
  s.x.resize(n);
  for (size_t i = 0; i < n; ++i) {
    double t = std::min(static_cast<double>(i) * dt_us / unit, traj.tau());
    s.x[i] = traj.position(t) / (2.0 * M_PI);
  }
  return s;
}

double max_phase_slew(const SampledSignal& s) {
  double m = 0.0;
  for (size_t i = 1; i < s.x.size(); ++i)
    m = std::max(m, std::fabs(s.x[i] - s.x[i - 1]));
  return m * kPhasePerLambda / s.dt_us;
}

double signal_mismatch(const SampledSignal& a, const SampledSignal& b) {
  check_rate(a.dt_us, b.dt_us, "signal_mismatch");
  double start = std::max(a.t0_us, b.t0_us);
  double stop = std::min(a.t0_us + a.duration_us(), b.t0_us + b.duration_us());
  if (stop < start) throw ConfigError("signals do not overlap in time");
  long ia = std::lround((start - a.t0_us) / a.dt_us);
  long ib = std::lround((start - b.t0_us) / b.dt_us);
  long n = std::lround((stop - start) / a.dt_us);
  double worst = 0.0;
  for (long i = 0; i <= n; ++i)
    worst = std::max(worst, std::fabs(a.x[static_cast<size_t>(ia + i)] -
                                      b.x[static_cast<size_t>(ib + i)]));
  return worst;
}

void write_signal_csv(std::ostream& os, const SampledSignal& s) {
  os << "time_us,x_over_lambda\n";
  os.precision(12);
  for (size_t i = 0; i < s.x.size(); ++i)
    os << s.t0_us + static_cast<double>(i) * s.dt_us << "," << s.x[i] << "\n";
}

SampledSignal read_signal_csv(std::istream& is) {
  SampledSignal s;
  std::string line;
  std::vector<double> times;
  while (std::getline(is, line)) {
    if (line.empty() || std::isalpha(static_cast<unsigned char>(line[0])))
      continue;
    std::istringstream row(line);
    double t, v;
    char comma;
    if (row >> t >> comma >> v) {
      times.push_back(t);
      s.x.push_back(v);
    }
  }
  if (times.size() < 2) throw ConfigError("signal file needs >= 2 samples");
  s.t0_us = times.front();
  s.dt_us = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  return s;
}

void write_kernel_csv(std::ostream& os, const ImpulseResponse& k) {
  os << "time_us,value\n";
  os.precision(12);
  for (size_t i = 0; i < k.samples.size(); ++i)
    os << k.delay_us + static_cast<double>(i) * k.dt_us << "," << k.samples[i]
       << "\n";
}

ImpulseResponse read_kernel_csv(std::istream& is) {
  ImpulseResponse k;
  std::string line;
  std::vector<double> times;
  while (std::getline(is, line)) {
    if (line.empty() || std::isalpha(static_cast<unsigned char>(line[0])))
      continue;
    std::istringstream row(line);
    double t, v;
    char comma;
    if (row >> t >> comma >> v) {
      times.push_back(t);
      k.samples.push_back(v);
    }
  }
  if (times.size() < 1) throw ConfigError("kernel file is empty");
  k.delay_us = times.front();
  k.dt_us = times.size() > 1 ? (times[1] - times[0]) : 0.05;
  return k;
}

}  // namespace conveyor
