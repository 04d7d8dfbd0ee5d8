#include "conveyor/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "conveyor/errors.hpp"

namespace conveyor {

std::string to_string(TrajKind k) {
  switch (k) {
    case TrajKind::linear: return "linear";
    case TrajKind::parabolic: return "parabolic";
    case TrajKind::adiabatic_sine: return "adiabatic_sine";
    case TrajKind::classical_ansatz: return "classical_ansatz";
    case TrajKind::fourier: return "fourier";
    case TrajKind::sampled: return "sampled";
  }
  return "?";
}

TrajKind traj_kind_from_string(const std::string& s) {
  if (s == "linear") return TrajKind::linear;
  if (s == "parabolic") return TrajKind::parabolic;
  if (s == "adiabatic_sine") return TrajKind::adiabatic_sine;
  if (s == "classical_ansatz") return TrajKind::classical_ansatz;
  if (s == "fourier") return TrajKind::fourier;
  if (s == "sampled") return TrajKind::sampled;
  throw ConfigError("unknown trajectory kind: " + s);
}

namespace {
void check_basic(double d, double tau) {
  if (!(tau > 0.0)) throw ConfigError("trajectory needs tau > 0");
  if (!(d > 0.0)) throw ConfigError("trajectory needs d > 0");
}
}  // namespace

Trajectory Trajectory::linear(double d, double tau) {
  check_basic(d, tau);
  Trajectory t;
  t.kind_ = TrajKind::linear;
  t.d_ = d;
  t.tau_ = tau;
  return t;
}

Trajectory Trajectory::parabolic(double d, double tau) {
  check_basic(d, tau);
  Trajectory t;
  t.kind_ = TrajKind::parabolic;
  t.d_ = d;
  t.tau_ = tau;
  return t;
}

Trajectory Trajectory::adiabatic_sine(double d, double tau) {
  check_basic(d, tau);
  Trajectory t;
  t.kind_ = TrajKind::adiabatic_sine;
  t.d_ = d;
  t.tau_ = tau;
  return t;
}

Trajectory Trajectory::classical_ansatz(double d, double tau,
                                        const LatticeParams& p) {
  check_basic(d, tau);
  double tcb = tau_cb(d, p);
  double arg = (tcb / tau) * (tcb / tau);
  if (arg > 1.0) {
    std::ostringstream msg;
    msg << "jump ansatz infeasible: tau = " << tau
        << " below the classical bound tau_cb = " << tcb;
    throw InfeasibleError(msg.str());
  }
  Trajectory t;
  t.kind_ = TrajKind::classical_ansatz;
  t.d_ = d;
  t.tau_ = tau;
  t.jump_ = 0.5 * std::asin(arg);  // (lambda/4pi)*asin -> 1/2 in recoil units
  return t;
}

Trajectory Trajectory::fourier(double d, double tau, std::vector<double> b) {
  check_basic(d, tau);
  Trajectory t;
  t.kind_ = TrajKind::fourier;
  t.d_ = d;
  t.tau_ = tau;
  t.coeffs_ = std::move(b);
  return t;
}

Trajectory Trajectory::sampled(double d, double tau, std::vector<double> times,
                               std::vector<double> xs) {
  check_basic(d, tau);
  if (times.size() != xs.size() || times.size() < 2)
    throw ConfigError("sampled trajectory needs matching times/xs, >= 2 points");
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw ConfigError("sampled trajectory times must increase");
  Trajectory t;
  t.kind_ = TrajKind::sampled;
  t.d_ = d;
  t.tau_ = tau;
  t.sample_t_ = std::move(times);
  t.sample_x_ = std::move(xs);
  return t;
}

double Trajectory::position(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= tau_) return d_;
  double s = t / tau_;
  switch (kind_) {
    case TrajKind::linear:
      return d_ * s;
    case TrajKind::parabolic:
      return s < 0.5 ? 2.0 * d_ * s * s
                     : d_ - 2.0 * d_ * (1.0 - s) * (1.0 - s);
    case TrajKind::adiabatic_sine:
      return d_ * s - (d_ / (2.0 * kSite)) * std::sin(2.0 * kSite * s);
    case TrajKind::classical_ansatz: {
      double interior = s < 0.5 ? 2.0 * d_ * s * s
                                : d_ - 2.0 * d_ * (1.0 - s) * (1.0 - s);
      return interior + (s < 0.5 ? jump_ : -jump_);
    }
    case TrajKind::fourier: {
      double x = 0.5 * d_ * (1.0 - std::cos(kSite * s));
      for (size_t j = 0; j < coeffs_.size(); ++j)
        x += coeffs_[j] * std::sin(kSite * (j + 1) * s);
      return x;
    }
    case TrajKind::sampled: {
      auto it = std::upper_bound(sample_t_.begin(), sample_t_.end(), t);
      if (it == sample_t_.begin()) return sample_x_.front();
      if (it == sample_t_.end()) return sample_x_.back();
      size_t i = static_cast<size_t>(it - sample_t_.begin());
      double w = (t - sample_t_[i - 1]) / (sample_t_[i] - sample_t_[i - 1]);
      return (1 - w) * sample_x_[i - 1] + w * sample_x_[i];
    }
  }
  return 0.0;
}

double Trajectory::velocity(double t) const {
  if (t < 0.0 || t > tau_) return 0.0;
  double s = t / tau_;
  switch (kind_) {
    case TrajKind::linear:
      return d_ / tau_;
    case TrajKind::parabolic:
    case TrajKind::classical_ansatz:
      return s < 0.5 ? 4.0 * d_ * t / (tau_ * tau_)
                     : 4.0 * d_ * (tau_ - t) / (tau_ * tau_);
    case TrajKind::adiabatic_sine:
      return (d_ / tau_) * (1.0 - std::cos(2.0 * kSite * s));
    case TrajKind::fourier: {
      double v = 0.5 * d_ * (kSite / tau_) * std::sin(kSite * s);
      for (size_t j = 0; j < coeffs_.size(); ++j)
        v += coeffs_[j] * (kSite * (j + 1) / tau_) *
             std::cos(kSite * (j + 1) * s);
      return v;
    }
    case TrajKind::sampled: {
      double h = tau_ / 4096.0;
      return (position(std::min(t + h, tau_)) -
              position(std::max(t - h, 0.0))) /
             (std::min(t + h, tau_) - std::max(t - h, 0.0));
    }
  }
  return 0.0;
}

PositionFn Trajectory::fn() const {
  Trajectory copy = *this;
  return [copy](double t) { return copy.position(t); };
}

PositionFn Trajectory::round_trip_fn() const {
  Trajectory copy = *this;
  double tau = tau_;
  return [copy, tau](double t) {
    return t <= tau ? copy.position(t) : copy.position(2.0 * tau - t);
  };
}

double tau_cb(double d, const LatticeParams& p) {
  if (!(d > 0.0)) throw ConfigError("tau_cb needs d > 0");
  double n = d / kSite;
  return p.tau_ho() * std::sqrt(2.0 * n / kSite);
}

double envelope_duration(EnvelopeProtocol pr, double F, double l_qgt,
                         const LatticeParams& p) {
  if (!(F > 0.0 && F < 1.0))
    throw InfeasibleError("envelope duration needs 0 < F < 1");
  double mlog = -std::log(F);
  double tho = p.tau_ho();
  switch (pr) {
    case EnvelopeProtocol::linear:
      return tho * l_qgt / (kSite * std::sqrt(mlog));
    case EnvelopeProtocol::parabolic:
      return tho * (2.0 / kSite) * std::sqrt(l_qgt) / std::pow(mlog, 0.25);
    case EnvelopeProtocol::adiabatic:
      return tho * std::sqrt(2.0 / 3.0 +
                             std::cbrt(l_qgt * l_qgt / (kSite * kSite * mlog)));
  }
  return 0.0;
}

std::vector<double> project_to_fourier(const Trajectory& traj, int j_max,
                                       double* recon_err) {
  if (j_max < 1) throw ConfigError("projection needs j_max >= 1");
  const int n = 4096;
  double tau = traj.tau();
  double d = traj.d();
  Eigen::MatrixXd A(n, j_max);
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) {
    // interior samples only; the endpoints belong to the carrier by
    // construction
    double t = tau * (i + 0.5) / n;
    double carrier = 0.5 * d * (1.0 - std::cos(kSite * t / tau));
    r(i) = traj.position(t) - carrier;
    for (int j = 1; j <= j_max; ++j)
      A(i, j - 1) = std::sin(kSite * j * t / tau);
  }
  Eigen::VectorXd b = A.colPivHouseholderQr().solve(r);
  if (recon_err) {
    double e2 = (A * b - r).squaredNorm() * (tau / n);
    *recon_err = std::sqrt(e2);
  }
  return std::vector<double>(b.data(), b.data() + j_max);
}

FeasibilityReport feasibility_check(const Trajectory& traj,
                                    const FeasibilityLimits& lim,
                                    const LatticeParams& p) {
  FeasibilityReport rep;
  double t_us = p.time_unit_us();

  // max |dx/dt| over a dense scan; jumps in the ansatz show up as huge
  // finite-difference slopes, which is the honest verdict for hardware
  double vmax = 0.0;
  const int n = 8192;
  if (traj.kind() == TrajKind::classical_ansatz ||
      traj.kind() == TrajKind::sampled) {
    double prev = traj.position(0.0);
    double h = traj.tau() / n;
    for (int i = 1; i <= n; ++i) {
      double x = traj.position(i * h);
      vmax = std::max(vmax, std::fabs(x - prev) / h);
      prev = x;
    }
  } else {
    for (int i = 0; i <= n; ++i)
      vmax = std::max(vmax, std::fabs(traj.velocity(traj.tau() * i / n)));
  }
  rep.max_slew_rad_per_us = vmax * kPhasePerPosition / t_us;
  rep.slew_ok = rep.max_slew_rad_per_us <= lim.max_slew_rad_per_us;

  double nu_max = kSite / traj.tau();  // carrier runs at j = 1
  if (traj.kind() == TrajKind::fourier) {
    for (size_t j = 0; j < traj.coeffs().size(); ++j)
      if (traj.coeffs()[j] != 0.0)
        nu_max = std::max(nu_max, kSite * (j + 1) / traj.tau());
  }
  if (!p.e_rec_hz) throw ConfigError("feasibility check needs e_rec_hz");
  rep.max_freq_hz = nu_max * *p.e_rec_hz;
  rep.bandwidth_ok = rep.max_freq_hz <= lim.bandwidth_hz;
  return rep;
}

int default_j_max(double tau, const FeasibilityLimits& lim,
                  const LatticeParams& p, bool* cap_warning) {
  if (!p.e_rec_hz) throw ConfigError("j_max derivation needs e_rec_hz");
  double nu_bw = lim.bandwidth_hz / *p.e_rec_hz;  // bandwidth, recoil angular units
  int j = static_cast<int>(std::floor(nu_bw * tau / kSite));
  j = std::max(j, 2);
  const int cap = 24;
  if (j > cap) j = cap;
  if (cap_warning) {
    // full controllability needs drive frequencies above u0/(2 pi hbar);
    // warn when neither the bandwidth nor the desk cap reaches that
    double needed_hz = p.u0 * *p.e_rec_hz / (2.0 * kSite);
    double achieved_hz = (kSite * j / tau) * *p.e_rec_hz;
    *cap_warning = achieved_hz < needed_hz;
  }
  return j;
}

nlohmann::json Trajectory::to_json() const {
  nlohmann::json j;
  j["kind"] = conveyor::to_string(kind_);
  j["d"] = d_;
  j["tau"] = tau_;
  if (kind_ == TrajKind::fourier) j["coefficients"] = coeffs_;
  if (kind_ == TrajKind::sampled) {
    j["samples"] = nlohmann::json::object();
    j["samples"]["t"] = sample_t_;
    j["samples"]["x"] = sample_x_;
  }
  return j;
}

Trajectory Trajectory::from_json(const nlohmann::json& j) {
  TrajKind k = traj_kind_from_string(j.at("kind").get<std::string>());
  double d = j.at("d").get<double>();
  double tau = j.at("tau").get<double>();
  switch (k) {
    case TrajKind::linear: return linear(d, tau);
    case TrajKind::parabolic: return parabolic(d, tau);
    case TrajKind::adiabatic_sine: return adiabatic_sine(d, tau);
    case TrajKind::classical_ansatz:
      throw ConfigError("classical_ansatz deserialization needs lattice params; "
                        "serialize its Fourier projection instead");
    case TrajKind::fourier:
      return fourier(d, tau, j.at("coefficients").get<std::vector<double>>());
    case TrajKind::sampled:
      return sampled(d, tau, j.at("samples").at("t").get<std::vector<double>>(),
                     j.at("samples").at("x").get<std::vector<double>>());
  }
  throw ConfigError("bad trajectory json");
}

}  // namespace conveyor
