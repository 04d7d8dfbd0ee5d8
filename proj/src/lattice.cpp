#include "conveyor/lattice.hpp"

#include <cmath>
#include <sstream>

#include "conveyor/errors.hpp"

namespace conveyor {

LatticeParams::LatticeParams(double depth, std::optional<double> erec_hz,
                             std::optional<double> lam_nm)
    : u0(depth), e_rec_hz(erec_hz), lambda_nm(lam_nm) {
  if (!(u0 > 0.0)) throw ConfigError("trap depth u0 must be positive");
  if (e_rec_hz && !(*e_rec_hz > 0.0))
    throw ConfigError("e_rec_hz must be positive");
  if (lambda_nm && !(*lambda_nm > 0.0))
    throw ConfigError("lambda_nm must be positive");
}

double LatticeParams::omega_ho() const { return 2.0 * std::sqrt(u0); }

double LatticeParams::tau_ho() const { return kSite / std::sqrt(u0); }

double LatticeParams::tau_revival() const {
  double t = tau_ho();
  return t * (1.0 + t / (2.0 * kSite));
}

double LatticeParams::sigma_x() const { return 1.0 / std::sqrt(omega_ho()); }

double LatticeParams::sigma_p() const { return 0.5 / sigma_x(); }

double LatticeParams::time_unit_us() const {
  if (!e_rec_hz) throw ConfigError("SI time conversion needs e_rec_hz");
  return 1e6 / (2.0 * kSite * *e_rec_hz);
}

double LatticeParams::seconds(double t) const { return t * time_unit_us() * 1e-6; }

double LatticeParams::meters(double x) const {
  if (!lambda_nm) throw ConfigError("SI length conversion needs lambda_nm");
  return x * (*lambda_nm * 1e-9) / (2.0 * kSite);
}

double LatticeParams::mass_kg() const {
  if (!e_rec_hz || !lambda_nm)
    throw ConfigError("mass needs both e_rec_hz and lambda_nm");
  double lam = *lambda_nm * 1e-9;
  return kSite * kHbar / (lam * lam * *e_rec_hz);
}

double LatticeParams::harmonic_period_si(double* out_seconds) const {
  double t = tau_ho();
  if (out_seconds) *out_seconds = seconds(t);
  return t;
}

double potential_up(double x, double x_trap, const LatticeParams& p) {
  double c = std::cos(x - x_trap);
  return -p.u0 * c * c;
}

SpinDownShape down_shape(const SpinDownField& f) {
  if (f.i_l == 0.0 && f.i_r == 0.0)
    throw InfeasibleError(
        "secondary lattice needs beam intensity; trap position undefined");
  double a = 7.0 * f.i_l;
  double b = f.i_r;
  double re = a * std::cos(f.phi_l) + b * std::cos(f.phi_r);
  double im = a * std::sin(f.phi_l) + b * std::sin(f.phi_r);
  SpinDownShape s;
  s.depth = 0.125 * std::sqrt(re * re + im * im);
  s.offset = (a + b) / 16.0 - 0.5 * s.depth;
  s.center = 0.5 * std::atan2(im, re);
  return s;
}

double potential_down(double x, const SpinDownField& f) {
  SpinDownShape s = down_shape(f);
  double c = std::cos(x - s.center);
  return -s.offset - s.depth * c * c;
}

namespace {

double wrap_pi(double a) {
  a = std::fmod(a + kSite, 2.0 * kSite);
  if (a < 0) a += 2.0 * kSite;
  return a - kSite;
}

// Beat angle of the combined field for a given phi_l.
double beat_angle(const SpinDownField& f, double phi_l) {
  double a = 7.0 * f.i_l;
  double b = f.i_r;
  return std::atan2(a * std::sin(phi_l) + b * std::sin(f.phi_r),
                    a * std::cos(phi_l) + b * std::cos(f.phi_r));
}

}  // namespace

double compensation_phase(const SpinDownField& f, double x_target,
                          double phi_l_guess) {
  if (!(f.i_l > 0.0))
    throw InfeasibleError("compensation needs i_l > 0");
  double theta = kPhasePerPosition * x_target;  // target beat angle

  // Reachability: the l phasor (weight 7 i_l) sweeps all angles when it
  // dominates; otherwise the angle stays within asin(7 i_l / i_r) of phi_r.
  double a = 7.0 * f.i_l;
  double b = f.i_r;
  if (b > a) {
    double cone = std::asin(a / b);
    double off = wrap_pi(theta - f.phi_r);
    if (std::fabs(off) > cone + 1e-12) {
      double near_th = f.phi_r + (off > 0 ? cone : -cone);
      std::ostringstream msg;
      msg << "target position " << x_target
          << " unreachable (i_r > 7*i_l); nearest achievable x = "
          << wrap_pi(near_th) / kPhasePerPosition;
      throw InfeasibleError(msg.str());
    }
  }

  // The angle condition is equivalent to the smooth residual
  //   s(phi_l) = a sin(phi_l - theta) + b sin(phi_r - theta) = 0
  // together with the resultant pointing along theta (not theta + pi).
  // Scan one full period around the guess for sign changes, refine each by
  // bisection, keep roots whose beat angle matches, pick the nearest.
  double sb = b * std::sin(f.phi_r - theta);
  auto resid = [&](double phi_l) { return a * std::sin(phi_l - theta) + sb; };
  auto is_true_root = [&](double phi_l) {
    return std::cos(beat_angle(f, phi_l) - theta) > 0.0;
  };

  const int kScan = 512;
  double best = phi_l_guess;
  double best_dist = 1e300;
  bool found = false;
  double prev_phi = phi_l_guess - kSite;
  double prev_r = resid(prev_phi);
  for (int i = 1; i <= kScan; ++i) {
    double phi = phi_l_guess - kSite + 2.0 * kSite * i / kScan;
    double r = resid(phi);
    if (prev_r == 0.0 || prev_r * r < 0.0) {
      double lo = prev_phi, hi = phi, rlo = prev_r;
      for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double rm = resid(mid);
        if (rlo * rm <= 0.0) hi = mid;
        else { lo = mid; rlo = rm; }
      }
      double root = 0.5 * (lo + hi);
      if (is_true_root(root)) {
        double dist = std::fabs(root - phi_l_guess);
        if (dist < best_dist) { best_dist = dist; best = root; found = true; }
      }
    }
    prev_phi = phi;
    prev_r = r;
  }
  if (!found) throw ConvergenceError("compensation root not found");
  return best;
}

}  // namespace conveyor
