#include "conveyor/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <random>
#include <thread>

#include "conveyor/errors.hpp"
#include "conveyor/search.hpp"
#include "conveyor/spectrum.hpp"

namespace conveyor {

namespace {

// position-units-per-time-unit equivalent of the phase slew limit
double slew_limit_recoil(const FeasibilityLimits& lim, const LatticeParams& p) {
  return lim.max_slew_rad_per_us * p.time_unit_us() / kPhasePerPosition;
}

struct SearchProblem {
  double tau = 0.0, d = 0.0;
  int j_max = 0;
  bool even_only = true;
  double penalty_weight = 10.0;
  double v_limit = 0.0;
  const TransportContext* ctx = nullptr;
  const ThermalSet* thermal = nullptr;

  size_t dims() const {
    return static_cast<size_t>(even_only ? j_max / 2 : j_max);
  }

  std::vector<double> full_coeffs(const std::vector<double>& z) const {
    std::vector<double> b(static_cast<size_t>(j_max), 0.0);
    if (even_only) {
      for (size_t i = 0; i < z.size(); ++i) b[2 * i + 1] = z[i];
    } else {
      std::copy(z.begin(), z.end(), b.begin());
    }
    return b;
  }

  std::vector<double> pack(const std::vector<double>& b) const {
    std::vector<double> z(dims(), 0.0);
    for (size_t i = 0; i < z.size(); ++i) {
      size_t j = even_only ? 2 * i + 1 : i;
      if (j < b.size()) z[i] = b[j];
    }
    return z;
  }

  double max_velocity(const Trajectory& t) const {
    const int n = 512;
    double vmax = 0.0;
    for (int i = 0; i <= n; ++i)
      vmax = std::max(vmax, std::fabs(t.velocity(tau * i / n)));
    return vmax;
  }

  // objective fidelity and slew penalty at z
  void measure(const std::vector<double>& z, double* F, double* pen) const {
    Trajectory t = Trajectory::fourier(d, tau, full_coeffs(z));
    *F = thermal ? thermal->run(t, false).fidelity
                 : ctx->run(t, false).fidelity;
    double v = max_velocity(t);
    double excess = v > v_limit ? (v - v_limit) / v_limit : 0.0;
    *pen = penalty_weight * excess * excess;
  }
};

}  // namespace

OptimResult optimize_seeded(double tau, double d, const LatticeParams& p,
                            const std::optional<ThermalConfig>& thermal,
                            const FeasibilityLimits& limits,
                            const OptimizerConfig& cfg, const Grid& g,
                            double dt, const std::vector<double>& seed_coeffs) {
  if (!(tau > 0.0)) throw ConfigError("optimize needs tau > 0");
  if (cfg.max_evals < 10) throw ConfigError("optimizer budget too small");
  if (cfg.restarts < 1) throw ConfigError("optimizer needs restarts >= 1");

  SearchProblem prob;
  prob.tau = tau;
  prob.d = d;
  prob.even_only = cfg.even_only;
  prob.penalty_weight = cfg.penalty_weight;
  prob.v_limit = slew_limit_recoil(limits, p);
  prob.j_max = cfg.j_max > 0 ? cfg.j_max : default_j_max(tau, limits, p);
  if (prob.j_max < 2) throw ConfigError("optimizer needs j_max >= 2");

  std::optional<TransportContext> ctx;
  std::optional<ThermalSet> search_set, final_set;
  if (thermal) {
    search_set.emplace(p, *thermal, g, d, dt, cfg.search_n_radii);
    final_set.emplace(p, *thermal, g, d, dt);
    prob.thermal = &*search_set;
    ctx.emplace(p, g, d, dt);  // detection basis for reporting
  } else {
    ctx.emplace(p, g, d, dt);
    prob.ctx = &*ctx;
  }

  // seed: provided coefficients, else jump-ansatz projection with a
  // linear-ramp fallback below the classical bound
  std::vector<double> z0;
  if (!seed_coeffs.empty()) {
    z0 = prob.pack(seed_coeffs);
  } else {
    Trajectory base = [&] {
      try {
        return Trajectory::classical_ansatz(d, tau, p);
      } catch (const InfeasibleError&) {
        return Trajectory::linear(d, tau);
      }
    }();
    z0 = prob.pack(project_to_fourier(base, prob.j_max));
  }

  OptimResult out;
  out.tau = tau;
  out.d = d;

  double g_best = -1e300;
  double f_best_seen = 0.0;
  SearchState st;
  st.max_evals = cfg.max_evals;
  st.f = [&](const std::vector<double>& z) {
    double F, pen;
    prob.measure(z, &F, &pen);
    double gval = F - pen;
    if (gval > g_best) {
      g_best = gval;
      f_best_seen = std::max(f_best_seen, F);
      out.trace.push_back(f_best_seen);
    }
    return -gval;
  };

  // carrier-only candidate: sometimes beats the ansatz at long tau
  {
    std::vector<double> zz(prob.dims(), 0.0);
    double ga = -st.eval(z0);
    double gz = -st.eval(zz);
    if (gz > ga) z0 = zz;
  }

  std::mt19937_64 rng(cfg.seed);
  std::vector<double> x_start = z0;
  for (int r = 0; r < cfg.restarts; ++r) {
    if (r > 0) {
      std::normal_distribution<double> jitter(0.0, 0.03);
      x_start = st.best_x;
      for (auto& v : x_start) v += jitter(rng);
    }
    int budget_share = cfg.max_evals * (r + 1) / cfg.restarts;
    int polish_at = budget_share - (budget_share - st.evals) * 2 / 5;
    st.max_evals = polish_at;
    bfgs_descend(st, x_start, 1e-4, cfg.tol);
    st.max_evals = budget_share;
    nelder_mead(st, st.best_x, 0.01, cfg.tol * 0.1);
  }
  st.max_evals = cfg.max_evals;

  out.evals = st.evals;
  out.budget_exhausted = st.exhausted;
  out.coeffs = prob.full_coeffs(st.best_x);
  Trajectory best_traj = Trajectory::fourier(d, tau, out.coeffs);
  out.feasible = feasibility_check(best_traj, limits, p).pass();
  if (thermal) {
    TransportResult fin = final_set->run(best_traj, true);
    out.fidelity = fin.fidelity;
    out.detection_fidelity = fin.detection_fidelity;
  } else {
    TransportResult fin = ctx->run(best_traj, true);
    out.fidelity = fin.fidelity;
    out.detection_fidelity = fin.detection_fidelity;
  }
  if (out.trace.empty()) out.trace.push_back(out.fidelity);
  return out;
}

OptimResult optimize(double tau, double d, const LatticeParams& p,
                     const std::optional<ThermalConfig>& thermal,
                     const FeasibilityLimits& limits,
                     const OptimizerConfig& cfg, const Grid& g, double dt) {
  return optimize_seeded(tau, d, p, thermal, limits, cfg, g, dt, {});
}

std::vector<OptimResult> warm_start_chain(
    const std::vector<double>& tau_list, double d, const LatticeParams& p,
    const std::optional<ThermalConfig>& thermal,
    const FeasibilityLimits& limits, const OptimizerConfig& cfg, const Grid& g,
    double dt) {
  if (tau_list.empty()) return {};
  for (size_t i = 1; i < tau_list.size(); ++i)
    if (!(tau_list[i] < tau_list[i - 1]))
      throw ConfigError("warm-start chain needs strictly decreasing durations");
  std::vector<OptimResult> out;
  out.reserve(tau_list.size());
  std::vector<double> seed;
  for (double tau : tau_list) {
    OptimResult r =
        optimize_seeded(tau, d, p, thermal, limits, cfg, g, dt, seed);
    seed = r.coeffs;
    out.push_back(std::move(r));
  }
  return out;
}

QslScan scan_qsl(const std::vector<double>& u0_list,
                 const std::vector<double>& tau_grid_over_tau_ho,
                 double threshold, double d,
                 const std::optional<ThermalConfig>& thermal,
                 const FeasibilityLimits& limits, const OptimizerConfig& cfg,
                 int n_sites, int workers, std::optional<double> e_rec_hz,
                 std::optional<double> lambda_nm) {
  if (u0_list.empty() || tau_grid_over_tau_ho.size() < 2)
    throw ConfigError("scan needs depths and a tau grid");
  std::vector<double> rel = tau_grid_over_tau_ho;
  std::sort(rel.begin(), rel.end(), std::greater<>());

  QslScan scan;
  scan.threshold = threshold;
  scan.rows.resize(u0_list.size());

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t idx = next.fetch_add(1);
      if (idx >= u0_list.size()) return;
      LatticeParams p(u0_list[idx], e_rec_hz, lambda_nm);
      double tho = p.tau_ho();
      double dt = tho / 512.0;
      QslRow row;
      row.u0 = p.u0;
      row.tau_over_tau_ho = rel;
      std::vector<double> seed;
      for (double r : rel) {
        Grid g = make_grid(n_sites, r < 0.55 ? 128 : 64);
        OptimResult res = optimize_seeded(r * tho, d, p, thermal, limits, cfg,
                                          g, dt, seed);
        seed = res.coeffs;
        row.fidelity.push_back(res.fidelity);
        row.detection_fidelity.push_back(res.detection_fidelity);
      }
      // detection crossing, scanning from long to short durations
      for (size_t i = 0; i + 1 < rel.size(); ++i) {
        double hi = row.detection_fidelity[i];
        double lo = row.detection_fidelity[i + 1];
        if (hi >= threshold && lo < threshold) {
          double w = (hi - threshold) / (hi - lo);
          row.transition_tau_over_tau_ho = rel[i] + w * (rel[i + 1] - rel[i]);
          row.crossed = true;
          break;
        }
      }
      // shortest duration with site-resolved F >= 0.99
      const double f99 = 0.99;
      if (row.fidelity.back() >= f99) {
        row.f99_tau_over_tau_ho = rel.back();
        row.reached_f99 = true;
      } else {
        for (size_t i = rel.size(); i-- > 1;) {
          double lo = row.fidelity[i];
          double hi = row.fidelity[i - 1];
          if (lo < f99 && hi >= f99) {
            double w = (f99 - lo) / (hi - lo);
            row.f99_tau_over_tau_ho = rel[i] + w * (rel[i - 1] - rel[i]);
            row.reached_f99 = true;
            break;
          }
        }
      }
      row.controlled_levels = conveyor::controlled_levels(p);
      row.bound_levels = conveyor::bound_levels(p);
      scan.rows[idx] = std::move(row);
    }
  };

  int nthreads = std::max(1, std::min<int>(workers, static_cast<int>(u0_list.size())));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nthreads - 1));
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return scan;
}

}  // namespace conveyor
