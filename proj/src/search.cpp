#include "conveyor/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace conveyor {

double SearchState::eval(const std::vector<double>& x) {
  if (evals >= max_evals) {
    exhausted = true;
    return best + 1.0;  // neutral bad value; callers stop on budget_left()
  }
  ++evals;
  double v = f(x);
  if (best_x.empty() || v < best) {
    best = v;
    best_x = x;
  }
  return v;
}

namespace {

std::vector<double> fd_gradient(SearchState& st, const std::vector<double>& x,
                                double fx, double h) {
  std::vector<double> g(x.size(), 0.0);
  std::vector<double> xp = x;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!st.budget_left()) break;
    xp[i] = x[i] + h;
    g[i] = (st.eval(xp) - fx) / h;
    xp[i] = x[i];
  }
  return g;
}

}  // namespace

void bfgs_descend(SearchState& st, std::vector<double> x0, double fd_step,
                  double tol) {
  const size_t n = x0.size();
  if (n == 0) {
    st.eval(x0);
    return;
  }
  std::vector<double> x = std::move(x0);
  double fx = st.eval(x);
  // inverse Hessian approximation, dense row-major identity
  std::vector<double> H(n * n, 0.0);
  for (size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
  std::vector<double> g = fd_gradient(st, x, fx, fd_step);

  int stall = 0;
  while (st.budget_left() && stall < 3) {
    // d = -H g
    std::vector<double> d(n, 0.0);
    for (size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (size_t j = 0; j < n; ++j) s += H[i * n + j] * g[j];
      d[i] = -s;
    }
    double slope = std::inner_product(g.begin(), g.end(), d.begin(), 0.0);
    if (slope >= 0.0) {
      // reset curvature if the direction degenerates
      std::fill(H.begin(), H.end(), 0.0);
      for (size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;
      for (size_t i = 0; i < n; ++i) d[i] = -g[i];
      slope = -std::inner_product(g.begin(), g.end(), g.begin(), 0.0);
      if (slope == 0.0) break;
    }

    double step = 1.0;
    double fn = fx;
    std::vector<double> xn = x;
    bool ok = false;
    for (int ls = 0; ls < 14 && st.budget_left(); ++ls) {
      for (size_t i = 0; i < n; ++i) xn[i] = x[i] + step * d[i];
      fn = st.eval(xn);
      if (fn <= fx + 1e-4 * step * slope) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;

    std::vector<double> gn = fd_gradient(st, xn, fn, fd_step);
    std::vector<double> s(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
    }
    double ys = std::inner_product(y.begin(), y.end(), s.begin(), 0.0);
    if (ys > 1e-12) {
      // H <- (I - s y^T / ys) H (I - y s^T / ys) + s s^T / ys
      std::vector<double> Hy(n, 0.0);
      for (size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (size_t j = 0; j < n; ++j) acc += H[i * n + j] * y[j];
        Hy[i] = acc;
      }
      double yHy = std::inner_product(y.begin(), y.end(), Hy.begin(), 0.0);
      for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
          H[i * n + j] += ((ys + yHy) * s[i] * s[j]) / (ys * ys) -
                          (Hy[i] * s[j] + s[i] * Hy[j]) / ys;
        }
    }
    double gain = fx - fn;
    x = std::move(xn);
    fx = fn;
    g = std::move(gn);
    stall = gain < tol ? stall + 1 : 0;
  }
}

void nelder_mead(SearchState& st, std::vector<double> x0, double spread,
                 double tol) {
  const size_t n = x0.size();
  if (n == 0) {
    st.eval(x0);
    return;
  }
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
  std::vector<std::vector<double>> pts(n + 1, x0);
  std::vector<double> fv(n + 1);
  fv[0] = st.eval(pts[0]);
  for (size_t i = 0; i < n; ++i) {
    pts[i + 1][i] += spread;
    fv[i + 1] = st.eval(pts[i + 1]);
  }
  std::vector<size_t> order(n + 1);

  while (st.budget_left()) {
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return fv[a] < fv[b]; });
    if (fv[order[n]] - fv[order[0]] < tol) break;

    std::vector<double> centroid(n, 0.0);
    for (size_t k = 0; k < n; ++k)
      for (size_t i = 0; i < n; ++i) centroid[i] += pts[order[k]][i];
    for (size_t i = 0; i < n; ++i) centroid[i] /= static_cast<double>(n);

    size_t worst = order[n];
    std::vector<double> xr(n);
    for (size_t i = 0; i < n; ++i)
      xr[i] = centroid[i] + alpha * (centroid[i] - pts[worst][i]);
    double fr = st.eval(xr);

    if (fr < fv[order[0]]) {
      std::vector<double> xe(n);
      for (size_t i = 0; i < n; ++i)
        xe[i] = centroid[i] + gamma * (centroid[i] - pts[worst][i]);
      double fe = st.eval(xe);
      if (fe < fr) {
        pts[worst] = std::move(xe);
        fv[worst] = fe;
      } else {
        pts[worst] = std::move(xr);
        fv[worst] = fr;
      }
    } else if (fr < fv[order[n - 1]]) {
      pts[worst] = std::move(xr);
      fv[worst] = fr;
    } else {
      std::vector<double> xc(n);
      for (size_t i = 0; i < n; ++i)
        xc[i] = centroid[i] + rho * (pts[worst][i] - centroid[i]);
      double fc = st.eval(xc);
      if (fc < fv[worst]) {
        pts[worst] = std::move(xc);
        fv[worst] = fc;
      } else {
        for (size_t k = 1; k <= n; ++k) {
          size_t idx = order[k];
          for (size_t i = 0; i < n; ++i)
            pts[idx][i] =
                pts[order[0]][i] + sigma * (pts[idx][i] - pts[order[0]][i]);
          fv[idx] = st.eval(pts[idx]);
          if (!st.budget_left()) break;
        }
      }
    }
  }
}

}  // namespace conveyor
