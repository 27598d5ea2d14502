#pragma once

// Derivative-free minimisation for small, fixed-dimension problems whose
// objective may return +infinity on an infeasible region: a Nelder-Mead
// simplex search and a BFGS polish driven by finite-difference gradients.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

namespace kappa4::optimize {

template <std::size_t N>
using Point = std::array<double, N>;

template <std::size_t N>
struct Minimum {
  Point<N> x{};
  double f = std::numeric_limits<double>::infinity();
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

struct SimplexOptions {
  double f_rel_tol = 1e-10;
  double x_tol = 1e-8;
  int max_iterations = 2000;
};

template <std::size_t N, class Fn>
Minimum<N> nelder_mead(Fn&& f, const Point<N>& x0, const Point<N>& step, const SimplexOptions& opt = {}) {
  constexpr double kReflect = 1.0, kExpand = 2.0, kContract = 0.5, kShrink = 0.5;
  std::array<Point<N>, N + 1> v{};
  std::array<double, N + 1> fv{};
  Minimum<N> out;
  auto eval = [&](const Point<N>& x) {
    ++out.evaluations;
    const double y = f(x);
    return std::isnan(y) ? std::numeric_limits<double>::infinity() : y;
  };
  v[0] = x0;
  fv[0] = eval(x0);
  for (std::size_t i = 0; i < N; ++i) {
    v[i + 1] = x0;
    v[i + 1][i] += step[i];
    fv[i + 1] = eval(v[i + 1]);
  }
  std::array<std::size_t, N + 1> order{};
  auto sort_vertices = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    auto v2 = v;
    auto f2 = fv;
    for (std::size_t i = 0; i <= N; ++i) {
      v[i] = v2[order[i]];
      fv[i] = f2[order[i]];
    }
  };
  auto towards = [](const Point<N>& from, const Point<N>& to, double t) {
    Point<N> p{};
    for (std::size_t i = 0; i < N; ++i) p[i] = from[i] + t * (to[i] - from[i]);
    return p;
  };

  for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
    sort_vertices();
    if (std::isfinite(fv[N])) {
      const double f_spread = fv[N] - fv[0];
      double x_spread = 0.0;
      for (std::size_t j = 1; j <= N; ++j) {
        for (std::size_t i = 0; i < N; ++i) {
          x_spread = std::max(x_spread, std::fabs(v[j][i] - v[0][i]) / std::max(1.0, std::fabs(v[0][i])));
        }
      }
      if (f_spread <= opt.f_rel_tol * std::max(1.0, std::fabs(fv[0])) && x_spread <= opt.x_tol) {
        out.converged = true;
        break;
      }
    }
    Point<N> centroid{};
    for (std::size_t j = 0; j < N; ++j) {
      for (std::size_t i = 0; i < N; ++i) centroid[i] += v[j][i] / static_cast<double>(N);
    }
    const Point<N> xr = towards(centroid, v[N], -kReflect);
    const double fr = eval(xr);
    if (fr < fv[0]) {
      const Point<N> xe = towards(centroid, v[N], -kExpand);
      const double fe = eval(xe);
      if (fe < fr) {
        v[N] = xe;
        fv[N] = fe;
      } else {
        v[N] = xr;
        fv[N] = fr;
      }
      continue;
    }
    if (fr < fv[N - 1]) {
      v[N] = xr;
      fv[N] = fr;
      continue;
    }
    const bool outside = fr < fv[N];
    const Point<N> xc = outside ? towards(centroid, xr, kContract) : towards(centroid, v[N], kContract);
    const double fc = eval(xc);
    if (fc < (outside ? fr : fv[N])) {
      v[N] = xc;
      fv[N] = fc;
      continue;
    }
    for (std::size_t j = 1; j <= N; ++j) {
      v[j] = towards(v[0], v[j], kShrink);
      fv[j] = eval(v[j]);
    }
  }
  sort_vertices();
  out.x = v[0];
  out.f = fv[0];
  return out;
}

struct QuasiNewtonOptions {
  double grad_tol = 1e-7;
  int max_iterations = 200;
};

namespace detail {

// Central differences, one-sided when a neighbour is infeasible.
template <std::size_t N, class Fn>
bool fd_gradient(Fn& f, const Point<N>& x, double fx, Point<N>& g, int& evals) {
  for (std::size_t i = 0; i < N; ++i) {
    const double hstep = 1e-6 * std::max(1.0, std::fabs(x[i]));
    Point<N> xp = x, xm = x;
    xp[i] += hstep;
    xm[i] -= hstep;
    const double fp = f(xp), fm = f(xm);
    evals += 2;
    const bool okp = std::isfinite(fp), okm = std::isfinite(fm);
    if (okp && okm) {
      g[i] = (fp - fm) / (2.0 * hstep);
    } else if (okp) {
      g[i] = (fp - fx) / hstep;
    } else if (okm) {
      g[i] = (fx - fm) / hstep;
    } else {
      return false;
    }
  }
  return true;
}

}  // namespace detail

// BFGS with a backtracking line search. Only ever moves downhill, so the
// returned value is never worse than f(x0).
template <std::size_t N, class Fn>
Minimum<N> quasi_newton(Fn&& f, const Point<N>& x0, const QuasiNewtonOptions& opt = {}) {
  Minimum<N> out;
  Point<N> x = x0;
  double fx = f(x);
  ++out.evaluations;
  out.x = x;
  out.f = fx;
  if (!std::isfinite(fx)) return out;
  std::array<Point<N>, N> hinv{};
  for (std::size_t i = 0; i < N; ++i) hinv[i][i] = 1.0;
  Point<N> g{};
  if (!detail::fd_gradient<N>(f, x, fx, g, out.evaluations)) return out;
  for (out.iterations = 0; out.iterations < opt.max_iterations; ++out.iterations) {
    double gnorm = 0.0;
    for (double gi : g) gnorm = std::max(gnorm, std::fabs(gi));
    if (gnorm <= opt.grad_tol * std::max(1.0, std::fabs(fx))) {
      out.converged = true;
      break;
    }
    Point<N> d{};
    double slope = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < N; ++j) d[i] -= hinv[i][j] * g[j];
      slope += d[i] * g[i];
    }
    if (!(slope < 0.0)) {
      // Not a descent direction: reset to steepest descent.
      for (std::size_t i = 0; i < N; ++i) {
        hinv[i].fill(0.0);
        hinv[i][i] = 1.0;
        d[i] = -g[i];
      }
      slope = 0.0;
      for (std::size_t i = 0; i < N; ++i) slope += d[i] * g[i];
    }
    double t = 1.0;
    Point<N> xn{};
    double fn = std::numeric_limits<double>::infinity();
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls, t *= 0.5) {
      for (std::size_t i = 0; i < N; ++i) xn[i] = x[i] + t * d[i];
      fn = f(xn);
      ++out.evaluations;
      if (std::isfinite(fn) && fn <= fx + 1e-4 * t * slope) {
        moved = true;
        break;
      }
    }
    if (!moved || !(fn < fx)) break;
    Point<N> gn{};
    if (!detail::fd_gradient<N>(f, xn, fn, gn, out.evaluations)) {
      x = xn;
      fx = fn;
      break;
    }
    Point<N> s{}, y{};
    double sy = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      s[i] = xn[i] - x[i];
      y[i] = gn[i] - g[i];
      sy += s[i] * y[i];
    }
    if (sy > 1e-12) {
      Point<N> hy{};
      double yhy = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) hy[i] += hinv[i][j] * y[j];
        yhy += y[i] * hy[i];
      }
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < N; ++i) {
        for (std::size_t j = 0; j < N; ++j) {
          hinv[i][j] += rho * ((1.0 + rho * yhy) * s[i] * s[j] - hy[i] * s[j] - s[i] * hy[j]);
        }
      }
    }
    x = xn;
    fx = fn;
    g = gn;
  }
  out.x = x;
  out.f = fx;
  return out;
}

}  // namespace kappa4::optimize
