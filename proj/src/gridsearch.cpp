#include "mmx/gridsearch.hpp"

#include <cmath>

namespace mmx {
namespace {

bool beats(double v, double best) { return v > best + 1e-12 * (1.0 + std::abs(best)); }

}  // namespace

GridOptimum grid_maximize(const std::function<double(const Vec&)>& fn, const Domain& d, int resolution) {
  if (d.dim() > 2) throw Error(ErrorKind::unsupported, "grid search supports dim <= 2");
  if (!d.bounded()) throw Error(ErrorKind::unsupported, "grid search needs a bounded domain");
  if (resolution < 2) throw Error(ErrorKind::invalid_argument, "grid resolution must be >= 2");
  Vec lo, hi;
  d.bounds(lo, hi);
  GridOptimum out;
  const int N = resolution;

  if (d.dim() == 1) {
    auto at = [&](double y) {
      ++out.evaluations;
      return fn(scalar_vec(y));
    };
    const double a = lo[0], b = hi[0], h = (b - a) / (N - 1);
    int bi = 0;
    double bv = at(a);
    for (int i = 1; i < N; ++i) {
      double v = at(i == N - 1 ? b : a + h * i);
      if (beats(v, bv)) {
        bv = v;
        bi = i;
      }
    }
    double by = bi == N - 1 ? b : a + h * bi;
    if (h > 0) {
      double l = std::max(a, by - h), r = std::min(b, by + h);
      const double g = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = r - g * (r - l), e = l + g * (r - l);
      double fc = at(c), fe = at(e);
      for (int it = 0; it < 100 && r - l > 1e-15 * (1 + std::abs(l) + std::abs(r)); ++it) {
        if (fc >= fe) {
          r = e;
          e = c;
          fe = fc;
          c = r - g * (r - l);
          fc = at(c);
        } else {
          l = c;
          c = e;
          fc = fe;
          e = l + g * (r - l);
          fe = at(e);
        }
      }
      double ty = fc >= fe ? c : e, tv = std::max(fc, fe);
      if (tv > bv) {
        bv = tv;
        by = ty;
      }
    }
    out.point = scalar_vec(by);
    out.value = bv;
    return out;
  }

  auto at = [&](const Vec& p) {
    ++out.evaluations;
    return fn(p);
  };
  Vec h = (hi - lo) / (N - 1);
  Vec best = d.project(lo);
  double bv = at(best);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      Vec p(2);
      p << (i == N - 1 ? hi[0] : lo[0] + h[0] * i), (j == N - 1 ? hi[1] : lo[1] + h[1] * j);
      p = d.project(p);
      double v = at(p);
      if (beats(v, bv)) {
        bv = v;
        best = p;
      }
    }
  }
  for (int pass = 0; pass < 2; ++pass) {
    const int M = 21;
    Vec c = best;
    Vec step = 2.0 * h / (M - 1);
    for (int i = 0; i < M; ++i) {
      for (int j = 0; j < M; ++j) {
        Vec p(2);
        p << c[0] - h[0] + step[0] * i, c[1] - h[1] + step[1] * j;
        p = d.project(p);
        double v = at(p);
        if (v > bv) {
          bv = v;
          best = p;
        }
      }
    }
    h = step;
  }
  out.point = best;
  out.value = bv;
  return out;
}

GridOptimum grid_minimize(const std::function<double(const Vec&)>& fn, const Domain& d, int resolution) {
  GridOptimum r = grid_maximize([&](const Vec& p) { return -fn(p); }, d, resolution);
  r.value = -r.value;
  return r;
}

}  // namespace mmx
