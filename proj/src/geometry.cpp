#include "mmx/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mmx {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dim(const Domain& d, const Vec& y) {
  if (y.size() != d.dim()) {
    std::ostringstream os;
    os << "dimension mismatch: point has " << y.size() << " coordinates, domain has " << d.dim();
    throw Error(ErrorKind::dimension, os.str());
  }
}

}  // namespace

Domain Domain::interval(double lo, double hi) {
  if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw Error(ErrorKind::invalid_argument, "interval needs finite lo <= hi");
  return Domain(Interval{lo, hi});
}

Domain Domain::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.size() == 0)
    throw Error(ErrorKind::dimension, "box bounds must have equal, nonzero size");
  for (Eigen::Index i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i]) || !std::isfinite(lo[i]) || !std::isfinite(hi[i]))
      throw Error(ErrorKind::invalid_argument, "box needs finite lo <= hi componentwise");
  return Domain(Box{std::move(lo), std::move(hi)});
}

Domain Domain::ball(Vec center, double radius) {
  if (!(radius >= 0) || !std::isfinite(radius))
    throw Error(ErrorKind::invalid_argument, "ball radius must be finite and >= 0");
  if (center.size() == 0) throw Error(ErrorKind::dimension, "ball center is empty");
  return Domain(Ball{std::move(center), radius});
}

Domain Domain::whole(int dim) {
  if (dim <= 0) throw Error(ErrorKind::dimension, "whole space needs dim >= 1");
  return Domain(WholeSpace{dim});
}

int Domain::dim() const {
  return std::visit(overloaded{
                        [](const Interval&) { return 1; },
                        [](const Box& b) { return static_cast<int>(b.lo.size()); },
                        [](const Ball& b) { return static_cast<int>(b.center.size()); },
                        [](const WholeSpace& w) { return w.dim; },
                    },
                    shape_);
}

double Domain::diameter() const {
  return std::visit(overloaded{
                        [](const Interval& i) { return i.hi - i.lo; },
                        [](const Box& b) { return (b.hi - b.lo).norm(); },
                        [](const Ball& b) { return 2.0 * b.radius; },
                        [](const WholeSpace&) { return std::numeric_limits<double>::infinity(); },
                    },
                    shape_);
}

bool Domain::bounded() const { return !std::holds_alternative<WholeSpace>(shape_); }

bool Domain::contains(const Vec& y, double tol) const {
  check_dim(*this, y);
  return std::visit(overloaded{
                        [&](const Interval& i) { return y[0] >= i.lo - tol && y[0] <= i.hi + tol; },
                        [&](const Box& b) {
                          return ((y - b.lo).array() >= -tol).all() && ((b.hi - y).array() >= -tol).all();
                        },
                        [&](const Ball& b) { return (y - b.center).norm() <= b.radius + tol; },
                        [](const WholeSpace&) { return true; },
                    },
                    shape_);
}

Vec Domain::project(const Vec& y) const {
  check_dim(*this, y);
  return std::visit(overloaded{
                        [&](const Interval& i) { return scalar_vec(std::clamp(y[0], i.lo, i.hi)); },
                        [&](const Box& b) -> Vec { return y.cwiseMax(b.lo).cwiseMin(b.hi); },
                        [&](const Ball& b) -> Vec {
                          Vec d = y - b.center;
                          double n = d.norm();
                          if (n <= b.radius) return y;
                          return b.center + (b.radius / n) * d;
                        },
                        [&](const WholeSpace&) -> Vec { return y; },
                    },
                    shape_);
}

Vec Domain::chebyshev_center() const {
  return std::visit(overloaded{
                        [](const Interval& i) { return scalar_vec(0.5 * (i.lo + i.hi)); },
                        [](const Box& b) -> Vec { return 0.5 * (b.lo + b.hi); },
                        [](const Ball& b) -> Vec { return b.center; },
                        [](const WholeSpace& w) -> Vec { return Vec::Zero(w.dim); },
                    },
                    shape_);
}

void Domain::bounds(Vec& lo, Vec& hi) const {
  std::visit(overloaded{
                 [&](const Interval& i) {
                   lo = scalar_vec(i.lo);
                   hi = scalar_vec(i.hi);
                 },
                 [&](const Box& b) {
                   lo = b.lo;
                   hi = b.hi;
                 },
                 [&](const Ball& b) {
                   lo = b.center.array() - b.radius;
                   hi = b.center.array() + b.radius;
                 },
                 [&](const WholeSpace&) {
                   throw Error(ErrorKind::unsupported, "whole space has no bounding box");
                 },
             },
             shape_);
}

Vec Domain::sample(std::mt19937_64& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::visit(overloaded{
                        [&](const Interval& i) { return scalar_vec(i.lo + (i.hi - i.lo) * unif(rng)); },
                        [&](const Box& b) -> Vec {
                          Vec y(b.lo.size());
                          for (Eigen::Index j = 0; j < y.size(); ++j) y[j] = b.lo[j] + (b.hi[j] - b.lo[j]) * unif(rng);
                          return y;
                        },
                        [&](const Ball& b) -> Vec {
                          std::normal_distribution<double> gauss;
                          const Eigen::Index d = b.center.size();
                          Vec dir(d);
                          double n = 0;
                          while (n == 0) {
                            for (Eigen::Index j = 0; j < d; ++j) dir[j] = gauss(rng);
                            n = dir.norm();
                          }
                          double rad = b.radius * std::pow(unif(rng), 1.0 / static_cast<double>(d));
                          return b.center + (rad / n) * dir;
                        },
                        [&](const WholeSpace&) -> Vec {
                          throw Error(ErrorKind::unsupported, "cannot sample the whole space; supply a probe box");
                        },
                    },
                    shape_);
}

Vec linear_argmax(const Domain& d, const Vec& c, const Vec& ball_fallback) {
  check_dim(d, c);
  return std::visit(overloaded{
                        [&](const Interval& i) { return scalar_vec(c[0] > 0 ? i.hi : i.lo); },
                        [&](const Box& b) -> Vec {
                          Vec y = b.lo;
                          for (Eigen::Index j = 0; j < y.size(); ++j)
                            if (c[j] > 0) y[j] = b.hi[j];
                          return y;
                        },
                        [&](const Ball& b) -> Vec {
                          double n = c.norm();
                          if (n == 0) return ball_fallback;
                          return b.center + (b.radius / n) * c;
                        },
                        [&](const WholeSpace&) -> Vec {
                          throw Error(ErrorKind::unsupported, "linear maximization over the whole space");
                        },
                    },
                    d.shape());
}

double soft_threshold(double z, double r) {
  if (r < 0) throw Error(ErrorKind::invalid_argument, "soft_threshold needs r >= 0");
  double m = std::max(std::abs(z), r) - r;
  return z > 0 ? m : (z < 0 ? -m : 0.0);
}

}  // namespace mmx
