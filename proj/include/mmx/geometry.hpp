#pragma once

#include <random>
#include <variant>

#include "mmx/types.hpp"

namespace mmx {

struct Interval {
  double lo, hi;
};
struct Box {
  Vec lo, hi;
};
struct Ball {
  Vec center;
  double radius;
};
struct WholeSpace {
  int dim;
};

// Closed Euclidean domain. Points are always Vec, intervals use size-1 vectors.
class Domain {
 public:
  using Shape = std::variant<Interval, Box, Ball, WholeSpace>;

  static Domain interval(double lo, double hi);
  static Domain box(Vec lo, Vec hi);
  static Domain ball(Vec center, double radius);
  static Domain whole(int dim);

  const Shape& shape() const { return shape_; }
  int dim() const;
  double diameter() const;
  bool bounded() const;
  bool contains(const Vec& y, double tol = 1e-12) const;
  Vec project(const Vec& y) const;
  Vec chebyshev_center() const;

  // Axis-aligned bounding box; throws for WholeSpace.
  void bounds(Vec& lo, Vec& hi) const;

  // Uniform sample (uniform in the box / ball volume). Throws if unbounded.
  Vec sample(std::mt19937_64& rng) const;

  bool is_ball() const { return std::holds_alternative<Ball>(shape_); }

 private:
  explicit Domain(Shape s) : shape_(std::move(s)) {}
  Shape shape_;
};

inline Vec project(const Domain& d, const Vec& y) { return d.project(y); }

// A maximizer of <c, y> over d. Zero components pick the lower bound on
// boxes (lexicographically smallest vertex); c = 0 on a ball returns
// `ball_fallback`.
Vec linear_argmax(const Domain& d, const Vec& c, const Vec& ball_fallback);

// [z]_r = (max{|z|, r} - r) sign(z)
double soft_threshold(double z, double r);

}  // namespace mmx
