#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mmx/geometry.hpp"

using namespace mmx;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace

TEST(Geometry, ProjectBoxClamps) {
  Domain b = Domain::box(v2(0, 0), v2(1, 1));
  Vec p = b.project(v2(2, -1));
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[1], 0.0);
}

TEST(Geometry, ProjectBallRescales) {
  Domain b = Domain::ball(v2(0, 0), 1.0);
  Vec p = b.project(v2(3, 4));
  EXPECT_NEAR(p[0], 0.6, 1e-15);
  EXPECT_NEAR(p[1], 0.8, 1e-15);
}

TEST(Geometry, ProjectIntervalInteriorFixed) {
  Domain i = Domain::interval(-2, 2);
  EXPECT_DOUBLE_EQ(i.project(scalar_vec(0.5))[0], 0.5);
  EXPECT_DOUBLE_EQ(i.project(scalar_vec(3.0))[0], 2.0);
}

TEST(Geometry, Diameters) {
  EXPECT_DOUBLE_EQ(Domain::interval(-1, 2).diameter(), 3.0);
  EXPECT_DOUBLE_EQ(Domain::ball(v2(5, 5), 0.25).diameter(), 0.5);
  EXPECT_DOUBLE_EQ(Domain::box(v2(0, 0), v2(3, 4)).diameter(), 5.0);
  EXPECT_TRUE(std::isinf(Domain::whole(3).diameter()));
  EXPECT_FALSE(Domain::whole(3).bounded());
}

TEST(Geometry, SoftThreshold) {
  EXPECT_DOUBLE_EQ(soft_threshold(3, 1), 2.0);
  EXPECT_DOUBLE_EQ(soft_threshold(-0.5, 1), 0.0);
  EXPECT_DOUBLE_EQ(soft_threshold(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(soft_threshold(-4, 1), -3.0);
  EXPECT_THROW(soft_threshold(1, -1), Error);
}

TEST(Geometry, ProjectionIsIdempotentAndNonExpansive) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const Domain doms[] = {Domain::interval(-1, 0.5), Domain::box(v2(-1, 0), v2(0.5, 2)), Domain::ball(v2(1, -1), 0.7)};
  for (const Domain& d : doms) {
    for (int i = 0; i < 500; ++i) {
      Vec a(d.dim()), b(d.dim());
      for (int j = 0; j < d.dim(); ++j) {
        a[j] = 3 * g(rng);
        b[j] = 3 * g(rng);
      }
      Vec pa = d.project(a), pb = d.project(b);
      EXPECT_TRUE(d.contains(pa, 1e-12));
      EXPECT_LE((d.project(pa) - pa).norm(), 1e-14);
      EXPECT_LE((pa - pb).norm(), (a - b).norm() + 1e-12);
      // variational inequality: <a - pa, z - pa> <= 0 for z in d
      Vec z = d.sample(rng);
      EXPECT_LE((a - pa).dot(z - pa), 1e-10);
    }
  }
}

TEST(Geometry, SamplesStayInside) {
  std::mt19937_64 rng(5);
  Domain b = Domain::ball(v2(0.5, 0), 2.0);
  for (int i = 0; i < 1000; ++i) EXPECT_TRUE(b.contains(b.sample(rng)));
  EXPECT_THROW(Domain::whole(2).sample(rng), Error);
}

TEST(Geometry, LinearArgmax) {
  Domain box = Domain::box(v2(-1, -2), v2(1, 2));
  Vec y = linear_argmax(box, v2(1, 0), Vec());
  EXPECT_DOUBLE_EQ(y[0], 1.0);
  EXPECT_DOUBLE_EQ(y[1], -2.0);  // zero component ties to the lower bound
  Domain ball = Domain::ball(v2(0, 0), 2.0);
  Vec z = linear_argmax(ball, v2(0, 3), Vec());
  EXPECT_NEAR(z[1], 2.0, 1e-15);
  Vec fb = v2(0.1, 0.2);
  EXPECT_EQ(linear_argmax(ball, v2(0, 0), fb), fb);
  EXPECT_THROW(linear_argmax(Domain::whole(2), v2(1, 1), fb), Error);
}

TEST(Geometry, ChebyshevCenter) {
  EXPECT_DOUBLE_EQ(Domain::interval(1, 3).chebyshev_center()[0], 2.0);
  EXPECT_DOUBLE_EQ(Domain::box(v2(0, 0), v2(2, 4)).chebyshev_center()[1], 2.0);
}

TEST(Geometry, InvalidDomainsRejected) {
  EXPECT_THROW(Domain::interval(1, 0), Error);
  EXPECT_THROW(Domain::ball(v2(0, 0), -1), Error);
}
