#include "mmx/problems.hpp"

#include <cmath>
#include <sstream>

namespace mmx {

const OrderConstants& SmoothnessProfile::order(int j) const {
  auto it = orders.find(j);
  if (it == orders.end()) {
    std::ostringstream os;
    os << "smoothness constants of order " << j << " are not declared";
    throw Error(ErrorKind::unsupported, os.str());
  }
  return it->second;
}

double SmoothnessProfile::rho1() const {
  if (rho_1) return *rho_1;
  return order(1).rho;
}

void SmoothnessProfile::validate() const {
  auto bad = [](double v) { return std::isnan(v) || v < 0; };
  if (!(lambda > 0) || !std::isfinite(lambda)) throw Error(ErrorKind::invalid_argument, "profile: lambda must be > 0");
  if (bad(mu) || !std::isfinite(mu)) throw Error(ErrorKind::invalid_argument, "profile: mu must be finite and >= 0");
  if (k < 0) throw Error(ErrorKind::invalid_argument, "profile: k must be >= 0");
  for (const auto& [j, c] : orders) {
    if (bad(c.rho) || bad(c.sigma) || bad(c.tau)) {
      std::ostringstream os;
      os << "profile: order " << j << " constants must be >= 0";
      throw Error(ErrorKind::invalid_argument, os.str());
    }
    if (bilinear && j >= 1) {
      double want_sigma = j == 1 ? mu : 0.0;
      if (c.tau != 0.0 || std::abs(c.sigma - want_sigma) > 1e-12 * (1 + mu)) {
        std::ostringstream os;
        os << "profile: bilinear coupling needs tau_" << j << " = 0 and sigma_" << j << " = mu*1{j=1}";
        throw Error(ErrorKind::invalid_argument, os.str());
      }
    }
  }
  if (sigma_0 && bad(*sigma_0)) throw Error(ErrorKind::invalid_argument, "profile: sigma_0 must be >= 0");
  if (rho_1 && bad(*rho_1)) throw Error(ErrorKind::invalid_argument, "profile: rho_1 must be >= 0");
}

const Domain& ProblemInstance::sampling_x() const {
  if (domain_x.bounded()) return domain_x;
  if (probe_x) return *probe_x;
  throw Error(ErrorKind::unsupported, "problem '" + name + "' has unbounded X and no probe box");
}

const ProfileCheck* ProfileReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

constexpr double kSlack = 1e-9;

Mat hessian_yy(const ProblemInstance& p, const Vec& x, const Vec& y) {
  const int d = p.dim_y();
  Mat H(d, d);
  for (int i = 0; i < d; ++i) H.col(i) = p.hess_yy_vec(x, y, Vec::Unit(d, i));
  return 0.5 * (H + H.transpose());
}

Mat cross_matrix(const ProblemInstance& p, const Vec& x, const Vec& y) {
  const int d = p.dim_y();
  Mat C(p.dim_x(), d);
  for (int i = 0; i < d; ++i) C.col(i) = p.cross_jvp(x, y, Vec::Unit(d, i));
  return C;
}

double op_norm(const Mat& M) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues()(0);
}

// Tracks max of lhs / rhs with a violation flag for lhs > rhs + slack.
struct Tracker {
  ProfileCheck c;
  explicit Tracker(std::string name, double declared) {
    c.name = std::move(name);
    c.declared = declared;
  }
  void add(double lhs, double rhs, const Vec& x1, const Vec& y1, const Vec& x2, const Vec& y2) {
    if (rhs > 0) c.max_ratio = std::max(c.max_ratio, lhs / rhs);
    else if (lhs > 0) c.max_ratio = kInf;
    if (lhs > rhs + kSlack && !c.violated) {
      c.violated = true;
      c.x1 = x1;
      c.y1 = y1;
      c.x2 = x2;
      c.y2 = y2;
    }
  }
};

}  // namespace

ProfileReport check_profile_by_sampling(const ProblemInstance& p, int n_samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Domain& X = p.sampling_x();
  const Domain& Y = p.domain_y;
  const SmoothnessProfile& prof = p.profile;

  Tracker a1("A1", prof.lambda), a1x("A1.lambda", prof.lambda), a1y("A1.mu", prof.mu);
  std::vector<std::pair<int, Tracker>> a2, a3;
  for (const auto& [j, c] : prof.orders) {
    bool have = (j == 0) || (j == 1) || (j == 2 && p.hess_yy_vec) || (j >= 3 && p.dy);
    if (have && std::isfinite(c.rho) && std::isfinite(c.sigma))
      a2.emplace_back(j, Tracker("A2." + std::to_string(j), c.rho));
    bool have3 = (j == 1 && p.cross_jvp) || (j >= 2 && p.dxdy && p.dim_x() == 1 && p.dim_y() == 1);
    if (have3 && std::isfinite(c.tau)) a3.emplace_back(j, Tracker("A3." + std::to_string(j), c.tau));
  }
  std::optional<Tracker> s0;
  if (prof.sigma_0) s0.emplace("sigma_0", *prof.sigma_0);

  for (int n = 0; n < n_samples; ++n) {
    Vec x1 = X.sample(rng), x2 = X.sample(rng);
    Vec y1 = Y.sample(rng), y2 = Y.sample(rng);
    const double dx = (x2 - x1).norm(), dy = (y2 - y1).norm();

    Vec gx11 = p.grad_x(x1, y1);
    a1.add((p.grad_x(x2, y2) - gx11).norm(), prof.lambda * dx + prof.mu * dy, x1, y1, x2, y2);
    a1x.add((p.grad_x(x2, y1) - gx11).norm(), prof.lambda * dx, x1, y1, x2, y1);
    a1y.add((p.grad_x(x1, y2) - gx11).norm(), prof.mu * dy, x1, y1, x1, y2);

    for (auto& [j, t] : a2) {
      const OrderConstants& c = prof.order(j);
      double lhs = 0;
      if (j == 0) lhs = std::abs(p.value(x2, y2) - p.value(x1, y1));
      else if (j == 1) lhs = (p.grad_y(x2, y2) - p.grad_y(x1, y1)).norm();
      else if (j == 2) lhs = op_norm(hessian_yy(p, x2, y2) - hessian_yy(p, x1, y1));
      else lhs = std::abs(p.dy(x2[0], y2[0], j) - p.dy(x1[0], y1[0], j));
      t.add(lhs, c.rho * dy + c.sigma * dx, x1, y1, x2, y2);
    }
    for (auto& [j, t] : a3) {
      const OrderConstants& c = prof.order(j);
      double lhs = 0;
      if (j == 1) lhs = op_norm(cross_matrix(p, x2, y1) - cross_matrix(p, x1, y1));
      else lhs = std::abs(p.dxdy(x2[0], y1[0], j) - p.dxdy(x1[0], y1[0], j));
      t.add(lhs, c.tau * dx, x1, y1, x2, y1);
    }
    if (s0) s0->add(std::abs(p.value(x2, y1) - p.value(x1, y1)), *prof.sigma_0 * dx, x1, y1, x2, y1);
  }

  ProfileReport r;
  auto push = [&r](const Tracker& t) {
    r.checks.push_back(t.c);
    if (t.c.violated) r.ok = false;
  };
  push(a1);
  push(a1x);
  push(a1y);
  for (auto& [j, t] : a2) push(t);
  for (auto& [j, t] : a3) push(t);
  if (s0) push(*s0);
  return r;
}

FdReport check_oracles_fd(const ProblemInstance& p, int n_points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  const Domain& X = p.sampling_x();
  const int nx = p.dim_x(), ny = p.dim_y();
  auto scaled = [](const Vec& a, const Vec& b) { return (a - b).norm() / std::max(1.0, b.norm()); };
  auto unit = [&](int d) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = gauss(rng);
    return Vec(v / v.norm());
  };

  FdReport r;
  for (int n = 0; n < n_points; ++n) {
    Vec x = X.sample(rng), y = p.domain_y.sample(rng);
    {
      const double h = 1e-5 * std::max(1.0, x.norm());
      Vec fd(nx);
      for (int i = 0; i < nx; ++i) {
        Vec e = Vec::Unit(nx, i) * h;
        fd[i] = (p.value(x + e, y) - p.value(x - e, y)) / (2 * h);
      }
      r.grad_x = std::max(r.grad_x, scaled(p.grad_x(x, y), fd));
    }
    const double h = 1e-5 * std::max(1.0, y.norm());
    {
      Vec fd(ny);
      for (int i = 0; i < ny; ++i) {
        Vec e = Vec::Unit(ny, i) * h;
        fd[i] = (p.value(x, y + e) - p.value(x, y - e)) / (2 * h);
      }
      r.grad_y = std::max(r.grad_y, scaled(p.grad_y(x, y), fd));
    }
    Vec v = unit(ny);
    if (p.hess_yy_vec) {
      Vec fd = (p.grad_y(x, y + h * v) - p.grad_y(x, y - h * v)) / (2 * h);
      r.hess_yy = std::max(r.hess_yy, scaled(p.hess_yy_vec(x, y, v), fd));
    }
    if (p.cross_jvp) {
      Vec fd = (p.grad_x(x, y + h * v) - p.grad_x(x, y - h * v)) / (2 * h);
      r.cross = std::max(r.cross, scaled(p.cross_jvp(x, y, v), fd));
    }
    if (p.cross3_jvp && p.cross_jvp) {
      Vec fd = (p.cross_jvp(x, y + h * v, v) - p.cross_jvp(x, y - h * v, v)) / (2 * h);
      r.cross3 = std::max(r.cross3, scaled(p.cross3_jvp(x, y, v), fd));
    }
  }
  return r;
}

double check_bilinear_coupling(const ProblemInstance& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Domain& X = p.sampling_x();
  Vec y1 = p.domain_y.sample(rng), y2 = p.domain_y.sample(rng);
  Vec base;
  double dev = 0;
  for (int i = 0; i < 3; ++i) {
    Vec x = X.sample(rng);
    Vec d = p.grad_x(x, y1) - p.grad_x(x, y2);
    if (i == 0) base = d;
    else dev = std::max(dev, (d - base).norm());
  }
  return dev;
}

}  // namespace mmx
