#include "conemcf/selfsimilar.hpp"

namespace conemcf {

double SelfSimilarSolution::eval(double r, double t) const {
  if (!(r >= 0)) throw OutOfRange("selfsimilar eval: r must be >= 0");
  const double R = radius(t);
  if (!(R > 0)) throw OutOfRange("selfsimilar eval: degenerate radius");
  const double z = r / R;
  if (z > profile.z_max() + 1e-12)
    throw OutOfRange("selfsimilar eval: r/R beyond the stored profile range");
  return R * profile.phi(std::min(z, profile.z_max()));
}

double SelfSimilarSolution::slope_r(double r, double t) const {
  const double R = radius(t);
  const double z = r / R;
  if (z > profile.z_max() + 1e-12)
    throw OutOfRange("selfsimilar slope: r/R beyond the stored profile range");
  return profile.phi_p(std::min(z, profile.z_max()));
}

double SelfSimilarSolution::dt(double r, double t) const {
  const double R = radius(t);
  const double z = r / R;
  if (z > profile.z_max() + 1e-12)
    throw OutOfRange("selfsimilar dt: r/R beyond the stored profile range");
  const double zc = std::min(z, profile.z_max());
  return profile.P / R * (profile.phi(zc) - zc * profile.phi_p(zc));
}

double SelfSimilarSolution::eval_extended(double r, double t) const {
  const double R = radius(t);
  const double z = r / R;
  const double zm = profile.z_max();
  if (z <= zm) return R * profile.phi(z);
  return R * (profile.phi(zm) + (z - zm) * profile.phi_p(zm));
}

OrderedGraph SelfSimilarSolution::graph(double t, int m) const {
  const double R = radius(t);
  OrderedGraph g;
  g.r.reserve(m + 1);
  g.w.reserve(m + 1);
  g.wp.reserve(m + 1);
  for (int i = 0; i <= m; ++i) {
    const double z = static_cast<double>(i) / m;
    g.r.push_back(z * R);
    g.w.push_back(R * profile.phi(z));
    g.wp.push_back(profile.phi_p(z));
  }
  // Land exactly on the contact line.
  g.w.back() = R;
  return g;
}

}  // namespace conemcf
