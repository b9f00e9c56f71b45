#include "fieldlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fieldlab/units.hpp"

namespace fieldlab {

namespace {

GaussRule build_rule(int n) {
  GaussRule g;
  g.nodes.resize(n);
  g.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1, p2 = 0;
      for (int j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j - 1) * z * p2 - (j - 1.0) * p3) / j;
      }
      pp = n * (z * p1 - p2) / (z * z - 1);
      const double dz = p1 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    g.nodes[i] = -z;
    g.nodes[n - 1 - i] = z;
    g.weights[i] = g.weights[n - 1 - i] = 2 / ((1 - z * z) * pp * pp);
  }
  if (n % 2 == 1) g.nodes[n / 2] = 0.0;
  return g;
}

}  // namespace

std::shared_ptr<const GaussRule> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs n >= 1");
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const GaussRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const GaussRule>(build_rule(n));
  return slot;
}

}  // namespace fieldlab
