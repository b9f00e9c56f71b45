#include "fieldlab/volume_grid.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "fieldlab/quadrature.hpp"

namespace fieldlab {

std::shared_ptr<const CylinderGrid> cylinder_grid(const SupportRegion& region, int n_r, int n_phi,
                                                  int n_z) {
  using Key = std::tuple<double, double, double, int, int, int>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const CylinderGrid>> cache;
  const double r0 = region.r_lo(), r1 = region.r_hi(), zh = region.z_half();
  const Key key{r0, r1, zh, n_r, n_phi, n_z};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  auto grid = std::make_shared<CylinderGrid>();
  const auto gr = gauss_legendre(n_r);
  const auto gz = gauss_legendre(n_z);
  const double rm = 0.5 * (r0 + r1), rh = 0.5 * (r1 - r0);
  const double dphi = 2 * kPi / n_phi;
  grid->x.reserve(static_cast<std::size_t>(n_r) * n_phi * n_z);
  grid->w.reserve(grid->x.capacity());
  for (int i = 0; i < n_r; ++i) {
    const double r = rm + rh * gr->nodes[i];
    const double wr = rh * gr->weights[i] * r;
    for (int k = 0; k < n_phi; ++k) {
      const double phi = (k + 0.5) * dphi;
      const double c = std::cos(phi), s = std::sin(phi);
      for (int j = 0; j < n_z; ++j) {
        grid->x.push_back({r * c, r * s, zh * gz->nodes[j]});
        grid->w.push_back(wr * dphi * zh * gz->weights[j]);
      }
    }
  }

  std::lock_guard lock(mu);
  auto [it, inserted] = cache.emplace(key, std::move(grid));
  return it->second;
}

std::shared_ptr<const DirectionSet> direction_set(int n_theta, int n_phi) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const DirectionSet>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{n_theta, n_phi}];
  if (slot) return slot;
  auto d = std::make_shared<DirectionSet>();
  const auto g = gauss_legendre(n_theta);
  const double dphi = 2 * kPi / n_phi;
  for (int i = 0; i < n_theta; ++i) {
    const double ct = g->nodes[i], st = std::sqrt(std::max(0.0, 1 - ct * ct));
    for (int k = 0; k < n_phi; ++k) {
      const double phi = (k + 0.5) * dphi;
      d->n.push_back({st * std::cos(phi), st * std::sin(phi), ct});
      d->w.push_back(g->weights[i] * dphi);
    }
  }
  slot = std::move(d);
  return slot;
}

}  // namespace fieldlab
