#include "fieldlab/sources.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fieldlab {

namespace {

double bump(double s) {
  if (std::abs(s) >= 1) return 0.0;
  const double q = 1 - s * s;
  return q * q * q * q;
}

double bump_slope(double s) {
  if (std::abs(s) >= 1) return 0.0;
  const double q = 1 - s * s;
  return -8 * s * q * q * q;
}

double gaussian_norm(double sigma) { return std::pow(2 * kPi * sigma * sigma, -1.5); }

}  // namespace

double gaussian_cutoff_sigmas() {
  static const double k = std::sqrt(2 * std::log(1e12));
  return k;
}

std::optional<HarmonicInfo> ZeroSource::harmonic() const {
  return HarmonicInfo{0.0, 0, true, -std::numeric_limits<double>::infinity()};
}

// ---------------------------------------------------------------------------

StaticChargeBlob::StaticChargeBlob(double total_charge, double sigma)
    : q_(total_charge), sigma_(sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("blob width must be positive");
}

double StaticChargeBlob::density(const Vec3& x) const {
  const double r2 = dot(x, x);
  const double cut = gaussian_cutoff_sigmas() * sigma_;
  if (r2 > cut * cut) return 0.0;
  return q_ * gaussian_norm(sigma_) * std::exp(-r2 / (2 * sigma_ * sigma_));
}

double StaticChargeBlob::charge(const SpacetimePoint& p) const { return density(p.x); }

SupportRegion StaticChargeBlob::support() const {
  return SupportRegion::ball(gaussian_cutoff_sigmas() * sigma_);
}

std::optional<HarmonicInfo> StaticChargeBlob::harmonic() const {
  return HarmonicInfo{0.0, 0, true, -std::numeric_limits<double>::infinity()};
}

cplx StaticChargeBlob::charge_amplitude(const Vec3& x) const { return density(x); }

double StaticChargeBlob::peak_charge() const { return std::abs(q_) * gaussian_norm(sigma_); }

// ---------------------------------------------------------------------------

HertzianDipoleSource::HertzianDipoleSource(double p0, double omega, double sigma, double tau_on,
                                           double start)
    : p0_(p0), omega_(omega), sigma_(sigma), tau_(tau_on), start_(start) {
  if (!(omega > 0)) throw std::invalid_argument("dipole frequency must be positive");
  if (!(sigma > 0)) throw std::invalid_argument("dipole width must be positive");
  if (start < 0) throw std::invalid_argument("dipole start time must be >= 0");
  if (tau_ < 0) tau_ = 2 * kPi / omega;
  if (tau_ == 0) throw std::invalid_argument("dipole switch-on duration must be positive");
}

double HertzianDipoleSource::envelope(const Vec3& x) const {
  const double r2 = dot(x, x);
  const double cut = gaussian_cutoff_sigmas() * sigma_;
  if (r2 > cut * cut) return 0.0;
  return gaussian_norm(sigma_) * std::exp(-r2 / (2 * sigma_ * sigma_));
}

double HertzianDipoleSource::moment_at(double t) const {
  const double s = t - start_;
  if (s <= 0) return 0.0;
  return p0_ * ramp(s, tau_) * std::sin(omega_ * s);
}

double HertzianDipoleSource::moment_rate(double t) const {
  const double s = t - start_;
  if (s <= 0) return 0.0;
  return p0_ * (ramp_rate(s, tau_) * std::sin(omega_ * s) +
                ramp(s, tau_) * omega_ * std::cos(omega_ * s));
}

cplx HertzianDipoleSource::moment_amplitude() const {
  return cplx(0, p0_) * std::exp(cplx(0, omega_ * start_));
}

Vec3 HertzianDipoleSource::current(const SpacetimePoint& p) const {
  return {0, 0, moment_rate(p.t) * envelope(p.x)};
}

double HertzianDipoleSource::charge(const SpacetimePoint& p) const {
  return moment_at(p.t) * p.x.z / (sigma_ * sigma_) * envelope(p.x);
}

Vec3 HertzianDipoleSource::analytic_curl_current(const SpacetimePoint& p) const {
  const double f = moment_rate(p.t) * envelope(p.x) / (sigma_ * sigma_);
  return {-p.x.y * f, p.x.x * f, 0};
}

SupportRegion HertzianDipoleSource::support() const {
  return SupportRegion::ball(gaussian_cutoff_sigmas() * sigma_);
}

std::optional<HarmonicInfo> HertzianDipoleSource::harmonic() const {
  return HarmonicInfo{omega_, 0, true, start_ + tau_};
}

CVec3 HertzianDipoleSource::current_amplitude(const Vec3& x) const {
  return {0, 0, cplx(0, -omega_) * moment_amplitude() * envelope(x)};
}

cplx HertzianDipoleSource::charge_amplitude(const Vec3& x) const {
  return moment_amplitude() * (x.z / (sigma_ * sigma_) * envelope(x));
}

CVec3 HertzianDipoleSource::curl_current_amplitude(const Vec3& x) const {
  const cplx f = cplx(0, -omega_) * moment_amplitude() * (envelope(x) / (sigma_ * sigma_));
  return {-x.y * f, x.x * f, 0.0};
}

double HertzianDipoleSource::peak_current() const {
  return std::abs(p0_) * omega_ * gaussian_norm(sigma_);
}

double HertzianDipoleSource::peak_charge() const {
  return std::abs(p0_) * gaussian_norm(sigma_) * std::exp(-0.5) / sigma_;
}

// ---------------------------------------------------------------------------

RotatingPolarizationSource::RotatingPolarizationSource(const RotatingSourceParams& params)
    : params_(params) {
  const auto& q = params_;
  if (q.mode < 1) throw std::invalid_argument("azimuthal mode must be >= 1");
  if (!(q.omega > 0)) throw std::invalid_argument("rotation frequency must be positive");
  if (!(q.r_min > 0 && q.r_max > q.r_min))
    throw std::invalid_argument("annulus requires 0 < r_min < r_max");
  if (!(q.half_height > 0)) throw std::invalid_argument("half height must be positive");
  if (q.start < 0) throw std::invalid_argument("start time must be >= 0");
  tau_ = q.tau_on < 0 ? 2 * kPi / q.omega : q.tau_on;
  if (tau_ == 0) throw std::invalid_argument("switch-on duration must be positive");
}

RotatingPolarizationSource::Envelope RotatingPolarizationSource::envelope(double r,
                                                                           double z) const {
  const auto& q = params_;
  const double rc = 0.5 * (q.r_min + q.r_max), w = 0.5 * (q.r_max - q.r_min);
  const double u = (r - rc) / w, v = z / q.half_height;
  const double bu = bump(u), bv = bump(v);
  if (bu == 0 || bv == 0) return {};
  return {q.amplitude * bu * bv, q.amplitude * bump_slope(u) * bv / w,
          q.amplitude * bu * bump_slope(v) / q.half_height};
}

template <class T>
RotatingPolarizationSource::Fields<T> RotatingPolarizationSource::assemble(const Vec3& x, T c,
                                                                           T ct, T cp,
                                                                           T cpt) const {
  const double r = std::hypot(x.x, x.y);
  const Envelope e = envelope(r, x.z);
  Fields<T> out{{}, {}, T(0)};
  if (e.p0 == 0 && e.dr == 0 && e.dz == 0) return out;
  const double cphi = x.x / r, sphi = x.y / r;
  const Vec3 rhat{cphi, sphi, 0}, phat{-sphi, cphi, 0}, zhat{0, 0, 1};
  const double over_r = e.p0 / r;

  T cr{}, cf{}, cz{};
  Vec3 dir;
  T rho{};
  switch (params_.polarization) {
    case Polarization::azimuthal:
      dir = phat;
      cr = -e.dz * ct;
      cz = (over_r + e.dr) * ct;
      rho = -over_r * cp;
      break;
    case Polarization::radial:
      dir = rhat;
      cf = e.dz * ct;
      cz = -over_r * cpt;
      rho = -(over_r + e.dr) * c;
      break;
    case Polarization::axial:
      dir = zhat;
      cr = over_r * cpt;
      cf = -e.dr * ct;
      rho = -e.dz * c;
      break;
  }
  const T jmag = e.p0 * ct;
  out.current = {dir.x * jmag, dir.y * jmag, dir.z * jmag};
  out.curl = {rhat.x * cr + phat.x * cf, rhat.y * cr + phat.y * cf, cz};
  out.charge = params_.bound_charge ? rho : T(0);
  return out;
}

Vec3 RotatingPolarizationSource::current(const SpacetimePoint& p) const {
  const double s = p.t - params_.start;
  if (s <= 0) return {};
  const int m = params_.mode;
  const double psi = m * (std::atan2(p.x.y, p.x.x) - params_.omega * p.t);
  const double rr = ramp(s, tau_), rd = ramp_rate(s, tau_);
  const double ct = m * params_.omega * std::sin(psi) * rr + std::cos(psi) * rd;
  return assemble<double>(p.x, 0.0, ct, 0.0, 0.0).current;
}

double RotatingPolarizationSource::charge(const SpacetimePoint& p) const {
  if (!params_.bound_charge) return 0.0;
  const double s = p.t - params_.start;
  if (s <= 0) return 0.0;
  const int m = params_.mode;
  const double psi = m * (std::atan2(p.x.y, p.x.x) - params_.omega * p.t);
  const double rr = ramp(s, tau_);
  return assemble<double>(p.x, std::cos(psi) * rr, 0.0, -m * std::sin(psi) * rr, 0.0).charge;
}

Vec3 RotatingPolarizationSource::analytic_curl_current(const SpacetimePoint& p) const {
  const double s = p.t - params_.start;
  if (s <= 0) return {};
  const int m = params_.mode;
  const double w = params_.omega;
  const double psi = m * (std::atan2(p.x.y, p.x.x) - w * p.t);
  const double rr = ramp(s, tau_), rd = ramp_rate(s, tau_);
  const double sn = std::sin(psi), cs = std::cos(psi);
  const double ct = m * w * sn * rr + cs * rd;
  const double cpt = m * m * w * cs * rr - m * sn * rd;
  return assemble<double>(p.x, 0.0, ct, 0.0, cpt).curl;
}

Vec3 RotatingPolarizationSource::polarization(const SpacetimePoint& p) const {
  const double s = p.t - params_.start;
  const double r = std::hypot(p.x.x, p.x.y);
  if (s <= 0 || r == 0) return {};
  const double psi = params_.mode * (std::atan2(p.x.y, p.x.x) - params_.omega * p.t);
  const double f = envelope(r, p.x.z).p0 * std::cos(psi) * ramp(s, tau_);
  const double cphi = p.x.x / r, sphi = p.x.y / r;
  switch (params_.polarization) {
    case Polarization::azimuthal:
      return {-sphi * f, cphi * f, 0};
    case Polarization::radial:
      return {cphi * f, sphi * f, 0};
    case Polarization::axial:
      return {0, 0, f};
  }
  return {};
}

SupportRegion RotatingPolarizationSource::support() const {
  return SupportRegion::cylinder(params_.r_min, params_.r_max, params_.half_height);
}

std::optional<HarmonicInfo> RotatingPolarizationSource::harmonic() const {
  return HarmonicInfo{params_.mode * params_.omega, params_.mode, true, params_.start + tau_};
}

namespace {
struct ModeFactors {
  cplx c, ct, cp, cpt;
};
ModeFactors mode_factors(const Vec3& x, int m, double big_omega) {
  const cplx e = std::exp(cplx(0, m * std::atan2(x.y, x.x)));
  return {e, cplx(0, -big_omega) * e, cplx(0, m) * e, m * big_omega * e};
}
}  // namespace

CVec3 RotatingPolarizationSource::current_amplitude(const Vec3& x) const {
  const auto f = mode_factors(x, params_.mode, params_.mode * params_.omega);
  return assemble<cplx>(x, f.c, f.ct, f.cp, f.cpt).current;
}

cplx RotatingPolarizationSource::charge_amplitude(const Vec3& x) const {
  const auto f = mode_factors(x, params_.mode, params_.mode * params_.omega);
  return assemble<cplx>(x, f.c, f.ct, f.cp, f.cpt).charge;
}

CVec3 RotatingPolarizationSource::curl_current_amplitude(const Vec3& x) const {
  const auto f = mode_factors(x, params_.mode, params_.mode * params_.omega);
  return assemble<cplx>(x, f.c, f.ct, f.cp, f.cpt).curl;
}

double RotatingPolarizationSource::peak_current() const {
  return std::abs(params_.amplitude) * params_.mode * params_.omega;
}

double RotatingPolarizationSource::peak_charge() const {
  if (!params_.bound_charge) return 0.0;
  const double rc = 0.5 * (params_.r_min + params_.r_max);
  const double w = 0.5 * (params_.r_max - params_.r_min);
  return std::abs(params_.amplitude) *
         std::max({params_.mode / rc, 2.0 / w, 2.0 / params_.half_height});
}

double RotatingPolarizationSource::length_scale() const {
  return 0.25 * std::min(0.5 * (params_.r_max - params_.r_min), params_.half_height);
}

// ---------------------------------------------------------------------------

UniformBallCurrent::UniformBallCurrent(const Vec3& j0, double radius, double tau_on)
    : j0_(j0), radius_(radius), tau_(tau_on) {
  if (!(radius > 0)) throw std::invalid_argument("ball radius must be positive");
}

Vec3 UniformBallCurrent::current(const SpacetimePoint& p) const {
  if (p.t <= 0 || dot(p.x, p.x) > radius_ * radius_) return {};
  return j0_ * ramp(p.t, tau_);
}

// ---------------------------------------------------------------------------

SuperposedSource::SuperposedSource(std::vector<SourcePtr> parts) : parts_(std::move(parts)) {
  if (parts_.empty()) throw std::invalid_argument("superposition needs at least one part");
}

Vec3 SuperposedSource::current(const SpacetimePoint& p) const {
  Vec3 s;
  for (const auto& q : parts_) s += eval_current(*q, p);
  return s;
}

double SuperposedSource::charge(const SpacetimePoint& p) const {
  double s = 0;
  for (const auto& q : parts_) s += eval_charge(*q, p);
  return s;
}

bool SuperposedSource::has_charge() const {
  return std::any_of(parts_.begin(), parts_.end(), [](const auto& q) { return q->has_charge(); });
}

bool SuperposedSource::has_analytic_curl() const {
  return std::all_of(parts_.begin(), parts_.end(),
                     [](const auto& q) { return q->has_analytic_curl(); });
}

Vec3 SuperposedSource::analytic_curl_current(const SpacetimePoint& p) const {
  Vec3 s;
  for (const auto& q : parts_) s += eval_curl_current(*q, p);
  return s;
}

SupportRegion SuperposedSource::support() const {
  SupportRegion s;
  for (const auto& q : parts_) s = s.united(q->support());
  return s;
}

double SuperposedSource::start_time() const {
  double t = std::numeric_limits<double>::infinity();
  for (const auto& q : parts_) t = std::min(t, q->start_time());
  return t;
}

double SuperposedSource::switch_on_duration() const {
  double end = start_time();
  for (const auto& q : parts_) end = std::max(end, q->start_time() + q->switch_on_duration());
  return end - start_time();
}

bool SuperposedSource::eternal() const {
  return std::any_of(parts_.begin(), parts_.end(), [](const auto& q) { return q->eternal(); });
}

std::optional<HarmonicInfo> SuperposedSource::harmonic() const {
  std::optional<HarmonicInfo> out;
  for (const auto& q : parts_) {
    if (q->kind() == "zero") continue;
    const auto h = q->harmonic();
    if (!h) return std::nullopt;
    if (!out) {
      out = h;
      continue;
    }
    if (std::abs(h->omega - out->omega) > 1e-12 * std::max(1.0, out->omega)) return std::nullopt;
    out->rotation_covariant = out->rotation_covariant && h->rotation_covariant &&
                              h->azimuthal_order == out->azimuthal_order;
    out->steady_from = std::max(out->steady_from, h->steady_from);
  }
  if (!out) return ZeroSource().harmonic();
  return out;
}

CVec3 SuperposedSource::current_amplitude(const Vec3& x) const {
  CVec3 s;
  for (const auto& q : parts_)
    if (q->support().contains(x)) s += q->current_amplitude(x);
  return s;
}

cplx SuperposedSource::charge_amplitude(const Vec3& x) const {
  cplx s = 0;
  for (const auto& q : parts_)
    if (q->support().contains(x)) s += q->charge_amplitude(x);
  return s;
}

CVec3 SuperposedSource::curl_current_amplitude(const Vec3& x) const {
  CVec3 s;
  for (const auto& q : parts_)
    if (q->support().contains(x)) s += q->curl_current_amplitude(x);
  return s;
}

double SuperposedSource::peak_current() const {
  double s = 0;
  for (const auto& q : parts_) s += q->peak_current();
  return s;
}

double SuperposedSource::peak_charge() const {
  double s = 0;
  for (const auto& q : parts_) s += q->peak_charge();
  return s;
}

double SuperposedSource::length_scale() const {
  double l = std::numeric_limits<double>::infinity();
  for (const auto& q : parts_) l = std::min(l, q->length_scale());
  return l;
}

double SuperposedSource::pattern_speed() const {
  double v = 0;
  for (const auto& q : parts_) v = std::max(v, q->pattern_speed());
  return v;
}

}  // namespace fieldlab
