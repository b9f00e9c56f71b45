#include "fieldlab/scenario.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace fieldlab {

namespace {

constexpr RunKind kRunKinds[] = {RunKind::potential,    RunKind::field,        RunKind::decompose,
                                 RunKind::reconstruct,  RunKind::cancellation, RunKind::scaling,
                                 RunKind::validate};

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

// Walks one mapping, converting known keys and recording every problem.
class Block {
 public:
  Block(const YAML::Node& node, std::string path, std::vector<FieldError>& errors)
      : node_(node), path_(std::move(path)), errors_(errors) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) {
      fail(path_, line_of(node_), "expected a mapping");
      valid_ = false;
    }
  }

  std::string key(const char* k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const char* k) const { return valid_ && node_ && node_[k] && !node_[k].IsNull(); }
  YAML::Node child(const char* k) const { return valid_ && node_ ? node_[k] : YAML::Node(); }
  int line(const char* k) const { return has(k) ? line_of(node_[k]) : line_of(node_); }

  template <class T>
  void get(const char* k, T& out) {
    seen_.insert(k);
    if (!has(k)) return;
    try {
      out = node_[k].as<T>();
    } catch (const YAML::Exception&) {
      fail(key(k), line(k), std::string("expected ") + type_name<T>());
    }
  }

  void get(const char* k, Vec3& out) {
    seen_.insert(k);
    if (!has(k)) return;
    const YAML::Node v = node_[k];
    if (!read_vec(v, out)) fail(key(k), line(k), "expected a list of three numbers");
  }

  void get(const char* k, std::vector<Vec3>& out) {
    seen_.insert(k);
    if (!has(k)) return;
    const YAML::Node v = node_[k];
    if (!v.IsSequence()) {
      fail(key(k), line(k), "expected a list of points");
      return;
    }
    out.clear();
    for (const auto& item : v) {
      Vec3 p;
      if (!read_vec(item, p)) {
        fail(key(k), line_of(item), "expected a list of three numbers");
        return;
      }
      out.push_back(p);
    }
  }

  /// Number or "auto".
  void get_auto(const char* k, std::optional<double>& out) {
    seen_.insert(k);
    if (!has(k)) return;
    const YAML::Node v = node_[k];
    if (v.IsScalar() && v.Scalar() == "auto") {
      out.reset();
      return;
    }
    try {
      out = v.as<double>();
    } catch (const YAML::Exception&) {
      fail(key(k), line(k), "expected a number or \"auto\"");
    }
  }

  void mark(const char* k) { seen_.insert(k); }

  void finish() {
    if (!valid_ || !node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string k = kv.first.as<std::string>();
      if (!seen_.count(k)) fail(key(k.c_str()), line_of(kv.first), "unknown key");
    }
  }

  void fail(const std::string& k, int line, const std::string& msg) {
    errors_.push_back({k, line, msg});
  }

 private:
  static bool read_vec(const YAML::Node& v, Vec3& out) {
    if (!v.IsSequence() || v.size() != 3) return false;
    try {
      out = {v[0].as<double>(), v[1].as<double>(), v[2].as<double>()};
    } catch (const YAML::Exception&) {
      return false;
    }
    return true;
  }
  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "true or false";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else if constexpr (std::is_same_v<T, std::string>) return "a string";
    else return "a list of numbers";
  }

  YAML::Node node_;
  std::string path_;
  std::vector<FieldError>& errors_;
  std::set<std::string> seen_;
  bool valid_ = true;
};

std::string format_errors(const std::vector<FieldError>& errors) {
  std::ostringstream os;
  for (const auto& e : errors) {
    os << "\n  " << e.key;
    if (e.line > 0) os << " (line " << e.line << ")";
    os << ": " << e.message;
  }
  return os.str();
}

const char* polarization_name(Polarization p) {
  switch (p) {
    case Polarization::azimuthal: return "azimuthal";
    case Polarization::radial: return "radial";
    case Polarization::axial: return "axial";
  }
  return "azimuthal";
}

const char* method_name(QuadratureMethod m) {
  switch (m) {
    case QuadratureMethod::automatic: return "automatic";
    case QuadratureMethod::source_cylindrical: return "source_cylindrical";
    case QuadratureMethod::observer_centered: return "observer_centered";
  }
  return "automatic";
}

}  // namespace

const char* to_string(RunKind k) {
  switch (k) {
    case RunKind::potential: return "potential";
    case RunKind::field: return "field";
    case RunKind::decompose: return "decompose";
    case RunKind::reconstruct: return "reconstruct";
    case RunKind::cancellation: return "cancellation";
    case RunKind::scaling: return "scaling";
    case RunKind::validate: return "validate";
  }
  return "field";
}

std::optional<RunKind> parse_run_kind(const std::string& s) {
  for (RunKind k : kRunKinds)
    if (s == to_string(k)) return k;
  return std::nullopt;
}

std::string run_kind_list() {
  std::string out;
  for (RunKind k : kRunKinds) {
    if (!out.empty()) out += ", ";
    out += to_string(k);
  }
  return out;
}

const char* to_string(LengthUnit u) {
  switch (u) {
    case LengthUnit::absolute: return "absolute";
    case LengthUnit::support: return "support";
    case LengthUnit::wavelength: return "wavelength";
  }
  return "absolute";
}

SourcePtr build_source(const SourceSpec& s) {
  if (s.kind == "dipole")
    return std::make_shared<HertzianDipoleSource>(s.dipole.moment, s.dipole.omega, s.dipole.sigma,
                                                  s.dipole.tau_on, s.dipole.start);
  if (s.kind == "blob") return std::make_shared<StaticChargeBlob>(s.blob.charge, s.blob.sigma);
  if (s.kind == "rotating") return std::make_shared<RotatingPolarizationSource>(s.rotating);
  if (s.kind == "uniform_ball")
    return std::make_shared<UniformBallCurrent>(s.ball.current, s.ball.radius, s.ball.tau_on);
  if (s.kind == "zero") return std::make_shared<ZeroSource>();
  throw std::invalid_argument("unknown source kind " + s.kind);
}

Scenario parse_scenario(const std::string& text, std::optional<RunKind> run_override) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ParseError("scenario is not valid YAML: " + e.msg,
                     {{"", e.mark.line + 1, e.msg}});
  }
  if (root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ParseError("scenario must be a mapping", {{"", line_of(root), "expected a mapping"}});

  Scenario s;
  std::vector<FieldError> errors;
  Block top(root, "", errors);

  // Run kind.
  top.mark("run");
  std::optional<RunKind> run;
  if (top.has("run")) {
    const std::string name = root["run"].Scalar();
    run = parse_run_kind(name);
    if (!run)
      throw ParseError("unknown run kind \"" + name + "\"; valid kinds: " + run_kind_list(),
                       {{"run", top.line("run"), "valid kinds: " + run_kind_list()}});
    if (run_override && *run_override != *run)
      throw ParseError(std::string("scenario run kind \"") + to_string(*run) +
                           "\" does not match the requested \"" + to_string(*run_override) + "\"",
                       {{"run", top.line("run"), "conflicts with the command"}});
  } else if (run_override) {
    run = run_override;
  } else {
    throw ParseError("scenario has no run kind; valid kinds: " + run_kind_list(),
                     {{"run", 0, "missing"}});
  }
  s.run = *run;

  // Source.
  {
    Block b(top.child("source"), "source", errors);
    top.mark("source");
    b.get("kind", s.source.kind);
    const std::string& k = s.source.kind;
    if (k == "dipole") {
      auto& d = s.source.dipole;
      b.get("moment", d.moment);
      b.get("omega", d.omega);
      b.get("sigma", d.sigma);
      b.get("tau_on", d.tau_on);
      b.get("start", d.start);
      if (!(d.omega > 0)) b.fail(b.key("omega"), b.line("omega"), "must be positive");
      if (!(d.sigma > 0)) b.fail(b.key("sigma"), b.line("sigma"), "must be positive");
    } else if (k == "blob") {
      b.get("charge", s.source.blob.charge);
      b.get("sigma", s.source.blob.sigma);
      if (!(s.source.blob.sigma > 0)) b.fail(b.key("sigma"), b.line("sigma"), "must be positive");
    } else if (k == "rotating") {
      auto& r = s.source.rotating;
      b.get("mode", r.mode);
      b.get("omega", r.omega);
      b.get("r_min", r.r_min);
      b.get("r_max", r.r_max);
      b.get("half_height", r.half_height);
      b.get("amplitude", r.amplitude);
      std::string pol = polarization_name(r.polarization);
      b.get("polarization", pol);
      if (pol == "azimuthal") r.polarization = Polarization::azimuthal;
      else if (pol == "radial") r.polarization = Polarization::radial;
      else if (pol == "axial") r.polarization = Polarization::axial;
      else b.fail(b.key("polarization"), b.line("polarization"), "expected azimuthal, radial or axial");
      b.get("bound_charge", r.bound_charge);
      b.get("tau_on", r.tau_on);
      b.get("start", r.start);
      if (r.mode < 1) b.fail(b.key("mode"), b.line("mode"), "must be at least 1");
      if (!(r.omega > 0)) b.fail(b.key("omega"), b.line("omega"), "must be positive");
      if (!(r.r_min >= 0 && r.r_min < r.r_max)) {
        b.fail(b.key("r_min"), b.line("r_min"), "must satisfy 0 <= r_min < r_max");
        b.fail(b.key("r_max"), b.line("r_max"), "must exceed r_min");
      }
      if (!(r.half_height > 0)) b.fail(b.key("half_height"), b.line("half_height"), "must be positive");
    } else if (k == "uniform_ball") {
      b.get("current", s.source.ball.current);
      b.get("radius", s.source.ball.radius);
      b.get("tau_on", s.source.ball.tau_on);
      if (!(s.source.ball.radius > 0)) b.fail(b.key("radius"), b.line("radius"), "must be positive");
    } else if (k != "zero") {
      b.fail(b.key("kind"), b.line("kind"), "expected dipole, blob, rotating, uniform_ball or zero");
    }
    b.finish();
  }

  // Geometry.
  auto& g = s.geometry;
  switch (s.run) {
    case RunKind::reconstruct:
    case RunKind::cancellation: g.units = LengthUnit::wavelength; break;
    case RunKind::decompose:
    case RunKind::scaling: g.units = LengthUnit::support; break;
    default: g.units = LengthUnit::absolute;
  }
  g.observer_radius = s.run == RunKind::cancellation ? 60 : 20;
  {
    Block b(top.child("geometry"), "geometry", errors);
    top.mark("geometry");
    std::string units = "auto";
    b.get("units", units);
    if (units == "absolute") g.units = LengthUnit::absolute;
    else if (units == "support") g.units = LengthUnit::support;
    else if (units == "wavelength") g.units = LengthUnit::wavelength;
    else if (units != "auto")
      b.fail(b.key("units"), b.line("units"), "expected auto, absolute, support or wavelength");
    b.get("points", g.points);
    b.get("random_points", g.random_points);
    b.get("point_radius", g.point_radius);
    b.get_auto("time", g.time);
    b.get("inner_radius", g.inner_radius);
    b.get("outer_radius", g.outer_radius);
    b.get("observer_radius", g.observer_radius);
    b.get("direction", g.direction);
    b.get("boundary_radii", g.boundary_radii);
    b.get("observer_fraction", g.observer_fraction);
    if ((s.run == RunKind::potential || s.run == RunKind::field) && g.points.empty() &&
        !b.has("random_points"))
      g.random_points = 20;
    if (g.random_points < 0) b.fail(b.key("random_points"), b.line("random_points"), "must be >= 0");
    if (!(g.point_radius > 0)) b.fail(b.key("point_radius"), b.line("point_radius"), "must be positive");
    if (!(norm(g.direction) > 0)) b.fail(b.key("direction"), b.line("direction"), "must be nonzero");
    if (s.run == RunKind::reconstruct || s.run == RunKind::cancellation) {
      if (!(g.inner_radius > 0 && g.inner_radius < g.outer_radius)) {
        const std::string msg = "inner_radius (" + std::to_string(g.inner_radius) +
                                ") must be positive and less than outer_radius (" +
                                std::to_string(g.outer_radius) + ")";
        b.fail(b.key("inner_radius"), b.line("inner_radius"), msg);
        b.fail(b.key("outer_radius"), b.line("outer_radius"), msg);
      } else if (s.run == RunKind::reconstruct &&
                 !(g.observer_radius > g.inner_radius && g.observer_radius < g.outer_radius)) {
        b.fail(b.key("observer_radius"), b.line("observer_radius"),
               "must lie strictly between inner_radius and outer_radius");
      } else if (s.run == RunKind::cancellation && !(g.observer_radius > g.outer_radius)) {
        b.fail(b.key("observer_radius"), b.line("observer_radius"),
               "must exceed outer_radius for the exterior check");
      }
    }
    if (s.run == RunKind::decompose) {
      if (g.boundary_radii.empty())
        b.fail(b.key("boundary_radii"), b.line("boundary_radii"), "needs at least one radius");
      for (double r : g.boundary_radii)
        if (!(r > 0)) b.fail(b.key("boundary_radii"), b.line("boundary_radii"), "radii must be positive");
      if (!(g.observer_fraction > 0) || g.observer_fraction == 1)
        b.fail(b.key("observer_fraction"), b.line("observer_fraction"),
               "must be positive and different from 1");
    }
    b.finish();
  }

  // Sweep.
  {
    Block b(top.child("sweep"), "sweep", errors);
    top.mark("sweep");
    auto& w = s.sweep;
    b.get("r0", w.r0);
    b.get("ratio", w.ratio);
    b.get("count", w.count);
    b.get("search", w.search);
    b.get("theta", w.theta);
    b.get("phi", w.phi);
    b.get("threshold", w.threshold);
    b.get("pipeline", w.pipeline);
    b.get("quantity", w.quantity);
    b.get("gradient", w.gradient);
    b.get("boundary", w.boundary);
    b.get("solid_angle", w.solid_angle);
    if (!(w.r0 > 0)) b.fail(b.key("r0"), b.line("r0"), "must be positive");
    if (!(w.ratio > 1 && w.ratio <= 2)) b.fail(b.key("ratio"), b.line("ratio"), "must lie in (1, 2]");
    if (w.count < 4) b.fail(b.key("count"), b.line("count"), "a fit needs at least 4 radii");
    if (!(w.threshold > 0 && w.threshold < 1))
      b.fail(b.key("threshold"), b.line("threshold"), "must lie in (0, 1)");
    if (w.pipeline != "from_potential" && w.pipeline != "source_term_only")
      b.fail(b.key("pipeline"), b.line("pipeline"), "expected from_potential or source_term_only");
    if (w.quantity != "magnetic" && w.quantity != "electric")
      b.fail(b.key("quantity"), b.line("quantity"), "expected magnetic or electric");
    b.finish();
  }

  // Numerics.
  {
    Block b(top.child("numerics"), "numerics", errors);
    top.mark("numerics");
    auto& n = s.numerics;
    auto& q = n.quadrature;
    b.get("n_r", q.n_r);
    b.get("n_phi", q.n_phi);
    b.get("n_z", q.n_z);
    b.get("tolerance", q.tolerance);
    b.get("max_refinements", q.max_refinements);
    std::string method = method_name(q.method);
    b.get("method", method);
    if (method == "automatic") q.method = QuadratureMethod::automatic;
    else if (method == "source_cylindrical") q.method = QuadratureMethod::source_cylindrical;
    else if (method == "observer_centered") q.method = QuadratureMethod::observer_centered;
    else b.fail(b.key("method"), b.line("method"), "expected automatic, source_cylindrical or observer_centered");
    b.get("mesh_level", n.mesh_level);
    b.get("search_level", n.search_level);
    b.get("surface_tolerance", n.surface_tolerance);
    b.get("step", n.step);
    b.get("electric", n.electric);
    b.get("phasor", n.phasor);
    for (const char* k : {"n_r", "n_phi", "n_z"}) {
      const int v = k[2] == 'r' ? q.n_r : k[2] == 'p' ? q.n_phi : q.n_z;
      if (v < 2) b.fail(b.key(k), b.line(k), "node counts must be at least 2");
    }
    if (!(q.tolerance > 0)) b.fail(b.key("tolerance"), b.line("tolerance"), "must be positive");
    if (q.max_refinements < 0 || q.max_refinements > 8)
      b.fail(b.key("max_refinements"), b.line("max_refinements"), "must lie in [0, 8]");
    if (n.mesh_level < 3 || n.mesh_level > 7)
      b.fail(b.key("mesh_level"), b.line("mesh_level"), "must lie in [3, 7]");
    if (n.search_level < 2 || n.search_level > 7)
      b.fail(b.key("search_level"), b.line("search_level"), "must lie in [2, 7]");
    if (!(n.surface_tolerance > 0))
      b.fail(b.key("surface_tolerance"), b.line("surface_tolerance"), "must be positive");
    if (n.step < 0) b.fail(b.key("step"), b.line("step"), "must be >= 0 (0 = automatic)");
    b.finish();
  }

  // Validation probes.
  {
    Block b(top.child("validation"), "validation", errors);
    top.mark("validation");
    auto& v = s.validation;
    b.get("exterior_probes", v.exterior_probes);
    b.get("interior_probes", v.interior_probes);
    b.get("probe_radius", v.probe_radius);
    b.get("gauge_trials", v.gauge_trials);
    b.get("lorenz_points", v.lorenz_points);
    for (const char* k : {"exterior_probes", "interior_probes", "gauge_trials", "lorenz_points"}) {
      int val = 0;
      if (std::string(k) == "exterior_probes") val = v.exterior_probes;
      else if (std::string(k) == "interior_probes") val = v.interior_probes;
      else if (std::string(k) == "gauge_trials") val = v.gauge_trials;
      else val = v.lorenz_points;
      if (val < 0) b.fail(b.key(k), b.line(k), "must be >= 0");
    }
    if (!(v.probe_radius > 0)) b.fail(b.key("probe_radius"), b.line("probe_radius"), "must be positive");
    b.finish();
  }

  // Tolerances.
  {
    const auto& r = s.source.rotating;
    s.tolerances.reconstruct = s.source.kind == "rotating" && r.omega * r.r_max > 1 ? 0.02 : 0.01;
    Block b(top.child("tolerances"), "tolerances", errors);
    top.mark("tolerances");
    auto& t = s.tolerances;
    b.get("reconstruct", t.reconstruct);
    b.get("cancellation", t.cancellation);
    b.get("closure", t.closure);
    b.get("residual", t.residual);
    b.get("gauge", t.gauge);
    for (const auto& [k, v] : {std::pair<const char*, double>{"reconstruct", t.reconstruct},
                               {"cancellation", t.cancellation},
                               {"closure", t.closure},
                               {"residual", t.residual},
                               {"gauge", t.gauge}})
      if (!(v > 0)) b.fail(b.key(k), b.line(k), "tolerances must be positive");
    b.finish();
  }

  // Output.
  {
    Block b(top.child("output"), "output", errors);
    top.mark("output");
    b.get("dir", s.output.dir);
    b.get("csv", s.output.csv);
    b.get("json", s.output.json);
    b.finish();
  }

  top.get("workers", s.workers);
  top.get("seed", s.seed);
  if (s.workers < 0) top.fail("workers", top.line("workers"), "must be >= 0 (0 = automatic)");
  top.finish();

  const bool static_source = s.source.kind == "blob" || s.source.kind == "zero";
  if (static_source && s.geometry.units == LengthUnit::wavelength)
    errors.push_back({"geometry.units", 0, "a static source has no wavelength; choose support or absolute"});
  if (s.run == RunKind::reconstruct || s.run == RunKind::cancellation || s.run == RunKind::decompose) {
    if (s.source.kind == "uniform_ball" || (s.source.kind == "blob" && s.run != RunKind::decompose))
      errors.push_back({"source.kind", 0,
                        std::string(to_string(s.run)) + " needs a source with a harmonic steady state"});
  }

  if (!errors.empty())
    throw ValidationError("invalid scenario:" + format_errors(errors), errors);
  return s;
}

nlohmann::json to_json(const Scenario& s) {
  using nlohmann::json;
  auto vec = [](const Vec3& v) { return json::array({v.x, v.y, v.z}); };
  json src = {{"kind", s.source.kind}};
  const auto& k = s.source.kind;
  if (k == "dipole") {
    const auto& d = s.source.dipole;
    src.update({{"moment", d.moment}, {"omega", d.omega}, {"sigma", d.sigma},
                {"tau_on", d.tau_on}, {"start", d.start}});
  } else if (k == "blob") {
    src.update({{"charge", s.source.blob.charge}, {"sigma", s.source.blob.sigma}});
  } else if (k == "rotating") {
    const auto& r = s.source.rotating;
    src.update({{"mode", r.mode}, {"omega", r.omega}, {"r_min", r.r_min}, {"r_max", r.r_max},
                {"half_height", r.half_height}, {"amplitude", r.amplitude},
                {"polarization", polarization_name(r.polarization)},
                {"bound_charge", r.bound_charge}, {"tau_on", r.tau_on}, {"start", r.start}});
  } else if (k == "uniform_ball") {
    src.update({{"current", vec(s.source.ball.current)}, {"radius", s.source.ball.radius},
                {"tau_on", s.source.ball.tau_on}});
  }
  const auto& g = s.geometry;
  json points = json::array();
  for (const auto& p : g.points) points.push_back(vec(p));
  json geometry = {{"units", to_string(g.units)},
                   {"points", points},
                   {"random_points", g.random_points},
                   {"point_radius", g.point_radius},
                   {"time", g.time ? json(*g.time) : json("auto")},
                   {"inner_radius", g.inner_radius},
                   {"outer_radius", g.outer_radius},
                   {"observer_radius", g.observer_radius},
                   {"direction", vec(g.direction)},
                   {"boundary_radii", g.boundary_radii},
                   {"observer_fraction", g.observer_fraction}};
  const auto& w = s.sweep;
  json sweep = {{"r0", w.r0},           {"ratio", w.ratio},       {"count", w.count},
                {"search", w.search},   {"theta", w.theta},       {"phi", w.phi},
                {"threshold", w.threshold}, {"pipeline", w.pipeline}, {"quantity", w.quantity},
                {"gradient", w.gradient}, {"boundary", w.boundary}, {"solid_angle", w.solid_angle}};
  const auto& n = s.numerics;
  json numerics = {{"n_r", n.quadrature.n_r},
                   {"n_phi", n.quadrature.n_phi},
                   {"n_z", n.quadrature.n_z},
                   {"tolerance", n.quadrature.tolerance},
                   {"max_refinements", n.quadrature.max_refinements},
                   {"method", method_name(n.quadrature.method)},
                   {"mesh_level", n.mesh_level},
                   {"search_level", n.search_level},
                   {"surface_tolerance", n.surface_tolerance},
                   {"step", n.step},
                   {"electric", n.electric},
                   {"phasor", n.phasor}};
  const auto& v = s.validation;
  json validation = {{"exterior_probes", v.exterior_probes}, {"interior_probes", v.interior_probes},
                     {"probe_radius", v.probe_radius},       {"gauge_trials", v.gauge_trials},
                     {"lorenz_points", v.lorenz_points}};
  const auto& t = s.tolerances;
  json tol = {{"reconstruct", t.reconstruct}, {"cancellation", t.cancellation},
              {"closure", t.closure},         {"residual", t.residual},
              {"gauge", t.gauge}};
  json out = {{"dir", s.output.dir}, {"csv", s.output.csv}, {"json", s.output.json}};
  return {{"run", to_string(s.run)}, {"source", src},         {"geometry", geometry},
          {"sweep", sweep},          {"numerics", numerics},  {"validation", validation},
          {"tolerances", tol},       {"output", out},         {"workers", s.workers},
          {"seed", s.seed}};
}

}  // namespace fieldlab
