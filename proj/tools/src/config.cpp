#include "enclosure_cli/config.hpp"

#include <enclosure/error.hpp>
#include <enclosure/indicator.hpp>

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace enclosure::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  raise(ErrorCode::Config, path.empty() ? msg : path + ": " + msg);
}

// Object view that remembers which keys were read so leftovers can be reported.
class Object {
public:
  Object(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& at(const std::string& key) {
    if (!j_.contains(key)) fail(path_, "missing key \"" + key + "\"");
    seen_.insert(key);
    return j_.at(key);
  }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) fail(child(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(child(key), "expected a finite number");
    return x;
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  int integer_or(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_number_integer()) fail(child(key), "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) fail(child(key), "expected a string");
    return v.get<std::string>();
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) fail(path_, "unknown key \"" + key + "\"");
    }
  }

private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

Vec2 parse_point(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    fail(path, "expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

SymMat2 parse_sym(const json& j, const std::string& path) {
  if (j.is_array() && ((j.size() == 2 && j[0].is_array()) || j.size() == 4))
    fail(path, "full 2x2 matrices are not accepted; give the symmetric entries [a11, a12, a22]");
  if (!j.is_array() || j.size() != 3) fail(path, "expected [a11, a12, a22]");
  for (const auto& x : j) {
    if (!x.is_number()) fail(path, "expected [a11, a12, a22] of numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Domain parse_domain(const json& j, const std::string& path) {
  Object o(j, path);
  const std::string type = o.string("type");
  Domain d;
  if (type == "unit_disk") {
    d = UnitDisk{};
  } else if (type == "rectangle") {
    d = Rectangle{o.number("x_min"), o.number("x_max"), o.number("y_min"), o.number("y_max")};
  } else {
    fail(o.child("type"), "unknown domain type \"" + type + "\" (unit_disk, rectangle)");
  }
  o.finish();
  return d;
}

Shape parse_shape(const json& j, const std::string& path) {
  Object o(j, path);
  const std::string type = o.string("type");
  Shape s;
  if (type == "disk") {
    s = Disk{parse_point(o.at("center"), o.child("center")), o.number("radius")};
  } else if (type == "ellipse") {
    s = AxisEllipse{parse_point(o.at("center"), o.child("center")), o.number("semi_a"),
                    o.number("semi_b")};
  } else if (type == "polygon") {
    const json& v = o.at("vertices");
    if (!v.is_array()) fail(o.child("vertices"), "expected a list of [x, y]");
    ConvexPolygon p;
    for (std::size_t i = 0; i < v.size(); ++i)
      p.vertices.push_back(parse_point(v[i], o.child("vertices") + "[" + std::to_string(i) + "]"));
    s = std::move(p);
  } else {
    fail(o.child("type"), "unknown shape type \"" + type + "\" (disk, ellipse, polygon)");
  }
  o.finish();
  return s;
}

template <typename Fn>
void rethrow_as_config(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Config) throw;
    fail(path, e.what());
  }
}

json point_json(const Vec2& p) { return json::array({p.x(), p.y()}); }
json sym_json(const SymMat2& m) { return json::array({m.a11, m.a12, m.a22}); }

json shape_json(const Shape& s) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Disk>) {
          return {{"type", "disk"}, {"center", point_json(x.center)}, {"radius", x.radius}};
        } else if constexpr (std::is_same_v<T, AxisEllipse>) {
          return {{"type", "ellipse"}, {"center", point_json(x.center)},
                  {"semi_a", x.semi_a}, {"semi_b", x.semi_b}};
        } else {
          json v = json::array();
          for (const auto& p : x.vertices) v.push_back(point_json(p));
          return {{"type", "polygon"}, {"vertices", v}};
        }
      },
      s);
}

json domain_json(const Domain& d) {
  if (const auto* r = std::get_if<Rectangle>(&d))
    return {{"type", "rectangle"}, {"x_min", r->x_min}, {"x_max", r->x_max},
            {"y_min", r->y_min}, {"y_max", r->y_max}};
  return {{"type", "unit_disk"}};
}

}  // namespace

std::vector<double> SweepConfig::taus() const { return linspace(tau_min, tau_max, static_cast<std::size_t>(n_tau)); }

ScenarioConfig parse_config(std::string_view text, std::string_view source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // The library message carries "line L, column C".
    raise(ErrorCode::Config, std::string(source) + ": " + e.what());
  }

  const std::string src(source);
  ScenarioConfig c;
  Object top(root, "");
  try {
    c.domain = parse_domain(top.at("domain"), "domain");

    Object bg(top.at("background"), "background");
    c.scene.sigma0 = bg.number("sigma0");
    c.scene.eps0 = bg.number("eps0");
    c.scene.omega = bg.number("omega");
    bg.finish();

    if (top.has("inclusions")) {
      const json& list = top.at("inclusions");
      if (!list.is_array()) fail("inclusions", "expected a list");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "inclusions[" + std::to_string(i) + "]";
        Object inc(list[i], path);
        Inclusion x{parse_shape(inc.at("shape"), inc.child("shape")),
                    parse_sym(inc.at("alpha"), inc.child("alpha")),
                    parse_sym(inc.at("beta"), inc.child("beta"))};
        inc.finish();
        c.scene.inclusions.push_back(std::move(x));
      }
    }

    if (top.has("sweep")) {
      Object sw(top.at("sweep"), "sweep");
      c.sweep.n_directions = sw.integer_or("n_directions", c.sweep.n_directions);
      c.sweep.tau_min = sw.number_or("tau_min", c.sweep.tau_min);
      c.sweep.tau_max = sw.number_or("tau_max", c.sweep.tau_max);
      c.sweep.n_tau = sw.integer_or("n_tau", c.sweep.n_tau);
      c.sweep.delta = sw.number_or("delta", c.sweep.delta);
      sw.finish();
    }

    if (top.has("mesh")) {
      Object me(top.at("mesh"), "mesh");
      c.target_h = me.number_or("target_h", c.target_h);
      me.finish();
    }

    if (top.has("output_dir")) {
      c.output_dir = top.string("output_dir");
      if (c.output_dir.empty()) fail("output_dir", "must not be empty");
    }
    top.finish();

    rethrow_as_config("domain", [&] { validate(c.domain); });
    for (std::size_t i = 0; i < c.scene.inclusions.size(); ++i) {
      const std::string path = "inclusions[" + std::to_string(i) + "].shape";
      rethrow_as_config(path, [&] {
        validate(c.scene.inclusions[i].shape);
        check_margin(c.domain, c.scene.inclusions[i].shape);
      });
    }
    rethrow_as_config("background", [&] { validate(c.scene); });

    if (c.sweep.n_directions < 8) fail("sweep.n_directions", "must be at least 8");
    if (c.sweep.n_tau < 8) fail("sweep.n_tau", "must be at least 8");
    if (!(c.sweep.tau_min > 0.0 && c.sweep.tau_max > c.sweep.tau_min))
      fail("sweep", "need 0 < tau_min < tau_max");
    if (!(c.target_h > 0.0 && c.target_h <= 0.5 * diameter(c.domain)))
      fail("mesh.target_h", "must lie in (0, diam/2]");
  } catch (const Error& e) {
    raise(ErrorCode::Config, src + ": " + e.what());
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::Io, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string serialize(const ScenarioConfig& c) {
  json inc = json::array();
  for (const auto& x : c.scene.inclusions)
    inc.push_back({{"shape", shape_json(x.shape)}, {"alpha", sym_json(x.alpha)}, {"beta", sym_json(x.beta)}});
  const json root = {
      {"domain", domain_json(c.domain)},
      {"background", {{"sigma0", c.scene.sigma0}, {"eps0", c.scene.eps0}, {"omega", c.scene.omega}}},
      {"inclusions", inc},
      {"sweep",
       {{"n_directions", c.sweep.n_directions},
        {"tau_min", c.sweep.tau_min},
        {"tau_max", c.sweep.tau_max},
        {"n_tau", c.sweep.n_tau},
        {"delta", c.sweep.delta}}},
      {"mesh", {{"target_h", c.target_h}}},
      {"output_dir", c.output_dir.generic_string()},
  };
  return root.dump(2) + "\n";
}

}  // namespace enclosure::cli
