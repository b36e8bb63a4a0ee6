#include "enclosure_cli/commands.hpp"

#include <enclosure/csv.hpp>
#include <enclosure/error.hpp>
#include <enclosure/indicator.hpp>
#include <enclosure/mesh.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>

namespace enclosure::cli {

using nlohmann::json;

namespace {

// Short locale-independent rendering for the console.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, r.ptr);
}

std::string sym(const SymMat2& m) { return "[" + num(m.a11) + ", " + num(m.a12) + ", " + num(m.a22) + "]"; }

std::filesystem::path output_dir(const ScenarioConfig& config, const CommandOptions& opts) {
  const auto dir = opts.out.value_or(config.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) raise(ErrorCode::Io, "cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) raise(ErrorCode::Io, "cannot write " + path.string());
  f << text;
  if (!f) raise(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<int> direction_indices(const ScenarioConfig& config, const CommandOptions& opts) {
  const int n = config.sweep.n_directions;
  if (opts.direction) {
    if (*opts.direction < 0 || *opts.direction >= n)
      raise(ErrorCode::Config, "--direction must lie in [0, " + std::to_string(n - 1) + "]");
    return {*opts.direction};
  }
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) all[static_cast<std::size_t>(k)] = k;
  return all;
}

DirectionFrame direction(int k, int n) {
  return DirectionFrame::from_angle(2.0 * std::numbers::pi * k / n);
}

std::string regime_flags(const DirectionResult& d) {
  if (!d.regime) return "";
  if (!d.regime->proven()) return "outside_proven_regime";
  std::string s;
  for (Regime r : d.regime->applicable) {
    if (!s.empty()) s += ';';
    s += to_string(r);
  }
  return s;
}

const char* shape_name(const Shape& s) {
  if (std::holds_alternative<Disk>(s)) return "disk";
  if (std::holds_alternative<AxisEllipse>(s)) return "ellipse";
  return "polygon";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptySlab:
      return kExitRegimeEmpty;
    case ErrorCode::Solve:
    case ErrorCode::Assembly:
    case ErrorCode::Estimation:
    case ErrorCode::DegenerateHull:
    case ErrorCode::InvalidMesh:
    case ErrorCode::Interface:
    case ErrorCode::InvalidConstants:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

}  // namespace

int cmd_reduce(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out) {
  const MaterialScene& s = config.scene;
  const double den = background_modulus(s.sigma0, s.eps0, s.omega);
  const double P = s.sigma0 * s.sigma0 / den;
  const double Q = s.omega * s.omega * s.eps0 * s.eps0 / den;
  const ReducedScene r = reduce(s);

  out << "background: sigma0 = " << num(s.sigma0) << ", eps0 = " << num(s.eps0)
      << ", omega = " << num(s.omega) << "\n";
  out << "weights: P = " << num(P) << ", Q = " << num(Q) << "\n";
  json incs = json::array();
  for (std::size_t i = 0; i < r.inclusions.size(); ++i) {
    const auto& x = r.inclusions[i];
    out << "inclusion " << i << " (" << shape_name(r.shapes[i]) << "): a = " << sym(x.a)
        << ", b = " << sym(x.b) << "\n";
    incs.push_back({{"a", {x.a.a11, x.a.a12, x.a.a22}}, {"b", {x.b.a11, x.b.a12, x.b.a22}}});
  }
  if (r.inclusions.empty()) out << "no inclusions\n";

  const json doc = {{"sigma0", s.sigma0}, {"eps0", s.eps0}, {"omega", s.omega},
                    {"P", P}, {"Q", Q}, {"inclusions", incs}};
  const auto dir = output_dir(config, opts);
  write_text(dir / "reduce.json", doc.dump(2) + "\n");
  out << "wrote " << (dir / "reduce.json").string() << "\n";
  return kExitOk;
}

int cmd_check(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out) {
  const int n = config.sweep.n_directions;
  json reports = json::array();
  std::vector<int> empty;
  for (int k : direction_indices(config, opts)) {
    RegimeReport rep;
    try {
      rep = classify_regime(config.scene, direction(k, n), config.sweep.delta);
    } catch (const Error& e) {
      throw Error(e.code(), "direction " + std::to_string(k) + ": " + e.what());
    }
    out << "direction " << k << "\n" << to_text(rep) << "\n";
    json j = json::parse(to_json(rep));
    j["direction_index"] = k;
    reports.push_back(std::move(j));
    if (!rep.proven()) empty.push_back(k);
  }

  const auto dir = output_dir(config, opts);
  write_text(dir / "check.json", reports.dump(2) + "\n");
  if (empty.empty()) {
    out << "every direction has an applicable regime\n";
    return kExitOk;
  }
  out << "no applicable regime for direction";
  for (int k : empty) out << ' ' << k;
  out << "\n";
  return kExitRegimeEmpty;
}

int cmd_sweep(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out) {
  const Mesh mesh = generate_mesh(config.domain, config.target_h);
  const auto taus = config.sweep.taus();
  if (taus.back() > max_admissible_tau(mesh)) {
    raise(ErrorCode::ProbeUnderresolved,
          "tau_max = " + num(taus.back()) + " is under-resolved on this mesh (h_max = " +
              num(mesh.h_max) + "); the largest admissible tau is " + num(max_admissible_tau(mesh)));
  }
  const IndicatorEngine engine(mesh, config.domain, reduce(config.scene));

  SweepResult result;
  if (opts.direction) {
    const int k = direction_indices(config, opts).front();
    DirectionResult d;
    d.index = k;
    d.frame = direction(k, config.sweep.n_directions);
    d.curve = engine.curve(d.frame, taus, 0.0);
    const auto shapes = config.scene.shapes();
    if (!shapes.empty()) d.regime = classify_regime(config.scene, d.frame, config.sweep.delta);
    result.detected = std::any_of(d.curve.samples.begin(), d.curve.samples.end(),
                                  [](const IndicatorSample& s) { return !s.underflow; });
    if (result.detected) {
      d.estimate = estimate_support(d.curve);
      if (!shapes.empty()) d.estimate->h_exact = support_function(shapes, d.frame.theta());
    }
    result.directions.push_back(std::move(d));
  } else {
    SweepOptions so;
    so.n_directions = config.sweep.n_directions;
    so.taus = taus;
    so.delta = config.sweep.delta;
    result = sweep(config.scene, engine, so);
  }

  const auto dir = output_dir(config, opts);
  {
    csv::Writer w(dir / "indicator.csv");
    w.header({"direction_index", "theta_x", "theta_y", "tau", "t", "log_abs_I", "sign"});
    for (const auto& d : result.directions) {
      for (const auto& s : d.curve.samples) {
        w.field(d.index).field(d.frame.theta().x()).field(d.frame.theta().y());
        w.field(s.tau).field(d.curve.t).field(s.log_abs_I).field(s.sign);
        w.end_row();
      }
    }
  }
  {
    csv::Writer w(dir / "support.csv");
    w.header({"direction_index", "theta_x", "theta_y", "h_hat", "h_exact", "fit_residual", "regime_flags"});
    for (const auto& d : result.directions) {
      if (!d.estimate) continue;
      w.field(d.index).field(d.frame.theta().x()).field(d.frame.theta().y()).field(d.estimate->h_hat);
      if (d.estimate->h_exact) w.field(*d.estimate->h_exact);
      else w.field(std::string_view{});
      w.field(d.estimate->fit_residual).field(regime_flags(d));
      w.end_row();
    }
  }
  if (!opts.direction) {
    csv::Writer w(dir / "hull.csv");
    w.header({"vertex", "x", "y"});
    if (result.hull) {
      for (std::size_t i = 0; i < result.hull->vertices.size(); ++i) {
        w.field(i).field(result.hull->vertices[i].x()).field(result.hull->vertices[i].y());
        w.end_row();
      }
    }
  }

  out << "mesh: " << mesh.num_vertices() << " vertices, " << mesh.num_triangles()
      << " triangles, h_max = " << num(mesh.h_max) << "\n";
  out << "tau: [" << num(taus.front()) << ", " << num(taus.back()) << "], " << taus.size()
      << " samples\n";
  if (!result.detected) {
    out << "no inclusion detected\n";
    out << "wrote " << dir.string() << "\n";
    return kExitOk;
  }

  double max_err = -1.0;
  std::vector<int> outside;
  out << "direction  h_hat  h_exact  error  regime\n";
  for (const auto& d : result.directions) {
    const auto& e = *d.estimate;
    out << d.index << "  " << num(e.h_hat) << "  ";
    if (e.h_exact) {
      const double err = std::abs(e.h_hat - *e.h_exact);
      max_err = std::max(max_err, err);
      out << num(*e.h_exact) << "  " << num(err);
    } else {
      out << "-  -";
    }
    out << "  " << regime_flags(d) << "\n";
    if (d.outside_proven_regime()) outside.push_back(d.index);
  }
  if (max_err >= 0.0) out << "max |h_hat - h_exact| = " << num(max_err) << "\n";
  if (result.hull && config.scene.inclusions.size() == 1) {
    out << "hausdorff(hull, inclusion) = "
        << num(hausdorff_convex(*result.hull, config.scene.inclusions.front().shape)) << "\n";
  }
  if (!outside.empty()) {
    out << "outside proven regime: direction";
    for (int k : outside) out << ' ' << k;
    out << "\n";
  }
  out << "wrote " << dir.string() << "\n";
  return kExitOk;
}

int cmd_mesh_dump(const ScenarioConfig& config, const CommandOptions& opts, std::ostream& out) {
  const Mesh mesh = generate_mesh(config.domain, config.target_h);
  validate(mesh);
  const MeshStats st = mesh_stats(mesh);
  const auto dir = output_dir(config, opts);
  write_mesh_csv(mesh, dir);
  out << "vertices: " << st.num_vertices << "\ntriangles: " << st.num_triangles
      << "\nedges: " << st.num_edges << "\nh_max: " << num(st.h_max)
      << "\nmin_angle_deg: " << num(st.min_angle_deg) << "\nwrote " << dir.string() << "\n";
  return kExitOk;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Enclosure-method support recovery for complex conductivity inclusions",
               "enclosure-kit"};
  std::string command;
  std::string config_path;
  std::optional<int> dir_index;
  std::optional<std::string> out_dir;
  app.add_option("command", command, "reduce, check, sweep or mesh-dump")
      ->required()
      ->check(CLI::IsMember({"reduce", "check", "sweep", "mesh-dump"}));
  app.add_option("--config", config_path, "scenario JSON file")->required();
  app.add_option("--direction", dir_index, "restrict to direction index k");
  app.add_option("--out", out_dir, "output directory (overrides output_dir)");
  app.set_version_flag("--version", "enclosure-kit 0.1.0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const ScenarioConfig config = load_config(config_path);
    CommandOptions opts;
    opts.direction = dir_index;
    if (out_dir) opts.out = *out_dir;
    if (command == "reduce") return cmd_reduce(config, opts, out);
    if (command == "check") return cmd_check(config, opts, out);
    if (command == "sweep") return cmd_sweep(config, opts, out);
    return cmd_mesh_dump(config, opts, out);
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace enclosure::cli
