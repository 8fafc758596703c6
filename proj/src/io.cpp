#include "curveforge/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "curveforge/errors.hpp"

namespace curveforge::io {

void write_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw ConfigError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(field + ": expected [x, y, z]");
  for (const auto& c : j) {
    if (!c.is_number()) throw ConfigError(field + ": coordinates must be numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace

void write_curve(const fs::path& path, const CurveFile& curve) {
  json j;
  j["format"] = kCurveFormat;
  j["version"] = kFormatVersion;
  j["degree"] = curve.points.degree();
  json pts = json::array();
  for (const auto& p : curve.points.points()) pts.push_back(vec_to_json(p));
  j["points"] = pts;
  j["metadata"] = curve.metadata;
  write_atomic(path, dump(j));
}

CurveFile read_curve(const fs::path& path) {
  const json j = read_json(path);
  if (!j.contains("points")) throw ConfigError("curve file missing field 'points'");
  if (j.contains("version") && j["version"] != kFormatVersion) {
    throw ConfigError("curve file has unsupported version");
  }
  std::vector<Vec3> pts;
  for (const auto& p : j["points"]) pts.push_back(vec_from_json(p, "points"));
  if (j.contains("degree") && j["degree"].get<int>() + 1 != static_cast<int>(pts.size())) {
    throw ConfigError("curve file field 'degree' does not match the number of points");
  }
  CurveFile c;
  try {
    c.points = bezier::ControlPointSet(std::move(pts));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("curve file field 'points': ") + e.what());
  }
  if (j.contains("metadata")) c.metadata = j["metadata"];
  return c;
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p.replace_extension(".json");
  return p;
}

void write_frenet(const fs::path& csv, const frenet::FrenetData& fd) {
  std::string s = "x,t,rx,ry,rz,Tx,Ty,Tz,Nx,Ny,Nz,Bx,By,Bz,kappa,tau,gamma\n";
  for (const auto& p : fd.samples) {
    const double v[] = {p.x,          p.t,          p.position.x, p.position.y, p.position.z,
                        p.tangent.x,  p.tangent.y,  p.tangent.z,  p.normal.x,   p.normal.y,
                        p.normal.z,   p.binormal.x, p.binormal.y, p.binormal.z, p.kappa,
                        p.tau,        p.gamma};
    for (std::size_t i = 0; i < std::size(v); ++i) {
      if (i) s += ',';
      s += fmt(v[i]);
    }
    s += '\n';
  }
  write_atomic(csv, s);
  const auto m = frenet::robustness_measures(fd);
  json side;
  side["T_g"] = fd.total_length;
  side["total_torsion"] = fd.total_torsion;
  side["M"] = fd.M();
  json sp = json::array();
  for (const auto& p : fd.singular_points) sp.push_back({{"x", p.x}, {"t", p.t}, {"order", p.order}});
  side["singular_points"] = sp;
  side["closure_gap"] = m.closure_gap;
  side["tangent_area"] = vec_to_json(m.tangent_area);
  side["cfi"] = m.cfi;
  write_atomic(sidecar_path(csv), dump(side));
}

void write_pulse(const fs::path& csv, const gatemap::ControlFields& f) {
  std::string s = "t,omega,phi,delta,omega_x,omega_y\n";
  const auto ox = f.omega_x();
  const auto oy = f.omega_y();
  for (std::size_t k = 0; k < f.size(); ++k) {
    s += fmt(f.t[k]) + ',' + fmt(f.omega[k]) + ',' + fmt(f.phi[k]) + ',' + fmt(f.delta[k]) + ',' +
         fmt(ox[k]) + ',' + fmt(oy[k]) + '\n';
  }
  write_atomic(csv, s);
  json side;
  side["mode"] = gatemap::to_string(f.mode);
  side["T_g"] = f.tg;
  side["nonnegative_omega"] = f.nonnegative_omega;
  if (f.ttc) {
    side["theta_B"] = f.ttc->theta_b;
    side["M"] = f.ttc->m;
    side["total_torsion"] = f.ttc->total_torsion;
    side["T_g_delta"] = f.ttc->tg_delta;
    side["k_star"] = f.ttc->k_star;
  } else {
    side["theta_B"] = nullptr;
    side["M"] = nullptr;
    side["total_torsion"] = nullptr;
    side["T_g_delta"] = 0.0;
    side["k_star"] = nullptr;
  }
  write_atomic(sidecar_path(csv), dump(side));
}

json unitary_to_json(const gatemap::Mat2c& u) {
  json a = json::array();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      a.push_back(u(i, j).real());
      a.push_back(u(i, j).imag());
    }
  }
  return a;
}

gatemap::Mat2c unitary_from_json(const json& j) {
  if (!j.is_array() || j.size() != 8) {
    throw ConfigError("target_unitary: expected 8 reals (row-major re, im pairs)");
  }
  gatemap::Mat2c u;
  for (int k = 0; k < 4; ++k) {
    if (!j[2 * k].is_number() || !j[2 * k + 1].is_number()) {
      throw ConfigError("target_unitary: entries must be numbers");
    }
    u(k / 2, k % 2) = {j[2 * k].get<double>(), j[2 * k + 1].get<double>()};
  }
  if (!gatemap::is_unitary(u, 1e-10)) throw ConfigError("target_unitary: matrix is not unitary");
  return u;
}

json design_to_json(const DesignFile& d) {
  const auto& c = d.config;
  json j;
  j["format"] = "curveforge.design";
  j["version"] = kFormatVersion;
  j["target_unitary"] = unitary_to_json(c.target.u);
  j["theta_B"] = c.theta_b;
  j["optimize_theta_B"] = c.optimize_theta_b;
  j["nu"] = c.nu;
  j["n_free"] = c.n_free;
  j["seed"] = d.seed;
  j["pgf"] = c.pgf == barq::PgfKind::Symmetric ? "symmetric" : "general";
  j["tie_lambda3"] = c.tie_l3;
  json ov = json::object();
  for (int i = 0; i < barq::kLambdaCount; ++i) {
    const auto& o = c.overrides[static_cast<std::size_t>(i)];
    if (!o) continue;
    const std::string name(barq::lambda_name(static_cast<barq::Lambda>(i)));
    if (o->optimizable) {
      ov[name] = {{"optimizable", true}, {"initial", o->value}};
    } else {
      ov[name] = o->value;
    }
  }
  j["lambda_overrides"] = ov;
  if (d.params) {
    json fp = json::array();
    for (const auto& p : d.params->free_points) fp.push_back(vec_to_json(p));
    j["free_points"] = fp;
    j["lambda_raw"] = d.params->lambda_raw;
    j["theta_B"] = d.params->theta_b;
  }
  return j;
}

DesignFile design_from_json(const json& j) {
  DesignFile d;
  auto& c = d.config;
  try {
    if (j.contains("target_unitary")) {
      c.target = gatemap::GateTarget::from_unitary(unitary_from_json(j["target_unitary"]));
    }
    if (j.contains("theta_B")) c.theta_b = j["theta_B"].get<double>();
    if (j.contains("optimize_theta_B")) c.optimize_theta_b = j["optimize_theta_B"].get<bool>();
    if (j.contains("nu")) c.nu = j["nu"].get<double>();
    if (j.contains("n_free")) c.n_free = j["n_free"].get<int>();
    if (j.contains("seed")) d.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("tie_lambda3")) c.tie_l3 = j["tie_lambda3"].get<bool>();
    if (j.contains("pgf")) {
      const auto s = j["pgf"].get<std::string>();
      if (s == "symmetric") {
        c.pgf = barq::PgfKind::Symmetric;
      } else if (s == "general") {
        c.pgf = barq::PgfKind::General;
      } else {
        throw ConfigError("pgf: expected 'symmetric' or 'general'");
      }
    }
    if (j.contains("lambda_overrides")) {
      for (const auto& [name, v] : j["lambda_overrides"].items()) {
        const auto slot = barq::parse_lambda_name(name);
        if (!slot) throw ConfigError("lambda_overrides: unknown parameter '" + name + "'");
        barq::LambdaSetting s;
        if (v.is_string() && v.get<std::string>() == "optimizable") {
          s.optimizable = true;
          s.value = c.lambda(*slot).value;
        } else if (v.is_object()) {
          s.optimizable = v.value("optimizable", false);
          s.value = v.value("initial", v.value("value", c.lambda(*slot).value));
        } else if (v.is_number()) {
          s.value = v.get<double>();
        } else {
          throw ConfigError("lambda_overrides." + name + ": expected a number or \"optimizable\"");
        }
        c.overrides[static_cast<std::size_t>(*slot)] = s;
      }
    }
    c.validate();
    if (j.contains("free_points")) {
      std::vector<Vec3> pts;
      for (const auto& p : j["free_points"]) pts.push_back(vec_from_json(p, "free_points"));
      auto params = barq::initial_parameters(c, std::move(pts));
      if (j.contains("lambda_raw")) {
        auto raw = j["lambda_raw"].get<std::vector<double>>();
        if (raw.size() != params.lambda_raw.size()) {
          throw ConfigError("lambda_raw: expected " + std::to_string(params.lambda_raw.size()) +
                            " values");
        }
        params.lambda_raw = std::move(raw);
      }
      d.params = std::move(params);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("design file: ") + e.what());
  }
  return d;
}

void write_trace(const fs::path& csv, const optimize::OptimizationTrace& trace) {
  std::string s = "step,total,drive,rabi,grad_norm\n";
  for (const auto& r : trace.rows) {
    s += std::to_string(r.step) + ',' + fmt(r.total) + ',' + fmt(r.drive) + ',' + fmt(r.rabi) +
         ',' + fmt(r.grad_norm) + '\n';
  }
  write_atomic(csv, s);
}

void write_sweep(const fs::path& csv, const bench::SweepResult& sw) {
  std::string s = "epsilon\\Tg_delta_z";
  for (double d : sw.tg_delta) s += ',' + fmt(d);
  s += '\n';
  for (std::size_t i = 0; i < sw.epsilon.size(); ++i) {
    s += fmt(sw.epsilon[i]);
    for (std::size_t k = 0; k < sw.tg_delta.size(); ++k) s += ',' + fmt(sw.at(i, k));
    s += '\n';
  }
  write_atomic(csv, s);
}

json mc_to_json(const bench::McResult& r) {
  return {{"mean", r.mean}, {"stderr", r.stderr_}, {"n", r.n},
          {"seed", r.seed}, {"alpha", r.alpha},    {"lambda", r.lambda}};
}

void write_filter(const fs::path& csv, const bench::FilterTable& t) {
  std::string s = "omega,F\n";
  for (std::size_t i = 0; i < t.omega.size(); ++i) s += fmt(t.omega[i]) + ',' + fmt(t.value[i]) + '\n';
  write_atomic(csv, s);
}

std::string config_hash(const json& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : config.dump()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_manifest(const fs::path& path, const std::string& command, const json& config,
                    std::optional<std::uint64_t> seed, const std::vector<fs::path>& outputs) {
  json m;
  m["command"] = command;
  m["config"] = config;
  m["config_hash"] = config_hash(config);
  m["seed"] = seed ? json(*seed) : json(nullptr);
  m["versions"] = {{"curveforge", "0.1.0"},
                   {"compiler", __VERSION__},
                   {"cxx_standard", static_cast<long>(__cplusplus)}};
  json outs = json::array();
  for (const auto& p : outputs) outs.push_back(p.string());
  m["outputs"] = outs;
  write_atomic(path, dump(m));
}

}  // namespace curveforge::io
