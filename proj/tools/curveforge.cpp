#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curveforge/barq.hpp"
#include "curveforge/bench.hpp"
#include "curveforge/errors.hpp"
#include "curveforge/frenet.hpp"
#include "curveforge/gatemap.hpp"
#include "curveforge/io.hpp"
#include "curveforge/optimize.hpp"

namespace cf = curveforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;

// Flag value if given on the command line, else the config entry, else the default.
class Settings {
 public:
  Settings(const CLI::App* app, json config) : app_(app), config_(std::move(config)) {}

  template <typename T>
  T get(const std::string& flag, const T& cli_value, const T& fallback) const {
    const std::string key = key_of(flag);
    if (app_->count("--" + flag) > 0) return cli_value;
    if (config_.contains(key)) {
      try {
        return config_[key].get<T>();
      } catch (const json::exception&) {
        throw cf::ConfigError("config field '" + key + "' has the wrong type");
      }
    }
    return fallback;
  }

  bool has(const std::string& flag) const {
    return app_->count("--" + flag) > 0 || config_.contains(key_of(flag));
  }

  const json& config() const { return config_; }

  static std::string key_of(std::string flag) {
    for (auto& c : flag) {
      if (c == '-') c = '_';
    }
    return flag;
  }

 private:
  const CLI::App* app_;
  json config_;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  json j = cf::io::read_json(path);
  if (!j.is_object()) throw cf::ConfigError("config file must hold a JSON object");
  return j;
}

cf::gatemap::GateTarget resolve_gate(const std::string& name, const std::vector<double>& unitary) {
  if (!unitary.empty()) {
    return cf::gatemap::GateTarget::from_unitary(cf::io::unitary_from_json(json(unitary)));
  }
  return cf::gatemap::named_gate(name);
}

cf::frenet::FrenetData frame_of(const cf::bezier::ControlPointSet& pts, std::size_t grid) {
  cf::frenet::FrenetOptions o;
  o.grid_size = grid;
  return cf::frenet::evaluate_frenet(cf::frenet::make_bezier_curve(pts), o);
}

struct CurveContext {
  cf::io::CurveFile file;
  std::optional<double> theta_b;
  cf::gatemap::GateTarget target = cf::gatemap::named_gate("identity");
  bool has_target = false;
};

CurveContext load_curve(const std::string& path) {
  if (path.empty()) throw cf::ConfigError("missing required field 'curve'");
  CurveContext c;
  c.file = cf::io::read_curve(path);
  const auto& m = c.file.metadata;
  if (m.contains("theta_B") && m["theta_B"].is_number()) c.theta_b = m["theta_B"].get<double>();
  if (m.contains("target")) {
    c.target = cf::gatemap::GateTarget::from_unitary(cf::io::unitary_from_json(m["target"]));
    c.has_target = true;
  }
  return c;
}

fs::path manifest_for(const fs::path& out) {
  fs::path p = out;
  p.replace_extension(".manifest.json");
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curveforge: gate design and verification with Bezier space curves"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "JSON config; flags override its fields");

  // design
  auto* design = app.add_subcommand("design", "optimize a BARQ curve for a target gate");
  std::string gate = "x", out_prefix = "design";
  std::vector<double> unitary;
  int n_free = 10, steps = 5000, stride = 10, grid_opt = 513;
  double nu = 0.25, theta_b = 0.0, lr = 5e-3;
  std::uint64_t seed = 0;
  bool opt_theta = false, exact_max = false;
  design->add_option("--gate", gate, "identity, x, y, z or hadamard");
  design->add_option("--unitary", unitary, "target as 8 reals (row-major re, im)")->expected(8);
  design->add_option("--n-free", n_free);
  design->add_option("--nu", nu);
  design->add_option("--theta-b", theta_b);
  design->add_flag("--optimize-theta-b", opt_theta);
  design->add_option("--steps", steps);
  design->add_option("--seed", seed);
  design->add_option("--lr", lr);
  design->add_option("--stride", stride, "trace stride");
  design->add_option("--grid", grid_opt, "optimization grid samples");
  design->add_flag("--exact-max", exact_max, "exact maximum in the Rabi term");
  design->add_option("--out", out_prefix, "output prefix");

  // shared curve-reading options
  std::string curve_path, out_path, mode_name = "ttc", reference = "target";
  int grid = 2049, samples = 0;
  bool nonnegative = false;

  auto* pulse = app.add_subcommand("pulse", "extract control fields from a curve");
  pulse->add_option("--curve", curve_path);
  pulse->add_option("--mode", mode_name, "xy or ttc");
  pulse->add_option("--theta-b", theta_b);
  pulse->add_option("--grid", grid);
  pulse->add_option("--samples", samples, "uniform time samples (default: grid)");
  pulse->add_flag("--nonnegative", nonnegative, "nonnegative envelope with pi phase jumps");
  pulse->add_option("--out", out_path);

  auto* frame = app.add_subcommand("frame", "export the Frenet frame of a curve");
  frame->add_option("--curve", curve_path);
  frame->add_option("--grid", grid);
  frame->add_option("--out", out_path);

  auto* bstatic = app.add_subcommand("bench-static", "quasi-static noise sweep");
  double eps_max = 0.1, dz_max = 0.5;
  int n_eps = 41, n_dz = 41, n_steps = 4096;
  bstatic->add_option("--curve", curve_path);
  bstatic->add_option("--grid", grid);
  bstatic->add_option("--eps-max", eps_max);
  bstatic->add_option("--dz-max", dz_max, "maximum T_g delta_z");
  bstatic->add_option("--n-eps", n_eps);
  bstatic->add_option("--n-dz", n_dz);
  bstatic->add_option("--steps", n_steps);
  bstatic->add_option("--reference", reference, "target or noise-free");
  bstatic->add_option("--out", out_path);

  auto* bdyn = app.add_subcommand("bench-dynamic", "colored dephasing Monte Carlo");
  double alpha = 2.0, lambda = 0.0;
  int n_real = 1000, noise_samples = 4096;
  bdyn->add_option("--curve", curve_path);
  bdyn->add_option("--grid", grid);
  bdyn->add_option("--alpha", alpha);
  bdyn->add_option("--lambda", lambda, "noise amplitude (rad/time)");
  bdyn->add_option("--realizations", n_real);
  bdyn->add_option("--noise-samples", noise_samples);
  bdyn->add_option("--steps", n_steps);
  bdyn->add_option("--seed", seed);
  bdyn->add_option("--out", out_path);

  auto* filt = app.add_subcommand("filterfn", "dephasing filter function of a curve");
  int n_omega = 2048;
  double w_lo = 1e-3, w_hi = 200.0;
  filt->add_option("--curve", curve_path);
  filt->add_option("--grid", grid);
  filt->add_option("--n-omega", n_omega);
  filt->add_option("--omega-min", w_lo, "in units of 2 pi / T_g");
  filt->add_option("--omega-max", w_hi, "in units of 2 pi / T_g");
  filt->add_option("--out", out_path);

  auto* cficmd = app.add_subcommand("cfi", "curve filtering index of a closed curve");
  cficmd->add_option("--curve", curve_path);
  cficmd->add_option("--grid", grid);
  cficmd->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  fs::path trace_path;
  try {
    auto* sub = app.get_subcommands().front();
    const Settings s(sub, load_config(config_path));
    const std::string cmd = sub->get_name();
    std::vector<fs::path> outputs;
    std::optional<std::uint64_t> used_seed;

    if (cmd == "design") {
      cf::barq::BarqConfig c;
      c.target = resolve_gate(s.get("gate", gate, std::string("x")),
                              s.get("unitary", unitary, std::vector<double>{}));
      c.n_free = s.get("n-free", n_free, 10);
      c.nu = s.get("nu", nu, 0.25);
      c.theta_b = s.get("theta-b", theta_b, 0.0);
      c.optimize_theta_b = s.get("optimize-theta-b", opt_theta, false);
      c.validate();
      cf::optimize::AdamOptions ao;
      ao.steps = s.get("steps", steps, 5000);
      ao.lr = s.get("lr", lr, 5e-3);
      ao.stride = s.get("stride", stride, 10);
      if (!s.has("seed")) throw cf::ConfigError("missing required field 'seed'");
      const auto sd = s.get("seed", seed, std::uint64_t{0});
      used_seed = sd;
      auto spec = cf::optimize::LossSpec::barq_default();
      spec.exact_max = s.get("exact-max", exact_max, false);
      const int og = s.get("grid", grid_opt, 513);
      if (og < 3) throw cf::ConfigError("grid must be at least 3");
      const cf::optimize::BarqObjective obj(c, spec, static_cast<std::size_t>(og));
      const auto p0 = cf::barq::random_parameters(c, sd);
      const std::string prefix = s.get("out", out_prefix, std::string("design"));
      trace_path = prefix + ".trace.csv";
      const auto trace = cf::optimize::run_adam(
          [&](std::span<const double> x) { return obj.evaluate(x); }, p0.flatten(obj.layout()), ao);
      const auto params =
          cf::barq::BarqParameters::unflatten(trace.final_params, obj.layout(), c);
      cf::io::DesignFile d{c, sd, params};
      d.config.theta_b = params.theta_b;
      const fs::path dpath = prefix + ".design.json", cpath = prefix + ".curve.json";
      cf::io::write_atomic(dpath, cf::io::design_to_json(d).dump(2) + "\n");
      cf::io::CurveFile cfile{cf::barq::build_control_points(params, c),
                              {{"theta_B", params.theta_b},
                               {"target", cf::io::unitary_to_json(c.target.u)},
                               {"nu", c.nu},
                               {"n_free", c.n_free}}};
      cf::io::write_curve(cpath, cfile);
      cf::io::write_trace(trace_path, trace);
      outputs = {dpath, cpath, trace_path};
      const auto& last = trace.rows.back();
      std::cout << "J_drive " << trace.rows.front().drive << " -> " << last.drive << ", J_Rabi "
                << trace.rows.front().rabi << " -> " << last.rabi << "\n";
      cf::io::write_manifest(fs::path(prefix + ".manifest.json"), cmd,
                             {{"gate", gate},
                              {"target_unitary", cf::io::unitary_to_json(c.target.u)},
                              {"n_free", c.n_free},
                              {"nu", c.nu},
                              {"theta_B", c.theta_b},
                              {"optimize_theta_B", c.optimize_theta_b},
                              {"steps", ao.steps},
                              {"lr", ao.lr},
                              {"beta1", ao.beta1},
                              {"beta2", ao.beta2},
                              {"eps", ao.eps},
                              {"stride", ao.stride},
                              {"grid", og},
                              {"exact_max", spec.exact_max},
                              {"seed", sd}},
                             used_seed, outputs);
      return kOk;
    }

    const auto ctx = load_curve(s.get("curve", curve_path, std::string()));
    const int g = s.get("grid", grid, 2049);
    if (g < 3) throw cf::ConfigError("grid must be at least 3");
    const auto fd = frame_of(ctx.file.points, static_cast<std::size_t>(g));
    json run = s.config();
    run["curve"] = s.get("curve", curve_path, std::string());
    run["grid"] = g;

    auto require_out = [&](const std::string& def) {
      const auto o = s.get("out", out_path, def);
      run["out"] = o;
      return fs::path(o);
    };
    auto ttc_fields = [&](std::size_t n) {
      if (!ctx.theta_b) throw cf::ConfigError("curve metadata lacks theta_B needed for TTC");
      cf::gatemap::ExtractOptions eo;
      eo.samples = n;
      return cf::gatemap::extract_controls(fd, cf::gatemap::ControlMode::TTC, ctx.theta_b, eo);
    };

    if (cmd == "pulse") {
      const auto mode = cf::gatemap::parse_control_mode(s.get("mode", mode_name, std::string("ttc")));
      std::optional<double> tb = ctx.theta_b;
      if (s.has("theta-b")) tb = s.get("theta-b", theta_b, 0.0);
      cf::gatemap::ExtractOptions eo;
      eo.samples = static_cast<std::size_t>(s.get("samples", samples, 0));
      eo.nonnegative_omega = s.get("nonnegative", nonnegative, false);
      const auto f = cf::gatemap::extract_controls(fd, mode, tb, eo);
      const auto out = require_out("pulse.csv");
      cf::io::write_pulse(out, f);
      outputs = {out, cf::io::sidecar_path(out)};
    } else if (cmd == "frame") {
      const auto out = require_out("frame.csv");
      cf::io::write_frenet(out, fd);
      outputs = {out, cf::io::sidecar_path(out)};
    } else if (cmd == "bench-static") {
      if (!ctx.has_target) throw cf::ConfigError("curve metadata lacks the target gate");
      const auto f = ttc_fields(0);
      const int st = s.get("steps", n_steps, 4096);
      if (st < static_cast<int>(f.size())) throw cf::ConfigError("steps must be >= pulse samples");
      const auto ref_name = s.get("reference", reference, std::string("target"));
      cf::bench::PropagateOptions po;
      po.n_steps = static_cast<std::size_t>(st);
      cf::bench::Su2 ref;
      if (ref_name == "target") {
        ref = cf::bench::Su2::from_matrix(ctx.target.u);
      } else if (ref_name == "noise-free") {
        ref = cf::bench::propagate_su2(f, po);
      } else {
        throw cf::ConfigError("reference: expected 'target' or 'noise-free'");
      }
      const double em = s.get("eps-max", eps_max, 0.1), dm = s.get("dz-max", dz_max, 0.5);
      const int ne = s.get("n-eps", n_eps, 41), nd = s.get("n-dz", n_dz, 41);
      if (ne < 1 || nd < 1) throw cf::ConfigError("sweep grids need at least one point");
      const auto eg = cf::bench::linspace(-em, em, static_cast<std::size_t>(ne));
      const auto dg = cf::bench::linspace(-dm, dm, static_cast<std::size_t>(nd));
      const auto sw = cf::bench::static_sweep(f, ref, eg, dg, po.n_steps);
      const auto out = require_out("sweep.csv");
      cf::io::write_sweep(out, sw);
      outputs = {out};
    } else if (cmd == "bench-dynamic") {
      if (!ctx.has_target) throw cf::ConfigError("curve metadata lacks the target gate");
      if (!s.has("seed")) throw cf::ConfigError("missing required field 'seed'");
      const auto sd = s.get("seed", seed, std::uint64_t{0});
      used_seed = sd;
      cf::bench::McOptions mo;
      mo.noise_samples = static_cast<std::size_t>(s.get("noise-samples", noise_samples, 4096));
      mo.n_steps = static_cast<std::size_t>(s.get("steps", n_steps, 4096));
      const cf::bench::PsdModel psd{s.get("alpha", alpha, 2.0), s.get("lambda", lambda, 0.0)};
      const auto f = ttc_fields(0);
      const auto r = cf::bench::mc_infidelity(f, cf::bench::Su2::from_matrix(ctx.target.u), psd,
                                              s.get("realizations", n_real, 1000), sd, mo);
      const auto out = require_out("mc.json");
      cf::io::write_atomic(out, cf::io::mc_to_json(r).dump(2) + "\n");
      outputs = {out};
    } else if (cmd == "filterfn") {
      const int nw = s.get("n-omega", n_omega, 2048);
      if (nw < 2) throw cf::ConfigError("n-omega must be at least 2");
      const auto grid_w = cf::bench::overlap_grid(fd.total_length, static_cast<std::size_t>(nw),
                                                  s.get("omega-min", w_lo, 1e-3),
                                                  s.get("omega-max", w_hi, 200.0));
      const auto out = require_out("filter.csv");
      cf::io::write_filter(out, cf::bench::filter_function(fd, grid_w));
      outputs = {out};
    } else if (cmd == "cfi") {
      const double v = cf::bench::cfi(fd);
      json r = {{"cfi", v}, {"T_g", fd.total_length}};
      std::cout << r.dump() << "\n";
      if (s.has("out")) {
        const auto out = require_out("cfi.json");
        cf::io::write_atomic(out, r.dump(2) + "\n");
        outputs = {out};
      }
    }
    if (!outputs.empty()) {
      cf::io::write_manifest(manifest_for(outputs.front()), cmd, run, used_seed, outputs);
    }
    return kOk;
  } catch (const cf::optimize::OptimizationDiverged& e) {
    if (!trace_path.empty()) cf::io::write_trace(trace_path, e.trace());
    std::cerr << "error: " << e.what() << "; trace written to " << trace_path << "\n";
    return kNumerical;
  } catch (const cf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const cf::DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::runtime_error& e) {
    // Precondition, regularity, frame and numerical failures.
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
