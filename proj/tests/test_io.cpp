#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "curveforge/io.hpp"
#include "support.hpp"

using namespace curveforge;
using namespace curveforge::io;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "curveforge_io_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("curve file round trip is bitwise") {
  barq::BarqConfig cfg;
  cfg.target = gatemap::named_gate("hadamard");
  const auto pts = barq::build_control_points(barq::random_parameters(cfg, 3), cfg);
  const auto p = scratch("a.curve.json");
  write_curve(p, {pts, {{"theta_B", 0.0}}});
  const auto back = read_curve(p);
  CHECK(back.points.points() == pts.points());
  CHECK(back.metadata["theta_B"] == 0.0);
  const auto j = read_json(p);
  CHECK(j["format"] == kCurveFormat);
  CHECK(j["degree"] == 15);
}

TEST_CASE("bad inputs are configuration errors") {
  const auto p = scratch("bad.json");
  write_atomic(p, "{not json");
  CHECK_THROWS_AS(read_json(p), ConfigError);
  write_atomic(p, R"({"format":"other","points":[]})");
  CHECK_THROWS_AS(read_curve(p), ConfigError);
  CHECK_THROWS(read_file(scratch("missing.json")));
}

TEST_CASE("design file round trip") {
  DesignFile d;
  d.config.target = gatemap::named_gate("x");
  d.config.nu = 0.5;
  d.config.theta_b = 0.3;
  d.config.overrides[static_cast<std::size_t>(barq::Lambda::L2)] = barq::LambdaSetting{true, 0.1};
  d.seed = 12;
  d.params = barq::random_parameters(d.config, 12);
  const auto back = design_from_json(json::parse(design_to_json(d).dump()));
  CHECK(back.seed == 12);
  CHECK(back.config.nu == 0.5);
  CHECK(back.config.theta_b == 0.3);
  CHECK((back.config.target.u - d.config.target.u).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.config.lambda(barq::Lambda::L2).optimizable);
  REQUIRE(back.params);
  CHECK(back.params->free_points == d.params->free_points);
  CHECK(back.params->lambda_raw == d.params->lambda_raw);
  const auto u = unitary_from_json(unitary_to_json(gatemap::named_gate("hadamard").u));
  CHECK((u - gatemap::named_gate("hadamard").u).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pulse csv and sidecar") {
  const auto d = support::barq_design("x", 2);
  const auto f = gatemap::extract_controls(d.fd, gatemap::ControlMode::TTC, 0.0, {.samples = 33});
  const auto p = scratch("p.pulse.csv");
  write_pulse(p, f);
  std::ifstream in(p);
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,omega,phi,delta,omega_x,omega_y");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 33);
  CHECK(sidecar_path(p).filename() == "p.pulse.json");
  const auto side = read_json(sidecar_path(p));
  CHECK(side["mode"] == "ttc");
  CHECK(side["M"] == d.fd.M());
  CHECK(side["k_star"] == f.ttc->k_star);
}

TEST_CASE("manifest hash is stable") {
  const json a = {{"b", 1}, {"a", 2}};
  const json b = {{"a", 2}, {"b", 1}};
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(json{{"a", 3}}));
  const auto p = scratch("m.manifest.json");
  write_manifest(p, "design", a, 7, {scratch("x")});
  const auto m = read_json(p);
  CHECK(m["seed"] == 7);
  CHECK(m["config_hash"] == config_hash(a));
  CHECK(fmt(0.1) == "0.10000000000000001");
}
