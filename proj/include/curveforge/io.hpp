#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curveforge/barq.hpp"
#include "curveforge/bench.hpp"
#include "curveforge/bezier.hpp"
#include "curveforge/frenet.hpp"
#include "curveforge/gatemap.hpp"
#include "curveforge/optimize.hpp"

namespace curveforge::io {

using nlohmann::json;
namespace fs = std::filesystem;

inline constexpr const char* kCurveFormat = "curveforge.curve";
inline constexpr int kFormatVersion = 1;

// Write through a temporary file in the same directory, then rename.
void write_atomic(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);
json read_json(const fs::path& path);

// 17 significant digits.
std::string fmt(double v);

struct CurveFile {
  bezier::ControlPointSet points;
  json metadata = json::object();
};

void write_curve(const fs::path& path, const CurveFile& curve);
CurveFile read_curve(const fs::path& path);

// Sidecar next to a CSV: same stem, .json extension.
fs::path sidecar_path(const fs::path& csv);

void write_frenet(const fs::path& csv, const frenet::FrenetData& fd);
void write_pulse(const fs::path& csv, const gatemap::ControlFields& fields);

json unitary_to_json(const gatemap::Mat2c& u);
gatemap::Mat2c unitary_from_json(const json& j);

struct DesignFile {
  barq::BarqConfig config;
  std::uint64_t seed = 0;
  std::optional<barq::BarqParameters> params;
};

json design_to_json(const DesignFile& d);
DesignFile design_from_json(const json& j);

void write_trace(const fs::path& csv, const optimize::OptimizationTrace& trace);
void write_sweep(const fs::path& csv, const bench::SweepResult& sweep);
json mc_to_json(const bench::McResult& r);
void write_filter(const fs::path& csv, const bench::FilterTable& table);

// FNV-1a over the canonical JSON dump.
std::string config_hash(const json& config);
void write_manifest(const fs::path& path, const std::string& command, const json& config,
                    std::optional<std::uint64_t> seed, const std::vector<fs::path>& outputs);

}  // namespace curveforge::io
