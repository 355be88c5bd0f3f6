#pragma once

// CSV and JSON export, and the run manifest with SHA-256 content hashes.

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fhl/errors.hpp"
#include "fhl/fractional.hpp"
#include "fhl/front2d.hpp"
#include "fhl/stablelaw.hpp"
#include "fhl/validation.hpp"

namespace fhl {

using Json = nlohmann::ordered_json;

/// JSON has no infinities or NaN; they are written as strings.
inline Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline Json to_json(const Point& p) {
  Json j = Json::array();
  for (int a = 0; a < p.dim; ++a) j.push_back(number(p[a]));
  return j;
}

inline Json to_json(const SpaceTimeGrid& g) {
  Json box = Json::array();
  for (int a = 0; a < g.dimension; ++a) box.push_back({g.box[static_cast<std::size_t>(a)].lo, g.box[static_cast<std::size_t>(a)].hi});
  return {{"dimension", g.dimension}, {"box", box}, {"dx", g.dx}, {"times", g.times}};
}

inline Json to_json(const QuadratureConfig& q) {
  return {{"truncation_M", q.truncation_M ? Json(*q.truncation_M) : Json("adaptive-default")},
          {"n_intervals", q.n_intervals},
          {"rule", "midpoint"},
          {"adaptive", q.adaptive},
          {"max_doublings", q.max_doublings},
          {"workers", q.workers}};
}

inline Json to_json(const MonteCarloConfig& m) {
  return {{"n_paths", m.n_paths},
          {"tau_step", m.tau_step ? Json(*m.tau_step) : Json("default")},
          {"seed", m.seed},
          {"block_size", m.block_size},
          {"workers", m.workers}};
}

inline Json to_json(const StablePdfConfig& s) {
  return {{"integrand_nodes", s.integrand_nodes},
          {"tail_epsilon", s.tail_epsilon},
          {"singularity_margin", s.singularity_margin}};
}

inline Json to_json(const McEstimate& e) {
  return {{"mean", number(e.mean)},     {"std_error", number(e.std_error)}, {"samples", e.samples},
          {"contaminated", e.contaminated}, {"degenerate", e.degenerate},   {"tau_step", e.tau_step}};
}

inline Json to_json(const QuadratureResult& q) {
  return {{"value", number(q.value)},
          {"tail_bound", number(q.tail_bound)},
          {"tail_mass", q.tail_mass},
          {"captured_mass", q.captured_mass},
          {"truncation_M", q.truncation_M}};
}

inline Json to_json(const DppResult& d) {
  return {{"lhs", number(d.lhs)},
          {"lhs_tail_bound", number(d.lhs_tail_bound)},
          {"rhs", number(d.rhs)},
          {"rhs_std_error", number(d.rhs_std_error)},
          {"rhs_pathwise", number(d.rhs_pathwise)},
          {"rhs_pathwise_std_error", number(d.rhs_pathwise_std_error)},
          {"degenerate_fraction", d.degenerate_fraction},
          {"samples", d.samples},
          {"contaminated", d.contaminated}};
}

inline Json to_json(const ResidualReport& r) {
  Json probes = Json::array();
  for (std::size_t k = 0; k < r.probes.size(); ++k)
    probes.push_back({{"x", to_json(r.probes[k].first)},
                      {"t", r.probes[k].second},
                      {"residual", number(r.residuals[k])},
                      {"excluded", static_cast<bool>(r.excluded[k])}});
  return {{"dx", r.dx},
          {"dt", r.dt},
          {"max_residual", number(r.max_residual)},
          {"tolerance", r.tolerance ? Json(*r.tolerance) : Json(nullptr)},
          {"verdict", to_string(r.verdict)},
          {"probes", probes}};
}

inline Json to_json(const RefinementReport& r) {
  return {{"coarse_max", number(r.coarse_max)}, {"fine_max", number(r.fine_max)}, {"ratio", number(r.ratio)},
          {"required_factor", r.factor},        {"c1", number(r.c1)},             {"c2", number(r.c2)},
          {"verdict", to_string(r.verdict)}};
}

inline Json to_json(const ExponentEstimate& e) {
  Json pts = Json::array();
  for (double s : e.sups) pts.push_back(number(s));
  return {{"constant", number(e.constant)},
          {"exponent", number(e.exponent)},
          {"verdict", to_string(e.verdict)},
          {"abscissae", e.abscissae},
          {"sups", pts}};
}

inline Json to_json(const RegularityReport& r) {
  return {{"lipschitz_observed", number(r.lipschitz_observed)},
          {"lipschitz_bound", number(r.lipschitz_bound)},
          {"lipschitz", to_string(r.lipschitz)},
          {"exponent_window", r.exponent_window},
          {"initial", to_json(r.initial)},
          {"increments", to_json(r.increments)}};
}

inline Json to_json(const RadiusSample& r) {
  return {{"time", r.time}, {"mean_radius", r.mean_radius}, {"deviation", r.deviation}, {"centroid", to_json(r.centroid)}};
}

/// Everything needed to reproduce a field, without the values.
inline Json field_metadata(const SolutionField& f) {
  Json j = {{"preset", to_string(f.preset)},
            {"method", to_string(f.method)},
            {"beta", f.beta ? Json(f.beta->value()) : Json(nullptr)},
            {"grid", to_json(f.grid)},
            {"points", f.points.size()},
            {"times", f.times}};
  if (f.method == Method::Quadrature) {
    j["quadrature"] = to_json(f.quadrature);
    j["density"] = to_json(f.density);
    j["truncation_M"] = f.truncation_M;
    j["tail_mass"] = f.tail_mass;
  }
  if (f.method == Method::MonteCarlo) j["monte_carlo"] = to_json(f.monte_carlo);
  j["failed_points"] = f.failed_points;
  j["contaminated_points"] = f.contaminated_points;
  j["messages"] = f.messages;
  return j;
}

/// CSV columns x[,y],t,value[,stderr] with 17 significant digits.
inline void write_csv(std::ostream& os, const SolutionField& f) {
  const auto old = os.precision(17);
  const bool two = f.grid.dimension == 2;
  const bool mc = !f.std_errors.empty();
  os << (two ? "x,y," : "x,") << "t,value" << (mc ? ",stderr" : "") << '\n';
  for (std::size_t i = 0; i < f.points.size(); ++i)
    for (std::size_t j = 0; j < f.times.size(); ++j) {
      os << f.points[i][0] << ',';
      if (two) os << f.points[i][1] << ',';
      os << f.times[j] << ',' << f.at(i, j);
      if (mc) os << ',' << f.std_errors[f.index(i, j)];
      os << '\n';
    }
  os.precision(old);
}

inline std::string sha256_hex(const std::string& bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::ostringstream os;
  for (unsigned int k = 0; k < len; ++k) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
  return os.str();
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

/// Output files of one run plus its configuration. The manifest itself is
/// written last and lists every other file with its hash.
class RunOutput {
 public:
  explicit RunOutput(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec || !std::filesystem::is_directory(dir_)) throw ValidationError("cannot create output directory " + dir_.string());
  }

  const std::filesystem::path& dir() const { return dir_; }
  Json& config() { return config_; }
  Json& summary() { return summary_; }
  void warn(const std::string& w) { warnings_.push_back(w); }

  /// Writes `content` to dir/name and records it.
  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw ValidationError("failed writing " + path.string());
    files_.push_back({name, sha256_hex(content), content.size()});
  }

  template <class Writer>
  void write_with(const std::string& name, Writer&& w) {
    std::ostringstream os;
    w(os);
    write(name, os.str());
  }

  void write_json(const std::string& name, const Json& j) { write(name, j.dump(2) + "\n"); }

  void finish(const std::string& command, int exit_code) {
    Json files = Json::array();
    for (const auto& f : files_) files.push_back({{"path", f.name}, {"sha256", f.hash}, {"bytes", f.bytes}});
    Json m = {{"command", command},
              {"exit_code", exit_code},
              {"config", config_},
              {"summary", summary_},
              {"warnings", warnings_},
              {"files", files}};
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << m.dump(2) << "\n";
  }

 private:
  struct FileEntry {
    std::string name;
    std::string hash;
    std::size_t bytes;
  };
  std::filesystem::path dir_;
  Json config_ = Json::object();
  Json summary_ = Json::object();
  std::vector<std::string> warnings_;
  std::vector<FileEntry> files_;
};

}  // namespace fhl
