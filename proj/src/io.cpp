#include "kpplab/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "kpplab/error.hpp"

namespace kpplab {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", x);
  // snprintf honours LC_NUMERIC; force '.'.
  for (char* p = buf; *p; ++p)
    if (*p == ',') *p = '.';
  return buf;
}

CsvWriter::CsvWriter(const std::vector<std::string>& header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != columns_) throw Error(ErrorKind::invalid_argument, "CSV row width mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_number(values[i]);
  }
  text_ += '\n';
}

namespace {

std::vector<std::string> coord_header(const Habitat& h, std::vector<std::string> head) {
  for (int d = 0; d < h.dim(); ++d) head.push_back("x" + std::to_string(d));
  head.push_back("u");
  return head;
}

void field_rows(CsvWriter& w, const Field& f, std::optional<double> t) {
  const Habitat& h = f.habitat;
  std::vector<double> row;
  for (std::size_t i = 0; i < h.size(); ++i) {
    row.clear();
    if (t) row.push_back(*t);
    const Point p = h.point(i);
    for (int d = 0; d < h.dim(); ++d) row.push_back(p[d]);
    row.push_back(f[i]);
    w.row(row);
  }
}

}  // namespace

std::string trajectory_csv(const Trajectory& traj) {
  CsvWriter w(coord_header(traj.habitat, {"t"}));
  for (std::size_t k = 0; k < traj.times.size(); ++k) field_rows(w, traj.snapshots[k], traj.times[k]);
  return w.str();
}

std::string field_csv(const Field& field) {
  CsvWriter w(coord_header(field.habitat, {}));
  field_rows(w, field, std::nullopt);
  return w.str();
}

std::string front_csv(const FrontTrace& trace) {
  CsvWriter w({"t", "position"});
  for (std::size_t k = 0; k < trace.times.size(); ++k) w.row({trace.times[k], trace.positions[k]});
  return w.str();
}

std::string dispersion_csv(const DispersionRelation& rel, double mu_lo, double mu_hi, int points) {
  if (!(mu_lo > 0.0 && mu_hi > mu_lo) || points < 2)
    throw Error(ErrorKind::invalid_argument, "dispersion curve needs 0 < mu_lo < mu_hi and >= 2 points");
  CsvWriter w({"mu", "lambda", "lambda_over_mu"});
  for (int k = 0; k < points; ++k) {
    const double mu = mu_lo + (mu_hi - mu_lo) * k / (points - 1);
    const double lam = rel.lambda(mu);
    w.row({mu, lam, lam / mu});
  }
  return w.str();
}

json to_json(const Habitat& h) {
  return json{{"kind", h.kind() == HabitatKind::lattice ? "lattice" : "continuum"},
              {"dim", h.dim()},
              {"L", h.half_extent()},
              {"h", h.spacing()},
              {"boundary", h.boundary() == Boundary::clamp ? "clamp" : "periodic"},
              {"points", h.size()}};
}

json to_json(const Reaction& r) {
  json j{{"family", r.family() == GrowthFamily::linear ? "linear" : "logistic"},
         {"r0", r.r0()},
         {"A", r.amplitude()},
         {"L0", r.radius()}};
  j[r.family() == GrowthFamily::linear ? "b" : "K"] = r.shape();
  return j;
}

json to_json(const DispersalOp& op) {
  json j{{"kind", to_string(op.kind())}};
  if (op.kind() == DispersalKind::nonlocal) {
    static const char* names[] = {"uniform", "tent", "smooth"};
    j["profile"] = names[static_cast<int>(op.kernel().profile())];
    j["delta0"] = op.kernel().delta0();
  } else if (op.kind() == DispersalKind::discrete) {
    j["rates"] = op.lattice_weights().rates();
  }
  return j;
}

json to_json(const SpeedResult& r) {
  return json{{"c_star", r.c_star},
              {"mu_star", r.mu_star},
              {"bracket", {r.bracket_lo, r.bracket_hi}},
              {"evaluations", r.evaluations}};
}

json to_json(const SpeedEstimate& e) {
  json j{{"slope", e.slope},
         {"intercept", e.intercept},
         {"window", {e.t_begin, e.t_end}},
         {"samples", e.samples},
         {"rms_residual", e.rms_residual}};
  if (std::isfinite(e.theoretical)) {
    j["theoretical"] = e.theoretical;
    j["relative_error"] = e.relative_error;
  }
  return j;
}

json to_json(const ConeVerdict& v) {
  return json{{"inside_evaluated", v.inside_evaluated},
              {"outside_evaluated", v.outside_evaluated},
              {"inside_ok", v.inside_ok},
              {"outside_ok", v.outside_ok},
              {"inside_min", v.inside_min},
              {"outside_max", v.outside_max},
              {"passed", v.passed()}};
}

json to_json(const ClauseVerdict& v) {
  return json{{"clause", v.clause},
              {"speed", v.speed},
              {"value", v.value},
              {"threshold", v.threshold},
              {"passed", v.passed}};
}

json to_json(const StationaryResult& r) {
  return json{{"route", to_string(r.route)},
              {"residual", r.residual},
              {"time", r.time},
              {"iterations", r.records},
              {"last_change", r.last_change},
              {"monotone", r.monotone},
              {"monotonicity_violation", r.monotonicity_violation},
              {"min", r.u_star.min()},
              {"max", r.u_star.max()}};
}

ArtifactDir::ArtifactDir(fs::path target) : target_(std::move(target)) {
  if (target_.filename().empty()) target_ = target_.parent_path();
  const fs::path parent = target_.has_parent_path() ? target_.parent_path() : fs::path(".");
  fs::create_directories(parent);
  std::random_device rd;
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  for (int attempt = 0; attempt < 100; ++attempt) {
    char suffix[64];
    std::snprintf(suffix, sizeof suffix, ".tmp-%llx-%x", static_cast<unsigned long long>(stamp), rd());
    fs::path cand = parent / (target_.filename().string() + suffix);
    if (fs::create_directory(cand)) {
      staging_ = cand;
      return;
    }
  }
  throw Error(ErrorKind::invalid_argument, "cannot create a staging directory next to " + target_.string());
}

ArtifactDir::~ArtifactDir() {
  if (!committed_) {
    std::error_code ec;
    fs::remove_all(staging_, ec);
  }
}

void ArtifactDir::write(const std::string& name, const std::string& content) {
  if (committed_) throw Error(ErrorKind::invalid_argument, "artifact directory already committed");
  std::ofstream out(staging_ / name, std::ios::binary);
  out << content;
  if (!out) throw Error(ErrorKind::invalid_argument, "failed writing " + (staging_ / name).string());
}

void ArtifactDir::write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }

fs::path ArtifactDir::commit() {
  if (committed_) return target_;
  if (fs::exists(target_)) fs::remove_all(target_);
  fs::rename(staging_, target_);
  committed_ = true;
  return target_;
}

}  // namespace kpplab
