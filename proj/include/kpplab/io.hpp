#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "kpplab/experiments.hpp"
#include "kpplab/speeds.hpp"
#include "kpplab/stationary.hpp"

namespace kpplab {

inline constexpr const char* kVersion = "0.1.0";

// %.17e: round-trip precision, '.' separator regardless of locale.
std::string format_number(double x);

// Rows are joined with ',' and terminated by '\n'.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  const std::string& str() const { return text_; }

 private:
  std::size_t columns_;
  std::string text_;
};

// Columns t, x0[, x1], u; one line per grid point per recorded time.
std::string trajectory_csv(const Trajectory& traj);
// Columns x0[, x1], u.
std::string field_csv(const Field& field);
// Columns t, position.
std::string front_csv(const FrontTrace& trace);
// Columns mu, lambda, lambda_over_mu.
std::string dispersion_csv(const DispersionRelation& rel, double mu_lo, double mu_hi, int points);

nlohmann::json to_json(const Habitat& habitat);
nlohmann::json to_json(const Reaction& reaction);
nlohmann::json to_json(const DispersalOp& op);
nlohmann::json to_json(const SpeedResult& r);
nlohmann::json to_json(const SpeedEstimate& e);
nlohmann::json to_json(const ConeVerdict& v);
nlohmann::json to_json(const ClauseVerdict& v);
// Metadata only; the profile goes to CSV.
nlohmann::json to_json(const StationaryResult& r);

// Files are staged in a sibling temporary directory and moved into place by
// commit(); an existing target directory is replaced. Without commit() the
// staging directory is removed on destruction.
class ArtifactDir {
 public:
  explicit ArtifactDir(std::filesystem::path target);
  ~ArtifactDir();
  ArtifactDir(const ArtifactDir&) = delete;
  ArtifactDir& operator=(const ArtifactDir&) = delete;

  void write(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::json& j);
  std::filesystem::path commit();
  const std::filesystem::path& staging() const { return staging_; }

 private:
  std::filesystem::path target_;
  std::filesystem::path staging_;
  bool committed_ = false;
};

}  // namespace kpplab
