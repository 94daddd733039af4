#pragma once

// Batch front end: instance generation, verification sweeps, and CSV
// summaries of verification reports.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgmax/exponent.hpp"

namespace mgmax::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One entry of --q: a number, "inf", or a multiple of p ("p", "2p").
struct QToken {
  enum class Kind { absolute, relative, infinite } kind = Kind::infinite;
  double value = 0.0;

  static QToken parse(const std::string& text);
  Exponent resolve(double p) const;
};

struct SweepConfig {
  std::size_t trials = 10;
  std::uint64_t seed = 0;
  std::vector<double> p_values{1.5, 2.0, 3.0};
  std::vector<QToken> q_values{QToken::parse("p"), QToken::parse("2p"), QToken::parse("inf")};
  /// Empty selects r = (p + 1) / p.
  std::optional<double> r;
  std::size_t depth_min = 1;
  std::size_t depth_max = 4;
  std::size_t branch_min = 2;
  std::size_t branch_max = 3;
  double tol = 1e-9;
  std::filesystem::path out;

  std::size_t candidates = 200;
  std::size_t ascent_rounds = 50;
  std::size_t workers = 1;
  /// Multiplies C(p) everywhere; only for fault-injection runs.
  double cp_factor = 1.0;

  /// Throws ConfigError.
  void validate() const;
  /// Every (p, q) pair in flag order. Throws ConfigError if some q < p.
  std::vector<std::pair<double, Exponent>> exponent_pairs() const;
};

/// Writes `trials` instances (model, coefficient and Sawyer files) into
/// config.out and prints one manifest line per instance.
void cmd_generate(const SweepConfig& config, std::ostream& manifest);

/// Runs every check for every (instance, p, q) and appends one JSON record
/// per check to `report`, ordered by instance id. Returns 0 when all checks
/// pass, 1 when any fails, 2 when an instance cannot be read.
int cmd_verify(const SweepConfig& config, const std::vector<std::filesystem::path>& instances,
               std::ostream& report, std::ostream& log);

/// Aggregates a report into CSV with columns p,q,metric,value,instance_id.
/// Throws ConfigError if the report does not exist.
void cmd_report(const std::filesystem::path& report, std::ostream& csv);

/// Instance files (not coefficient or Sawyer siblings) in a directory, sorted.
std::vector<std::filesystem::path> list_instances(const std::filesystem::path& dir);

}  // namespace mgmax::cli
