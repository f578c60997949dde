#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hricausal {

inline constexpr std::string_view kTimeColumn = "time";

/// Fixed-rate table of named variables; the unit of causal analysis.
/// Rows are stored row-major: rows[sample][variable].
struct TimeSeriesBatch {
  std::vector<std::string> variable_names;
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<std::vector<double>> rows;

  std::size_t n_samples() const { return rows.size(); }
  std::size_t n_vars() const { return variable_names.size(); }

  std::vector<double> column(std::size_t index) const;
  /// Index of the named column, or npos.
  std::size_t find(std::string_view name) const;

  /// Throws ValidationError on ragged rows or non-finite cells.
  void validate() const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

/// Copy of `batch` without its "time" column (if any); this is what the
/// discovery algorithms analyse.
TimeSeriesBatch analysis_view(const TimeSeriesBatch& batch);

/// Writes a comma-separated file: a header line, then one line per row using
/// shortest round-trip decimal formatting.
void write_csv(const TimeSeriesBatch& batch, const std::filesystem::path& path);

/// Writes to a hidden temporary file next to `path`, then renames it into place.
void write_csv_atomic(const TimeSeriesBatch& batch, const std::filesystem::path& path);

/// Parses a file produced by write_csv. Throws ParseError naming the offending
/// line on malformed input. t0/dt are recovered from a "time" column when
/// present, otherwise 0 and 1.
TimeSeriesBatch read_csv(const std::filesystem::path& path);

}  // namespace hricausal
