#include "hricausal/timeseries.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hricausal/error.hpp"

namespace hricausal {

std::vector<double> TimeSeriesBatch::column(std::size_t index) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row.at(index));
  return out;
}

std::size_t TimeSeriesBatch::find(std::string_view name) const {
  for (std::size_t i = 0; i < variable_names.size(); ++i) {
    if (variable_names[i] == name) return i;
  }
  return npos;
}

void TimeSeriesBatch::validate() const {
  if (variable_names.empty()) throw ValidationError("batch has no variables");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != variable_names.size()) {
      throw ValidationError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                            " entries, expected " + std::to_string(variable_names.size()));
    }
    for (double v : rows[r]) {
      if (!std::isfinite(v)) throw ValidationError("row " + std::to_string(r) + " has a non-finite cell");
    }
  }
  if (!(dt > 0.0)) throw ValidationError("batch dt must be positive");
}

TimeSeriesBatch analysis_view(const TimeSeriesBatch& batch) {
  const auto time_col = batch.find(kTimeColumn);
  if (time_col == TimeSeriesBatch::npos) return batch;
  TimeSeriesBatch out;
  out.t0 = batch.t0;
  out.dt = batch.dt;
  for (std::size_t c = 0; c < batch.n_vars(); ++c) {
    if (c != time_col) out.variable_names.push_back(batch.variable_names[c]);
  }
  out.rows.reserve(batch.rows.size());
  for (const auto& row : batch.rows) {
    std::vector<double> r;
    r.reserve(row.size() - 1);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c != time_col) r.push_back(row[c]);
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

namespace {

void append_number(std::string& out, double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), end);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

void write_csv(const TimeSeriesBatch& batch, const std::filesystem::path& path) {
  batch.validate();
  std::string text;
  for (std::size_t c = 0; c < batch.n_vars(); ++c) {
    if (c) text += ',';
    text += batch.variable_names[c];
  }
  text += '\n';
  for (const auto& row : batch.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) text += ',';
      append_number(text, row[c]);
    }
    text += '\n';
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

void write_csv_atomic(const TimeSeriesBatch& batch, const std::filesystem::path& path) {
  auto tmp = path.parent_path() / ("." + path.filename().string() + ".tmp");
  write_csv(batch, tmp);
  std::filesystem::rename(tmp, path);
}

TimeSeriesBatch read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());

  TimeSeriesBatch batch;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (!have_header) {
      if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
      if (trim(view).empty()) throw ParseError("missing header", line_no);
      for (auto cell : split(view)) {
        cell = trim(cell);
        if (cell.empty()) throw ParseError("empty column name in header", line_no);
        batch.variable_names.emplace_back(cell);
      }
      have_header = true;
      continue;
    }
    if (trim(view).empty()) continue;
    const auto cells = split(view);
    if (cells.size() != batch.variable_names.size()) {
      throw ParseError("expected " + std::to_string(batch.variable_names.size()) +
                           " columns, found " + std::to_string(cells.size()),
                       line_no);
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (auto cell : cells) {
      cell = trim(cell);
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size() ||
          !std::isfinite(value)) {
        throw ParseError("non-numeric cell '" + std::string(cell) + "'", line_no);
      }
      row.push_back(value);
    }
    batch.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("missing header", line_no == 0 ? 1 : line_no);

  const auto time_col = batch.find(kTimeColumn);
  if (time_col != TimeSeriesBatch::npos && !batch.rows.empty()) {
    batch.t0 = batch.rows.front()[time_col];
    if (batch.rows.size() >= 2) {
      const double dt = batch.rows[1][time_col] - batch.rows[0][time_col];
      if (dt > 0.0) batch.dt = dt;
    }
  }
  return batch;
}

}  // namespace hricausal
