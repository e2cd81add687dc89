#include "mdrift/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace mdrift::csv {

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot read " + file.string());
  return in;
}

double parse_number(const std::string& field, const std::filesystem::path& file) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw IoError("malformed number '" + field + "' in " + file.string());
  }
}

// Uniform grid check: t_l = l T / n within a relative 1e-9 of the step.
TimeGrid infer_grid(const std::vector<double>& times, const std::filesystem::path& file,
                    bool skip_origin) {
  if (times.size() < 2) throw IoError("a path needs at least two samples: " + file.string());
  if (std::abs(times.front()) > 0.0) throw IoError("paths must start at t = 0: " + file.string());
  const std::size_t n = times.size() - 1;
  const TimeGrid grid(times.back(), n, skip_origin);
  for (std::size_t l = 0; l <= n; ++l) {
    if (std::abs(times[l] - grid[l]) > 1e-9 * grid.step()) {
      throw IoError("times are not a uniform grid in " + file.string());
    }
  }
  return grid;
}

}  // namespace

std::string format(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    if (!field.empty() && field.back() == '\r') field.pop_back();
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void write_series(const std::filesystem::path& file, std::span<const double> times,
                  std::span<const double> values) {
  if (times.size() != values.size()) throw DimensionError("series columns differ in length");
  auto out = open_out(file);
  out << "t,value\n";
  for (std::size_t k = 0; k < times.size(); ++k) {
    out << format(times[k]) << ',' << format(values[k]) << '\n';
  }
}

void write_path(const std::filesystem::path& file, const SamplePath& path) {
  const auto times = path.grid.times();
  write_series(file, times, path.values);
}

Series read_series(const std::filesystem::path& file) {
  auto in = open_in(file);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file " + file.string());
  const auto header = split(line);
  if (header.size() != 2 || header[0] != "t") {
    throw IoError("expected header 't,value' in " + file.string());
  }
  Series s;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != 2) throw IoError("expected two columns in " + file.string());
    s.times.push_back(parse_number(fields[0], file));
    s.values.push_back(parse_number(fields[1], file));
  }
  return s;
}

SamplePath read_path(const std::filesystem::path& file) {
  Series s = read_series(file);
  return SamplePath(infer_grid(s.times, file, false), std::move(s.values));
}

void write_ensemble(const std::filesystem::path& file, const Ensemble& ensemble) {
  auto out = open_out(file);
  out << "copy,t,value\n";
  const auto times = ensemble.grid().times();
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto p = ensemble.path(i);
    for (std::size_t l = 0; l < p.size(); ++l) {
      out << (i + 1) << ',' << format(times[l]) << ',' << format(p[l]) << '\n';
    }
  }
}

Ensemble read_ensemble(const std::filesystem::path& file, bool skip_origin) {
  auto in = open_in(file);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file " + file.string());
  const auto header = split(line);
  if (header.size() != 3 || header[0] != "copy") {
    throw IoError("expected header 'copy,t,value' in " + file.string());
  }
  std::map<long, Series> copies;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    if (fields.size() != 3) throw IoError("expected three columns in " + file.string());
    auto& s = copies[static_cast<long>(parse_number(fields[0], file))];
    s.times.push_back(parse_number(fields[1], file));
    s.values.push_back(parse_number(fields[2], file));
  }
  if (copies.empty()) throw IoError("no rows in " + file.string());
  const TimeGrid grid = infer_grid(copies.begin()->second.times, file, skip_origin);
  std::vector<std::vector<double>> paths;
  for (auto& [id, s] : copies) {
    if (infer_grid(s.times, file, skip_origin) != grid) {
      throw IoError("copies do not share one grid in " + file.string());
    }
    paths.push_back(std::move(s.values));
  }
  return Ensemble(grid, std::move(paths));
}

}  // namespace mdrift::csv
