#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mdrift/core.hpp"

namespace mdrift::csv {

/// 17 significant digits, '.' decimal separator.
std::string format(double x);

/// Two-column table with header "t,value".
void write_series(const std::filesystem::path& file, std::span<const double> times,
                  std::span<const double> values);
void write_path(const std::filesystem::path& file, const SamplePath& path);

struct Series {
  std::vector<double> times;
  std::vector<double> values;
};
Series read_series(const std::filesystem::path& file);

/// Reads a (t, value) series on a uniform grid starting at 0 as a sample path.
SamplePath read_path(const std::filesystem::path& file);

/// Long format "copy,t,value", copies numbered from 1.
void write_ensemble(const std::filesystem::path& file, const Ensemble& ensemble);
Ensemble read_ensemble(const std::filesystem::path& file, bool skip_origin = false);

/// Splits one CSV line on commas (no quoting; the formats here are numeric).
std::vector<std::string> split(const std::string& line);

}  // namespace mdrift::csv
