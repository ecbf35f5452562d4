#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ssrf/inference.hpp"
#include "ssrf/sample_constraints.hpp"

namespace ssrf {

/// %.9g formatting used by every emitted table.
std::string format_number(double x);

/// x rounded to 9 significant digits (so JSON output is stable across runs).
double round9(double x);

/// CSV with a header row and columns x1..xd,value. Throws DegenerateDataError
/// ("insufficient data") for fewer than two rows, ArgumentError for malformed input.
SampleData read_samples_csv(const std::string& path);
SampleData parse_samples_csv(const std::string& text);

std::string samples_csv(const Eigen::MatrixXd& locations, const Eigen::VectorXd& values);

/// Writes `content` to `path`, creating parent directories.
void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

nlohmann::json to_json(const ConstraintEstimates& c);
nlohmann::json to_json(const FitResult& r);

/// Comma-joined row of numbers.
std::string csv_row(const std::vector<double>& values);

}  // namespace ssrf
