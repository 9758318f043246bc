#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ydeflow/paths.hpp"

namespace ydeflow {

// Malformed input files (CSV or sidecar JSON) throw this; callers map it to
// their parse-error exit path.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Columnar CSV with a header row; every number is written with 17
// significant digits so a rewrite of a reread file is byte-identical.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::VectorXd& times, const Eigen::MatrixXd& columns);

// Path storage: data as CSV (t, z1, ..., zd) plus a JSON sidecar holding
// {schema_version, alpha, generator, params, seed, method}.
void write_path(const std::string& csv_path, const SampledPath& path);

// Sidecar naming: "foo.csv" -> "foo.json", anything else appends ".json".
std::string sidecar_name(const std::string& csv_path);

// Reads a stored path.  The declared exponent comes from the sidecar; if the
// sidecar is missing, alpha_override must supply it (NaN means "not given").
SampledPath read_path(const std::string& csv_path,
                      double alpha_override = std::nan(""));

}  // namespace ydeflow
