#include "ydeflow/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ydeflow {

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ParseError("malformed number '" + cell + "' in " + where);
  }
  while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
    ++used;
  if (used != cell.size())
    throw ParseError("malformed number '" + cell + "' in " + where);
  return v;
}

}  // namespace

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::VectorXd& times, const Eigen::MatrixXd& columns) {
  if (times.size() != columns.rows())
    throw std::invalid_argument("write_csv: row count mismatch");
  if (static_cast<Eigen::Index>(header.size()) != columns.cols() + 1)
    throw std::invalid_argument("write_csv: header size mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (Eigen::Index r = 0; r < times.size(); ++r) {
    out << format_number(times(r));
    for (Eigen::Index c = 0; c < columns.cols(); ++c)
      out << ',' << format_number(columns(r, c));
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

std::string sidecar_name(const std::string& csv_path) {
  if (csv_path.size() > 4 &&
      csv_path.compare(csv_path.size() - 4, 4, ".csv") == 0)
    return csv_path.substr(0, csv_path.size() - 4) + ".json";
  return csv_path + ".json";
}

void write_path(const std::string& csv_path, const SampledPath& path) {
  std::vector<std::string> header{"t"};
  for (Eigen::Index c = 0; c < path.dim(); ++c)
    header.push_back("z" + std::to_string(c + 1));
  write_csv(csv_path, header, path.times, path.values);

  nlohmann::json meta;
  meta["schema_version"] = 1;
  meta["alpha"] = path.alpha;
  meta["generator"] = path.meta.generator;
  meta["params"] = path.meta.params;
  if (path.meta.seed) meta["seed"] = *path.meta.seed;
  if (!path.meta.method.empty()) meta["method"] = path.meta.method;
  std::ofstream side(sidecar_name(csv_path));
  if (!side)
    throw std::runtime_error("write_path: cannot open " + sidecar_name(csv_path));
  side << meta.dump(2) << '\n';
}

SampledPath read_path(const std::string& csv_path, double alpha_override) {
  std::ifstream in(csv_path);
  if (!in) throw ParseError("cannot open " + csv_path);

  std::string line;
  if (!std::getline(in, line)) throw ParseError(csv_path + ": empty file");
  const auto header = split_line(line);
  if (header.size() < 2 || header[0] != "t")
    throw ParseError(csv_path + ": header must start with 't' and one column");

  std::vector<double> times;
  std::vector<double> cells;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto parts = split_line(line);
    if (parts.size() != header.size())
      throw ParseError(csv_path + ": row " + std::to_string(row) + " has " +
                       std::to_string(parts.size()) + " cells, expected " +
                       std::to_string(header.size()));
    const std::string where = csv_path + ":" + std::to_string(row);
    times.push_back(parse_number(parts[0], where));
    for (std::size_t c = 1; c < parts.size(); ++c)
      cells.push_back(parse_number(parts[c], where));
  }
  if (times.size() < 2) throw ParseError(csv_path + ": needs at least two rows");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw ParseError(csv_path + ": times must increase strictly (row " +
                       std::to_string(i + 2) + ")");

  SampledPath path;
  const auto n = static_cast<Eigen::Index>(times.size());
  const auto d = static_cast<Eigen::Index>(header.size() - 1);
  path.times = Eigen::Map<const Eigen::VectorXd>(times.data(), n);
  path.values.resize(n, d);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < d; ++c)
      path.values(r, c) = cells[static_cast<std::size_t>(r * d + c)];

  bool have_alpha = false;
  std::ifstream side(sidecar_name(csv_path));
  if (side) {
    nlohmann::json meta;
    try {
      side >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(sidecar_name(csv_path) + ": " + e.what());
    }
    if (meta.contains("alpha") && meta["alpha"].is_number()) {
      path.alpha = meta["alpha"].get<double>();
      have_alpha = true;
    }
    if (meta.contains("generator") && meta["generator"].is_string())
      path.meta.generator = meta["generator"].get<std::string>();
    if (meta.contains("method") && meta["method"].is_string())
      path.meta.method = meta["method"].get<std::string>();
    if (meta.contains("seed") && meta["seed"].is_number_unsigned())
      path.meta.seed = meta["seed"].get<std::uint64_t>();
    if (meta.contains("params") && meta["params"].is_object())
      for (const auto& [key, value] : meta["params"].items())
        if (value.is_number()) path.meta.params[key] = value.get<double>();
  }
  if (!std::isnan(alpha_override)) {
    path.alpha = alpha_override;
    have_alpha = true;
  }
  if (!have_alpha)
    throw ParseError(csv_path +
                     ": no declared exponent (no sidecar; pass one explicitly)");
  return path;
}

}  // namespace ydeflow
