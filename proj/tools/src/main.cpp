// ydeflow: batch front end for the library.  Every command reads its inputs,
// computes, then writes all outputs at the end, so a failing run leaves no
// partial files.  Summaries are JSON on stdout (and optionally a file).
//
// Exit codes: 0 ok, 2 usage, 3 input parse error, 4 parameter out of range,
// 5 module-level failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ydeflow/homogeneous.hpp"
#include "ydeflow/io.hpp"
#include "ydeflow/linear.hpp"
#include "ydeflow/paths.hpp"
#include "ydeflow/so3.hpp"
#include "ydeflow/solver.hpp"
#include "ydeflow/transport.hpp"
#include "ydeflow/young.hpp"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitRange = 4;
constexpr int kExitModule = 5;

// Shared option set; registered per subcommand so every command documents
// its full flag surface.
struct Common {
  std::string out;
  std::string summary;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  double alpha = std::nan("");
};

void add_common(CLI::App* cmd, Common* c, bool needs_out) {
  auto* out = cmd->add_option("--out", c->out, "Primary output file");
  if (needs_out) out->required();
  cmd->add_option("--summary", c->summary,
                  "Write the JSON summary to this file as well as stdout");
  cmd->add_option("--tol", c->tol, "Tolerance knob (command-specific meaning)")
      ->capture_default_str();
  cmd->add_option("--seed", c->seed, "Random seed (generation commands)")
      ->capture_default_str();
  cmd->add_option("--alpha", c->alpha,
                  "Holder exponent override for drivers without a sidecar");
}

void emit_summary(const json& j, const Common& c) {
  std::string text = j.dump(2) + "\n";
  std::cout << text;
  if (!c.summary.empty()) {
    std::ofstream f(c.summary, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write summary file " + c.summary);
    f << text;
  }
}

json base_summary(const std::string& command) {
  return json{{"schema_version", 1}, {"command", command}};
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ydeflow::ParseError("cannot parse " + what + ": '" + s + "'");
  }
}

Eigen::VectorXd parse_vector(const std::string& s, const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) vals.push_back(parse_double(cell, what));
  if (vals.empty()) throw ydeflow::ParseError(what + " is empty");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), vals.size());
}

json read_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ydeflow::ParseError("cannot open " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw ydeflow::ParseError(path + ": " + e.what());
  }
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ydeflow::ParseError(where + ": expected an array of rows");
  const std::size_t rows = j.size(), cols = j.front().size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols)
      throw ydeflow::ParseError(where + ": ragged rows");
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number())
        throw ydeflow::ParseError(where + ": non-numeric entry");
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

// a.json: {"matrix": [[...]]} or a bare [[...]]; {"matrices": [...]}
// supplies one matrix per driver component.
std::vector<Eigen::MatrixXd> parse_matrices(const std::string& path) {
  json j = read_json_file(path);
  if (j.is_object() && j.contains("matrices")) {
    std::vector<Eigen::MatrixXd> out;
    for (const auto& item : j["matrices"])
      out.push_back(matrix_from_json(item, path));
    if (out.empty()) throw ydeflow::ParseError(path + ": empty matrices list");
    return out;
  }
  if (j.is_object() && j.contains("matrix"))
    return {matrix_from_json(j["matrix"], path)};
  return {matrix_from_json(j, path)};
}

Eigen::MatrixXd parse_matrix(const std::string& path) {
  auto ms = parse_matrices(path);
  if (ms.size() != 1)
    throw std::invalid_argument(path + ": expected a single matrix here");
  return ms.front();
}

ydeflow::SampledPath read_driver(const std::string& path, const Common& c) {
  return ydeflow::read_path(path, c.alpha);
}

// so(3) generators: "axis:x|y|z" (unit rate) or "wx,wy,wz".
Eigen::Matrix3d parse_so3_generator(const std::string& s) {
  if (s.rfind("axis:", 0) == 0) {
    std::string axis = s.substr(5);
    Eigen::Vector3d w;
    if (axis == "x") w = Eigen::Vector3d::UnitX();
    else if (axis == "y") w = Eigen::Vector3d::UnitY();
    else if (axis == "z") w = Eigen::Vector3d::UnitZ();
    else throw ydeflow::ParseError("unknown axis '" + axis + "'");
    return ydeflow::hat(w);
  }
  Eigen::VectorXd w = parse_vector(s, "generator");
  if (w.size() != 3)
    throw ydeflow::ParseError("generator needs three components");
  return ydeflow::hat(Eigen::Vector3d(w));
}

// Rotations: "identity", "axis:z:0.4" (axis-angle), or nine numbers
// row-major.
Eigen::Matrix3d parse_rotation(const std::string& s) {
  if (s == "identity") return Eigen::Matrix3d::Identity();
  if (s.rfind("axis:", 0) == 0) {
    auto rest = s.substr(5);
    auto colon = rest.find(':');
    if (colon == std::string::npos)
      throw ydeflow::ParseError("rotation wants axis:NAME:angle");
    Eigen::Matrix3d gen = parse_so3_generator("axis:" + rest.substr(0, colon));
    double angle = parse_double(rest.substr(colon + 1), "rotation angle");
    return ydeflow::so3_exp(Eigen::Matrix3d(angle * gen));
  }
  Eigen::VectorXd v = parse_vector(s, "rotation");
  if (v.size() != 9) throw ydeflow::ParseError("rotation wants nine numbers");
  Eigen::Matrix3d r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = v(3 * i + j);
  if ((r.transpose() * r - Eigen::Matrix3d::Identity()).norm() > 1e-8 ||
      r.determinant() < 0)
    throw std::invalid_argument("matrix is not a rotation");
  return r;
}

// Frames: "default" or two columns "a,b,c;d,e,f".
Eigen::Matrix<double, 3, 2> parse_frame(const std::string& s,
                                        const Eigen::Vector3d& p0) {
  if (s == "default") {
    // Least-aligned coordinate axis completed by the cross product.
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(p0(i)) < std::abs(p0(k))) k = i;
    Eigen::Vector3d e1 = Eigen::Vector3d::Unit(k);
    e1 = (e1 - p0 * p0.dot(e1)).normalized();
    Eigen::Matrix<double, 3, 2> u;
    u.col(0) = e1;
    u.col(1) = p0.cross(e1);
    return u;
  }
  auto semi = s.find(';');
  if (semi == std::string::npos)
    throw ydeflow::ParseError("frame wants 'a,b,c;d,e,f'");
  Eigen::VectorXd c0 = parse_vector(s.substr(0, semi), "frame column 1");
  Eigen::VectorXd c1 = parse_vector(s.substr(semi + 1), "frame column 2");
  if (c0.size() != 3 || c1.size() != 3)
    throw ydeflow::ParseError("frame columns need three components");
  Eigen::Matrix<double, 3, 2> u;
  u.col(0) = c0;
  u.col(1) = c1;
  return u;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json j = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json j = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    j.push_back(row);
  }
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << j.dump(2) << "\n";
}

// ---------------------------------------------------------------- path-gen

struct PathGenArgs {
  Common common;
  std::string kind;
  double hurst = 0.75;
  double wa = 0.5, wb = 3.0;
  std::string coeffs;
  double slope = 1.0, amp = 1.0, freq = 1.0;
  Eigen::Index n = 1025;
  double horizon = 1.0;
};

int run_path_gen(const PathGenArgs& a) {
  ydeflow::SampledPath path;
  if (a.kind == "fbm") {
    path = ydeflow::gen_fbm(a.hurst, a.n, a.horizon, a.common.seed);
  } else if (a.kind == "weierstrass") {
    path = ydeflow::gen_weierstrass(a.wa, a.wb, a.n, a.horizon);
  } else if (a.kind == "linear") {
    path = ydeflow::gen_smooth(ydeflow::SmoothKind::Linear, {a.slope}, a.n,
                               a.horizon);
  } else if (a.kind == "sine") {
    path = ydeflow::gen_smooth(ydeflow::SmoothKind::Sine, {a.amp, a.freq}, a.n,
                               a.horizon);
  } else if (a.kind == "polynomial") {
    if (a.coeffs.empty())
      throw std::invalid_argument("polynomial kind needs --coeffs");
    Eigen::VectorXd c = parse_vector(a.coeffs, "--coeffs");
    path = ydeflow::gen_smooth(ydeflow::SmoothKind::Polynomial,
                               {c.data(), c.data() + c.size()}, a.n, a.horizon);
  } else {
    throw std::invalid_argument("unknown path kind '" + a.kind + "'");
  }

  ydeflow::write_path(a.common.out, path);

  json summary = base_summary("path-gen");
  summary["out"] = a.common.out;
  summary["sidecar"] = ydeflow::sidecar_name(a.common.out);
  summary["alpha"] = path.alpha;
  summary["generator"] = path.meta.generator;
  summary["nodes"] = path.nodes();
  if (path.meta.seed) summary["seed"] = *path.meta.seed;
  if (!path.meta.method.empty()) summary["method"] = path.meta.method;
  emit_summary(summary, a.common);
  return 0;
}

// --------------------------------------------------------------- integrate

// Integrand specs: {"kind":"identity"} | {"kind":"zero","rows":m} |
// {"kind":"constant","matrix":[[...]]} | {"kind":"driver","scale":s}
// (the last one integrates s*Z_t itself, scalar drivers only).
ydeflow::IntegrandPath build_integrand(const json& spec,
                                       const ydeflow::SampledPath& z) {
  if (!spec.is_object() || !spec.contains("kind"))
    throw ydeflow::ParseError("integrand spec needs a 'kind' field");
  const std::string kind = spec["kind"].get<std::string>();
  const Eigen::Index d = z.dim();

  ydeflow::IntegrandPath y;
  y.times = z.times;
  y.alpha = 1.0;
  if (kind == "identity") {
    y.values.assign(z.nodes(), Eigen::MatrixXd::Identity(d, d));
  } else if (kind == "zero") {
    Eigen::Index rows = spec.value("rows", 1);
    y.values.assign(z.nodes(), Eigen::MatrixXd::Zero(rows, d));
  } else if (kind == "constant") {
    if (!spec.contains("matrix"))
      throw ydeflow::ParseError("constant integrand needs 'matrix'");
    Eigen::MatrixXd m = matrix_from_json(spec["matrix"], "integrand matrix");
    if (m.cols() != d)
      throw std::invalid_argument("integrand matrix columns must match driver");
    y.values.assign(z.nodes(), m);
  } else if (kind == "driver") {
    if (d != 1)
      throw std::invalid_argument("driver integrand needs a scalar driver");
    double scale = spec.value("scale", 1.0);
    y.alpha = z.alpha;
    y.values.resize(z.nodes());
    for (Eigen::Index i = 0; i < z.nodes(); ++i)
      y.values[i] = Eigen::MatrixXd::Constant(1, 1, scale * z.values(i, 0));
  } else {
    throw ydeflow::ParseError("unknown integrand kind '" + kind + "'");
  }
  return y;
}

struct IntegrateArgs {
  Common common;
  std::string driver;
  std::string integrand;
};

int run_integrate(const IntegrateArgs& a) {
  ydeflow::SampledPath z = read_driver(a.driver, a.common);
  json spec = read_json_file(a.integrand);
  ydeflow::IntegrandPath y = build_integrand(spec, z);

  ydeflow::SampledPath integral = ydeflow::young_integrate(y, z);
  integral.meta.generator = "integral";
  auto refinements = ydeflow::young_refinement_values(y, z);

  ydeflow::write_path(a.common.out, integral);

  json summary = base_summary("integrate");
  summary["out"] = a.common.out;
  summary["nodes"] = integral.nodes();
  summary["final"] = vector_to_json(integral.value(integral.nodes() - 1));
  json refs = json::array();
  for (const auto& r : refinements) refs.push_back(vector_to_json(r));
  summary["refinement_finals"] = refs;
  emit_summary(summary, a.common);
  return 0;
}

// ------------------------------------------------------------------- solve

struct SolveArgs {
  Common common;
  std::string driver;
  std::string field;
  std::string a_file;
  std::string x0;
};

int run_solve(const SolveArgs& a) {
  ydeflow::SampledPath z = read_driver(a.driver, a.common);
  if (a.field != "builtin:linear")
    throw std::invalid_argument("unknown field '" + a.field +
                                "' (available: builtin:linear)");
  if (a.a_file.empty())
    throw std::invalid_argument("builtin:linear needs --A");
  auto mats = parse_matrices(a.a_file);
  ydeflow::VectorFieldFamily field = ydeflow::VectorFieldFamily::from_linear(mats);
  if (field.driver_dim != z.dim())
    throw std::invalid_argument("field driver dimension " +
                                std::to_string(field.driver_dim) +
                                " does not match driver dimension " +
                                std::to_string(z.dim()));
  Eigen::VectorXd x0 = parse_vector(a.x0, "--x0");
  if (x0.size() != field.state_dim)
    throw std::invalid_argument("--x0 length does not match the field");

  ydeflow::Trajectory traj = ydeflow::solve_euler(field, z, x0);

  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < field.state_dim; ++i)
    header.push_back("x" + std::to_string(i + 1));
  ydeflow::write_csv(a.common.out, header, traj.times, traj.states);

  json summary = base_summary("solve");
  summary["out"] = a.common.out;
  summary["nodes"] = traj.nodes();
  summary["exploded"] = traj.exploded();
  if (traj.exploded()) {
    summary["explosion_index"] = *traj.explosion_index;
    summary["explosion_time"] = z.times(*traj.explosion_index);
  } else {
    summary["final"] = vector_to_json(traj.state(traj.nodes() - 1));
  }
  emit_summary(summary, a.common);
  return 0;
}

// -------------------------------------------------- decompose-linear

struct DecomposeLinearArgs {
  Common common;
  std::string a_file;
  Eigen::Index k = 1;
  std::string driver;
  std::string method = "blocks";
  double threshold = 0.0;  // 0 = skip refined explosion detection
};

int run_decompose_linear(const DecomposeLinearArgs& a) {
  ydeflow::SampledPath z = read_driver(a.driver, a.common);
  ydeflow::LinearSystem sys(parse_matrix(a.a_file), a.k);

  ydeflow::BlockDecomposition dec;
  if (a.method == "blocks") {
    dec = ydeflow::decompose_blocks(sys, z);
  } else if (a.method == "yde") {
    dec = ydeflow::decompose_via_yde(sys, z);
  } else {
    throw std::invalid_argument("unknown method '" + a.method +
                                "' (available: blocks, yde)");
  }

  // Per-node flattened blocks, row-major within each block.
  const Eigen::Index k = sys.k, l = sys.l();
  std::vector<std::string> header{"t"};
  auto block_header = [&](const std::string& name, Eigen::Index r,
                          Eigen::Index c) {
    for (Eigen::Index i = 0; i < r; ++i)
      for (Eigen::Index j = 0; j < c; ++j)
        header.push_back(name + "_" + std::to_string(i) + std::to_string(j));
  };
  block_header("g1", k, k);
  block_header("g2", k, l);
  block_header("g3", l, k);
  block_header("g4", l, l);

  const Eigen::Index cols = k * k + k * l + l * k + l * l;
  Eigen::MatrixXd table(dec.nodes(), cols);
  for (Eigen::Index i = 0; i < dec.nodes(); ++i) {
    Eigen::Index c = 0;
    auto put = [&](const Eigen::MatrixXd& m) {
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index s = 0; s < m.cols(); ++s) table(i, c++) = m(r, s);
    };
    put(dec.g1[i]);
    put(dec.g2[i]);
    put(dec.g3[i]);
    put(dec.g4[i]);
  }

  // Composition residual against F on the surviving nodes.
  ydeflow::MatrixPath f = ydeflow::fundamental_solution(sys.a, z);
  double compose_residual = 0.0;
  for (Eigen::Index i = 0; i < dec.nodes(); ++i) {
    double gap = (dec.eta(i) * dec.psi(i) - f.values[i]).cwiseAbs().maxCoeff();
    compose_residual = std::max(compose_residual, gap);
  }

  ydeflow::write_csv(a.common.out, header, dec.times, table);

  json summary = base_summary("decompose-linear");
  summary["out"] = a.common.out;
  summary["method"] = a.method;
  summary["k"] = k;
  summary["nodes"] = dec.nodes();
  summary["compose_residual"] = compose_residual;
  json expl;
  expl["exploded"] = dec.exploded();
  if (dec.exploded()) {
    expl["index"] = *dec.explosion_index;
    expl["time"] = z.times(*dec.explosion_index);
  }
  if (a.threshold > 0.0) {
    auto t = ydeflow::detect_explosion(sys, z, a.threshold);
    expl["detection_threshold"] = a.threshold;
    expl["detected"] = t.has_value();
    if (t) expl["detected_time"] = *t;
  }
  summary["explosion"] = expl;
  emit_summary(summary, a.common);
  return 0;
}

// -------------------------------------------------- detect-explosion

struct DetectExplosionArgs {
  Common common;
  std::string a_file;
  Eigen::Index k = 1;
  std::string driver;
  double threshold = 1e-6;
};

int run_detect_explosion(const DetectExplosionArgs& a) {
  ydeflow::SampledPath z = read_driver(a.driver, a.common);
  ydeflow::LinearSystem sys(parse_matrix(a.a_file), a.k);
  auto t = ydeflow::detect_explosion(sys, z, a.threshold);

  json summary = base_summary("detect-explosion");
  summary["threshold"] = a.threshold;
  summary["detected"] = t.has_value();
  if (t) summary["time"] = *t;
  if (!a.common.out.empty()) {
    write_json_file(a.common.out, summary);
    summary["out"] = a.common.out;
  }
  emit_summary(summary, a.common);
  return 0;
}

// -------------------------------------------------- schur-foliation

struct SchurArgs {
  Common common;
  std::string a_file;
};

int run_schur_foliation(const SchurArgs& a) {
  Eigen::MatrixXd m = parse_matrix(a.a_file);
  ydeflow::SchurFoliation fol = ydeflow::schur_foliation(m);

  json out;
  out["schema_version"] = 1;
  out["p"] = matrix_to_json(fol.p);
  out["t"] = matrix_to_json(fol.t);
  out["k"] = fol.k;
  write_json_file(a.common.out, out);

  const Eigen::Index n = m.rows();
  double subdiag =
      fol.t.bottomLeftCorner(n - fol.k, fol.k).cwiseAbs().maxCoeff();
  double orth = (fol.p.transpose() * fol.p - Eigen::MatrixXd::Identity(n, n))
                    .cwiseAbs()
                    .maxCoeff();

  json summary = base_summary("schur-foliation");
  summary["out"] = a.common.out;
  summary["k"] = fol.k;
  summary["subdiagonal_block_max"] = subdiag;
  summary["orthogonality_defect"] = orth;
  emit_summary(summary, a.common);
  return 0;
}

// -------------------------------------------------------------- transport

struct TransportArgs {
  Common common;
  std::string path;
  std::string v;
  std::string manifold = "sphere";
};

void check_manifold_flag(const std::string& m) {
  if (m != "sphere")
    throw std::invalid_argument("only the unit sphere is built in, got '" + m +
                                "'");
}

int run_transport(const TransportArgs& a) {
  check_manifold_flag(a.manifold);
  ydeflow::SampledPath x = read_driver(a.path, a.common);
  Eigen::VectorXd v_in = parse_vector(a.v, "--v");
  if (v_in.size() != 3) throw std::invalid_argument("--v needs three components");

  auto conn = ydeflow::ConnectionForm::sphere_levi_civita();
  Eigen::Vector3d v_out = ydeflow::parallel_transport(conn, x, v_in);

  bool loop = (x.value(0) - x.value(x.nodes() - 1)).norm() < 1e-8;
  std::optional<double> angle;
  if (loop) angle = ydeflow::holonomy_angle(conn, x);

  json summary = base_summary("transport");
  summary["v_in"] = vector_to_json(v_in);
  summary["v_out"] = vector_to_json(v_out);
  summary["norm_in"] = v_in.norm();
  summary["norm_out"] = v_out.norm();
  summary["loop"] = loop;
  if (angle) summary["holonomy_angle"] = *angle;
  if (!a.common.out.empty()) {
    write_json_file(a.common.out, summary);
    summary["out"] = a.common.out;
  }
  emit_summary(summary, a.common);
  return 0;
}

// ------------------------------------------------------ develop/antidevelop

struct DevelopArgs {
  Common common;
  std::string plane;
  std::string p0 = "0,0,1";
  std::string frame = "default";
  std::string manifold = "sphere";
};

int run_develop(const DevelopArgs& a) {
  check_manifold_flag(a.manifold);
  ydeflow::SampledPath w = read_driver(a.plane, a.common);
  if (w.dim() != 2)
    throw std::invalid_argument("develop needs a two-dimensional plane path");
  Eigen::VectorXd p0v = parse_vector(a.p0, "--p0");
  if (p0v.size() != 3) throw std::invalid_argument("--p0 needs three components");
  Eigen::Vector3d p0 = p0v;
  if (std::abs(p0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("--p0 must lie on the unit sphere");
  auto u0 = parse_frame(a.frame, p0);

  auto conn = ydeflow::ConnectionForm::sphere_levi_civita();
  ydeflow::SampledPath x = ydeflow::develop(conn, w, p0, u0);
  x.meta.generator = "develop";
  ydeflow::write_path(a.common.out, x);

  json summary = base_summary("develop");
  summary["out"] = a.common.out;
  summary["nodes"] = x.nodes();
  summary["final"] = vector_to_json(x.value(x.nodes() - 1));
  emit_summary(summary, a.common);
  return 0;
}

struct AntidevelopArgs {
  Common common;
  std::string path;
  std::string frame = "default";
  std::string manifold = "sphere";
};

int run_antidevelop(const AntidevelopArgs& a) {
  check_manifold_flag(a.manifold);
  ydeflow::SampledPath x = read_driver(a.path, a.common);
  if (x.dim() != 3)
    throw std::invalid_argument("antidevelop needs a sphere path in R^3");
  Eigen::Vector3d p0 = x.value(0);
  auto u0 = parse_frame(a.frame, p0);

  auto conn = ydeflow::ConnectionForm::sphere_levi_civita();
  ydeflow::SampledPath y = ydeflow::antidevelop(conn, x, u0);
  y.meta.generator = "antidevelop";
  ydeflow::write_path(a.common.out, y);

  json summary = base_summary("antidevelop");
  summary["out"] = a.common.out;
  summary["nodes"] = y.nodes();
  summary["final"] = vector_to_json(y.value(y.nodes() - 1));
  emit_summary(summary, a.common);
  return 0;
}

// ------------------------------------------- decompose-homogeneous

struct HomogeneousArgs {
  Common common;
  std::string a_spec;
  std::string driver;
  std::string x = "identity";
};

int run_decompose_homogeneous(const HomogeneousArgs& a) {
  ydeflow::SampledPath z = read_driver(a.driver, a.common);
  Eigen::Matrix3d gen = parse_so3_generator(a.a_spec);
  Eigen::Matrix3d x = parse_rotation(a.x);

  ydeflow::HomogeneousDecomposition dec =
      ydeflow::decompose_homogeneous(gen, z, x);

  json out;
  out["schema_version"] = 1;
  out["times"] = vector_to_json(dec.g.times);
  auto dump_group = [](const ydeflow::GroupPath& g) {
    json arr = json::array();
    for (const auto& m : g.values) {
      json flat = json::array();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) flat.push_back(m(i, j));
      arr.push_back(flat);
    }
    return arr;
  };
  out["g"] = dump_group(dec.g);
  out["gh"] = dump_group(dec.gh);
  out["h"] = dump_group(dec.h);
  out["h_angle"] = dec.h_angle;
  out["stabilizer_gap"] = dec.stabilizer_gap;
  out["reconstruction_gap"] = dec.reconstruction_gap;
  write_json_file(a.common.out, out);

  json summary = base_summary("decompose-homogeneous");
  summary["out"] = a.common.out;
  summary["nodes"] = dec.g.nodes();
  summary["stabilizer_gap"] = dec.stabilizer_gap;
  summary["reconstruction_gap"] = dec.reconstruction_gap;
  summary["final_h_angle"] = dec.h_angle.back();
  emit_summary(summary, a.common);
  return 0;
}

// ------------------------------------------------------ trivial-bundle

struct TrivialBundleArgs {
  Common common;
  std::string a_spec;
  double b_rate = 0.0;
  std::string driver;
  std::string x = "identity";
  double y_angle = 0.0;
};

int run_trivial_bundle(const TrivialBundleArgs& a) {
  ydeflow::SampledPath z = read_driver(a.driver, a.common);
  Eigen::Matrix3d gen = parse_so3_generator(a.a_spec);
  Eigen::Matrix2d b = ydeflow::so2_gen(a.b_rate);
  Eigen::Matrix3d x = parse_rotation(a.x);
  Eigen::Matrix2d y = ydeflow::so2_exp(a.y_angle);

  ydeflow::TrivialBundleDecomposition dec =
      ydeflow::trivial_bundle_decompose(gen, b, z, x, y);

  json out;
  out["schema_version"] = 1;
  out["times"] = vector_to_json(dec.times);
  auto dump3 = [](const std::vector<Eigen::Matrix3d>& ms) {
    json arr = json::array();
    for (const auto& m : ms) {
      json flat = json::array();
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) flat.push_back(m(i, j));
      arr.push_back(flat);
    }
    return arr;
  };
  auto dump2 = [](const std::vector<Eigen::Matrix2d>& ms) {
    json arr = json::array();
    for (const auto& m : ms) {
      json flat = json::array();
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) flat.push_back(m(i, j));
      arr.push_back(flat);
    }
    return arr;
  };
  out["g_first"] = dump3(dec.g_first);
  out["g_second"] = dump2(dec.g_second);
  out["eta_first"] = dump3(dec.eta_first);
  out["h"] = dump2(dec.h);
  out["reconstruction_gap"] = dec.reconstruction_gap;
  write_json_file(a.common.out, out);

  json summary = base_summary("trivial-bundle");
  summary["out"] = a.common.out;
  summary["nodes"] = dec.times.size();
  summary["reconstruction_gap"] = dec.reconstruction_gap;
  emit_summary(summary, a.common);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Young-integral calculus for Holder drivers: solvers, linear "
               "flow decompositions, and geometric transport on the sphere"};
  app.require_subcommand(1);

  PathGenArgs pg;
  auto* c_pg = app.add_subcommand("path-gen", "Generate a driver path");
  c_pg->add_option("--kind", pg.kind,
                   "fbm | weierstrass | linear | sine | polynomial")
      ->required();
  c_pg->add_option("--hurst", pg.hurst, "fbm Hurst parameter in (1/2, 1)")
      ->capture_default_str();
  c_pg->add_option("--a", pg.wa, "weierstrass amplitude base in (0, 1)")
      ->capture_default_str();
  c_pg->add_option("--b", pg.wb, "weierstrass frequency base > 1")
      ->capture_default_str();
  c_pg->add_option("--coeffs", pg.coeffs,
                   "polynomial coefficients, constant term first");
  c_pg->add_option("--slope", pg.slope, "linear kind slope")
      ->capture_default_str();
  c_pg->add_option("--amp", pg.amp, "sine amplitude")->capture_default_str();
  c_pg->add_option("--freq", pg.freq, "sine angular frequency")
      ->capture_default_str();
  c_pg->add_option("--n", pg.n, "number of nodes")->capture_default_str();
  c_pg->add_option("--T", pg.horizon, "time horizon")->capture_default_str();
  add_common(c_pg, &pg.common, true);
  c_pg->callback([&]() { run_path_gen(pg); });

  IntegrateArgs ig;
  auto* c_ig = app.add_subcommand("integrate",
                                  "Young integral of an integrand against a driver");
  c_ig->add_option("--driver", ig.driver, "driver CSV")->required();
  c_ig->add_option("--integrand", ig.integrand, "integrand spec JSON")
      ->required();
  add_common(c_ig, &ig.common, true);
  c_ig->callback([&]() { run_integrate(ig); });

  SolveArgs sv;
  auto* c_sv = app.add_subcommand("solve", "Solve dx = X(x) dZ by left-point Euler");
  c_sv->add_option("--driver", sv.driver, "driver CSV")->required();
  c_sv->add_option("--field", sv.field, "vector field (builtin:linear)")
      ->required();
  c_sv->add_option("--A", sv.a_file, "matrix JSON for builtin:linear");
  c_sv->add_option("--x0", sv.x0, "initial state, comma-separated")->required();
  add_common(c_sv, &sv.common, true);
  c_sv->callback([&]() { run_solve(sv); });

  DecomposeLinearArgs dl;
  auto* c_dl = app.add_subcommand(
      "decompose-linear", "Factor the linear flow into triangular components");
  c_dl->add_option("--A", dl.a_file, "system matrix JSON")->required();
  c_dl->add_option("--k", dl.k, "horizontal dimension")->capture_default_str();
  c_dl->add_option("--driver", dl.driver, "driver CSV")->required();
  c_dl->add_option("--method", dl.method, "blocks | yde")->capture_default_str();
  c_dl->add_option("--threshold", dl.threshold,
                   "also run refined explosion detection at this smin level");
  add_common(c_dl, &dl.common, true);
  c_dl->callback([&]() { run_decompose_linear(dl); });

  DetectExplosionArgs de;
  auto* c_de = app.add_subcommand("detect-explosion",
                                  "First time the factorization degenerates");
  c_de->add_option("--A", de.a_file, "system matrix JSON")->required();
  c_de->add_option("--k", de.k, "horizontal dimension")->capture_default_str();
  c_de->add_option("--driver", de.driver, "driver CSV")->required();
  c_de->add_option("--threshold", de.threshold, "smin threshold in (0, 1)")
      ->capture_default_str();
  add_common(c_de, &de.common, false);
  c_de->callback([&]() { run_detect_explosion(de); });

  SchurArgs sf;
  auto* c_sf = app.add_subcommand(
      "schur-foliation", "Orthogonal coordinates with a globally valid splitting");
  c_sf->add_option("--A", sf.a_file, "system matrix JSON")->required();
  add_common(c_sf, &sf.common, true);
  c_sf->callback([&]() { run_schur_foliation(sf); });

  TransportArgs tr;
  auto* c_tr = app.add_subcommand("transport",
                                  "Parallel transport along a sphere path");
  c_tr->add_option("--path", tr.path, "sphere path CSV")->required();
  c_tr->add_option("--v", tr.v, "tangent vector at the start point")->required();
  c_tr->add_option("--manifold", tr.manifold, "manifold name (sphere)")
      ->capture_default_str();
  add_common(c_tr, &tr.common, false);
  c_tr->callback([&]() { run_transport(tr); });

  DevelopArgs dv;
  auto* c_dv = app.add_subcommand("develop",
                                  "Roll a plane curve onto the sphere");
  c_dv->add_option("--plane", dv.plane, "plane path CSV (2 columns)")
      ->required();
  c_dv->add_option("--p0", dv.p0, "starting point on the sphere")
      ->capture_default_str();
  c_dv->add_option("--frame", dv.frame, "initial frame 'a,b,c;d,e,f' or default")
      ->capture_default_str();
  c_dv->add_option("--manifold", dv.manifold, "manifold name (sphere)")
      ->capture_default_str();
  add_common(c_dv, &dv.common, true);
  c_dv->callback([&]() { run_develop(dv); });

  AntidevelopArgs av;
  auto* c_av = app.add_subcommand("antidevelop",
                                  "Unroll a sphere path into the plane");
  c_av->add_option("--path", av.path, "sphere path CSV")->required();
  c_av->add_option("--frame", av.frame, "initial frame 'a,b,c;d,e,f' or default")
      ->capture_default_str();
  c_av->add_option("--manifold", av.manifold, "manifold name (sphere)")
      ->capture_default_str();
  add_common(c_av, &av.common, true);
  c_av->callback([&]() { run_antidevelop(av); });

  HomogeneousArgs hd;
  auto* c_hd = app.add_subcommand(
      "decompose-homogeneous",
      "Split a rotation flow into horizontal and stabilizer factors");
  c_hd->add_option("--A", hd.a_spec, "generator: axis:x|y|z or 'wx,wy,wz'")
      ->required();
  c_hd->add_option("--driver", hd.driver, "driver CSV")->required();
  c_hd->add_option("--x", hd.x, "base rotation: identity | axis:NAME:angle | 9 numbers")
      ->capture_default_str();
  add_common(c_hd, &hd.common, true);
  c_hd->callback([&]() { run_decompose_homogeneous(hd); });

  TrivialBundleArgs tb;
  auto* c_tb = app.add_subcommand(
      "trivial-bundle", "Closed-form decomposition on the product bundle");
  c_tb->add_option("--A", tb.a_spec, "first-factor generator: axis:x|y|z or 'wx,wy,wz'")
      ->required();
  c_tb->add_option("--B", tb.b_rate, "fibre generator rate (planar rotation)")
      ->capture_default_str();
  c_tb->add_option("--driver", tb.driver, "driver CSV")->required();
  c_tb->add_option("--x", tb.x, "first-factor start: identity | axis:NAME:angle | 9 numbers")
      ->capture_default_str();
  c_tb->add_option("--y", tb.y_angle, "fibre start angle")->capture_default_str();
  add_common(c_tb, &tb.common, true);
  c_tb->callback([&]() { run_trivial_bundle(tb); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ydeflow::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRange;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitModule;
  }
  return 0;
}
