#pragma once

#include <json.hpp>

#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pcecv/benchmarks.hpp"
#include "pcecv/csv.hpp"
#include "pcecv/errors.hpp"
#include "pcecv/rng.hpp"
#include "pcecv/sensitivity.hpp"
#include "pcecv/training.hpp"
#include "pcecv/validation.hpp"

namespace pcecv {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kModelFormat = "pcecv-model";

namespace detail {

inline DistKind dist_kind_from(const std::string& s) {
  if (s == "uniform") return DistKind::Uniform;
  if (s == "gaussian") return DistKind::Gaussian;
  if (s == "lognormal") return DistKind::Lognormal;
  throw DataError("unknown distribution kind '" + s + "'");
}

inline PolyFamily family_from(const std::string& s) {
  if (s == "legendre") return PolyFamily::Legendre;
  if (s == "hermite") return PolyFamily::Hermite;
  throw DataError("unknown polynomial family '" + s + "'");
}

// NaN-tolerant JSON number: NaN serializes as null.
inline nlohmann::json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

inline double number_or_nan(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null())
    return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

// NaN renders as an empty CSV cell.
inline std::string csv_cell(double v) {
  return std::isnan(v) ? std::string() : format_double(v);
}

}  // namespace detail

// --------------------------------------------------------------------------
// Model document
// --------------------------------------------------------------------------

inline nlohmann::json space_to_json(const InputSpace& space) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : space.marginals) {
    nlohmann::json entry{{"name", m.name},
                         {"kind", to_string(m.kind)},
                         {"params", {m.a, m.b}}};
    if (m.bounds) entry["bounds"] = {m.bounds->first, m.bounds->second};
    arr.push_back(std::move(entry));
  }
  return arr;
}

inline InputSpace space_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty())
    throw DataError("input_space must be a non-empty array");
  InputSpace space;
  for (const auto& entry : j) {
    MarginalDistribution m;
    m.name = entry.value("name", std::string());
    m.kind = detail::dist_kind_from(entry.at("kind").get<std::string>());
    const auto& params = entry.at("params");
    if (!params.is_array() || params.size() != 2)
      throw DataError("marginal params must be a [a, b] pair");
    m.a = params[0].get<double>();
    m.b = params[1].get<double>();
    if (entry.contains("bounds")) {
      const auto& b = entry.at("bounds");
      if (!b.is_array() || b.size() != 2)
        throw DataError("marginal bounds must be a [lo, hi] pair");
      m.bounds = std::pair{b[0].get<double>(), b[1].get<double>()};
    }
    space.marginals.push_back(std::move(m));
  }
  space.validate();
  return space;
}

inline nlohmann::json model_to_json(const SparsePceModel& model) {
  nlohmann::json indices = nlohmann::json::array();
  for (const auto& idx : model.spec.indices) indices.push_back(idx.degrees);
  nlohmann::json families = nlohmann::json::array();
  for (const auto f : model.spec.families) families.push_back(to_string(f));
  nlohmann::json coeffs = nlohmann::json::array();
  for (Eigen::Index k = 0; k < model.coefficients.size(); ++k)
    coeffs.push_back(model.coefficients[k]);

  nlohmann::json degree_errors = nlohmann::json::array();
  for (const auto& [p, e] : model.diagnostics.degree_errors)
    degree_errors.push_back({p, e});

  return nlohmann::json{
      {"format", kModelFormat},
      {"version", kToolVersion},
      {"generator", kGeneratorId},
      {"seed", model.seed},
      {"input_space", space_to_json(model.input_space)},
      {"families", std::move(families)},
      {"indices", std::move(indices)},
      {"coefficients", std::move(coeffs)},
      {"diagnostics",
       {{"p_chosen", model.diagnostics.p_chosen},
        {"n_terms", model.diagnostics.n_terms},
        {"degree_errors", std::move(degree_errors)},
        {"loo", detail::json_number(model.diagnostics.loo)},
        {"epsilon_icv", detail::json_number(model.diagnostics.epsilon_icv)},
        {"selection_error",
         detail::json_number(model.diagnostics.selection_error)},
        {"q2_icv", detail::json_number(model.diagnostics.q2_icv)},
        {"r2_train", detail::json_number(model.diagnostics.r2_train)},
        {"response_variance",
         detail::json_number(model.diagnostics.response_variance)}}}};
}

inline SparsePceModel model_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != kModelFormat)
    throw DataError("not a pcecv model document");
  SparsePceModel model;
  model.seed = j.value("seed", std::uint64_t{0});
  model.input_space = space_from_json(j.at("input_space"));
  const auto d = model.input_space.dimension();

  for (const auto& f : j.at("families"))
    model.spec.families.push_back(detail::family_from(f.get<std::string>()));
  if (model.spec.families.size() != d)
    throw DataError("families list does not match the input dimension");

  for (const auto& idx : j.at("indices")) {
    MultiIndex mi{idx.get<std::vector<int>>()};
    if (mi.dimension() != d)
      throw DataError("multi-index dimension does not match the space");
    for (int deg : mi.degrees)
      if (deg < 0) throw DataError("negative degree in model document");
    model.spec.indices.push_back(std::move(mi));
  }
  if (model.spec.indices.empty())
    throw DataError("model document has no basis terms");

  const auto& coeffs = j.at("coefficients");
  if (coeffs.size() != model.spec.indices.size())
    throw DataError("coefficient count does not match the index count");
  model.coefficients.resize(static_cast<Eigen::Index>(coeffs.size()));
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!coeffs[k].is_number())
      throw DataError("non-finite coefficient in model document");
    const double c = coeffs[k].get<double>();
    if (!std::isfinite(c))
      throw DataError("non-finite coefficient in model document");
    model.coefficients[static_cast<Eigen::Index>(k)] = c;
  }

  if (j.contains("diagnostics")) {
    const auto& dg = j.at("diagnostics");
    TrainDiagnostics& out = model.diagnostics;
    out.p_chosen = dg.value("p_chosen", 0);
    out.n_terms = dg.value("n_terms", 0);
    if (dg.contains("degree_errors")) {
      for (const auto& pair : dg.at("degree_errors"))
        out.degree_errors.emplace_back(pair.at(0).get<int>(),
                                       pair.at(1).get<double>());
    }
    out.loo = detail::number_or_nan(dg, "loo");
    out.epsilon_icv = detail::number_or_nan(dg, "epsilon_icv");
    out.selection_error = detail::number_or_nan(dg, "selection_error");
    out.q2_icv = detail::number_or_nan(dg, "q2_icv");
    out.r2_train = detail::number_or_nan(dg, "r2_train");
    out.response_variance = detail::number_or_nan(dg, "response_variance");
  }
  return model;
}

inline void save_model(const SparsePceModel& model,
                       const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw DataError("cannot open '" + path.string() + "' for writing");
  out << model_to_json(model).dump(2) << '\n';
  out.flush();
  if (!out) throw DataError("write failure on '" + path.string() + "'");
}

inline SparsePceModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("cannot open '" + path.string() + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid JSON in '" + path.string() + "': " + e.what());
  }
  return model_from_json(j);
}

// --------------------------------------------------------------------------
// Tabular artifacts
// --------------------------------------------------------------------------

// Design table: named input columns with the response in a final `y` column.
inline void write_design_csv(const ExperimentalDesign& ed,
                             const std::vector<std::string>& input_names,
                             const std::filesystem::path& path) {
  if (static_cast<Eigen::Index>(input_names.size()) != ed.inputs.cols())
    throw ConfigError("design column names do not match the input count");
  CsvWriter out(path);
  std::vector<std::string> cells(input_names);
  cells.push_back("y");
  out.row(cells);
  for (Eigen::Index i = 0; i < ed.inputs.rows(); ++i) {
    cells.clear();
    for (Eigen::Index c = 0; c < ed.inputs.cols(); ++c)
      cells.push_back(format_double(ed.inputs(i, c)));
    cells.push_back(format_double(ed.responses[i]));
    out.row(cells);
  }
  out.close();
}

struct DesignCsv {
  ExperimentalDesign design;
  std::vector<std::string> input_names;
};

inline DesignCsv read_design_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 2)
    throw DataError(path.string() +
                    ": need at least one input column and a response");
  if (table.header.back() != "y")
    throw DataError(path.string() + ": last column must be named 'y'");
  if (table.rows.empty()) throw DataError(path.string() + ": no data rows");

  DesignCsv out;
  out.input_names.assign(table.header.begin(), table.header.end() - 1);
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  const auto d = static_cast<Eigen::Index>(out.input_names.size());
  out.design.inputs.resize(n, d);
  out.design.responses.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    const std::string where =
        path.string() + " line " +
        std::to_string(table.row_lines[static_cast<std::size_t>(i)]);
    for (Eigen::Index c = 0; c < d; ++c)
      out.design.inputs(i, c) =
          parse_double(row[static_cast<std::size_t>(c)], where);
    out.design.responses[i] = parse_double(row.back(), where);
  }
  return out;
}

// Scenario table: wall,xs,ys,zs,xp,yp,theta_p,y.
inline void write_scenario_csv(const ScenarioSet& set,
                               const std::filesystem::path& path) {
  if (set.responses.size() != static_cast<Eigen::Index>(set.poses.size()))
    throw DataError("scenario set responses do not match the pose count");
  CsvWriter out(path);
  out.row({"wall", "xs", "ys", "zs", "xp", "yp", "theta_p", "y"});
  for (std::size_t i = 0; i < set.poses.size(); ++i) {
    const ScenarioPose& p = set.poses[i];
    out.row({format_int(wall_number(p.wall)), format_double(p.xs),
             format_double(p.ys), format_double(p.zs), format_double(p.xp),
             format_double(p.yp), format_double(p.theta_p),
             format_double(set.responses[static_cast<Eigen::Index>(i)])});
  }
  out.close();
}

inline ScenarioSet read_scenario_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> expected{"wall", "xs", "ys", "zs",
                                          "xp",   "yp", "theta_p", "y"};
  if (table.header != expected)
    throw DataError(path.string() +
                    ": scenario header must be wall,xs,ys,zs,xp,yp,theta_p,y");
  if (table.rows.empty()) throw DataError(path.string() + ": no data rows");

  ScenarioSet set;
  set.responses.resize(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where =
        path.string() + " line " + std::to_string(table.row_lines[i]);
    ScenarioPose pose;
    pose.wall = [&] {
      try {
        return wall_from_number(
            static_cast<int>(parse_int(row[0], where)));
      } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
      }
    }();
    pose.xs = parse_double(row[1], where);
    pose.ys = parse_double(row[2], where);
    pose.zs = parse_double(row[3], where);
    pose.xp = parse_double(row[4], where);
    pose.yp = parse_double(row[5], where);
    pose.theta_p = parse_double(row[6], where);
    try {
      validate_pose(pose);
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    set.poses.push_back(pose);
    set.responses[static_cast<Eigen::Index>(i)] = parse_double(row[7], where);
  }
  return set;
}

inline void write_replication_csv(const ReplicationTable& table,
                                  const std::filesystem::path& path) {
  CsvWriter out(path);
  out.row({"N", "q2_icv_mean", "q2_icv_std", "q2_ocv_mean", "q2_ocv_std",
           "q2_test_mean", "q2_test_std", "n_rep", "failures"});
  for (const auto& row : table.rows) {
    out.row({format_int(row.n), detail::csv_cell(row.q2_icv_mean),
             detail::csv_cell(row.q2_icv_std),
             detail::csv_cell(row.q2_ocv_mean),
             detail::csv_cell(row.q2_ocv_std),
             detail::csv_cell(row.q2_test_mean),
             detail::csv_cell(row.q2_test_std), format_int(row.n_rep),
             format_int(row.failures)});
  }
  out.close();
}

inline void write_ocv_csv(const OcvReport& report,
                          const std::filesystem::path& path) {
  CsvWriter out(path);
  out.row({"fold", "truth", "prediction", "ok"});
  for (const auto& fold : report.per_fold) {
    out.row({format_int(fold.held_out_index), format_double(fold.truth),
             fold.ok ? format_double(fold.prediction) : std::string(),
             fold.ok ? "1" : "0"});
  }
  out.close();
}

// Per-variable indices plus the upper-triangle interaction block; labeled
// as surrogate quantities because they describe the expansion, not the
// underlying simulator.
inline void write_sensitivity_csv(const SobolIndices& s,
                                  const std::vector<std::string>& names,
                                  const std::filesystem::path& path) {
  const auto d = s.total.size();
  if (static_cast<Eigen::Index>(names.size()) != d)
    throw ConfigError("sensitivity names do not match the dimension");
  CsvWriter out(path);
  out.line("# surrogate Sobol indices");
  out.line("# mean," + format_double(s.mean));
  out.line("# variance," + format_double(s.variance));
  out.row({"variable", "name", "first_order", "total"});
  for (Eigen::Index i = 0; i < d; ++i) {
    out.row({format_int(i), names[static_cast<std::size_t>(i)],
             format_double(s.first_order[i]), format_double(s.total[i])});
  }
  out.line("");
  out.line("i,j,second_order");
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = i + 1; j < d; ++j)
      out.line(format_int(i) + "," + format_int(j) + "," +
               format_double(s.second_order(i, j)));
  out.close();
}

// --------------------------------------------------------------------------
// Checksums and the run manifest
// --------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("cannot open '" + path.string() + "' for checksumming");
  std::uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const auto got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  static const char digits[] = "0123456789abcdef";
  std::string s = "0x";
  for (int shift = 60; shift >= 0; shift -= 4)
    s.push_back(digits[(v >> shift) & 0xF]);
  return s;
}

// Writes manifest.json into `dir`, listing every produced artifact with its
// checksum. The manifest is the only output that carries wall-clock
// information.
inline void write_manifest(const std::filesystem::path& dir,
                           std::uint64_t seed,
                           std::uint64_t config_checksum,
                           const std::vector<std::string>& output_files) {
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& name : output_files) {
    outputs.push_back(
        {{"file", name}, {"fnv1a64", hex64(fnv1a64_file(dir / name))}});
  }

  char stamp[32] = "unknown";
  const std::time_t now = std::time(nullptr);
  std::tm tm_utc{};
  if (gmtime_r(&now, &tm_utc) != nullptr)
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);

  const nlohmann::json manifest{
      {"tool", "pcecv"},
      {"version", kToolVersion},
      {"generator", kGeneratorId},
      {"created_utc", stamp},
      {"seed", seed},
      {"config_fnv1a64", hex64(config_checksum)},
      {"outputs", std::move(outputs)}};

  const std::filesystem::path path = dir / "manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw DataError("cannot open '" + path.string() + "' for writing");
  out << manifest.dump(2) << '\n';
  out.flush();
  if (!out) throw DataError("write failure on '" + path.string() + "'");
}

}  // namespace pcecv
