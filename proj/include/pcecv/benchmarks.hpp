#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pcecv/distributions.hpp"
#include "pcecv/errors.hpp"
#include "pcecv/sampling.hpp"
#include "pcecv/training.hpp"

namespace pcecv {

// --------------------------------------------------------------------------
// Analytic test functions
// --------------------------------------------------------------------------

inline double ishigami(double x1, double x2, double x3, double a = 7.0,
                       double b = 0.1) {
  const double s1 = std::sin(x1);
  const double s2 = std::sin(x2);
  return s1 + a * s2 * s2 + b * x3 * x3 * x3 * x3 * s1;
}

// Water flow through a borehole. `x` is ordered (r_w, r, T_u, H_u, T_l,
// H_l, L, K_w).
inline double borehole(const Eigen::VectorXd& x) {
  if (x.size() != 8) throw DataError("borehole expects an 8-vector");
  const double rw = x[0], r = x[1], tu = x[2], hu = x[3], tl = x[4],
               hl = x[5], l = x[6], kw = x[7];
  if (!(rw > 0.0)) throw DataError("borehole requires r_w > 0");
  if (!(r > rw)) throw DataError("borehole requires r > r_w");
  if (!(tl > 0.0)) throw DataError("borehole requires T_l > 0");
  if (!(kw > 0.0)) throw DataError("borehole requires K_w > 0");
  if (!(l > 0.0)) throw DataError("borehole requires L > 0");
  const double log_ratio = std::log(r / rw);
  const double denom =
      log_ratio * (1.0 + tu / tl) + 2.0 * l * tu / (rw * rw * kw);
  return 2.0 * std::numbers::pi * tu * (hu - hl) / denom;
}

inline InputSpace ishigami_space() {
  const double pi = std::numbers::pi;
  return InputSpace{{{DistKind::Uniform, -pi, pi, std::nullopt, "x1"},
                     {DistKind::Uniform, -pi, pi, std::nullopt, "x2"},
                     {DistKind::Uniform, -pi, pi, std::nullopt, "x3"}}};
}

inline InputSpace borehole_space() {
  return InputSpace{
      {{DistKind::Gaussian, 0.10, 0.0161812, std::pair{0.05, 0.15}, "rw"},
       {DistKind::Lognormal, 7.71, 1.0056, std::pair{100.0, 50000.0}, "r"},
       {DistKind::Uniform, 63070.0, 115600.0, std::nullopt, "Tu"},
       {DistKind::Uniform, 990.0, 1110.0, std::nullopt, "Hu"},
       {DistKind::Uniform, 63.1, 116.0, std::nullopt, "Tl"},
       {DistKind::Uniform, 700.0, 820.0, std::nullopt, "Hl"},
       {DistKind::Uniform, 1120.0, 1680.0, std::nullopt, "L"},
       {DistKind::Uniform, 9855.0, 12045.0, std::nullopt, "Kw"}}};
}

// --------------------------------------------------------------------------
// Room scenarios and wall-local coordinates
// --------------------------------------------------------------------------

// Room dimensions in meters.
inline constexpr double kRoomX = 4.0;
inline constexpr double kRoomY = 3.0;
inline constexpr double kRoomZ = 2.0;

// Walls numbered counter-clockwise: W1 is y = 0 (inward normal +y), W2 is
// x = 0, W3 is y = kRoomY, W4 is x = kRoomX.
enum class Wall { W1 = 1, W2 = 2, W3 = 3, W4 = 4 };

inline int wall_number(Wall w) { return static_cast<int>(w); }

inline Wall wall_from_number(int n) {
  if (n < 1 || n > 4)
    throw DataError("wall number must be 1..4, got " + std::to_string(n));
  return static_cast<Wall>(n);
}

// Rotation offset (degrees) aligning a wall's local frame with W1's.
inline double wall_offset_deg(Wall w) {
  switch (w) {
    case Wall::W1: return 0.0;
    case Wall::W2: return 90.0;
    case Wall::W3: return 180.0;
    case Wall::W4: return 270.0;
  }
  throw DataError("invalid wall");
}

struct ScenarioPose {
  double xs = 0.0, ys = 0.0, zs = 0.0;  // source box center
  Wall wall = Wall::W1;
  double xp = 0.0, yp = 0.0;  // person position
  double theta_p = 0.0;       // person orientation, degrees in [0, 360)
};

struct LocalPose {
  double r = 0.0;        // source-person distance in the floor plane
  double psi = 0.0;      // polar angle of the person, degrees in [0, 360)
  double theta_s = 0.0;  // person orientation in the wall frame, [0, 360)
  double z = 0.0;        // source height, pass-through
};

inline void validate_pose(const ScenarioPose& pose) {
  const auto in = [](double v, double lo, double hi) {
    return std::isfinite(v) && v >= lo && v <= hi;
  };
  if (!in(pose.xs, 0.0, kRoomX) || !in(pose.ys, 0.0, kRoomY) ||
      !in(pose.zs, 0.0, kRoomZ))
    throw DataError("scenario source position outside the room");
  if (!in(pose.xp, 0.0, kRoomX) || !in(pose.yp, 0.0, kRoomY))
    throw DataError("scenario person position outside the room");
  if (!std::isfinite(pose.theta_p) || pose.theta_p < 0.0 ||
      pose.theta_p >= 360.0)
    throw DataError("scenario orientation must lie in [0, 360)");
}

// Wall-local polar coordinates of the person relative to the source. Each
// wall case is an exact quarter-turn of the displacement (coordinate swaps
// and sign flips, no trigonometry), so geometrically identical scenes on
// different walls reduce to bitwise identical local frames.
inline LocalPose to_local(const ScenarioPose& pose) {
  validate_pose(pose);
  const double dx = pose.xp - pose.xs;
  const double dy = pose.yp - pose.ys;
  double lx = 0.0, ly = 0.0;
  switch (pose.wall) {
    case Wall::W1: lx = dx;  ly = dy;  break;
    case Wall::W2: lx = -dy; ly = dx;  break;
    case Wall::W3: lx = -dx; ly = -dy; break;
    case Wall::W4: lx = dy;  ly = -dx; break;
  }
  LocalPose local;
  local.r = std::sqrt(lx * lx + ly * ly);
  double psi = std::atan2(ly, lx) * (180.0 / std::numbers::pi);
  if (psi < 0.0) psi += 360.0;
  local.psi = psi;
  local.theta_s = std::fmod(pose.theta_p + wall_offset_deg(pose.wall), 360.0);
  local.z = pose.zs;
  return local;
}

// Synthetic dosimetry stand-in: exposure falls off with the squared source
// distance and peaks for source heights near torso level. Smooth in every
// local coordinate and independent of the angles, which makes variable
// importances easy to reason about in tests.
inline double sar_synthetic_response(const LocalPose& local) {
  const double t = (local.z - 0.75) / 0.35;
  const double d = 1.0 + local.r;
  return 0.2 * std::exp(-t * t) / (d * d);
}

struct ScenarioSet {
  std::vector<ScenarioPose> poses;
  Eigen::VectorXd responses;
};

// Source box placement ranges along each wall and the remaining marginals.
inline constexpr double kAlongWallMarginX[2] = {0.3, 3.7};
inline constexpr double kAlongWallMarginY[2] = {0.3, 2.7};
inline constexpr double kSourceHeight[2] = {0.25, 2.0};
inline constexpr double kPersonX[2] = {0.05, 3.95};
inline constexpr double kPersonY[2] = {0.05, 2.95};

// Latin-hypercube scenario generator: six stratified unit columns drive
// (wall, along-wall position, source height, person x, person y, person
// orientation). The wall index is the floor of 4x the first column, so the
// walls are themselves stratified whenever 4 divides n. Responses come from
// the synthetic stand-in.
inline ScenarioSet generate_scenarios(int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("generate_scenarios requires n >= 1");
  InputSpace unit;
  for (int j = 0; j < 6; ++j)
    unit.marginals.push_back(
        {DistKind::Uniform, 0.0, 1.0, std::nullopt, "u" + std::to_string(j)});
  const Eigen::MatrixXd u = lhs_sample(n, unit, seed).natural;

  const auto lerp = [](const double (&range)[2], double t) {
    return range[0] + t * (range[1] - range[0]);
  };

  ScenarioSet set;
  set.poses.resize(static_cast<std::size_t>(n));
  set.responses.resize(n);
  for (int i = 0; i < n; ++i) {
    ScenarioPose& pose = set.poses[static_cast<std::size_t>(i)];
    pose.wall = wall_from_number(
        1 + static_cast<int>(std::floor(u(i, 0) * 4.0)));
    switch (pose.wall) {
      case Wall::W1:
        pose.xs = lerp(kAlongWallMarginX, u(i, 1));
        pose.ys = 0.0;
        break;
      case Wall::W2:
        pose.xs = 0.0;
        pose.ys = lerp(kAlongWallMarginY, u(i, 1));
        break;
      case Wall::W3:
        pose.xs = lerp(kAlongWallMarginX, u(i, 1));
        pose.ys = kRoomY;
        break;
      case Wall::W4:
        pose.xs = kRoomX;
        pose.ys = lerp(kAlongWallMarginY, u(i, 1));
        break;
    }
    pose.zs = lerp(kSourceHeight, u(i, 2));
    pose.xp = lerp(kPersonX, u(i, 3));
    pose.yp = lerp(kPersonY, u(i, 4));
    pose.theta_p = 360.0 * u(i, 5);
    if (pose.theta_p >= 360.0) pose.theta_p = 0.0;
    set.responses[i] = sar_synthetic_response(to_local(pose));
  }
  return set;
}

// --------------------------------------------------------------------------
// Input reformulations
// --------------------------------------------------------------------------

enum class ReduceMode { Six, Four, Two };

inline const char* to_string(ReduceMode m) {
  switch (m) {
    case ReduceMode::Six: return "six";
    case ReduceMode::Four: return "four";
    case ReduceMode::Two: return "two";
  }
  return "?";
}

inline ReduceMode reduce_mode_from(const std::string& s) {
  if (s == "six") return ReduceMode::Six;
  if (s == "four") return ReduceMode::Four;
  if (s == "two") return ReduceMode::Two;
  throw ConfigError("unknown reduction mode '" + s + "'");
}

// Training marginals for each reformulation; uniform over the reachable
// range of every coordinate.
inline InputSpace scenario_space(ReduceMode mode) {
  const double diag = std::sqrt(kRoomX * kRoomX + kRoomY * kRoomY);
  switch (mode) {
    case ReduceMode::Six:
      return InputSpace{
          {{DistKind::Uniform, 0.0, kRoomX, std::nullopt, "xs"},
           {DistKind::Uniform, 0.0, kRoomY, std::nullopt, "ys"},
           {DistKind::Uniform, kSourceHeight[0], kSourceHeight[1],
            std::nullopt, "zs"},
           {DistKind::Uniform, kPersonX[0], kPersonX[1], std::nullopt, "xp"},
           {DistKind::Uniform, kPersonY[0], kPersonY[1], std::nullopt, "yp"},
           {DistKind::Uniform, 0.0, 360.0, std::nullopt, "theta_p"}}};
    case ReduceMode::Four:
      return InputSpace{
          {{DistKind::Uniform, 0.0, diag, std::nullopt, "r"},
           {DistKind::Uniform, 0.0, 180.0, std::nullopt, "psi"},
           {DistKind::Uniform, 0.0, 360.0, std::nullopt, "theta_s"},
           {DistKind::Uniform, kSourceHeight[0], kSourceHeight[1],
            std::nullopt, "z"}}};
    case ReduceMode::Two:
      return InputSpace{
          {{DistKind::Uniform, 0.0, diag, std::nullopt, "r"},
           {DistKind::Uniform, kSourceHeight[0], kSourceHeight[1],
            std::nullopt, "z"}}};
  }
  throw ConfigError("invalid reduction mode");
}

// Projects a scenario set onto the chosen coordinate system. Responses are
// carried over unchanged.
inline ExperimentalDesign reduce_inputs(const ScenarioSet& set,
                                        ReduceMode mode) {
  const auto n = static_cast<Eigen::Index>(set.poses.size());
  if (set.responses.size() != n)
    throw DataError("scenario set responses do not match the pose count");
  ExperimentalDesign ed;
  ed.responses = set.responses;
  const int cols = mode == ReduceMode::Six ? 6
                   : mode == ReduceMode::Four ? 4
                                              : 2;
  ed.inputs.resize(n, cols);
  for (Eigen::Index i = 0; i < n; ++i) {
    const ScenarioPose& pose = set.poses[static_cast<std::size_t>(i)];
    if (mode == ReduceMode::Six) {
      ed.inputs.row(i) << pose.xs, pose.ys, pose.zs, pose.xp, pose.yp,
          pose.theta_p;
    } else {
      const LocalPose local = to_local(pose);
      if (mode == ReduceMode::Four) {
        ed.inputs.row(i) << local.r, local.psi, local.theta_s, local.z;
      } else {
        ed.inputs.row(i) << local.r, local.z;
      }
    }
  }
  return ed;
}

// --------------------------------------------------------------------------
// Benchmark registry
// --------------------------------------------------------------------------

// A named problem: its input space and a seeded design generator producing
// inputs with responses.
struct Benchmark {
  std::string id;
  InputSpace space;
  std::function<ExperimentalDesign(int n, std::uint64_t seed)> sample;
};

inline std::vector<std::string> benchmark_ids() {
  return {"ishigami", "borehole", "sar-synthetic", "sar-synthetic-four",
          "sar-synthetic-two"};
}

inline Benchmark make_benchmark(const std::string& id) {
  Benchmark b;
  b.id = id;
  if (id == "ishigami") {
    b.space = ishigami_space();
    b.sample = [space = b.space](int n, std::uint64_t seed) {
      const auto s = lhs_sample(n, space, seed);
      ExperimentalDesign ed{s.natural, Eigen::VectorXd(n)};
      for (int i = 0; i < n; ++i)
        ed.responses[i] =
            ishigami(s.natural(i, 0), s.natural(i, 1), s.natural(i, 2));
      return ed;
    };
  } else if (id == "borehole") {
    b.space = borehole_space();
    b.sample = [space = b.space](int n, std::uint64_t seed) {
      const auto s = lhs_sample(n, space, seed);
      ExperimentalDesign ed{s.natural, Eigen::VectorXd(n)};
      for (int i = 0; i < n; ++i)
        ed.responses[i] = borehole(s.natural.row(i).transpose());
      return ed;
    };
  } else if (id == "sar-synthetic" || id == "sar-synthetic-four" ||
             id == "sar-synthetic-two") {
    const ReduceMode mode = id == "sar-synthetic" ? ReduceMode::Six
                            : id == "sar-synthetic-four" ? ReduceMode::Four
                                                         : ReduceMode::Two;
    b.space = scenario_space(mode);
    b.sample = [mode](int n, std::uint64_t seed) {
      return reduce_inputs(generate_scenarios(n, seed), mode);
    };
  } else {
    throw ConfigError("unknown benchmark id '" + id + "'");
  }
  return b;
}

}  // namespace pcecv
