#pragma once

#include <string>

#include <json.hpp>

#include "phtune/config.hpp"
#include "phtune/pipeline.hpp"
#include "phtune/sim.hpp"

namespace phtune {

nlohmann::ordered_json to_json_vector(const Vec& v);
nlohmann::ordered_json to_json_matrix(const Mat& m);
nlohmann::ordered_json to_json_spectrum(const CVec& eigenvalues);

/// Single analysis document: metadata, equilibrium membership, admissibility,
/// structural conditions, equilibrium-evaluated target matrices, spectral
/// summary, ES/ISS constants and the canonical section.  Every field of the
/// underlying result structs appears by name.
nlohmann::ordered_json analysis_report(const RunConfig& cfg,
                                       const AnalysisResult& result);

/// Post-simulation metrics document.
nlohmann::ordered_json metrics_report(const Trajectory& traj,
                                      const TrajectoryMetrics& tm,
                                      const Vec& q_star);

/// Pretty-prints (2-space indent, trailing newline).
void write_json(const std::string& path, const nlohmann::ordered_json& doc);

/// Columns: t, q1..qn, p1..pn, y1..ym, hat_norm; every value printed with
/// %.17g so equal trajectories serialize byte-identically.
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

/// Columns: eig_re, eig_im, center_re, center_im, radius, defined
/// (saddle-side values; the closed-loop spectrum is their negative).
void write_circles_csv(const std::string& path, const EigenCircleSet& set);

/// Standalone SVG of the closed-loop spectrum: eigenvalue markers plus the
/// mirrored enclosing circles.
void write_circles_svg(const std::string& path, const CVec& eigenvalues,
                       const EigenCircleSet& set);

}  // namespace phtune
