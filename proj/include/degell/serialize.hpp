#pragma once

#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "degell/analysis.hpp"
#include "degell/assembly.hpp"
#include "degell/mesh.hpp"
#include "degell/problem.hpp"
#include "degell/solver.hpp"
#include "degell/spectral.hpp"

namespace degell {

using Json = nlohmann::json;

/// Finite numbers as JSON numbers; infinities as the strings "infinity" and
/// "-infinity"; NaN as null.
Json number(double value);

Json to_json(const ProblemSpec& problem);
Json to_json(const Mesh& mesh);
Json to_json(const FredholmOutcome& outcome);
Json to_json(const ShiftedSolution& solution);
Json to_json(const StabilityReport& report);
Json to_json(const SpectrumResult& result);
Json to_json(const SpectralClaims& claims);
Json to_json(const ConvergenceTable& table);
Json to_json(const InequalityReport& report);
Json to_json(const UniquenessReport& report);
Json to_json(const MaxPrincipleReport& report);

/// Two-space indented JSON followed by a newline.
std::string dump(const Json& json);

/// CSV with header `vertex,x,value` (1D) or `vertex,x,y,value` (2D).
void write_vertex_csv(std::ostream& out, const Mesh& mesh, const Eigen::VectorXd& vertex_values);

/// One `i j value` line per stored entry, 0-indexed.
void write_coo(std::ostream& out, const SparseMatrix& matrix);

}  // namespace degell
