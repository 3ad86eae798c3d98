#pragma once

#include <filesystem>
#include <string_view>

#include "degell/problem.hpp"

namespace degell {

/// Parses a problem description:
///
///   # comment
///   [domain]     kind = interval | rect; a, b, n  or  x_range, y_range, nx, ny; bc
///   [operator]   P, Q (matrices), H, G (lists), R, S (lists of vector fields), F
///   [data]       f, g (list), T (list of vector fields), u (candidate function)
///   [exponents]  t, q, omega, sigma
///   [numerics]   seed, trials, negativity_trials, tol_rank, directions,
///                sample_points, k, C4
///
/// Values are expressions, bracketed lists of values, or bare words. Lists
/// split on top-level commas only, so `max(x, y)` stays one entry. A missing
/// Q defaults to P and a missing P to the identity. Throws ParseError with the
/// line and column of the offending text, and Error(InvalidData) when the
/// assembled problem is inconsistent.
ProblemSpec parse_problem(std::string_view text);

/// Reads and parses a file; Error(Io) when it cannot be read.
ProblemSpec load_problem(const std::filesystem::path& path);

}  // namespace degell
