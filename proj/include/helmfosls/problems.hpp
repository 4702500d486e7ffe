#pragma once

#include <string>

#include "helmfosls/assembly.hpp"
#include "helmfosls/mesh.hpp"

namespace helmfosls {

// built-in benchmark domains:
//  unit_square  - (0,1)^2 cut along both diagonals, center vertex newest,
//                 all-Robin boundary, plane-wave data with known solution
//  non_trapping - square with a dart-shaped obstacle (re-entrant notch),
//                 sound-soft scattering data, no trapped rays
//  trapping     - square with a C-shaped obstacle and wedge walls forming a
//                 semi-enclosed cavity plus a sealed side pocket
enum class ProblemId { unit_square, non_trapping, trapping };

ProblemId problem_from_string(const std::string& s);
std::string problem_to_string(ProblemId id);

Triangulation build_initial_mesh(ProblemId id);
ProblemData make_problem(ProblemId id, Real kappa);

// plane wave exp(i kappa r.x) with |r| = 1
Complex plane_wave(Real kappa, const Vec2& r, const Vec2& x);

}  // namespace helmfosls
