#pragma once

// Closed forms for the three-state example x(t+1) = x + u + w on {-1, 0, 1}:
// V(t, x) = (M^{T-t} 1)_{x+2}, components 1..3 <-> x = -1, 0, 1, and the
// kernel trichotomy that follows from it.

#include <array>

namespace viab::oracle {

using Matrix3 = std::array<std::array<double, 3>, 3>;
using Vector3 = std::array<double, 3>;

/// M = [[p, 1-2p, p], [p, 1-2p, 0], [p, 1-2p, p]], as published.
Matrix3 example_matrix(double p);

/// Transition matrix implied by the dynamics under the viable feedback
/// (u = +1 at -1, u = -1 at 0 and +1): the middle row is (1-2p, p, 0).
/// Differs from example_matrix in the middle row.
Matrix3 dynamics_matrix(double p);

/// M^k 1 by k repeated matrix-vector products.
Vector3 power_times_ones(const Matrix3& m, int k);

/// (M^{T-t} 1)_{x+2} for x in {-1, 0, 1}; 0 for any other x.
double matrix_value(double p, int T, int t, int x);

/// Same recursion with dynamics_matrix.
double dynamics_matrix_value(double p, int T, int t, int x);

enum class KernelShape { Full, BoundaryPair, Empty };

const char* to_string(KernelShape shape);

/// Full if beta <= (M^{T-t}1)_2, BoundaryPair if (M^{T-t}1)_2 < beta <= (M^{T-t}1)_1,
/// Empty otherwise.
KernelShape kernel_closed_form(double p, int T, int t, double beta);
KernelShape dynamics_kernel_closed_form(double p, int T, int t, double beta);

}  // namespace viab::oracle
