#include "viab/oracle_example.hpp"

#include <string>

#include "viab/error.hpp"

namespace viab::oracle {
namespace {

void check_p(double p) {
  if (!(p > 0.0 && p < 0.5)) throw ArgumentError("p must lie in (0, 1/2)");
}

void check_stage(int T, int t) {
  if (t > T) throw ArgumentError("stage " + std::to_string(t) + " is past the horizon " + std::to_string(T));
}

void check_beta(double beta) {
  if (!(beta > 0.0 && beta <= 1.0)) throw ArgumentError("beta must lie in (0, 1]");
}

double value_with(const Matrix3& m, int T, int t, int x) {
  check_stage(T, t);
  if (x < -1 || x > 1) return 0.0;
  return power_times_ones(m, T - t)[static_cast<std::size_t>(x + 1)];
}

KernelShape shape_with(const Matrix3& m, int T, int t, double beta) {
  check_stage(T, t);
  check_beta(beta);
  const Vector3 v = power_times_ones(m, T - t);
  if (beta <= v[1]) return KernelShape::Full;
  if (beta <= v[0]) return KernelShape::BoundaryPair;
  return KernelShape::Empty;
}

}  // namespace

Matrix3 example_matrix(double p) {
  check_p(p);
  const double q = 1.0 - 2.0 * p;
  return {{{p, q, p}, {p, q, 0.0}, {p, q, p}}};
}

Matrix3 dynamics_matrix(double p) {
  check_p(p);
  const double q = 1.0 - 2.0 * p;
  return {{{p, q, p}, {q, p, 0.0}, {p, q, p}}};
}

Vector3 power_times_ones(const Matrix3& m, int k) {
  if (k < 0) throw ArgumentError("negative matrix power");
  Vector3 v{1.0, 1.0, 1.0};
  for (int step = 0; step < k; ++step) {
    Vector3 next{};
    for (std::size_t i = 0; i < 3; ++i) {
      next[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    v = next;
  }
  return v;
}

double matrix_value(double p, int T, int t, int x) { return value_with(example_matrix(p), T, t, x); }

double dynamics_matrix_value(double p, int T, int t, int x) {
  return value_with(dynamics_matrix(p), T, t, x);
}

const char* to_string(KernelShape shape) {
  switch (shape) {
    case KernelShape::Full: return "full";
    case KernelShape::BoundaryPair: return "boundary_pair";
    case KernelShape::Empty: return "empty";
  }
  return "?";
}

KernelShape kernel_closed_form(double p, int T, int t, double beta) {
  return shape_with(example_matrix(p), T, t, beta);
}

KernelShape dynamics_kernel_closed_form(double p, int T, int t, double beta) {
  return shape_with(dynamics_matrix(p), T, t, beta);
}

}  // namespace viab::oracle
