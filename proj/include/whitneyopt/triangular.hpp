#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "whitneyopt/polynomial.hpp"

namespace whitneyopt {

/// Triangular set: non-constant polynomials with pairwise distinct main
/// variables, sorted by ascending main variable.
struct TriangularSystem {
  VariableOrder order;
  std::vector<Polynomial> polynomials;
  std::vector<std::size_t> algebraic_vars;  // mvars, ascending
  std::vector<std::size_t> free_vars;       // ascending

  std::size_t manifold_dim() const { return free_vars.size(); }
  bool is_free(std::size_t var) const;
  /// Polynomial whose main variable is `var`, if any.
  const Polynomial* polynomial_for(std::size_t var) const;
};

/// Throws Error(kConstantMember) or Error(kDuplicateMvar).
TriangularSystem validate_triangular(std::vector<Polynomial> polys, const VariableOrder& order);

/// Split of a triangular system into a reduced block (g_star over the
/// retained variables) and an elimination cascade (g_circ solved for the
/// eliminated variables, in order).
struct WhitneyPartition {
  TriangularSystem system;
  std::vector<std::size_t> eliminated;  // elimination order, g_circ[j] solves eliminated[j]
  std::vector<std::size_t> retained;    // ascending rank
  std::vector<Polynomial> g_star;       // over the full order, no eliminated variable
  std::vector<Polynomial> g_circ;

  std::size_t manifold_dim() const { return system.manifold_dim(); }
  std::size_t reduced_dim() const { return retained.size(); }
  const VariableOrder& order() const { return system.order; }
  /// Order over the retained variables only, used for reduced coordinates.
  VariableOrder retained_order() const;
  /// g_star re-expressed over retained_order().
  std::vector<Polynomial> reduced_constraints() const;
};

/// `eliminate == nullopt` selects AUTO. Throws Error(kNotEliminable) or
/// Error(kEmptyGstar).
WhitneyPartition whitney_partition(const TriangularSystem& sys,
                                   const std::optional<std::vector<std::size_t>>& eliminate);

/// Block-triangular form of a linear system A z = b with z = [y x u]:
///
///   [A11 A12 A13] [y]   [b1]      y: k-m-1,  x: m+1,  u: m
///   [ 0  A22 A23] [x] = [b2]
///                 [u]
///
/// A11 and A22 are upper triangular with nonzero diagonal.
struct LinearTriangularForm {
  Eigen::MatrixXd a11, a12, a13, a22, a23;
  Eigen::VectorXd b1, b2;

  /// Point of the reduced manifold over the given u (back substitution in A22).
  Eigen::VectorXd solve_x(const Eigen::VectorXd& u) const;
  /// Eliminated block for a reduced point (back substitution in A11).
  Eigen::VectorXd solve_y(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
};

/// `a` is k x (m+k) with k > m+1 and full row rank.
LinearTriangularForm linear_whitney(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                                    std::size_t m);

}  // namespace whitneyopt
