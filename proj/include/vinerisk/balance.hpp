#pragma once

#include "vinerisk/features.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace vinerisk {

/// Rows of the input followed by synthetic minority rows.
struct Oversampled {
  Eigen::MatrixXd X;
  Eigen::VectorXi y;
  std::vector<bool> synthetic;
  /// For synthetic row r: the two original rows it interpolates between,
  /// x_r = x_a + u (x_b - x_a). Original rows carry {r, r}.
  std::vector<std::array<Eigen::Index, 2>> parents;
};

/**
 * SMOTE oversampling of the minority class until both classes are equal.
 *
 * Minority rows are visited round-robin over a seeded shuffle. Each visit
 * picks one of the row's k nearest minority neighbours uniformly (Euclidean
 * distance after z-scoring on the minority rows; effective k is
 * min(k, minority - 1); distance ties go to the lower row) and emits a point
 * uniformly on the segment between them.
 *
 * Throws InputError if a class is empty, the minority has fewer than two
 * rows, or k < 1. A balanced input is returned unchanged.
 */
Oversampled smote(const Eigen::MatrixXd& X, const Eigen::VectorXi& y, int k,
                  std::uint64_t seed);

struct BalancedSet {
  std::vector<LabeledInstance> instances;
  std::vector<bool> synthetic_flags;
};

/// Instance-level wrapper. Synthetic instances copy the key of the row they
/// were grown from.
BalancedSet smote(std::span<const LabeledInstance> instances, int k = 5,
                  std::uint64_t seed = 0);

} // namespace vinerisk
