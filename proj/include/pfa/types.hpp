#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace pfa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexSet = std::vector<Index>;

// Test statistics plus the ground-truth null mask available in simulations
// (null_mask[i] == true means hypothesis i is a true null).
struct ZStatistics {
    Vector z;
    std::optional<std::vector<bool>> null_mask;
};

}  // namespace pfa
