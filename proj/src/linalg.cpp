#include "tale/linalg.hpp"

namespace tale {

int common_null_dimension(const std::vector<CMat>& blocks, double tol)
{
    if (blocks.empty()) return 0;
    const Eigen::Index cols = blocks.front().cols();
    CMat stacked(static_cast<Eigen::Index>(blocks.size()) * blocks.front().rows(), cols);
    Eigen::Index row = 0;
    for (const CMat& b : blocks) {
        stacked.middleRows(row, b.rows()) = b;
        row += b.rows();
    }
    Eigen::JacobiSVD<CMat> svd(stacked);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol) ++rank;
    return static_cast<int>(cols) - rank;
}

}  // namespace tale
