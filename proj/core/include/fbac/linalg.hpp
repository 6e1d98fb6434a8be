#pragma once

#include <Eigen/Dense>

namespace fbac {

// Ambient dimension is a runtime value in {1, 2, 3}; fixed maximum sizes keep
// these on the stack.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;

inline Vec zero_vec(int dim) { return Vec::Zero(dim); }
inline Mat zero_mat(int dim) { return Mat::Zero(dim, dim); }
inline Mat identity(int dim) { return Mat::Identity(dim, dim); }

/// Frobenius norm squared, |M|^2 = sum_ij M_ij^2.
inline double frob2(const Mat& m) { return m.squaredNorm(); }

}  // namespace fbac
