#pragma once

#include <vector>

#include "qpcover/rational.hpp"

namespace qpcover {

using Mat = RatMat;

Mat mat_zero(int rows, int cols);
Mat mat_identity(int n);
Mat mat_mul(const Mat& a, const Mat& b);
Mat mat_add(const Mat& a, const Mat& b);
bool mat_is_zero(const Mat& a);
bool mat_equal(const Mat& a, const Mat& b);

/// In-place reduced row echelon form; returns pivot column indices.
std::vector<int> rref(Mat& m);

int rank(Mat m);

/// Basis of the right kernel (column vectors as rows of the result).
std::vector<RatVec> kernel_basis(Mat m);

/// Least solution check: does b lie in the row space of m?
bool in_row_space(const Mat& m, const RatVec& b);

} // namespace qpcover
