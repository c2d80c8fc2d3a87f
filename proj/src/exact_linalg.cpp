#include "qpcover/exact_linalg.hpp"

#include "qpcover/errors.hpp"

namespace qpcover {

Mat mat_zero(int rows, int cols) {
    return Mat(rows, RatVec(cols, Rat(0)));
}

Mat mat_identity(int n) {
    Mat m = mat_zero(n, n);
    for (int i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

Mat mat_mul(const Mat& a, const Mat& b) {
    int n = static_cast<int>(a.size());
    if (n == 0) return {};
    int k = static_cast<int>(a[0].size());
    int m = b.empty() ? 0 : static_cast<int>(b[0].size());
    if (k != static_cast<int>(b.size())) throw StructuralError("matrix product: shape mismatch");
    Mat r = mat_zero(n, m);
    for (int i = 0; i < n; ++i)
        for (int t = 0; t < k; ++t) {
            if (a[i][t] == 0) continue;
            for (int j = 0; j < m; ++j)
                if (b[t][j] != 0) r[i][j] += a[i][t] * b[t][j];
        }
    return r;
}

Mat mat_add(const Mat& a, const Mat& b) {
    if (a.size() != b.size()) throw StructuralError("matrix sum: shape mismatch");
    Mat r = a;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].size() != b[i].size()) throw StructuralError("matrix sum: shape mismatch");
        for (size_t j = 0; j < a[i].size(); ++j) r[i][j] += b[i][j];
    }
    return r;
}

bool mat_is_zero(const Mat& a) {
    for (const auto& row : a)
        for (const auto& x : row)
            if (x != 0) return false;
    return true;
}

bool mat_equal(const Mat& a, const Mat& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

std::vector<int> rref(Mat& m) {
    std::vector<int> pivots;
    int rows = static_cast<int>(m.size());
    int cols = rows ? static_cast<int>(m[0].size()) : 0;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int p = -1;
        for (int i = r; i < rows; ++i)
            if (m[i][c] != 0) { p = i; break; }
        if (p < 0) continue;
        std::swap(m[r], m[p]);
        Rat inv = Rat(1) / m[r][c];
        for (int j = c; j < cols; ++j) m[r][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || m[i][c] == 0) continue;
            Rat f = m[i][c];
            for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

int rank(Mat m) {
    return static_cast<int>(rref(m).size());
}

std::vector<RatVec> kernel_basis(Mat m) {
    int cols = m.empty() ? 0 : static_cast<int>(m[0].size());
    std::vector<int> pivots = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<RatVec> basis;
    for (int free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        RatVec v(cols, Rat(0));
        v[free] = 1;
        for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

bool in_row_space(const Mat& m, const RatVec& b) {
    Mat a = m;
    int r0 = rank(a);
    a = m;
    a.push_back(b);
    return rank(a) == r0;
}

} // namespace qpcover
