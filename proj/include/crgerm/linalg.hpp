#pragma once

// Exact rational linear algebra for the small dense systems produced by
// coefficient extraction: reduced row echelon form, rank, and nullspace
// bases. Pivoting is first-nonzero, so results are deterministic.

#include "crgerm/rational.hpp"

#include <vector>

namespace crgerm {

using RatVec = std::vector<Rat>;
using RatMatrix = std::vector<RatVec>;

/// In-place RREF; returns the pivot column of each pivot row, in order.
inline std::vector<int> rref(RatMatrix& m) {
    std::vector<int> pivots;
    if (m.empty()) return pivots;
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    int row = 0;
    for (int col = 0; col < cols && row < rows; ++col) {
        int pivot = -1;
        for (int r = row; r < rows; ++r)
            if (m[r][col] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(m[row], m[pivot]);
        Rat inv = Rat(1) / m[row][col];
        for (int c = col; c < cols; ++c) m[row][c] *= inv;
        for (int r = 0; r < rows; ++r) {
            if (r == row || m[r][col] == 0) continue;
            Rat factor = m[r][col];
            for (int c = col; c < cols; ++c) m[r][c] -= factor * m[row][c];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

inline int rank(RatMatrix m) { return static_cast<int>(rref(m).size()); }

/// Basis of the solution space of A x = 0, one vector per free column:
/// the free coordinate is 1 and pivot coordinates are back-substituted.
inline std::vector<RatVec> nullspace(RatMatrix a) {
    if (a.empty()) return {};
    const int cols = static_cast<int>(a[0].size());
    std::vector<int> pivots = rref(a);

    std::vector<int> pivot_of_col(cols, -1);
    for (std::size_t r = 0; r < pivots.size(); ++r) pivot_of_col[pivots[r]] = static_cast<int>(r);

    std::vector<RatVec> basis;
    for (int free = 0; free < cols; ++free) {
        if (pivot_of_col[free] >= 0) continue;
        RatVec x(cols, Rat(0));
        x[free] = 1;
        for (int c = 0; c < cols; ++c) {
            int r = pivot_of_col[c];
            if (r >= 0) x[c] = -a[r][free];
        }
        basis.push_back(std::move(x));
    }
    return basis;
}

/// Does v lie in the span of the given vectors?
inline bool in_span(const std::vector<RatVec>& vectors, const RatVec& v) {
    RatMatrix m(vectors.begin(), vectors.end());
    int base_rank = rank(m);
    m.push_back(v);
    return rank(m) == base_rank;
}

}  // namespace crgerm
