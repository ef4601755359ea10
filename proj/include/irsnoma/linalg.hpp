#pragma once

// Small dense complex linear algebra on top of Eigen: Gaussian matrix draws,
// orthonormalization, and null-space bases.

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <stdexcept>
#include <string>

#include "irsnoma/random.hpp"

namespace irsnoma {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline bool all_finite(const ComplexMatrix& m) {
    return m.allFinite();
}

// Fills an existing matrix (or column vector) with i.i.d. CN(0,1) entries,
// column-major; reuses the allocation when the shape repeats.
template <class Mat>
void sample_cn_into(Mat& m, Eigen::Index rows, Eigen::Index cols, RandomStream& stream) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("sample_cn_matrix: dimensions must be positive");
    }
    m.resize(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            m(i, j) = stream.next_cn();
        }
    }
}

// rows x cols matrix of i.i.d. CN(0,1) entries.
inline ComplexMatrix sample_cn_matrix(Eigen::Index rows, Eigen::Index cols, RandomStream& stream) {
    ComplexMatrix m;
    sample_cn_into(m, rows, cols, stream);
    return m;
}

// M x K matrix with orthonormal columns obtained by orthonormalizing a
// complex Gaussian draw (left-unitarily invariant distribution).
inline ComplexMatrix orthonormal_columns(Eigen::Index m, Eigen::Index k, RandomStream& stream) {
    if (k > m) {
        throw std::invalid_argument("orthonormal_columns: need k <= m, got k=" +
                                    std::to_string(k) + " m=" + std::to_string(m));
    }
    ComplexMatrix g = sample_cn_matrix(m, k, stream);
    if (k == 1) {
        g.col(0).normalize();
        return g;
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(m, k);
    return q;
}

// Orthonormal basis of the null space of A^H for A of shape N x J, i.e. the
// orthogonal complement of the columns of A. J = 0 yields the N x N identity.
// Singular values below 1e-10 times the largest count as zero.
inline ComplexMatrix null_space(const ComplexMatrix& a) {
    const Eigen::Index n = a.rows();
    if (n < 1) {
        throw std::invalid_argument("null_space: matrix must have at least one row");
    }
    if (a.cols() == 0) {
        return ComplexMatrix::Identity(n, n);
    }
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    Eigen::Index rank = 0;
    if (sv.size() > 0 && sv(0) > 0.0) {
        const double cutoff = 1e-10 * sv(0);
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
            if (sv(i) > cutoff) ++rank;
        }
    }
    return svd.matrixU().rightCols(n - rank);
}

}  // namespace irsnoma
