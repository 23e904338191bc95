// linalg.hpp — Dense non-Hermitian eigendecomposition (LAPACK zgeev)

#pragma once

#include <Eigen/Dense>

#include "qnet/common.hpp"

namespace qnet {

struct DenseEig {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors; // right eigenvectors as columns, unit 2-norm
};

// Throws NumericalError when the QR iteration fails to converge.
DenseEig eig_nonhermitian(const Eigen::MatrixXcd& a);

} // namespace qnet
