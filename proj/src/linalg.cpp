#include "qnet/linalg.hpp"

#include <complex>
#include <sstream>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace qnet {

DenseEig eig_nonhermitian(const Eigen::MatrixXcd& a) {
    if (a.rows() != a.cols()) throw ValidationError("eig: matrix must be square");
    const auto n = static_cast<lapack_int>(a.rows());
    if (n == 0) throw ValidationError("eig: empty matrix");

    Eigen::MatrixXcd work = a; // zgeev overwrites its input
    DenseEig out;
    out.values.resize(n);
    out.vectors.resize(n, n);

    const lapack_int info =
        LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, work.data(), n, out.values.data(), nullptr,
                      n, out.vectors.data(), n);
    if (info != 0) {
        std::ostringstream msg;
        msg << "zgeev failed with info = " << info << " (dim " << n << ")";
        throw NumericalError(msg.str());
    }
    return out;
}

} // namespace qnet
