#include "ando/hardy.hpp"

namespace ando {

CMatrix pencil(const CMatrix& A, const CMatrix& B, Index N) {
    const Index c = A.rows();
    if (A.cols() != c || B.rows() != c || B.cols() != c)
        throw Error(ErrorKind::DimensionMismatch, "pencil coefficients must be square of equal size");
    CMatrix M = CMatrix::Zero((N + 1) * c, (N + 1) * c);
    for (Index k = 0; k <= N; ++k) {
        M.block(k * c, k * c, c, c) = A;
        if (k < N) M.block((k + 1) * c, k * c, c, c) = B;
    }
    return M;
}

CMatrix shift(Index coeff_dim, Index N) {
    return pencil(CMatrix::Zero(coeff_dim, coeff_dim), identity(coeff_dim), N);
}

CMatrix blockwise(const CMatrix& X, Index N) {
    CMatrix M = CMatrix::Zero((N + 1) * X.rows(), (N + 1) * X.cols());
    for (Index k = 0; k <= N; ++k) M.block(k * X.rows(), k * X.cols(), X.rows(), X.cols()) = X;
    return M;
}

CMatrix ev0_adj(const CMatrix& X, Index N) {
    CMatrix M = CMatrix::Zero((N + 1) * X.rows(), X.cols());
    M.topRows(X.rows()) = X;
    return M;
}

}  // namespace ando
