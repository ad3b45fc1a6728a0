#include "support/oracles.hpp"

#include <algorithm>

namespace oracle {

CMatrix kron(const CMatrix& A, const CMatrix& B) {
    CMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

CMatrix stein_solve(const CMatrix& T, const CMatrix& Y) {
    const Index n = T.rows();
    CMatrix L = CMatrix::Identity(n * n, n * n) - kron(T.transpose(), T.adjoint());
    Eigen::CompleteOrthogonalDecomposition<CMatrix> cod;
    cod.setThreshold(1e-12);
    cod.compute(L);
    Eigen::Map<const Eigen::VectorXcd> y(Y.data(), n * n);
    Eigen::VectorXcd s = cod.solve(y);
    return Eigen::Map<const CMatrix>(s.data(), n, n);
}

CMatrix sigma1_closed(const CMatrix& T1, const CMatrix& T2) { return T1 - T2.adjoint() * T1 * T2; }
CMatrix sigma2_closed(const CMatrix& T1, const CMatrix& T2) { return T2 - T1.adjoint() * T1 * T2; }

CMatrix sqrt_psd(const CMatrix& A) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(A);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.cast<cd>().asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix theta_ambient(const CMatrix& T, cd z) {
    const Index n = T.rows();
    CMatrix I = CMatrix::Identity(n, n);
    CMatrix DT = sqrt_psd(I - T.adjoint() * T);
    CMatrix DTs = sqrt_psd(I - T * T.adjoint());
    return -T + z * DTs * (I - z * T.adjoint()).inverse() * DT;
}

cd blaschke(cd a, cd z) { return (z - a) / (1.0 - std::conj(a) * z); }

double spectral_norm(const CMatrix& A) {
    if (A.size() == 0) return 0.0;
    return Eigen::JacobiSVD<CMatrix>(A).singularValues()(0);
}

Index joint_rank(const CMatrix& A, const CMatrix& B, double cutoff) {
    CMatrix AB(A.rows(), A.cols() + B.cols());
    AB << A, B;
    if (AB.cols() == 0) return 0;
    Eigen::VectorXd s = Eigen::JacobiSVD<CMatrix>(AB).singularValues();
    return static_cast<Index>((s.array() > cutoff).count());
}

std::vector<cd> sorted_eigenvalues(const CMatrix& A) {
    Eigen::ComplexEigenSolver<CMatrix> es(A, false);
    std::vector<cd> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(v.begin(), v.end(), [](cd a, cd b) {
        if (std::abs(a.real() - b.real()) > 1e-8) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

}  // namespace oracle
