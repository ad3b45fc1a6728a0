#include "ando/pair.hpp"

#include <sstream>

namespace ando {

CommutingContractivePair CommutingContractivePair::adjoint() const {
    CommutingContractivePair p;
    p.T1 = T1.adjoint();
    p.T2 = T2.adjoint();
    p.T = p.T1 * p.T2;
    p.tol = tol;
    return p;
}

CommutingContractivePair validate_pair(const CMatrix& T1, const CMatrix& T2, const Tolerances& tol) {
    tol.validate();
    if (T1.rows() != T1.cols() || T2.rows() != T2.cols() || T1.rows() != T2.rows())
        throw Error(ErrorKind::DimensionMismatch, "T1 and T2 must be square of equal size");
    if (!T1.allFinite() || !T2.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite entries");
    const char* names[2] = {"T1", "T2"};
    const CMatrix* ops[2] = {&T1, &T2};
    for (int j = 0; j < 2; ++j) {
        double n = opnorm(*ops[j]);
        if (n > 1.0 + tol.eq_tol) {
            std::ostringstream os;
            os << names[j] << " has norm " << n;
            throw Error(ErrorKind::NotContraction, os.str());
        }
    }
    double comm = opnorm(T1 * T2 - T2 * T1);
    if (comm > tol.eq_tol) {
        std::ostringstream os;
        os << "||T1 T2 - T2 T1|| = " << comm;
        throw Error(ErrorKind::NotCommuting, os.str());
    }
    return {T1, T2, T1 * T2, tol};
}

QStar q_star(const CMatrix& T, const Tolerances& tol) {
    if (T.rows() != T.cols()) throw Error(ErrorKind::DimensionMismatch, "q_star needs a square matrix");
    const Index n = T.rows();
    if (opnorm(T) > 1.0 + tol.eq_tol) throw Error(ErrorKind::NotContraction, "q_star: T is not a contraction");
    QStar out;
    if (n == 0) {
        out.Q = CMatrix(0, 0);
        out.ranQ = Subspace::zero(0);
        return out;
    }
    CMatrix M = T;
    CMatrix X = M * M.adjoint();
    bool done = false;
    for (int k = 1; k <= 200; ++k) {
        M = M * M;
        CMatrix Xn = M * M.adjoint();
        double step = opnorm(Xn - X);
        X = Xn;
        out.squarings = k;
        if (step < tol.conv_tol) {
            done = true;
            break;
        }
    }
    if (!done) throw Error(ErrorKind::NoConvergence, "q_star: 200 squarings without convergence");
    X = (X + X.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(X);
    RVector lam = es.eigenvalues().cwiseMax(0.0);
    const CMatrix& V = es.eigenvectors();
    out.Q = V * lam.cwiseSqrt().cast<cd>().asDiagonal() * V.adjoint();
    Index kept = 0;
    for (Index i = 0; i < n; ++i)
        if (lam(i) > tol.rank_tol) ++kept;
    out.ranQ.ambient_dim = n;
    out.ranQ.basis.resize(n, kept);
    for (Index j = 0; j < kept; ++j) out.ranQ.basis.col(j) = V.col(n - 1 - j);
    return out;
}

namespace {

// X* with X* Qt = Qt S on ranQ coordinates.
CMatrix solve_star(const CMatrix& Qt, const CMatrix& S, const Tolerances& tol) {
    CMatrix Xs = Qt * S * pinv(Qt, tol.rank_tol);
    if (unitarity_defect(Xs) > tol.eq_tol) {
        std::ostringstream os;
        os << "X* is not unitary on Ran Q, defect " << unitarity_defect(Xs);
        throw Error(ErrorKind::IsometryDefect, os.str());
    }
    return Xs;
}

}  // namespace

AsymptoticData canonical_unitaries(const CommutingContractivePair& pair) {
    const Tolerances& tol = pair.tol;
    QStar qs = q_star(pair.T, tol);
    AsymptoticData a;
    a.Q = qs.Q;
    a.ranQ = qs.ranQ;
    a.Qt = qs.ranQ.basis.adjoint() * qs.Q;
    const Index r = a.ranQ.dim();
    if (r == 0) {
        a.W_D = a.W_flat1 = a.W_flat2 = CMatrix(0, 0);
        return a;
    }
    CMatrix X1s = solve_star(a.Qt, pair.T1.adjoint(), tol);
    CMatrix X2s = solve_star(a.Qt, pair.T2.adjoint(), tol);
    CMatrix Xs = solve_star(a.Qt, pair.T.adjoint(), tol);
    a.W_flat1 = X1s.adjoint();
    a.W_flat2 = X2s.adjoint();
    a.W_D = Xs.adjoint();
    a.product_residual = opnorm(a.W_flat1 * a.W_flat2 - a.W_D);
    a.intertwine_residual = std::max(opnorm(X1s * a.Qt - a.Qt * pair.T1.adjoint()),
                                     opnorm(X2s * a.Qt - a.Qt * pair.T2.adjoint()));
    return a;
}

Subspace unitary_part_single(const CMatrix& T, const Tolerances& tol) {
    if (T.rows() != T.cols()) throw Error(ErrorKind::DimensionMismatch, "unitary_part_single needs a square matrix");
    const Index n = T.rows();
    if (opnorm(T) > 1.0 + tol.eq_tol) throw Error(ErrorKind::NotContraction, "unitary_part_single: not a contraction");
    if (n == 0) return Subspace::zero(0);
    CMatrix stack(2 * n * n, n);
    CMatrix Tk = identity(n);
    for (Index k = 0; k < n; ++k) {
        Tk = Tk * T;
        stack.middleRows(2 * k * n, n) = identity(n) - Tk.adjoint() * Tk;
        stack.middleRows((2 * k + 1) * n, n) = identity(n) - Tk * Tk.adjoint();
    }
    return null_space(stack, tol.rank_tol);
}

CanonicalDecomposition canonical_decomposition_pair(const CommutingContractivePair& pair) {
    const Tolerances& tol = pair.tol;
    CanonicalDecomposition d;
    d.Hu = unitary_part_single(pair.T, tol);
    d.Hc = complement(d.Hu);
    const CMatrix& Bu = d.Hu.basis;
    const CMatrix& Bc = d.Hc.basis;
    double off = 0;
    for (const CMatrix* Tj : {&pair.T1, &pair.T2}) {
        if (Bu.cols() > 0 && Bc.cols() > 0) {
            off = std::max(off, opnorm(Bc.adjoint() * (*Tj) * Bu));
            off = std::max(off, opnorm(Bu.adjoint() * (*Tj) * Bc));
        }
    }
    d.reduction_residual = off;
    if (off > tol.eq_tol) {
        std::ostringstream os;
        os << "off-diagonal block norm " << off;
        throw Error(ErrorKind::ReductionFails, os.str());
    }
    d.T1u = Bu.adjoint() * pair.T1 * Bu;
    d.T2u = Bu.adjoint() * pair.T2 * Bu;
    d.T1c = Bc.adjoint() * pair.T1 * Bc;
    d.T2c = Bc.adjoint() * pair.T2 * Bc;
    d.unitary_defect = unitarity_defect(d.T1u * d.T2u);
    d.cnu_unitary_dim = unitary_part_single(d.T1c * d.T2c, tol).dim();
    return d;
}

}  // namespace ando
