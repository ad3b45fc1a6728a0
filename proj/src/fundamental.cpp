#include "ando/fundamental.hpp"

#include "ando/hardy.hpp"

#include <algorithm>
#include <sstream>

namespace ando {

double FundamentalResiduals::max() const {
    return std::max({fund_ops1, fund_ops2, fund_eqns1, fund_eqns2});
}

CMatrix stein_series(const CMatrix& T, const CMatrix& Y, const Tolerances& tol, int* squarings) {
    CMatrix S = Y;
    CMatrix A = T;
    for (int k = 0; k < 200; ++k) {
        CMatrix inc = A.adjoint() * S * A;
        S += inc;
        A = A * A;
        if (squarings) *squarings = k + 1;
        if (opnorm(inc) < tol.conv_tol) return S;
    }
    throw Error(ErrorKind::NoConvergence, "Stein series did not converge in 200 squarings");
}

namespace {

// Truncated D_T = E diag(delta) E*, so that cut directions are exactly zero.
CMatrix truncated_defect(const Defect& d) {
    return d.E() * d.delta.cast<cd>().asDiagonal() * d.E().adjoint();
}

CMatrix to_defect_coords(const Defect& d, const CMatrix& Sigma) {
    RVector inv = d.delta.cwiseInverse();
    return inv.cast<cd>().asDiagonal() * d.E().adjoint() * Sigma * d.E() * inv.cast<cd>().asDiagonal();
}

FundamentalResiduals residuals_on(const CMatrix& T1, const CMatrix& T2, const Defect& d, const CMatrix& F1,
                                  const CMatrix& F2, Index cols) {
    const Index n = T1.rows();
    if (cols < 0) cols = n;
    CMatrix T = T1 * T2;
    CMatrix D = truncated_defect(d);
    CMatrix A1 = d.E() * F1 * d.E().adjoint();
    CMatrix A2 = d.E() * F2 * d.E().adjoint();
    FundamentalResiduals r;
    r.fund_ops1 = opnorm((T1 - T2.adjoint() * T - D * A1 * D).leftCols(cols));
    r.fund_ops2 = opnorm((T2 - T1.adjoint() * T - D * A2 * D).leftCols(cols));
    r.fund_eqns1 = opnorm((D * T1 - A1 * D - A2.adjoint() * D * T).leftCols(cols));
    r.fund_eqns2 = opnorm((D * T2 - A2 * D - A1.adjoint() * D * T).leftCols(cols));
    return r;
}

}  // namespace

FundamentalResiduals fundamental_residuals(const CMatrix& T1, const CMatrix& T2, const Defect& d,
                                           const CMatrix& F1, const CMatrix& F2) {
    return residuals_on(T1, T2, d, F1, F2, -1);
}

FundamentalPair fundamental_pair(const CommutingContractivePair& pair) {
    const Tolerances& tol = pair.tol;
    const CMatrix& T = pair.T;
    FundamentalPair fp;
    fp.defect = defect(T, tol);
    const Index n = pair.dim();
    CMatrix DD = identity(n) - T.adjoint() * T;
    CMatrix Y1 = DD * pair.T1 - pair.T2.adjoint() * DD * T;
    CMatrix Y2 = DD * pair.T2 - pair.T1.adjoint() * DD * T;
    int s1 = 0, s2 = 0;
    fp.Sigma1 = stein_series(T, Y1, tol, &s1);
    fp.Sigma2 = stein_series(T, Y2, tol, &s2);
    fp.squarings = std::max(s1, s2);
    fp.F1 = to_defect_coords(fp.defect, fp.Sigma1);
    fp.F2 = to_defect_coords(fp.defect, fp.Sigma2);
    fp.residuals = fundamental_residuals(pair.T1, pair.T2, fp.defect, fp.F1, fp.F2);
    if (fp.residuals.max() > tol.eq_tol) {
        std::ostringstream os;
        os << "fundamental residual " << fp.residuals.max();
        throw Error(ErrorKind::ResidualTooLarge, os.str());
    }
    return fp;
}

StrongFundReport check_strong_fund(const CMatrix& F1, const CMatrix& F2, const Tolerances& tol) {
    StrongFundReport r;
    const Index d = F1.rows();
    if (d == 0) {
        r.holds = true;
        return r;
    }
    r.f1f2 = opnorm(F1 * F2);
    r.f2f1 = opnorm(F2 * F1);
    r.sum1 = opnorm(F1.adjoint() * F1 + F2 * F2.adjoint() - identity(d));
    r.sum2 = opnorm(F1 * F1.adjoint() + F2.adjoint() * F2 - identity(d));
    r.holds = std::max({r.f1f2, r.f2f1, r.sum1, r.sum2}) <= tol.eq_tol;
    return r;
}

StrongFundReport check_strong_fund(const FundamentalPair& fp, const Tolerances& tol) {
    return check_strong_fund(fp.F1, fp.F2, tol);
}

ProjectionUnitary pu_from_fund(const CMatrix& F1, const CMatrix& F2, const Tolerances& tol) {
    StrongFundReport sf = check_strong_fund(F1, F2, tol);
    if (!sf.holds) throw Error(ErrorKind::StrongFundFails, "F1 F2 = 0 = F2 F1 and the sum identities fail");
    ProjectionUnitary pu;
    // Partial-isometry lemma applied to (F1*, F2*).
    pu.P = F2.adjoint() * F2;
    pu.U = F2.adjoint() + F1;
    const Index d = F1.rows();
    if (d == 0) return pu;
    CMatrix Pp = identity(d) - pu.P;
    double back = std::max(opnorm(Pp * pu.U - F1), opnorm(pu.U.adjoint() * pu.P - F2));
    if (back > tol.eq_tol || unitarity_defect(pu.U) > tol.eq_tol || projection_defect(pu.P) > tol.eq_tol)
        throw Error(ErrorKind::StrongFundFails, "recovered (P, U) do not reproduce (F1, F2)");
    return pu;
}

ProjectionUnitary pu_from_fund(const FundamentalPair& fp, const Tolerances& tol) {
    return pu_from_fund(fp.F1, fp.F2, tol);
}

FundamentalPair fund_for_bcl_coisometry(const CMatrix& P, const CMatrix& U, Index N, const Tolerances& tol) {
    const Index c = P.rows();
    if (P.cols() != c || U.rows() != c || U.cols() != c)
        throw Error(ErrorKind::DimensionMismatch, "P and U must be square of equal size");
    if (N < 1) throw Error(ErrorKind::InvalidInput, "N must be at least 1");
    if (projection_defect(P) > tol.eq_tol || unitarity_defect(U) > tol.eq_tol)
        throw Error(ErrorKind::InvalidInput, "P must be a projection and U unitary");
    CMatrix Pp = identity(c) - P;
    FundamentalPair fp;
    fp.F1 = Pp * U;
    fp.F2 = U.adjoint() * P;
    CMatrix V1 = pencil(U.adjoint() * Pp, U.adjoint() * P, N);
    CMatrix V2 = pencil(P * U, Pp * U, N);
    // D_{V*} is the projection onto the constants, exactly, in the truncated model.
    fp.defect.space.ambient_dim = (N + 1) * c;
    fp.defect.space.basis = ev0_adj(identity(c), N);
    fp.defect.delta = RVector::Ones(c);
    fp.defect.D = fp.defect.E() * fp.defect.E().adjoint();
    fp.Sigma1 = fp.defect.E() * fp.F1 * fp.defect.E().adjoint();
    fp.Sigma2 = fp.defect.E() * fp.F2 * fp.defect.E().adjoint();
    fp.residuals = residuals_on(V1.adjoint(), V2.adjoint(), fp.defect, fp.F1, fp.F2, N * c);
    return fp;
}

}  // namespace ando
