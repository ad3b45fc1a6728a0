#include "ando/bcl.hpp"

#include <algorithm>
#include <sstream>

namespace ando {

void validate_bcl(const BCLTuple& t, const Tolerances& tol) {
    if (t.P.rows() != t.F_dim || t.P.cols() != t.F_dim || t.U.rows() != t.F_dim || t.U.cols() != t.F_dim)
        throw Error(ErrorKind::DimensionMismatch, "P and U must act on C^F_dim");
    if (projection_defect(t.P) > tol.eq_tol) throw Error(ErrorKind::InvalidInput, "P is not an orthogonal projection");
    if (unitarity_defect(t.U) > tol.eq_tol) throw Error(ErrorKind::InvalidInput, "U is not unitary");
    if (t.W1.rows() != t.W2.rows() || t.W1.rows() != t.W1.cols() || t.W2.rows() != t.W2.cols())
        throw Error(ErrorKind::DimensionMismatch, "W1 and W2 must be square of equal size");
    if (t.unitary_dim() > 0) {
        if (unitarity_defect(t.W1) > tol.eq_tol || unitarity_defect(t.W2) > tol.eq_tol)
            throw Error(ErrorKind::InvalidInput, "W1, W2 must be unitary");
        if (opnorm(t.W1 * t.W2 - t.W2 * t.W1) > tol.eq_tol)
            throw Error(ErrorKind::InvalidInput, "W1, W2 must commute");
    }
}

CMatrix BCLModel::interior_cols(const CMatrix& M) const {
    const Index k = layout.interior();
    CMatrix out(M.rows(), k + unitary_dim);
    out.leftCols(k) = M.leftCols(k);
    if (unitary_dim > 0) out.rightCols(unitary_dim) = M.rightCols(unitary_dim);
    return out;
}

BCLModel bcl_model(const BCLTuple& t, BCLVariant variant, Index N) {
    if (N < 1) throw Error(ErrorKind::InvalidInput, "N must be at least 1");
    const Index c = t.F_dim;
    CMatrix I = identity(c);
    CMatrix Pp = I - t.P;
    CMatrix Us = t.U.adjoint();
    BCLModel m;
    m.layout = {c, N};
    m.unitary_dim = t.unitary_dim();
    CMatrix A1, B1, A2, B2;
    if (variant == BCLVariant::BCL1) {
        A1 = Pp * t.U, B1 = t.P * t.U;
        A2 = Us * t.P, B2 = Us * Pp;
    } else {
        A1 = Us * Pp, B1 = Us * t.P;
        A2 = t.P * t.U, B2 = Pp * t.U;
    }
    m.V1 = direct_sum(pencil(A1, B1, N), t.W1);
    m.V2 = direct_sum(pencil(A2, B2, N), t.W2);
    return m;
}

BCLTuple flip(const BCLTuple& t) {
    BCLTuple f = t;
    f.P = t.U.adjoint() * t.P * t.U;
    f.U = t.U.adjoint();
    return f;
}

ProjectionUnitary pu_from_partial_isoms(const CMatrix& E1, const CMatrix& E2, const Tolerances& tol) {
    const Index d = E1.rows();
    if (E1.cols() != d || E2.rows() != d || E2.cols() != d)
        throw Error(ErrorKind::DimensionMismatch, "E1 and E2 must be square of equal size");
    ProjectionUnitary pu;
    if (d == 0) {
        pu.P = pu.U = CMatrix(0, 0);
        return pu;
    }
    CMatrix I = identity(d);
    double rel = std::max({opnorm(E1 * E2), opnorm(E2 * E1), opnorm(E1.adjoint() * E1 + E2 * E2.adjoint() - I),
                           opnorm(E1 * E1.adjoint() + E2.adjoint() * E2 - I)});
    if (rel > tol.eq_tol) {
        std::ostringstream os;
        os << "partial isometry relations fail by " << rel;
        throw Error(ErrorKind::RelationsFail, os.str());
    }
    pu.P = E2 * E2.adjoint();
    pu.U = E1.adjoint() + E2;
    double back = std::max(opnorm(pu.U.adjoint() * (I - pu.P) - E1), opnorm(pu.P * pu.U - E2));
    if (back > tol.eq_tol) {
        std::ostringstream os;
        os << "(U* P^perp, P U) misses (E1, E2) by " << back;
        throw Error(ErrorKind::RelationsFail, os.str());
    }
    return pu;
}

namespace {

// Eigenvectors of the hermitian part of D with eigenvalue > 1/2, intersected with the span of the
// interior coordinates.
CMatrix interior_defect_basis(const CMatrix& D, const BCLModel& frame) {
    const Index n = D.rows();
    CMatrix H = (D + D.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    Index kept = 0;
    for (Index i = 0; i < n; ++i)
        if (es.eigenvalues()(i) > 0.5) ++kept;
    Subspace range{n, es.eigenvectors().rightCols(kept)};
    CMatrix sel = CMatrix::Zero(n, frame.layout.interior() + frame.unitary_dim);
    sel.leftCols(frame.layout.interior()) = CMatrix::Identity(n, frame.layout.interior());
    for (Index j = 0; j < frame.unitary_dim; ++j) sel(frame.layout.size() + j, frame.layout.interior() + j) = 1.0;
    Subspace interior{n, sel};
    return intersect(range, interior, 1e-8).basis;
}

}  // namespace

CanonicalBCL canonical_bcl_from_pair(const CMatrix& V1, const CMatrix& V2, const TruncatedHardy& layout,
                                     Index unitary_dim, const Tolerances& tol) {
    BCLModel frame;
    frame.layout = layout;
    frame.unitary_dim = unitary_dim;
    const Index n = frame.size();
    if (V1.rows() != n || V1.cols() != n || V2.rows() != n || V2.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "V1, V2 do not match the model layout");
    CMatrix X = frame.interior_cols(identity(n));
    double comm = opnorm((V1 * V2 - V2 * V1) * X);
    double iso = std::max(isometry_defect(V1 * X), isometry_defect(V2 * X));
    if (std::max(comm, iso) > tol.eq_tol) {
        std::ostringstream os;
        os << "interior commutator " << comm << ", isometry defect " << iso;
        throw Error(ErrorKind::NotIsometricInterior, os.str());
    }
    CMatrix I = identity(n);
    CMatrix V = V1 * V2;
    CanonicalBCL out;
    out.E1 = interior_defect_basis(I - V1 * V1.adjoint(), frame);
    out.E2 = interior_defect_basis(I - V2 * V2.adjoint(), frame);
    out.EV = interior_defect_basis(I - V * V.adjoint(), frame);
    const Index d1 = out.E1.cols(), d2 = out.E2.cols();
    const Index F = d1 + d2;
    BCLTuple& t = out.tuple;
    t.F_dim = F;
    t.P = CMatrix::Zero(F, F);
    t.P.topLeftCorner(d1, d1) = identity(d1);
    t.U = CMatrix(F, F);
    const CMatrix& E1 = out.E1;
    const CMatrix& E2 = out.E2;
    t.U << E1.adjoint() * V2 * E1, E1.adjoint() * E2, E2.adjoint() * V1.adjoint() * V2 * E1,
        E2.adjoint() * V1.adjoint() * E2;
    t.W1 = t.W2 = CMatrix(0, 0);
    out.Phi_adj = CMatrix(F, out.EV.cols());
    out.Phi_adj << E1.adjoint() * V2.adjoint() * out.EV, E2.adjoint() * out.EV;
    out.unitarity_defect = unitarity_defect(t.U);
    return out;
}

DoublyCommutingReport is_doubly_commuting(const BCLTuple& t, const Tolerances& tol, Index N) {
    DoublyCommutingReport r;
    const Index c = t.F_dim;
    if (c == 0) {
        r.holds = true;
        return r;
    }
    r.pupp = opnorm((identity(c) - t.P) * t.U * t.P);
    BCLTuple shift_part = t;
    shift_part.W1 = shift_part.W2 = CMatrix(0, 0);
    BCLModel m = bcl_model(shift_part, BCLVariant::BCL2, N);
    r.commutator = opnorm(m.interior_cols(m.V1.adjoint() * m.V2 - m.V2 * m.V1.adjoint()));
    r.holds = r.pupp <= tol.eq_tol;
    r.agree = r.holds == (r.commutator <= tol.eq_tol);
    return r;
}

namespace {

WindowTuple window(Index M, bool diamond) {
    if (M < 2) throw Error(ErrorKind::WindowTooSmall, "window half-width must be at least 2");
    const Index n = 2 * M + 1;
    WindowTuple w;
    w.M = M;
    BCLTuple& t = w.tuple;
    t.F_dim = n;
    t.U = CMatrix::Zero(n, n);
    for (Index k = 0; k < n; ++k) t.U((k + 1) % n, k) = 1.0;
    t.P = CMatrix::Zero(n, n);
    for (Index i = -M; i <= M; ++i) {
        bool in = diamond ? (i == 0 || i >= 2) : (i >= 1);
        if (in) t.P(i + M, i + M) = 1.0;
    }
    t.W1 = t.W2 = CMatrix(0, 0);
    CMatrix defect_op = (identity(n) - t.P) * t.U * t.P;
    w.boundary_defect = opnorm(defect_op);
    const Index wrap = n - 1;
    w.wrap_defect = defect_op.col(wrap).norm();
    defect_op.col(wrap).setZero();
    w.interior_defect = opnorm(defect_op);
    return w;
}

}  // namespace

WindowTuple bidisk_tuple(Index M) { return window(M, false); }

WindowTuple diamond_tuple(Index M) { return window(M, true); }

}  // namespace ando
