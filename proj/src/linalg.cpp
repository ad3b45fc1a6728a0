#include "ando/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <vector>

namespace ando {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotContraction: return "NotContraction";
    case ErrorKind::MajorizationFails: return "MajorizationFails";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::IsometryDefect: return "IsometryDefect";
    case ErrorKind::ReductionFails: return "ReductionFails";
    case ErrorKind::ResidualTooLarge: return "ResidualTooLarge";
    case ErrorKind::StrongFundFails: return "StrongFundFails";
    case ErrorKind::CriterionMismatch: return "CriterionMismatch";
    case ErrorKind::OrientationMismatch: return "OrientationMismatch";
    case ErrorKind::NotIsometry: return "NotIsometry";
    case ErrorKind::RelationsFail: return "RelationsFail";
    case ErrorKind::NotIsometricInterior: return "NotIsometricInterior";
    case ErrorKind::WindowTooSmall: return "WindowTooSmall";
    case ErrorKind::NotStrongTypeII: return "NotStrongTypeII";
    case ErrorKind::NotTypeI: return "NotTypeI";
    case ErrorKind::DefectNotPSD: return "DefectNotPSD";
    case ErrorKind::NotJointlyDiagonalizable: return "NotJointlyDiagonalizable";
    case ErrorKind::ResolventSingular: return "ResolventSingular";
    case ErrorKind::NotCNU: return "NotCNU";
    case ErrorKind::NoCoincidence: return "NoCoincidence";
    case ErrorKind::InvalidInput: return "InvalidInput";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void Tolerances::validate() const {
    const double eps = std::numeric_limits<double>::epsilon();
    if (!(rank_tol >= eps) || !(eq_tol > 0) || !(conv_tol > 0) || !(psd_tol > 0))
        throw Error(ErrorKind::InvalidInput, "tolerances must be positive, rank_tol >= machine epsilon");
}

Tolerances Tolerances::from_env() {
    Tolerances tol;
    if (const char* s = std::getenv("ANDO_LIFT_TOL")) {
        char* end = nullptr;
        double v = std::strtod(s, &end);
        if (end == s || *end != '\0' || !(v > 0) || !std::isfinite(v))
            throw Error(ErrorKind::InvalidInput, std::string("ANDO_LIFT_TOL is not a positive number: ") + s);
        tol.eq_tol = v;
    }
    return tol;
}

CMatrix Subspace::projector() const { return basis * basis.adjoint(); }

Subspace Subspace::zero(Index n) { return {n, CMatrix(n, 0)}; }

Subspace Subspace::full(Index n) { return {n, CMatrix::Identity(n, n)}; }

CMatrix identity(Index n) { return CMatrix::Identity(n, n); }

bool all_finite(const CMatrix& A) { return A.allFinite(); }

double opnorm(const CMatrix& A) {
    if (A.size() == 0) return 0.0;
    // Largest eigenvalue of the smaller Gram matrix.
    CMatrix G = A.rows() < A.cols() ? CMatrix(A * A.adjoint()) : CMatrix(A.adjoint() * A);
    G = (G + G.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(G, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

CMatrix psd_sqrt(const CMatrix& A, const Tolerances& tol) {
    if (A.rows() != A.cols()) throw Error(ErrorKind::DimensionMismatch, "psd_sqrt needs a square matrix");
    if (!A.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite entries");
    if (A.size() == 0) return A;
    double herm = opnorm(A - A.adjoint());
    if (herm > tol.eq_tol) {
        std::ostringstream os;
        os << "||A - A*|| = " << herm;
        throw Error(ErrorKind::NotHermitian, os.str());
    }
    CMatrix H = (A + A.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
    RVector lam = es.eigenvalues();
    if (lam.minCoeff() < -tol.psd_tol) {
        std::ostringstream os;
        os << "smallest eigenvalue " << lam.minCoeff();
        throw Error(ErrorKind::NotPSD, os.str());
    }
    RVector s = lam.cwiseMax(0.0).cwiseSqrt();
    const CMatrix& V = es.eigenvectors();
    return V * s.cast<cd>().asDiagonal() * V.adjoint();
}

Defect defect(const CMatrix& T, const Tolerances& tol) {
    if (T.rows() != T.cols()) throw Error(ErrorKind::DimensionMismatch, "defect needs a square matrix");
    const Index n = T.rows();
    double nrm = opnorm(T);
    if (nrm > 1.0 + tol.eq_tol) {
        std::ostringstream os;
        os << "||T|| = " << nrm;
        throw Error(ErrorKind::NotContraction, os.str());
    }
    Defect out;
    if (n == 0) {
        out.D = CMatrix(0, 0);
        out.space = Subspace::zero(0);
        return out;
    }
    CMatrix M = identity(n) - T.adjoint() * T;
    M = (M + M.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(M);
    RVector lam = es.eigenvalues().cwiseMax(0.0);
    const CMatrix& V = es.eigenvectors();
    out.D = V * lam.cwiseSqrt().cast<cd>().asDiagonal() * V.adjoint();
    // Eigenvalues come ascending; keep the retained ones in descending order.
    Index kept = 0;
    for (Index i = 0; i < n; ++i)
        if (lam(i) > tol.rank_tol) ++kept;
    out.space.ambient_dim = n;
    out.space.basis.resize(n, kept);
    out.delta.resize(kept);
    for (Index j = 0; j < kept; ++j) {
        Index i = n - 1 - j;
        out.space.basis.col(j) = V.col(i);
        out.delta(j) = std::sqrt(lam(i));
    }
    return out;
}

CMatrix douglas_factor(const CMatrix& A, const CMatrix& B, const Tolerances& tol) {
    if (A.rows() != B.rows()) throw Error(ErrorKind::DimensionMismatch, "douglas_factor: row counts differ");
    if (A.rows() == 0 || B.cols() == 0) {
        if (A.size() > 0 && A.norm() > tol.eq_tol)
            throw Error(ErrorKind::MajorizationFails, "B is empty but A is not zero");
        return CMatrix::Zero(B.cols(), A.cols());
    }
    CMatrix gap = B * B.adjoint() - A * A.adjoint();
    gap = (gap + gap.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gap, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    if (lo < -tol.psd_tol) {
        std::ostringstream os;
        os << "BB* - AA* has eigenvalue " << lo;
        throw Error(ErrorKind::MajorizationFails, os.str());
    }
    return pinv(B, tol.rank_tol) * A;
}

Index numerical_rank(const CMatrix& A, double cutoff) {
    if (A.size() == 0) return 0;
    Eigen::JacobiSVD<CMatrix> svd(A);
    Index r = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > cutoff) ++r;
    return r;
}

Subspace range_space(const CMatrix& A, double cutoff) {
    Subspace S{A.rows(), CMatrix(A.rows(), 0)};
    if (A.size() == 0) return S;
    Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU);
    Index r = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > cutoff) ++r;
    S.basis = svd.matrixU().leftCols(r);
    return S;
}

Subspace null_space(const CMatrix& A, double cutoff) {
    const Index n = A.cols();
    if (A.rows() == 0) return Subspace::full(n);
    if (n == 0) return Subspace::zero(0);
    Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeFullV);
    Index r = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > cutoff) ++r;
    return {n, svd.matrixV().rightCols(n - r)};
}

CMatrix canonical_complement_basis(const Subspace& S, double cutoff) {
    const Index n = S.ambient_dim;
    const Index want = n - S.dim();
    CMatrix Q(n, n);
    Index have = 0;
    if (S.dim() > 0) Q.leftCols(S.dim()) = S.basis;
    Index filled = S.dim();
    std::vector<bool> used(static_cast<size_t>(n), false);
    // Several passes with decreasing acceptance thresholds keep the choice deterministic while
    // preferring canonical vectors that are far from the span already built.
    for (double thresh : {0.5, 0.1, 1e-3, cutoff}) {
        for (Index i = 0; i < n && have < want; ++i) {
            if (used[static_cast<size_t>(i)]) continue;
            CVector v = CVector::Unit(n, i);
            for (int pass = 0; pass < 2; ++pass)
                if (filled > 0) v -= Q.leftCols(filled) * (Q.leftCols(filled).adjoint() * v);
            double nv = v.norm();
            if (nv > thresh) {
                Q.col(filled++) = v / nv;
                used[static_cast<size_t>(i)] = true;
                ++have;
            }
        }
    }
    return Q.block(0, S.dim(), n, have);
}

Subspace complement(const Subspace& S) { return {S.ambient_dim, canonical_complement_basis(S)}; }

Subspace intersect(const Subspace& A, const Subspace& B, double cutoff) {
    const Index n = A.ambient_dim;
    if (B.ambient_dim != n) throw Error(ErrorKind::DimensionMismatch, "intersect: ambient dimensions differ");
    CMatrix stack(2 * n, n);
    stack.topRows(n) = identity(n) - A.projector();
    stack.bottomRows(n) = identity(n) - B.projector();
    return null_space(stack, cutoff);
}

CMatrix pinv(const CMatrix& A, double cutoff) {
    if (A.size() == 0) return CMatrix::Zero(A.cols(), A.rows());
    Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    RVector s = svd.singularValues();
    RVector inv = RVector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.cast<cd>().asDiagonal() * svd.matrixU().adjoint();
}

CMatrix polar_unitary(const CMatrix& A) {
    if (A.size() == 0) return A;
    Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
}

double unitarity_defect(const CMatrix& U) {
    if (U.rows() != U.cols()) return std::numeric_limits<double>::infinity();
    if (U.size() == 0) return 0.0;
    const Index n = U.rows();
    return std::max(opnorm(U.adjoint() * U - identity(n)), opnorm(U * U.adjoint() - identity(n)));
}

double isometry_defect(const CMatrix& V) {
    if (V.cols() == 0) return 0.0;
    return opnorm(V.adjoint() * V - identity(V.cols()));
}

double projection_defect(const CMatrix& P) {
    if (P.size() == 0) return 0.0;
    return std::max(opnorm(P * P - P), opnorm(P - P.adjoint()));
}

CMatrix direct_sum(const CMatrix& A, const CMatrix& B) {
    CMatrix S = CMatrix::Zero(A.rows() + B.rows(), A.cols() + B.cols());
    S.topLeftCorner(A.rows(), A.cols()) = A;
    S.bottomRightCorner(B.rows(), B.cols()) = B;
    return S;
}

CMatrix unitary_extension(const CMatrix& V0, const Subspace& dom, const Subspace& ran, Index slack,
                          const Tolerances& tol, const CMatrix* twist) {
    const Index n = dom.ambient_dim;
    if (ran.ambient_dim != n || V0.rows() != n || V0.cols() != n)
        throw Error(ErrorKind::DimensionMismatch, "unitary_extension: ambient dimensions differ");
    if (slack < 0) throw Error(ErrorKind::InvalidInput, "negative slack");
    const Index k = dom.dim();
    Index perp_dom = n - k, perp_ran = n - ran.dim();
    if (std::abs(perp_dom - perp_ran) > slack) {
        std::ostringstream os;
        os << "complements have dimensions " << perp_dom << " and " << perp_ran << ", slack " << slack;
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
    if (ran.dim() != k)
        throw Error(ErrorKind::DimensionMismatch, "an isometry cannot map dom onto ran of a different dimension");
    CMatrix images = V0 * dom.basis;
    if (isometry_defect(images) > tol.eq_tol)
        throw Error(ErrorKind::IsometryDefect, "V0 is not isometric on dom");
    if (k > 0 && opnorm(images - ran.projector() * images) > tol.eq_tol)
        throw Error(ErrorKind::DimensionMismatch, "V0 dom is not contained in ran");

    // slack' is zero since dim dom = dim ran; extra slack dimensions pair with each other.
    const Index m = n + slack;
    auto lift = [&](const CMatrix& B) {
        CMatrix out = CMatrix::Zero(m, B.cols());
        out.topRows(n) = B;
        return out;
    };
    Subspace dom_big{m, lift(dom.basis)};
    Subspace ran_big{m, lift(images)};
    CMatrix cd_ = canonical_complement_basis(dom_big);
    CMatrix cr = canonical_complement_basis(ran_big);
    const Index c = cd_.cols();
    if (cr.cols() != c) throw Error(ErrorKind::DimensionMismatch, "complement bases have different sizes");
    CMatrix pair_map = CMatrix::Identity(c, c);
    if (twist) {
        if (twist->rows() != c || twist->cols() != c)
            throw Error(ErrorKind::DimensionMismatch, "twist must act on the complement coordinates");
        if (unitarity_defect(*twist) > tol.eq_tol) throw Error(ErrorKind::InvalidInput, "twist is not unitary");
        pair_map = *twist;
    }
    CMatrix U = lift(images) * dom_big.basis.adjoint() + cr * pair_map * cd_.adjoint();
    return U;
}

}  // namespace ando
