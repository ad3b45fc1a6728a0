#include "ando/tuple.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

namespace ando {

std::string to_string(Orientation o) { return o == Orientation::Forward ? "forward" : "adjoint"; }

std::string to_string(CoincideStatus s) {
    switch (s) {
    case CoincideStatus::Coincide: return "Coincide";
    case CoincideStatus::NotIrreducible: return "NotIrreducible";
    case CoincideStatus::GramMismatch: return "GramMismatch";
    }
    return "Unknown";
}

namespace {

// Rank cutoff for spans built from D-weighted vectors, on the scale of the defect cutoff.
double span_cutoff(const Tolerances& tol) { return 0.1 * std::sqrt(tol.rank_tol); }

CMatrix truncated(const Defect& d) { return d.E() * d.delta.cast<cd>().asDiagonal() * d.E().adjoint(); }

struct Factors {
    CMatrix S1, S2;
};

Factors factors(const CommutingContractivePair& pair, Orientation o) {
    if (o == Orientation::Forward) return {pair.T1, pair.T2};
    return {pair.T1.adjoint(), pair.T2.adjoint()};
}

struct Frame {
    CMatrix A1, A2, A, L, D1sq, D2sq;
};

Frame frame(const PreAndoTuple& t, const CommutingContractivePair& pair) {
    const Tolerances& tol = pair.tol;
    Factors f = factors(pair, t.orientation);
    Frame fr;
    fr.A1 = f.S1;
    fr.A2 = f.S2;
    fr.A = f.S1 * f.S2;
    const Index n = pair.dim();
    Defect dA = defect(fr.A, tol);
    if (t.D_basis.rows() != n || t.D_basis.cols() != dA.dim() || t.Lambda.cols() != dA.dim())
        throw Error(ErrorKind::OrientationMismatch, "tuple defect basis does not match the " +
                                                        to_string(t.orientation) + " defect space");
    if (dA.dim() > 0 && opnorm(t.D_basis - dA.space.projector() * t.D_basis) > tol.eq_tol)
        throw Error(ErrorKind::OrientationMismatch, "tuple defect basis lies outside the " +
                                                        to_string(t.orientation) + " defect space");
    fr.L = t.Lambda * t.D_basis.adjoint() * truncated(dA);
    fr.D1sq = identity(n) - fr.A1.adjoint() * fr.A1;
    fr.D2sq = identity(n) - fr.A2.adjoint() * fr.A2;
    return fr;
}

struct TypeII {
    double commutativity = 0;
    double norms = 0;
    double strong = 0;
};

TypeII type_ii(const Frame& fr, const CMatrix& P, const CMatrix& U) {
    const Index F = P.rows();
    CMatrix Pp = identity(F) - P;
    const CMatrix& L = fr.L;
    CMatrix lhs = P * U * L * fr.A2 + Pp * L;
    CMatrix rhs = U.adjoint() * Pp * L * fr.A1 + U.adjoint() * P * U * L;
    TypeII r;
    r.commutativity = opnorm(lhs - rhs);
    r.norms = std::max(opnorm(L.adjoint() * U.adjoint() * P * U * L - fr.D1sq), opnorm(L.adjoint() * Pp * L - fr.D2sq));
    r.strong = std::max(opnorm(lhs - L), opnorm(rhs - L));
    return r;
}

// Unitary tau with tau Lambda = Lambda_dagger, tau U Lambda = Lambda_R, tau P tau* = P_dagger.
double special_residual(const PreAndoTuple& t, const SpecialData& sd) {
    const Index F = t.F_dim;
    const Index Fd = sd.d1 + sd.d2;
    if (F != Fd) return std::numeric_limits<double>::infinity();
    if (F == 0) return 0.0;
    CMatrix Pd = CMatrix::Zero(Fd, Fd);
    Pd.topLeftCorner(sd.d1, sd.d1) = identity(sd.d1);
    const Index d = sd.d;
    CMatrix X(F, 4 * d), Y(Fd, 4 * d);
    CMatrix UL = t.U * t.Lambda;
    X << t.Lambda, UL, t.P * t.Lambda, t.P * UL;
    Y << sd.Lambda, sd.LambdaR, Pd * sd.Lambda, Pd * sd.LambdaR;
    double gram = opnorm(X.adjoint() * X - Y.adjoint() * Y);
    // The complements of the generated spans must carry P and P_dagger with equal ranks.
    double cut = 1e-8;
    Index rP = numerical_rank(t.P, 0.5), rPd = sd.d1;
    Index rPX = numerical_rank(t.P * X, cut), rPY = numerical_rank(Pd * Y, cut);
    Index rX = numerical_rank(X, cut), rY = numerical_rank(Y, cut);
    if (rX != rY || rP - rPX != rPd - rPY) return std::max(gram, 1.0);
    return gram;
}

}  // namespace

SpecialData special_data(const CommutingContractivePair& pair, Orientation o) {
    const Tolerances& tol = pair.tol;
    Factors f = factors(pair, o);
    CMatrix S = f.S1 * f.S2;
    Defect a = defect(f.S1, tol), b = defect(f.S2, tol), t = defect(S, tol);
    SpecialData sd;
    sd.d1 = a.dim();
    sd.d2 = b.dim();
    sd.d = t.dim();
    sd.E = t.E();
    sd.delta = t.delta;
    const Index n = pair.dim();
    const Index F = sd.d1 + sd.d2;
    CMatrix L(F, n), R(F, n);
    CMatrix a_coord = a.delta.cast<cd>().asDiagonal() * a.E().adjoint();
    CMatrix b_coord = b.delta.cast<cd>().asDiagonal() * b.E().adjoint();
    L << a_coord * f.S2, b_coord;
    R << a_coord, b_coord * f.S1;
    CMatrix right = t.E() * t.delta.cwiseInverse().cast<cd>().asDiagonal();
    sd.Lambda = L * right;
    sd.LambdaR = R * right;
    sd.isometry_defect = isometry_defect(sd.Lambda);
    sd.range_isometry_defect = isometry_defect(sd.LambdaR);
    if (sd.d > 0 && F > 0) {
        sd.Lambda = polar_unitary(sd.Lambda);
        sd.LambdaR = polar_unitary(sd.LambdaR);
    }
    return sd;
}

PreAndoTuple special_tuple(const CommutingContractivePair& pair, Orientation o, const SpecialOptions& opt) {
    const Tolerances& tol = pair.tol;
    SpecialData sd = special_data(pair, o);
    if (std::max(sd.isometry_defect, sd.range_isometry_defect) > tol.eq_tol) {
        std::ostringstream os;
        os << "Lambda isometry defect " << std::max(sd.isometry_defect, sd.range_isometry_defect);
        throw Error(ErrorKind::IsometryDefect, os.str());
    }
    const Index F = sd.d1 + sd.d2;
    CMatrix V0 = sd.LambdaR * sd.Lambda.adjoint();
    const CMatrix* twist = opt.twist ? &*opt.twist : nullptr;
    CMatrix U = unitary_extension(V0, Subspace{F, sd.Lambda}, Subspace{F, sd.LambdaR}, opt.slack, tol, twist);
    const Index m = U.rows();
    PreAndoTuple t;
    t.F_dim = m;
    t.U = U;
    t.P = CMatrix::Zero(m, m);
    t.P.topLeftCorner(sd.d1, sd.d1) = identity(sd.d1);
    if (opt.P_identity_on_slack && m > F) t.P.bottomRightCorner(m - F, m - F) = identity(m - F);
    t.Lambda = CMatrix::Zero(m, sd.d);
    t.Lambda.topRows(F) = sd.Lambda;
    t.orientation = o;
    t.D_basis = sd.E;
    t.slack = m - F;
    return t;
}

RegularityReport regularity(const CommutingContractivePair& pair) {
    const Tolerances& tol = pair.tol;
    RegularityReport r;
    Defect a = defect(pair.T1, tol), b = defect(pair.T2, tol);
    const Index n = pair.dim();
    const Index F = a.dim() + b.dim();
    r.dim_sum = F;
    if (n > 0 && F > 0) {
        CMatrix a_coord = a.delta.cast<cd>().asDiagonal() * a.E().adjoint();
        CMatrix b_coord = b.delta.cast<cd>().asDiagonal() * b.E().adjoint();
        CMatrix L(F, n), R(F, n);
        L << a_coord * pair.T2, b_coord;
        R << a_coord, b_coord * pair.T1;
        r.dim_DU0 = numerical_rank(L, span_cutoff(tol));
        r.dim_RU0 = numerical_rank(R, span_cutoff(tol));
    }
    r.reg12 = r.dim_DU0 == F;
    r.reg21 = r.dim_RU0 == F;
    Defect a_star = defect(pair.T1.adjoint(), tol), b_star = defect(pair.T2.adjoint(), tol);
    r.intersect12 = intersect(a.space, b_star.space, span_cutoff(tol)).dim();
    r.intersect21 = intersect(b.space, a_star.space, span_cutoff(tol)).dim();
    r.crossCheck = (r.reg12 == (r.intersect12 == 0)) && (r.reg21 == (r.intersect21 == 0));
    if (!r.crossCheck) {
        std::ostringstream os;
        os << "dimension count (" << r.reg12 << ", " << r.reg21 << ") against intersections (" << r.intersect12
           << ", " << r.intersect21 << ")";
        throw Error(ErrorKind::CriterionMismatch, os.str());
    }
    return r;
}

TupleClassification classify(const PreAndoTuple& t, const CommutingContractivePair& pair) {
    const Tolerances& tol = pair.tol;
    Frame fr = frame(t, pair);
    TupleClassification c;
    const Index F = t.F_dim;
    if (t.P.rows() != F || t.U.rows() != F || t.Lambda.rows() != F)
        throw Error(ErrorKind::DimensionMismatch, "tuple blocks disagree on dim F");
    CMatrix Pp = identity(F) - t.P;
    const CMatrix& P = t.P;
    const CMatrix& U = t.U;
    const CMatrix Us = U.adjoint();
    const CMatrix& L = fr.L;

    c.res_typeI = std::max(opnorm(Pp * U * L + P * U * L * fr.A - L * fr.A1),
                           opnorm(Us * P * L + Us * Pp * L * fr.A - L * fr.A2));
    c.res_typeIPrime = std::max(opnorm(Us * P * L * fr.A + Us * Pp * L - L * fr.A1),
                                opnorm(Pp * U * L * fr.A + P * U * L - L * fr.A2));
    TypeII two = type_ii(fr, P, U);
    c.res_typeII_i = two.commutativity;
    c.res_typeII_ii = two.norms;
    c.res_typeII = std::max(two.commutativity, two.norms);
    c.res_strongTypeII = std::max(c.res_typeII, two.strong);
    TypeII flipped = type_ii(fr, Us * P * U, Us);
    c.res_typeIIPrime = std::max(flipped.commutativity, flipped.norms);
    c.res_strongTypeIIPrime = std::max(c.res_typeIIPrime, flipped.strong);

    c.typeI = c.res_typeI <= tol.eq_tol;
    c.typeIPrime = c.res_typeIPrime <= tol.eq_tol;
    c.typeII = c.res_typeII <= tol.eq_tol;
    c.strongTypeII = c.res_strongTypeII <= tol.eq_tol;
    c.typeIIPrime = c.res_typeIIPrime <= tol.eq_tol;
    c.strongTypeIIPrime = c.res_strongTypeIIPrime <= tol.eq_tol;

    c.res_stronglyMinimal = t.Lambda.rows() == t.Lambda.cols() ? unitarity_defect(t.Lambda)
                                                               : std::numeric_limits<double>::infinity();
    c.stronglyMinimal = c.res_stronglyMinimal <= tol.eq_tol;

    SpecialData sd = special_data(pair, t.orientation);
    c.res_special = special_residual(t, sd);
    c.special = c.res_special <= tol.eq_tol;
    return c;
}

AlmostCanonical almost_canonical(const PreAndoTuple& t, const CommutingContractivePair& pair) {
    const Tolerances& tol = pair.tol;
    Frame fr = frame(t, pair);
    const Index F = t.F_dim;
    CMatrix Pp = identity(F) - t.P;
    CMatrix X = t.P * t.U * fr.L * fr.A2 + Pp * fr.L;
    CMatrix C = douglas_factor(X.adjoint(), fr.L.adjoint(), tol);
    AlmostCanonical ac;
    ac.u = C.adjoint();
    ac.residual = opnorm(X - ac.u * fr.L);
    ac.isometry_defect = isometry_defect(ac.u * t.Lambda);
    return ac;
}

PreAndoTuple noncanonical_typeII(const CMatrix& T1, const CMatrix& tau1, const CMatrix& tau2, const Tolerances& tol) {
    CommutingContractivePair pair = validate_pair(T1, T1, tol);
    SpecialData sd = special_data(pair, Orientation::Forward);
    const Index d1 = sd.d1;
    if (tau1.cols() != d1 || tau2.cols() != d1 || tau1.rows() != tau2.rows())
        throw Error(ErrorKind::DimensionMismatch, "tau1, tau2 must map D_{T1} coordinates into a common space");
    if (isometry_defect(tau1) > tol.eq_tol || isometry_defect(tau2) > tol.eq_tol)
        throw Error(ErrorKind::NotIsometry, "tau1 and tau2 must be isometries");
    const Index g = tau1.rows();
    PreAndoTuple t;
    t.F_dim = 2 * g;
    t.Lambda = direct_sum(tau1, tau2) * sd.Lambda;
    t.P = CMatrix::Zero(2 * g, 2 * g);
    t.P.topLeftCorner(g, g) = identity(g);
    t.U = CMatrix::Zero(2 * g, 2 * g);
    t.U.topRightCorner(g, g) = identity(g);
    t.U.bottomLeftCorner(g, g) = identity(g);
    t.orientation = Orientation::Forward;
    t.D_basis = sd.E;
    return t;
}

CoincideResult coincide(const PreAndoTuple& a, const PreAndoTuple& b, const Tolerances& tol,
                        const CoincideOptions& opt) {
    if (a.Lambda.cols() != b.Lambda.cols())
        throw Error(ErrorKind::DimensionMismatch, "coincide: defect dimensions differ");
    const double accept = opt.accept_tol > 0 ? opt.accept_tol : tol.eq_tol;
    const Index F = a.F_dim;
    const int depth = opt.depth > 0 ? opt.depth : static_cast<int>(2 * std::max<Index>(F, 1));
    CoincideResult res;

    struct Item {
        CVector x, y;
        int level;
    };
    std::deque<Item> queue;
    for (Index j = 0; j < a.Lambda.cols(); ++j) queue.push_back({a.Lambda.col(j), b.Lambda.col(j), 0});
    CMatrix Q(F, F);
    std::vector<CVector> xs, ys;
    while (!queue.empty() && static_cast<Index>(xs.size()) < F) {
        Item it = queue.front();
        queue.pop_front();
        CVector r = it.x;
        const Index k = static_cast<Index>(xs.size());
        for (int pass = 0; pass < 2; ++pass)
            if (k > 0) r -= Q.leftCols(k) * (Q.leftCols(k).adjoint() * r);
        if (r.norm() <= 1e-8 * std::max(1.0, it.x.norm())) continue;
        Q.col(k) = r / r.norm();
        xs.push_back(it.x);
        ys.push_back(it.y);
        if (it.level < depth) {
            queue.push_back({a.U * it.x, b.U * it.y, it.level + 1});
            queue.push_back({a.U.adjoint() * it.x, b.U.adjoint() * it.y, it.level + 1});
            queue.push_back({a.P * it.x, b.P * it.y, it.level + 1});
        }
    }
    const Index m = static_cast<Index>(xs.size());
    res.span_dim = m;
    CMatrix X(F, m), Y(b.F_dim, m);
    for (Index j = 0; j < m; ++j) {
        X.col(j) = xs[static_cast<size_t>(j)];
        Y.col(j) = ys[static_cast<size_t>(j)];
    }
    CMatrix GX = X.adjoint() * X;
    res.gram_residual = m > 0 ? opnorm(GX - Y.adjoint() * Y) : 0.0;
    if (res.gram_residual > accept * std::max(1.0, opnorm(GX))) {
        res.status = CoincideStatus::GramMismatch;
        res.detail = "Gram matrices of the generated vectors differ";
        return res;
    }
    if (m < F) {
        res.status = CoincideStatus::NotIrreducible;
        res.detail = "generated span is a proper subspace";
        return res;
    }
    if (b.F_dim != F) {
        res.status = CoincideStatus::GramMismatch;
        res.detail = "coefficient spaces have different dimensions";
        return res;
    }
    CMatrix tau = F > 0 ? polar_unitary(Y * pinv(X, 1e-12)) : CMatrix(0, 0);
    res.res_lambda = opnorm(tau * a.Lambda - b.Lambda);
    res.res_P = opnorm(tau * a.P - b.P * tau);
    res.res_U = opnorm(tau * a.U - b.U * tau);
    if (std::max({res.res_lambda, res.res_P, res.res_U}) > accept) {
        res.status = CoincideStatus::GramMismatch;
        res.detail = "intertwining residuals exceed tolerance";
        return res;
    }
    res.status = CoincideStatus::Coincide;
    res.tau = tau;
    return res;
}

PreAndoTuple tuple_from_fund(const FundamentalPair& fp, const Tolerances& tol) {
    if (!check_strong_fund(fp, tol).holds)
        throw Error(ErrorKind::StrongFundFails, "tuple_from_fund needs F1 F2 = 0 = F2 F1 and the sum identities");
    const Index d = fp.dim();
    PreAndoTuple t;
    t.F_dim = d;
    t.Lambda = identity(d);
    t.P = fp.F2.adjoint() * fp.F2;
    t.U = fp.F2.adjoint() + fp.F1;
    t.orientation = Orientation::Forward;
    t.D_basis = fp.defect.E();
    return t;
}

PreAndoTuple flip_tuple(const PreAndoTuple& t) {
    PreAndoTuple f = t;
    f.P = t.U.adjoint() * t.P * t.U;
    f.U = t.U.adjoint();
    return f;
}

}  // namespace ando
