#include "ando/lift.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ando {

namespace {

CMatrix truncated(const Defect& d) { return d.E() * d.delta.cast<cd>().asDiagonal() * d.E().adjoint(); }

// Frobenius norm: an upper bound for the operator norm, cheap on the large lift matrices.
double fnorm(const CMatrix& A) { return A.size() == 0 ? 0.0 : A.norm(); }

// [[A, 0], [C, B]]
CMatrix lower_block(const CMatrix& A, const CMatrix& C, const CMatrix& B) {
    CMatrix M = CMatrix::Zero(A.rows() + B.rows(), A.cols() + B.cols());
    M.topLeftCorner(A.rows(), A.cols()) = A;
    M.bottomLeftCorner(C.rows(), C.cols()) = C;
    M.bottomRightCorner(B.rows(), B.cols()) = B;
    return M;
}

std::vector<LiftBlock> head_hardy_blocks(Index head, Index c, Index N) {
    std::vector<LiftBlock> b;
    b.push_back({0, head, -1});
    for (Index k = 0; k <= N; ++k) b.push_back({head + k * c, c, static_cast<int>(k)});
    return b;
}

std::vector<LiftBlock> hardy_tail_blocks(Index c, Index N, Index tail) {
    std::vector<LiftBlock> b;
    for (Index k = 0; k <= N; ++k) b.push_back({k * c, c, static_cast<int>(k)});
    b.push_back({(N + 1) * c, tail, -1});
    return b;
}

// Stack of D_{T*} T*^n coordinates, n = 0..N, in the basis of dstar.
CMatrix observability(const CMatrix& Tstar, const Defect& dstar, Index N) {
    const Index d = dstar.dim(), n = Tstar.rows();
    CMatrix O(d * (N + 1), n);
    CMatrix coord = dstar.delta.cast<cd>().asDiagonal() * dstar.E().adjoint();
    CMatrix Tk = identity(n);
    for (Index k = 0; k <= N; ++k) {
        O.middleRows(k * d, d) = coord * Tk;
        Tk = Tk * Tstar;
    }
    return O;
}

CMatrix stack(const CMatrix& A, const CMatrix& B) {
    CMatrix M(A.rows() + B.rows(), std::max(A.cols(), B.cols()));
    if (A.rows() > 0) M.topRows(A.rows()) = A;
    if (B.rows() > 0) M.bottomRows(B.rows()) = B;
    return M;
}

const CMatrix& frame_lambda_check(const PreAndoTuple& t, Orientation o) {
    if (t.orientation != o)
        throw Error(ErrorKind::OrientationMismatch, "tuple must have " + to_string(o) + " orientation");
    return t.Lambda;
}

// Orthonormal basis for the part of X outside span(Q).
CMatrix new_directions(const CMatrix& Q, const CMatrix& X) {
    CMatrix R = X;
    if (Q.cols() > 0)
        for (int pass = 0; pass < 2; ++pass) R -= Q * (Q.adjoint() * R);
    if (R.cols() == 0) return CMatrix(X.rows(), 0);
    CMatrix B = range_space(R, 1e-10).basis;
    // Directions from small singular values carry amplified components along Q.
    if (Q.cols() == 0) return B;
    for (int pass = 0; pass < 2; ++pass) B -= Q * (Q.adjoint() * B);
    return range_space(B, 0.5).basis;
}

}  // namespace

std::vector<Index> interior_coords(const TruncatedLift& lift) {
    std::vector<Index> idx;
    for (const LiftBlock& b : lift.blocks)
        if (b.degree < static_cast<int>(lift.N))
            for (Index i = 0; i < b.size; ++i) idx.push_back(b.offset + i);
    return idx;
}

std::vector<Index> top_coords(const TruncatedLift& lift) {
    std::vector<Index> idx;
    for (const LiftBlock& b : lift.blocks)
        if (b.degree == static_cast<int>(lift.N))
            for (Index i = 0; i < b.size; ++i) idx.push_back(b.offset + i);
    return idx;
}

TruncatedLift schaffer_single_lift(const CMatrix& T, Index N, const Tolerances& tol) {
    if (N < 1) throw Error(ErrorKind::InvalidInput, "N must be at least 1");
    Defect dT = defect(T, tol);
    const Index n = T.rows(), d = dT.dim();
    TruncatedLift l;
    l.model = "schaffer-single";
    l.pair_ops = false;
    l.N = N;
    l.coeff_dim = d;
    l.coeff_range = identity(d);
    CMatrix coord = dT.delta.cast<cd>().asDiagonal() * dT.E().adjoint();
    l.V = lower_block(T, ev0_adj(coord, N), shift(d, N));
    l.Pi = CMatrix::Zero(n + (N + 1) * d, n);
    l.Pi.topRows(n) = identity(n);
    l.blocks = head_hardy_blocks(n, d, N);
    return l;
}

TruncatedLift schaffer_ando_lift(const CommutingContractivePair& pair, const PreAndoTuple& tuple, Index N,
                                 bool check) {
    if (N < 1) throw Error(ErrorKind::InvalidInput, "N must be at least 1");
    frame_lambda_check(tuple, Orientation::Forward);
    if (check) {
        TupleClassification c = classify(tuple, pair);
        if (!c.strongTypeII) {
            std::ostringstream os;
            os << "strong Type II residual " << c.res_strongTypeII;
            throw Error(ErrorKind::NotStrongTypeII, os.str());
        }
    }
    const Tolerances& tol = pair.tol;
    Defect dT = defect(pair.T, tol);
    const Index n = pair.dim(), F = tuple.F_dim;
    const CMatrix& P = tuple.P;
    const CMatrix& U = tuple.U;
    CMatrix Pp = identity(F) - P;
    CMatrix Us = U.adjoint();
    CMatrix L = tuple.Lambda * tuple.D_basis.adjoint() * truncated(dT);
    TruncatedLift l;
    l.model = "schaffer-ando";
    l.N = N;
    l.coeff_dim = F;
    l.coeff_range = tuple.Lambda.cols() > 0 ? range_space(tuple.Lambda, 1e-8).basis : CMatrix(F, 0);
    l.V1 = lower_block(pair.T1, ev0_adj(P * U * L, N), pencil(Pp * U, P * U, N));
    l.V2 = lower_block(pair.T2, ev0_adj(Us * Pp * L, N), pencil(Us * P, Us * Pp, N));
    l.V = lower_block(pair.T, ev0_adj(L, N), shift(F, N));
    l.Pi = CMatrix::Zero(n + (N + 1) * F, n);
    l.Pi.topRows(n) = identity(n);
    l.blocks = head_hardy_blocks(n, F, N);
    return l;
}

TruncatedLift douglas_ando_lift(const CommutingContractivePair& pair, const PreAndoTuple& tuple, Index N,
                                bool check) {
    if (N < 1) throw Error(ErrorKind::InvalidInput, "N must be at least 1");
    frame_lambda_check(tuple, Orientation::Adjoint);
    if (check) {
        TupleClassification c = classify(tuple, pair);
        if (!c.typeI) {
            std::ostringstream os;
            os << "Type I residual " << c.res_typeI;
            throw Error(ErrorKind::NotTypeI, os.str());
        }
    }
    const Tolerances& tol = pair.tol;
    CommutingContractivePair adj = pair.adjoint();
    Defect ds = defect(adj.T, tol);
    AsymptoticData ad = canonical_unitaries(pair);
    const Index F = tuple.F_dim, r = ad.ranQ.dim();
    const CMatrix& P = tuple.P;
    const CMatrix& U = tuple.U;
    CMatrix Pp = identity(F) - P;
    CMatrix Us = U.adjoint();
    // Lambda D_{T*} in the coordinates of the tuple's defect basis.
    CMatrix toLambda = tuple.Lambda * tuple.D_basis.adjoint() * ds.E();
    TruncatedLift l;
    l.model = "douglas-ando";
    l.N = N;
    l.coeff_dim = F;
    l.coeff_range = tuple.Lambda.cols() > 0 ? range_space(tuple.Lambda, 1e-8).basis : CMatrix(F, 0);
    l.V1 = direct_sum(pencil(Us * Pp, Us * P, N), ad.W_flat1);
    l.V2 = direct_sum(pencil(P * U, Pp * U, N), ad.W_flat2);
    l.V = direct_sum(shift(F, N), ad.W_D);
    l.Pi = stack(blockwise(toLambda, N) * observability(adj.T, ds, N), ad.Qt);
    l.blocks = hardy_tail_blocks(F, N, r);
    return l;
}

TruncatedLift compress_douglas_lift(const TruncatedLift& lift, const PreAndoTuple& tuple) {
    const Index N = lift.N, r = lift.size() - (N + 1) * lift.coeff_dim;
    const Index d = tuple.Lambda.cols();
    CMatrix J = direct_sum(blockwise(tuple.Lambda, N), identity(r));
    TruncatedLift c;
    c.model = "douglas-compressed";
    c.pcc = true;
    c.N = N;
    c.coeff_dim = d;
    c.coeff_range = identity(d);
    c.V1 = J.adjoint() * lift.V1 * J;
    c.V2 = J.adjoint() * lift.V2 * J;
    c.V = J.adjoint() * lift.V * J;
    c.Pi = J.adjoint() * lift.Pi;
    c.blocks = hardy_tail_blocks(d, N, r);
    return c;
}

TruncatedLift compress_schaffer_lift(const TruncatedLift& lift, const PreAndoTuple& tuple) {
    const Index N = lift.N, n = lift.Pi.cols();
    const Index d = tuple.Lambda.cols();
    CMatrix J = direct_sum(identity(n), blockwise(tuple.Lambda, N));
    TruncatedLift c;
    c.model = "schaffer-compressed";
    c.pcc = true;
    c.N = N;
    c.coeff_dim = d;
    c.coeff_range = identity(d);
    c.V1 = J.adjoint() * lift.V1 * J;
    c.V2 = J.adjoint() * lift.V2 * J;
    c.V = J.adjoint() * lift.V * J;
    c.Pi = J.adjoint() * lift.Pi;
    c.blocks = head_hardy_blocks(n, d, N);
    return c;
}

TruncatedLift pcc_douglas(const CommutingContractivePair& pair, Index N) {
    if (N < 1) throw Error(ErrorKind::InvalidInput, "N must be at least 1");
    CommutingContractivePair adj = pair.adjoint();
    FundamentalPair g = fundamental_pair(adj);
    AsymptoticData ad = canonical_unitaries(pair);
    const Index d = g.dim(), r = ad.ranQ.dim();
    TruncatedLift l;
    l.model = "pcc-douglas";
    l.pcc = true;
    l.N = N;
    l.coeff_dim = d;
    l.coeff_range = identity(d);
    l.V1 = direct_sum(pencil(g.F1.adjoint(), g.F2, N), ad.W_flat1);
    l.V2 = direct_sum(pencil(g.F2.adjoint(), g.F1, N), ad.W_flat2);
    l.V = direct_sum(shift(d, N), ad.W_D);
    l.Pi = stack(observability(adj.T, g.defect, N), ad.Qt);
    l.blocks = hardy_tail_blocks(d, N, r);
    return l;
}

TruncatedLift pcc_schaffer(const CommutingContractivePair& pair, Index N) {
    FundamentalPair f = fundamental_pair(pair);
    TruncatedLift l = schaffer_single_lift(pair.T, N, pair.tol);
    const Defect& dT = f.defect;
    CMatrix coord = dT.delta.cast<cd>().asDiagonal() * dT.E().adjoint();
    l.model = "pcc-schaffer";
    l.pair_ops = true;
    l.pcc = true;
    l.V1 = lower_block(pair.T1, ev0_adj(f.F2.adjoint() * coord, N), pencil(f.F1, f.F2.adjoint(), N));
    l.V2 = lower_block(pair.T2, ev0_adj(f.F1.adjoint() * coord, N), pencil(f.F2, f.F1.adjoint(), N));
    return l;
}

BidiskData bidisk_data(const CommutingContractivePair& pair) {
    const Tolerances& tol = pair.tol;
    const Index n = pair.dim();
    BidiskData b;
    CMatrix D2 = identity(n) - pair.T1 * pair.T1.adjoint() - pair.T2 * pair.T2.adjoint() +
                 pair.T1 * pair.T2 * pair.T2.adjoint() * pair.T1.adjoint();
    D2 = (D2 + D2.adjoint()) / 2.0;
    b.D2_eigs = Eigen::SelfAdjointEigenSolver<CMatrix>(D2, Eigen::EigenvaluesOnly).eigenvalues();
    if (n > 0 && b.D2_eigs(0) < -tol.psd_tol) {
        std::ostringstream os;
        os << "bidisk squared defect has eigenvalue " << b.D2_eigs(0);
        throw Error(ErrorKind::DefectNotPSD, os.str());
    }
    const cd c(0.6180339887498949, 0.3819660112501051);
    Eigen::ComplexEigenSolver<CMatrix> es(pair.T1.adjoint() + c * pair.T2.adjoint());
    b.V = es.eigenvectors();
    for (Index j = 0; j < n; ++j) b.V.col(j).normalize();
    b.mu1.resize(n);
    b.mu2.resize(n);
    double res = 0;
    for (Index j = 0; j < n; ++j) {
        CVector v = b.V.col(j);
        b.mu1(j) = v.dot(pair.T1.adjoint() * v);
        b.mu2(j) = v.dot(pair.T2.adjoint() * v);
        res = std::max({res, (pair.T1.adjoint() * v - b.mu1(j) * v).norm(), (pair.T2.adjoint() * v - b.mu2(j) * v).norm()});
    }
    Eigen::JacobiSVD<CMatrix> svd(b.V);
    RVector s = svd.singularValues();
    double cond = n > 0 ? s(0) / s(n - 1) : 1.0;
    if (res > 1e-8 || !(cond < 1e8)) {
        std::ostringstream os;
        os << "joint eigenvector residual " << res << ", condition " << cond;
        throw Error(ErrorKind::NotJointlyDiagonalizable, os.str());
    }
    for (Index j = 0; j < n; ++j)
        if (std::abs(b.mu1(j)) >= 1.0 || std::abs(b.mu2(j)) >= 1.0)
            throw Error(ErrorKind::InvalidInput, "joint eigenvalues must lie in the open unit disk");
    CMatrix G = b.V.adjoint() * D2 * b.V;
    G = (G + G.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<CMatrix> gs(G);
    Index d = 0;
    for (Index i = 0; i < n; ++i)
        if (gs.eigenvalues()(i) > tol.rank_tol) ++d;
    b.Y.resize(d, n);
    for (Index k = 0; k < d; ++k) {
        Index i = n - 1 - k;
        b.Y.row(k) = std::sqrt(gs.eigenvalues()(i)) * gs.eigenvectors().col(i).adjoint();
    }
    return b;
}

TruncatedLift bidisk_lift(const CommutingContractivePair& pair, Index N) {
    if (N < 1) throw Error(ErrorKind::InvalidInput, "N must be at least 1");
    BidiskData b = bidisk_data(pair);
    const Index n = pair.dim(), d = b.Y.rows();
    // Monomials z1^a z2^b ordered by total degree, then by decreasing a.
    std::vector<std::pair<Index, Index>> mono;
    for (Index t = 0; t <= N; ++t)
        for (Index a = t; a >= 0; --a) mono.push_back({a, t - a});
    const Index M = static_cast<Index>(mono.size());
    auto index_of = [](Index a, Index bb) {
        Index t = a + bb;
        return t * (t + 1) / 2 + (t - a);
    };
    TruncatedLift l;
    l.model = "bidisk";
    l.N = N;
    l.coeff_dim = d;
    l.coeff_range = identity(d);
    CMatrix K(M * d, n);
    for (Index m = 0; m < M; ++m) {
        auto [a, bb] = mono[static_cast<size_t>(m)];
        for (Index j = 0; j < n; ++j)
            K.block(m * d, j, d, 1) = std::pow(b.mu1(j), static_cast<double>(a)) *
                                      std::pow(b.mu2(j), static_cast<double>(bb)) * b.Y.col(j);
    }
    l.Pi = K * b.V.inverse();
    l.V1 = CMatrix::Zero(M * d, M * d);
    l.V2 = CMatrix::Zero(M * d, M * d);
    for (Index m = 0; m < M; ++m) {
        auto [a, bb] = mono[static_cast<size_t>(m)];
        if (a + bb == N) continue;
        l.V1.block(index_of(a + 1, bb) * d, m * d, d, d) = identity(d);
        l.V2.block(index_of(a, bb + 1) * d, m * d, d, d) = identity(d);
    }
    l.V = l.V1 * l.V2;
    for (Index m = 0; m < M; ++m) {
        auto [a, bb] = mono[static_cast<size_t>(m)];
        l.blocks.push_back({m * d, d, static_cast<int>(a + bb)});
    }
    return l;
}

DouglasNormReport douglas_norm_identity(const CMatrix& T, Index N, const Tolerances& tol) {
    const Index n = T.rows();
    CMatrix Ts = T.adjoint();
    Defect ds = defect(Ts, tol);
    CMatrix O = observability(Ts, ds, N);
    QStar qs = q_star(T, tol);
    CMatrix Tp = identity(n);
    for (Index k = 0; k <= N; ++k) Tp = Tp * Ts;
    CMatrix lhs = O.adjoint() * O + qs.Q * qs.Q;
    CMatrix rhs = identity(n) - Tp.adjoint() * Tp + qs.Q * qs.Q;
    DouglasNormReport r;
    r.identity_residual = opnorm(lhs - rhs);
    r.isometry_defect = opnorm(lhs - identity(n));
    return r;
}

double minimality_defect(const TruncatedLift& lift, Index burn, Index degree) {
    const Index K = lift.size();
    if (degree < 0) degree = lift.N;
    std::vector<const CMatrix*> ops;
    if (lift.pair_ops) {
        ops = {&lift.V1, &lift.V2};
    } else {
        ops = {&lift.V};
    }
    CMatrix Q = new_directions(CMatrix(K, 0), lift.Pi);
    CMatrix frontier = Q;
    for (Index step = 1; step <= degree && frontier.cols() > 0; ++step) {
        CMatrix images(K, frontier.cols() * static_cast<Index>(ops.size()));
        for (size_t o = 0; o < ops.size(); ++o)
            images.middleCols(static_cast<Index>(o) * frontier.cols(), frontier.cols()) = *ops[o] * frontier;
        frontier = new_directions(Q, images);
        CMatrix next(K, Q.cols() + frontier.cols());
        next << Q, frontier;
        Q = next;
    }
    // Target: fixed blocks, and Ran Lambda on degrees <= N - burn.
    Index cols = 0;
    for (const LiftBlock& b : lift.blocks) {
        if (b.degree < 0) cols += b.size;
        else if (b.degree <= static_cast<int>(degree - burn)) cols += lift.coeff_range.cols();
    }
    CMatrix B = CMatrix::Zero(K, cols);
    Index c = 0;
    for (const LiftBlock& b : lift.blocks) {
        if (b.degree < 0) {
            B.block(b.offset, c, b.size, b.size) = identity(b.size);
            c += b.size;
        } else if (b.degree <= static_cast<int>(degree - burn)) {
            B.block(b.offset, c, b.size, lift.coeff_range.cols()) = lift.coeff_range;
            c += lift.coeff_range.cols();
        }
    }
    if (B.cols() == 0) return 0.0;
    return opnorm(B - Q * (Q.adjoint() * B));
}

LiftReport verify_lift(TruncatedLift& lift, const CommutingContractivePair& pair, Index burn, bool with_minimality) {
    LiftReport& r = lift.report;
    r = LiftReport{};
    r.burn = burn;
    std::vector<Index> in = interior_coords(lift), top = top_coords(lift);
    std::vector<std::pair<const CMatrix*, const CMatrix*>> legs;
    if (lift.pair_ops) {
        legs = {{&lift.V1, &pair.T1}, {&lift.V2, &pair.T2}};
    } else {
        legs = {{&lift.V, &pair.T}};
    }
    for (auto [Vj, Tj] : legs) {
        CMatrix diff = Vj->adjoint() * lift.Pi - lift.Pi * Tj->adjoint();
        r.intertwine = std::max(r.intertwine, opnorm(diff(in, Eigen::all)));
        if (!top.empty()) r.intertwine_tail = std::max(r.intertwine_tail, opnorm(diff(top, Eigen::all)));
    }
    const Index n = lift.Pi.cols();
    r.pi_isometry = opnorm(lift.Pi.adjoint() * lift.Pi - identity(n));
    if (lift.pcc) {
        CMatrix W1 = lift.V1(Eigen::all, in), W2 = lift.V2(Eigen::all, in);
        CMatrix W = lift.V(Eigen::all, in);
        r.pcc_contractive = std::max(0.0, std::max(opnorm(W1), opnorm(W2)) - 1.0);
        r.pcc_commute_W = std::max(fnorm(lift.V1 * W - lift.V * W1), fnorm(lift.V2 * W - lift.V * W2));
        r.pcc_w1 = fnorm(W1 - lift.V2.adjoint() * W);
        r.pcc_w2 = fnorm(W2 - lift.V1.adjoint() * W);
        r.interior_isometry = fnorm(W.adjoint() * W - identity(static_cast<Index>(in.size())));
    } else if (lift.pair_ops) {
        CMatrix X1 = lift.V1(Eigen::all, in), X2 = lift.V2(Eigen::all, in);
        r.interior_commutator = fnorm(lift.V1 * X2 - lift.V2 * X1);
        r.product_residual = fnorm(lift.V1 * X2 - lift.V(Eigen::all, in));
        const Index k = static_cast<Index>(in.size());
        r.interior_isometry = std::max(fnorm(X1.adjoint() * X1 - identity(k)), fnorm(X2.adjoint() * X2 - identity(k)));
    } else {
        CMatrix X = lift.V(Eigen::all, in);
        const Index k = static_cast<Index>(in.size());
        r.interior_isometry = fnorm(X.adjoint() * X - identity(k));
    }
    if (with_minimality) r.minimality = minimality_defect(lift, burn);
    return r;
}

}  // namespace ando
