#include "ando/charfn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace ando {

CharFnEvaluator::CharFnEvaluator(const CMatrix& T, const Tolerances& tol)
    : T_(T), tol_(tol), dT_(defect(T, tol)), dTs_(defect(T.adjoint(), tol)) {
    right_ = dT_.E() * dT_.delta.cast<cd>().asDiagonal();
    left_ = dTs_.delta.cast<cd>().asDiagonal() * dTs_.E().adjoint();
    theta0_ = -dTs_.E().adjoint() * T_ * dT_.E();
}

CMatrix CharFnEvaluator::operator()(cd z) const {
    if (std::abs(z) >= 1.0 - tol_.rank_tol) {
        std::ostringstream os;
        os << "|z| = " << std::abs(z) << " is not inside the disk";
        throw Error(ErrorKind::ResolventSingular, os.str());
    }
    if (in_dim() == 0 || out_dim() == 0) return CMatrix::Zero(out_dim(), in_dim());
    const Index n = T_.rows();
    CMatrix R = identity(n) - z * T_.adjoint();
    CMatrix X = Eigen::PartialPivLU<CMatrix>(R).solve(right_);
    if (!X.allFinite()) throw Error(ErrorKind::ResolventSingular, "resolvent solve produced non-finite values");
    return theta0_ + z * left_ * X;
}

CMatrix theta_eval(const CMatrix& T, cd z, const Tolerances& tol) { return CharFnEvaluator(T, tol)(z); }

bool is_purely_contractive_theta(const CMatrix& theta0, const Tolerances& tol) {
    if (theta0.size() == 0) return true;
    return opnorm(theta0) < 1.0 - tol.rank_tol;
}

bool is_purely_contractive(const CMatrix& T, const Tolerances& tol) {
    return is_purely_contractive_theta(CharFnEvaluator(T, tol)(0.0), tol);
}

std::vector<cd> halton_disk(int n) {
    auto radical = [](int i, int base) {
        double f = 1.0, r = 0.0;
        while (i > 0) {
            f /= base;
            r += f * (i % base);
            i /= base;
        }
        return r;
    };
    std::vector<cd> pts;
    pts.reserve(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) {
        double r = 0.95 * std::sqrt(radical(i, 2));
        double t = 2.0 * std::numbers::pi * radical(i, 3);
        pts.push_back(std::polar(r, t));
    }
    return pts;
}

CharTriple char_triple(const CommutingContractivePair& pair, bool strict) {
    CanonicalDecomposition cd_ = canonical_decomposition_pair(pair);
    CommutingContractivePair p = pair;
    bool restricted = false;
    if (cd_.Hu.dim() > 0) {
        if (strict) throw Error(ErrorKind::NotCNU, "the pair has a unitary part");
        p = validate_pair(cd_.T1c, cd_.T2c, pair.tol);
        restricted = true;
    }
    FundamentalPair G = fundamental_pair(p.adjoint());
    AsymptoticData flats = canonical_unitaries(p);
    return CharTriple{p.T1, p.T2, G, flats, restricted, CharFnEvaluator(p.T, pair.tol)};
}

void CharCoincidence::require() const {
    if (!ok) throw Error(ErrorKind::NoCoincidence, "no coincidence (" + stage + ")");
}

namespace {

CMatrix kron(const CMatrix& A, const CMatrix& B) {
    CMatrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

// Null space of a tall system fed in row blocks, keeping only a triangular factor.
class StackedSystem {
public:
    explicit StackedSystem(Index cols) : R_(0, cols) {}

    void add(const CMatrix& A) {
        const Index c = R_.cols();
        CMatrix M(R_.rows() + A.rows(), c);
        M << R_, A;
        if (M.rows() <= c) {
            R_ = M;
            return;
        }
        Eigen::HouseholderQR<CMatrix> qr(M);
        R_ = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
    }

    CMatrix null_basis(double rel) const {
        const Index c = R_.cols();
        if (c == 0) return CMatrix(0, 0);
        CMatrix M = R_;
        if (M.rows() < c) {
            M.conservativeResize(c, c);
            M.bottomRows(c - R_.rows()).setZero();
        }
        Eigen::JacobiSVD<CMatrix> svd(M, Eigen::ComputeFullV);
        const RVector& s = svd.singularValues();
        double cut = rel * std::max(1.0, s(0));
        Index rank = 0;
        while (rank < s.size() && s(rank) > cut) ++rank;
        return svd.matrixV().rightCols(c - rank);
    }

private:
    CMatrix R_;
};

CMatrix generic_combination(const CMatrix& basis) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    CVector c(basis.cols());
    for (Index i = 0; i < c.size(); ++i) c(i) = cd(g(rng), g(rng));
    return basis * c;
}

CMatrix reshape(const CVector& x, Index offset, Index rows, Index cols) {
    CMatrix M(rows, cols);
    for (Index j = 0; j < cols; ++j) M.col(j) = x.segment(offset + j * rows, rows);
    return M;
}

struct Extra {
    const CMatrix* G1 = nullptr;
    const CMatrix* G2 = nullptr;
    const CMatrix* G1p = nullptr;
    const CMatrix* G2p = nullptr;
};

CharCoincidence solve_coincidence(const CharFnEvaluator& A, const CharFnEvaluator& B, const std::vector<cd>& grid,
                                  const Tolerances& tol, const Extra& extra) {
    CharCoincidence res;
    const Index d = A.in_dim(), ds = A.out_dim();
    if (d != B.in_dim() || ds != B.out_dim()) {
        res.stage = "defect dimensions";
        return res;
    }
    const Index nu = d * d, nus = ds * ds;
    StackedSystem sys(nu + nus);
    CMatrix Id = identity(d), Ids = identity(ds);
    std::vector<std::pair<CMatrix, CMatrix>> values;
    values.reserve(grid.size());
    for (cd z : grid) {
        CMatrix th = A(z), thp = B(z);
        values.push_back({th, thp});
        if (d == 0 || ds == 0) continue;
        CMatrix eqA(ds * d, nu + nus), eqB(d * ds, nu + nus);
        eqA << -kron(Id, thp), kron(th.transpose(), Ids);
        eqB << kron(th.adjoint().transpose(), Id), -kron(Ids, thp.adjoint());
        sys.add(eqA);
        sys.add(eqB);
    }
    if (extra.G1 && ds > 0) {
        for (auto [G, Gp] : {std::pair{extra.G1, extra.G1p}, std::pair{extra.G2, extra.G2p}}) {
            CMatrix e1(nus, nu + nus), e2(nus, nu + nus);
            e1 << CMatrix::Zero(nus, nu), kron(G->transpose(), Ids) - kron(Ids, *Gp);
            e2 << CMatrix::Zero(nus, nu), kron(G->adjoint().transpose(), Ids) - kron(Ids, Gp->adjoint());
            sys.add(e1);
            sys.add(e2);
        }
    }
    if (nu + nus == 0) {
        res.ok = true;
        res.u = res.u_star = CMatrix(0, 0);
        res.stage = "trivial";
        return res;
    }
    CMatrix N = sys.null_basis(1e-9);
    res.solution_dim = N.cols();
    if (N.cols() == 0) {
        res.stage = "no solution of the linear system";
        return res;
    }
    CVector x = generic_combination(N);
    CMatrix u = reshape(x, 0, d, d), us = reshape(x, nu, ds, ds);
    if (d > 0) u = polar_unitary(u);
    if (ds > 0) us = polar_unitary(us);
    double r = 0;
    for (const auto& [th, thp] : values) r = std::max(r, opnorm(us * th - thp * u));
    if (extra.G1 && ds > 0)
        r = std::max({r, opnorm(us * *extra.G1 - *extra.G1p * us), opnorm(us * *extra.G2 - *extra.G2p * us)});
    res.u = u;
    res.u_star = us;
    res.residual = r;
    if (r > tol.eq_tol) {
        res.stage = "unitary witnesses fail the intertwining";
        return res;
    }
    res.ok = true;
    res.stage = "coincide";
    return res;
}

}  // namespace

CharCoincidence coincide_charfn(const CMatrix& T, const CMatrix& Tp, const std::vector<cd>& grid,
                                const Tolerances& tol) {
    return solve_coincidence(CharFnEvaluator(T, tol), CharFnEvaluator(Tp, tol), grid, tol, {});
}

CharCoincidence coincide_triple(const CharTriple& a, const CharTriple& b, const std::vector<cd>& grid,
                                const Tolerances& tol) {
    Extra ex{&a.G.F1, &a.G.F2, &b.G.F1, &b.G.F2};
    CharCoincidence res = solve_coincidence(a.theta, b.theta, grid, tol, ex);
    if (!res.ok) return res;
    // W part: a unitary rho on Ran Q with rho W_j = W_j' rho.
    const CMatrix& W1 = a.flats.W_flat1;
    const CMatrix& W2 = a.flats.W_flat2;
    const CMatrix& W1p = b.flats.W_flat1;
    const CMatrix& W2p = b.flats.W_flat2;
    const Index r = W1.rows();
    if (r != W1p.rows()) {
        res.ok = false;
        res.stage = "Ran Q dimensions";
        return res;
    }
    if (r == 0) {
        res.rho = CMatrix(0, 0);
        return res;
    }
    CMatrix I = identity(r);
    StackedSystem sys(r * r);
    for (auto [W, Wp] : {std::pair{&W1, &W1p}, std::pair{&W2, &W2p}}) {
        sys.add(kron(W->transpose(), I) - kron(I, *Wp));
        sys.add(kron(W->adjoint().transpose(), I) - kron(I, Wp->adjoint()));
    }
    CMatrix N = sys.null_basis(1e-9);
    if (N.cols() == 0) {
        res.ok = false;
        res.stage = "no rho on Ran Q";
        return res;
    }
    CMatrix rho = polar_unitary(reshape(generic_combination(N), 0, r, r));
    double rr = std::max(opnorm(rho * W1 - W1p * rho), opnorm(rho * W2 - W2p * rho));
    res.residual = std::max(res.residual, rr);
    res.rho = rho;
    if (rr > tol.eq_tol) {
        res.ok = false;
        res.stage = "rho fails the intertwining";
    }
    return res;
}

AdmissibilityReport admissibility_finite(const FiniteModelTriple& model, const Tolerances& tol) {
    const CMatrix& G1 = model.G1;
    const CMatrix& G2 = model.G2;
    const Index d = G1.rows();
    if (G1.cols() != d || G2.rows() != d || G2.cols() != d)
        throw Error(ErrorKind::DimensionMismatch, "G1, G2 must be square of equal size");
    AdmissibilityReport r;
    CMatrix I = identity(d);
    for (const FiniteNode& node : model.nodes) {
        if (std::abs(node.w) >= 1.0) throw Error(ErrorKind::InvalidInput, "node outside the open disk");
        if (node.S.rows() != d) throw Error(ErrorKind::DimensionMismatch, "node subspace has the wrong ambient size");
        const CMatrix& S = node.S;
        const cd wb = std::conj(node.w);
        CMatrix Pperp = I - S * S.adjoint();
        r.invariance = std::max({r.invariance, opnorm(Pperp * (G1 + wb * G2.adjoint()) * S),
                                 opnorm(Pperp * (G2 + wb * G1.adjoint()) * S)});
        CMatrix M12 = G1 * G2 + wb * (G1 * G1.adjoint() + G2.adjoint() * G2) + wb * wb * G2.adjoint() * G1.adjoint();
        CMatrix M21 = G2 * G1 + wb * (G2 * G2.adjoint() + G1.adjoint() * G1) + wb * wb * G1.adjoint() * G2.adjoint();
        r.pencil = std::max({r.pencil, opnorm((M12 - wb * I) * S), opnorm((M21 - wb * I) * S)});
    }
    // Maximum modulus: the unit circle suffices for the pencils G_i* + z G_j.
    double worst = 0;
    const int M = 128;
    for (int k = 0; k < M; ++k) {
        cd z = std::polar(1.0, 2.0 * std::numbers::pi * k / M);
        worst = std::max({worst, opnorm(G1.adjoint() + z * G2), opnorm(G2.adjoint() + z * G1)});
    }
    r.contractive = std::max(0.0, worst - 1.0);
    r.admissible = r.invariance <= tol.eq_tol && r.pencil <= tol.eq_tol && r.contractive <= tol.eq_tol;
    return r;
}

ScalarFactorization scalar_factorization_search(const std::vector<cd>& eigs, int angular, int radial,
                                                const Tolerances& tol) {
    if (angular < 1 || radial < 2) throw Error(ErrorKind::InvalidInput, "grid needs angular >= 1 and radial >= 2");
    bool has_zero = false;
    for (size_t i = 0; i < eigs.size(); ++i) {
        if (std::abs(eigs[i]) >= 1.0) throw Error(ErrorKind::InvalidInput, "eigenvalues must lie in the open disk");
        if (std::abs(eigs[i]) <= tol.rank_tol) has_zero = true;
        for (size_t j = 0; j < i; ++j)
            if (std::abs(eigs[i] - eigs[j]) <= tol.rank_tol)
                throw Error(ErrorKind::InvalidInput, "eigenvalues must be distinct");
    }
    if (!has_zero) throw Error(ErrorKind::InvalidInput, "the eigenvalue list must contain 0");
    std::vector<cd> grid{0.0};
    for (int k = 1; k < radial; ++k)
        for (int a = 0; a < angular; ++a)
            grid.push_back(std::polar(static_cast<double>(k) / (radial - 1), 2.0 * std::numbers::pi * a / angular));
    ScalarFactorization out;
    out.grid_points = static_cast<Index>(grid.size());
    // Rank-one defect model: every node carries all of D_* = C, so (ii') holds trivially and (iii')
    // is a scalar identity; contractivity of g1* + z g2 on the disk is |g1| + |g2| <= 1.
    for (cd g1 : grid) {
        const double a1 = std::abs(g1);
        for (cd g2 : grid) {
            const double a2 = std::abs(g2);
            if (a1 + a2 > 1.0 + tol.eq_tol) continue;
            const cd prod = g1 * g2;
            const double sq = a1 * a1 + a2 * a2;
            bool ok = true;
            for (cd w : eigs) {
                cd wb = std::conj(w);
                cd lhs = prod + wb * sq + wb * wb * std::conj(prod);
                if (std::abs(lhs - wb) > tol.eq_tol) {
                    ok = false;
                    break;
                }
            }
            if (ok) out.points.push_back({g1, g2});
        }
    }
    return out;
}

}  // namespace ando
