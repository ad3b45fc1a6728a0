#include "ando/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace ando {

std::string to_string(Family f) {
    switch (f) {
    case Family::Polynomial: return "polynomial";
    case Family::Block: return "block";
    case Family::Unitary: return "unitary";
    case Family::Nilpotent: return "nilpotent";
    case Family::JointEig: return "joint-eig";
    }
    return "unknown";
}

Family family_from_string(const std::string& s) {
    for (Family f : {Family::Polynomial, Family::Block, Family::Unitary, Family::Nilpotent, Family::JointEig})
        if (to_string(f) == s) return f;
    throw Error(ErrorKind::InvalidInput, "unknown family '" + s + "'");
}

CMatrix random_gaussian(std::mt19937_64& rng, Index rows, Index cols) {
    std::normal_distribution<double> g;
    CMatrix A(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) A(i, j) = cd(g(rng), g(rng));
    return A;
}

CMatrix random_unitary(std::mt19937_64& rng, Index n) {
    if (n == 0) return CMatrix(0, 0);
    Eigen::HouseholderQR<CMatrix> qr(random_gaussian(rng, n, n));
    CMatrix Q = qr.householderQ();
    CMatrix R = qr.matrixQR();
    for (Index j = 0; j < n; ++j) {
        cd r = R(j, j);
        if (std::abs(r) > 0) Q.col(j) *= r / std::abs(r);
    }
    return Q;
}

namespace {

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

// p(M) for a random polynomial of degree 1..3; constant term dropped when nilpotent is requested.
CMatrix random_poly(std::mt19937_64& rng, const CMatrix& M, bool constant_term) {
    const Index n = M.rows();
    int deg = std::uniform_int_distribution<int>(1, 3)(rng);
    CMatrix c = random_gaussian(rng, deg + 1, 1);
    if (!constant_term) c(0, 0) = 0.0;
    CMatrix out = CMatrix::Zero(n, n);
    CMatrix Mk = identity(n);
    for (int k = 0; k <= deg; ++k) {
        out += c(k, 0) * Mk;
        Mk = Mk * M;
    }
    return out;
}

// Rescales to norm s in [0.6, 0.95]; a zero matrix stays zero.
CMatrix rescale(std::mt19937_64& rng, const CMatrix& A) {
    double s = uniform(rng, 0.6, 0.95);
    double nrm = opnorm(A);
    return nrm > 1e-300 ? CMatrix(A * (s / nrm)) : A;
}

std::pair<CMatrix, CMatrix> polynomial_pair(std::mt19937_64& rng, Index n, bool nilpotent) {
    CMatrix M;
    if (nilpotent) {
        M = random_gaussian(rng, n, n).triangularView<Eigen::StrictlyUpper>();
        CMatrix W = random_unitary(rng, n);
        M = W * M * W.adjoint();
    } else {
        M = random_gaussian(rng, n, n);
    }
    CMatrix T1 = rescale(rng, random_poly(rng, M, !nilpotent));
    CMatrix T2 = rescale(rng, random_poly(rng, M, !nilpotent));
    return {T1, T2};
}

std::pair<CMatrix, CMatrix> unitary_pair(std::mt19937_64& rng, Index n) {
    CMatrix W = random_unitary(rng, n);
    CVector a(n), b(n);
    for (Index i = 0; i < n; ++i) {
        a(i) = std::polar(1.0, uniform(rng, 0.0, 2.0 * std::numbers::pi));
        b(i) = std::polar(1.0, uniform(rng, 0.0, 2.0 * std::numbers::pi));
    }
    return {W * a.asDiagonal() * W.adjoint(), W * b.asDiagonal() * W.adjoint()};
}

}  // namespace

GeneratedPair generate_pair(std::uint64_t seed, Index dim, Family family) {
    if (dim < 1 || dim > 64) throw Error(ErrorKind::InvalidInput, "dim must be in 1..64");
    std::mt19937_64 rng(seed);
    GeneratedPair g;
    g.family = family;
    g.seed = seed;
    switch (family) {
    case Family::Polynomial: std::tie(g.T1, g.T2) = polynomial_pair(rng, dim, false); break;
    case Family::Nilpotent: std::tie(g.T1, g.T2) = polynomial_pair(rng, dim, true); break;
    case Family::Unitary: std::tie(g.T1, g.T2) = unitary_pair(rng, dim); break;
    case Family::Block: {
        const Index k = std::max<Index>(1, dim / 2);
        auto [U1, U2] = unitary_pair(rng, k);
        auto [C1, C2] = polynomial_pair(rng, dim - k, false);
        CMatrix W = random_unitary(rng, dim);
        g.T1 = W * direct_sum(U1, C1) * W.adjoint();
        g.T2 = W * direct_sum(U2, C2) * W.adjoint();
        break;
    }
    case Family::JointEig: {
        CVector a(dim), b(dim);
        for (Index i = 0; i < dim; ++i) {
            a(i) = std::polar(uniform(rng, 0.0, 0.9), uniform(rng, 0.0, 2.0 * std::numbers::pi));
            b(i) = std::polar(uniform(rng, 0.0, 0.9), uniform(rng, 0.0, 2.0 * std::numbers::pi));
        }
        CMatrix S = random_unitary(rng, dim) * (identity(dim) + 0.2 * random_gaussian(rng, dim, dim) / std::sqrt(2.0 * dim));
        CMatrix Si = S.inverse();
        g.T1 = S * a.asDiagonal() * Si;
        g.T2 = S * b.asDiagonal() * Si;
        double m = std::max(opnorm(g.T1), opnorm(g.T2));
        if (m > 0.95) {
            g.T1 *= 0.95 / m;
            g.T2 *= 0.95 / m;
        }
        break;
    }
    }
    return g;
}

}  // namespace ando
