#include "doctest.h"

#include "ando/generate.hpp"
#include "ando/linalg.hpp"
#include "support/oracles.hpp"

#include <cstdlib>

using namespace ando;

namespace {

CMatrix diag(std::initializer_list<cd> d) {
    CVector v(static_cast<Index>(d.size()));
    Index i = 0;
    for (cd x : d) v(i++) = x;
    return v.asDiagonal();
}

}  // namespace

TEST_CASE("psd_sqrt of identity, zero and a rotated diagonal") {
    CHECK(opnorm(psd_sqrt(identity(3)) - identity(3)) < 1e-14);
    CHECK(psd_sqrt(CMatrix::Zero(3, 3)).norm() < 1e-14);

    std::mt19937_64 rng(11);
    CMatrix Q = random_unitary(rng, 3);
    CMatrix A = Q * diag({4, 1, 0}) * Q.adjoint();
    CMatrix B = psd_sqrt(A);
    CHECK(opnorm(B - Q * diag({2, 1, 0}) * Q.adjoint()) < 1e-12);
    CHECK(opnorm(B * B - A) < 1e-12);
    CHECK(opnorm(B - B.adjoint()) < 1e-14);
}

TEST_CASE("psd_sqrt rejects non-Hermitian and indefinite input") {
    CMatrix A = identity(2);
    A(0, 1) = 1.0;
    try {
        psd_sqrt(A);
        FAIL("expected NotHermitian");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotHermitian);
    }
    try {
        psd_sqrt(diag({1, -1e-3}));
        FAIL("expected NotPSD");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotPSD);
    }
    // Rounding-level negatives are clipped.
    CHECK(opnorm(psd_sqrt(diag({1, -1e-12})) - diag({1, 0})) < 1e-14);
}

TEST_CASE("defect of unitary, zero and scalar contractions") {
    std::mt19937_64 rng(12);
    Defect u = defect(random_unitary(rng, 4));
    CHECK(u.dim() == 0);
    CHECK(u.D.norm() < 1e-7);

    Defect z = defect(CMatrix::Zero(3, 3));
    CHECK(z.dim() == 3);
    CHECK(opnorm(z.D - identity(3)) < 1e-14);

    Defect s = defect(CMatrix::Constant(1, 1, 0.6));
    CHECK(s.dim() == 1);
    CHECK(std::abs(s.D(0, 0) - 0.8) < 1e-14);
    CHECK(std::abs(s.delta(0) - 0.8) < 1e-14);
}

TEST_CASE("defect rejects non-contractions") {
    try {
        defect(CMatrix::Constant(1, 1, 1.1));
        FAIL("expected NotContraction");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotContraction);
    }
}

TEST_CASE("defect squares to I - T*T and its space is the closure of the range") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        GeneratedPair g = generate_pair(seed, 1 + seed % 6, static_cast<Family>(seed % 5));
        Defect d = defect(g.T1);
        const Index n = g.T1.rows();
        CHECK(opnorm(d.D * d.D - (identity(n) - g.T1.adjoint() * g.T1)) < 1e-9);
        CHECK(isometry_defect(d.E()) < 1e-12);
        // Directions cut at rank_tol carry at most sqrt(rank_tol) of D.
        CMatrix trunc = d.E() * d.delta.cast<cd>().asDiagonal() * d.E().adjoint();
        CHECK(opnorm(d.D - trunc) <= std::sqrt(Tolerances{}.rank_tol) + 1e-12);
    }
}

TEST_CASE("douglas_factor examples") {
    CMatrix B = diag({1, 0.5});
    CHECK(opnorm(douglas_factor(B, B) - identity(2)) < 1e-14);
    CHECK(douglas_factor(CMatrix::Zero(2, 2), B).norm() < 1e-14);
    CMatrix C = douglas_factor(diag({0.5, 0.25}), B);
    CHECK(opnorm(C - diag({0.5, 0.5})) < 1e-14);
    CHECK(opnorm(C) <= 1 + 1e-12);
    CHECK(opnorm(B * C - diag({0.5, 0.25})) < 1e-14);
}

TEST_CASE("douglas_factor reports failed majorization") {
    try {
        douglas_factor(diag({1, 1}), diag({1, 0.5}));
        FAIL("expected MajorizationFails");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MajorizationFails);
    }
}

TEST_CASE("douglas_factor on random majorized pairs") {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 10; ++k) {
        CMatrix B = random_gaussian(rng, 4, 4);
        CMatrix K = random_gaussian(rng, 4, 3);
        K /= 1.01 * opnorm(K);
        CMatrix A = B * K;
        CMatrix C = douglas_factor(A, B);
        CHECK(opnorm(B * C - A) < 1e-10);
        CHECK(opnorm(C) <= 1 + 1e-10);
    }
}

TEST_CASE("unitary_extension examples") {
    std::mt19937_64 rng(14);
    CMatrix V0 = random_unitary(rng, 3);
    CHECK(opnorm(unitary_extension(V0, Subspace::full(3), Subspace::full(3)) - V0) < 1e-12);

    CMatrix e1 = CMatrix::Zero(2, 1), e2 = CMatrix::Zero(2, 1);
    e1(0, 0) = 1.0;
    e2(1, 0) = 1.0;
    CMatrix W = e2 * e1.adjoint();
    CMatrix U = unitary_extension(W, Subspace{2, e1}, Subspace{2, e2});
    CMatrix swap = CMatrix::Zero(2, 2);
    swap(0, 1) = swap(1, 0) = 1.0;
    CHECK(opnorm(U - swap) < 1e-14);

    CHECK(opnorm(unitary_extension(CMatrix::Zero(2, 2), Subspace::zero(2), Subspace::zero(2)) - identity(2)) < 1e-14);
}

TEST_CASE("unitary_extension extends and stays unitary with slack") {
    std::mt19937_64 rng(15);
    for (Index n = 2; n <= 5; ++n) {
        CMatrix Q = random_unitary(rng, n);
        Subspace dom{n, random_unitary(rng, n).leftCols(n / 2)};
        CMatrix U = unitary_extension(Q, dom, Subspace{n, Q * dom.basis}, 2);
        CHECK(U.rows() == n + 2);
        CHECK(unitarity_defect(U) < 1e-12);
        CHECK(opnorm(U.topLeftCorner(n, n) * dom.basis - Q * dom.basis) < 1e-12);
        CHECK(opnorm(U.bottomLeftCorner(2, n) * dom.basis) < 1e-12);
    }
}

TEST_CASE("unitary_extension rejects mismatched complements") {
    try {
        CMatrix e1 = CMatrix::Zero(2, 1);
        e1(0, 0) = 1.0;
        unitary_extension(identity(2), Subspace{2, e1}, Subspace::full(2));
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
}

TEST_CASE("subspace helpers") {
    std::mt19937_64 rng(16);
    CMatrix A = random_gaussian(rng, 5, 2) * random_gaussian(rng, 2, 4);
    Subspace r = range_space(A, 1e-10);
    Subspace k = null_space(A, 1e-10);
    CHECK(r.dim() == 2);
    CHECK(k.dim() == 2);
    CHECK((A * k.basis).norm() < 1e-10);
    CHECK(opnorm(r.projector() * A - A) < 1e-10);
    Subspace c = complement(r);
    CHECK(c.dim() == 3);
    CHECK((c.basis.adjoint() * r.basis).norm() < 1e-12);
    CHECK(intersect(r, c, 1e-8).dim() == 0);
    CHECK(intersect(r, Subspace::full(5), 1e-8).dim() == 2);
    CHECK(numerical_rank(A, 1e-10) == oracle::joint_rank(A, CMatrix(5, 0), 1e-10));
}

TEST_CASE("polar_unitary and pinv") {
    std::mt19937_64 rng(17);
    CMatrix A = random_gaussian(rng, 4, 4);
    CMatrix U = polar_unitary(A);
    CHECK(unitarity_defect(U) < 1e-12);
    CMatrix H = U.adjoint() * A;
    CHECK(opnorm(H - H.adjoint()) < 1e-10);
    CHECK(opnorm(pinv(A, 1e-12) * A - identity(4)) < 1e-9);
}

TEST_CASE("tolerances validate and read ANDO_LIFT_TOL") {
    Tolerances t;
    CHECK_NOTHROW(t.validate());
    t.rank_tol = 0;
    CHECK_THROWS_AS(t.validate(), Error);
    setenv("ANDO_LIFT_TOL", "1e-7", 1);
    CHECK(Tolerances::from_env().eq_tol == doctest::Approx(1e-7));
    unsetenv("ANDO_LIFT_TOL");
    CHECK(Tolerances::from_env().eq_tol == doctest::Approx(1e-9));
}
