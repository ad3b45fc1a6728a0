#include "doctest.h"

#include "ando/bcl.hpp"
#include "ando/generate.hpp"
#include "support/oracles.hpp"

using namespace ando;

namespace {

CMatrix scalar(cd a) { return CMatrix::Constant(1, 1, a); }

BCLTuple random_bcl(std::mt19937_64& rng, Index F) {
    BCLTuple t;
    t.F_dim = F;
    t.U = random_unitary(rng, F);
    const Index r = std::uniform_int_distribution<Index>(0, F)(rng);
    CMatrix V = random_unitary(rng, F).leftCols(r);
    t.P = V * V.adjoint();
    return t;
}

BCLTuple swap_tuple() {
    BCLTuple t;
    t.F_dim = 2;
    t.P = CMatrix::Zero(2, 2);
    t.P(0, 0) = 1.0;
    t.U = CMatrix::Zero(2, 2);
    t.U(0, 1) = t.U(1, 0) = 1.0;
    return t;
}

}  // namespace

TEST_CASE("bcl_model with P = 0 and P = I") {
    std::mt19937_64 rng(1);
    const Index N = 4;
    BCLTuple t;
    t.F_dim = 2;
    t.U = random_unitary(rng, 2);
    t.P = CMatrix::Zero(2, 2);
    BCLModel m = bcl_model(t, BCLVariant::BCL2, N);
    CHECK(opnorm(m.V1 - blockwise(t.U.adjoint(), N)) < 1e-14);
    CHECK(opnorm(m.V2 - shift(2, N) * blockwise(t.U, N)) < 1e-14);

    t.P = identity(2);
    m = bcl_model(t, BCLVariant::BCL2, N);
    CHECK(opnorm(m.V1 - shift(2, N) * blockwise(t.U.adjoint(), N)) < 1e-14);
    CHECK(opnorm(m.V2 - blockwise(t.U, N)) < 1e-14);

    CHECK_THROWS_AS(bcl_model(t, BCLVariant::BCL2, 0), Error);
}

TEST_CASE("BCL models are commuting isometries with product the shift") {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        BCLTuple t = random_bcl(rng, 1 + trial % 4);
        if (trial % 3 == 0) {
            CVector a(2), b(2);
            a << std::polar(1.0, 0.4 * trial), std::polar(1.0, -1.1);
            b << std::polar(1.0, 2.0), std::polar(1.0, 0.1 * trial);
            CMatrix W = random_unitary(rng, 2);
            t.W1 = W * a.asDiagonal() * W.adjoint();
            t.W2 = W * b.asDiagonal() * W.adjoint();
        }
        validate_bcl(t);
        for (BCLVariant v : {BCLVariant::BCL1, BCLVariant::BCL2}) {
            BCLModel m = bcl_model(t, v, 5);
            CHECK(isometry_defect(m.interior_cols(m.V1)) < 1e-12);
            CHECK(isometry_defect(m.interior_cols(m.V2)) < 1e-12);
            CHECK(opnorm(m.interior_cols(m.V1 * m.V2 - m.V2 * m.V1)) < 1e-12);
            CMatrix Mz = direct_sum(shift(t.F_dim, 5), t.W1 * t.W2);
            CHECK(opnorm(m.interior_cols(m.V1 * m.V2 - Mz)) < 1e-12);
        }
    }
}

TEST_CASE("validate_bcl rejects bad data") {
    BCLTuple t = swap_tuple();
    t.P(0, 1) = 0.3;
    CHECK_THROWS_AS(validate_bcl(t), Error);
    t = swap_tuple();
    t.U *= 1.1;
    CHECK_THROWS_AS(validate_bcl(t), Error);
    t = swap_tuple();
    t.W1 = CMatrix::Zero(2, 2);
    t.W1(0, 1) = t.W1(1, 0) = 1.0;
    t.W2 = identity(2);
    t.W2(0, 0) = -1.0;
    CHECK_THROWS_AS(validate_bcl(t), Error);
}

TEST_CASE("flip examples and BCL1(t) = BCL2(flip(t))") {
    std::mt19937_64 rng(3);
    BCLTuple z;
    z.F_dim = 2;
    z.P = CMatrix::Zero(2, 2);
    z.U = random_unitary(rng, 2);
    BCLTuple fz = flip(z);
    CHECK(fz.P.norm() < 1e-15);
    CHECK(opnorm(fz.U - z.U.adjoint()) < 1e-15);

    for (int trial = 0; trial < 20; ++trial) {
        BCLTuple t = random_bcl(rng, 1 + trial % 4);
        BCLModel a = bcl_model(t, BCLVariant::BCL1, 4);
        BCLModel b = bcl_model(flip(t), BCLVariant::BCL2, 4);
        CHECK(opnorm(a.V1 - b.V1) < 1e-12);
        CHECK(opnorm(a.V2 - b.V2) < 1e-12);
        BCLTuple ff = flip(flip(t));
        CHECK(opnorm(ff.P - t.P) < 1e-12);
        CHECK(opnorm(ff.U - t.U) < 1e-12);
    }
}

TEST_CASE("pu_from_partial_isoms examples") {
    BCLTuple s = swap_tuple();
    CMatrix Pp = identity(2) - s.P;
    ProjectionUnitary pu = pu_from_partial_isoms(s.U.adjoint() * Pp, s.P * s.U);
    CHECK(opnorm(pu.P - s.P) < 1e-14);
    CHECK(opnorm(pu.U - s.U) < 1e-14);

    // Input pair with E1 E2 != 0.
    CMatrix E1 = CMatrix::Zero(2, 2), E2 = CMatrix::Zero(2, 2);
    E1(1, 0) = 1.0;
    E2(0, 1) = 1.0;
    CHECK_THROWS_AS(pu_from_partial_isoms(E1, E2), Error);
    try {
        pu_from_partial_isoms(E1, E2);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RelationsFail);
    }

    ProjectionUnitary e = pu_from_partial_isoms(CMatrix(0, 0), CMatrix(0, 0));
    CHECK(e.P.size() == 0);
    CHECK_THROWS_AS(pu_from_partial_isoms(identity(2), identity(3)), Error);
}

TEST_CASE("pu_from_partial_isoms inverts (P, U) -> (U* P^perp, P U)") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 30; ++trial) {
        BCLTuple t = random_bcl(rng, 1 + trial % 5);
        CMatrix Pp = identity(t.F_dim) - t.P;
        ProjectionUnitary pu = pu_from_partial_isoms(t.U.adjoint() * Pp, t.P * t.U);
        CHECK(opnorm(pu.P - t.P) < 1e-10);
        CHECK(opnorm(pu.U - t.U) < 1e-10);
    }
}

TEST_CASE("canonical_bcl_from_pair examples") {
    const Index N = 5;
    const cd w = std::polar(1.0, 0.7);
    CanonicalBCL c = canonical_bcl_from_pair(shift(1, N), blockwise(scalar(w), N), {1, N});
    REQUIRE(c.tuple.F_dim == 1);
    CHECK(std::abs(c.tuple.P(0, 0) - 1.0) < 1e-10);
    CHECK(std::abs(c.tuple.U(0, 0) - w) < 1e-10);

    std::mt19937_64 rng(5);
    GeneratedPair g = generate_pair(6, 3, Family::Unitary);
    CanonicalBCL u = canonical_bcl_from_pair(g.T1, g.T2, {0, N}, 3);
    CHECK(u.tuple.F_dim == 0);

    CHECK_THROWS_AS(canonical_bcl_from_pair(shift(1, N) * 0.5, shift(1, N), {1, N}), Error);
    CHECK_THROWS_AS(canonical_bcl_from_pair(shift(1, N), shift(1, N), {2, N}), Error);
}

TEST_CASE("canonical_bcl_from_pair recovers the tuple up to unitary equivalence") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        BCLTuple t = random_bcl(rng, 1 + trial % 4);
        BCLModel m = bcl_model(t, BCLVariant::BCL2, 6);
        CanonicalBCL c = canonical_bcl_from_pair(m.V1, m.V2, m.layout);
        REQUIRE(c.tuple.F_dim == t.F_dim);
        CHECK(c.unitarity_defect < 1e-9);
        CHECK(std::abs(c.tuple.P.trace() - t.P.trace()) < 1e-9);
        CHECK(isometry_defect(c.Phi_adj) < 1e-9);
        auto ev_a = oracle::sorted_eigenvalues(c.tuple.U), ev_b = oracle::sorted_eigenvalues(t.U);
        for (size_t k = 0; k < ev_a.size(); ++k) CHECK(std::abs(ev_a[k] - ev_b[k]) < 1e-8);
        // The recovered model acts like the original one.
        BCLModel r = bcl_model(c.tuple, BCLVariant::BCL2, 6);
        CHECK(std::abs(r.V1.trace() - m.V1.trace()) < 1e-8);
        CHECK(std::abs(r.V2.trace() - m.V2.trace()) < 1e-8);
    }
}

TEST_CASE("doubly commuting examples") {
    std::mt19937_64 rng(8);
    BCLTuple t;
    t.F_dim = 3;
    t.U = random_unitary(rng, 3);
    t.P = CMatrix::Zero(3, 3);
    DoublyCommutingReport r0 = is_doubly_commuting(t);
    CHECK(r0.holds);
    CHECK(r0.agree);
    t.P = identity(3);
    CHECK(is_doubly_commuting(t).holds);

    DoublyCommutingReport s = is_doubly_commuting(swap_tuple());
    CHECK_FALSE(s.holds);
    CHECK(s.agree);
    CHECK(s.pupp == doctest::Approx(1.0));

    for (int trial = 0; trial < 20; ++trial) {
        BCLTuple b = random_bcl(rng, 2 + trial % 3);
        CHECK(is_doubly_commuting(b).agree);
    }
}

TEST_CASE("bidisk and diamond windows") {
    for (Index M : {2, 3, 6}) {
        WindowTuple b = bidisk_tuple(M);
        CHECK(b.tuple.F_dim == 2 * M + 1);
        CHECK(b.interior_defect < 1e-15);
        CHECK(b.wrap_defect == doctest::Approx(1.0));
        WindowTuple d = diamond_tuple(M);
        CHECK(d.interior_defect >= 1.0 - 1e-12);
        validate_bcl(b.tuple);
        validate_bcl(d.tuple);
    }
    CHECK_THROWS_AS(bidisk_tuple(1), Error);
    try {
        diamond_tuple(0);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::WindowTooSmall);
    }
}
