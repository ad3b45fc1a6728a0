#include "doctest.h"

#include "ando/generate.hpp"
#include "ando/lift.hpp"

using namespace ando;

namespace {

CMatrix scalar(cd a) { return CMatrix::Constant(1, 1, a); }

CMatrix power(const CMatrix& A, Index k) {
    CMatrix P = identity(A.rows());
    for (Index i = 0; i < k; ++i) P = P * A;
    return P;
}

CommutingContractivePair generated(std::uint64_t seed, Index dim, Family f) {
    GeneratedPair g = generate_pair(seed, dim, f);
    return validate_pair(g.T1, g.T2);
}

// Pi* V1^a V2^b Pi = T1^a T2^b while the words stay inside the truncation.
double dilation_gap(const TruncatedLift& l, const CommutingContractivePair& pair, Index max_degree) {
    double gap = 0;
    for (Index a = 0; a <= max_degree; ++a)
        for (Index b = 0; a + b <= max_degree; ++b) {
            CMatrix lhs = l.Pi.adjoint() * power(l.V1, a) * power(l.V2, b) * l.Pi;
            gap = std::max(gap, opnorm(lhs - power(pair.T1, a) * power(pair.T2, b)));
        }
    return gap;
}

}  // namespace

TEST_CASE("schaffer_single_lift examples") {
    TruncatedLift z = schaffer_single_lift(scalar(0.0), 3);
    CHECK(z.size() == 5);
    CHECK(z.V.rows() == 5);
    // T = 0: V sends h to the constant h and shifts the Hardy part.
    CHECK(std::abs(std::abs(z.V(1, 0)) - 1.0) < 1e-15);

    GeneratedPair u = generate_pair(2, 3, Family::Unitary);
    TruncatedLift lu = schaffer_single_lift(u.T1, 4);
    CHECK(lu.coeff_dim == 0);
    CHECK(lu.size() == 3);
    CHECK(opnorm(lu.V - u.T1) < 1e-14);
    CHECK_THROWS_AS(schaffer_single_lift(scalar(0.5), 0), Error);
}

TEST_CASE("schaffer_single_lift is an isometric dilation") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto pair = generated(100 + seed, 1 + seed % 4, static_cast<Family>(seed % 5));
        const CMatrix& T = pair.T1;
        TruncatedLift l = schaffer_single_lift(T, 8);
        LiftReport rep = verify_lift(l, validate_pair(T, identity(T.rows())), 2, false);
        CHECK(rep.intertwine < 1e-12);
        CHECK(rep.interior_isometry < 1e-12);
        CHECK(rep.pi_isometry < 1e-12);
        for (Index k = 0; k <= 7; ++k) CHECK(opnorm(l.Pi.adjoint() * power(l.V, k) * l.Pi - power(T, k)) < 1e-12);
    }
}

TEST_CASE("schaffer single lift of a nilpotent is minimal after burn-in") {
    CMatrix J = CMatrix::Zero(3, 3);
    J(0, 1) = J(1, 2) = 0.8;
    TruncatedLift l = schaffer_single_lift(J, 6);
    CHECK(minimality_defect(l, 1) < 1e-10);
    CHECK(minimality_defect(l, 3) < 1e-10);
}

TEST_CASE("schaffer_ando_lift of special forward tuples") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto pair = generated(200 + seed, 1 + seed % 4, static_cast<Family>(seed % 5));
        PreAndoTuple t = special_tuple(pair, Orientation::Forward);
        TruncatedLift l = schaffer_ando_lift(pair, t, 8);
        LiftReport rep = verify_lift(l, pair, 2, false);
        CHECK(rep.intertwine < 1e-12);
        CHECK(rep.interior_commutator < 1e-12);
        CHECK(rep.interior_isometry < 1e-12);
        CHECK(rep.product_residual < 1e-12);
        CHECK(rep.pi_isometry < 1e-12);
        CHECK(dilation_gap(l, pair, 4) < 1e-11);
    }
}

TEST_CASE("schaffer_ando_lift errors and unchecked probing") {
    GeneratedPair u = generate_pair(3, 2, Family::Unitary);
    auto up = validate_pair(u.T1, u.T2);
    TruncatedLift lu = schaffer_ando_lift(up, special_tuple(up, Orientation::Forward), 3);
    CHECK(lu.size() == 2);
    CHECK(opnorm(lu.V1 - u.T1) < 1e-12);

    CMatrix T1 = CMatrix::Zero(3, 3);
    T1(0, 1) = T1(1, 2) = 0.6;
    auto pair = validate_pair(T1, T1);
    const Index k = defect(T1).dim();
    std::mt19937_64 rng(4);
    PreAndoTuple bad = noncanonical_typeII(T1, random_unitary(rng, k), random_unitary(rng, k));
    CHECK_THROWS_AS(schaffer_ando_lift(pair, bad, 4), Error);
    try {
        schaffer_ando_lift(pair, bad, 4);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotStrongTypeII);
    }

    auto p2 = generated(5, 3, Family::Polynomial);
    PreAndoTuple t = special_tuple(p2, Orientation::Forward);
    t.U = t.U * polar_unitary(identity(t.F_dim) + 0.05 * random_gaussian(rng, t.F_dim, t.F_dim));
    TruncatedLift probe = schaffer_ando_lift(p2, t, 6, false);
    LiftReport rep = verify_lift(probe, p2, 2, false);
    CHECK(std::max(rep.intertwine, rep.interior_commutator) > 1e-6);

    PreAndoTuple adj = special_tuple(p2, Orientation::Adjoint);
    CHECK_THROWS_AS(schaffer_ando_lift(p2, adj, 4), Error);
}

TEST_CASE("douglas_ando_lift of special adjoint tuples") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto pair = generated(300 + seed, 1 + seed % 4, static_cast<Family>(seed % 5));
        PreAndoTuple t = special_tuple(pair, Orientation::Adjoint);
        TruncatedLift l = douglas_ando_lift(pair, t, 10);
        LiftReport rep = verify_lift(l, pair, 2, false);
        CHECK(rep.intertwine < 1e-12);
        CHECK(rep.interior_commutator < 1e-12);
        CHECK(rep.interior_isometry < 1e-12);
        CHECK(rep.product_residual < 1e-12);
    }
}

TEST_CASE("douglas_ando_lift of a nilpotent pair has isometric Pi") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto pair = generated(400 + seed, 1 + seed % 4, Family::Nilpotent);
        TruncatedLift l = douglas_ando_lift(pair, special_tuple(pair, Orientation::Adjoint), 8);
        LiftReport rep = verify_lift(l, pair, 2, false);
        CHECK(rep.pi_isometry < 1e-12);
        CHECK(dilation_gap(l, pair, 3) < 1e-11);
    }
}

TEST_CASE("douglas_ando_lift of a unitary pair lives on Ran Q") {
    auto pair = generated(6, 3, Family::Unitary);
    TruncatedLift l = douglas_ando_lift(pair, special_tuple(pair, Orientation::Adjoint), 4);
    CHECK(l.coeff_dim == 0);
    CHECK(l.size() == 3);
    LiftReport rep = verify_lift(l, pair);
    CHECK(rep.pi_isometry < 1e-12);
    CHECK(rep.intertwine < 1e-12);
}

TEST_CASE("douglas_ando_lift rejects tuples that are not Type I") {
    auto pair = generated(7, 3, Family::Polynomial);
    PreAndoTuple t = special_tuple(pair, Orientation::Adjoint);
    std::mt19937_64 rng(8);
    t.U = t.U * polar_unitary(identity(t.F_dim) + 0.1 * random_gaussian(rng, t.F_dim, t.F_dim));
    try {
        douglas_ando_lift(pair, t, 4);
        FAIL("expected NotTypeI");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotTypeI);
    }
    CHECK_NOTHROW(douglas_ando_lift(pair, t, 4, false));
}

TEST_CASE("pcc triples: axioms and agreement with compressed Ando lifts") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto pair = generated(500 + seed, 1 + seed % 4, static_cast<Family>(seed % 5));
        for (bool douglas : {true, false}) {
            TruncatedLift p = douglas ? pcc_douglas(pair, 10) : pcc_schaffer(pair, 10);
            LiftReport rep = verify_lift(p, pair, 2, false);
            CHECK(rep.pcc_contractive < 1e-12);
            CHECK(rep.pcc_commute_W < 1e-12);
            CHECK(rep.pcc_w1 < 1e-12);
            CHECK(rep.pcc_w2 < 1e-12);
            CHECK(rep.interior_isometry < 1e-12);
            CHECK(rep.intertwine < 1e-12);
        }
        PreAndoTuple ta = special_tuple(pair, Orientation::Adjoint);
        TruncatedLift cd_ = compress_douglas_lift(douglas_ando_lift(pair, ta, 10), ta);
        TruncatedLift pd = pcc_douglas(pair, 10);
        CHECK(opnorm(cd_.V1 - pd.V1) < 1e-10);
        CHECK(opnorm(cd_.V2 - pd.V2) < 1e-10);
        PreAndoTuple tf = special_tuple(pair, Orientation::Forward);
        TruncatedLift cs = compress_schaffer_lift(schaffer_ando_lift(pair, tf, 10), tf);
        TruncatedLift ps = pcc_schaffer(pair, 10);
        CHECK(opnorm(cs.V1 - ps.V1) < 1e-10);
        CHECK(opnorm(cs.V2 - ps.V2) < 1e-10);
    }
}

TEST_CASE("pcc triple of a scalar pair") {
    auto pair = validate_pair(scalar(cd(0.5, 0.2)), scalar(cd(-0.3, 0.6)));
    TruncatedLift p = pcc_schaffer(pair, 6);
    CHECK(p.coeff_dim == 1);
    LiftReport rep = verify_lift(p, pair, 2, false);
    CHECK(rep.pcc_w1 < 1e-12);
    CHECK(rep.pcc_w2 < 1e-12);
    // Pi* W1 Pi = T1.
    CHECK(std::abs((p.Pi.adjoint() * p.V1 * p.Pi)(0, 0) - cd(0.5, 0.2)) < 1e-12);
}

TEST_CASE("bidisk lift examples") {
    auto zero = validate_pair(CMatrix::Zero(2, 2), CMatrix::Zero(2, 2));
    TruncatedLift z = bidisk_lift(zero, 3);
    LiftReport rz = verify_lift(z, zero, 2, false);
    CHECK(z.coeff_dim == 2);
    CHECK(rz.pi_isometry < 1e-14);
    CHECK(rz.intertwine < 1e-14);

    CVector a(2), b(2);
    a << 0.5, cd(0, 0.3);
    b << cd(-0.2, 0.1), 0.4;
    auto diag = validate_pair(CMatrix(a.asDiagonal()), CMatrix(b.asDiagonal()));
    TruncatedLift l = bidisk_lift(diag, 24);
    LiftReport r = verify_lift(l, diag, 2, false);
    CHECK(r.intertwine < 1e-12);
    CHECK(r.interior_commutator < 1e-12);
    CHECK(r.interior_isometry < 1e-12);
    CHECK(r.pi_isometry < 1e-9);

}

TEST_CASE("bidisk lift errors") {
    // Diagonalizable through a skewed basis: 1 - T1T1* - T2T2* + T1T2T2*T1* is indefinite.
    CMatrix S(2, 2);
    S << 1.0, 1.0, 0.0, 1.0;
    CMatrix D1 = CVector::Constant(2, 0.7).asDiagonal(), D2 = D1;
    D1(1, 1) = -0.7;
    D2(1, 1) = 0.35;
    CMatrix T1 = S * D1 * S.inverse(), T2 = S * D2 * S.inverse();
    const double m = std::max(opnorm(T1), opnorm(T2));
    auto pair = validate_pair(T1 * (0.99 / m), T2 * (0.99 / m));
    try {
        bidisk_lift(pair, 3);
        FAIL("expected DefectNotPSD");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DefectNotPSD);
    }

    CMatrix J = CMatrix::Zero(2, 2);
    J(0, 1) = 0.5;
    try {
        bidisk_lift(validate_pair(J, J), 3);
        FAIL("expected NotJointlyDiagonalizable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotJointlyDiagonalizable);
    }
    CHECK_THROWS_AS(bidisk_lift(validate_pair(CMatrix::Zero(1, 1), CMatrix::Zero(1, 1)), 0), Error);
}

TEST_CASE("Douglas norm identity") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
        auto pair = generated(600 + seed, 1 + seed % 4, static_cast<Family>(seed % 5));
        DouglasNormReport r = douglas_norm_identity(pair.T, 12);
        CHECK(r.identity_residual < 1e-12);
    }
    CMatrix J = CMatrix::Zero(3, 3);
    J(0, 1) = J(1, 2) = 0.9;
    CHECK(douglas_norm_identity(J, 4).isometry_defect < 1e-12);
    DouglasNormReport slow4 = douglas_norm_identity(scalar(0.8), 4);
    DouglasNormReport slow40 = douglas_norm_identity(scalar(0.8), 40);
    CHECK(slow40.isometry_defect < slow4.isometry_defect);
    CHECK(slow4.isometry_defect == doctest::Approx(std::pow(0.64, 5)).epsilon(1e-9));
}
