#include "doctest.h"

#include "ando/charfn.hpp"
#include "ando/generate.hpp"
#include "support/oracles.hpp"

#include <numbers>

using namespace ando;

namespace {

CMatrix scalar(cd a) { return CMatrix::Constant(1, 1, a); }

CommutingContractivePair generated(std::uint64_t seed, Index dim, Family f) {
    GeneratedPair g = generate_pair(seed, dim, f);
    return validate_pair(g.T1, g.T2);
}

}  // namespace

TEST_CASE("theta of the zero operator is z times a unitary") {
    CharFnEvaluator th(CMatrix::Zero(3, 3));
    CHECK(th.in_dim() == 3);
    CHECK(th.out_dim() == 3);
    CMatrix u = th(0.5) / 0.5;
    CHECK(unitarity_defect(u) < 1e-14);
    for (cd z : halton_disk(10)) CHECK(opnorm(th(z) - z * u) < 1e-14);
    CHECK(th(0.0).norm() < 1e-15);
}

TEST_CASE("theta of a scalar is a Blaschke factor") {
    for (cd a : {cd(0.5, 0), cd(-0.2, 0.7), cd(0, -0.9)}) {
        CharFnEvaluator th(scalar(a));
        const cd c = th(0.3)(0, 0) / oracle::blaschke(a, 0.3);
        CHECK(std::abs(std::abs(c) - 1.0) < 1e-12);
        for (cd z : halton_disk(20)) CHECK(std::abs(theta_eval(scalar(a), z)(0, 0) - c * oracle::blaschke(a, z)) < 1e-12);
    }
}

TEST_CASE("theta matches the ambient formula up to the defect bases") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto pair = generated(900 + seed, 1 + seed % 5, static_cast<Family>(seed % 5));
        CharFnEvaluator th(pair.T1);
        for (cd z : halton_disk(8)) {
            CMatrix mine = th(z);
            CMatrix ambient = th.defect_Tstar().E().adjoint() * oracle::theta_ambient(pair.T1, z) * th.defect_T().E();
            CHECK(opnorm(mine - ambient) < 1e-10);
            CHECK(opnorm(mine) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("theta of a unitary is empty and the resolvent guard") {
    GeneratedPair u = generate_pair(1, 3, Family::Unitary);
    CharFnEvaluator th(u.T1);
    CMatrix v = th(0.4);
    CHECK(v.rows() == 0);
    CHECK(v.cols() == 0);

    CharFnEvaluator s(scalar(0.5));
    for (cd z : {cd(1.0, 0), cd(0, -1.0), cd(2.0, 1.0)}) {
        try {
            s(z);
            FAIL("expected ResolventSingular");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::ResolventSingular);
        }
    }
}

TEST_CASE("pure contractivity") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto pair = generated(950 + seed, 1 + seed % 4, static_cast<Family>(seed % 5));
        CHECK(is_purely_contractive(pair.T1));
    }
    CHECK(is_purely_contractive_theta(scalar(0.5)));
    CHECK_FALSE(is_purely_contractive_theta(identity(2)));
    CMatrix iso = CMatrix::Zero(2, 1);
    iso(1, 0) = cd(0, 1);
    CHECK_FALSE(is_purely_contractive_theta(iso));
}

TEST_CASE("halton_disk points are distinct and inside radius 0.95") {
    auto pts = halton_disk(100);
    CHECK(pts.size() == 100);
    for (size_t i = 0; i < pts.size(); ++i) {
        CHECK(std::abs(pts[i]) <= 0.95 + 1e-15);
        for (size_t j = 0; j < i; ++j) CHECK(std::abs(pts[i] - pts[j]) > 1e-6);
    }
}

TEST_CASE("char_triple of a scalar pair") {
    const cd a(0.4, 0.1), b(-0.3, 0.5);
    auto pair = validate_pair(scalar(a), scalar(b));
    CharTriple t = char_triple(pair, true);
    CHECK_FALSE(t.restricted);
    CHECK(t.theta.in_dim() == 1);
    CHECK(t.G.F1.rows() == 1);
    // Fundamental operators of the adjoint pair: closed form (conj(a) - b conj(ab)) / (1 - |ab|^2), etc.
    const cd p = a * b;
    const double s = 1.0 - std::norm(p);
    CHECK(std::abs(std::abs(t.G.F1(0, 0)) - std::abs((std::conj(a) - b * std::conj(p)) / s)) < 1e-12);
    CHECK(std::abs(std::abs(t.G.F2(0, 0)) - std::abs((std::conj(b) - a * std::conj(p)) / s)) < 1e-12);
    CHECK(t.flats.ranQ.dim() == 0);
}

TEST_CASE("char_triple restricts to the c.n.u. part or raises NotCNU") {
    auto pair = generated(11, 4, Family::Block);
    try {
        char_triple(pair, true);
        FAIL("expected NotCNU");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotCNU);
    }
    CharTriple t = char_triple(pair);
    CHECK(t.restricted);
    CHECK(t.T1.rows() == 2);
}

TEST_CASE("coincide_charfn examples") {
    auto grid = halton_disk(32);
    std::mt19937_64 rng(12);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto pair = generated(1000 + seed, 1 + seed % 4, static_cast<Family>(seed % 2 == 0 ? 0 : 4));
        CMatrix W = random_unitary(rng, pair.dim());
        CharCoincidence c = coincide_charfn(pair.T1, W * pair.T1 * W.adjoint(), grid);
        CHECK(c.ok);
        CHECK_NOTHROW(c.require());
        CharFnEvaluator a(pair.T1), b(W * pair.T1 * W.adjoint());
        for (cd z : grid) CHECK(opnorm(c.u_star * a(z) - b(z) * c.u) < 1e-8);
    }
    CharCoincidence no = coincide_charfn(scalar(0.5), scalar(0.3), grid);
    CHECK_FALSE(no.ok);
    CHECK_FALSE(no.stage.empty());
    try {
        no.require();
        FAIL("expected NoCoincidence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoCoincidence);
    }
}

TEST_CASE("coincide_triple examples") {
    auto grid = halton_disk(32);
    std::mt19937_64 rng(13);
    auto pair = generated(14, 3, Family::Polynomial);
    CMatrix W = random_unitary(rng, 3);
    auto conj = validate_pair(W * pair.T1 * W.adjoint(), W * pair.T2 * W.adjoint());
    CHECK(coincide_triple(char_triple(pair), char_triple(conj), grid).ok);

    // Swapping the factors keeps T = T1 T2 but exchanges the fundamental operators.
    auto swapped = validate_pair(pair.T2, pair.T1);
    CharCoincidence s = coincide_triple(char_triple(pair), char_triple(swapped), grid);
    CHECK_FALSE(s.ok);

    auto same = validate_pair(pair.T1, pair.T1);
    CHECK(coincide_triple(char_triple(same), char_triple(validate_pair(pair.T1, pair.T1)), grid).ok);
}

TEST_CASE("admissibility examples") {
    std::vector<FiniteNode> nodes{{0.0, identity(1)}, {0.5, identity(1)}};
    const cd w = std::polar(1.0, 0.9);
    FiniteModelTriple m1{nodes, scalar(w), scalar(0.0)};
    CHECK(admissibility_finite(m1).admissible);

    FiniteModelTriple m2{{{0.0, identity(1)}}, scalar(0.5), scalar(0.5)};
    AdmissibilityReport r2 = admissibility_finite(m2);
    CHECK_FALSE(r2.admissible);
    CHECK(r2.pencil == doctest::Approx(0.25));

    std::mt19937_64 rng(15);
    CMatrix U = random_unitary(rng, 3);
    CMatrix P = CMatrix::Zero(3, 3);
    P(0, 0) = 1.0;
    CMatrix Pp = identity(3) - P;
    FiniteModelTriple m3{{{0.0, identity(3)}, {cd(0.2, 0.3), identity(3)}}, U.adjoint() * Pp, P * U};
    AdmissibilityReport r3 = admissibility_finite(m3);
    CHECK(r3.admissible);
    CHECK(r3.contractive < 1e-12);

    FiniteModelTriple bad{{{1.0, identity(1)}}, scalar(0.0), scalar(0.0)};
    CHECK_THROWS_AS(admissibility_finite(bad), Error);
    FiniteModelTriple mism{{}, identity(2), identity(3)};
    CHECK_THROWS_AS(admissibility_finite(mism), Error);
}

TEST_CASE("scalar factorization search") {
    ScalarFactorization s = scalar_factorization_search({cd(0), cd(0.5)}, 72, 11);
    CHECK(s.grid_points == 1 + 10 * 72);
    REQUIRE_FALSE(s.points.empty());
    for (auto [g1, g2] : s.points) {
        const bool first = std::abs(std::abs(g1) - 1.0) < 1e-12 && std::abs(g2) < 1e-12;
        const bool second = std::abs(g1) < 1e-12 && std::abs(std::abs(g2) - 1.0) < 1e-12;
        CHECK((first || second));
    }
    CHECK(s.points.size() == 2 * 72);

    // With the single node 0 any (g, 0) and (0, g) with |g| <= 1 solves the identity.
    ScalarFactorization z = scalar_factorization_search({cd(0)}, 72, 11);
    bool interior = false;
    for (auto [g1, g2] : z.points) interior |= std::abs(g1) + std::abs(g2) < 0.99;
    CHECK(interior);

    CHECK_THROWS_AS(scalar_factorization_search({cd(0.5)}), Error);
    CHECK_THROWS_AS(scalar_factorization_search({cd(0), cd(1.0)}), Error);
    CHECK_THROWS_AS(scalar_factorization_search({cd(0), cd(0.5), cd(0.5)}), Error);
}
