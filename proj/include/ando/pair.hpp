#pragma once

#include "ando/linalg.hpp"

namespace ando {

struct CommutingContractivePair {
    CMatrix T1, T2, T;
    Tolerances tol;

    Index dim() const { return T.rows(); }
    // The pair (T1*, T2*), whose product is T*.
    CommutingContractivePair adjoint() const;
};

CommutingContractivePair validate_pair(const CMatrix& T1, const CMatrix& T2, const Tolerances& tol = {});

struct QStar {
    CMatrix Q;
    Subspace ranQ;
    int squarings = 0;
};

// Q = (lim T^n T*^n)^{1/2} by repeated squaring.
QStar q_star(const CMatrix& T, const Tolerances& tol = {});

struct AsymptoticData {
    CMatrix Q;
    Subspace ranQ;
    CMatrix Qt;  // Q corestricted to ranQ: ranQ.basis* Q
    CMatrix W_D, W_flat1, W_flat2;
    double product_residual = 0;     // ||W_flat1 W_flat2 - W_D||
    double intertwine_residual = 0;  // max_j ||W_flatj* Qt - Qt T_j*||
};

AsymptoticData canonical_unitaries(const CommutingContractivePair& pair);

Subspace unitary_part_single(const CMatrix& T, const Tolerances& tol = {});

struct CanonicalDecomposition {
    Subspace Hu, Hc;
    CMatrix T1u, T2u, T1c, T2c;
    double reduction_residual = 0;  // largest off-diagonal block norm
    double unitary_defect = 0;      // T1u T2u against the unitary group
    Index cnu_unitary_dim = 0;      // dim of unitary_part_single(T1c T2c)
};

CanonicalDecomposition canonical_decomposition_pair(const CommutingContractivePair& pair);

}  // namespace ando
