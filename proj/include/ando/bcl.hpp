#pragma once

#include "ando/fundamental.hpp"
#include "ando/hardy.hpp"

namespace ando {

struct BCLTuple {
    Index F_dim = 0;
    CMatrix P, U;
    CMatrix W1, W2;  // commuting unitaries on the unitary part, 0x0 when absent

    Index unitary_dim() const { return W1.rows(); }
};

// Checks projection, unitarity and commutation of the unitary part; throws InvalidInput.
void validate_bcl(const BCLTuple& t, const Tolerances& tol = {});

enum class BCLVariant { BCL1, BCL2 };

// Operators on H^2_N(F) + H_u, shift part first.
struct BCLModel {
    CMatrix V1, V2;
    TruncatedHardy layout;
    Index unitary_dim = 0;

    Index size() const { return layout.size() + unitary_dim; }
    // Columns of M on degrees <= N-1 and on the unitary part.
    CMatrix interior_cols(const CMatrix& M) const;
};

BCLModel bcl_model(const BCLTuple& t, BCLVariant variant, Index N);

BCLTuple flip(const BCLTuple& t);

ProjectionUnitary pu_from_partial_isoms(const CMatrix& E1, const CMatrix& E2, const Tolerances& tol = {});

struct CanonicalBCL {
    BCLTuple tuple;     // F* = D_{V1*} + D_{V2*}, P* = diag(I, 0)
    CMatrix E1, E2;     // orthonormal bases of D_{V1*}, D_{V2*}
    CMatrix EV;         // orthonormal basis of D_{V*}
    CMatrix Phi_adj;    // [E1* V2*; E2*] restricted to D_{V*}, in EV coordinates
    double unitarity_defect = 0;
};

CanonicalBCL canonical_bcl_from_pair(const CMatrix& V1, const CMatrix& V2, const TruncatedHardy& layout,
                                     Index unitary_dim = 0, const Tolerances& tol = {});

struct DoublyCommutingReport {
    bool holds = false;
    double pupp = 0;        // ||P^perp U P||
    double commutator = 0;  // ||V1* V2 - V2 V1*|| on interior columns of the BCL2 model
    bool agree = true;
};

DoublyCommutingReport is_doubly_commuting(const BCLTuple& t, const Tolerances& tol = {}, Index N = 4);

struct WindowTuple {
    BCLTuple tuple;
    Index M = 0;
    double boundary_defect = 0;  // ||P^perp U P||
    double wrap_defect = 0;      // contribution of the wrap column e_M -> e_{-M}
    double interior_defect = 0;  // ||P^perp U P|| with the wrap column removed
};

// Window C^{2M+1} of l^2(Z), indices -M..M, U the cyclic shift.
WindowTuple bidisk_tuple(Index M);
WindowTuple diamond_tuple(Index M);

}  // namespace ando
