#pragma once

#include "ando/hardy.hpp"
#include "ando/pair.hpp"
#include "ando/tuple.hpp"

#include <string>
#include <vector>

namespace ando {

// A run of coordinates of K. Hardy blocks carry one coefficient vector of the given degree; fixed
// blocks (H in the Schaffer model, Ran Q in the Douglas model) have degree -1.
struct LiftBlock {
    Index offset = 0, size = 0;
    int degree = -1;
};

struct LiftReport {
    double intertwine = 0;           // max_j ||Vj* Pi - Pi Tj*|| on interior rows
    double intertwine_tail = 0;      // same on top-degree rows
    double interior_commutator = 0;  // ||V1 V2 - V2 V1|| on interior columns
    double interior_isometry = 0;    // max_j isometry defect on interior columns (W for triples)
    double product_residual = 0;     // ||V1 V2 - V|| on interior columns
    double pi_isometry = 0;          // ||Pi* Pi - I||
    double minimality = 0;
    Index burn = 2;
    // pcc axioms, filled for pseudo-commuting triples only
    double pcc_contractive = 0;  // max_j ||Wj|| - 1 on interior columns
    double pcc_commute_W = 0;    // max_j ||Wj W - W Wj|| on interior columns
    double pcc_w1 = 0;           // ||W1 - W2* W||
    double pcc_w2 = 0;           // ||W2 - W1* W||
};

struct TruncatedLift {
    std::string model;
    CMatrix Pi;
    CMatrix V1, V2, V;  // V1, V2 are 0x0 for a single lift
    Index N = 0;
    Index coeff_dim = 0;
    CMatrix coeff_range;  // orthonormal basis of the coefficients reached (Ran Lambda); c x r
    std::vector<LiftBlock> blocks;
    LiftReport report;

    bool pair_ops = true;  // false for a single isometric lift (V only)
    bool pcc = false;      // (V1, V2, V) is a pseudo-commuting triple (W1, W2, W)

    Index size() const { return Pi.rows(); }
};

// Coordinates of degree < N together with the fixed blocks, and those of degree N.
std::vector<Index> interior_coords(const TruncatedLift& lift);
std::vector<Index> top_coords(const TruncatedLift& lift);

TruncatedLift schaffer_single_lift(const CMatrix& T, Index N, const Tolerances& tol = {});
// check = false skips the tuple classification, for probing tuples that fail it.
TruncatedLift schaffer_ando_lift(const CommutingContractivePair& pair, const PreAndoTuple& tuple, Index N,
                                 bool check = true);
TruncatedLift douglas_ando_lift(const CommutingContractivePair& pair, const PreAndoTuple& tuple, Index N,
                                bool check = true);

// Compression of a Douglas Ando lift by I (x) Lambda on the Hardy part.
TruncatedLift compress_douglas_lift(const TruncatedLift& lift, const PreAndoTuple& tuple);

TruncatedLift pcc_douglas(const CommutingContractivePair& pair, Index N);
TruncatedLift pcc_schaffer(const CommutingContractivePair& pair, Index N);

// Compression of a Schaffer Ando lift by I + (I (x) Lambda).
TruncatedLift compress_schaffer_lift(const TruncatedLift& lift, const PreAndoTuple& tuple);

struct BidiskData {
    CMatrix V;       // joint eigenvectors of (T1*, T2*), unit columns
    CVector mu1, mu2;  // T_r* v_j = mu_r(j) v_j
    CMatrix Y;       // d x n, Gram factor of <D^2 v_j, v_i>
    RVector D2_eigs;
};

BidiskData bidisk_data(const CommutingContractivePair& pair);
TruncatedLift bidisk_lift(const CommutingContractivePair& pair, Index N);

// ||Ox||^2 + ||Qx||^2 - (||x||^2 - ||T*^(N+1) x||^2 + ||Qx||^2), worst case over unit x, together
// with the isometry defect of the Douglas embedding.
struct DouglasNormReport {
    double identity_residual = 0;
    double isometry_defect = 0;  // max over unit x of | ||Pi x||^2 - ||x||^2 |
};

DouglasNormReport douglas_norm_identity(const CMatrix& T, Index N, const Tolerances& tol = {});

// Distance from the target space to span{monomials of total degree <= N in the ops applied to Ran Pi}.
double minimality_defect(const TruncatedLift& lift, Index burn, Index degree = -1);

// with_minimality = false leaves report.minimality at 0 (the Krylov step dominates the cost).
LiftReport verify_lift(TruncatedLift& lift, const CommutingContractivePair& pair, Index burn = 2,
                       bool with_minimality = true);

}  // namespace ando
