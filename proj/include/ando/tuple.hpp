#pragma once

#include "ando/fundamental.hpp"

#include <optional>
#include <string>

namespace ando {

enum class Orientation { Forward, Adjoint };

std::string to_string(Orientation o);

// (F, Lambda, P, U). Lambda maps coordinates of D_basis (an orthonormal basis of the defect space
// of T, or of T* for the adjoint orientation) isometrically into C^F_dim.
struct PreAndoTuple {
    Index F_dim = 0;
    CMatrix Lambda, P, U;
    Orientation orientation = Orientation::Forward;
    CMatrix D_basis;
    Index slack = 0;  // extra dimensions appended by the unitary extension
};

struct SpecialOptions {
    Index slack = 0;
    bool P_identity_on_slack = false;
    // Unitary on the complement of Ran Lambda, changing how it is paired with the complement of
    // U0 Ran Lambda.
    std::optional<CMatrix> twist;
};

// Canonical special tuple F = D_{S1} + D_{S2} for (S1, S2) = (T1, T2) or (T1*, T2*).
PreAndoTuple special_tuple(const CommutingContractivePair& pair, Orientation o, const SpecialOptions& opt = {});

// Canonical data behind special_tuple: Lambda_dagger, Lambda_R = U0 Lambda_dagger, and dims.
struct SpecialData {
    Index d1 = 0, d2 = 0, d = 0;
    CMatrix E;             // basis of the product defect space
    RVector delta;
    CMatrix Lambda;        // F x d
    CMatrix LambdaR;       // F x d
    double isometry_defect = 0;  // of Lambda before re-orthonormalisation
    double range_isometry_defect = 0;
};

SpecialData special_data(const CommutingContractivePair& pair, Orientation o);

struct RegularityReport {
    bool reg12 = false, reg21 = false;
    Index dim_DU0 = 0, dim_RU0 = 0, dim_sum = 0;
    Index intersect12 = 0;  // dim(D_{T1} cap D_{T2*})
    Index intersect21 = 0;  // dim(D_{T2} cap D_{T1*})
    bool crossCheck = true;
};

RegularityReport regularity(const CommutingContractivePair& pair);

struct TupleClassification {
    bool typeI = false, typeIPrime = false, typeII = false, strongTypeII = false;
    bool typeIIPrime = false, strongTypeIIPrime = false, stronglyMinimal = false, special = false;
    double res_typeI = 0, res_typeIPrime = 0, res_typeII = 0, res_strongTypeII = 0;
    double res_typeIIPrime = 0, res_strongTypeIIPrime = 0;
    double res_typeII_i = 0, res_typeII_ii = 0;
    double res_stronglyMinimal = 0, res_special = 0;
};

TupleClassification classify(const PreAndoTuple& t, const CommutingContractivePair& pair);

// u~ with P U Lambda D T2 + P^perp Lambda D = u~ Lambda D, from douglas_factor.
struct AlmostCanonical {
    CMatrix u;
    double residual = 0;
    double isometry_defect = 0;
};

AlmostCanonical almost_canonical(const PreAndoTuple& t, const CommutingContractivePair& pair);

PreAndoTuple noncanonical_typeII(const CMatrix& T1, const CMatrix& tau1, const CMatrix& tau2,
                                 const Tolerances& tol = {});

enum class CoincideStatus { Coincide, NotIrreducible, GramMismatch };

std::string to_string(CoincideStatus s);

struct CoincideOptions {
    int depth = 0;            // 0 means 2 * F_dim
    double accept_tol = 0;    // 0 means eq_tol
};

struct CoincideResult {
    CoincideStatus status = CoincideStatus::GramMismatch;
    std::optional<CMatrix> tau;
    Index span_dim = 0;
    double gram_residual = 0;
    double res_lambda = 0, res_P = 0, res_U = 0;
    std::string detail;

    bool ok() const { return status == CoincideStatus::Coincide; }
};

CoincideResult coincide(const PreAndoTuple& a, const PreAndoTuple& b, const Tolerances& tol = {},
                        const CoincideOptions& opt = {});

PreAndoTuple tuple_from_fund(const FundamentalPair& fp, const Tolerances& tol = {});

// Spectral flip (U* P U, U*) of the (P, U) part; Lambda and orientation are kept.
PreAndoTuple flip_tuple(const PreAndoTuple& t);

}  // namespace ando
