#pragma once

#include "ando/pair.hpp"

namespace ando {

struct FundamentalResiduals {
    double fund_ops1 = 0;   // ||T1 - T2* T - D F1 D||
    double fund_ops2 = 0;   // ||T2 - T1* T - D F2 D||
    double fund_eqns1 = 0;  // ||D T1 - F1 D - F2* D T||
    double fund_eqns2 = 0;  // ||D T2 - F2 D - F1* D T||

    double max() const;
};

// F1, F2 act on the coordinates of defect.E(), the orthonormal basis of D_T.
struct FundamentalPair {
    CMatrix F1, F2;
    Defect defect;
    CMatrix Sigma1, Sigma2;  // D F1 D and D F2 D on the ambient space
    FundamentalResiduals residuals;
    int squarings = 0;

    Index dim() const { return F1.rows(); }
};

// Sum of T*^n Y T^n with partial sums S_{k+1} = S_k + (T*)^{2^k} S_k T^{2^k}.
CMatrix stein_series(const CMatrix& T, const CMatrix& Y, const Tolerances& tol, int* squarings = nullptr);

FundamentalPair fundamental_pair(const CommutingContractivePair& pair);

// Residuals of FundOps / FundEqns for ambient operators, with F given in defect coordinates.
FundamentalResiduals fundamental_residuals(const CMatrix& T1, const CMatrix& T2, const Defect& d,
                                           const CMatrix& F1, const CMatrix& F2);

struct StrongFundReport {
    bool holds = false;
    double f1f2 = 0, f2f1 = 0;
    double sum1 = 0;  // ||F1* F1 + F2 F2* - I||
    double sum2 = 0;  // ||F1 F1* + F2* F2 - I||
};

StrongFundReport check_strong_fund(const CMatrix& F1, const CMatrix& F2, const Tolerances& tol = {});
StrongFundReport check_strong_fund(const FundamentalPair& fp, const Tolerances& tol = {});

struct ProjectionUnitary {
    CMatrix P, U;
};

// (P, U) with (F1, F2) = (P^perp U, U* P).
ProjectionUnitary pu_from_fund(const CMatrix& F1, const CMatrix& F2, const Tolerances& tol = {});
ProjectionUnitary pu_from_fund(const FundamentalPair& fp, const Tolerances& tol = {});

// Closed form (P^perp U, U* P) for the coisometric pair (V1*, V2*) of the truncated BCL2 model,
// with residuals measured on coefficients of degree <= N-1.
FundamentalPair fund_for_bcl_coisometry(const CMatrix& P, const CMatrix& U, Index N, const Tolerances& tol = {});

}  // namespace ando
