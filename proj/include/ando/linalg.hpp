#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ando {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

enum class ErrorKind {
    NotHermitian,
    NotPSD,
    NotContraction,
    MajorizationFails,
    DimensionMismatch,
    NotCommuting,
    NoConvergence,
    IsometryDefect,
    ReductionFails,
    ResidualTooLarge,
    StrongFundFails,
    CriterionMismatch,
    OrientationMismatch,
    NotIsometry,
    RelationsFail,
    NotIsometricInterior,
    WindowTooSmall,
    NotStrongTypeII,
    NotTypeI,
    DefectNotPSD,
    NotJointlyDiagonalizable,
    ResolventSingular,
    NotCNU,
    NoCoincidence,
    InvalidInput,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct Tolerances {
    double rank_tol = 1e-10;
    double eq_tol = 1e-9;
    double conv_tol = 1e-12;
    double psd_tol = 1e-10;

    // Throws InvalidInput unless every field is positive and rank_tol >= machine epsilon.
    void validate() const;
    // Defaults with eq_tol taken from ANDO_LIFT_TOL when that variable is set.
    static Tolerances from_env();
};

// Orthonormal column basis of a subspace of C^ambient_dim.
struct Subspace {
    Index ambient_dim = 0;
    CMatrix basis;

    Index dim() const { return basis.cols(); }
    CMatrix projector() const;

    static Subspace zero(Index n);
    static Subspace full(Index n);
};

double opnorm(const CMatrix& A);
bool all_finite(const CMatrix& A);
CMatrix identity(Index n);

CMatrix psd_sqrt(const CMatrix& A, const Tolerances& tol = {});

// D = E diag(delta) E*, with E an orthonormal basis of the closure of Ran D.
struct Defect {
    CMatrix D;
    Subspace space;
    RVector delta;

    const CMatrix& E() const { return space.basis; }
    Index dim() const { return space.dim(); }
};

Defect defect(const CMatrix& T, const Tolerances& tol = {});

CMatrix douglas_factor(const CMatrix& A, const CMatrix& B, const Tolerances& tol = {});

// Unitary U on C^(ambient + slack') with U d = V0 d for d in dom. The complements dom^perp and
// (V0 dom)^perp get Gram-Schmidt bases from the canonical vectors in index order and are paired
// index to index, after applying twist (a unitary on the complement coordinates) when given.
CMatrix unitary_extension(const CMatrix& V0, const Subspace& dom, const Subspace& ran,
                          Index slack = 0, const Tolerances& tol = {},
                          const CMatrix* twist = nullptr);

// Rank-revealing helpers. Singular values <= cutoff count as zero.
Subspace range_space(const CMatrix& A, double cutoff);
Subspace null_space(const CMatrix& A, double cutoff);
Subspace complement(const Subspace& S);
Subspace intersect(const Subspace& A, const Subspace& B, double cutoff);
// Gram-Schmidt of (I - P_S) e_i for i in index order, returning dim(S^perp) columns.
CMatrix canonical_complement_basis(const Subspace& S, double cutoff = 1e-8);

CMatrix pinv(const CMatrix& A, double cutoff);
CMatrix polar_unitary(const CMatrix& A);
Index numerical_rank(const CMatrix& A, double cutoff);

double unitarity_defect(const CMatrix& U);
double isometry_defect(const CMatrix& V);
double projection_defect(const CMatrix& P);

// Block-diagonal sum.
CMatrix direct_sum(const CMatrix& A, const CMatrix& B);

}  // namespace ando
