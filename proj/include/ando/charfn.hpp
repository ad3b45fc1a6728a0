#pragma once

#include "ando/fundamental.hpp"
#include "ando/pair.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ando {

// Theta_T(z) = (-T + z D_{T*} (I - z T*)^{-1} D_T) from D_T to D_{T*}, in the defect bases.
class CharFnEvaluator {
public:
    explicit CharFnEvaluator(const CMatrix& T, const Tolerances& tol = {});

    CMatrix operator()(cd z) const;
    Index in_dim() const { return dT_.dim(); }
    Index out_dim() const { return dTs_.dim(); }
    const Defect& defect_T() const { return dT_; }
    const Defect& defect_Tstar() const { return dTs_; }
    const CMatrix& T() const { return T_; }

private:
    CMatrix T_;
    Tolerances tol_;
    Defect dT_, dTs_;
    CMatrix right_, left_, theta0_;  // E Delta, Delta_* E_*^*, -E_*^* T E
};

CMatrix theta_eval(const CMatrix& T, cd z, const Tolerances& tol = {});

bool is_purely_contractive(const CMatrix& T, const Tolerances& tol = {});
// Same test on a given value Theta(0).
bool is_purely_contractive_theta(const CMatrix& theta0, const Tolerances& tol = {});

// n points of the Halton (2, 3) sequence mapped into the disk of radius 0.95.
std::vector<cd> halton_disk(int n = 100);

struct CharTriple {
    CMatrix T1, T2;  // the pair the triple was built from (the c.n.u. part when restricted)
    FundamentalPair G;
    AsymptoticData flats;
    bool restricted = false;
    CharFnEvaluator theta;

    CMatrix W_sharp1() const { return flats.W_flat1; }
    CMatrix W_sharp2() const { return flats.W_flat2; }
};

// strict = true raises NotCNU when a unitary part is present; otherwise the pair is restricted
// to its c.n.u. part first.
CharTriple char_triple(const CommutingContractivePair& pair, bool strict = false);

struct CharCoincidence {
    bool ok = false;
    CMatrix u, u_star;  // D_T -> D_T', D_{T*} -> D_{T'*}
    std::optional<CMatrix> rho;  // Ran Q -> Ran Q', triples only
    Index solution_dim = 0;
    double residual = 0;
    std::string stage;  // where a rejection happened

    void require() const;  // throws NoCoincidence
};

CharCoincidence coincide_charfn(const CMatrix& T, const CMatrix& Tp, const std::vector<cd>& grid,
                                const Tolerances& tol = {});
CharCoincidence coincide_triple(const CharTriple& a, const CharTriple& b, const std::vector<cd>& grid,
                                const Tolerances& tol = {});

struct FiniteNode {
    cd w;
    CMatrix S;  // orthonormal basis of a subspace of D_*
};

struct FiniteModelTriple {
    std::vector<FiniteNode> nodes;
    CMatrix G1, G2;
};

struct AdmissibilityReport {
    bool admissible = false;
    double invariance = 0;   // (ii'), worst node
    double pencil = 0;       // (iii'), worst node and order
    double contractive = 0;  // max(0, max ||G_i* + z G_j|| - 1)
};

AdmissibilityReport admissibility_finite(const FiniteModelTriple& model, const Tolerances& tol = {});

struct ScalarFactorization {
    std::vector<std::pair<cd, cd>> points;
    Index grid_points = 0;  // per coordinate, after merging the r = 0 ring
};

// Polar grid g = (k/(radial-1)) e^{2 pi i a/angular}; the eigenvalue list must contain 0.
ScalarFactorization scalar_factorization_search(const std::vector<cd>& eigs, int angular = 360, int radial = 21,
                                                const Tolerances& tol = {});

}  // namespace ando
