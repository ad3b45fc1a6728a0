#pragma once

#include "ando/linalg.hpp"

namespace ando {

// H^2_N(C^c): coefficient stacks of degrees 0..N, ascending.
struct TruncatedHardy {
    Index coeff_dim = 0;
    Index N = 0;

    Index size() const { return (N + 1) * coeff_dim; }
    Index offset(Index degree) const { return degree * coeff_dim; }
    // Number of leading coordinates holding degrees <= N-1.
    Index interior() const { return N * coeff_dim; }
};

// M_{A + zB}: A on the diagonal blocks, B on the first subdiagonal, degree N+1 dropped.
CMatrix pencil(const CMatrix& A, const CMatrix& B, Index N);
CMatrix shift(Index coeff_dim, Index N);
// I (x) X: X repeated on every degree block.
CMatrix blockwise(const CMatrix& X, Index N);
// ev0* X: X placed in the degree-0 block, zeros elsewhere.
CMatrix ev0_adj(const CMatrix& X, Index N);

}  // namespace ando
