#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gsis/kernel.hpp"

namespace gsis {

/// Leading eigendata of the kernel operator under the partition quadrature.
/// phi1 is L2-normalized and non-negative (Perron direction, sign fixed by
/// <phi1, 1> > 0); lambda2 is the signed magnitude-dominant eigenvalue of the
/// deflated operator when computed.
struct Spectrum {
    double lambda1 = 0.0;
    Field phi1;
    std::optional<double> lambda2;
    double residual = 0.0;
    std::size_t iterations = 0;

    /// Spectral gap lambda1 - lambda2. Throws if lambda2 is absent.
    double gap() const;

    /// Uniform positivity constant m = min over cells of phi1.
    double min_phi1() const { return min_value(phi1); }
};

/// Power iteration from the constant start vector, stopping when
/// ||W phi - lambda phi||_2 <= tol. Rank-1 variants return the stored pair
/// exactly (lambda2 = 0, zero iterations).
Spectrum leading_eigenpair(const KernelSpec& k, double tol = 1e-12,
                           std::size_t max_iter = 100000);

/// Power iteration on the deflated operator f -> Wf - lambda1 <phi1,f> phi1;
/// only |lambda2| dominance is guaranteed, the signed Rayleigh quotient is
/// returned. Rank-1 variants return 0 without iterating.
double second_eigenvalue(const KernelSpec& k, const Spectrum& spectrum, double tol = 1e-12,
                         std::size_t max_iter = 100000);

/// All eigenpairs of the weighted operator restricted to cell-constant fields,
/// eigenvalues descending, eigenfields orthonormal under the quadrature inner
/// product. Matrix variants only (DiscreteBlock, GridSampled).
struct EigenDecomposition {
    std::vector<double> eigenvalues;
    std::vector<Field> eigenfields;
};

EigenDecomposition full_eigendecomposition(const KernelSpec& k);

} // namespace gsis
