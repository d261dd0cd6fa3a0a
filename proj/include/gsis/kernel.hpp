#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gsis/partition.hpp"

namespace gsis {

/// Degree metadata kept on kernels built by build_annealed in uncorrelated
/// mode; needed by the generating-function formulas of module si_closed_form.
struct AnnealedInfo {
    std::vector<double> degrees;
    std::vector<double> pk;
    bool uncorrelated = false;
};

/// Piecewise-constant kernel: W(x,y) = W_ij on I_i x I_j. Matrix stored dense
/// row-major, symmetric and non-negative as stored; the support graph must be
/// connected (checked at construction).
struct DiscreteBlock {
    PartitionPtr partition;
    std::vector<double> matrix; // n*n row-major
    std::optional<AnnealedInfo> annealed;

    double at(std::size_t i, std::size_t j) const { return matrix[i * partition->size() + j]; }
};

/// W(x,y) = lambda1 * phi1(x) * phi1(y) with phi1 stored L2-normalized under
/// the partition quadrature. Operator applications never materialize a matrix.
struct RankOne {
    double lambda1 = 0.0;
    Field phi1;
};

/// W(x,y) = lambda1 (1-2p) x^-p y^-p, the rank-1 power-law kernel with
/// eigenfunction sqrt(1-2p) x^-p. Sampled on a graded mesh x_j = (j/M)^kappa
/// whose default kappa = 2/(1-2p) resolves the integral of phi1^2; phi1 is
/// re-normalized under the mesh quadrature so the discrete model is exactly
/// rank-1 with eigenvalue lambda1.
struct PowerLaw {
    double lambda1 = 0.0;
    double p = 0.0;
    std::size_t grid_size = 0;
    double kappa = 0.0;
    Field phi1; // normalized midpoint samples
};

/// Pointwise samples W(x_i, y_j) at cell midpoints, symmetric non-negative.
struct GridSampled {
    PartitionPtr partition;
    std::vector<double> values; // n*n row-major

    double at(std::size_t i, std::size_t j) const { return values[i * partition->size() + j]; }
};

using KernelSpec = std::variant<DiscreteBlock, RankOne, PowerLaw, GridSampled>;

/// Infection/curing rates of the SIS flow; gamma = 0 is the SI special case.
struct EpidemicParams {
    double beta = 1.0;
    double gamma = 0.0;

    /// Modal growth rate alpha_k = beta*lambda_k - gamma.
    double alpha(double lambda_k) const { return beta * lambda_k - gamma; }
};

EpidemicParams make_params(double beta, double gamma);

// ---- construction (validating factories) ----

/// Symmetry and non-negativity checked exactly as stored; support graph of
/// the matrix must be connected.
KernelSpec make_discrete_block(PartitionPtr partition, std::vector<double> matrix);

/// phi1 must be non-negative and not identically zero; it is normalized to
/// unit L2 norm internally (lambda1 is not rescaled).
KernelSpec make_rank_one(double lambda1, Field phi1);

/// 0 <= p < 1/2 required. grid_size defaults to 2000 cells; kappa <= 0 selects
/// the default grading 2/(1-2p) (p = 0 gives kappa = 2).
KernelSpec make_power_law(double lambda1, double p, std::size_t grid_size = 2000,
                          double kappa = 0.0);

KernelSpec make_grid_sampled(PartitionPtr partition, std::vector<double> values);

/// Annealed-network kernel: cells |I_i| = p(k_i), weights w_ij = k_i p(k_j|k_i),
/// block values W_ij = w_ij/|I_j|. Uncorrelated mode (empty `conditional`)
/// computes p(k_j|k_i) = k_j p(k_j)/<k> and attaches AnnealedInfo. Symmetry of
/// the implied W_ij is verified within 1e-10.
KernelSpec build_annealed(const std::vector<double>& degrees, const std::vector<double>& pk,
                          const std::vector<double>& conditional = {});

// ---- queries ----

const PartitionPtr& partition_of(const KernelSpec& k);
bool is_rank_one(const KernelSpec& k);
std::string variant_name(const KernelSpec& k);

/// Pointwise kernel value W(x,y); piecewise-constant lookup for block/sampled
/// variants, analytic formula for PowerLaw, phi1-cell lookup for RankOne.
double kernel_value_at(const KernelSpec& k, double x, double y);

/// The integral operator: (Wf)(x) = int W(x,y) f(y) dy under the partition
/// quadrature. Rank-1 variants use the exact O(M) shortcut lambda1 phi1 <phi1,f>.
Field apply_operator(const KernelSpec& k, const Field& f);

/// L2 distance ||W1 - W2|| under product quadrature on the common refinement
/// of both partitions (midpoint evaluation per refined cell pair).
double kernel_distance(const KernelSpec& k1, const KernelSpec& k2);

} // namespace gsis
