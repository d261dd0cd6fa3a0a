#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace gsis {

/// Non-degenerate finite partition of [0,1]: breakpoints 0 = x_0 < ... < x_M = 1.
/// Cell weights |I_i| = x_i - x_{i-1} are the quadrature weights for every
/// integral in the library; fields are piecewise constant per cell (midpoint
/// semantics for sampled kernels).
class Partition {
public:
    /// Build from explicit breakpoints. Throws ValidationError unless the
    /// edges start at 0, end at 1, and are strictly increasing.
    explicit Partition(std::vector<double> edges);

    /// M equal cells.
    static Partition uniform(std::size_t cells);

    /// Graded mesh x_j = (j/M)^kappa, kappa >= 1. Resolves x^{-p} singularities
    /// at 0 when kappa matches the integrand (see PowerLaw kernels).
    static Partition graded(std::size_t cells, double kappa);

    /// Reconstruct from cell weights (cumulative sums). Weights must be
    /// strictly positive and sum to 1 within 1e-12.
    static Partition from_weights(const std::vector<double>& weights);

    std::size_t size() const { return weights_.size(); }
    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& midpoints() const { return midpoints_; }

    /// Smallest cell weight (the J of the discrete initial bound).
    double min_weight() const;

    /// Index of the cell containing x in [0,1]; clamps to the boundary cells.
    std::size_t cell_of(double x) const;

    bool operator==(const Partition& other) const { return edges_ == other.edges_; }

private:
    std::vector<double> edges_;
    std::vector<double> weights_;
    std::vector<double> midpoints_;
};

using PartitionPtr = std::shared_ptr<const Partition>;

/// A function on [0,1] sampled per cell; carries states u(t,.), eigenfunctions,
/// the endemic state. All quadrature goes through the shared partition.
struct Field {
    PartitionPtr partition;
    std::vector<double> values;

    Field() = default;
    Field(PartitionPtr part, std::vector<double> vals);
    /// Constant field c on a partition.
    static Field constant(PartitionPtr part, double c);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// Throws DimensionError unless both fields share a partition (same object or
/// equal breakpoints).
void require_same_partition(const Field& a, const Field& b, const char* where);
bool same_partition(const PartitionPtr& a, const PartitionPtr& b);

/// Quadrature: integral, weighted inner product, and norms.
double integral(const Field& f);
double inner(const Field& f, const Field& g);
double norm_l2(const Field& f);
double norm_sup(const Field& f);
double min_value(const Field& f);

/// a*f + b*g on a shared partition.
Field axpby(double a, const Field& f, double b, const Field& g);

/// Values clipped to [0,1]; used for reported summaries only, never for the
/// integrated state.
Field clipped01(const Field& f);

} // namespace gsis
