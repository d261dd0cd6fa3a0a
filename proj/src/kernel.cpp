#include "gsis/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include "gsis/errors.hpp"

namespace gsis {

EpidemicParams make_params(double beta, double gamma) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw ValidationError("kernel.EpidemicParams", "beta must be positive");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw ValidationError("kernel.EpidemicParams", "gamma must be non-negative");
    return EpidemicParams{beta, gamma};
}

namespace {

void check_square_symmetric_nonneg(const std::vector<double>& m, std::size_t n,
                                   const char* where) {
    if (m.size() != n * n)
        throw DimensionError(where, "matrix size does not match cell count");
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double v = m[i * n + j];
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError(where, "entries must be finite and non-negative");
            if (v != m[j * n + i])
                throw ValidationError(where, "matrix must be symmetric exactly as stored");
        }
    }
}

// Connectivity of the block support graph (i ~ j iff W_ij > 0, self-loops
// count as support but do not connect distinct blocks).
void check_connected(const std::vector<double>& m, std::size_t n, const char* where) {
    if (n <= 1) return;
    std::vector<char> seen(n, 0);
    std::deque<std::size_t> queue{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!queue.empty()) {
        std::size_t i = queue.front();
        queue.pop_front();
        for (std::size_t j = 0; j < n; ++j) {
            if (!seen[j] && m[i * n + j] > 0.0) {
                seen[j] = 1;
                ++count;
                queue.push_back(j);
            }
        }
    }
    if (count != n)
        throw ValidationError(where, "block support graph is disconnected");
}

Field normalized_nonneg(Field phi, const char* where) {
    for (double v : phi.values)
        if (!std::isfinite(v) || v < 0.0)
            throw ValidationError(where, "phi1 must be finite and non-negative per cell");
    double n = norm_l2(phi);
    if (!(n > 0.0))
        throw ValidationError(where, "phi1 must not be identically zero");
    // Idempotent: an already-normalized phi1 (norm 1 to roundoff) is kept
    // bit-identical, so kernel files round-trip exactly.
    if (std::abs(n - 1.0) > 4 * std::numeric_limits<double>::epsilon()) {
        for (double& v : phi.values) v /= n;
    }
    return phi;
}

} // namespace

KernelSpec make_discrete_block(PartitionPtr partition, std::vector<double> matrix) {
    const char* where = "kernel.make_discrete_block";
    if (!partition) throw ValidationError(where, "null partition");
    check_square_symmetric_nonneg(matrix, partition->size(), where);
    check_connected(matrix, partition->size(), where);
    return DiscreteBlock{std::move(partition), std::move(matrix), std::nullopt};
}

KernelSpec make_rank_one(double lambda1, Field phi1) {
    const char* where = "kernel.make_rank_one";
    if (!(lambda1 > 0.0) || !std::isfinite(lambda1))
        throw ValidationError(where, "lambda1 must be positive");
    return RankOne{lambda1, normalized_nonneg(std::move(phi1), where)};
}

KernelSpec make_power_law(double lambda1, double p, std::size_t grid_size, double kappa) {
    const char* where = "kernel.make_power_law";
    if (!(lambda1 > 0.0) || !std::isfinite(lambda1))
        throw ValidationError(where, "lambda1 must be positive");
    if (!(p >= 0.0 && p < 0.5))
        throw ValidationError(where, "power-law exponent requires 0 <= p < 1/2");
    if (grid_size < 2) throw ValidationError(where, "grid_size must be at least 2");
    if (kappa <= 0.0) kappa = 2.0 / (1.0 - 2.0 * p);
    auto part = std::make_shared<const Partition>(Partition::graded(grid_size, kappa));
    const auto& mid = part->midpoints();
    std::vector<double> vals(grid_size);
    double scale = std::sqrt(1.0 - 2.0 * p);
    for (std::size_t i = 0; i < grid_size; ++i) vals[i] = scale * std::pow(mid[i], -p);
    Field phi = normalized_nonneg(Field(part, std::move(vals)), where);
    return PowerLaw{lambda1, p, grid_size, kappa, std::move(phi)};
}

KernelSpec make_grid_sampled(PartitionPtr partition, std::vector<double> values) {
    const char* where = "kernel.make_grid_sampled";
    if (!partition) throw ValidationError(where, "null partition");
    check_square_symmetric_nonneg(values, partition->size(), where);
    return GridSampled{std::move(partition), std::move(values)};
}

KernelSpec build_annealed(const std::vector<double>& degrees, const std::vector<double>& pk,
                          const std::vector<double>& conditional) {
    const char* where = "kernel.build_annealed";
    std::size_t n = degrees.size();
    if (n == 0 || pk.size() != n)
        throw DimensionError(where, "degrees and p(k) must have equal positive length");
    double psum = 0.0;
    for (double q : pk) {
        if (!(q > 0.0) || !std::isfinite(q))
            throw ValidationError(where, "p(k) entries must be strictly positive");
        psum += q;
    }
    if (std::abs(psum - 1.0) > 1e-12)
        throw ValidationError(where, "p(k) must be a probability vector (sums to 1)");
    for (double k : degrees)
        if (!(k > 0.0) || !std::isfinite(k))
            throw ValidationError(where, "degrees must be positive");

    bool uncorrelated = conditional.empty();
    std::vector<double> cond(n * n);
    if (uncorrelated) {
        double mean_k = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean_k += degrees[i] * pk[i];
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) cond[i * n + j] = degrees[j] * pk[j] / mean_k;
    } else {
        if (conditional.size() != n * n)
            throw DimensionError(where, "conditional matrix must be n x n");
        cond = conditional;
        for (std::size_t i = 0; i < n; ++i) {
            double row = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (!(cond[i * n + j] >= 0.0))
                    throw ValidationError(where, "conditional probabilities must be >= 0");
                row += cond[i * n + j];
            }
            if (std::abs(row - 1.0) > 1e-12)
                throw ValidationError(where, "conditional rows must be stochastic");
        }
    }

    // w_ij = k_i p(k_j|k_i); block values W_ij = w_ij / |I_j| with |I_j| = p(k_j).
    std::vector<double> W(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            W[i * n + j] = degrees[i] * cond[i * n + j] / pk[j];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(W[i * n + j] - W[j * n + i]) > 1e-10)
                throw ValidationError(where, "conditional probabilities imply an asymmetric kernel");
    // Exact symmetry for downstream checks.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = 0.5 * (W[i * n + j] + W[j * n + i]);
            W[i * n + j] = W[j * n + i] = v;
        }

    auto part = std::make_shared<const Partition>(Partition::from_weights(pk));
    check_connected(W, n, where);
    DiscreteBlock block{std::move(part), std::move(W), std::nullopt};
    if (uncorrelated) {
        // The generating-function formulas downstream hold only under the
        // uncorrelated closure, so correlated kernels carry no degree metadata.
        block.annealed = AnnealedInfo{degrees, pk, true};
    }
    return block;
}

const PartitionPtr& partition_of(const KernelSpec& k) {
    return std::visit(
        [](const auto& v) -> const PartitionPtr& {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, RankOne> || std::is_same_v<T, PowerLaw>)
                return v.phi1.partition;
            else
                return v.partition;
        },
        k);
}

bool is_rank_one(const KernelSpec& k) {
    return std::holds_alternative<RankOne>(k) || std::holds_alternative<PowerLaw>(k);
}

std::string variant_name(const KernelSpec& k) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DiscreteBlock>) return "discrete_block";
            else if constexpr (std::is_same_v<T, RankOne>) return "rank_one";
            else if constexpr (std::is_same_v<T, PowerLaw>) return "power_law";
            else return "grid_sampled";
        },
        k);
}

double kernel_value_at(const KernelSpec& k, double x, double y) {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DiscreteBlock>)
                return v.at(v.partition->cell_of(x), v.partition->cell_of(y));
            else if constexpr (std::is_same_v<T, GridSampled>)
                return v.at(v.partition->cell_of(x), v.partition->cell_of(y));
            else if constexpr (std::is_same_v<T, RankOne>) {
                // The phi-product is grouped first so W(x,y) == W(y,x) holds
                // bit-exactly (multiplication commutes, association does not).
                const auto& part = *v.phi1.partition;
                return v.lambda1 * (v.phi1[part.cell_of(x)] * v.phi1[part.cell_of(y)]);
            } else { // PowerLaw: analytic formula, not the discretized phi1
                return (v.lambda1 * (1.0 - 2.0 * v.p)) * (std::pow(x, -v.p) * std::pow(y, -v.p));
            }
        },
        k);
}

namespace {

Field apply_matrix(const PartitionPtr& part, const std::vector<double>& m, const Field& f,
                   const char* where) {
    if (!same_partition(part, f.partition))
        throw DimensionError(where, "field is not on the kernel's partition");
    std::size_t n = part->size();
    const auto& w = part->weights();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double* row = m.data() + i * n;
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * w[j] * f.values[j];
        out[i] = s;
    }
    return Field(f.partition, std::move(out));
}

Field apply_rank_one(double lambda1, const Field& phi, const Field& f, const char* where) {
    if (!same_partition(phi.partition, f.partition))
        throw DimensionError(where, "field is not on the kernel's partition");
    double c = inner(phi, f);
    Field out = phi;
    for (double& v : out.values) v *= lambda1 * c;
    return out;
}

} // namespace

Field apply_operator(const KernelSpec& k, const Field& f) {
    const char* where = "kernel.apply_operator";
    return std::visit(
        [&](const auto& v) -> Field {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, DiscreteBlock>)
                return apply_matrix(v.partition, v.matrix, f, where);
            else if constexpr (std::is_same_v<T, GridSampled>)
                return apply_matrix(v.partition, v.values, f, where);
            else
                return apply_rank_one(v.lambda1, v.phi1, f, where);
        },
        k);
}

double kernel_distance(const KernelSpec& k1, const KernelSpec& k2) {
    // Common refinement: union of both breakpoint sets. Kernel values are
    // taken at refined-cell midpoints, which is exact for piecewise-constant
    // variants whose partitions the refinement contains.
    const auto& e1 = partition_of(k1)->edges();
    const auto& e2 = partition_of(k2)->edges();
    std::vector<double> merged;
    merged.reserve(e1.size() + e2.size());
    std::set_union(e1.begin(), e1.end(), e2.begin(), e2.end(), std::back_inserter(merged));
    merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

    std::size_t n = merged.size() - 1;
    std::vector<double> mid(n), w(n);
    for (std::size_t i = 0; i < n; ++i) {
        mid[i] = 0.5 * (merged[i] + merged[i + 1]);
        w[i] = merged[i + 1] - merged[i];
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double d = kernel_value_at(k1, mid[i], mid[j]) - kernel_value_at(k2, mid[i], mid[j]);
            row += d * d * w[j];
        }
        acc += row * w[i];
    }
    return std::sqrt(acc);
}

} // namespace gsis
