#include "gsis/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gsis/errors.hpp"

namespace gsis {

Partition::Partition(std::vector<double> edges) : edges_(std::move(edges)) {
    if (edges_.size() < 2)
        throw ValidationError("kernel.Partition", "need at least two breakpoints");
    if (edges_.front() != 0.0 || edges_.back() != 1.0)
        throw ValidationError("kernel.Partition", "breakpoints must span [0,1] exactly");
    weights_.resize(edges_.size() - 1);
    midpoints_.resize(edges_.size() - 1);
    for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
        if (!(edges_[i] < edges_[i + 1]))
            throw ValidationError("kernel.Partition", "breakpoints must be strictly increasing");
        weights_[i] = edges_[i + 1] - edges_[i];
        midpoints_[i] = 0.5 * (edges_[i] + edges_[i + 1]);
    }
}

Partition Partition::uniform(std::size_t cells) {
    if (cells == 0)
        throw ValidationError("kernel.Partition", "cell count must be positive");
    std::vector<double> edges(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j)
        edges[j] = static_cast<double>(j) / static_cast<double>(cells);
    edges.back() = 1.0;
    return Partition(std::move(edges));
}

Partition Partition::graded(std::size_t cells, double kappa) {
    if (cells == 0)
        throw ValidationError("kernel.Partition", "cell count must be positive");
    if (!(kappa >= 1.0) || !std::isfinite(kappa))
        throw ValidationError("kernel.Partition", "grading exponent must be >= 1");
    std::vector<double> edges(cells + 1);
    for (std::size_t j = 0; j <= cells; ++j)
        edges[j] = std::pow(static_cast<double>(j) / static_cast<double>(cells), kappa);
    edges.front() = 0.0;
    edges.back() = 1.0;
    return Partition(std::move(edges));
}

Partition Partition::from_weights(const std::vector<double>& weights) {
    if (weights.empty())
        throw ValidationError("kernel.Partition", "empty weight list");
    double sum = 0.0;
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw ValidationError("kernel.Partition", "cell weights must be strictly positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ValidationError("kernel.Partition",
                              "cell weights must sum to 1 within 1e-12, got " + std::to_string(sum));
    std::vector<double> edges(weights.size() + 1);
    edges[0] = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        edges[i + 1] = acc;
    }
    edges.back() = 1.0; // absorb the <=1e-12 closure defect
    return Partition(std::move(edges));
}

double Partition::min_weight() const {
    return *std::min_element(weights_.begin(), weights_.end());
}

std::size_t Partition::cell_of(double x) const {
    if (x <= edges_.front()) return 0;
    if (x >= edges_.back()) return weights_.size() - 1;
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

Field::Field(PartitionPtr part, std::vector<double> vals)
    : partition(std::move(part)), values(std::move(vals)) {
    if (!partition)
        throw ValidationError("kernel.Field", "null partition");
    if (values.size() != partition->size())
        throw DimensionError("kernel.Field", "value count does not match cell count");
}

Field Field::constant(PartitionPtr part, double c) {
    std::vector<double> v(part->size(), c);
    return Field(std::move(part), std::move(v));
}

bool same_partition(const PartitionPtr& a, const PartitionPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

void require_same_partition(const Field& a, const Field& b, const char* where) {
    if (!same_partition(a.partition, b.partition))
        throw DimensionError(where, "fields live on different partitions");
}

double integral(const Field& f) {
    const auto& w = f.partition->weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * w[i];
    return s;
}

double inner(const Field& f, const Field& g) {
    require_same_partition(f, g, "kernel.inner");
    const auto& w = f.partition->weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * g.values[i] * w[i];
    return s;
}

double norm_l2(const Field& f) {
    const auto& w = f.partition->weights();
    double s = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) s += f.values[i] * f.values[i] * w[i];
    return std::sqrt(s);
}

double norm_sup(const Field& f) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
}

double min_value(const Field& f) {
    return *std::min_element(f.values.begin(), f.values.end());
}

Field axpby(double a, const Field& f, double b, const Field& g) {
    require_same_partition(f, g, "kernel.axpby");
    Field out = f;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = a * f.values[i] + b * g.values[i];
    return out;
}

Field clipped01(const Field& f) {
    Field out = f;
    for (double& v : out.values) v = std::clamp(v, 0.0, 1.0);
    return out;
}

} // namespace gsis
