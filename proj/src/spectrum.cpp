#include "gsis/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "gsis/errors.hpp"

namespace gsis {

namespace {

// The operator restricted to cell-constant fields is self-adjoint under the
// weighted inner product <f,g> = sum_i w_i f_i g_i, not as a plain matrix.
// Normalization and residuals below always use that inner product.

void normalize_weighted(Field& f) {
    double n = norm_l2(f);
    if (n <= 0.0) {
        throw IterationError("spectrum.power_iteration", "iterate collapsed to zero", n);
    }
    for (double& v : f.values) {
        v /= n;
    }
}

double weighted_residual(const KernelSpec& k, const Field& phi, double lambda) {
    Field r = apply_operator(k, phi);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] -= lambda * phi[i];
    }
    return norm_l2(r);
}

} // namespace

double Spectrum::gap() const {
    if (!lambda2) {
        throw ValidationError("spectrum.gap", "second eigenvalue not computed");
    }
    return lambda1 - *lambda2;
}

Spectrum leading_eigenpair(const KernelSpec& k, double tol, std::size_t max_iter) {
    if (tol <= 0.0) {
        throw ValidationError("spectrum.leading_eigenpair", "tolerance must be positive");
    }
    // Rank-1 variants carry their eigenpair exactly; report it verbatim.
    if (const auto* r1 = std::get_if<RankOne>(&k)) {
        Spectrum s;
        s.lambda1 = r1->lambda1;
        s.phi1 = r1->phi1;
        s.lambda2 = 0.0;
        s.residual = weighted_residual(k, s.phi1, s.lambda1);
        return s;
    }
    if (const auto* pl = std::get_if<PowerLaw>(&k)) {
        Spectrum s;
        s.lambda1 = pl->lambda1;
        s.phi1 = pl->phi1;
        s.lambda2 = 0.0;
        s.residual = weighted_residual(k, s.phi1, s.lambda1);
        return s;
    }

    // Constant start vector: <1, phi1> > 0 for connected non-negative kernels,
    // so the Perron component is never lost.
    Field f = Field::constant(partition_of(k), 1.0);
    double lambda = 0.0;
    double residual = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        Field g = apply_operator(k, f);
        lambda = inner(f, g); // Rayleigh quotient, ||f||_2 = 1
        double r = 0.0;
        {
            const auto& w = f.partition->weights();
            for (std::size_t i = 0; i < f.size(); ++i) {
                double d = g[i] - lambda * f[i];
                r += w[i] * d * d;
            }
        }
        residual = std::sqrt(r);
        if (residual <= tol) {
            Spectrum s;
            s.lambda1 = lambda;
            // Perron sign: force <phi1, 1> > 0, then clamp the negative
            // rounding dust so phi1 >= 0 per cell holds exactly.
            if (integral(f) < 0.0) {
                for (double& v : f.values) {
                    v = -v;
                }
            }
            for (double& v : f.values) {
                if (v < 0.0 && v > -tol) {
                    v = 0.0;
                }
            }
            s.phi1 = std::move(f);
            s.residual = residual;
            s.iterations = it;
            return s;
        }
        f = std::move(g);
        normalize_weighted(f);
    }
    throw IterationError("spectrum.leading_eigenpair",
                         "power iteration did not converge after " + std::to_string(max_iter) +
                             " iterations",
                         residual);
}

double second_eigenvalue(const KernelSpec& k, const Spectrum& spectrum, double tol,
                         std::size_t max_iter) {
    if (is_rank_one(k)) {
        return 0.0;
    }
    const Field& phi1 = spectrum.phi1;
    const double lambda1 = spectrum.lambda1;
    if (phi1.size() <= 1) {
        return 0.0; // one cell: the deflated operator is identically zero
    }

    // Deterministically perturbed constant start so the iterate has mass on
    // every non-leading mode; a fixed LCG keeps runs bit-reproducible.
    Field f = Field::constant(partition_of(k), 1.0);
    std::uint64_t state = 0x9e3779b97f4a7c15ull;
    for (double& v : f.values) {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        v += 0.5 * (static_cast<double>(state >> 11) / 9007199254740992.0) - 0.25;
    }
    auto deflate = [&](Field& g, const Field& src) {
        double c = inner(phi1, src);
        for (std::size_t i = 0; i < g.size(); ++i) {
            g[i] -= lambda1 * c * phi1[i];
        }
    };
    // Remove the leading component once up front.
    {
        double c = inner(phi1, f);
        for (std::size_t i = 0; i < f.size(); ++i) {
            f[i] -= c * phi1[i];
        }
    }
    normalize_weighted(f);

    double lambda = 0.0;
    double residual = 0.0;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        Field g = apply_operator(k, f);
        deflate(g, f);
        lambda = inner(f, g);
        double r = 0.0;
        {
            const auto& w = f.partition->weights();
            for (std::size_t i = 0; i < f.size(); ++i) {
                double d = g[i] - lambda * f[i];
                r += w[i] * d * d;
            }
        }
        residual = std::sqrt(r);
        if (residual <= tol) {
            return lambda;
        }
        double gn = norm_l2(g);
        if (gn <= tol) {
            return 0.0; // deflated operator annihilates the complement
        }
        f = std::move(g);
        for (double& v : f.values) {
            v /= gn;
        }
    }
    throw IterationError("spectrum.second_eigenvalue",
                         "deflated power iteration did not converge", residual);
}

EigenDecomposition full_eigendecomposition(const KernelSpec& k) {
    const double* mat = nullptr;
    if (const auto* db = std::get_if<DiscreteBlock>(&k)) {
        mat = db->matrix.data();
    } else if (const auto* gs = std::get_if<GridSampled>(&k)) {
        mat = gs->values.data();
    } else {
        throw ValidationError("spectrum.full_eigendecomposition",
                              "full decomposition requires a matrix kernel (DiscreteBlock or "
                              "GridSampled); rank-1 variants expose only (lambda1, phi1)");
    }
    const PartitionPtr& part = partition_of(k);
    const std::size_t n = part->size();
    const auto& w = part->weights();

    // Symmetrize: S = D^{1/2} W D^{1/2} with D = diag(w). If S y = mu y with
    // ||y|| = 1 Euclidean, then f = D^{-1/2} y satisfies (weighted apply) f =
    // mu f and ||f||_2 = 1 under the quadrature inner product.
    std::vector<double> s(n * n);
    std::vector<double> sqw(n);
    for (std::size_t i = 0; i < n; ++i) {
        sqw[i] = std::sqrt(w[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            s[i * n + j] = sqw[i] * mat[i * n + j] * sqw[j];
        }
    }

    // Cyclic Jacobi rotations; V accumulates eigenvectors as columns.
    std::vector<double> v(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        v[i * n + i] = 1.0;
    }
    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += s[p * n + q] * s[p * n + q];
            }
        }
        if (std::sqrt(2.0 * off) <= 1e-14 * (1.0 + std::abs(s[0]))) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = s[p * n + q];
                if (apq == 0.0) {
                    continue;
                }
                double app = s[p * n + p];
                double aqq = s[q * n + q];
                double theta = 0.5 * (aqq - app) / apq;
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double sn = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    double sip = s[i * n + p];
                    double siq = s[i * n + q];
                    s[i * n + p] = c * sip - sn * siq;
                    s[i * n + q] = sn * sip + c * siq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    double spj = s[p * n + j];
                    double sqj = s[q * n + j];
                    s[p * n + j] = c * spj - sn * sqj;
                    s[q * n + j] = sn * spj + c * sqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double vip = v[i * n + p];
                    double viq = v[i * n + q];
                    v[i * n + p] = c * vip - sn * viq;
                    v[i * n + q] = sn * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return s[a * n + a] > s[b * n + b]; });

    EigenDecomposition dec;
    dec.eigenvalues.reserve(n);
    dec.eigenfields.reserve(n);
    for (std::size_t idx : order) {
        dec.eigenvalues.push_back(s[idx * n + idx]);
        std::vector<double> vals(n);
        for (std::size_t i = 0; i < n; ++i) {
            vals[i] = v[i * n + idx] / sqw[i];
        }
        dec.eigenfields.emplace_back(part, std::move(vals));
    }
    // Perron sign on the leading field for consistency with leading_eigenpair.
    if (!dec.eigenfields.empty() && integral(dec.eigenfields.front()) < 0.0) {
        for (double& x : dec.eigenfields.front().values) {
            x = -x;
        }
    }
    return dec;
}

} // namespace gsis
