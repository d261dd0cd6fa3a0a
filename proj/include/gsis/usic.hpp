#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "gsis/dynamics.hpp"
#include "gsis/kernel.hpp"
#include "gsis/trajectory.hpp"

namespace gsis {

/// Which scalar series defines the alignment crossing. The c1 statistic is
/// the analysis-native choice; prevalence reproduces the figure convention.
enum class CrossingStat { C1, Prevalence };

/// Result of aligning two trajectories at a common level: t1/t2 are the
/// shifts from each trajectory's start to its first crossing, sup_distance is
/// sup over t in [0, horizon] of ||u1(cross1 + t) - u2(cross2 + t)||_2 on a
/// common resampled grid, and pre_shift_max is the larger of the two
/// pre-crossing sup norms (the eta of the smallness statement).
struct AlignmentReport {
    double t1 = 0.0;
    double t2 = 0.0;
    double sup_distance = 0.0;
    double pre_shift_max = 0.0;
    double level = 0.0;
    double horizon = 0.0;
    CrossingStat stat = CrossingStat::C1;
};

AlignmentReport align(const Trajectory& a, const Trajectory& b, double level, double horizon,
                      CrossingStat stat = CrossingStat::C1);

/// Pairwise alignment over a family of initial conditions.
struct SweepReport {
    std::vector<Trajectory> trajectories;         // one per family member
    std::vector<double> initial_l2;               // ||u0||_2 per member
    std::vector<std::size_t> pair_i, pair_j;      // index pairs, i < j
    std::vector<AlignmentReport> pairs;
    double max_sup_distance = 0.0;
    double max_pre_shift = 0.0;
    /// (delta, max sup_distance over pairs with both ||u0||_2 <= delta),
    /// delta descending over the distinct family norms with >= 2 members.
    std::vector<std::pair<double, double>> trend;
    bool supercritical = false;
    /// Whether beta lambda1 < gamma + 2 beta (lambda1 - lambda2) holds;
    /// reported, never enforced.
    bool gap_condition = false;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

SweepReport usic_sweep(const KernelSpec& k, const EpidemicParams& params,
                       const std::vector<Field>& family, double level, double horizon,
                       const IntegratorConfig& cfg = {}, CrossingStat stat = CrossingStat::C1);

/// Staged approximation of the nontrivial eternal solution: stage n starts at
/// u_n(-n) = min{epsilon_n phi1, 1} with epsilon_n = epsilon0 e^{-alpha1 n}
/// and integrates to t_fwd. cauchy_gaps[n-2] = sup over the common grid of
/// [-(n-1), t_fwd] of ||u_n - u_{n-1}||_2; the final stage is the returned
/// approximation.
struct EternalSolution {
    Trajectory trajectory;
    double epsilon0 = 0.0;
    std::vector<double> stage_epsilons;  // epsilon_n per stage, n = 1..N
    std::vector<double> cauchy_gaps;     // N-1 entries
    std::vector<double> alignment_ratio; // c1/||u||_2 per sample of the final stage
    /// Largest successive gap ratio over the final three gaps.
    double cauchy_rate = 0.0;
    /// False when the gaps fail to decrease somewhere (convergence-failure
    /// report, not an exception).
    bool converged = false;
    /// Accumulated over all stages (trajectory.stats covers only the last).
    IntegratorStats stats;
};

/// epsilon0 <= 0 selects the default 0.01 (beta lambda1 - gamma)/(beta lambda1).
EternalSolution construct_eternal(const KernelSpec& k, const EpidemicParams& params,
                                  double epsilon0, std::size_t n_stages, double t_fwd,
                                  const IntegratorConfig& cfg = {});

/// Uniqueness evidence: two eternal constructions anchored at eps_a and eps_b,
/// aligned at the geometric mid-level sqrt(eps_a eps_b) on the c1 statistic.
struct UniquenessReport {
    AlignmentReport alignment;
    double tol = 0.0;
    bool ok = false;
};

UniquenessReport uniqueness_check(const KernelSpec& k, const EpidemicParams& params, double eps_a,
                                  double eps_b, std::size_t n_stages, double tol,
                                  double horizon = 10.0, double t_fwd = 15.0,
                                  const IntegratorConfig& cfg = {});

} // namespace gsis
