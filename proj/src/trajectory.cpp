#include "gsis/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "gsis/errors.hpp"

namespace gsis {

void Trajectory::append(double t, const std::vector<double>& state,
                        const std::vector<double>& deriv) {
    if (!times.empty() && t <= times.back()) {
        throw ValidationError("trajectory.append", "times must be strictly increasing");
    }
    times.push_back(t);
    states.push_back(state);
    derivs.push_back(deriv);

    const auto& w = partition->weights();
    double prev = 0.0, cc = 0.0, nn = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        double u = std::clamp(state[i], 0.0, 1.0);
        prev += w[i] * u;
        cc += w[i] * phi1[i] * u;
        nn += w[i] * u * u;
    }
    prevalence.push_back(prev);
    c1.push_back(cc);
    l2.push_back(std::sqrt(nn));
}

std::size_t Trajectory::bracket(double t) const {
    const double pad = 1e-12 * std::max(1.0, std::abs(t));
    if (times.empty() || t < times.front() - pad || t > times.back() + pad) {
        throw InsufficientHorizonError("trajectory.state_at",
                                       "time " + std::to_string(t) +
                                           " outside stored range [" +
                                           std::to_string(times.empty() ? 0.0 : times.front()) +
                                           ", " +
                                           std::to_string(times.empty() ? 0.0 : times.back()) +
                                           "]");
    }
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - times.begin());
    if (hi == 0) {
        hi = 1;
    }
    if (hi >= times.size()) {
        hi = times.size() - 1;
    }
    return hi - 1;
}

void Trajectory::state_at(double t, std::vector<double>& out) const {
    const std::size_t lo = bracket(t);
    const std::size_t hi = lo + 1 < times.size() ? lo + 1 : lo;
    const auto& y0 = states[lo];
    out.resize(y0.size());
    if (hi == lo) {
        out = y0;
        return;
    }
    const auto& y1 = states[hi];
    const auto& f0 = derivs[lo];
    const auto& f1 = derivs[hi];
    const double h = times[hi] - times[lo];
    const double s = (t - times[lo]) / h;
    // Cubic Hermite basis.
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    for (std::size_t i = 0; i < y0.size(); ++i) {
        out[i] = h00 * y0[i] + h * h10 * f0[i] + h01 * y1[i] + h * h11 * f1[i];
    }
}

double Trajectory::interp_series(const std::vector<double>& s, double t) const {
    const std::size_t lo = bracket(t);
    if (lo + 1 >= times.size()) {
        return s.back();
    }
    const double w = (t - times[lo]) / (times[lo + 1] - times[lo]);
    return (1.0 - w) * s[lo] + w * s[lo + 1];
}

double Trajectory::c1_at(double t) const { return interp_series(c1, t); }

double Trajectory::prevalence_at(double t) const { return interp_series(prevalence, t); }

double Trajectory::l2_at(double t) const { return interp_series(l2, t); }

double Trajectory::crossing_time(double level, bool use_prevalence) const {
    const std::vector<double>& s = use_prevalence ? prevalence : c1;
    const char* what = use_prevalence ? "prevalence" : "c1";
    if (s.empty()) {
        throw InsufficientHorizonError("usic.align", "empty trajectory");
    }
    if (s.front() >= level) {
        return times.front();
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] >= level) {
            const double w = (level - s[i - 1]) / (s[i] - s[i - 1]);
            return times[i - 1] + w * (times[i] - times[i - 1]);
        }
    }
    // Never reached: saturated (level above equilibrium) vs. truncated run.
    const std::size_t n = s.size();
    const double slope =
        n >= 2 ? (s[n - 1] - s[n - 2]) / (times[n - 1] - times[n - 2]) : 0.0;
    if (slope > 0.0 && (level - s.back()) / slope < 1e6) {
        throw InsufficientHorizonError("usic.align",
                                       std::string(what) + " still below level " +
                                           std::to_string(level) +
                                           " when the trajectory ends; integrate further");
    }
    throw UnreachableLevelError("usic.align", std::string(what) + " saturates below level " +
                                                  std::to_string(level) +
                                                  " (level above equilibrium)");
}

} // namespace gsis
