#pragma once

#include <string>
#include <vector>

#include "gsis/kernel.hpp"
#include "gsis/si_closed_form.hpp"
#include "gsis/trajectory.hpp"

namespace gsis {

/// Locale-independent decimal with 17 significant digits ('.' separator);
/// round-trips every finite double.
std::string format_real(double v);

// ---- kernel files ----
//
// Structured text (JSON) with a "variant" discriminator:
//   discrete_block: cell_weights + dense row-major matrix (+ optional annealed
//                   {degrees, pk, uncorrelated})
//   power_law:      lambda1, p, grid_size, kappa
//   rank_one:       lambda1, edges, phi1
//   grid_sampled:   edges, dense row-major values
// All reals written with 17 significant digits. Readers validate through the
// construction factories, so file-level invariant violations surface as the
// factories' errors.

void write_kernel_file(const KernelSpec& k, const std::string& path);
KernelSpec read_kernel_file(const std::string& path);

/// Kernel from the same structured text without touching the filesystem.
KernelSpec parse_kernel_text(const std::string& text);
std::string kernel_to_text(const KernelSpec& k);

// ---- CSV ----
//
// '.' decimal separator, LF line endings, 17-significant-digit reals.

/// Header `t,prevalence,c1,l2`, one row per stored sample.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

/// Wide format: header `t,cell_0,...,cell_{n-1}` with raw states.
void write_trajectory_wide_csv(const Trajectory& traj, const std::string& path);

/// Summary rows as written by write_trajectory_csv.
struct TrajectorySummaries {
    std::vector<double> times;
    std::vector<double> prevalence;
    std::vector<double> c1;
    std::vector<double> l2;
};

TrajectorySummaries read_trajectory_csv(const std::string& path);

/// Header `prevalence,si_links`.
void write_chi_csv(const ChiCurve& curve, const std::string& path);

/// Header `t,omega,prevalence`.
void write_omega_csv(const OmegaCurve& curve, const std::string& path);

/// Header `x,<name>`: one row per cell midpoint.
void write_field_csv(const Field& f, const std::string& name, const std::string& path);

/// Whole-file helpers (binary-exact, LF preserved).
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Write via a temporary then rename into place, so readers never observe a
/// partially written file.
void write_text_file_atomic(const std::string& path, const std::string& content);

} // namespace gsis
