#pragma once

#include "ppaudit/parsing.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ppaudit {

struct BootstrapConfig {
    int iterations = 1000;
    double confidence = 0.95;
    uint64_t seed = 0;
};

struct PairedDelta {
    std::string persona_id;  // filled by callers
    std::string metric;
    double delta_mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    bool significant = false;  // CI excludes 0
};

// Sample-level bootstrap for the paired difference of per-instance scores.
// Both vectors are indexed by the same instances (run-averaged scores, or
// ordinal distances for MAE).
//
// The seed-to-resample mapping is part of the contract so results are
// reproducible across processes and schedulers:
//   iteration t: rng = mt19937_64(mix_seed(seed, t)); n index draws via
//   bounded_index(rng(), n) in order; delta_t = mean(persona[i] - baseline[i]).
// CI bounds are type-7 (linear interpolation) quantiles of the sorted
// iteration deltas at (1 +/- confidence)/2.
PairedDelta bootstrap_delta(std::span<const double> persona_scores,
                            std::span<const double> baseline_scores,
                            const BootstrapConfig & config);

struct StuartMaxwellResult {
    double statistic = 0.0;
    int dof = 0;
    double p = 1.0;
    int collapsed_categories = 0;  // categories dropped for zero combined marginal
};

// Marginal-homogeneity test for paired k-category labels.
// d_i = row_i - col_i over the first k-1 categories; S_ii = row_i + col_i
// - 2 n_ii, S_ij = -(n_ij + n_ji); statistic = d' S^{-1} d with dof = k-1.
// Categories with zero combined marginal are collapsed first; any residual
// rank deficiency is handled by a symmetric pseudo-inverse with the dof
// reduced to the rank.
StuartMaxwellResult stuart_maxwell(std::span<const int> labels_a, std::span<const int> labels_b,
                                   int k);
StuartMaxwellResult stuart_maxwell_from_table(const std::vector<std::vector<double>> & table);

// Family-wise threshold 0.05 / family_size.
double bonferroni_threshold(int family_size, double alpha = 0.05);

struct CorrectedTest {
    double p = 1.0;
    double threshold = 0.05;
    bool significant = false;
};

std::vector<CorrectedTest> bonferroni(const std::vector<double> & pvalues, int family_size,
                                      double alpha = 0.05);

struct DisagreementRate {
    std::vector<double> per_run;
    double mean = 0.0;
};

// Fraction of instances on which the group's personas did not all produce
// the same label (instances with fewer than two parsed labels are skipped),
// per run and averaged over runs.
DisagreementRate disagreement_rate(const std::vector<AnnotationRecord> & records,
                                   const std::vector<std::string> & group_persona_ids,
                                   int runs);

// Upper-tail chi-square probability via the regularized incomplete gamma
// function. Absolute error <= 1e-10 for dof <= 20, x <= 200.
double chi_square_sf(double x, int dof);

}  // namespace ppaudit
