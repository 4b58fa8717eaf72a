#include "ppaudit/stats.hpp"

#include "ppaudit/util.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace ppaudit {

namespace {

// type-7 quantile (linear interpolation between order statistics)
double quantile_sorted(const std::vector<double> & sorted, double q) {
    if (sorted.empty()) return 0.0;
    if (sorted.size() == 1) return sorted[0];
    double h = q * static_cast<double>(sorted.size() - 1);
    size_t lo = static_cast<size_t>(std::floor(h));
    size_t hi = std::min(lo + 1, sorted.size() - 1);
    double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

PairedDelta bootstrap_delta(std::span<const double> persona_scores,
                            std::span<const double> baseline_scores,
                            const BootstrapConfig & config) {
    if (persona_scores.size() != baseline_scores.size()) {
        throw ValidationError("bootstrap_delta: persona/baseline instance index mismatch");
    }
    if (persona_scores.empty()) throw ValidationError("bootstrap_delta: empty sample");
    if (config.iterations < 1) throw ValidationError("bootstrap_delta: iterations must be >= 1");
    if (!(config.confidence > 0.0 && config.confidence < 1.0)) {
        throw ValidationError("bootstrap_delta: confidence must be in (0, 1)");
    }
    size_t n = persona_scores.size();
    std::vector<double> point_deltas(n);
    for (size_t i = 0; i < n; ++i) point_deltas[i] = persona_scores[i] - baseline_scores[i];

    std::vector<double> deltas(static_cast<size_t>(config.iterations));
    for (int t = 0; t < config.iterations; ++t) {
        std::mt19937_64 rng(mix_seed(config.seed, static_cast<uint64_t>(t)));
        double s = 0.0;
        for (size_t j = 0; j < n; ++j) {
            size_t idx = bounded_index(rng(), n);
            s += point_deltas[idx];
        }
        deltas[static_cast<size_t>(t)] = s / static_cast<double>(n);
    }
    std::sort(deltas.begin(), deltas.end());

    PairedDelta out;
    out.delta_mean = mean_of(point_deltas);
    double tail = (1.0 - config.confidence) / 2.0;
    out.ci_low = quantile_sorted(deltas, tail);
    out.ci_high = quantile_sorted(deltas, 1.0 - tail);
    if (out.ci_low > out.ci_high) std::swap(out.ci_low, out.ci_high);
    out.significant = out.ci_low > 0.0 || out.ci_high < 0.0;
    return out;
}

namespace {

// cyclic Jacobi eigendecomposition for a small symmetric matrix
void jacobi_eigen(std::vector<std::vector<double>> a, std::vector<double> & eigenvalues,
                  std::vector<std::vector<double>> & eigenvectors) {
    size_t n = a.size();
    eigenvectors.assign(n, std::vector<double>(n, 0.0));
    for (size_t i = 0; i < n; ++i) eigenvectors[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        }
        if (off < 1e-30) break;
        for (size_t p = 0; p < n; ++p) {
            for (size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (size_t i = 0; i < n; ++i) {
                    double aip = a[i][p];
                    double aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (size_t i = 0; i < n; ++i) {
                    double api = a[p][i];
                    double aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for (size_t i = 0; i < n; ++i) {
                    double vip = eigenvectors[i][p];
                    double viq = eigenvectors[i][q];
                    eigenvectors[i][p] = c * vip - s * viq;
                    eigenvectors[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    eigenvalues.resize(n);
    for (size_t i = 0; i < n; ++i) eigenvalues[i] = a[i][i];
}

}  // namespace

StuartMaxwellResult stuart_maxwell_from_table(const std::vector<std::vector<double>> & table) {
    size_t k = table.size();
    if (k < 2) throw ValidationError("stuart_maxwell: need k >= 2 categories");
    for (const auto & row : table) {
        if (row.size() != k) throw ValidationError("stuart_maxwell: table must be square");
    }

    // collapse categories with zero combined marginal
    std::vector<size_t> keep;
    for (size_t i = 0; i < k; ++i) {
        double row = 0.0;
        double col = 0.0;
        for (size_t j = 0; j < k; ++j) {
            row += table[i][j];
            col += table[j][i];
        }
        if (row + col > 0.0) keep.push_back(i);
    }
    StuartMaxwellResult out;
    out.collapsed_categories = static_cast<int>(k - keep.size());
    if (keep.size() < 2) {
        out.statistic = 0.0;
        out.dof = std::max<int>(static_cast<int>(keep.size()) - 1, 0);
        out.p = 1.0;
        return out;
    }
    size_t kk = keep.size();
    std::vector<std::vector<double>> n(kk, std::vector<double>(kk, 0.0));
    for (size_t i = 0; i < kk; ++i) {
        for (size_t j = 0; j < kk; ++j) n[i][j] = table[keep[i]][keep[j]];
    }

    size_t m = kk - 1;
    std::vector<double> d(m, 0.0);
    std::vector<std::vector<double>> s(m, std::vector<double>(m, 0.0));
    for (size_t i = 0; i < m; ++i) {
        double row = 0.0;
        double col = 0.0;
        for (size_t j = 0; j < kk; ++j) {
            row += n[i][j];
            col += n[j][i];
        }
        d[i] = row - col;
        s[i][i] = row + col - 2.0 * n[i][i];
        for (size_t j = 0; j < m; ++j) {
            if (j != i) s[i][j] = -(n[i][j] + n[j][i]);
        }
    }

    bool zero_d = std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; });
    if (zero_d) {
        out.statistic = 0.0;
        out.dof = static_cast<int>(m);
        out.p = 1.0;
        return out;
    }

    std::vector<double> eigenvalues;
    std::vector<std::vector<double>> v;
    jacobi_eigen(s, eigenvalues, v);
    double max_eig = 0.0;
    for (double e : eigenvalues) max_eig = std::max(max_eig, std::abs(e));
    double tol = max_eig * 1e-12;

    // statistic = d' S+ d = sum over eigenvalues > tol of (v_i . d)^2 / lambda_i
    double stat = 0.0;
    int rank = 0;
    for (size_t e = 0; e < eigenvalues.size(); ++e) {
        if (eigenvalues[e] <= tol) continue;
        ++rank;
        double proj = 0.0;
        for (size_t i = 0; i < m; ++i) proj += v[i][e] * d[i];
        stat += proj * proj / eigenvalues[e];
    }
    out.statistic = std::max(stat, 0.0);
    out.dof = rank < static_cast<int>(m) ? rank : static_cast<int>(m);
    out.p = out.dof > 0 ? chi_square_sf(out.statistic, out.dof) : 1.0;
    return out;
}

StuartMaxwellResult stuart_maxwell(std::span<const int> labels_a, std::span<const int> labels_b,
                                   int k) {
    if (labels_a.size() != labels_b.size()) {
        throw ValidationError("stuart_maxwell: labels must be paired over identical instances");
    }
    if (k < 2) throw ValidationError("stuart_maxwell: need k >= 2 categories");
    std::vector<std::vector<double>> table(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < labels_a.size(); ++i) {
        int a = labels_a[i];
        int b = labels_b[i];
        if (a < 0 || a >= k || b < 0 || b >= k) {
            throw ValidationError("stuart_maxwell: label outside [0, k)");
        }
        table[a][b] += 1.0;
    }
    return stuart_maxwell_from_table(table);
}

double bonferroni_threshold(int family_size, double alpha) {
    if (family_size < 1) throw ValidationError("bonferroni_threshold: family size must be >= 1");
    return alpha / static_cast<double>(family_size);
}

std::vector<CorrectedTest> bonferroni(const std::vector<double> & pvalues, int family_size,
                                      double alpha) {
    double threshold = bonferroni_threshold(family_size, alpha);
    std::vector<CorrectedTest> out;
    out.reserve(pvalues.size());
    for (double p : pvalues) {
        out.push_back({p, threshold, p < threshold});
    }
    return out;
}

DisagreementRate disagreement_rate(const std::vector<AnnotationRecord> & records,
                                   const std::vector<std::string> & group_persona_ids,
                                   int runs) {
    std::set<std::string> group(group_persona_ids.begin(), group_persona_ids.end());
    DisagreementRate out;
    for (int run = 1; run <= runs; ++run) {
        // instance -> labels from the group's personas in this run
        std::map<std::string, std::vector<int>> labels;
        for (const auto & r : records) {
            if (r.run != run || r.parse_status == ParseStatus::failed || !r.label) continue;
            if (!group.count(r.persona_id)) continue;
            labels[r.instance_id].push_back(*r.label);
        }
        size_t eligible = 0;
        size_t split = 0;
        for (const auto & [inst, ls] : labels) {
            if (ls.size() < 2) continue;
            ++eligible;
            if (std::set<int>(ls.begin(), ls.end()).size() > 1) ++split;
        }
        out.per_run.push_back(eligible == 0 ? 0.0
                                            : static_cast<double>(split) / static_cast<double>(eligible));
    }
    out.mean = mean_of(out.per_run);
    return out;
}

namespace {

// regularized incomplete gamma: series for P(s, z) when z < s + 1
double gamma_p_series(double s, double z) {
    double sum = 1.0 / s;
    double term = sum;
    for (int n = 1; n < 10000; ++n) {
        term *= z / (s + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-z + s * std::log(z) - std::lgamma(s));
}

// continued fraction for Q(s, z) when z >= s + 1 (modified Lentz)
double gamma_q_cf(double s, double z) {
    const double tiny = 1e-300;
    double b = z + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-17) break;
    }
    return h * std::exp(-z + s * std::log(z) - std::lgamma(s));
}

}  // namespace

double chi_square_sf(double x, int dof) {
    if (x < 0.0 || dof < 1) throw std::domain_error("chi_square_sf: x >= 0 and dof >= 1 required");
    if (x == 0.0) return 1.0;
    double s = static_cast<double>(dof) / 2.0;
    double z = x / 2.0;
    if (z < s + 1.0) {
        return 1.0 - gamma_p_series(s, z);
    }
    return gamma_q_cf(s, z);
}

}  // namespace ppaudit
