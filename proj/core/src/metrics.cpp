#include "ppaudit/metrics.hpp"

#include "ppaudit/util.hpp"

#include <cmath>

namespace ppaudit {

namespace {

void check_paired(std::span<const int> pred, std::span<const int> gold, const char * op) {
    if (pred.size() != gold.size()) {
        throw ValidationError(std::string(op) + ": pred/gold size mismatch");
    }
    if (pred.empty()) {
        throw ValidationError(std::string(op) + ": undefined on an empty record set");
    }
}

}  // namespace

double accuracy(std::span<const int> pred, std::span<const int> gold) {
    check_paired(pred, gold, "accuracy");
    size_t correct = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (pred[i] == gold[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pred.size());
}

double macro_f1(std::span<const int> pred, std::span<const int> gold, int num_classes,
                const std::set<int> & excluded) {
    check_paired(pred, gold, "macro_f1");
    std::vector<long> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
    for (size_t i = 0; i < pred.size(); ++i) {
        int p = pred[i];
        int g = gold[i];
        if (p < 0 || p >= num_classes || g < 0 || g >= num_classes) {
            throw ValidationError("macro_f1: label outside class universe");
        }
        if (p == g) {
            ++tp[p];
        } else {
            ++fp[p];
            ++fn[g];
        }
    }
    double sum = 0.0;
    int counted = 0;
    for (int c = 0; c < num_classes; ++c) {
        if (excluded.count(c)) continue;
        double denom = 2.0 * tp[c] + fp[c] + fn[c];
        double f1 = denom > 0.0 ? (2.0 * tp[c]) / denom : 0.0;
        sum += f1;
        ++counted;
    }
    if (counted == 0) throw ValidationError("macro_f1: all classes excluded");
    return sum / counted;
}

double mae_percent(std::span<const int> pred, std::span<const int> gold) {
    check_paired(pred, gold, "mae");
    double s = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - gold[i]);
    return 100.0 * s / static_cast<double>(pred.size());
}

double mean_error_percent(std::span<const int> pred, std::span<const int> gold) {
    check_paired(pred, gold, "mean_error");
    double s = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) s += pred[i] - gold[i];
    return 100.0 * s / static_cast<double>(pred.size());
}

std::map<std::pair<int, int>, double> overflag_matrix(std::span<const int> pred,
                                                      std::span<const int> gold,
                                                      int num_classes) {
    if (pred.size() != gold.size()) throw ValidationError("overflag_matrix: size mismatch");
    std::vector<long> support(num_classes, 0);
    std::vector<std::vector<long>> counts(num_classes, std::vector<long>(num_classes, 0));
    for (size_t i = 0; i < pred.size(); ++i) {
        int p = pred[i];
        int g = gold[i];
        if (p < 0 || p >= num_classes || g < 0 || g >= num_classes) {
            throw ValidationError("overflag_matrix: label outside class universe");
        }
        ++support[g];
        ++counts[g][p];
    }
    std::map<std::pair<int, int>, double> out;
    for (int g = 0; g < num_classes; ++g) {
        if (support[g] == 0) continue;
        for (int p = 0; p < num_classes; ++p) {
            if (p == g) continue;
            out[{g, p}] = static_cast<double>(counts[g][p]) / static_cast<double>(support[g]);
        }
    }
    return out;
}

namespace {

struct MaskOverlap {
    size_t np = 0;     // |P|
    size_t ng = 0;     // |G|
    size_t inter = 0;  // |P ∩ G|
};

MaskOverlap overlap(const Mask & pred, const Mask & gold, const char * op) {
    if (pred.size() != gold.size()) {
        throw ValidationError(std::string(op) + ": mask length mismatch (" +
                              std::to_string(pred.size()) + " vs " + std::to_string(gold.size()) + ")");
    }
    MaskOverlap o;
    for (size_t i = 0; i < pred.size(); ++i) {
        if (pred[i]) ++o.np;
        if (gold[i]) ++o.ng;
        if (pred[i] && gold[i]) ++o.inter;
    }
    return o;
}

}  // namespace

double token_f1(const Mask & pred, const Mask & gold, bool both_empty_is_one) {
    MaskOverlap o = overlap(pred, gold, "token_f1");
    if (o.np == 0 && o.ng == 0) return both_empty_is_one ? 1.0 : 0.0;
    if (o.np == 0 || o.ng == 0) return 0.0;
    double p = static_cast<double>(o.inter) / static_cast<double>(o.np);
    double r = static_cast<double>(o.inter) / static_cast<double>(o.ng);
    if (p + r == 0.0) return 0.0;
    return 2.0 * p * r / (p + r);
}

double iou(const Mask & pred, const Mask & gold) {
    MaskOverlap o = overlap(pred, gold, "iou");
    size_t uni = o.np + o.ng - o.inter;
    if (uni == 0) return 1.0;
    return static_cast<double>(o.inter) / static_cast<double>(uni);
}

double mean_token_f1(std::span<const MaskPair> pairs, bool both_empty_is_one) {
    if (pairs.empty()) throw ValidationError("mean_token_f1: undefined on an empty set");
    double s = 0.0;
    for (const auto & pr : pairs) s += token_f1(pr.pred, pr.gold, both_empty_is_one);
    return s / static_cast<double>(pairs.size());
}

double iou_f1(std::span<const MaskPair> pairs, double threshold) {
    if (pairs.empty()) throw ValidationError("iou_f1: undefined on an empty set");
    size_t hits = 0;
    for (const auto & pr : pairs) {
        if (iou(pr.pred, pr.gold) >= threshold) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(pairs.size());
}

ScoreTable make_score_table(std::string metric, std::vector<double> per_run, std::string unit) {
    ScoreTable t;
    t.metric = std::move(metric);
    t.per_run = std::move(per_run);
    t.mean = mean_of(t.per_run);
    t.stddev = stddev_of(t.per_run);
    t.unit = std::move(unit);
    return t;
}

}  // namespace ppaudit
