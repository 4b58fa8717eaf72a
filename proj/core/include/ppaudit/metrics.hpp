#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ppaudit {

using Mask = std::vector<uint8_t>;

// Ordinal severity scale for hate3 labels: Normal(0) < Offensive(1) < Hate(2).
// Predictions/golds below are label indices on this scale.

// Fraction of predictions equal to gold. Throws ValidationError on empty
// input (undefined metric).
double accuracy(std::span<const int> pred, std::span<const int> gold);

// Unweighted mean of per-class F1 over the non-excluded classes of a fixed
// class universe [0, num_classes). Predictions of an excluded class still
// count against the true class's recall; a class absent from both gold and
// predictions contributes F1 = 0.
double macro_f1(std::span<const int> pred, std::span<const int> gold, int num_classes,
                const std::set<int> & excluded = {});

// 100 x mean |pred - gold| over the ordinal scale.
double mae_percent(std::span<const int> pred, std::span<const int> gold);
// 100 x mean (pred - gold); sign preserved.
double mean_error_percent(std::span<const int> pred, std::span<const int> gold);

// rate(g -> p) = count(gold=g, pred=p) / count(gold=g) for p != g.
// Gold rows with zero support are absent from the map.
std::map<std::pair<int, int>, double> overflag_matrix(std::span<const int> pred,
                                                      std::span<const int> gold,
                                                      int num_classes);

// Token-level F1 between two equal-length binary masks.
// Conventions: both empty -> 1.0 (configurable), exactly one empty -> 0.0.
double token_f1(const Mask & pred, const Mask & gold, bool both_empty_is_one = true);

double iou(const Mask & pred, const Mask & gold);

struct MaskPair {
    Mask pred;
    Mask gold;
};

// Mean token F1 over instances.
double mean_token_f1(std::span<const MaskPair> pairs, bool both_empty_is_one = true);

// Fraction of instances whose IOU meets the threshold.
double iou_f1(std::span<const MaskPair> pairs, double threshold = 0.5);

// Per-metric aggregation over independent runs: values are kept per run and
// summarized as mean and spread (divides by the run count).
struct ScoreTable {
    std::string metric;
    std::vector<double> per_run;
    double mean = 0.0;
    double stddev = 0.0;
    std::string unit = "percent";
};

ScoreTable make_score_table(std::string metric, std::vector<double> per_run,
                            std::string unit = "percent");

}  // namespace ppaudit
