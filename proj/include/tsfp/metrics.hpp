// Copyright 2026 The tsfp Authors
// SPDX-License-Identifier: Apache-2.0
//
// Evaluation metrics (higher is better): NSS, CC, SIM, AUC-Judd and shuffled
// AUC, plus the frame -> video -> dataset aggregation and the line-oriented
// report. NSS and CC are exactly the negated training losses. The ROC metrics
// threshold at every distinct saliency value observed at a positive location
// (>= comparisons), anchor the curve at (0,0) and (1,1) and integrate by
// trapezoid; negatives are all non-fixated pixels for AUC-Judd and an
// explicit caller-supplied fixation set for s-AUC.

#pragma once

#include <algorithm>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "tsfp/losses.hpp"

namespace tsfp {

struct MetricValue {
    double value = 0.0;
    bool degenerate = false;
};

template <typename T>
MetricValue metric_nss(const Tensor<T>& saliency, const Tensor<T>& fixations) {
    autograd::NoGradGuard guard;
    const LossValue<T> loss = loss_nss(saliency, fixations);
    return {loss.degenerate ? 0.0 : -static_cast<double>(loss.value.item()), loss.degenerate};
}

template <typename T>
MetricValue metric_cc(const Tensor<T>& saliency, const Tensor<T>& density) {
    autograd::NoGradGuard guard;
    const LossValue<T> loss = loss_cc(saliency, density);
    return {loss.degenerate ? 0.0 : -static_cast<double>(loss.value.item()), loss.degenerate};
}

// Histogram intersection of sum-normalized maps, in [0,1].
template <typename T>
double metric_sim(const Tensor<T>& saliency, const Tensor<T>& density) {
    if (saliency.shape() != density.shape())
        throw ShapeError("shape", "metric_sim: map shapes differ");
    double s_sum = 0.0, g_sum = 0.0;
    for (auto v : saliency.data()) s_sum += static_cast<double>(v);
    for (auto v : density.data()) g_sum += static_cast<double>(v);
    if (s_sum <= 0.0 || g_sum <= 0.0)
        throw std::invalid_argument("metric_sim: zero-sum map");
    double acc = 0.0;
    for (std::int64_t i = 0; i < saliency.size(); ++i)
        acc += std::min(static_cast<double>(saliency.data()[i]) / s_sum,
                        static_cast<double>(density.data()[i]) / g_sum);
    return acc;
}

namespace detail {

// Threshold sweep over the distinct saliency values at positive locations.
// Between two consecutive positive thresholds the true-positive rate is
// constant, so skipping intermediate values only drops collinear points and
// the trapezoid area matches a sweep over every distinct map value.
inline double roc_area(const std::vector<double>& sal, const std::vector<std::uint8_t>& pos,
                       const std::vector<std::uint8_t>& neg, std::int64_t n_pos,
                       std::int64_t n_neg) {
    std::set<double, std::greater<double>> thresholds;
    for (std::size_t i = 0; i < sal.size(); ++i)
        if (pos[i]) thresholds.insert(sal[i]);

    double area = 0.0;
    double prev_fpr = 0.0, prev_tpr = 0.0;
    for (double th : thresholds) {
        std::int64_t tp = 0, fp = 0;
        for (std::size_t i = 0; i < sal.size(); ++i) {
            if (sal[i] >= th) {
                if (pos[i]) ++tp;
                if (neg[i]) ++fp;
            }
        }
        const double tpr = static_cast<double>(tp) / static_cast<double>(n_pos);
        const double fpr = static_cast<double>(fp) / static_cast<double>(n_neg);
        area += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    area += (1.0 - prev_fpr) * (1.0 + prev_tpr) / 2.0;
    return area;
}

template <typename T>
std::vector<double> as_doubles(const Tensor<T>& t) {
    return std::vector<double>(t.data().begin(), t.data().end());
}

template <typename T>
std::vector<std::uint8_t> as_mask(const Tensor<T>& t) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(t.size()));
    for (std::int64_t i = 0; i < t.size(); ++i) mask[i] = t.data()[i] != T(0) ? 1 : 0;
    return mask;
}

}  // namespace detail

// AUC-Judd: positives are the fixated pixels, negatives every other pixel.
// A map whose every pixel is fixated has no negatives; that degenerate case
// is flagged at chance level.
template <typename T>
MetricValue metric_auc_judd(const Tensor<T>& saliency, const Tensor<T>& fixations) {
    if (saliency.shape() != fixations.shape())
        throw ShapeError("shape", "metric_auc_judd: map shapes differ");
    const auto sal = detail::as_doubles(saliency);
    const auto pos = detail::as_mask(fixations);
    std::vector<std::uint8_t> neg(pos.size());
    std::int64_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        neg[i] = pos[i] ? 0 : 1;
        n_pos += pos[i];
        n_neg += neg[i];
    }
    if (n_pos == 0) throw std::invalid_argument("metric_auc_judd: no fixations");
    if (n_neg == 0) return {0.5, true};
    return {detail::roc_area(sal, pos, neg, n_pos, n_neg), false};
}

// Shuffled AUC: negatives are an explicit fixation set pooled from other
// frames/videos by the caller; no implicit sampling.
template <typename T>
MetricValue metric_sauc(const Tensor<T>& saliency, const Tensor<T>& fixations,
                        const Tensor<T>& negatives) {
    if (saliency.shape() != fixations.shape() || saliency.shape() != negatives.shape())
        throw ShapeError("shape", "metric_sauc: map shapes differ");
    const auto sal = detail::as_doubles(saliency);
    const auto pos = detail::as_mask(fixations);
    const auto neg = detail::as_mask(negatives);
    std::int64_t n_pos = 0, n_neg = 0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
        n_pos += pos[i];
        n_neg += neg[i];
    }
    if (n_pos == 0) throw std::invalid_argument("metric_sauc: no fixations");
    if (n_neg == 0) throw std::invalid_argument("metric_sauc: empty negative set");
    return {detail::roc_area(sal, pos, neg, n_pos, n_neg), false};
}

// Per-frame metric record.
struct FrameEval {
    std::string video;
    int frame = 0;  // 1-based
    MetricValue nss, cc, sim, auc_j, s_auc;
};

struct AggValue {
    double mean = 0.0;
    int used = 0;      // entries that contributed
    int excluded = 0;  // degenerate entries left out
};

struct EvalAggregate {
    AggValue nss, cc, sim, auc_j, s_auc;
};

namespace detail {

inline void fold(AggValue& agg, const MetricValue& v) {
    if (v.degenerate) {
        ++agg.excluded;
        return;
    }
    agg.mean += v.value;
    ++agg.used;
}

inline void finish(AggValue& agg) {
    if (agg.used > 0) agg.mean /= agg.used;
}

inline void fold_video(AggValue& agg, const AggValue& video) {
    agg.excluded += video.excluded;
    if (video.used == 0) return;
    agg.mean += video.mean;
    ++agg.used;
}

}  // namespace detail

// Unweighted mean over the frames of one video; degenerate frames are
// excluded per metric and counted.
inline EvalAggregate aggregate_frames(const std::vector<FrameEval>& frames) {
    EvalAggregate agg;
    for (const auto& f : frames) {
        detail::fold(agg.nss, f.nss);
        detail::fold(agg.cc, f.cc);
        detail::fold(agg.sim, f.sim);
        detail::fold(agg.auc_j, f.auc_j);
        detail::fold(agg.s_auc, f.s_auc);
    }
    detail::finish(agg.nss);
    detail::finish(agg.cc);
    detail::finish(agg.sim);
    detail::finish(agg.auc_j);
    detail::finish(agg.s_auc);
    return agg;
}

// Unweighted mean over per-video means, regardless of frame counts. A video
// with no valid frames for a metric does not contribute to that metric.
inline EvalAggregate aggregate_videos(const std::vector<EvalAggregate>& videos) {
    EvalAggregate agg;
    for (const auto& v : videos) {
        detail::fold_video(agg.nss, v.nss);
        detail::fold_video(agg.cc, v.cc);
        detail::fold_video(agg.sim, v.sim);
        detail::fold_video(agg.auc_j, v.auc_j);
        detail::fold_video(agg.s_auc, v.s_auc);
    }
    detail::finish(agg.nss);
    detail::finish(agg.cc);
    detail::finish(agg.sim);
    detail::finish(agg.auc_j);
    detail::finish(agg.s_auc);
    return agg;
}

namespace detail {

inline std::string fmt_metric(const MetricValue& v) {
    if (v.degenerate) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v.value);
    return buf;
}

inline std::string fmt_agg(const AggValue& v) {
    if (v.used == 0) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v.mean);
    return buf;
}

}  // namespace detail

// Line-oriented evaluation report: one row per frame in input order, then one
// aggregate row per video (first-appearance order), a dataset aggregate row
// and a degenerate-exclusion count row. Ordering is deterministic so reports
// can be diffed.
inline std::string format_report(const std::vector<FrameEval>& frames) {
    std::string out = "video,frame,nss,cc,sim,aucj,sauc\n";
    std::vector<std::string> order;
    std::vector<std::vector<FrameEval>> grouped;
    for (const auto& f : frames) {
        out += f.video + "," + std::to_string(f.frame) + "," + detail::fmt_metric(f.nss) + "," +
               detail::fmt_metric(f.cc) + "," + detail::fmt_metric(f.sim) + "," +
               detail::fmt_metric(f.auc_j) + "," + detail::fmt_metric(f.s_auc) + "\n";
        auto it = std::find(order.begin(), order.end(), f.video);
        if (it == order.end()) {
            order.push_back(f.video);
            grouped.emplace_back();
            it = order.end() - 1;
        }
        grouped[static_cast<std::size_t>(it - order.begin())].push_back(f);
    }
    std::vector<EvalAggregate> per_video;
    for (std::size_t i = 0; i < order.size(); ++i) {
        per_video.push_back(aggregate_frames(grouped[i]));
        const auto& a = per_video.back();
        out += "agg," + order[i] + "," + detail::fmt_agg(a.nss) + "," + detail::fmt_agg(a.cc) +
               "," + detail::fmt_agg(a.sim) + "," + detail::fmt_agg(a.auc_j) + "," +
               detail::fmt_agg(a.s_auc) + "\n";
    }
    const EvalAggregate all = aggregate_videos(per_video);
    out += "agg,all," + detail::fmt_agg(all.nss) + "," + detail::fmt_agg(all.cc) + "," +
           detail::fmt_agg(all.sim) + "," + detail::fmt_agg(all.auc_j) + "," +
           detail::fmt_agg(all.s_auc) + "\n";
    out += "excluded,all," + std::to_string(all.nss.excluded) + "," +
           std::to_string(all.cc.excluded) + "," + std::to_string(all.sim.excluded) + "," +
           std::to_string(all.auc_j.excluded) + "," + std::to_string(all.s_auc.excluded) + "\n";
    return out;
}

}  // namespace tsfp
