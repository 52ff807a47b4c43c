// SPDX-License-Identifier: Apache-2.0
//
// Independent oracles for the test suite. Everything here is deliberately
// naive (central differences, O(n^2) rank counting, textbook statistics) so
// the library is checked against straightforward re-derivations, not itself.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracles {

// Central finite difference of a scalar function at x, one coordinate at a time.
inline std::vector<double> finite_difference(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& x, double step = 1e-4) {
    std::vector<double> grad(x.size());
    std::vector<double> probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + step;
        double up = f(probe);
        probe[i] = x[i] - step;
        double down = f(probe);
        probe[i] = x[i];
        grad[i] = (up - down) / (2.0 * step);
    }
    return grad;
}

// Largest relative disagreement between two gradient vectors; the scale floor
// keeps near-zero entries from exploding the ratio.
inline double max_relative_error(const std::vector<double>& a,
                                 const std::vector<double>& b,
                                 double scale_floor = 1e-6) {
    if (a.size() != b.size()) throw std::invalid_argument("gradient size mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double scale = std::max({std::abs(a[i]), std::abs(b[i]), scale_floor});
        worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    }
    return worst;
}

// O(n^2) average precision with stable tie order: frame i's rank counts every
// frame with a strictly higher score plus earlier frames with an equal score.
inline double brute_force_ap(const std::vector<double>& scores,
                             const std::vector<bool>& positives) {
    std::size_t n = scores.size();
    auto rank_of = [&](std::size_t i) {
        std::size_t r = 1;
        for (std::size_t j = 0; j < n; ++j) {
            if (scores[j] > scores[i]) ++r;
            else if (scores[j] == scores[i] && j < i) ++r;
        }
        return r;
    };
    double sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!positives[i]) continue;
        ++n_pos;
        std::size_t my_rank = rank_of(i);
        std::size_t tp = 0;
        for (std::size_t j = 0; j < n; ++j)
            if (positives[j] && rank_of(j) <= my_rank) ++tp;
        sum += static_cast<double>(tp) / static_cast<double>(my_rank);
    }
    if (n_pos == 0) throw std::invalid_argument("brute_force_ap needs a positive");
    return sum / static_cast<double>(n_pos);
}

inline double brute_force_cap(const std::vector<double>& scores,
                              const std::vector<bool>& positives) {
    std::size_t n = scores.size();
    std::size_t n_pos = static_cast<std::size_t>(
        std::count(positives.begin(), positives.end(), true));
    std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("brute_force_cap needs both kinds");
    double w = static_cast<double>(n_neg) / static_cast<double>(n_pos);
    auto rank_of = [&](std::size_t i) {
        std::size_t r = 1;
        for (std::size_t j = 0; j < n; ++j) {
            if (scores[j] > scores[i]) ++r;
            else if (scores[j] == scores[i] && j < i) ++r;
        }
        return r;
    };
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!positives[i]) continue;
        std::size_t my_rank = rank_of(i);
        double tp = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (positives[j] && rank_of(j) <= my_rank) tp += 1.0;
        double fp = static_cast<double>(my_rank) - tp;
        sum += tp / (tp + fp / w);
    }
    return sum / static_cast<double>(n_pos);
}

// Pearson chi-square statistic for observed counts vs expected probabilities.
inline double chi_square_statistic(const std::vector<std::size_t>& observed,
                                   const std::vector<double>& expected_probs,
                                   std::size_t total) {
    if (observed.size() != expected_probs.size())
        throw std::invalid_argument("chi-square size mismatch");
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double expected = expected_probs[i] * static_cast<double>(total);
        double diff = static_cast<double>(observed[i]) - expected;
        stat += diff * diff / expected;
    }
    return stat;
}

// 0.99 quantiles of the chi-square distribution: stat below the quantile
// means p > 0.01 for the goodness-of-fit test at that df.
inline double chi_square_crit_99(std::size_t df) {
    static const double table[] = {0.0,    6.635,  9.210,  11.345, 13.277,
                                   15.086, 16.812, 18.475, 20.090, 21.666};
    if (df == 0 || df >= sizeof(table) / sizeof(table[0]))
        throw std::invalid_argument("chi-square df out of table range");
    return table[df];
}

// Average ranks (ties share the mean of their positions).
inline std::vector<double> average_ranks(const std::vector<double>& v) {
    std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
        i = j + 1;
    }
    return ranks;
}

// Spearman rank correlation (Pearson correlation of the rank vectors).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("spearman needs two congruent series");
    std::vector<double> rx = average_ranks(x);
    std::vector<double> ry = average_ranks(y);
    double n = static_cast<double>(x.size());
    double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double cov = 0.0, vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    if (vx == 0.0 || vy == 0.0) return 0.0;
    return cov / std::sqrt(vx * vy);
}

}  // namespace oracles
