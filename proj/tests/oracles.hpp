#pragma once

// Reference implementations that share no code with the library. Each one
// trades speed for directness so a disagreement points at the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace teaming::oracle {

// Full-matrix Wagner-Fischer over code points.
inline std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
    std::vector<std::vector<std::size_t>> d(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
    for (std::size_t i = 0; i <= a.size(); ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= b.size(); ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = d[i - 1][j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, sub});
        }
    }
    return d[a.size()][b.size()];
}

inline double similarity(const std::u32string& a, const std::u32string& b) {
    const double longest = static_cast<double>(std::max(a.size(), b.size()));
    return 1.0 - static_cast<double>(levenshtein(a, b)) / longest;
}

// holds[m] = set of demanded skill indices member m holds.
using Holdings = std::vector<std::set<int>>;

inline std::set<int> covered(const Holdings& holds, std::uint32_t removed_mask) {
    std::set<int> out;
    for (std::size_t m = 0; m < holds.size(); ++m) {
        if (removed_mask & (1u << m)) continue;
        out.insert(holds[m].begin(), holds[m].end());
    }
    return out;
}

// Largest k such that every removal of k members keeps the covered set;
// enumerates all 2^n removal subsets.
inline int k_robustness(const Holdings& holds) {
    const std::size_t n = holds.size();
    if (n == 0) return 0;
    const auto full = covered(holds, 0);
    std::size_t smallest_breaking = n;  // removing everyone is never allowed
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
        if (size >= n) continue;
        if (covered(holds, mask) != full) smallest_breaking = std::min(smallest_breaking, size);
    }
    return static_cast<int>(smallest_breaking) - 1;
}

inline double coverage(const Holdings& holds, int demand) {
    return static_cast<double>(covered(holds, 0).size()) / demand;
}

inline double redundancy(const Holdings& holds, int demand) {
    int shared = 0;
    for (int s = 0; s < demand; ++s) {
        int n = 0;
        for (const auto& h : holds) n += static_cast<int>(h.count(s));
        if (n >= 2) ++shared;
    }
    return static_cast<double>(shared) / demand;
}

// Default weights (-1, -1, +1, +1); robustness earns nothing without coverage.
inline double goodness(double coverage, double robustness, double redundancy, double size) {
    if (coverage == 0.0) robustness = 0.0;
    const double g = (coverage + robustness - redundancy - size) / 2.0;
    return g < 0.0 ? 0.0 : (g > 1.0 ? 1.0 : g);
}

struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exhaustive split search by sum-of-squared-error reduction. Candidate
// thresholds are midpoints between adjacent distinct values. Among splits
// whose gain is within eps of the best, the widest gap relative to the
// feature's range wins; remaining ties keep the earliest (feature,
// threshold).
inline SplitChoice best_split(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                              std::size_t min_leaf) {
    const double eps = 1e-12;
    auto sse = [](const std::vector<double>& v) {
        if (v.empty()) return 0.0;
        double mean = 0.0;
        for (double a : v) mean += a;
        mean /= static_cast<double>(v.size());
        double s = 0.0;
        for (double a : v) s += (a - mean) * (a - mean);
        return s;
    };
    const double parent = sse(y);
    struct Cand {
        int feature;
        double threshold;
        double gain;
        double margin;
    };
    std::vector<Cand> cands;
    const std::size_t nf = x.empty() ? 0 : x[0].size();
    for (std::size_t f = 0; f < nf; ++f) {
        std::set<double> values;
        for (const auto& row : x) values.insert(row[f]);
        if (values.size() < 2) continue;
        const double range = *values.rbegin() - *values.begin();
        for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
            const double lo = *it;
            const double hi = *std::next(it);
            const double t = lo + (hi - lo) / 2.0;
            std::vector<double> left;
            std::vector<double> right;
            for (std::size_t i = 0; i < x.size(); ++i) (x[i][f] <= t ? left : right).push_back(y[i]);
            if (left.size() < min_leaf || right.size() < min_leaf) continue;
            cands.push_back({static_cast<int>(f), t, parent - sse(left) - sse(right), (hi - lo) / range});
        }
    }
    if (cands.empty()) return {};
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& c : cands) top = std::max(top, c.gain);
    if (top <= eps) return {};
    const Cand* pick = nullptr;
    for (const auto& c : cands) {
        if (c.gain < top - 1e-9) continue;
        if (pick == nullptr || c.margin > pick->margin + eps) pick = &c;
    }
    return {pick->feature, pick->threshold, pick->gain};
}

// Plain logistic regression by full-batch gradient descent on standardized
// features. Returns weights with the bias last.
inline std::vector<double> logistic_fit(const std::vector<std::vector<double>>& x, const std::vector<int>& y,
                                        int epochs = 20000, double rate = 0.5) {
    const std::size_t n = x.size();
    const std::size_t d = x[0].size();
    std::vector<double> mean(d, 0.0);
    std::vector<double> scale(d, 0.0);
    for (const auto& row : x)
        for (std::size_t j = 0; j < d; ++j) mean[j] += row[j] / static_cast<double>(n);
    for (const auto& row : x)
        for (std::size_t j = 0; j < d; ++j) scale[j] += (row[j] - mean[j]) * (row[j] - mean[j]) / static_cast<double>(n);
    for (auto& s : scale) s = s > 0.0 ? std::sqrt(s) : 1.0;

    std::vector<double> w(d + 1, 0.0);
    for (int e = 0; e < epochs; ++e) {
        std::vector<double> grad(d + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double z = w[d];
            for (std::size_t j = 0; j < d; ++j) z += w[j] * (x[i][j] - mean[j]) / scale[j];
            const double p = 1.0 / (1.0 + std::exp(-z));
            const double r = p - y[i];
            for (std::size_t j = 0; j < d; ++j) grad[j] += r * (x[i][j] - mean[j]) / scale[j];
            grad[d] += r;
        }
        for (std::size_t j = 0; j <= d; ++j) w[j] -= rate * grad[j] / static_cast<double>(n);
    }
    // fold the standardization back into raw-feature weights
    std::vector<double> raw(d + 1, 0.0);
    raw[d] = w[d];
    for (std::size_t j = 0; j < d; ++j) {
        raw[j] = w[j] / scale[j];
        raw[d] -= w[j] * mean[j] / scale[j];
    }
    return raw;
}

inline int logistic_predict(const std::vector<double>& w, const std::vector<double>& row) {
    double z = w.back();
    for (std::size_t j = 0; j < row.size(); ++j) z += w[j] * row[j];
    return z > 0.0 ? 1 : 0;
}

}  // namespace teaming::oracle
