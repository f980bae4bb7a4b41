#include "qrouter/selection.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>

namespace qrouter::selection {

FrameIndexSet top_k(const extractor::FrameProbabilities& probs, std::size_t k) {
    std::vector<std::size_t> order(probs.size());
    std::iota(order.begin(), order.end(), std::size_t{1});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return probs.at(a) > probs.at(b); });
    order.resize(std::min(k, order.size()));
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<std::size_t> fps_hsv(const std::vector<std::size_t>& candidates,
                                 const std::vector<HsvHistogram>& histograms,
                                 const extractor::FrameProbabilities& probs, std::size_t k) {
    std::vector<std::size_t> pool(candidates);
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

    std::vector<std::size_t> picked;
    if (k == 0 || pool.empty()) return picked;
    for (std::size_t t : pool) {
        if (t < 1 || t > histograms.size() || t > probs.size()) throw Error("fps_hsv: candidate index out of range");
    }

    std::size_t seed = pool.front();
    for (std::size_t t : pool) {
        if (probs.at(t) > probs.at(seed)) seed = t;
    }
    picked.push_back(seed);

    // min distance from each candidate to the picked set
    std::vector<double> min_dist(pool.size(), std::numeric_limits<double>::infinity());
    std::vector<bool> taken(pool.size(), false);
    auto refresh = [&](std::size_t newest) {
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (pool[i] == newest) taken[i] = true;
            if (taken[i]) continue;
            const double d = features::bhattacharyya(histograms[pool[i] - 1], histograms[newest - 1]);
            min_dist[i] = std::min(min_dist[i], d);
        }
    };
    refresh(seed);

    const std::size_t budget = std::min(k, pool.size());
    while (picked.size() < budget) {
        std::size_t best = pool.size();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            if (taken[i]) continue;
            if (best == pool.size() || min_dist[i] > min_dist[best]) best = i;
        }
        picked.push_back(pool[best]);
        refresh(pool[best]);
    }
    return picked;
}

FrameIndexSet shot_boundaries(const features::FeatureMatrix& matrix, double theta_shot) {
    if (!(theta_shot > 0.0)) throw Error("theta_shot must be > 0");
    FrameIndexSet out;
    for (std::size_t t = 1; t <= matrix.size(); ++t) {
        if (matrix.rows[t - 1][features::kHistDistPrev] > theta_shot) out.push_back(t);
    }
    return out;
}

FrameIndexSet diversified_selection(const extractor::FrameProbabilities& probs,
                                    const std::vector<HsvHistogram>& histograms,
                                    const features::FeatureMatrix& matrix, const SelectionBudget& budget,
                                    double theta_shot) {
    std::set<std::size_t> merged;
    for (std::size_t t : top_k(probs, budget.k_top)) merged.insert(t);

    std::vector<std::size_t> all(probs.size());
    std::iota(all.begin(), all.end(), std::size_t{1});
    for (std::size_t t : fps_hsv(all, histograms, probs, budget.k_fps)) merged.insert(t);

    for (std::size_t t : shot_boundaries(matrix, theta_shot)) merged.insert(t);
    return {merged.begin(), merged.end()};
}

}  // namespace qrouter::selection
