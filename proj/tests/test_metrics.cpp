#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "mft/core/errors.hpp"
#include "mft/core/rng.hpp"
#include "mft/eval/metrics.hpp"

using namespace mft;

namespace {

// Brute-force oracle: confusion counts by direct enumeration and AUC by
// pairwise comparison (ties count half).
struct OracleReport {
    size_t tp = 0, fp = 0, tn = 0, fn = 0;
    double auc = 0.0;
};

OracleReport oracle(const std::vector<double>& scores, const std::vector<int>& labels,
                    double threshold) {
    OracleReport r;
    for (size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] > threshold;
        if (pred && labels[i] == 1) ++r.tp;
        if (pred && labels[i] == 0) ++r.fp;
        if (!pred && labels[i] == 0) ++r.tn;
        if (!pred && labels[i] == 1) ++r.fn;
    }
    double wins = 0.0;
    size_t pairs = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    r.auc = pairs == 0 ? 0.0 : wins / static_cast<double>(pairs);
    return r;
}

}  // namespace

TEST_CASE("hand confusion matrix: acc 0.75, precision 1, recall 0.5, f1 2/3") {
    auto r = compute_metrics({0.9, 0.4, 0.2, 0.1}, {1, 1, 0, 0});
    CHECK(r.acc == doctest::Approx(0.75));
    CHECK(r.precision == doctest::Approx(1.0));
    CHECK(r.recall == doctest::Approx(0.5));
    CHECK(r.f1 == doctest::Approx(2.0 / 3.0));
    CHECK(r.tp == 1);
    CHECK(r.fn == 1);
    CHECK(r.tn == 2);
    CHECK(r.fp == 0);
}

TEST_CASE("perfect scores give all ones") {
    auto r = compute_metrics({0.99, 0.98, 0.01, 0.02}, {1, 1, 0, 0});
    CHECK(r.acc == 1.0);
    CHECK(r.auc == 1.0);
    CHECK(r.f1 == 1.0);
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 1.0);
}

TEST_CASE("all-negative predictions on mixed labels define precision as 0") {
    auto r = compute_metrics({0.1, 0.2, 0.3}, {1, 0, 1});
    CHECK(r.precision == 0.0);
    CHECK(r.recall == 0.0);
    CHECK(r.f1 == 0.0);
}

TEST_CASE("roc_auc endpoints and tie convention") {
    CHECK(roc_auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
    CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, {1, 1, 0, 0}) == 0.0);
    CHECK(roc_auc({0.5, 0.5}, {1, 0}) == doctest::Approx(0.5));
}

TEST_CASE("errors: empty input, size mismatch, bad labels, single class") {
    CHECK_THROWS_AS(compute_metrics({}, {}), ContractError);
    CHECK_THROWS_AS(compute_metrics({0.5}, {1, 0}), ContractError);
    CHECK_THROWS_AS(compute_metrics({0.5}, {2}), DataError);
    CHECK_THROWS_AS(roc_auc({0.5, 0.6}, {1, 1}), ContractError);
    // compute_metrics survives single-class input but marks auc undefined
    auto r = compute_metrics({0.2, 0.6}, {1, 1});
    CHECK(!r.auc_defined);
}

TEST_CASE("matches brute-force enumeration on 1000 random instances") {
    Rng rng(606);
    for (int rep = 0; rep < 1000; ++rep) {
        const size_t n = 2 + rng.below(40);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool has_pos = false, has_neg = false;
        for (size_t i = 0; i < n; ++i) {
            // quantized scores produce plenty of ties
            scores[i] = std::round(rng.uniform() * 8.0) / 8.0;
            labels[i] = rng.bernoulli(0.4) ? 1 : 0;
            (labels[i] == 1 ? has_pos : has_neg) = true;
        }
        const double threshold = rng.uniform(0.1, 0.9);
        auto want = oracle(scores, labels, threshold);
        auto got = compute_metrics(scores, labels, threshold);
        CHECK(got.tp == want.tp);
        CHECK(got.fp == want.fp);
        CHECK(got.tn == want.tn);
        CHECK(got.fn == want.fn);
        if (has_pos && has_neg)
            CHECK(std::abs(roc_auc(scores, labels) - want.auc) < 1e-12);
    }
}

TEST_CASE("auc is invariant under strictly monotone score transforms") {
    Rng rng(707);
    for (int rep = 0; rep < 50; ++rep) {
        const size_t n = 5 + rng.below(30);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        labels[0] = 1;
        labels[1] = 0;
        for (size_t i = 0; i < n; ++i) {
            scores[i] = rng.uniform(-3, 3);
            if (i > 1) labels[i] = rng.bernoulli(0.5) ? 1 : 0;
        }
        const double base = roc_auc(scores, labels);
        std::vector<double> warped(n);
        for (size_t i = 0; i < n; ++i) warped[i] = std::tanh(scores[i]) * 5.0 + 1.0;
        CHECK(roc_auc(warped, labels) == doctest::Approx(base).epsilon(1e-12));
        for (size_t i = 0; i < n; ++i) warped[i] = std::exp(scores[i]);
        CHECK(roc_auc(warped, labels) == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("raising the threshold never increases recall") {
    Rng rng(808);
    std::vector<double> scores(60);
    std::vector<int> labels(60);
    for (size_t i = 0; i < scores.size(); ++i) {
        scores[i] = rng.uniform();
        labels[i] = rng.bernoulli(0.5) ? 1 : 0;
    }
    labels[0] = 1;
    double prev = 1.0;
    for (double t = 0.0; t <= 1.0; t += 0.05) {
        auto r = compute_metrics(scores, labels, t);
        CHECK(r.recall <= prev + 1e-12);
        prev = r.recall;
    }
}

TEST_CASE("confusion counts always sum to the sample count") {
    Rng rng(909);
    for (int rep = 0; rep < 100; ++rep) {
        const size_t n = 1 + rng.below(50);
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        for (size_t i = 0; i < n; ++i) {
            scores[i] = rng.uniform();
            labels[i] = rng.bernoulli(0.3) ? 1 : 0;
        }
        auto r = compute_metrics(scores, labels);
        CHECK(r.tp + r.fp + r.tn + r.fn == n);
    }
}
