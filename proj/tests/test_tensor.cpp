#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "mft/core/tensor.hpp"

using namespace mft;

namespace {
template <typename T>
void check_values(const TensorT<T>& t, const std::vector<double>& expect, double tol = 1e-12) {
    REQUIRE(t.size() == expect.size());
    for (size_t i = 0; i < expect.size(); ++i)
        CHECK(double(t.data()[i]) == doctest::Approx(expect[i]).epsilon(tol).scale(1.0));
}
}  // namespace

TEST_CASE("matmul identity and hand products") {
    auto a = TensorT<double>::from(2, 2, {1, 2, 3, 4});
    auto i2 = TensorT<double>::identity(2);
    check_values(matmul(a, i2), {1, 2, 3, 4});

    auto col = TensorT<double>::from(2, 1, {5, 7});
    check_values(matmul(i2, col), {5, 7});

    auto ones = TensorT<double>::from(2, 1, {1, 1});
    check_values(matmul(a, ones), {3, 7});
}

TEST_CASE("matmul rejects mismatched shapes naming both") {
    auto a = TensorT<float>::zeros(2, 3);
    auto b = TensorT<float>::zeros(4, 5);
    try {
        matmul(a, b);
        FAIL("expected ShapeError");
    } catch (const ShapeError& e) {
        std::string msg = e.what();
        CHECK(msg.find("2x3") != std::string::npos);
        CHECK(msg.find("4x5") != std::string::npos);
    }
}

TEST_CASE("softmax uniform, stability, closed form") {
    auto u = softmax(TensorT<double>::from(1, 3, {0, 0, 0}));
    check_values(u, {1.0 / 3, 1.0 / 3, 1.0 / 3});

    auto s = softmax(TensorT<double>::from(1, 2, {1000, 0}));
    CHECK(s.data()[0] == doctest::Approx(1.0));
    CHECK(s.data()[1] == doctest::Approx(0.0).scale(1.0));

    auto c = softmax(TensorT<double>::from(1, 2, {std::log(2.0), 0}));
    check_values(c, {2.0 / 3, 1.0 / 3});
}

TEST_CASE("softmax rows sum to 1 within 1e-6 across magnitudes") {
    Rng rng(3);
    for (int rep = 0; rep < 200; ++rep) {
        const size_t n = 1 + rng.below(40);
        std::vector<float> vals(3 * n);
        const double mag = rep % 2 == 0 ? 1e4 : 3.0;
        for (auto& v : vals) v = static_cast<float>(rng.uniform(-mag, mag));
        auto y = softmax(TensorT<float>::from(3, n, vals), 1);
        for (size_t r = 0; r < 3; ++r) {
            double sum = 0;
            for (size_t j = 0; j < n; ++j) {
                CHECK(y.at(r, j) >= 0.0f);
                sum += y.at(r, j);
            }
            CHECK(std::abs(sum - 1.0) < 1e-6);
        }
    }
}

TEST_CASE("softmax along axis 0 normalizes columns") {
    auto y = softmax(TensorT<double>::from(2, 2, {0, std::log(2.0), 0, 0}), 0);
    CHECK(y.at(0, 0) == doctest::Approx(0.5));
    CHECK(y.at(1, 0) == doctest::Approx(0.5));
    CHECK(y.at(0, 1) == doctest::Approx(2.0 / 3));
    CHECK(y.at(1, 1) == doctest::Approx(1.0 / 3));
}

TEST_CASE("layer_norm constant row, unit row, zero gain") {
    auto gain = TensorT<double>::from(1, 4, {1, 1, 1, 1});
    auto bias = TensorT<double>::from(1, 4, {0, 0, 0, 0});

    auto constant = layer_norm(TensorT<double>::from(1, 4, {5, 5, 5, 5}), gain, bias);
    check_values(constant, {0, 0, 0, 0});

    auto g2 = TensorT<double>::from(1, 2, {1, 1});
    auto b2 = TensorT<double>::from(1, 2, {0, 0});
    auto unit = layer_norm(TensorT<double>::from(1, 2, {1, -1}), g2, b2);
    CHECK(unit.data()[0] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(unit.data()[1] == doctest::Approx(-1.0).epsilon(1e-4));

    auto zero_gain = TensorT<double>::from(1, 4, {0, 0, 0, 0});
    auto some_bias = TensorT<double>::from(1, 4, {2, 3, 4, 5});
    auto broadcast =
        layer_norm(TensorT<double>::from(1, 4, {9, -3, 0.5, 12}), zero_gain, some_bias);
    check_values(broadcast, {2, 3, 4, 5});
}

TEST_CASE("layer_norm pre-affine rows have mean 0 variance 1 within 1e-5") {
    Rng rng(11);
    const size_t n = 32;
    std::vector<double> vals(5 * n);
    for (auto& v : vals) v = rng.uniform(-10, 10);
    auto gain = TensorT<double>::full(1, n, 1.0);
    auto bias = TensorT<double>::zeros(1, n);
    auto y = layer_norm(TensorT<double>::from(5, n, vals), gain, bias);
    for (size_t r = 0; r < 5; ++r) {
        double mean = 0, var = 0;
        for (size_t j = 0; j < n; ++j) mean += y.at(r, j);
        mean /= double(n);
        for (size_t j = 0; j < n; ++j) var += (y.at(r, j) - mean) * (y.at(r, j) - mean);
        var /= double(n);
        CHECK(std::abs(mean) < 1e-5);
        CHECK(std::abs(var - 1.0) < 1e-4);
    }
}

TEST_CASE("sigmoid midpoint and saturation without overflow") {
    auto y = sigmoid(TensorT<double>::from(1, 3, {0, 800, -800}));
    CHECK(y.data()[0] == doctest::Approx(0.5));
    CHECK(y.data()[1] == doctest::Approx(1.0));
    CHECK(y.data()[2] == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("dropout eval identity, parameter validation, MC mean") {
    auto x = TensorT<float>::from(1, 4, {1, 2, 3, 4});
    auto same = dropout(x, 0.2, /*training=*/false, nullptr);
    CHECK(same.node() == x.node());

    Rng rng(5);
    CHECK_THROWS_AS(dropout(x, 1.0, true, &rng), ConfigError);
    CHECK_THROWS_AS(dropout(x, -0.1, true, &rng), ConfigError);

    // E[dropout(x)] == E[x]: Monte-Carlo over 1e5 scalar samples
    double sum = 0.0;
    const int n = 100000;
    auto one = TensorT<float>::from(1, 1, {1.0f});
    for (int i = 0; i < n; ++i) sum += dropout(one, 0.5, true, &rng).data()[0];
    CHECK(sum / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("concat/slice round trip recovers parts bitwise") {
    auto cls = TensorT<float>::from(1, 128, std::vector<float>(128, 0.25f));
    std::vector<float> seq_vals(16 * 128);
    Rng rng(8);
    for (auto& v : seq_vals) v = static_cast<float>(rng.uniform(-1, 1));
    auto seq = TensorT<float>::from(16, 128, seq_vals);

    auto joined = concat<float>({cls, seq}, 0);
    CHECK(joined.rows() == 17);
    CHECK(joined.cols() == 128);

    auto cls_back = slice(joined, 0, 0, 1);
    auto seq_back = slice(joined, 0, 1, 17);
    CHECK(cls_back.values() == cls.values());
    CHECK(seq_back.values() == seq.values());

    // five 1x128 tokens -> 5x128
    std::vector<TensorT<float>> tokens(5, cls);
    CHECK(concat(tokens, 0).rows() == 5);

    CHECK_THROWS_AS(slice(joined, 0, 10, 30), ShapeError);
}

TEST_CASE("concat along columns round trips") {
    auto a = TensorT<double>::from(2, 2, {1, 2, 3, 4});
    auto b = TensorT<double>::from(2, 3, {5, 6, 7, 8, 9, 10});
    auto j = concat<double>({a, b}, 1);
    CHECK(j.rows() == 2);
    CHECK(j.cols() == 5);
    CHECK(slice(j, 1, 0, 2).values() == a.values());
    CHECK(slice(j, 1, 2, 5).values() == b.values());
}

TEST_CASE("non-finite op output raises a numeric error naming the op") {
    auto big = TensorT<float>::full(2, 2, 3e38f);
    try {
        add(big, big);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("add") != std::string::npos);
    }
}

TEST_CASE("elementwise add, scale, relu, hadamard basics") {
    auto a = TensorT<double>::from(1, 4, {1, -2, 3, -4});
    auto b = TensorT<double>::from(1, 4, {10, 20, 30, 40});
    check_values(add(a, b), {11, 18, 33, 36});
    check_values(scale(a, 2.0), {2, -4, 6, -8});
    check_values(relu(a), {1, 0, 3, 0});
    check_values(hadamard(a, b), {10, -40, 90, -160});
    check_values(one_minus(a), {0, 3, -2, 5});
}

TEST_CASE("single-threaded determinism is bitwise") {
    auto run = [] {
        Rng rng(99);
        std::vector<float> v(64);
        for (auto& x : v) x = static_cast<float>(rng.uniform(-1, 1));
        auto a = TensorT<float>::from(8, 8, v);
        auto out = softmax(matmul(a, a), 1);
        return out.values();
    };
    CHECK(run() == run());
}
