#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <vector>

#include "doctest.h"
#include "mft/core/rng.hpp"
#include "mft/kernels/kernels.hpp"
#include "mft/kernels/scalar_ref.hpp"

namespace k = mft::kernels;

namespace {

template <typename T>
std::vector<T> rand_vec(size_t n, mft::Rng& rng, double lo = -2.0, double hi = 2.0) {
    std::vector<T> v(n);
    for (auto& x : v) x = static_cast<T>(rng.uniform(lo, hi));
    return v;
}

template <typename T>
void check_close(const std::vector<T>& a, const std::vector<T>& b, double tol) {
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({1.0, std::abs(double(a[i])), std::abs(double(b[i]))});
        CHECK(std::abs(double(a[i]) - double(b[i])) / scale < tol);
    }
}

// Exercises every kernel on one backend against the scalar reference.
template <typename T>
void equivalence_suite(const k::Backend<T>& backend, double tol) {
    mft::Rng rng(1234);
    // odd sizes on purpose: remainder loops must agree too
    const std::vector<std::array<size_t, 3>> shapes = {
        {1, 1, 1}, {3, 5, 7}, {17, 128, 32}, {5, 33, 9}, {2, 8, 16}, {13, 13, 13}};
    for (auto [m, kk, n] : shapes) {
        auto a = rand_vec<T>(m * kk, rng);
        auto b = rand_vec<T>(kk * n, rng);
        auto bt = rand_vec<T>(n * kk, rng);
        auto at = rand_vec<T>(kk * m, rng);
        auto seed = rand_vec<T>(m * n, rng);

        std::vector<T> c_ref(m * n), c_sut(m * n);
        k::scalar::matmul_nn(a.data(), b.data(), c_ref.data(), m, kk, n);
        backend.matmul_nn(a.data(), b.data(), c_sut.data(), m, kk, n);
        check_close(c_ref, c_sut, tol);

        c_ref = seed;
        c_sut = seed;
        k::scalar::matmul_nn_acc(a.data(), b.data(), c_ref.data(), m, kk, n);
        backend.matmul_nn_acc(a.data(), b.data(), c_sut.data(), m, kk, n);
        check_close(c_ref, c_sut, tol);

        c_ref = seed;
        c_sut = seed;
        k::scalar::matmul_nt_acc(a.data(), bt.data(), c_ref.data(), m, kk, n);
        backend.matmul_nt_acc(a.data(), bt.data(), c_sut.data(), m, kk, n);
        check_close(c_ref, c_sut, tol);

        c_ref = seed;
        c_sut = seed;
        k::scalar::matmul_tn_acc(at.data(), b.data(), c_ref.data(), m, kk, n);
        backend.matmul_tn_acc(at.data(), b.data(), c_sut.data(), m, kk, n);
        check_close(c_ref, c_sut, tol);
    }

    for (size_t n : {size_t(1), size_t(7), size_t(8), size_t(129), size_t(1000)}) {
        auto x = rand_vec<T>(n, rng);
        auto y = rand_vec<T>(n, rng);
        std::vector<T> r_ref(n), r_sut(n);

        k::scalar::add(x.data(), y.data(), r_ref.data(), n);
        backend.add(x.data(), y.data(), r_sut.data(), n);
        check_close(r_ref, r_sut, tol);

        r_ref = y;
        r_sut = y;
        k::scalar::acc(r_ref.data(), x.data(), n);
        backend.acc(r_sut.data(), x.data(), n);
        check_close(r_ref, r_sut, tol);

        r_ref = y;
        r_sut = y;
        k::scalar::axpy(T(0.37), x.data(), r_ref.data(), n);
        backend.axpy(T(0.37), x.data(), r_sut.data(), n);
        check_close(r_ref, r_sut, tol);

        k::scalar::scale(T(-1.25), x.data(), r_ref.data(), n);
        backend.scale(T(-1.25), x.data(), r_sut.data(), n);
        check_close(r_ref, r_sut, tol);

        k::scalar::hadamard(x.data(), y.data(), r_ref.data(), n);
        backend.hadamard(x.data(), y.data(), r_sut.data(), n);
        check_close(r_ref, r_sut, tol);

        r_ref = y;
        r_sut = y;
        k::scalar::hadamard_acc(x.data(), y.data(), r_ref.data(), n);
        backend.hadamard_acc(x.data(), y.data(), r_sut.data(), n);
        check_close(r_ref, r_sut, tol);

        k::scalar::relu(x.data(), r_ref.data(), n);
        backend.relu(x.data(), r_sut.data(), n);
        check_close(r_ref, r_sut, tol);

        r_ref = y;
        r_sut = y;
        k::scalar::relu_bwd_acc(x.data(), y.data(), r_ref.data(), n);
        backend.relu_bwd_acc(x.data(), y.data(), r_sut.data(), n);
        check_close(r_ref, r_sut, tol);

        const double d_ref = double(k::scalar::dot(x.data(), y.data(), n));
        const double d_sut = double(backend.dot(x.data(), y.data(), n));
        CHECK(std::abs(d_ref - d_sut) / std::max(1.0, std::abs(d_ref)) < tol);

        const double s_ref = double(k::scalar::reduce_sum(x.data(), n));
        const double s_sut = double(backend.reduce_sum(x.data(), n));
        CHECK(std::abs(s_ref - s_sut) / std::max(1.0, std::abs(s_ref)) < tol);

        CHECK(double(k::scalar::reduce_max(x.data(), n)) ==
              double(backend.reduce_max(x.data(), n)));

        auto gain = rand_vec<T>(n, rng);
        auto bias = rand_vec<T>(n, rng);
        k::scalar::normalize_affine(x.data(), T(0.3), T(1.7), gain.data(), bias.data(),
                                    r_ref.data(), n);
        backend.normalize_affine(x.data(), T(0.3), T(1.7), gain.data(), bias.data(),
                                 r_sut.data(), n);
        check_close(r_ref, r_sut, tol);
    }
}

}  // namespace

TEST_CASE("scalar reference: hand-checked matmul semantics") {
    // 2x3 . 3x2
    std::vector<double> a = {1, 2, 3, 4, 5, 6};
    std::vector<double> b = {7, 8, 9, 10, 11, 12};
    std::vector<double> c(4);
    k::scalar::matmul_nn(a.data(), b.data(), c.data(), 2, 3, 2);
    CHECK(c == std::vector<double>{58, 64, 139, 154});

    // nt: a[2x3] . (b2[2x3])^T
    std::vector<double> b2 = {1, 0, 1, 0, 1, 0};
    std::vector<double> cnt(4, 5.0);
    k::scalar::matmul_nt_acc(a.data(), b2.data(), cnt.data(), 2, 3, 2);
    CHECK(cnt == std::vector<double>{5 + 4, 5 + 2, 5 + 10, 5 + 5});

    // tn: a plays the k x m role, output is m x n = 3x3
    std::vector<double> ctn(9, 0.0);
    k::scalar::matmul_tn_acc(a.data(), b2.data(), ctn.data(), 3, 2, 3);
    CHECK(ctn == std::vector<double>{1 + 0, 4, 1 + 0, 2 + 0, 5, 2, 3, 6, 3});
}

TEST_CASE("avx2 variants match the scalar reference") {
    if (!k::avx2_supported()) {
        MESSAGE("AVX2 not available; skipping SIMD equivalence");
        return;
    }
    equivalence_suite<float>(k::avx2_backend_f32(), 2e-5);
    equivalence_suite<double>(k::avx2_backend_f64(), 1e-12);
}

TEST_CASE("scalar backend table simply forwards to the reference") {
    equivalence_suite<float>(k::scalar_backend_f32(), 0.0 + 1e-30);
    equivalence_suite<double>(k::scalar_backend_f64(), 0.0 + 1e-30);
}

TEST_CASE("backend selection is sticky and nameable") {
    const auto before = k::selected();
    k::select(k::Isa::scalar);
    CHECK(k::selected_name() == "scalar");
    k::select(k::Isa::automatic);
    CHECK((k::selected() == k::Isa::avx2 || k::selected() == k::Isa::scalar));
    k::select(before);
}
