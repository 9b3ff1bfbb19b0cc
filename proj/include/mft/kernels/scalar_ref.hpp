#pragma once

#include <cstddef>

// Scalar reference kernels. These are the semantic ground truth the SIMD
// variants are equivalence-tested against, so keep them obvious.
namespace mft::kernels::scalar {

template <typename T>
void matmul_nn_acc(const T* a, const T* b, T* c, size_t m, size_t k, size_t n) {
    for (size_t i = 0; i < m; ++i) {
        const T* arow = a + i * k;
        T* crow = c + i * n;
        for (size_t l = 0; l < k; ++l) {
            T av = arow[l];
            const T* brow = b + l * n;
            for (size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <typename T>
void matmul_nn(const T* a, const T* b, T* c, size_t m, size_t k, size_t n) {
    for (size_t i = 0; i < m * n; ++i) c[i] = T(0);
    matmul_nn_acc(a, b, c, m, k, n);
}

// c[m x n] += a[m x k] . b[n x k]^T
template <typename T>
void matmul_nt_acc(const T* a, const T* b, T* c, size_t m, size_t k, size_t n) {
    for (size_t i = 0; i < m; ++i) {
        const T* arow = a + i * k;
        T* crow = c + i * n;
        for (size_t j = 0; j < n; ++j) {
            const T* brow = b + j * k;
            T acc = T(0);
            for (size_t l = 0; l < k; ++l) acc += arow[l] * brow[l];
            crow[j] += acc;
        }
    }
}

// c[m x n] += a[k x m]^T . b[k x n]
template <typename T>
void matmul_tn_acc(const T* a, const T* b, T* c, size_t m, size_t k, size_t n) {
    for (size_t l = 0; l < k; ++l) {
        const T* arow = a + l * m;
        const T* brow = b + l * n;
        for (size_t i = 0; i < m; ++i) {
            T av = arow[i];
            T* crow = c + i * n;
            for (size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <typename T>
void add(const T* a, const T* b, T* c, size_t n) {
    for (size_t i = 0; i < n; ++i) c[i] = a[i] + b[i];
}

template <typename T>
void acc(T* y, const T* x, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += x[i];
}

template <typename T>
void axpy(T alpha, const T* x, T* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void scale(T alpha, const T* x, T* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = alpha * x[i];
}

template <typename T>
void hadamard(const T* a, const T* b, T* c, size_t n) {
    for (size_t i = 0; i < n; ++i) c[i] = a[i] * b[i];
}

template <typename T>
void hadamard_acc(const T* a, const T* b, T* c, size_t n) {
    for (size_t i = 0; i < n; ++i) c[i] += a[i] * b[i];
}

template <typename T>
void relu(const T* x, T* y, size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
}

template <typename T>
void relu_bwd_acc(const T* x, const T* dy, T* dx, size_t n) {
    for (size_t i = 0; i < n; ++i)
        if (x[i] > T(0)) dx[i] += dy[i];
}

template <typename T>
T dot(const T* a, const T* b, size_t n) {
    T acc = T(0);
    for (size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

template <typename T>
T reduce_sum(const T* x, size_t n) {
    T acc = T(0);
    for (size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

template <typename T>
T reduce_max(const T* x, size_t n) {
    T best = x[0];
    for (size_t i = 1; i < n; ++i)
        if (x[i] > best) best = x[i];
    return best;
}

template <typename T>
void normalize_affine(const T* x, T mean, T inv_std, const T* gain, const T* bias, T* y,
                      size_t n) {
    for (size_t i = 0; i < n; ++i) y[i] = (x[i] - mean) * inv_std * gain[i] + bias[i];
}

}  // namespace mft::kernels::scalar
