// AVX2/FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma and must only be entered after a runtime CPU check.

#include "mft/kernels/kernels.hpp"

#if defined(MFT_HAVE_AVX2_BUILD)

#include <immintrin.h>

namespace mft::kernels {
namespace {

// ---------------------------------------------------------------- float ---

inline float hsum256(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    __m128 sh = _mm_movehl_ps(lo, lo);
    lo = _mm_add_ps(lo, sh);
    sh = _mm_shuffle_ps(lo, lo, 0x1);
    lo = _mm_add_ss(lo, sh);
    return _mm_cvtss_f32(lo);
}

void matmul_nn_acc_f32(const float* a, const float* b, float* c, size_t m, size_t k, size_t n) {
    for (size_t i = 0; i < m; ++i) {
        const float* arow = a + i * k;
        float* crow = c + i * n;
        size_t l = 0;
        for (; l + 4 <= k; l += 4) {
            __m256 a0 = _mm256_set1_ps(arow[l + 0]);
            __m256 a1 = _mm256_set1_ps(arow[l + 1]);
            __m256 a2 = _mm256_set1_ps(arow[l + 2]);
            __m256 a3 = _mm256_set1_ps(arow[l + 3]);
            const float* b0 = b + (l + 0) * n;
            const float* b1 = b + (l + 1) * n;
            const float* b2 = b + (l + 2) * n;
            const float* b3 = b + (l + 3) * n;
            size_t j = 0;
            for (; j + 8 <= n; j += 8) {
                __m256 cv = _mm256_loadu_ps(crow + j);
                cv = _mm256_fmadd_ps(a0, _mm256_loadu_ps(b0 + j), cv);
                cv = _mm256_fmadd_ps(a1, _mm256_loadu_ps(b1 + j), cv);
                cv = _mm256_fmadd_ps(a2, _mm256_loadu_ps(b2 + j), cv);
                cv = _mm256_fmadd_ps(a3, _mm256_loadu_ps(b3 + j), cv);
                _mm256_storeu_ps(crow + j, cv);
            }
            for (; j < n; ++j) {
                crow[j] += arow[l + 0] * b0[j] + arow[l + 1] * b1[j] + arow[l + 2] * b2[j] +
                           arow[l + 3] * b3[j];
            }
        }
        for (; l < k; ++l) {
            __m256 av = _mm256_set1_ps(arow[l]);
            const float* brow = b + l * n;
            size_t j = 0;
            for (; j + 8 <= n; j += 8) {
                __m256 cv = _mm256_loadu_ps(crow + j);
                cv = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow + j), cv);
                _mm256_storeu_ps(crow + j, cv);
            }
            for (; j < n; ++j) crow[j] += arow[l] * brow[j];
        }
    }
}

void matmul_nn_f32(const float* a, const float* b, float* c, size_t m, size_t k, size_t n) {
    __m256 z = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= m * n; i += 8) _mm256_storeu_ps(c + i, z);
    for (; i < m * n; ++i) c[i] = 0.0f;
    matmul_nn_acc_f32(a, b, c, m, k, n);
}

void matmul_nt_acc_f32(const float* a, const float* b, float* c, size_t m, size_t k, size_t n) {
    for (size_t i = 0; i < m; ++i) {
        const float* arow = a + i * k;
        float* crow = c + i * n;
        for (size_t j = 0; j < n; ++j) {
            const float* brow = b + j * k;
            __m256 accv = _mm256_setzero_ps();
            size_t l = 0;
            for (; l + 8 <= k; l += 8)
                accv = _mm256_fmadd_ps(_mm256_loadu_ps(arow + l), _mm256_loadu_ps(brow + l), accv);
            float s = hsum256(accv);
            for (; l < k; ++l) s += arow[l] * brow[l];
            crow[j] += s;
        }
    }
}

void matmul_tn_acc_f32(const float* a, const float* b, float* c, size_t m, size_t k, size_t n) {
    for (size_t l = 0; l < k; ++l) {
        const float* arow = a + l * m;
        const float* brow = b + l * n;
        for (size_t i = 0; i < m; ++i) {
            __m256 av = _mm256_set1_ps(arow[i]);
            float* crow = c + i * n;
            size_t j = 0;
            for (; j + 8 <= n; j += 8) {
                __m256 cv = _mm256_loadu_ps(crow + j);
                cv = _mm256_fmadd_ps(av, _mm256_loadu_ps(brow + j), cv);
                _mm256_storeu_ps(crow + j, cv);
            }
            for (; j < n; ++j) crow[j] += arow[i] * brow[j];
        }
    }
}

void add_f32(const float* a, const float* b, float* c, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(c + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) c[i] = a[i] + b[i];
}

void acc_f32(float* y, const float* x, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_add_ps(_mm256_loadu_ps(y + i), _mm256_loadu_ps(x + i)));
    for (; i < n; ++i) y[i] += x[i];
}

void axpy_f32(float alpha, const float* x, float* y, size_t n) {
    __m256 av = _mm256_set1_ps(alpha);
    size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_f32(float alpha, const float* x, float* y, size_t n) {
    __m256 av = _mm256_set1_ps(alpha);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) _mm256_storeu_ps(y + i, _mm256_mul_ps(av, _mm256_loadu_ps(x + i)));
    for (; i < n; ++i) y[i] = alpha * x[i];
}

void hadamard_f32(const float* a, const float* b, float* c, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(c + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) c[i] = a[i] * b[i];
}

void hadamard_acc_f32(const float* a, const float* b, float* c, size_t n) {
    size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(
            c + i, _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i),
                                   _mm256_loadu_ps(c + i)));
    for (; i < n; ++i) c[i] += a[i] * b[i];
}

void relu_f32(const float* x, float* y, size_t n) {
    __m256 z = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) _mm256_storeu_ps(y + i, _mm256_max_ps(z, _mm256_loadu_ps(x + i)));
    for (; i < n; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_bwd_acc_f32(const float* x, const float* dy, float* dx, size_t n) {
    __m256 z = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(x + i), z, _CMP_GT_OQ);
        __m256 g = _mm256_and_ps(mask, _mm256_loadu_ps(dy + i));
        _mm256_storeu_ps(dx + i, _mm256_add_ps(_mm256_loadu_ps(dx + i), g));
    }
    for (; i < n; ++i)
        if (x[i] > 0.0f) dx[i] += dy[i];
}

float dot_f32(const float* a, const float* b, size_t n) {
    __m256 accv = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= n; i += 8)
        accv = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), accv);
    float s = hsum256(accv);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

float reduce_sum_f32(const float* x, size_t n) {
    __m256 accv = _mm256_setzero_ps();
    size_t i = 0;
    for (; i + 8 <= n; i += 8) accv = _mm256_add_ps(accv, _mm256_loadu_ps(x + i));
    float s = hsum256(accv);
    for (; i < n; ++i) s += x[i];
    return s;
}

float reduce_max_f32(const float* x, size_t n) {
    float best = x[0];
    size_t i = 0;
    if (n >= 8) {
        __m256 bv = _mm256_loadu_ps(x);
        for (i = 8; i + 8 <= n; i += 8) bv = _mm256_max_ps(bv, _mm256_loadu_ps(x + i));
        alignas(32) float lanes[8];
        _mm256_store_ps(lanes, bv);
        best = lanes[0];
        for (int j = 1; j < 8; ++j)
            if (lanes[j] > best) best = lanes[j];
    }
    for (; i < n; ++i)
        if (x[i] > best) best = x[i];
    return best;
}

void normalize_affine_f32(const float* x, float mean, float inv_std, const float* gain,
                          const float* bias, float* y, size_t n) {
    __m256 mv = _mm256_set1_ps(mean);
    __m256 sv = _mm256_set1_ps(inv_std);
    size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 xhat = _mm256_mul_ps(_mm256_sub_ps(_mm256_loadu_ps(x + i), mv), sv);
        _mm256_storeu_ps(y + i,
                         _mm256_fmadd_ps(xhat, _mm256_loadu_ps(gain + i), _mm256_loadu_ps(bias + i)));
    }
    for (; i < n; ++i) y[i] = (x[i] - mean) * inv_std * gain[i] + bias[i];
}

// --------------------------------------------------------------- double ---

inline double hsum256d(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    lo = _mm_add_sd(lo, sh);
    return _mm_cvtsd_f64(lo);
}

void matmul_nn_acc_f64(const double* a, const double* b, double* c, size_t m, size_t k, size_t n) {
    for (size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (size_t l = 0; l < k; ++l) {
            __m256d av = _mm256_set1_pd(arow[l]);
            const double* brow = b + l * n;
            size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cv = _mm256_loadu_pd(crow + j);
                cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cv);
                _mm256_storeu_pd(crow + j, cv);
            }
            for (; j < n; ++j) crow[j] += arow[l] * brow[j];
        }
    }
}

void matmul_nn_f64(const double* a, const double* b, double* c, size_t m, size_t k, size_t n) {
    for (size_t i = 0; i < m * n; ++i) c[i] = 0.0;
    matmul_nn_acc_f64(a, b, c, m, k, n);
}

void matmul_nt_acc_f64(const double* a, const double* b, double* c, size_t m, size_t k, size_t n) {
    for (size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            __m256d accv = _mm256_setzero_pd();
            size_t l = 0;
            for (; l + 4 <= k; l += 4)
                accv = _mm256_fmadd_pd(_mm256_loadu_pd(arow + l), _mm256_loadu_pd(brow + l), accv);
            double s = hsum256d(accv);
            for (; l < k; ++l) s += arow[l] * brow[l];
            crow[j] += s;
        }
    }
}

void matmul_tn_acc_f64(const double* a, const double* b, double* c, size_t m, size_t k, size_t n) {
    for (size_t l = 0; l < k; ++l) {
        const double* arow = a + l * m;
        const double* brow = b + l * n;
        for (size_t i = 0; i < m; ++i) {
            __m256d av = _mm256_set1_pd(arow[i]);
            double* crow = c + i * n;
            size_t j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cv = _mm256_loadu_pd(crow + j);
                cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cv);
                _mm256_storeu_pd(crow + j, cv);
            }
            for (; j < n; ++j) crow[j] += arow[i] * brow[j];
        }
    }
}

void add_f64(const double* a, const double* b, double* c, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(c + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) c[i] = a[i] + b[i];
}

void acc_f64(double* y, const double* x, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] += x[i];
}

void axpy_f64(double alpha, const double* x, double* y, size_t n) {
    __m256d av = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_f64(double alpha, const double* x, double* y, size_t n) {
    __m256d av = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_mul_pd(av, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = alpha * x[i];
}

void hadamard_f64(const double* a, const double* b, double* c, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(c + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) c[i] = a[i] * b[i];
}

void hadamard_acc_f64(const double* a, const double* b, double* c, size_t n) {
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(
            c + i, _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                                   _mm256_loadu_pd(c + i)));
    for (; i < n; ++i) c[i] += a[i] * b[i];
}

void relu_f64(const double* x, double* y, size_t n) {
    __m256d z = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(y + i, _mm256_max_pd(z, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void relu_bwd_acc_f64(const double* x, const double* dy, double* dx, size_t n) {
    __m256d z = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), z, _CMP_GT_OQ);
        __m256d g = _mm256_and_pd(mask, _mm256_loadu_pd(dy + i));
        _mm256_storeu_pd(dx + i, _mm256_add_pd(_mm256_loadu_pd(dx + i), g));
    }
    for (; i < n; ++i)
        if (x[i] > 0.0) dx[i] += dy[i];
}

double dot_f64(const double* a, const double* b, size_t n) {
    __m256d accv = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4)
        accv = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), accv);
    double s = hsum256d(accv);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double reduce_sum_f64(const double* x, size_t n) {
    __m256d accv = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) accv = _mm256_add_pd(accv, _mm256_loadu_pd(x + i));
    double s = hsum256d(accv);
    for (; i < n; ++i) s += x[i];
    return s;
}

double reduce_max_f64(const double* x, size_t n) {
    double best = x[0];
    size_t i = 0;
    if (n >= 4) {
        __m256d bv = _mm256_loadu_pd(x);
        for (i = 4; i + 4 <= n; i += 4) bv = _mm256_max_pd(bv, _mm256_loadu_pd(x + i));
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, bv);
        best = lanes[0];
        for (int j = 1; j < 4; ++j)
            if (lanes[j] > best) best = lanes[j];
    }
    for (; i < n; ++i)
        if (x[i] > best) best = x[i];
    return best;
}

void normalize_affine_f64(const double* x, double mean, double inv_std, const double* gain,
                          const double* bias, double* y, size_t n) {
    __m256d mv = _mm256_set1_pd(mean);
    __m256d sv = _mm256_set1_pd(inv_std);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xhat = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), mv), sv);
        _mm256_storeu_pd(y + i,
                         _mm256_fmadd_pd(xhat, _mm256_loadu_pd(gain + i), _mm256_loadu_pd(bias + i)));
    }
    for (; i < n; ++i) y[i] = (x[i] - mean) * inv_std * gain[i] + bias[i];
}

}  // namespace

const Backend<float>& avx2_backend_f32() {
    static const Backend<float> table = {
        matmul_nn_f32,  matmul_nn_acc_f32, matmul_nt_acc_f32, matmul_tn_acc_f32,
        add_f32,        acc_f32,           axpy_f32,          scale_f32,
        hadamard_f32,   hadamard_acc_f32,  relu_f32,          relu_bwd_acc_f32,
        dot_f32,        reduce_sum_f32,    reduce_max_f32,    normalize_affine_f32,
    };
    return table;
}

const Backend<double>& avx2_backend_f64() {
    static const Backend<double> table = {
        matmul_nn_f64,  matmul_nn_acc_f64, matmul_nt_acc_f64, matmul_tn_acc_f64,
        add_f64,        acc_f64,           axpy_f64,          scale_f64,
        hadamard_f64,   hadamard_acc_f64,  relu_f64,          relu_bwd_acc_f64,
        dot_f64,        reduce_sum_f64,    reduce_max_f64,    normalize_affine_f64,
    };
    return table;
}

}  // namespace mft::kernels

#endif  // MFT_HAVE_AVX2_BUILD
