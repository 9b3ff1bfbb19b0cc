#pragma once

#include <cstddef>
#include <string>

namespace mft::kernels {

// Dense inner-loop kernels behind the tensor ops. Every kernel has a scalar
// reference implementation; on x86 an AVX2/FMA variant is selected at runtime
// when the CPU supports it. Matrices are row-major.
//
// matmul_* name scheme: nn = a.b, nt = a.b^T, tn = a^T.b; _acc accumulates
// into c instead of overwriting. Dimensions are always of the OUTPUT c
// (rows m, cols n) with inner dimension k.
template <typename T>
struct Backend {
    void (*matmul_nn)(const T* a, const T* b, T* c, size_t m, size_t k, size_t n);
    void (*matmul_nn_acc)(const T* a, const T* b, T* c, size_t m, size_t k, size_t n);
    void (*matmul_nt_acc)(const T* a, const T* b, T* c, size_t m, size_t k, size_t n);
    void (*matmul_tn_acc)(const T* a, const T* b, T* c, size_t m, size_t k, size_t n);

    void (*add)(const T* a, const T* b, T* c, size_t n);
    void (*acc)(T* y, const T* x, size_t n);           // y += x
    void (*axpy)(T alpha, const T* x, T* y, size_t n); // y += alpha*x
    void (*scale)(T alpha, const T* x, T* y, size_t n);
    void (*hadamard)(const T* a, const T* b, T* c, size_t n);
    void (*hadamard_acc)(const T* a, const T* b, T* c, size_t n);
    void (*relu)(const T* x, T* y, size_t n);
    void (*relu_bwd_acc)(const T* x, const T* dy, T* dx, size_t n);

    T (*dot)(const T* a, const T* b, size_t n);
    T (*reduce_sum)(const T* x, size_t n);
    T (*reduce_max)(const T* x, size_t n);

    // y = (x - mean) * inv_std * gain + bias, one row of width n.
    void (*normalize_affine)(const T* x, T mean, T inv_std, const T* gain, const T* bias,
                             T* y, size_t n);
};

enum class Isa {
    automatic,  // best supported, resolved once at first use
    scalar,
    avx2,
};

const Backend<float>& scalar_backend_f32();
const Backend<double>& scalar_backend_f64();

bool avx2_supported();  // compiled in AND supported by the running CPU
const Backend<float>& avx2_backend_f32();   // valid only if avx2_supported()
const Backend<double>& avx2_backend_f64();

// Global selection. automatic resolves to avx2 when available, else scalar.
// The MFT_KERNELS environment variable ("scalar", "avx2", "auto") seeds the
// initial selection; select() overrides it.
void select(Isa isa);
Isa selected();
std::string selected_name();

template <typename T>
const Backend<T>& active();

template <>
const Backend<float>& active<float>();
template <>
const Backend<double>& active<double>();

}  // namespace mft::kernels
