#include "mft/kernels/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "mft/core/errors.hpp"
#include "mft/kernels/scalar_ref.hpp"

namespace mft::kernels {

namespace {

template <typename T>
Backend<T> make_scalar_table() {
    return Backend<T>{
        scalar::matmul_nn<T>,  scalar::matmul_nn_acc<T>, scalar::matmul_nt_acc<T>,
        scalar::matmul_tn_acc<T>,
        scalar::add<T>,        scalar::acc<T>,           scalar::axpy<T>,
        scalar::scale<T>,      scalar::hadamard<T>,      scalar::hadamard_acc<T>,
        scalar::relu<T>,       scalar::relu_bwd_acc<T>,  scalar::dot<T>,
        scalar::reduce_sum<T>, scalar::reduce_max<T>,    scalar::normalize_affine<T>,
    };
}

Isa resolve_from_env() {
    const char* env = std::getenv("MFT_KERNELS");
    if (env == nullptr || std::strcmp(env, "auto") == 0) return Isa::automatic;
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
    if (std::strcmp(env, "avx2") == 0) return Isa::avx2;
    throw ConfigError(std::string("MFT_KERNELS must be auto, scalar, or avx2; got '") + env + "'");
}

// Resolved selection (never automatic after init).
std::atomic<Isa> g_isa{Isa::automatic};

Isa resolve(Isa isa) {
    if (isa == Isa::automatic) return avx2_supported() ? Isa::avx2 : Isa::scalar;
    return isa;
}

Isa current() {
    Isa isa = g_isa.load(std::memory_order_acquire);
    if (isa == Isa::automatic) {
        isa = resolve(resolve_from_env());
        g_isa.store(isa, std::memory_order_release);
    }
    return isa;
}

}  // namespace

const Backend<float>& scalar_backend_f32() {
    static const Backend<float> table = make_scalar_table<float>();
    return table;
}

const Backend<double>& scalar_backend_f64() {
    static const Backend<double> table = make_scalar_table<double>();
    return table;
}

bool avx2_supported() {
#if defined(MFT_HAVE_AVX2_BUILD)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

#if !defined(MFT_HAVE_AVX2_BUILD)
const Backend<float>& avx2_backend_f32() {
    throw ConfigError("AVX2 kernels were not built on this platform");
}
const Backend<double>& avx2_backend_f64() {
    throw ConfigError("AVX2 kernels were not built on this platform");
}
#endif

void select(Isa isa) {
    if (isa != Isa::scalar && resolve(isa) == Isa::avx2 && !avx2_supported())
        throw ConfigError("AVX2 kernels requested but not supported by this CPU/build");
    g_isa.store(resolve(isa), std::memory_order_release);
}

Isa selected() { return current(); }

std::string selected_name() { return current() == Isa::avx2 ? "avx2" : "scalar"; }

template <>
const Backend<float>& active<float>() {
    return current() == Isa::avx2 ? avx2_backend_f32() : scalar_backend_f32();
}

template <>
const Backend<double>& active<double>() {
    return current() == Isa::avx2 ? avx2_backend_f64() : scalar_backend_f64();
}

}  // namespace mft::kernels
