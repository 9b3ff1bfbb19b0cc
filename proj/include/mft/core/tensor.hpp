#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mft/core/errors.hpp"
#include "mft/core/rng.hpp"
#include "mft/kernels/kernels.hpp"

namespace mft {

// Dense row-major 2-D tensor with tape-based reverse-mode differentiation.
// Vectors are 1 x n, scalars 1 x 1. TensorT is a cheap shared handle; ops
// return fresh tensors and record their backward rule on the active tape
// when any input requires a gradient.

template <typename T>
struct TensorNode {
    size_t rows = 0;
    size_t cols = 0;
    std::vector<T> v;  // values, row-major
    std::vector<T> g;  // gradient, empty until first accumulation
    bool requires_grad = false;

    size_t size() const { return rows * cols; }
    void ensure_grad() {
        if (g.size() != v.size()) g.assign(v.size(), T(0));
    }
};

template <typename T>
class TapeT;

template <typename T>
class TensorT {
public:
    TensorT() = default;

    static TensorT zeros(size_t rows, size_t cols, bool requires_grad = false) {
        TensorT t;
        t.n_ = std::make_shared<TensorNode<T>>();
        t.n_->rows = rows;
        t.n_->cols = cols;
        t.n_->v.assign(rows * cols, T(0));
        t.n_->requires_grad = requires_grad;
        return t;
    }

    static TensorT full(size_t rows, size_t cols, T value) {
        TensorT t = zeros(rows, cols);
        for (auto& x : t.n_->v) x = value;
        return t;
    }

    static TensorT from(size_t rows, size_t cols, std::vector<T> values,
                        bool requires_grad = false) {
        if (values.size() != rows * cols)
            throw ShapeError("tensor init: " + std::to_string(values.size()) +
                             " values for shape " + std::to_string(rows) + "x" +
                             std::to_string(cols));
        TensorT t;
        t.n_ = std::make_shared<TensorNode<T>>();
        t.n_->rows = rows;
        t.n_->cols = cols;
        t.n_->v = std::move(values);
        t.n_->requires_grad = requires_grad;
        return t;
    }

    static TensorT scalar(T value) { return from(1, 1, {value}); }

    static TensorT identity(size_t n) {
        TensorT t = zeros(n, n);
        for (size_t i = 0; i < n; ++i) t.n_->v[i * n + i] = T(1);
        return t;
    }

    bool valid() const { return n_ != nullptr; }
    size_t rows() const { return n_->rows; }
    size_t cols() const { return n_->cols; }
    size_t size() const { return n_->size(); }
    std::string shape_str() const {
        return std::to_string(rows()) + "x" + std::to_string(cols());
    }

    const T* data() const { return n_->v.data(); }
    T* data() { return n_->v.data(); }
    const std::vector<T>& values() const { return n_->v; }
    std::vector<T>& values() { return n_->v; }

    T at(size_t r, size_t c) const { return n_->v[r * n_->cols + c]; }
    T& at(size_t r, size_t c) { return n_->v[r * n_->cols + c]; }
    T item() const {
        if (size() != 1) throw ShapeError("item() on non-scalar tensor " + shape_str());
        return n_->v[0];
    }

    bool requires_grad() const { return n_->requires_grad; }
    void set_requires_grad(bool rg) { n_->requires_grad = rg; }

    bool has_grad() const { return !n_->g.empty(); }
    const std::vector<T>& grad() const { return n_->g; }
    void zero_grad() {
        n_->ensure_grad();
        std::fill(n_->g.begin(), n_->g.end(), T(0));
    }

    std::shared_ptr<TensorNode<T>> node() const { return n_; }

private:
    std::shared_ptr<TensorNode<T>> n_;
};

// Tape of recorded operations. One tape per forward/backward pass, confined
// to a single thread; node order is creation order, which is a topological
// order of the data flow, and backward() walks it exactly once in reverse.
template <typename T>
class TapeT {
public:
    TapeT() = default;
    TapeT(const TapeT&) = delete;
    TapeT& operator=(const TapeT&) = delete;

    static TapeT*& active_slot() {
        static thread_local TapeT* active = nullptr;
        return active;
    }
    static TapeT* active() { return active_slot(); }

    void record(const char* op, std::function<void()> backward_fn) {
        nodes_.push_back(Node{op, std::move(backward_fn)});
    }

    size_t node_count() const { return nodes_.size(); }

    void run_backward(const TensorT<T>& loss) {
        if (loss.size() != 1)
            throw ContractError("backward: loss must be scalar, got " + loss.shape_str());
        if (consumed_) throw ContractError("backward: tape already consumed");
        consumed_ = true;
        loss.node()->ensure_grad();
        loss.node()->g[0] = T(1);
        for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) it->backward();
    }

private:
    struct Node {
        const char* op;
        std::function<void()> backward;
    };
    std::vector<Node> nodes_;
    bool consumed_ = false;
};

// RAII activation of a tape on the current thread.
template <typename T>
class TapeScopeT {
public:
    explicit TapeScopeT(TapeT<T>& tape) : prev_(TapeT<T>::active_slot()) {
        TapeT<T>::active_slot() = &tape;
    }
    ~TapeScopeT() { TapeT<T>::active_slot() = prev_; }
    TapeScopeT(const TapeScopeT&) = delete;
    TapeScopeT& operator=(const TapeScopeT&) = delete;

private:
    TapeT<T>* prev_;
};

namespace detail {

template <typename T>
void finite_or_throw(const TensorT<T>& t, const char* op) {
    double acc = 0.0;
    const T* p = t.data();
    size_t n = t.size();
    for (size_t i = 0; i < n; ++i) acc += static_cast<double>(p[i]);
    if (std::isfinite(acc)) return;
    for (size_t i = 0; i < n; ++i) {
        if (!std::isfinite(static_cast<double>(p[i])))
            throw NumericError(std::string(op) + ": produced non-finite value at index " +
                               std::to_string(i));
    }
}

template <typename T>
bool tape_on(std::initializer_list<const TensorT<T>*> inputs) {
    if (TapeT<T>::active() == nullptr) return false;
    for (const auto* in : inputs)
        if (in->requires_grad()) return true;
    return false;
}

template <typename T>
T* grad_of(const std::shared_ptr<TensorNode<T>>& n) {
    n->ensure_grad();
    return n->g.data();
}

}  // namespace detail

// ---------------------------------------------------------------- matmul ---

template <typename T>
TensorT<T> matmul(const TensorT<T>& a, const TensorT<T>& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: inner dimensions mismatch: " + a.shape_str() + " . " +
                         b.shape_str());
    const size_t m = a.rows(), k = a.cols(), n = b.cols();
    TensorT<T> c = TensorT<T>::zeros(m, n);
    kernels::active<T>().matmul_nn(a.data(), b.data(), c.data(), m, k, n);
    detail::finite_or_throw(c, "matmul");
    if (detail::tape_on<T>({&a, &b})) {
        c.set_requires_grad(true);
        auto an = a.node(), bn = b.node(), cn = c.node();
        TapeT<T>::active()->record("matmul", [an, bn, cn, m, k, n] {
            const auto& K = kernels::active<T>();
            if (an->requires_grad)  // dA += dC . B^T
                K.matmul_nt_acc(cn->g.data(), bn->v.data(), detail::grad_of(an), m, n, k);
            if (bn->requires_grad)  // dB += A^T . dC
                K.matmul_tn_acc(an->v.data(), cn->g.data(), detail::grad_of(bn), k, m, n);
        });
    }
    return c;
}

// a[m x k] . b[n x k]^T, without materializing the transpose.
template <typename T>
TensorT<T> matmul_nt(const TensorT<T>& a, const TensorT<T>& b) {
    if (a.cols() != b.cols())
        throw ShapeError("matmul_nt: inner dimensions mismatch: " + a.shape_str() + " . " +
                         b.shape_str() + "^T");
    const size_t m = a.rows(), k = a.cols(), n = b.rows();
    TensorT<T> c = TensorT<T>::zeros(m, n);
    kernels::active<T>().matmul_nt_acc(a.data(), b.data(), c.data(), m, k, n);
    detail::finite_or_throw(c, "matmul_nt");
    if (detail::tape_on<T>({&a, &b})) {
        c.set_requires_grad(true);
        auto an = a.node(), bn = b.node(), cn = c.node();
        TapeT<T>::active()->record("matmul_nt", [an, bn, cn, m, k, n] {
            const auto& K = kernels::active<T>();
            if (an->requires_grad)  // dA += dC . B
                K.matmul_nn_acc(cn->g.data(), bn->v.data(), detail::grad_of(an), m, n, k);
            if (bn->requires_grad)  // dB += dC^T . A
                K.matmul_tn_acc(cn->g.data(), an->v.data(), detail::grad_of(bn), n, m, k);
        });
    }
    return c;
}

// ----------------------------------------------------------- elementwise ---

template <typename T>
TensorT<T> add(const TensorT<T>& a, const TensorT<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError("add: shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    TensorT<T> c = TensorT<T>::zeros(a.rows(), a.cols());
    kernels::active<T>().add(a.data(), b.data(), c.data(), c.size());
    detail::finite_or_throw(c, "add");
    if (detail::tape_on<T>({&a, &b})) {
        c.set_requires_grad(true);
        auto an = a.node(), bn = b.node(), cn = c.node();
        TapeT<T>::active()->record("add", [an, bn, cn] {
            const auto& K = kernels::active<T>();
            if (an->requires_grad) K.acc(detail::grad_of(an), cn->g.data(), cn->g.size());
            if (bn->requires_grad) K.acc(detail::grad_of(bn), cn->g.data(), cn->g.size());
        });
    }
    return c;
}

// x[m x n] + bias[1 x n], broadcast over rows.
template <typename T>
TensorT<T> add_bias(const TensorT<T>& x, const TensorT<T>& bias) {
    if (bias.rows() != 1 || bias.cols() != x.cols())
        throw ShapeError("add_bias: bias " + bias.shape_str() + " does not broadcast over " +
                         x.shape_str());
    const size_t m = x.rows(), n = x.cols();
    TensorT<T> c = TensorT<T>::zeros(m, n);
    for (size_t i = 0; i < m; ++i)
        kernels::active<T>().add(x.data() + i * n, bias.data(), c.data() + i * n, n);
    detail::finite_or_throw(c, "add_bias");
    if (detail::tape_on<T>({&x, &bias})) {
        c.set_requires_grad(true);
        auto xn = x.node(), bn = bias.node(), cn = c.node();
        TapeT<T>::active()->record("add_bias", [xn, bn, cn, m, n] {
            const auto& K = kernels::active<T>();
            if (xn->requires_grad) K.acc(detail::grad_of(xn), cn->g.data(), m * n);
            if (bn->requires_grad) {
                T* bg = detail::grad_of(bn);
                for (size_t i = 0; i < m; ++i) K.acc(bg, cn->g.data() + i * n, n);
            }
        });
    }
    return c;
}

template <typename T>
TensorT<T> scale(const TensorT<T>& x, T alpha) {
    TensorT<T> c = TensorT<T>::zeros(x.rows(), x.cols());
    kernels::active<T>().scale(alpha, x.data(), c.data(), c.size());
    detail::finite_or_throw(c, "scale");
    if (detail::tape_on<T>({&x})) {
        c.set_requires_grad(true);
        auto xn = x.node(), cn = c.node();
        TapeT<T>::active()->record("scale", [xn, cn, alpha] {
            if (xn->requires_grad)
                kernels::active<T>().axpy(alpha, cn->g.data(), detail::grad_of(xn), cn->g.size());
        });
    }
    return c;
}

template <typename T>
TensorT<T> one_minus(const TensorT<T>& x) {
    TensorT<T> c = TensorT<T>::zeros(x.rows(), x.cols());
    for (size_t i = 0; i < x.size(); ++i) c.data()[i] = T(1) - x.data()[i];
    detail::finite_or_throw(c, "one_minus");
    if (detail::tape_on<T>({&x})) {
        c.set_requires_grad(true);
        auto xn = x.node(), cn = c.node();
        TapeT<T>::active()->record("one_minus", [xn, cn] {
            if (xn->requires_grad)
                kernels::active<T>().axpy(T(-1), cn->g.data(), detail::grad_of(xn), cn->g.size());
        });
    }
    return c;
}

template <typename T>
TensorT<T> hadamard(const TensorT<T>& a, const TensorT<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError("hadamard: shape mismatch: " + a.shape_str() + " vs " + b.shape_str());
    TensorT<T> c = TensorT<T>::zeros(a.rows(), a.cols());
    kernels::active<T>().hadamard(a.data(), b.data(), c.data(), c.size());
    detail::finite_or_throw(c, "hadamard");
    if (detail::tape_on<T>({&a, &b})) {
        c.set_requires_grad(true);
        auto an = a.node(), bn = b.node(), cn = c.node();
        TapeT<T>::active()->record("hadamard", [an, bn, cn] {
            const auto& K = kernels::active<T>();
            if (an->requires_grad)
                K.hadamard_acc(cn->g.data(), bn->v.data(), detail::grad_of(an), cn->g.size());
            if (bn->requires_grad)
                K.hadamard_acc(cn->g.data(), an->v.data(), detail::grad_of(bn), cn->g.size());
        });
    }
    return c;
}

template <typename T>
TensorT<T> relu(const TensorT<T>& x) {
    TensorT<T> c = TensorT<T>::zeros(x.rows(), x.cols());
    kernels::active<T>().relu(x.data(), c.data(), c.size());
    detail::finite_or_throw(c, "relu");
    if (detail::tape_on<T>({&x})) {
        c.set_requires_grad(true);
        auto xn = x.node(), cn = c.node();
        TapeT<T>::active()->record("relu", [xn, cn] {
            if (xn->requires_grad)
                kernels::active<T>().relu_bwd_acc(xn->v.data(), cn->g.data(),
                                                  detail::grad_of(xn), cn->g.size());
        });
    }
    return c;
}

template <typename T>
TensorT<T> sigmoid(const TensorT<T>& x) {
    TensorT<T> c = TensorT<T>::zeros(x.rows(), x.cols());
    for (size_t i = 0; i < x.size(); ++i) {
        T v = x.data()[i];
        // Split by sign so exp never overflows.
        if (v >= T(0)) {
            T e = std::exp(-v);
            c.data()[i] = T(1) / (T(1) + e);
        } else {
            T e = std::exp(v);
            c.data()[i] = e / (T(1) + e);
        }
    }
    detail::finite_or_throw(c, "sigmoid");
    if (detail::tape_on<T>({&x})) {
        c.set_requires_grad(true);
        auto xn = x.node(), cn = c.node();
        TapeT<T>::active()->record("sigmoid", [xn, cn] {
            if (!xn->requires_grad) return;
            T* xg = detail::grad_of(xn);
            for (size_t i = 0; i < cn->g.size(); ++i) {
                T y = cn->v[i];
                xg[i] += cn->g[i] * y * (T(1) - y);
            }
        });
    }
    return c;
}

// log(max(x, floor)). Gradient is 1/x where x > floor, 0 where clamped.
template <typename T>
TensorT<T> log_clamped(const TensorT<T>& x, T floor) {
    TensorT<T> c = TensorT<T>::zeros(x.rows(), x.cols());
    for (size_t i = 0; i < x.size(); ++i)
        c.data()[i] = std::log(std::max(x.data()[i], floor));
    detail::finite_or_throw(c, "log_clamped");
    if (detail::tape_on<T>({&x})) {
        c.set_requires_grad(true);
        auto xn = x.node(), cn = c.node();
        TapeT<T>::active()->record("log_clamped", [xn, cn, floor] {
            if (!xn->requires_grad) return;
            T* xg = detail::grad_of(xn);
            for (size_t i = 0; i < cn->g.size(); ++i)
                if (xn->v[i] > floor) xg[i] += cn->g[i] / xn->v[i];
        });
    }
    return c;
}

// --------------------------------------------------------------- softmax ---

namespace detail {

template <typename T>
void softmax_row(const T* x, T* y, size_t n) {
    const auto& K = kernels::active<T>();
    T mx = K.reduce_max(x, n);
    for (size_t i = 0; i < n; ++i) y[i] = std::exp(x[i] - mx);
    T s = K.reduce_sum(y, n);
    K.scale(T(1) / s, y, y, n);
}

}  // namespace detail

// Softmax along axis (0 = down columns, 1 = along rows), max-subtracted.
template <typename T>
TensorT<T> softmax(const TensorT<T>& x, int axis = 1) {
    if (axis != 0 && axis != 1) throw ShapeError("softmax: axis must be 0 or 1");
    const size_t m = x.rows(), n = x.cols();
    TensorT<T> c = TensorT<T>::zeros(m, n);
    if (axis == 1) {
        for (size_t i = 0; i < m; ++i) detail::softmax_row(x.data() + i * n, c.data() + i * n, n);
    } else {
        std::vector<T> col(m), out(m);
        for (size_t j = 0; j < n; ++j) {
            for (size_t i = 0; i < m; ++i) col[i] = x.at(i, j);
            detail::softmax_row(col.data(), out.data(), m);
            for (size_t i = 0; i < m; ++i) c.at(i, j) = out[i];
        }
    }
    detail::finite_or_throw(c, "softmax");
    if (detail::tape_on<T>({&x})) {
        c.set_requires_grad(true);
        auto xn = x.node(), cn = c.node();
        TapeT<T>::active()->record("softmax", [xn, cn, m, n, axis] {
            if (!xn->requires_grad) return;
            T* xg = detail::grad_of(xn);
            // dx = y * (dy - sum(dy*y)) per slice
            if (axis == 1) {
                for (size_t i = 0; i < m; ++i) {
                    const T* y = cn->v.data() + i * n;
                    const T* dy = cn->g.data() + i * n;
                    T s = kernels::active<T>().dot(dy, y, n);
                    T* dst = xg + i * n;
                    for (size_t j = 0; j < n; ++j) dst[j] += y[j] * (dy[j] - s);
                }
            } else {
                for (size_t j = 0; j < n; ++j) {
                    T s = T(0);
                    for (size_t i = 0; i < m; ++i) s += cn->g[i * n + j] * cn->v[i * n + j];
                    for (size_t i = 0; i < m; ++i)
                        xg[i * n + j] += cn->v[i * n + j] * (cn->g[i * n + j] - s);
                }
            }
        });
    }
    return c;
}

// ------------------------------------------------------------ layer norm ---

// Normalizes each row to zero mean / unit variance (population variance,
// eps inside the square root), then applies per-column gain and bias.
template <typename T>
TensorT<T> layer_norm(const TensorT<T>& x, const TensorT<T>& gain, const TensorT<T>& bias,
                      T eps = T(1e-5)) {
    const size_t m = x.rows(), n = x.cols();
    if (gain.rows() != 1 || gain.cols() != n || bias.rows() != 1 || bias.cols() != n)
        throw ShapeError("layer_norm: gain/bias must be 1x" + std::to_string(n));
    if (!(eps > T(0))) throw ConfigError("layer_norm: eps must be > 0");
    TensorT<T> c = TensorT<T>::zeros(m, n);
    std::vector<T> means(m), invs(m);
    const auto& K = kernels::active<T>();
    for (size_t i = 0; i < m; ++i) {
        const T* row = x.data() + i * n;
        T mean = K.reduce_sum(row, n) / T(n);
        T var = T(0);
        for (size_t j = 0; j < n; ++j) {
            T d = row[j] - mean;
            var += d * d;
        }
        var /= T(n);
        T inv = T(1) / std::sqrt(var + eps);
        means[i] = mean;
        invs[i] = inv;
        K.normalize_affine(row, mean, inv, gain.data(), bias.data(), c.data() + i * n, n);
    }
    detail::finite_or_throw(c, "layer_norm");
    if (detail::tape_on<T>({&x, &gain, &bias})) {
        c.set_requires_grad(true);
        auto xn = x.node(), gn = gain.node(), bn = bias.node(), cn = c.node();
        TapeT<T>::active()->record("layer_norm", [xn, gn, bn, cn, m, n, means, invs] {
            std::vector<T> xhat(n), dxhat(n);
            for (size_t i = 0; i < m; ++i) {
                const T* row = xn->v.data() + i * n;
                const T* dy = cn->g.data() + i * n;
                T inv = invs[i], mean = means[i];
                for (size_t j = 0; j < n; ++j) {
                    xhat[j] = (row[j] - mean) * inv;
                    dxhat[j] = dy[j] * gn->v[j];
                }
                if (gn->requires_grad) {
                    T* gg = detail::grad_of(gn);
                    for (size_t j = 0; j < n; ++j) gg[j] += dy[j] * xhat[j];
                }
                if (bn->requires_grad) {
                    T* bg = detail::grad_of(bn);
                    for (size_t j = 0; j < n; ++j) bg[j] += dy[j];
                }
                if (xn->requires_grad) {
                    T mean_dxhat = T(0), mean_dxhat_xhat = T(0);
                    for (size_t j = 0; j < n; ++j) {
                        mean_dxhat += dxhat[j];
                        mean_dxhat_xhat += dxhat[j] * xhat[j];
                    }
                    mean_dxhat /= T(n);
                    mean_dxhat_xhat /= T(n);
                    T* xg = detail::grad_of(xn);
                    for (size_t j = 0; j < n; ++j)
                        xg[i * n + j] += inv * (dxhat[j] - mean_dxhat - xhat[j] * mean_dxhat_xhat);
                }
            }
        });
    }
    return c;
}

// --------------------------------------------------------- concat / slice ---

template <typename T>
TensorT<T> concat(const std::vector<TensorT<T>>& parts, int axis) {
    if (parts.empty()) throw ShapeError("concat: no inputs");
    if (axis != 0 && axis != 1) throw ShapeError("concat: axis must be 0 or 1");
    size_t rows = parts[0].rows(), cols = parts[0].cols();
    for (size_t p = 1; p < parts.size(); ++p) {
        if (axis == 0) {
            if (parts[p].cols() != cols)
                throw ShapeError("concat axis 0: column mismatch: " + parts[0].shape_str() +
                                 " vs " + parts[p].shape_str());
            rows += parts[p].rows();
        } else {
            if (parts[p].rows() != rows)
                throw ShapeError("concat axis 1: row mismatch: " + parts[0].shape_str() + " vs " +
                                 parts[p].shape_str());
            cols += parts[p].cols();
        }
    }
    TensorT<T> c = TensorT<T>::zeros(rows, cols);
    size_t offset = 0;
    for (const auto& part : parts) {
        if (axis == 0) {
            std::copy(part.data(), part.data() + part.size(), c.data() + offset * cols);
            offset += part.rows();
        } else {
            for (size_t i = 0; i < rows; ++i)
                std::copy(part.data() + i * part.cols(), part.data() + (i + 1) * part.cols(),
                          c.data() + i * cols + offset);
            offset += part.cols();
        }
    }
    bool any_rg = false;
    for (const auto& part : parts)
        if (part.requires_grad()) any_rg = true;
    if (TapeT<T>::active() && any_rg) {
        c.set_requires_grad(true);
        std::vector<std::shared_ptr<TensorNode<T>>> ins;
        ins.reserve(parts.size());
        for (const auto& part : parts) ins.push_back(part.node());
        auto cn = c.node();
        TapeT<T>::active()->record("concat", [ins, cn, axis, rows, cols] {
            size_t off = 0;
            for (const auto& in : ins) {
                if (axis == 0) {
                    if (in->requires_grad)
                        kernels::active<T>().acc(detail::grad_of(in), cn->g.data() + off * cols,
                                                 in->size());
                    off += in->rows;
                } else {
                    if (in->requires_grad) {
                        T* ig = detail::grad_of(in);
                        for (size_t i = 0; i < rows; ++i)
                            kernels::active<T>().acc(ig + i * in->cols,
                                                     cn->g.data() + i * cols + off, in->cols);
                    }
                    off += in->cols;
                }
            }
        });
    }
    return c;
}

// Half-open range [lo, hi) along axis.
template <typename T>
TensorT<T> slice(const TensorT<T>& x, int axis, size_t lo, size_t hi) {
    if (axis != 0 && axis != 1) throw ShapeError("slice: axis must be 0 or 1");
    size_t limit = axis == 0 ? x.rows() : x.cols();
    if (lo >= hi || hi > limit)
        throw ShapeError("slice: range [" + std::to_string(lo) + "," + std::to_string(hi) +
                         ") out of bounds for " + x.shape_str() + " axis " +
                         std::to_string(axis));
    const size_t n = x.cols();
    TensorT<T> c;
    if (axis == 0) {
        c = TensorT<T>::zeros(hi - lo, n);
        std::copy(x.data() + lo * n, x.data() + hi * n, c.data());
    } else {
        c = TensorT<T>::zeros(x.rows(), hi - lo);
        for (size_t i = 0; i < x.rows(); ++i)
            std::copy(x.data() + i * n + lo, x.data() + i * n + hi, c.data() + i * (hi - lo));
    }
    if (detail::tape_on<T>({&x})) {
        c.set_requires_grad(true);
        auto xn = x.node(), cn = c.node();
        TapeT<T>::active()->record("slice", [xn, cn, axis, lo, n] {
            if (!xn->requires_grad) return;
            T* xg = detail::grad_of(xn);
            if (axis == 0) {
                kernels::active<T>().acc(xg + lo * n, cn->g.data(), cn->g.size());
            } else {
                for (size_t i = 0; i < cn->rows; ++i)
                    kernels::active<T>().acc(xg + i * n + lo, cn->g.data() + i * cn->cols,
                                             cn->cols);
            }
        });
    }
    return c;
}

// ---------------------------------------------------------------- dropout ---

// Training mode zeroes elements independently with probability p and scales
// survivors by 1/(1-p); eval mode is the identity. The mask comes entirely
// from `rng`, so a stream keyed on (seed, epoch, batch, op) replays exactly.
template <typename T>
TensorT<T> dropout(const TensorT<T>& x, double p, bool training, Rng* rng) {
    if (p < 0.0 || p >= 1.0) throw ConfigError("dropout: p must be in [0,1)");
    if (!training || p == 0.0) return x;
    if (rng == nullptr) throw ContractError("dropout: training mode requires an rng");
    const T keep_scale = T(1.0 / (1.0 - p));
    TensorT<T> c = TensorT<T>::zeros(x.rows(), x.cols());
    std::vector<T> mask(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        mask[i] = rng->bernoulli(p) ? T(0) : keep_scale;
        c.data()[i] = x.data()[i] * mask[i];
    }
    detail::finite_or_throw(c, "dropout");
    if (detail::tape_on<T>({&x})) {
        c.set_requires_grad(true);
        auto xn = x.node(), cn = c.node();
        TapeT<T>::active()->record("dropout", [xn, cn, mask = std::move(mask)] {
            if (xn->requires_grad)
                kernels::active<T>().hadamard_acc(cn->g.data(), mask.data(),
                                                  detail::grad_of(xn), cn->g.size());
        });
    }
    return c;
}

// ------------------------------------------------------------- reductions ---

template <typename T>
TensorT<T> sum_all(const TensorT<T>& x) {
    TensorT<T> c = TensorT<T>::scalar(kernels::active<T>().reduce_sum(x.data(), x.size()));
    detail::finite_or_throw(c, "sum_all");
    if (detail::tape_on<T>({&x})) {
        c.set_requires_grad(true);
        auto xn = x.node(), cn = c.node();
        TapeT<T>::active()->record("sum_all", [xn, cn] {
            if (!xn->requires_grad) return;
            T g = cn->g[0];
            T* xg = detail::grad_of(xn);
            for (size_t i = 0; i < xn->v.size(); ++i) xg[i] += g;
        });
    }
    return c;
}

// ---------------------------------------------------------------- driver ---

template <typename T>
void backward(const TensorT<T>& loss) {
    TapeT<T>* tape = TapeT<T>::active();
    if (tape == nullptr) throw ContractError("backward: no active tape");
    tape->run_backward(loss);
}

using Tensor = TensorT<float>;
using Tape = TapeT<float>;
using TapeScope = TapeScopeT<float>;

}  // namespace mft
