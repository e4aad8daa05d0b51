#pragma once

#include <cstddef>

// Dense fp64 kernels used by the network code. A scalar reference
// implementation always exists; an AVX2+FMA variant is compiled when the
// toolchain supports it and selected at runtime after a cpuid check.
// Set QUADTUNE_KERNELS=scalar|avx2 to force a backend (falls back to scalar
// with a warning if the requested one is unavailable).
//
// Results are deterministic for a fixed backend. The two backends may differ
// by a few ulps on matrix products (FMA and lane-reduction order); the
// equivalence tests bound that difference.

namespace quadtune::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name(Backend b);
// Force a backend; returns false (and keeps the current one) if unavailable.
bool set_backend(Backend b);

struct KernelTable {
    // C[m x n] = A[m x k] * B[n x k]^T  (rows of B dotted with rows of A)
    void (*matmul_nt)(double* c, const double* a, const double* b,
                      int m, int n, int k);
    // C[m x n] = A[m x k] * B[k x n]
    void (*matmul_nn)(double* c, const double* a, const double* b,
                      int m, int n, int k);
    // C[m x n] = A[k x m]^T * B[k x n]
    void (*matmul_tn)(double* c, const double* a, const double* b,
                      int m, int n, int k);
    // A[r][c] += v[c] for every row r
    void (*add_row_vector)(double* a, const double* v, int rows, int cols);
    // out[c] = sum over rows of A[r][c]
    void (*col_sums)(const double* a, double* out, int rows, int cols);
    // dz[i] *= 1 - y[i]^2   (y = tanh(z) already computed)
    void (*tanh_backward)(double* dz, const double* y, int n);
    // dz[i] = 0 where the pre-activation z[i] sits outside (lo, hi);
    // the derivative at the exact clip boundary is taken as 0.
    void (*clip_backward)(double* dz, const double* z, int n,
                          double lo, double hi);
    // Adam with L2 added to the raw gradient: g' = g + l2*w.
    // inv_bc1 = 1/(1-b1^t), inv_bc2 = 1/(1-b2^t) for the current step t.
    void (*adam_update)(double* w, const double* g, double* m, double* v,
                        int n, double lr, double b1, double b2, double eps,
                        double l2, double inv_bc1, double inv_bc2);
    // dst = (1-tau)*dst + tau*src
    void (*lerp_toward)(double* dst, const double* src, int n, double tau);
};

const KernelTable& table();

inline void matmul_nt(double* c, const double* a, const double* b,
                      int m, int n, int k) {
    table().matmul_nt(c, a, b, m, n, k);
}
inline void matmul_nn(double* c, const double* a, const double* b,
                      int m, int n, int k) {
    table().matmul_nn(c, a, b, m, n, k);
}
inline void matmul_tn(double* c, const double* a, const double* b,
                      int m, int n, int k) {
    table().matmul_tn(c, a, b, m, n, k);
}
inline void add_row_vector(double* a, const double* v, int rows, int cols) {
    table().add_row_vector(a, v, rows, cols);
}
inline void col_sums(const double* a, double* out, int rows, int cols) {
    table().col_sums(a, out, rows, cols);
}
inline void tanh_backward(double* dz, const double* y, int n) {
    table().tanh_backward(dz, y, n);
}
inline void clip_backward(double* dz, const double* z, int n,
                          double lo, double hi) {
    table().clip_backward(dz, z, n, lo, hi);
}
inline void adam_update(double* w, const double* g, double* m, double* v,
                        int n, double lr, double b1, double b2, double eps,
                        double l2, double inv_bc1, double inv_bc2) {
    table().adam_update(w, g, m, v, n, lr, b1, b2, eps, l2, inv_bc1, inv_bc2);
}
inline void lerp_toward(double* dst, const double* src, int n, double tau) {
    table().lerp_toward(dst, src, n, tau);
}

} // namespace quadtune::kernels
