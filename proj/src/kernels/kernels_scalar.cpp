#include "quadtune/kernels.hpp"

#include <cmath>
#include <cstring>

// Reference implementations. Plain loops, no tricks: these define the
// semantics that the vectorized variants are tested against.

namespace quadtune::kernels {
namespace {

void s_matmul_nt(double* c, const double* a, const double* b,
                 int m, int n, int k) {
    for (int i = 0; i < m; ++i) {
        const double* ai = a + (std::size_t)i * k;
        for (int j = 0; j < n; ++j) {
            const double* bj = b + (std::size_t)j * k;
            double s = 0.0;
            for (int l = 0; l < k; ++l) s += ai[l] * bj[l];
            c[(std::size_t)i * n + j] = s;
        }
    }
}

void s_matmul_nn(double* c, const double* a, const double* b,
                 int m, int n, int k) {
    std::memset(c, 0, sizeof(double) * (std::size_t)m * n);
    for (int i = 0; i < m; ++i) {
        double* ci = c + (std::size_t)i * n;
        for (int l = 0; l < k; ++l) {
            double av = a[(std::size_t)i * k + l];
            const double* bl = b + (std::size_t)l * n;
            for (int j = 0; j < n; ++j) ci[j] += av * bl[j];
        }
    }
}

void s_matmul_tn(double* c, const double* a, const double* b,
                 int m, int n, int k) {
    std::memset(c, 0, sizeof(double) * (std::size_t)m * n);
    for (int l = 0; l < k; ++l) {
        const double* al = a + (std::size_t)l * m;
        const double* bl = b + (std::size_t)l * n;
        for (int i = 0; i < m; ++i) {
            double av = al[i];
            double* ci = c + (std::size_t)i * n;
            for (int j = 0; j < n; ++j) ci[j] += av * bl[j];
        }
    }
}

void s_add_row_vector(double* a, const double* v, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        double* ar = a + (std::size_t)r * cols;
        for (int c = 0; c < cols; ++c) ar[c] += v[c];
    }
}

void s_col_sums(const double* a, double* out, int rows, int cols) {
    std::memset(out, 0, sizeof(double) * (std::size_t)cols);
    for (int r = 0; r < rows; ++r) {
        const double* ar = a + (std::size_t)r * cols;
        for (int c = 0; c < cols; ++c) out[c] += ar[c];
    }
}

void s_tanh_backward(double* dz, const double* y, int n) {
    for (int i = 0; i < n; ++i) dz[i] *= 1.0 - y[i] * y[i];
}

void s_clip_backward(double* dz, const double* z, int n,
                     double lo, double hi) {
    for (int i = 0; i < n; ++i)
        if (!(z[i] > lo && z[i] < hi)) dz[i] = 0.0;
}

void s_adam_update(double* w, const double* g, double* m, double* v, int n,
                   double lr, double b1, double b2, double eps, double l2,
                   double inv_bc1, double inv_bc2) {
    for (int i = 0; i < n; ++i) {
        double gi = g[i] + l2 * w[i];
        m[i] = b1 * m[i] + (1.0 - b1) * gi;
        // grouped (gi * gi) first to match the vectorized variant bit for bit
        v[i] = b2 * v[i] + (1.0 - b2) * (gi * gi);
        double mhat = m[i] * inv_bc1;
        double vhat = v[i] * inv_bc2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

void s_lerp_toward(double* dst, const double* src, int n, double tau) {
    for (int i = 0; i < n; ++i)
        dst[i] = (1.0 - tau) * dst[i] + tau * src[i];
}

} // namespace

namespace detail {
extern const KernelTable scalar_table;
const KernelTable scalar_table = {
    s_matmul_nt, s_matmul_nn,     s_matmul_tn,     s_add_row_vector,
    s_col_sums,  s_tanh_backward, s_clip_backward, s_adam_update,
    s_lerp_toward,
};
} // namespace detail

} // namespace quadtune::kernels
