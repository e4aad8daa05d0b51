#include "quadtune/kernels.hpp"

#ifdef QUADTUNE_HAVE_AVX2

#include <immintrin.h>

#include <cmath>
#include <cstring>

// AVX2+FMA variants. This file is built with -mavx2 -mfma; nothing here may
// run before dispatch.cpp has checked cpuid. Summation order inside a dot
// product is fixed (4 lane accumulators, then a lane reduction, then the
// scalar tail), so results are reproducible run to run on the same backend.

namespace quadtune::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    __m128d s = _mm_add_pd(lo, hi); // [v0+v2, v1+v3]
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

void a_matmul_nt(double* c, const double* a, const double* b,
                 int m, int n, int k) {
    for (int i = 0; i < m; ++i) {
        const double* ai = a + (std::size_t)i * k;
        for (int j = 0; j < n; ++j) {
            const double* bj = b + (std::size_t)j * k;
            __m256d acc0 = _mm256_setzero_pd();
            __m256d acc1 = _mm256_setzero_pd();
            __m256d acc2 = _mm256_setzero_pd();
            __m256d acc3 = _mm256_setzero_pd();
            int l = 0;
            for (; l + 16 <= k; l += 16) {
                acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(ai + l),
                                       _mm256_loadu_pd(bj + l), acc0);
                acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(ai + l + 4),
                                       _mm256_loadu_pd(bj + l + 4), acc1);
                acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(ai + l + 8),
                                       _mm256_loadu_pd(bj + l + 8), acc2);
                acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(ai + l + 12),
                                       _mm256_loadu_pd(bj + l + 12), acc3);
            }
            for (; l + 4 <= k; l += 4) {
                acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(ai + l),
                                       _mm256_loadu_pd(bj + l), acc0);
            }
            __m256d acc = _mm256_add_pd(_mm256_add_pd(acc0, acc1),
                                        _mm256_add_pd(acc2, acc3));
            double s = hsum(acc);
            for (; l < k; ++l) s += ai[l] * bj[l];
            c[(std::size_t)i * n + j] = s;
        }
    }
}

void a_matmul_nn(double* c, const double* a, const double* b,
                 int m, int n, int k) {
    std::memset(c, 0, sizeof(double) * (std::size_t)m * n);
    for (int i = 0; i < m; ++i) {
        double* ci = c + (std::size_t)i * n;
        for (int l = 0; l < k; ++l) {
            __m256d av = _mm256_set1_pd(a[(std::size_t)i * k + l]);
            const double* bl = b + (std::size_t)l * n;
            int j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cj = _mm256_loadu_pd(ci + j);
                cj = _mm256_fmadd_pd(av, _mm256_loadu_pd(bl + j), cj);
                _mm256_storeu_pd(ci + j, cj);
            }
            double avs = a[(std::size_t)i * k + l];
            for (; j < n; ++j) ci[j] += avs * bl[j];
        }
    }
}

void a_matmul_tn(double* c, const double* a, const double* b,
                 int m, int n, int k) {
    std::memset(c, 0, sizeof(double) * (std::size_t)m * n);
    for (int l = 0; l < k; ++l) {
        const double* al = a + (std::size_t)l * m;
        const double* bl = b + (std::size_t)l * n;
        for (int i = 0; i < m; ++i) {
            __m256d av = _mm256_set1_pd(al[i]);
            double* ci = c + (std::size_t)i * n;
            int j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cj = _mm256_loadu_pd(ci + j);
                cj = _mm256_fmadd_pd(av, _mm256_loadu_pd(bl + j), cj);
                _mm256_storeu_pd(ci + j, cj);
            }
            for (; j < n; ++j) ci[j] += al[i] * bl[j];
        }
    }
}

void a_add_row_vector(double* a, const double* v, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        double* ar = a + (std::size_t)r * cols;
        int c = 0;
        for (; c + 4 <= cols; c += 4) {
            _mm256_storeu_pd(ar + c, _mm256_add_pd(_mm256_loadu_pd(ar + c),
                                                   _mm256_loadu_pd(v + c)));
        }
        for (; c < cols; ++c) ar[c] += v[c];
    }
}

void a_col_sums(const double* a, double* out, int rows, int cols) {
    std::memset(out, 0, sizeof(double) * (std::size_t)cols);
    for (int r = 0; r < rows; ++r) {
        const double* ar = a + (std::size_t)r * cols;
        int c = 0;
        for (; c + 4 <= cols; c += 4) {
            _mm256_storeu_pd(out + c, _mm256_add_pd(_mm256_loadu_pd(out + c),
                                                    _mm256_loadu_pd(ar + c)));
        }
        for (; c < cols; ++c) out[c] += ar[c];
    }
}

void a_tanh_backward(double* dz, const double* y, int n) {
    const __m256d one = _mm256_set1_pd(1.0);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yv = _mm256_loadu_pd(y + i);
        __m256d t = _mm256_sub_pd(one, _mm256_mul_pd(yv, yv));
        _mm256_storeu_pd(dz + i, _mm256_mul_pd(_mm256_loadu_pd(dz + i), t));
    }
    for (; i < n; ++i) dz[i] *= 1.0 - y[i] * y[i];
}

void a_clip_backward(double* dz, const double* z, int n,
                     double lo, double hi) {
    const __m256d lov = _mm256_set1_pd(lo);
    const __m256d hiv = _mm256_set1_pd(hi);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d zv = _mm256_loadu_pd(z + i);
        __m256d inside = _mm256_and_pd(_mm256_cmp_pd(zv, lov, _CMP_GT_OQ),
                                       _mm256_cmp_pd(zv, hiv, _CMP_LT_OQ));
        _mm256_storeu_pd(dz + i,
                         _mm256_and_pd(_mm256_loadu_pd(dz + i), inside));
    }
    for (; i < n; ++i)
        if (!(z[i] > lo && z[i] < hi)) dz[i] = 0.0;
}

// Plain mul/add (no FMA) so the arithmetic matches the scalar reference
// bit for bit; this kernel is memory-bound anyway.
void a_adam_update(double* w, const double* g, double* m, double* v, int n,
                   double lr, double b1, double b2, double eps, double l2,
                   double inv_bc1, double inv_bc2) {
    const __m256d lrv = _mm256_set1_pd(lr);
    const __m256d b1v = _mm256_set1_pd(b1);
    const __m256d b2v = _mm256_set1_pd(b2);
    const __m256d omb1 = _mm256_set1_pd(1.0 - b1);
    const __m256d omb2 = _mm256_set1_pd(1.0 - b2);
    const __m256d epsv = _mm256_set1_pd(eps);
    const __m256d l2v = _mm256_set1_pd(l2);
    const __m256d ibc1 = _mm256_set1_pd(inv_bc1);
    const __m256d ibc2 = _mm256_set1_pd(inv_bc2);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d wv = _mm256_loadu_pd(w + i);
        __m256d gv = _mm256_add_pd(_mm256_loadu_pd(g + i),
                                   _mm256_mul_pd(l2v, wv));
        __m256d mv = _mm256_add_pd(_mm256_mul_pd(b1v, _mm256_loadu_pd(m + i)),
                                   _mm256_mul_pd(omb1, gv));
        __m256d vv = _mm256_add_pd(_mm256_mul_pd(b2v, _mm256_loadu_pd(v + i)),
                                   _mm256_mul_pd(omb2, _mm256_mul_pd(gv, gv)));
        _mm256_storeu_pd(m + i, mv);
        _mm256_storeu_pd(v + i, vv);
        __m256d mhat = _mm256_mul_pd(mv, ibc1);
        __m256d vhat = _mm256_mul_pd(vv, ibc2);
        __m256d den = _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv);
        wv = _mm256_sub_pd(wv, _mm256_div_pd(_mm256_mul_pd(lrv, mhat), den));
        _mm256_storeu_pd(w + i, wv);
    }
    for (; i < n; ++i) {
        double gi = g[i] + l2 * w[i];
        m[i] = b1 * m[i] + (1.0 - b1) * gi;
        v[i] = b2 * v[i] + (1.0 - b2) * (gi * gi);
        double mhat = m[i] * inv_bc1;
        double vhat = v[i] * inv_bc2;
        w[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

void a_lerp_toward(double* dst, const double* src, int n, double tau) {
    const __m256d tv = _mm256_set1_pd(tau);
    const __m256d omt = _mm256_set1_pd(1.0 - tau);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_mul_pd(omt, _mm256_loadu_pd(dst + i));
        __m256d s = _mm256_mul_pd(tv, _mm256_loadu_pd(src + i));
        _mm256_storeu_pd(dst + i, _mm256_add_pd(d, s));
    }
    for (; i < n; ++i) dst[i] = (1.0 - tau) * dst[i] + tau * src[i];
}

} // namespace

namespace detail {
extern const KernelTable avx2_table;
const KernelTable avx2_table = {
    a_matmul_nt, a_matmul_nn,     a_matmul_tn,     a_add_row_vector,
    a_col_sums,  a_tanh_backward, a_clip_backward, a_adam_update,
    a_lerp_toward,
};
} // namespace detail

} // namespace quadtune::kernels

#endif // QUADTUNE_HAVE_AVX2
