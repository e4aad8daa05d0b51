#include "quadtune/kernels.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace quadtune::kernels {

namespace detail {
extern const KernelTable scalar_table;
#ifdef QUADTUNE_HAVE_AVX2
extern const KernelTable avx2_table;
#endif
} // namespace detail

namespace {

bool cpu_has_avx2() {
#ifdef QUADTUNE_HAVE_AVX2
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

struct Dispatch {
    const KernelTable* table = &detail::scalar_table;
    Backend backend = Backend::scalar;

    Dispatch() {
        bool want_avx2 = cpu_has_avx2();
        if (const char* env = std::getenv("QUADTUNE_KERNELS")) {
            if (std::strcmp(env, "scalar") == 0) {
                want_avx2 = false;
            } else if (std::strcmp(env, "avx2") == 0) {
                if (!cpu_has_avx2()) {
                    std::fprintf(stderr,
                                 "quadtune: QUADTUNE_KERNELS=avx2 requested "
                                 "but unavailable, using scalar\n");
                    want_avx2 = false;
                }
            } else {
                std::fprintf(stderr,
                             "quadtune: unknown QUADTUNE_KERNELS value '%s' "
                             "(expected scalar|avx2), ignoring\n",
                             env);
            }
        }
#ifdef QUADTUNE_HAVE_AVX2
        if (want_avx2) {
            table = &detail::avx2_table;
            backend = Backend::avx2;
        }
#else
        (void)want_avx2;
#endif
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

} // namespace

const KernelTable& table() { return *dispatch().table; }

Backend active_backend() { return dispatch().backend; }

const char* backend_name(Backend b) {
    return b == Backend::avx2 ? "avx2" : "scalar";
}

bool set_backend(Backend b) {
    if (b == Backend::avx2) {
        if (!cpu_has_avx2()) return false;
#ifdef QUADTUNE_HAVE_AVX2
        dispatch().table = &detail::avx2_table;
        dispatch().backend = Backend::avx2;
        return true;
#else
        return false;
#endif
    }
    dispatch().table = &detail::scalar_table;
    dispatch().backend = Backend::scalar;
    return true;
}

} // namespace quadtune::kernels
