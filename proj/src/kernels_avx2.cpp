// AVX2 variant of the batch jet evaluator. Compiled with -mavx2 -mfma; only
// reached after a runtime cpuid check.
#include "basinforge/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

namespace basinforge {

bool avx2_supported() {
#if defined(__GNUC__) || defined(__clang__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

// (ar + i*ai) * (br + i*bi)
inline void cmul(__m256d ar, __m256d ai, __m256d br, __m256d bi, __m256d& or_, __m256d& oi) {
    or_ = _mm256_fmsub_pd(ar, br, _mm256_mul_pd(ai, bi));
    oi = _mm256_fmadd_pd(ar, bi, _mm256_mul_pd(ai, br));
}

} // namespace

void eval_batch_avx2(const JetCoeffs& jet, const double* zr, const double* zi, const double* wr,
                     const double* wi, std::size_t n, double* f1r, double* f1i, double* f2r,
                     double* f2i) {
    const int K = jet.K;
    if (K > 8) { // pipelines keep K <= 8; anything larger takes the reference path
        eval_batch_scalar(jet, zr, zi, wr, wi, n, f1r, f1i, f2r, f2i);
        return;
    }
    const std::size_t main = n - n % 4;

    // 4 points per lane; power tables kept on the stack
    __m256d zpr[9], zpi[9], wpr[9], wpi[9];
    for (std::size_t s = 0; s < main; s += 4) {
        __m256d xr = _mm256_loadu_pd(zr + s), xi = _mm256_loadu_pd(zi + s);
        __m256d yr = _mm256_loadu_pd(wr + s), yi = _mm256_loadu_pd(wi + s);
        zpr[0] = wpr[0] = _mm256_set1_pd(1.0);
        zpi[0] = wpi[0] = _mm256_setzero_pd();
        for (int e = 1; e <= K; ++e) {
            cmul(zpr[e - 1], zpi[e - 1], xr, xi, zpr[e], zpi[e]);
            cmul(wpr[e - 1], wpi[e - 1], yr, yi, wpr[e], wpi[e]);
        }
        __m256d a1r = _mm256_setzero_pd(), a1i = _mm256_setzero_pd();
        __m256d a2r = _mm256_setzero_pd(), a2i = _mm256_setzero_pd();
        int t = 0;
        for (int m = 1; m <= K; ++m)
            for (int j = 0; j <= m; ++j, ++t) {
                int i = m - j;
                __m256d mr, mi;
                cmul(zpr[i], zpi[i], wpr[j], wpi[j], mr, mi);
                __m256d cr = _mm256_set1_pd(jet.c1r[t]), ci = _mm256_set1_pd(jet.c1i[t]);
                a1r = _mm256_fmadd_pd(cr, mr, a1r);
                a1r = _mm256_fnmadd_pd(ci, mi, a1r);
                a1i = _mm256_fmadd_pd(cr, mi, a1i);
                a1i = _mm256_fmadd_pd(ci, mr, a1i);
                cr = _mm256_set1_pd(jet.c2r[t]);
                ci = _mm256_set1_pd(jet.c2i[t]);
                a2r = _mm256_fmadd_pd(cr, mr, a2r);
                a2r = _mm256_fnmadd_pd(ci, mi, a2r);
                a2i = _mm256_fmadd_pd(cr, mi, a2i);
                a2i = _mm256_fmadd_pd(ci, mr, a2i);
            }
        _mm256_storeu_pd(f1r + s, a1r);
        _mm256_storeu_pd(f1i + s, a1i);
        _mm256_storeu_pd(f2r + s, a2r);
        _mm256_storeu_pd(f2i + s, a2i);
    }
    if (main < n)
        eval_batch_scalar(jet, zr + main, zi + main, wr + main, wi + main, n - main, f1r + main,
                          f1i + main, f2r + main, f2i + main);
}

} // namespace basinforge

#endif
