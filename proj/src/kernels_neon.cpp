// NEON variant (aarch64), 2 points per lane. Mirrors the AVX2 kernel.
#include "basinforge/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace basinforge {

namespace {

inline void cmul(float64x2_t ar, float64x2_t ai, float64x2_t br, float64x2_t bi, float64x2_t& or_,
                 float64x2_t& oi) {
    or_ = vsubq_f64(vmulq_f64(ar, br), vmulq_f64(ai, bi));
    oi = vaddq_f64(vmulq_f64(ar, bi), vmulq_f64(ai, br));
}

} // namespace

void eval_batch_neon(const JetCoeffs& jet, const double* zr, const double* zi, const double* wr,
                     const double* wi, std::size_t n, double* f1r, double* f1i, double* f2r,
                     double* f2i) {
    const int K = jet.K;
    if (K > 8) {
        eval_batch_scalar(jet, zr, zi, wr, wi, n, f1r, f1i, f2r, f2i);
        return;
    }
    const std::size_t main = n - n % 2;
    float64x2_t zpr[9], zpi[9], wpr[9], wpi[9];
    for (std::size_t s = 0; s < main; s += 2) {
        float64x2_t xr = vld1q_f64(zr + s), xi = vld1q_f64(zi + s);
        float64x2_t yr = vld1q_f64(wr + s), yi = vld1q_f64(wi + s);
        zpr[0] = wpr[0] = vdupq_n_f64(1.0);
        zpi[0] = wpi[0] = vdupq_n_f64(0.0);
        for (int e = 1; e <= K; ++e) {
            cmul(zpr[e - 1], zpi[e - 1], xr, xi, zpr[e], zpi[e]);
            cmul(wpr[e - 1], wpi[e - 1], yr, yi, wpr[e], wpi[e]);
        }
        float64x2_t a1r = vdupq_n_f64(0.0), a1i = a1r, a2r = a1r, a2i = a1r;
        int t = 0;
        for (int m = 1; m <= K; ++m)
            for (int j = 0; j <= m; ++j, ++t) {
                int i = m - j;
                float64x2_t mr, mi;
                cmul(zpr[i], zpi[i], wpr[j], wpi[j], mr, mi);
                float64x2_t cr = vdupq_n_f64(jet.c1r[t]), ci = vdupq_n_f64(jet.c1i[t]);
                a1r = vfmaq_f64(a1r, cr, mr);
                a1r = vfmsq_f64(a1r, ci, mi);
                a1i = vfmaq_f64(a1i, cr, mi);
                a1i = vfmaq_f64(a1i, ci, mr);
                cr = vdupq_n_f64(jet.c2r[t]);
                ci = vdupq_n_f64(jet.c2i[t]);
                a2r = vfmaq_f64(a2r, cr, mr);
                a2r = vfmsq_f64(a2r, ci, mi);
                a2i = vfmaq_f64(a2i, cr, mi);
                a2i = vfmaq_f64(a2i, ci, mr);
            }
        vst1q_f64(f1r + s, a1r);
        vst1q_f64(f1i + s, a1i);
        vst1q_f64(f2r + s, a2r);
        vst1q_f64(f2i + s, a2i);
    }
    if (main < n)
        eval_batch_scalar(jet, zr + main, zi + main, wr + main, wi + main, n - main, f1r + main,
                          f1i + main, f2r + main, f2i + main);
}

} // namespace basinforge

#endif
