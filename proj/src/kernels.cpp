#include "basinforge/kernels.hpp"

#include <cstdlib>

namespace basinforge {

JetCoeffs JetCoeffs::from(const PolyMap2& p) {
    JetCoeffs jc;
    jc.K = p.cutoff();
    int n = PolyMap2::slots(jc.K);
    jc.c1r.resize(n);
    jc.c1i.resize(n);
    jc.c2r.resize(n);
    jc.c2i.resize(n);
    const cplx* c1 = p.component_data(1);
    const cplx* c2 = p.component_data(2);
    for (int t = 0; t < n; ++t) {
        jc.c1r[t] = c1[t].real();
        jc.c1i[t] = c1[t].imag();
        jc.c2r[t] = c2[t].real();
        jc.c2i[t] = c2[t].imag();
    }
    return jc;
}

PointBatch PointBatch::from(const std::vector<Vec2>& pts) {
    PointBatch b;
    b.resize(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) b.set(i, pts[i]);
    return b;
}

void eval_batch_scalar(const JetCoeffs& jet, const double* zr, const double* zi, const double* wr,
                       const double* wi, std::size_t n, double* f1r, double* f1i, double* f2r,
                       double* f2i) {
    const int K = jet.K;
    // power tables per point: z^i, w^j
    std::vector<double> zpr(K + 1), zpi(K + 1), wpr(K + 1), wpi(K + 1);
    for (std::size_t s = 0; s < n; ++s) {
        zpr[0] = 1.0;
        zpi[0] = 0.0;
        wpr[0] = 1.0;
        wpi[0] = 0.0;
        for (int e = 1; e <= K; ++e) {
            zpr[e] = zpr[e - 1] * zr[s] - zpi[e - 1] * zi[s];
            zpi[e] = zpr[e - 1] * zi[s] + zpi[e - 1] * zr[s];
            wpr[e] = wpr[e - 1] * wr[s] - wpi[e - 1] * wi[s];
            wpi[e] = wpr[e - 1] * wi[s] + wpi[e - 1] * wr[s];
        }
        double a1r = 0.0, a1i = 0.0, a2r = 0.0, a2i = 0.0;
        int t = 0;
        for (int m = 1; m <= K; ++m)
            for (int j = 0; j <= m; ++j, ++t) {
                int i = m - j;
                double mr = zpr[i] * wpr[j] - zpi[i] * wpi[j];
                double mi = zpr[i] * wpi[j] + zpi[i] * wpr[j];
                a1r += jet.c1r[t] * mr - jet.c1i[t] * mi;
                a1i += jet.c1r[t] * mi + jet.c1i[t] * mr;
                a2r += jet.c2r[t] * mr - jet.c2i[t] * mi;
                a2i += jet.c2r[t] * mi + jet.c2i[t] * mr;
            }
        f1r[s] = a1r;
        f1i[s] = a1i;
        f2r[s] = a2r;
        f2i[s] = a2i;
    }
}

namespace {

EvalBatchFn select_kernel() {
    const char* force = std::getenv("BASINFORGE_SIMD");
    if (force && std::string(force) == "scalar") return eval_batch_scalar;
#if defined(__x86_64__) || defined(_M_X64)
    if (avx2_supported() && (!force || std::string(force) == "avx2")) return eval_batch_avx2;
#endif
#if defined(__aarch64__)
    if (!force || std::string(force) == "neon") return eval_batch_neon;
#endif
    return eval_batch_scalar;
}

} // namespace

EvalBatchFn eval_batch_kernel() {
    static EvalBatchFn fn = select_kernel();
    return fn;
}

const char* kernel_backend_name() {
    EvalBatchFn fn = eval_batch_kernel();
#if defined(__x86_64__) || defined(_M_X64)
    if (fn == eval_batch_avx2) return "avx2";
#endif
#if defined(__aarch64__)
    if (fn == eval_batch_neon) return "neon";
#endif
    (void)fn;
    return "scalar";
}

void apply_map_batch(const JetCoeffs& jet, PointBatch& pts) {
    std::size_t n = pts.size();
    std::vector<double> f1r(n), f1i(n), f2r(n), f2i(n);
    eval_batch_kernel()(jet, pts.zr.data(), pts.zi.data(), pts.wr.data(), pts.wi.data(), n,
                        f1r.data(), f1i.data(), f2r.data(), f2i.data());
    pts.zr.swap(f1r);
    pts.zi.swap(f1i);
    pts.wr.swap(f2r);
    pts.wi.swap(f2i);
}

void image_norms_sq(const JetCoeffs& jet, const PointBatch& pts, std::vector<double>& out) {
    std::size_t n = pts.size();
    std::vector<double> f1r(n), f1i(n), f2r(n), f2i(n);
    eval_batch_kernel()(jet, pts.zr.data(), pts.zi.data(), pts.wr.data(), pts.wi.data(), n,
                        f1r.data(), f1i.data(), f2r.data(), f2i.data());
    out.resize(n);
    for (std::size_t s = 0; s < n; ++s)
        out[s] = f1r[s] * f1r[s] + f1i[s] * f1i[s] + f2r[s] * f2r[s] + f2i[s] * f2i[s];
}

} // namespace basinforge
