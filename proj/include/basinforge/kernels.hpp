#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "jet.hpp"

namespace basinforge {

// Coefficients of a PolyMap2 split into real/imaginary planes, graded order.
// Built once per germ and reused across point blocks.
struct JetCoeffs {
    int K = 1;
    std::vector<double> c1r, c1i, c2r, c2i;

    static JetCoeffs from(const PolyMap2& p);
};

// Structure-of-arrays point batch.
struct PointBatch {
    std::vector<double> zr, zi, wr, wi;

    std::size_t size() const { return zr.size(); }
    void resize(std::size_t n) {
        zr.resize(n);
        zi.resize(n);
        wr.resize(n);
        wi.resize(n);
    }
    static PointBatch from(const std::vector<Vec2>& pts);
    Vec2 get(std::size_t i) const {
        return {cplx{zr[i], zi[i]}, cplx{wr[i], wi[i]}};
    }
    void set(std::size_t i, const Vec2& v) {
        zr[i] = v.z.real();
        zi[i] = v.z.imag();
        wr[i] = v.w.real();
        wi[i] = v.w.imag();
    }
};

// Evaluates the map at n points: out gets (f1, f2) per point, SoA.
using EvalBatchFn = void (*)(const JetCoeffs& jet, const double* zr, const double* zi,
                             const double* wr, const double* wi, std::size_t n, double* f1r,
                             double* f1i, double* f2r, double* f2i);

void eval_batch_scalar(const JetCoeffs& jet, const double* zr, const double* zi, const double* wr,
                       const double* wi, std::size_t n, double* f1r, double* f1i, double* f2r,
                       double* f2i);

#if defined(__x86_64__) || defined(_M_X64)
void eval_batch_avx2(const JetCoeffs& jet, const double* zr, const double* zi, const double* wr,
                     const double* wi, std::size_t n, double* f1r, double* f1i, double* f2r,
                     double* f2i);
bool avx2_supported();
#endif
#if defined(__aarch64__)
void eval_batch_neon(const JetCoeffs& jet, const double* zr, const double* zi, const double* wr,
                     const double* wi, std::size_t n, double* f1r, double* f1i, double* f2r,
                     double* f2i);
#endif

// Runtime-selected kernel (BASINFORGE_SIMD=scalar forces the reference path).
EvalBatchFn eval_batch_kernel();
const char* kernel_backend_name();

// Applies the map to the batch in place.
void apply_map_batch(const JetCoeffs& jet, PointBatch& pts);

// Squared norms of the images, without storing them.
void image_norms_sq(const JetCoeffs& jet, const PointBatch& pts, std::vector<double>& out);

} // namespace basinforge
