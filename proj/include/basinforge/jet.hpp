#pragma once

#include <string>
#include <vector>

#include "complex2.hpp"

namespace basinforge {

// Truncated polynomial map C^2 -> C^2 with zero constant term. Coefficients
// are indexed by component and bidegree (i, j), 1 <= i + j <= K, stored
// densely in graded order. K stays small (<= 8 in every pipeline), so the
// triangular array beats a sparse map.
class PolyMap2 {
  public:
    PolyMap2() : cutoff_(1), coeffs_(2 * slots(1)) {}
    explicit PolyMap2(int cutoff);

    static PolyMap2 identity(int cutoff);
    static PolyMap2 linear(const Mat2& m, int cutoff);

    int cutoff() const { return cutoff_; }

    // comp is 1 or 2; (i, j) the bidegree of z^i w^j.
    cplx coeff(int comp, int i, int j) const { return coeffs_[index(comp, i, j)]; }
    void set_coeff(int comp, int i, int j, cplx v) { coeffs_[index(comp, i, j)] = v; }
    void add_coeff(int comp, int i, int j, cplx v) { coeffs_[index(comp, i, j)] += v; }

    Mat2 linear_part() const;

    // Drops every term of total degree above new_cutoff (or pads with zeros).
    PolyMap2 truncated(int new_cutoff) const;

    bool finite() const;
    double max_coeff_abs() const;
    double max_coeff_abs_degree(int m) const;

    // Exposed for the batch kernels: coefficients of one component in graded
    // order (degree 1 block first, (i, j) with j ascending inside a degree).
    const cplx* component_data(int comp) const { return coeffs_.data() + (comp - 1) * slots(cutoff_); }
    static int slots(int cutoff) { return (cutoff + 1) * (cutoff + 2) / 2 - 1; }
    static int monomial_offset(int i, int j); // within a component block

    std::string to_json() const;
    static PolyMap2 from_json(const std::string& text);

  private:
    int index(int comp, int i, int j) const;

    int cutoff_;
    std::vector<cplx> coeffs_;
};

// Truncation of p(q(z,w)) to degree K. Requires cutoff >= K on both maps.
PolyMap2 compose(const PolyMap2& p, const PolyMap2& q, int K);

// Formal inverse: compose(p, result, K) = Id + O(K+1). Requires the linear
// part to be invertible (|det| > 1e-14).
PolyMap2 invert_formal(const PolyMap2& p, int K);

Vec2 evaluate(const PolyMap2& p, const Vec2& v);

struct CauchyReport {
    bool ok = true;
    struct Violation {
        int comp, i, j;
        double magnitude;
        double bound;
    };
    std::vector<Violation> violations;
};

// Checks every degree-m coefficient against D * sqrt(2)^m.
CauchyReport cauchy_certify(const PolyMap2& p, double D);

} // namespace basinforge
