#include "basinforge/jet.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace basinforge {

PolyMap2::PolyMap2(int cutoff) : cutoff_(cutoff) {
    if (cutoff < 1) throw std::invalid_argument("PolyMap2: cutoff must be >= 1");
    coeffs_.assign(2 * static_cast<std::size_t>(slots(cutoff)), cplx{0.0, 0.0});
}

int PolyMap2::monomial_offset(int i, int j) {
    int m = i + j;
    // degrees 1..m-1 occupy m(m+1)/2 - 1 slots
    return m * (m + 1) / 2 - 1 + j;
}

int PolyMap2::index(int comp, int i, int j) const {
    int m = i + j;
    if (comp < 1 || comp > 2 || i < 0 || j < 0 || m < 1 || m > cutoff_)
        throw std::out_of_range("PolyMap2: bad coefficient index");
    return (comp - 1) * slots(cutoff_) + monomial_offset(i, j);
}

PolyMap2 PolyMap2::identity(int cutoff) {
    PolyMap2 p(cutoff);
    p.set_coeff(1, 1, 0, cplx{1.0, 0.0});
    p.set_coeff(2, 0, 1, cplx{1.0, 0.0});
    return p;
}

PolyMap2 PolyMap2::linear(const Mat2& m, int cutoff) {
    PolyMap2 p(cutoff);
    p.set_coeff(1, 1, 0, m.a11);
    p.set_coeff(1, 0, 1, m.a12);
    p.set_coeff(2, 1, 0, m.a21);
    p.set_coeff(2, 0, 1, m.a22);
    return p;
}

Mat2 PolyMap2::linear_part() const {
    return Mat2{coeff(1, 1, 0), coeff(1, 0, 1), coeff(2, 1, 0), coeff(2, 0, 1)};
}

PolyMap2 PolyMap2::truncated(int new_cutoff) const {
    PolyMap2 out(new_cutoff);
    int keep = std::min(new_cutoff, cutoff_);
    for (int comp = 1; comp <= 2; ++comp)
        for (int m = 1; m <= keep; ++m)
            for (int j = 0; j <= m; ++j) out.set_coeff(comp, m - j, j, coeff(comp, m - j, j));
    return out;
}

bool PolyMap2::finite() const {
    for (const cplx& c : coeffs_)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

double PolyMap2::max_coeff_abs() const {
    double m = 0.0;
    for (const cplx& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

double PolyMap2::max_coeff_abs_degree(int deg) const {
    double m = 0.0;
    for (int comp = 1; comp <= 2; ++comp)
        for (int j = 0; j <= deg; ++j) m = std::max(m, std::abs(coeff(comp, deg - j, j)));
    return m;
}

namespace {

// Dense scalar polynomial with vanishing constant term, degrees 1..K. Used
// only inside composition.
struct ScalarPoly {
    int K;
    std::vector<cplx> c; // graded order, same layout as one PolyMap2 component

    explicit ScalarPoly(int cutoff) : K(cutoff), c(PolyMap2::slots(cutoff), cplx{0, 0}) {}

    cplx get(int i, int j) const { return c[PolyMap2::monomial_offset(i, j)]; }
    void add(int i, int j, cplx v) { c[PolyMap2::monomial_offset(i, j)] += v; }
};

// Product truncated to degree K. Both factors have vanishing order >= 1, so
// the result vanishes to order >= 2; terms past K are dropped immediately.
ScalarPoly mul_trunc(const ScalarPoly& a, const ScalarPoly& b) {
    ScalarPoly out(a.K);
    for (int ma = 1; ma < a.K; ++ma)
        for (int ja = 0; ja <= ma; ++ja) {
            cplx ca = a.get(ma - ja, ja);
            if (ca == cplx{0, 0}) continue;
            int mb_max = a.K - ma;
            for (int mb = 1; mb <= mb_max; ++mb)
                for (int jb = 0; jb <= mb; ++jb) {
                    cplx cb = b.get(mb - jb, jb);
                    if (cb == cplx{0, 0}) continue;
                    out.add(ma - ja + mb - jb, ja + jb, ca * cb);
                }
        }
    return out;
}

} // namespace

PolyMap2 compose(const PolyMap2& p, const PolyMap2& q, int K) {
    if (p.cutoff() < K || q.cutoff() < K)
        throw std::invalid_argument("compose: both maps need cutoff >= K");

    // Powers q1^i * q2^j as truncated scalar polynomials. q1^i vanishes to
    // order >= i, so only i + j <= K contributes.
    ScalarPoly q1(K), q2(K);
    for (int m = 1; m <= K; ++m)
        for (int j = 0; j <= m; ++j) {
            q1.add(m - j, j, q.coeff(1, m - j, j));
            q2.add(m - j, j, q.coeff(2, m - j, j));
        }
    std::vector<ScalarPoly> pow1, pow2;
    pow1.reserve(K + 1);
    pow2.reserve(K + 1);
    pow1.emplace_back(K); // unused slot for exponent 0
    pow2.emplace_back(K);
    pow1.push_back(q1);
    pow2.push_back(q2);
    for (int e = 2; e <= K; ++e) {
        pow1.push_back(mul_trunc(pow1[e - 1], q1));
        pow2.push_back(mul_trunc(pow2[e - 1], q2));
    }

    PolyMap2 out(K);
    for (int comp = 1; comp <= 2; ++comp) {
        ScalarPoly acc(K);
        for (int m = 1; m <= K; ++m)
            for (int j = 0; j <= m; ++j) {
                int i = m - j;
                cplx cp = p.coeff(comp, i, j);
                if (cp == cplx{0, 0}) continue;
                if (i == 0) {
                    for (std::size_t t = 0; t < acc.c.size(); ++t) acc.c[t] += cp * pow2[j].c[t];
                } else if (j == 0) {
                    for (std::size_t t = 0; t < acc.c.size(); ++t) acc.c[t] += cp * pow1[i].c[t];
                } else {
                    ScalarPoly prod = mul_trunc(pow1[i], pow2[j]);
                    for (std::size_t t = 0; t < acc.c.size(); ++t) acc.c[t] += cp * prod.c[t];
                }
            }
        for (int m = 1; m <= K; ++m)
            for (int j = 0; j <= m; ++j) out.set_coeff(comp, m - j, j, acc.get(m - j, j));
    }
    return out;
}

PolyMap2 invert_formal(const PolyMap2& p, int K) {
    if (p.cutoff() < K) throw std::invalid_argument("invert_formal: cutoff < K");
    Mat2 L = p.linear_part();
    if (std::abs(L.det()) <= 1e-14)
        throw std::domain_error("invert_formal: linear part is singular");
    Mat2 Linv = L.inverse();

    PolyMap2 q = PolyMap2::linear(Linv, K);
    // Degree-by-degree correction: with q exact below degree m, the degree-m
    // error of p(q) is killed by subtracting Linv * error.
    for (int m = 2; m <= K; ++m) {
        PolyMap2 r = compose(p.truncated(m), q.truncated(m), m);
        for (int j = 0; j <= m; ++j) {
            int i = m - j;
            cplx e1 = r.coeff(1, i, j);
            cplx e2 = r.coeff(2, i, j);
            if (e1 == cplx{0, 0} && e2 == cplx{0, 0}) continue;
            q.add_coeff(1, i, j, -(Linv.a11 * e1 + Linv.a12 * e2));
            q.add_coeff(2, i, j, -(Linv.a21 * e1 + Linv.a22 * e2));
        }
    }
    return q;
}

Vec2 evaluate(const PolyMap2& p, const Vec2& v) {
    int K = p.cutoff();
    // power tables z^i, w^j
    std::vector<cplx> zp(K + 1), wp(K + 1);
    zp[0] = wp[0] = cplx{1, 0};
    for (int e = 1; e <= K; ++e) {
        zp[e] = zp[e - 1] * v.z;
        wp[e] = wp[e - 1] * v.w;
    }
    cplx r1{0, 0}, r2{0, 0};
    for (int m = 1; m <= K; ++m)
        for (int j = 0; j <= m; ++j) {
            cplx mono = zp[m - j] * wp[j];
            r1 += p.coeff(1, m - j, j) * mono;
            r2 += p.coeff(2, m - j, j) * mono;
        }
    return {r1, r2};
}

CauchyReport cauchy_certify(const PolyMap2& p, double D) {
    if (!(D > 0.0 && D < 1.0)) throw std::invalid_argument("cauchy_certify: need D in (0,1)");
    CauchyReport rep;
    const double sqrt2 = std::sqrt(2.0);
    for (int comp = 1; comp <= 2; ++comp)
        for (int m = 1; m <= p.cutoff(); ++m) {
            double bound = D * std::pow(sqrt2, m);
            for (int j = 0; j <= m; ++j) {
                double mag = std::abs(p.coeff(comp, m - j, j));
                if (mag > bound) {
                    rep.ok = false;
                    rep.violations.push_back({comp, m - j, j, mag, bound});
                }
            }
        }
    return rep;
}

std::string PolyMap2::to_json() const {
    nlohmann::ordered_json j;
    j["K"] = cutoff_;
    auto& arr = j["coeffs"] = nlohmann::ordered_json::array();
    for (int comp = 1; comp <= 2; ++comp)
        for (int m = 1; m <= cutoff_; ++m)
            for (int jj = 0; jj <= m; ++jj) {
                cplx c = coeff(comp, m - jj, jj);
                if (c == cplx{0, 0}) continue;
                arr.push_back({comp, m - jj, jj, c.real(), c.imag()});
            }
    return j.dump();
}

PolyMap2 PolyMap2::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    PolyMap2 p(j.at("K").get<int>());
    for (const auto& row : j.at("coeffs")) {
        int comp = row.at(0).get<int>();
        int i = row.at(1).get<int>();
        int jj = row.at(2).get<int>();
        p.set_coeff(comp, i, jj, cplx{row.at(3).get<double>(), row.at(4).get<double>()});
    }
    return p;
}

} // namespace basinforge
