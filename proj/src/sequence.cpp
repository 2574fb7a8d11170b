#include "basinforge/sequence.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "basinforge/parallel.hpp"

namespace basinforge {

AttractionBounds::AttractionBounds(double c, double d) : C(c), D(d) {
    if (!(0.0 < c && c <= d && d < 1.0))
        throw std::invalid_argument("AttractionBounds: need 0 < C <= D < 1");
}

Family family_from_string(const std::string& s) {
    if (s == "diagonal-random") return Family::DiagonalRandom;
    if (s == "triangular-random") return Family::TriangularRandom;
    if (s == "full-random") return Family::FullRandom;
    if (s == "constant") return Family::Constant;
    if (s == "alternating") return Family::Alternating;
    if (s == "fornaess-short") return Family::FornaessShort;
    if (s == "user-file") return Family::UserFile;
    throw std::invalid_argument("unknown sequence family: " + s);
}

std::string family_to_string(Family f) {
    switch (f) {
        case Family::DiagonalRandom: return "diagonal-random";
        case Family::TriangularRandom: return "triangular-random";
        case Family::FullRandom: return "full-random";
        case Family::Constant: return "constant";
        case Family::Alternating: return "alternating";
        case Family::FornaessShort: return "fornaess-short";
        case Family::UserFile: return "user-file";
    }
    return "?";
}

namespace {

// stream ids for independent RNG draws per germ
constexpr std::uint64_t kStreamLinear = 0x10;
constexpr std::uint64_t kStreamHigher = 0x20;

Mat2 small_rotation(Rng& rng, double mix) {
    double phi = rng.uniform(-mix, mix);
    cplx eta = rng.phase();
    double c = std::cos(phi), s = std::sin(phi);
    return Mat2{cplx{c, 0}, -eta * s, std::conj(eta) * s, cplx{c, 0}};
}

} // namespace

MapSequence::MapSequence(SequenceSpec spec) : spec_(std::move(spec)) {
    if (spec_.cutoff < 1) throw std::invalid_argument("MapSequence: cutoff must be >= 1");
    if (spec_.contact_order < 2) throw std::invalid_argument("MapSequence: contact order must be >= 2");
    if (spec_.family == Family::FornaessShort) {
        spec_.bounds.reset(); // the contraction rate of this family has no uniform floor
    } else if (!spec_.bounds) {
        throw std::invalid_argument("MapSequence: family requires attraction bounds");
    }
    if (spec_.family == Family::UserFile) {
        std::ifstream in(spec_.user_file);
        if (!in) throw std::runtime_error("MapSequence: cannot open " + spec_.user_file);
        std::stringstream ss;
        ss << in.rdbuf();
        nlohmann::json j = nlohmann::json::parse(ss.str());
        for (const auto& g : j.at("germs")) file_germs_.push_back(PolyMap2::from_json(g.dump()));
        if (file_germs_.empty()) throw std::runtime_error("MapSequence: no germs in file");
    }
}

void MapSequence::dominance_windows(double& dom_lo, double& dom_hi, double& sub_lo, double& sub_hi,
                                    double& nonlinear_mass) const {
    const AttractionBounds& b = *spec_.bounds;
    double gap = b.D - b.C;
    double margin = 0.02 * gap;
    double w = spec_.jitter * 0.05 * gap;
    dom_hi = b.D - margin;
    dom_lo = dom_hi - w;
    sub_lo = b.C + margin;
    sub_hi = sub_lo + w;
    nonlinear_mass = 0.5 * margin;
}

void MapSequence::add_higher_order(PolyMap2& p, Rng& rng, double mass) const {
    int k = spec_.contact_order;
    int K = spec_.cutoff;
    if (k > K) return;
    int slots = 0;
    for (int m = k; m <= K; ++m) slots += 2 * (m + 1);
    double amp = mass / slots; // hard l1 budget: |unit_disc| <= 1
    for (int comp = 1; comp <= 2; ++comp)
        for (int m = k; m <= K; ++m)
            for (int j = 0; j <= m; ++j) p.set_coeff(comp, m - j, j, amp * rng.unit_disc());
}

bool MapSequence::block_first_dominant(int n) const {
    const AttractionBounds& b = *spec_.bounds;
    double dom_lo, dom_hi, sub_lo, sub_hi, mass;
    dominance_windows(dom_lo, dom_hi, sub_lo, sub_hi, mass);
    double rate;
    if (spec_.alt_x > 0.0)
        rate = spec_.alt_x * std::log(dom_lo) - std::log(sub_hi); // log of dom_lo^x / sub_hi
    else
        rate = std::log(dom_lo / sub_hi);
    rate = std::max(rate, 1e-3);
    double lnD = std::log(1.0 / b.D);
    long long cum = 0;
    double budget = spec_.block_growth; // g^(j+1), j = 0 first
    for (int j = 0; j < 200; ++j) {
        long long len = 4 + static_cast<long long>(std::ceil(spec_.block_slack * budget * lnD / rate));
        if (n < cum + len) return j % 2 == 0;
        cum += len;
        budget *= spec_.block_growth;
    }
    return true;
}

PolyMap2 MapSequence::germ_diagonal_random(int n) const {
    Rng rng(Rng::mix(spec_.seed, kStreamLinear + 7919ULL * static_cast<std::uint64_t>(n)));
    const AttractionBounds& b = *spec_.bounds;
    double gap = b.D - b.C;
    double margin = 0.02 * gap;
    double mass = 0.5 * margin;
    double lo = b.C + margin, hi = b.D - margin;
    cplx a = rng.log_uniform(lo, hi) * rng.phase();
    cplx bb = rng.log_uniform(lo, hi) * rng.phase();
    PolyMap2 p(spec_.cutoff);
    Rng rh(Rng::mix(spec_.seed, kStreamHigher + 7919ULL * static_cast<std::uint64_t>(n)));
    add_higher_order(p, rh, mass);
    p.set_coeff(1, 1, 0, a);
    p.set_coeff(2, 0, 1, bb);
    return p;
}

PolyMap2 MapSequence::germ_triangular_random(int n) const {
    Rng rng(Rng::mix(spec_.seed, kStreamLinear + 7919ULL * static_cast<std::uint64_t>(n)));
    const AttractionBounds& b = *spec_.bounds;
    double gap = b.D - b.C;
    double margin = 0.03 * gap;
    double mass = 0.25 * margin;
    double lo = b.C + margin, hi = b.D - margin;
    cplx a = rng.log_uniform(lo, hi) * rng.phase();
    cplx bb = rng.log_uniform(lo, hi) * rng.phase();
    // Weyl: singular values move by at most |c| when the (2,1) entry is added
    cplx c = 0.4 * margin * rng.unit_disc();
    PolyMap2 p(spec_.cutoff);
    Rng rh(Rng::mix(spec_.seed, kStreamHigher + 7919ULL * static_cast<std::uint64_t>(n)));
    add_higher_order(p, rh, mass);
    p.set_coeff(1, 1, 0, a);
    p.set_coeff(2, 0, 1, bb);
    p.set_coeff(2, 1, 0, c);
    return p;
}

PolyMap2 MapSequence::germ_full_random(int n) const {
    Rng rng(Rng::mix(spec_.seed, kStreamLinear + 7919ULL * static_cast<std::uint64_t>(n)));
    const AttractionBounds& b = *spec_.bounds;
    double gap = b.D - b.C;
    double margin = 0.02 * gap;
    double mass = 0.5 * margin;
    // random draw, then rescale its singular values into the certified window
    Mat2 A{rng.unit_disc(), rng.unit_disc(), rng.unit_disc(), rng.unit_disc()};
    Mat2 H = A.adjoint().mul(A);
    double h11 = H.a11.real(), h22 = H.a22.real();
    cplx h12 = H.a12;
    double tr = h11 + h22;
    double disc = std::sqrt(std::max(0.0, (h11 - h22) * (h11 - h22) + 4.0 * std::norm(h12)));
    double l1 = 0.5 * (tr + disc);
    Vec2 v1{h12, cplx{l1 - h11, 0}};
    if (v1.norm() < 1e-12) v1 = Vec2{{1, 0}, {0, 0}};
    v1 = normalized(v1);
    Vec2 v2 = orthogonal_unit(v1);
    double s1 = std::sqrt(std::max(l1, 0.0));
    Vec2 u1 = s1 > 1e-12 ? normalized(A.apply(v1)) : Vec2{{1, 0}, {0, 0}};
    Vec2 u2 = orthogonal_unit(u1);
    double t1 = rng.log_uniform(b.C + margin, b.D - margin);
    double t2 = rng.log_uniform(b.C + margin, b.D - margin);
    Mat2 U{u1.z, u2.z, u1.w, u2.w};
    Mat2 V{v1.z, v2.z, v1.w, v2.w};
    Mat2 L = U.mul(Mat2::diagonal(cplx{t1, 0}, cplx{t2, 0})).mul(V.adjoint());

    PolyMap2 p(spec_.cutoff);
    Rng rh(Rng::mix(spec_.seed, kStreamHigher + 7919ULL * static_cast<std::uint64_t>(n)));
    add_higher_order(p, rh, mass);
    p.set_coeff(1, 1, 0, L.a11);
    p.set_coeff(1, 0, 1, L.a12);
    p.set_coeff(2, 1, 0, L.a21);
    p.set_coeff(2, 0, 1, L.a22);
    return p;
}

PolyMap2 MapSequence::germ_constant(int) const {
    PolyMap2 p(spec_.cutoff);
    p.set_coeff(1, 1, 0, spec_.const_a);
    p.set_coeff(2, 0, 1, spec_.const_b);
    return p;
}

PolyMap2 MapSequence::germ_alternating(int n) const {
    Rng rng(Rng::mix(spec_.seed, kStreamLinear + 7919ULL * static_cast<std::uint64_t>(n)));
    double dom_lo, dom_hi, sub_lo, sub_hi, mass;
    dominance_windows(dom_lo, dom_hi, sub_lo, sub_hi, mass);
    double big = rng.log_uniform(dom_lo, dom_hi);
    double small = rng.log_uniform(sub_lo, sub_hi);
    bool first = block_first_dominant(n);
    cplx a = (first ? big : small) * rng.phase();
    cplx bb = (first ? small : big) * rng.phase();
    Mat2 L = Mat2::diagonal(a, bb);
    if (spec_.mix_angle > 0.0) {
        Mat2 R1 = small_rotation(rng, spec_.mix_angle);
        Mat2 R2 = small_rotation(rng, spec_.mix_angle);
        L = R1.mul(L).mul(R2); // unitary framing keeps the singular values
    }
    PolyMap2 p(spec_.cutoff);
    Rng rh(Rng::mix(spec_.seed, kStreamHigher + 7919ULL * static_cast<std::uint64_t>(n)));
    add_higher_order(p, rh, mass);
    p.set_coeff(1, 1, 0, L.a11);
    p.set_coeff(1, 0, 1, L.a12);
    p.set_coeff(2, 1, 0, L.a21);
    p.set_coeff(2, 0, 1, L.a22);
    return p;
}

PolyMap2 MapSequence::germ_fornaess(int n) const {
    // a_{n+1} = a_n^2; underflows to 0 for large n, which is fine for the
    // uses this family has (demonstrating the missing uniform lower bound)
    double a = spec_.fornaess_a0;
    for (int i = 0; i < n; ++i) a = a * a;
    int K = std::max(spec_.cutoff, 2);
    PolyMap2 p(K);
    p.set_coeff(1, 2, 0, cplx{1, 0});
    p.set_coeff(1, 0, 1, cplx{a, 0});
    p.set_coeff(2, 1, 0, cplx{a, 0});
    return p;
}

PolyMap2 MapSequence::germ(int n) const {
    if (n < 0) throw std::invalid_argument("MapSequence::germ: n must be >= 0");
    switch (spec_.family) {
        case Family::DiagonalRandom: return germ_diagonal_random(n);
        case Family::TriangularRandom: return germ_triangular_random(n);
        case Family::FullRandom: return germ_full_random(n);
        case Family::Constant: return germ_constant(n);
        case Family::Alternating: return germ_alternating(n);
        case Family::FornaessShort: return germ_fornaess(n);
        case Family::UserFile:
            return file_germs_[static_cast<std::size_t>(n) % file_germs_.size()];
    }
    throw std::logic_error("MapSequence::germ: unreachable");
}

bool MapSequence::diagonal_linear(int n_max, double tol) const {
    for (int n = 0; n <= n_max; ++n) {
        Mat2 L = linear(n);
        if (std::abs(L.a12) > tol || std::abs(L.a21) > tol) return false;
    }
    return true;
}

AttractionReport verify_uniform_attraction(const MapSequence& seq, double C, double D, int n_max,
                                           int samples, double tol) {
    if (samples < 1) throw std::invalid_argument("verify_uniform_attraction: samples >= 1");
    AttractionReport rep;
    rep.check_C = C;
    rep.check_D = D;
    rep.samples = samples;
    PointBatch batch = PointBatch::from(ball_samples(samples));
    std::vector<double> norm0(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) norm0[i] = batch.get(i).norm_sq();

    rep.rows.resize(static_cast<std::size_t>(n_max) + 1);
    parallel_for(0, n_max + 1, [&](int n) {
        JetCoeffs jc = seq.germ_coeffs(n);
        std::vector<double> img;
        image_norms_sq(jc, batch, img);
        double lo = 1e300, hi = 0.0;
        for (std::size_t i = 0; i < img.size(); ++i) {
            double r = std::sqrt(img[i] / norm0[i]);
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        bool pass = lo >= C - tol && hi <= D + tol;
        rep.rows[static_cast<std::size_t>(n)] = {n, lo, hi, pass};
    });
    for (const auto& r : rep.rows) {
        rep.worst_low = std::min(rep.worst_low, r.min_ratio);
        rep.worst_high = std::max(rep.worst_high, r.max_ratio);
        rep.pass = rep.pass && r.pass;
    }
    return rep;
}

ContactOrderResult order_of_contact(const MapSequence& seq, int n_max, double tol) {
    int K = seq.germ(0).cutoff();
    int first_nonlinear = K + 1;
    for (int n = 0; n <= n_max; ++n) {
        PolyMap2 g = seq.germ(n);
        for (int m = 2; m < first_nonlinear && m <= K; ++m)
            if (g.max_coeff_abs_degree(m) > tol) {
                first_nonlinear = m;
                break;
            }
        if (first_nonlinear == 2) break;
    }
    ContactOrderResult r;
    if (first_nonlinear > K) {
        r.k = K;
        r.at_cutoff = true;
    } else {
        r.k = first_nonlinear;
        r.at_cutoff = false;
    }
    return r;
}

} // namespace basinforge
