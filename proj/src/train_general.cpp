#include "basinforge/train_general.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace basinforge {

int GeneralTrainPartition::complete_count() const {
    int c = 0;
    for (const auto& t : trains)
        if (t.p_next >= 0) ++c;
    return c;
}

std::string GeneralTrainPartition::to_json() const {
    nlohmann::ordered_json j;
    j["k"] = k;
    j["x"] = x;
    j["horizon"] = horizon;
    j["truncated"] = truncated;
    auto& arr = j["trains"] = nlohmann::ordered_json::array();
    for (const auto& t : trains) {
        nlohmann::ordered_json tj;
        tj["j"] = t.j;
        tj["p"] = t.p;
        tj["q"] = t.q;
        tj["p_next"] = t.p_next;
        tj["v"] = {t.v.z.real(), t.v.z.imag(), t.v.w.real(), t.v.w.imag()};
        tj["U"] = {t.U.a11.real(), t.U.a11.imag(), t.U.a12.real(), t.U.a12.imag(),
                   t.U.a21.real(), t.U.a21.imag(), t.U.a22.real(), t.U.a22.imag()};
        tj["accept_log"] = t.accept_log;
        arr.push_back(tj);
    }
    return j.dump(2);
}

namespace {

struct VectorTrack {
    std::vector<Vec2> dir; // unit direction of df_{n, p0}(v) for n >= p0
    std::vector<double> lg; // ln |df_{n, p0}(v)|, lg[p0] = 0
};

VectorTrack track_vector(const std::vector<Mat2>& lin, long long p0, long long hi, const Vec2& v) {
    VectorTrack t;
    t.dir.resize(static_cast<std::size_t>(hi + 1));
    t.lg.resize(static_cast<std::size_t>(hi + 1), 0.0);
    Vec2 u = normalized(v);
    t.dir[static_cast<std::size_t>(p0)] = u;
    double acc = 0.0;
    for (long long n = p0; n < hi; ++n) {
        Vec2 img = lin[static_cast<std::size_t>(n)].apply(u);
        double g = img.norm();
        if (g < 1e-300) throw std::domain_error("track_vector: vector collapsed");
        acc += std::log(g);
        u = {img.z / g, img.w / g};
        t.dir[static_cast<std::size_t>(n + 1)] = u;
        t.lg[static_cast<std::size_t>(n + 1)] = acc;
    }
    return t;
}

// The branch of v_j over [p_j, hi]. On the engine v_j rides the contracted
// direction of the cocycle, so forward normalize-iterate loses it at rate
// e^(dominance gap); the branch is recovered backwards instead, anchored at
// its analytically known image direction U_j^* v_j. Past the engine the
// image direction is continued forward. Train 0 has no eigen structure and
// is tracked forward throughout.
VectorTrack train_branch(const std::vector<Mat2>& lin, const GeneralTrainRecord& rec,
                         long long hi) {
    if (rec.j == 0) return track_vector(lin, rec.p, hi, rec.v);
    VectorTrack t;
    t.dir.resize(static_cast<std::size_t>(hi + 1));
    t.lg.resize(static_cast<std::size_t>(hi + 1), 0.0);
    long long q = std::min(rec.q, hi);
    Vec2 u = normalized(rec.U.adjoint().apply(rec.v));
    t.dir[static_cast<std::size_t>(q)] = u;
    for (long long n = q - 1; n >= rec.p; --n) {
        Vec2 pre = lin[static_cast<std::size_t>(n)].inverse().apply(u);
        double g = pre.norm();
        if (g < 1e-300) throw std::domain_error("train_branch: backward step collapsed");
        // forward growth of the branch across step n is 1/||Df^-1 u||
        t.lg[static_cast<std::size_t>(n)] = t.lg[static_cast<std::size_t>(n + 1)] + std::log(g);
        u = {pre.z / g, pre.w / g};
        t.dir[static_cast<std::size_t>(n)] = u;
    }
    double base = t.lg[static_cast<std::size_t>(rec.p)];
    for (long long n = rec.p; n <= q; ++n) t.lg[static_cast<std::size_t>(n)] -= base;
    u = t.dir[static_cast<std::size_t>(q)];
    double acc = t.lg[static_cast<std::size_t>(q)];
    for (long long n = q; n < hi; ++n) {
        Vec2 img = lin[static_cast<std::size_t>(n)].apply(u);
        double g = img.norm();
        if (g < 1e-300) throw std::domain_error("train_branch: vector collapsed");
        acc += std::log(g);
        u = {img.z / g, img.w / g};
        t.dir[static_cast<std::size_t>(n + 1)] = u;
        t.lg[static_cast<std::size_t>(n + 1)] = acc;
    }
    return t;
}

// product Df_{q-1} ... Df_p with running rescale; returns the scaled matrix
// and the log of the applied scale
Mat2 scaled_product(const std::vector<Mat2>& lin, long long p, long long q, double& scale_log) {
    Mat2 P = Mat2::identity();
    scale_log = 0.0;
    for (long long i = p; i < q; ++i) {
        P = lin[static_cast<std::size_t>(i)].mul(P);
        double m = P.max_abs();
        if (m > 0 && m < 1e-120) {
            double s = 1.0 / m;
            P.a11 *= s;
            P.a12 *= s;
            P.a21 *= s;
            P.a22 *= s;
            scale_log += std::log(m);
        }
    }
    return P;
}

} // namespace

GeneralTrainPartition build_trains_general(const MapSequence& seq, double k, double x,
                                           long long horizon) {
    if (!(1.0 < x && x < k)) throw std::invalid_argument("build_trains_general: need 1 < x < k");
    if (!seq.spec().bounds) throw std::domain_error("build_trains_general: sequence has no bounds");
    double C = seq.spec().bounds->C;
    double D = seq.spec().bounds->D;
    if (!(std::pow(D, k) < C))
        throw std::invalid_argument("build_trains_general: D^k < C fails for declared bounds");

    GeneralTrainPartition part;
    part.k = k;
    part.x = x;
    part.C = C;
    part.D = D;
    part.horizon = horizon;

    long long q0 = static_cast<long long>(std::ceil(2.0 / (k - x)));
    GeneralTrainRecord t0;
    t0.j = 0;
    t0.p = 0;
    t0.q = q0;
    t0.v = Vec2{{1, 0}, {0, 0}};
    t0.U = Mat2::identity();
    t0.accept_log = 0.0;
    part.trains.push_back(t0);
    if (q0 >= horizon) {
        part.truncated = true;
        return part;
    }

    std::vector<Mat2> lin(static_cast<std::size_t>(horizon));
    std::vector<double> det_lg(static_cast<std::size_t>(horizon) + 1, 0.0);
    for (long long n = 0; n < horizon; ++n) {
        lin[static_cast<std::size_t>(n)] = seq.linear(static_cast<int>(n));
        det_lg[static_cast<std::size_t>(n + 1)] =
            det_lg[static_cast<std::size_t>(n)] + std::log(std::abs(lin[static_cast<std::size_t>(n)].det()));
    }
    const double lnD = std::log(D);

    for (int j = 0;; ++j) {
        GeneralTrainRecord& cur = part.trains.back();
        VectorTrack vt = train_branch(lin, cur, horizon);
        auto L = [&](long long n) { return vt.lg[static_cast<std::size_t>(n)]; };
        double threshold = std::pow(2.0, j + 1) * lnD; // log of D^(2^(j+1))

        // A(p, q) = det_{q,p} + (x+1)(L_p - L_q) in logs; q minimal, then p
        // maximizing W_p = det-prefix(p) - (x+1) L_p (ties to smallest p)
        auto Wp = [&](long long p) { return det_lg[static_cast<std::size_t>(p)] - (x + 1.0) * L(p); };
        long long best_q = -1, best_p = -1;
        double run_best = Wp(cur.q);
        long long run_arg = cur.q;
        for (long long q = cur.q + 1; q <= horizon; ++q) {
            double w = Wp(q - 1);
            if (w > run_best) {
                run_best = w;
                run_arg = q - 1;
            }
            double qt = det_lg[static_cast<std::size_t>(q)] - (x + 1.0) * L(q);
            if (qt - run_best <= threshold) {
                best_q = q;
                best_p = run_arg;
                break;
            }
        }
        if (best_q < 0) {
            part.truncated = true;
            break;
        }
        double accept = det_lg[static_cast<std::size_t>(best_q)] -
                        det_lg[static_cast<std::size_t>(best_p)] +
                        (x + 1.0) * (L(best_p) - L(best_q));

        // unitary sending the image direction back onto the engine-start
        // direction, making it an eigenvector of U o Df_{q,p}
        Vec2 dir_p = vt.dir[static_cast<std::size_t>(best_p)];
        Vec2 dir_q = vt.dir[static_cast<std::size_t>(best_q)];
        Mat2 U = unitary_taking(dir_q, dir_p);
        double scale_log = 0.0;
        Mat2 prod = scaled_product(lin, best_p, best_q, scale_log);
        Mat2 Mu = U.mul(prod);
        Eigen2 eig = eigen_decompose(Mu);
        double sep_rel = eig.separation / std::max(std::abs(eig.first.value), 1e-300);
        if (sep_rel < 1e-12)
            throw degeneracy_error("build_trains_general: engine eigenvalues coincide, j=" +
                                   std::to_string(j + 1));
        // the tracked direction carries the known positive eigenvalue; take
        // the other eigenvector
        double align1 = std::abs(eig.first.vector.z * std::conj(dir_p.z) +
                                 eig.first.vector.w * std::conj(dir_p.w));
        double align2 = std::abs(eig.second.vector.z * std::conj(dir_p.z) +
                                 eig.second.vector.w * std::conj(dir_p.w));
        Vec2 v_next = align1 >= align2 ? eig.second.vector : eig.first.vector;

        cur.p_next = best_p;
        cur.dir_end = dir_p;
        GeneralTrainRecord nt;
        nt.j = j + 1;
        nt.p = best_p;
        nt.q = best_q;
        nt.v = phase_normalized(v_next);
        nt.U = U;
        nt.accept_log = accept;
        nt.eigen_separation = sep_rel;
        part.trains.push_back(nt);
    }
    return part;
}

namespace {

// triangular data of W_next f W_prev^-1 given the step matrix and frames
struct TriStep {
    cplx a, b, c;
    double offdiag;
};

TriStep triangular_step(const Mat2& Wn, const Mat2& F, const Mat2& Wp) {
    Mat2 T = Wn.mul(F).mul(Wp.adjoint()); // unitary inverse = adjoint
    return {T.a11, T.a22, T.a21, std::abs(T.a12)};
}

} // namespace

const TrainFrames& TriangularizedSequence::train_of(long long n) const {
    for (const auto& t : trains)
        if (n >= t.p && n < t.p_next) return t;
    throw std::out_of_range("TriangularizedSequence::train_of: index past covered range");
}

PolyMap2 TriangularizedSequence::tilde_germ(const MapSequence& seq, long long n) const {
    const TrainFrames& t = train_of(n);
    const Mat2& Wn = t.W[static_cast<std::size_t>(n - t.p)];
    const Mat2& Wn1 = t.W[static_cast<std::size_t>(n + 1 - t.p)];
    PolyMap2 f = seq.germ(static_cast<int>(n));
    int K = f.cutoff();
    PolyMap2 left = PolyMap2::linear(Wn1, K);
    PolyMap2 right = PolyMap2::linear(Wn.adjoint(), K);
    return compose(compose(left, f, K), right, K);
}

std::pair<TriangularizedSequence, std::vector<EngineFrames>> triangularize_frames(
    const MapSequence& seq, const GeneralTrainPartition& part) {
    TriangularizedSequence tri;
    std::vector<EngineFrames> engines;
    int complete = part.complete_count();
    if (complete == 0) return {tri, engines};

    long long hi = part.trains[static_cast<std::size_t>(complete - 1)].p_next;
    std::vector<Mat2> lin(static_cast<std::size_t>(hi));
    for (long long n = 0; n < hi; ++n) lin[static_cast<std::size_t>(n)] = seq.linear(static_cast<int>(n));

    const Vec2 e2{{0, 0}, {1, 0}};
    tri.M.resize(static_cast<std::size_t>(complete), Mat2::identity());

    for (int j = 0; j < complete; ++j) {
        const GeneralTrainRecord& rec = part.trains[static_cast<std::size_t>(j)];
        TrainFrames tf;
        tf.j = j;
        tf.p = rec.p;
        tf.p_next = rec.p_next;
        tf.V = unitary_taking(normalized(rec.v), e2);

        VectorTrack vt = train_branch(lin, rec, rec.p_next);
        long long len = rec.p_next - rec.p;
        tf.W.resize(static_cast<std::size_t>(len) + 1);
        tf.W[0] = tf.V;
        for (long long i = 1; i <= len; ++i)
            tf.W[static_cast<std::size_t>(i)] =
                unitary_taking(vt.dir[static_cast<std::size_t>(rec.p + i)], e2);

        tf.a.resize(static_cast<std::size_t>(len));
        tf.b.resize(static_cast<std::size_t>(len));
        tf.c.resize(static_cast<std::size_t>(len));
        tf.la.assign(static_cast<std::size_t>(len) + 1, 0.0);
        tf.lb.assign(static_cast<std::size_t>(len) + 1, 0.0);
        for (long long i = 0; i < len; ++i) {
            const Mat2& F = lin[static_cast<std::size_t>(rec.p + i)];
            TriStep st = triangular_step(tf.W[static_cast<std::size_t>(i + 1)], F,
                                         tf.W[static_cast<std::size_t>(i)]);
            if (st.offdiag > 1e-10)
                throw frame_error("triangularize_frames: conjugated step not lower triangular");
            double ud = tf.W[static_cast<std::size_t>(i + 1)].unitarity_defect();
            tri.worst_unitarity = std::max(tri.worst_unitarity, ud);
            if (ud > 1e-10) throw frame_error("triangularize_frames: unitarity lost");
            tf.a[static_cast<std::size_t>(i)] = st.a;
            tf.b[static_cast<std::size_t>(i)] = st.b;
            tf.c[static_cast<std::size_t>(i)] = st.c;
            tf.la[static_cast<std::size_t>(i + 1)] =
                tf.la[static_cast<std::size_t>(i)] + std::log(std::abs(st.a));
            tf.lb[static_cast<std::size_t>(i + 1)] =
                tf.lb[static_cast<std::size_t>(i)] + std::log(std::abs(st.b));
        }
        if (j >= 1) tri.M[static_cast<std::size_t>(j)] = tf.V.mul(tri.trains.back().W.back().adjoint());
        tri.trains.push_back(std::move(tf));

        // engine frames in the previous train's tracked direction
        if (j >= 1) {
            const GeneralTrainRecord& prev = part.trains[static_cast<std::size_t>(j - 1)];
            EngineFrames ef;
            ef.j = j;
            ef.p = rec.p;
            ef.q = rec.q;
            Vec2 u_hat = prev.dir_end; // direction of df_{p_j, p_{j-1}}(v_{j-1})
            ef.S = unitary_taking(u_hat, e2);
            VectorTrack ht = track_vector(lin, rec.p, rec.q, u_hat);
            long long elen = rec.q - rec.p;
            ef.T.resize(static_cast<std::size_t>(elen) + 1);
            ef.T[0] = ef.S;
            for (long long i = 1; i <= elen; ++i)
                ef.T[static_cast<std::size_t>(i)] =
                    unitary_taking(ht.dir[static_cast<std::size_t>(rec.p + i)], e2);
            ef.alpha.resize(static_cast<std::size_t>(elen));
            ef.beta.resize(static_cast<std::size_t>(elen));
            ef.gamma.resize(static_cast<std::size_t>(elen));
            ef.lalpha.assign(static_cast<std::size_t>(elen) + 1, 0.0);
            ef.lbeta.assign(static_cast<std::size_t>(elen) + 1, 0.0);
            for (long long i = 0; i < elen; ++i) {
                const Mat2& F = lin[static_cast<std::size_t>(rec.p + i)];
                TriStep st = triangular_step(ef.T[static_cast<std::size_t>(i + 1)], F,
                                             ef.T[static_cast<std::size_t>(i)]);
                if (st.offdiag > 1e-10)
                    throw frame_error("triangularize_frames: engine step not lower triangular");
                ef.alpha[static_cast<std::size_t>(i)] = st.a;
                ef.beta[static_cast<std::size_t>(i)] = st.b;
                ef.gamma[static_cast<std::size_t>(i)] = st.c;
                ef.lalpha[static_cast<std::size_t>(i + 1)] =
                    ef.lalpha[static_cast<std::size_t>(i)] + std::log(std::abs(st.a));
                ef.lbeta[static_cast<std::size_t>(i + 1)] =
                    ef.lbeta[static_cast<std::size_t>(i)] + std::log(std::abs(st.b));
            }
            engines.push_back(std::move(ef));
        }
    }
    return {tri, engines};
}

namespace {

// log-magnitudes of the cumulative lower-triangular entries gamma_{n,m} via
// the scaled running product; one forward run per m
std::vector<double> cumulative_gamma_logs(const std::vector<cplx>& al, const std::vector<cplx>& be,
                                          const std::vector<cplx>& ga, std::size_t m,
                                          std::size_t n_hi) {
    std::vector<double> out(n_hi + 1, -1e300); // out[n] = ln|gamma_{n,m}| (index by n)
    cplx A{1, 0}, B{1, 0}, G{0, 0};
    double off = 0.0;
    for (std::size_t n = m; n < n_hi; ++n) {
        // step n: alpha_{n+1,m} = alpha_n A; gamma_{n+1,m} = gamma_n A + beta_n G
        cplx A2 = al[n] * A;
        cplx G2 = ga[n] * A + be[n] * G;
        cplx B2 = be[n] * B;
        A = A2;
        B = B2;
        G = G2;
        double mx = std::max({std::abs(A), std::abs(B), std::abs(G)});
        if (mx > 0 && mx < 1e-120) {
            A /= mx;
            B /= mx;
            G /= mx;
            off += std::log(mx);
        }
        out[n + 1] = std::abs(G) > 0 ? std::log(std::abs(G)) + off : -1e300;
    }
    return out;
}

} // namespace

GeneralTrainReport verify_general_train_inequalities(const GeneralTrainPartition& part,
                                                     const TriangularizedSequence& tri,
                                                     const std::vector<EngineFrames>& engines,
                                                     const MapSequence& seq) {
    GeneralTrainReport rep;
    const double C = part.C, D = part.D, x = part.x, k = part.k;
    const double lnD = std::log(D), lnC = std::log(C);
    const double K1 = D / (C * (1.0 - std::pow(D, 1.0 - 1.0 / x)));
    const double K2 = std::pow(2.0 * K1 * K1, x + 1.0) * std::pow(D, -(k - x) * (x + 1.0) / x);
    rep.K1 = K1;
    rep.K2 = K2;
    const double lnK1 = std::log(K1), lnK2 = std::log(K2);

    CheckLine step_range{"step_magnitudes_in_bounds", true, 1e300, 0,
                         "per-step |a|,|b| in [C,D]; |c| <= D"};
    CheckLine det_consistency{"det_consistency", true, 1e300, 0, "|a b| = |det Df| per step"};
    CheckLine conv_identity{"offdiag_convolution", true, 1e300, 0,
                            "c_{n,m} matches the direct matrix product"};
    CheckLine eig_resid{"engine_eigenvector_residual", true, 1e300, 0,
                        "U_j Df_{q,p} eigenpair residuals <= 1e-9"};
    CheckLine endpoint_swap{"engine_endpoint_swap", true, 1e300, 0,
                            "|beta_{q,p}| = |a_{q,p}| and |alpha_{q,p}| = |b_{q,p}|"};
    CheckLine engine_det{"engine_det_consistency", true, 1e300, 0,
                         "|alpha_n beta_n| = |a_n b_n| per engine step"};
    CheckLine trein_i{"engine_ax_over_b", true, 1e300, 0, "|a^x/b| >= D^-2^j on engines"};
    CheckLine trein_ii{"wagon_a_over_bx", true, 1e300, 0, "|a/b^x| > D^2^(j+1) on wagons"};
    CheckLine trein_ii_end{"wagon_end_a_over_bx", true, 1e300, 0, "|a/b^x| >= 1 over [q_j, p_j+1]"};
    CheckLine trein_iii{"engine_length_floor", true, 1e300, 0, "q_j - p_j >= 2^j/(k-x)"};
    CheckLine grieks_i{"engine_alpha_tail", true, 1e300, 0, "|alpha_{q,n}/beta_{q,n}^x| <= 1"};
    CheckLine grieks_ii{"engine_alpha_head", true, 1e300, 0, "|alpha_{n,p}/beta_{n,p}^x| <= 1"};
    CheckLine grieks_iii{"engine_alpha_window", true, 1e300, 0,
                         "D^(2^j + k - x) < |alpha/beta^x| < D^-2^j"};
    CheckLine gamma_bound{"gamma_growth_bound", true, 1e300, 0,
                          "|gamma_{n,m}| <= K1 |beta_{n,p}| / |alpha_{m,p}|^(1/x)"};
    CheckLine vec_i{"tracked_vector_upper", true, 1e300, 0,
                    "|df(v_j)| <= 2 max(|alpha|, K1 |alpha|^(1-1/x) |beta|)"};
    CheckLine vec_ii{"tracked_vector_lower", true, 1e300, 0, "1/|df(v_j)| <= K1/|alpha|"};
    CheckLine k2_i{"ratio_head_k2", true, 1e300, 0, "|b/a^x| head bound with K2"};
    CheckLine k2_ii{"ratio_window_k2", true, 1e300, 0, "|b/a^x| window bound with K2"};
    CheckLine k2_iii{"ratio_tail_k2", true, 1e300, 0, "|b/a^x| tail bound with K2"};
    CheckLine accept_check{"acceptance_bound", true, 1e300, 0,
                           "accepted pairs meet the D^(2^(j+1)) bound"};

    // structural checks on all covered trains
    for (const auto& tf : tri.trains) {
        long long len = tf.p_next - tf.p;
        for (long long i = 0; i < len; ++i) {
            double ma = std::abs(tf.a[static_cast<std::size_t>(i)]);
            double mb = std::abs(tf.b[static_cast<std::size_t>(i)]);
            double mc = std::abs(tf.c[static_cast<std::size_t>(i)]);
            step_range.fold(std::log(ma) - lnC);
            step_range.fold(lnD - std::log(ma));
            step_range.fold(std::log(mb) - lnC);
            step_range.fold(lnD - std::log(mb));
            step_range.fold(lnD - (mc > 0 ? std::log(mc) : -1e300));
            const Mat2 F = seq.linear(static_cast<int>(tf.p + i));
            det_consistency.fold_abs(
                std::abs(std::log(ma * mb) - std::log(std::abs(F.det()))), 1e-10);
        }
        // convolution identity against the direct product, on a prefix window
        long long win = std::min<long long>(len, 120);
        Mat2 P = Mat2::identity();
        cplx conv{0, 0};
        for (long long i = 0; i < win; ++i) {
            Mat2 S{tf.a[static_cast<std::size_t>(i)], {0, 0}, tf.c[static_cast<std::size_t>(i)],
                   tf.b[static_cast<std::size_t>(i)]};
            // c_{n+1,m} = c_n a_{n,m} + b_n c_{n,m}
            conv = tf.c[static_cast<std::size_t>(i)] * P.a11 + tf.b[static_cast<std::size_t>(i)] * conv;
            P = S.mul(P);
            double scale = std::max(1.0, std::abs(P.a21));
            conv_identity.fold_abs(std::abs(conv - P.a21) / scale, 1e-10);
        }
    }

    for (const auto& ef : engines) {
        const GeneralTrainRecord& rec = part.trains[static_cast<std::size_t>(ef.j)];
        const TrainFrames& tf = tri.trains[static_cast<std::size_t>(ef.j)];
        double twoj = std::pow(2.0, ef.j);
        long long p = ef.p, q = ef.q;

        // eigenpair residuals of U_j Df_{q,p}
        {
            double scale_log = 0.0;
            std::vector<Mat2> lin(static_cast<std::size_t>(q));
            for (long long n = 0; n < q; ++n) lin[static_cast<std::size_t>(n)] = seq.linear(static_cast<int>(n));
            Mat2 prod = scaled_product(lin, p, q, scale_log);
            Mat2 Mu = rec.U.mul(prod);
            Eigen2 eig = eigen_decompose(Mu);
            double mscale = std::max(Mu.max_abs(), 1e-300);
            for (const EigenPair& ep : {eig.first, eig.second}) {
                Vec2 r = Mu.apply(ep.vector) - ep.value * ep.vector;
                eig_resid.fold_abs(r.norm() / mscale, 1e-9);
            }
        }

        endpoint_swap.fold_abs(std::abs(ef.log_beta(q, p) - tf.log_a(q, p)), 1e-9);
        endpoint_swap.fold_abs(std::abs(ef.log_alpha(q, p) - tf.log_b(q, p)), 1e-9);

        long long elen = q - p;
        for (long long i = 0; i < elen; ++i) {
            double la_step = std::log(std::abs(tf.a[static_cast<std::size_t>(i)])) +
                             std::log(std::abs(tf.b[static_cast<std::size_t>(i)]));
            double le_step = std::log(std::abs(ef.alpha[static_cast<std::size_t>(i)])) +
                             std::log(std::abs(ef.beta[static_cast<std::size_t>(i)]));
            engine_det.fold_abs(std::abs(la_step - le_step), 1e-10);
        }

        // engine and wagon ratio estimates
        trein_i.fold(x * tf.log_a(q, p) - tf.log_b(q, p) + twoj * lnD);
        trein_iii.fold(static_cast<double>(q - p) - twoj / (k - x));
        if (rec.p_next >= 0) {
            double two_j1 = 2.0 * twoj;
            for (long long m = q; m <= rec.p_next; ++m)
                for (long long n = m; n <= rec.p_next; ++n)
                    trein_ii.fold(tf.log_a(n, m) - x * tf.log_b(n, m) - two_j1 * lnD);
            trein_ii_end.fold(tf.log_a(rec.p_next, q) - x * tf.log_b(rec.p_next, q));
        }

        for (long long n = p; n <= q; ++n) {
            grieks_ii.fold(-(ef.log_alpha(n, p) - x * ef.log_beta(n, p)));
            grieks_i.fold(-(ef.log_alpha(q, n) - x * ef.log_beta(q, n)));
            for (long long m = p; m <= n; ++m) {
                double r = ef.log_alpha(n, m) - x * ef.log_beta(n, m);
                grieks_iii.fold(-twoj * lnD - r);
                grieks_iii.fold(r - (twoj * lnD + (k - x) * lnD));
            }
        }

        // gamma growth, one forward run per m
        for (long long m = p; m < q; ++m) {
            std::vector<double> lg = cumulative_gamma_logs(
                ef.alpha, ef.beta, ef.gamma, static_cast<std::size_t>(m - p),
                static_cast<std::size_t>(elen));
            for (long long n = m + 1; n <= q; ++n) {
                double bound = lnK1 + ef.log_beta(n, p) - ef.log_alpha(m, p) / x;
                double got = lg[static_cast<std::size_t>(n - p)];
                if (got <= -1e299) continue; // exact zero always passes
                gamma_bound.fold(bound - got);
            }
        }

        // tracked vector norms; |df_{n,p_j}(v_j)| = b_{n,p_j} in the train frame
        for (long long n = p; n <= q; ++n) {
            double ldf = tf.log_b(n, p);
            double m1 = ef.log_alpha(n, p);
            double m2 = lnK1 + (1.0 - 1.0 / x) * ef.log_alpha(n, p) + ef.log_beta(n, p);
            vec_i.fold(std::log(2.0) + std::max(m1, m2) - ldf);
            vec_ii.fold(lnK1 - ef.log_alpha(n, p) + ldf);
        }

        // K2 family on the engine in the train frame
        for (long long n = p; n <= q; ++n) {
            k2_i.fold(lnK2 - ((k - x) / x) * static_cast<double>(n - p) * lnD -
                      (tf.log_b(n, p) - x * tf.log_a(n, p)));
            k2_iii.fold(lnK2 - (tf.log_b(q, n) - x * tf.log_a(q, n)));
            for (long long m = p; m <= n; ++m)
                k2_ii.fold(lnK2 - twoj * ((x + 1.0) / x) * lnD -
                           (tf.log_b(n, m) - x * tf.log_a(n, m)));
        }

        accept_check.fold(twoj * lnD - rec.accept_log);
    }

    rep.checks = {step_range, det_consistency, conv_identity, eig_resid, endpoint_swap,
                  engine_det,  trein_i,        trein_ii,      trein_ii_end, trein_iii,
                  grieks_i,    grieks_ii,      grieks_iii,    gamma_bound,  vec_i,
                  vec_ii,      k2_i,           k2_ii,         k2_iii,       accept_check};
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

CheckLine verify_general_minimality(const GeneralTrainPartition& part, const MapSequence& seq) {
    CheckLine line{"train_selection_minimality", true, 1e300, 0,
                   "no valid pair exists below the chosen q"};
    int complete = part.complete_count();
    if (complete == 0) return line;
    long long hi = part.trains.back().q; // engines of all recorded trains
    std::vector<Mat2> lin(static_cast<std::size_t>(hi));
    std::vector<double> det_lg(static_cast<std::size_t>(hi) + 1, 0.0);
    for (long long n = 0; n < hi; ++n) {
        lin[static_cast<std::size_t>(n)] = seq.linear(static_cast<int>(n));
        det_lg[static_cast<std::size_t>(n + 1)] =
            det_lg[static_cast<std::size_t>(n)] + std::log(std::abs(lin[static_cast<std::size_t>(n)].det()));
    }
    const double lnD = std::log(part.D);
    for (int j = 1; j < static_cast<int>(part.trains.size()); ++j) {
        const GeneralTrainRecord& prev = part.trains[static_cast<std::size_t>(j - 1)];
        const GeneralTrainRecord& rec = part.trains[static_cast<std::size_t>(j)];
        VectorTrack vt = train_branch(lin, prev, rec.q);
        auto A = [&](long long pp, long long qq) {
            return det_lg[static_cast<std::size_t>(qq)] - det_lg[static_cast<std::size_t>(pp)] +
                   (part.x + 1.0) * (vt.lg[static_cast<std::size_t>(pp)] -
                                     vt.lg[static_cast<std::size_t>(qq)]);
        };
        double threshold = std::pow(2.0, j) * lnD;
        // accepted pair meets the bound
        line.fold(threshold - A(rec.p, rec.q));
        // no q' < q admits a valid p
        for (long long qq = prev.q + 1; qq < rec.q; ++qq)
            for (long long pp = prev.q; pp < qq; ++pp)
                line.fold(A(pp, qq) - threshold);
        // chosen p minimizes at q
        for (long long pp = prev.q; pp < rec.q; ++pp) line.fold(A(pp, rec.q) - A(rec.p, rec.q));
    }
    return line;
}

} // namespace basinforge
