#include "basinforge/train_diagonal.hpp"

#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace basinforge {

DiagonalLogs diagonal_logs(const MapSequence& seq, long long horizon) {
    DiagonalLogs logs;
    logs.la.resize(static_cast<std::size_t>(horizon) + 1, 0.0);
    logs.lb.resize(static_cast<std::size_t>(horizon) + 1, 0.0);
    for (long long n = 0; n < horizon; ++n) {
        Mat2 L = seq.linear(static_cast<int>(n));
        if (std::abs(L.a12) > 1e-12 || std::abs(L.a21) > 1e-12)
            throw std::domain_error("diagonal train builder: linear part is not diagonal");
        logs.la[static_cast<std::size_t>(n) + 1] = logs.la[static_cast<std::size_t>(n)] + std::log(std::abs(L.a11));
        logs.lb[static_cast<std::size_t>(n) + 1] = logs.lb[static_cast<std::size_t>(n)] + std::log(std::abs(L.a22));
    }
    return logs;
}

int TrainPartition::complete_count() const {
    int c = 0;
    for (const auto& t : trains)
        if (t.p_next >= 0) ++c;
    return c;
}

std::string TrainPartition::to_json() const {
    nlohmann::ordered_json j;
    j["k"] = k;
    j["D"] = D;
    j["horizon"] = horizon;
    j["truncated"] = truncated;
    auto& arr = j["trains"] = nlohmann::ordered_json::array();
    for (const auto& t : trains)
        arr.push_back({{"j", t.j}, {"p", t.p}, {"q", t.q}, {"p_next", t.p_next}});
    return j.dump(2);
}

TrainPartition build_trains_diagonal(const MapSequence& seq, int k, long long horizon) {
    if (k < 2) throw std::invalid_argument("build_trains_diagonal: k >= 2");
    if (!seq.spec().bounds) throw std::domain_error("build_trains_diagonal: sequence has no bounds");
    double D = seq.spec().bounds->D;

    TrainPartition part;
    part.k = k;
    part.D = D;
    part.horizon = horizon;
    part.trains.push_back({0, 0, 2, -1});

    if (horizon < 3) {
        part.truncated = true;
        return part;
    }
    DiagonalLogs logs = diagonal_logs(seq, horizon);
    const double lnD_inv = std::log(1.0 / D);

    for (int j = 0;; ++j) {
        const TrainRecord& cur = part.trains.back();
        double sign = (j % 2 == 0) ? 1.0 : -1.0;
        // threshold as an integer-weighted log: k^(j+1) * ln(1/D)
        double threshold = std::pow(static_cast<double>(k), j + 1) * lnD_inv;

        // minimal q admitting a valid p in [q_j, q); running extremum of the
        // signed prefix makes each q an O(1) test
        long long best_q = -1, best_p = -1;
        auto signed_prefix = [&](long long t) {
            return sign * (logs.la[static_cast<std::size_t>(t)] - logs.lb[static_cast<std::size_t>(t)]);
        };
        double run_best = signed_prefix(cur.q);
        for (long long q = cur.q + 1; q <= horizon; ++q) {
            // candidates p in [q_j, q): extend the extremum with p = q-1
            run_best = std::min(run_best, signed_prefix(q - 1));
            if (signed_prefix(q) - run_best >= threshold) {
                best_q = q;
                break;
            }
        }
        if (best_q < 0) {
            part.truncated = true;
            break;
        }
        // among valid p at best_q pick the ratio maximizer, smallest on ties
        double best_val = -1e300;
        for (long long p = cur.q; p < best_q; ++p) {
            double val = signed_prefix(best_q) - signed_prefix(p);
            if (val >= threshold && val > best_val + 1e-18) {
                best_val = val;
                best_p = p;
            }
        }
        part.trains.back().p_next = best_p;
        part.trains.push_back({j + 1, best_p, best_q, -1});
    }
    return part;
}

namespace {

void fold(CheckLine& line, double slack) { line.fold(slack); }

} // namespace

DiagonalTrainReport verify_diagonal_train_inequalities(const TrainPartition& part,
                                                       const MapSequence& seq, double C, double D) {
    DiagonalTrainReport rep;
    DiagonalLogs logs = diagonal_logs(seq, part.horizon);
    const double lnD_inv = std::log(1.0 / D);

    CheckLine engine_mono{"engine_ratio_monotone", true, 1e300, 0,
                          "signed ratio >= 1 from both engine ends"};
    CheckLine engine_sandwich{"engine_ratio_sandwich", true, 1e300, 0,
                              "D^-k^j <= signed engine ratio <= D^-k^j / C"};
    CheckLine wagon_lower{"wagon_ratio_floor", true, 1e300, 0,
                          "signed wagon ratio > D^k^(j+1)"};
    CheckLine wagon_end{"wagon_end_ratio", true, 1e300, 0, "signed ratio over [q_j, p_j+1] >= 1"};
    CheckLine length_bound{"train_length_floor", true, 1e300, 0,
                           "|I_j+1| >= k^(j+1) ln(1/D) / ln(D/C)"};

    for (std::size_t t = 0; t < part.trains.size(); ++t) {
        const TrainRecord& tr = part.trains[t];
        int j = tr.j;
        double sign = (j % 2 == 0) ? -1.0 : 1.0; // (-1)^(j+1) exponent
        auto ratio = [&](long long n, long long m) { return sign * logs.log_ratio(n, m); };

        if (j >= 1) {
            double kj = std::pow(static_cast<double>(part.k), j);
            for (long long n = tr.p; n <= tr.q; ++n) {
                fold(engine_mono, ratio(n, tr.p));
                fold(engine_mono, ratio(tr.q, n));
            }
            double r = ratio(tr.q, tr.p);
            fold(engine_sandwich, r - kj * lnD_inv);
            fold(engine_sandwich, (kj * lnD_inv - std::log(C)) - r);
        }
        if (tr.p_next >= 0) {
            double kj1 = std::pow(static_cast<double>(part.k), j + 1);
            for (long long m = tr.q; m <= tr.p_next; ++m)
                for (long long n = m; n <= tr.p_next; ++n)
                    fold(wagon_lower, ratio(n, m) + kj1 * lnD_inv);
            fold(wagon_end, ratio(tr.p_next, tr.q));
            if (t + 1 < part.trains.size() && part.trains[t + 1].p_next >= 0) {
                double len = static_cast<double>(part.trains[t + 1].p_next - part.trains[t + 1].p);
                double floor_len = kj1 * lnD_inv / std::log(D / C);
                fold(length_bound, len - floor_len);
            }
        }
    }
    // nondecreasing partial sums of |I_j| / k^j
    double acc = 0.0;
    for (const auto& tr : part.trains) {
        if (tr.p_next < 0) break;
        acc += static_cast<double>(tr.p_next - tr.p) / std::pow(static_cast<double>(part.k), tr.j);
        rep.interval_partial_sums.push_back(acc);
    }

    rep.checks = {engine_mono, engine_sandwich, wagon_lower, wagon_end, length_bound};
    for (const auto& c : rep.checks) rep.pass = rep.pass && c.pass;
    return rep;
}

} // namespace basinforge
