#pragma once

#include <string>
#include <vector>

#include "checks.hpp"
#include "logmag.hpp"
#include "sequence.hpp"

namespace basinforge {

// Partition of [0, horizon) into trains [p_j, p_{j+1}) for sequences with
// diagonal linear part. Train j is headed by its engine [p_j, q_j]; the
// selection rule drives the cumulative ratio |a/b|^(+-1) past D^(-k^(j+1)),
// with alternating sign of the exponent.
struct TrainRecord {
    int j;
    long long p;
    long long q;
    long long p_next; // -1 while the successor is not yet found
};

struct TrainPartition {
    int k = 2;
    double D = 0.5;
    long long horizon = 0;
    bool truncated = false;
    std::vector<TrainRecord> trains; // trains[0] = {0, 0, 2, p_1}

    int complete_count() const; // trains with a recorded successor
    std::string to_json() const;
};

// Exhaustive search: q minimal, then p maximizing the signed log ratio
// (smallest p on exact ties). Stops at the horizon; a truncated partition is
// a result, not an error.
TrainPartition build_trains_diagonal(const MapSequence& seq, int k, long long horizon);

struct DiagonalTrainReport {
    std::vector<CheckLine> checks;
    bool pass = true;
    std::vector<double> interval_partial_sums; // partial sums of |I_j| / k^j
};

// Engine inequalities, the engine sandwich, wagon bounds and the interval
// length bound, all evaluated as log sums with slack >= -1e-9.
DiagonalTrainReport verify_diagonal_train_inequalities(const TrainPartition& partition,
                                                       const MapSequence& seq, double C, double D);

// Signed log ratios sigma in base 1/D: sigma_{n,m} = log_{1/D} |a_{n,m}/b_{n,m}|.
struct DiagonalLogs {
    std::vector<double> la; // prefix sums: la[n] = sum_{i<n} ln|a_i|
    std::vector<double> lb;

    double log_ratio(long long n, long long m) const { // ln |a_{n,m}/b_{n,m}|
        return (la[static_cast<std::size_t>(n)] - la[static_cast<std::size_t>(m)]) -
               (lb[static_cast<std::size_t>(n)] - lb[static_cast<std::size_t>(m)]);
    }
    double sigma(long long n, long long m, double D) const {
        return log_ratio(n, m) / std::log(1.0 / D);
    }
};

DiagonalLogs diagonal_logs(const MapSequence& seq, long long horizon);

} // namespace basinforge
