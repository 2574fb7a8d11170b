#pragma once

#include <string>
#include <vector>

#include "checks.hpp"
#include "sequence.hpp"

namespace basinforge {

// General-case trains: no diagonality assumed. Each train carries a unit
// vector v_j; acceptance compares |det Df_{q,p}| |df_{p,p_j}(v_j)|^(x+1)
// against |df_{q,p_j}(v_j)|^(x+1) in the log domain.
struct GeneralTrainRecord {
    int j;
    long long p;
    long long q;
    long long p_next = -1;
    Vec2 v;            // v_j, phase normalized
    Mat2 U;            // U_j (identity for j = 0)
    Vec2 dir_end;      // direction of df_{p_next, p_j}(v_j), set with p_next
    double accept_log; // log of the acceptance quantity (j >= 1)
    double eigen_separation = 0.0;
};

struct GeneralTrainPartition {
    double k = 2.1;
    double x = 1.5;
    double C = 0.3;
    double D = 0.5;
    long long horizon = 0;
    bool truncated = false;
    std::vector<GeneralTrainRecord> trains;

    int complete_count() const;
    std::string to_json() const;
};

// q minimal, then p minimizing the acceptance quantity (smallest p on exact
// ties). Throws degeneracy_error when the two eigenvalues of the unitarized
// engine map coincide to 1e-12 relative.
GeneralTrainPartition build_trains_general(const MapSequence& seq, double k, double x,
                                           long long horizon);

struct degeneracy_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct frame_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Per-train unitary frames and the lower-triangular linear data they induce.
struct TrainFrames {
    int j;
    long long p, p_next;
    Mat2 V;              // maps v_j to [0,1]
    std::vector<Mat2> W; // W[i - p], i = p..p_next; W[0] == V
    std::vector<cplx> a, b, c; // per-step triangular entries, b real > 0
    std::vector<double> la, lb; // prefix logs within the train, la[0] = 0

    double log_a(long long n, long long m) const { // ln|a_{n,m}|
        return la[static_cast<std::size_t>(n - p)] - la[static_cast<std::size_t>(m - p)];
    }
    double log_b(long long n, long long m) const {
        return lb[static_cast<std::size_t>(n - p)] - lb[static_cast<std::size_t>(m - p)];
    }
};

// Same data in the frame of the previous train's tracked vector, on the
// engine only. Built for j >= 1.
struct EngineFrames {
    int j;
    long long p, q;
    Mat2 S;
    std::vector<Mat2> T;
    std::vector<cplx> alpha, beta, gamma; // per-step, beta real > 0
    std::vector<double> lalpha, lbeta;

    double log_alpha(long long n, long long m) const {
        return lalpha[static_cast<std::size_t>(n - p)] - lalpha[static_cast<std::size_t>(m - p)];
    }
    double log_beta(long long n, long long m) const {
        return lbeta[static_cast<std::size_t>(n - p)] - lbeta[static_cast<std::size_t>(m - p)];
    }
};

struct TriangularizedSequence {
    std::vector<TrainFrames> trains;
    std::vector<Mat2> M; // M[j] connects train j-1 to train j; M[0] unused
    double worst_unitarity = 0.0;

    // the conjugated germ sequence: f~_i for i in train j
    PolyMap2 tilde_germ(const MapSequence& seq, long long n) const;
    const TrainFrames& train_of(long long n) const;
};

// Builds W/V frames per train and S/T frames per engine via canonical
// unitary completions; throws frame_error past 1e-10 unitarity loss.
std::pair<TriangularizedSequence, std::vector<EngineFrames>> triangularize_frames(
    const MapSequence& seq, const GeneralTrainPartition& partition);

struct GeneralTrainReport {
    std::vector<CheckLine> checks;
    bool pass = true;
    double K1 = 0, K2 = 0;
};

// Engine/wagon estimates in both frames, the gamma growth bound, the tracked
// vector norm bounds and the K2 family, plus structural invariants
// (triangularity, determinant consistency, endpoint swap, convolution).
GeneralTrainReport verify_general_train_inequalities(const GeneralTrainPartition& partition,
                                                     const TriangularizedSequence& tri,
                                                     const std::vector<EngineFrames>& engines,
                                                     const MapSequence& seq);

// Re-runs the search mechanically: at q_{j+1}-1 no valid p exists, and the
// accepted pair meets the bound.
CheckLine verify_general_minimality(const GeneralTrainPartition& partition, const MapSequence& seq);

} // namespace basinforge
