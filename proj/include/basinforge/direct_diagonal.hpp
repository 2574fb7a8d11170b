#pragma once

#include <vector>

#include "checks.hpp"
#include "train_diagonal.hpp"

namespace basinforge {

// Diagonal rescaling l_n(z,w) = (theta_n z, tau_n w) driving each train to a
// single dominant coordinate: first coordinate on odd trains, second on even
// ones. Weights are kept in logs; they grow like D^(-k^j) at train ends.
struct DirectingWeights {
    int k = 2;
    long long covered_end = 0; // directed range is [0, covered_end)
    std::vector<double> ltheta; // ln theta_n, n = 0..covered_end
    std::vector<double> ltau;

    double theta(long long n) const { return std::exp(ltheta[static_cast<std::size_t>(n)]); }
    double tau(long long n) const { return std::exp(ltau[static_cast<std::size_t>(n)]); }
};

struct DirectedSequence {
    DirectingWeights weights;
    std::vector<PolyMap2> germs; // directed germs over [0, covered_end)
    std::vector<int> parity;     // train index parity per step (j mod 2)
    std::vector<long long> train_start; // p_j for each covered train

    const PolyMap2& germ(long long n) const { return germs[static_cast<std::size_t>(n)]; }
    cplx mult_a(long long n) const { return germs[static_cast<std::size_t>(n)].coeff(1, 1, 0); }
    cplx mult_b(long long n) const { return germs[static_cast<std::size_t>(n)].coeff(2, 0, 1); }
};

// Runs the per-train recursion across the complete-train prefix of the
// partition. Train 0 carries no usable estimates, so its starting weights
// are enlarged enough to absorb the worst ratio swing inside it; later
// trains inherit weights that the train estimates keep inside the
// distortion region.
DirectedSequence direct_trains(const MapSequence& seq, const TrainPartition& partition, int k);

// Bounded distortion at every n, parity domination per train, directed
// multipliers still inside [C, D], per-step coefficient inflation <= D/C,
// train-start weight floors, and the contracted-orbit surrogate.
CheckReport verify_directing(const MapSequence& seq, const TrainPartition& partition,
                             const DirectedSequence& directed, double C, double D);

} // namespace basinforge
