#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jet.hpp"
#include "kernels.hpp"
#include "rng.hpp"

namespace basinforge {

struct AttractionBounds {
    double C = 0.3;
    double D = 0.5;

    AttractionBounds() = default;
    AttractionBounds(double c, double d);
};

enum class Family {
    DiagonalRandom,
    TriangularRandom,
    FullRandom,
    Constant,
    Alternating,
    FornaessShort,
    UserFile,
};

Family family_from_string(const std::string& s);
std::string family_to_string(Family f);

struct SequenceSpec {
    Family family = Family::DiagonalRandom;
    std::uint64_t seed = 1;
    std::optional<AttractionBounds> bounds = AttractionBounds{}; // absent for fornaess-short
    int contact_order = 2; // degrees 2..k-1 vanish
    int cutoff = 4;

    // constant family
    cplx const_a{0.5, 0.0};
    cplx const_b{0.3, 0.0};
    // fornaess-short
    double fornaess_a0 = 0.5;
    // alternating dominance: block j budgets a ratio swing of
    // block_growth^(j+1) * ln(1/D); alt_x > 0 sizes blocks for the
    // x-weighted quantity det/|growth|^(x+1) instead of the plain ratio.
    double block_growth = 2.0;
    double alt_x = 0.0;
    double block_slack = 1.6;
    double jitter = 0.3;    // fraction of the dominance window used for jitter
    double mix_angle = 0.0; // radians; rotates linear parts away from diagonal
    std::string user_file;
};

// Deterministic germ source: germ(n) is a pure function of (spec, n), so
// regeneration is bit-identical and parallel access needs no locks.
class MapSequence {
  public:
    explicit MapSequence(SequenceSpec spec);

    const SequenceSpec& spec() const { return spec_; }
    PolyMap2 germ(int n) const;
    JetCoeffs germ_coeffs(int n) const { return JetCoeffs::from(germ(n)); }
    Mat2 linear(int n) const { return germ(n).linear_part(); }
    bool diagonal_linear(int n_max, double tol = 1e-14) const;

    // alternating family: index of the dominance block containing n and its
    // parity (true = first coordinate dominant)
    bool block_first_dominant(int n) const;

  private:
    PolyMap2 germ_diagonal_random(int n) const;
    PolyMap2 germ_triangular_random(int n) const;
    PolyMap2 germ_full_random(int n) const;
    PolyMap2 germ_constant(int n) const;
    PolyMap2 germ_alternating(int n) const;
    PolyMap2 germ_fornaess(int n) const;

    // shared helpers
    void dominance_windows(double& dom_lo, double& dom_hi, double& sub_lo, double& sub_hi,
                           double& nonlinear_mass) const;
    void add_higher_order(PolyMap2& p, Rng& rng, double mass) const;

    SequenceSpec spec_;
    std::vector<PolyMap2> file_germs_;
};

struct AttractionReport {
    struct PerGerm {
        int n;
        double min_ratio;
        double max_ratio;
        bool pass;
    };
    std::vector<PerGerm> rows;
    bool pass = true;
    double worst_low = 1e300;  // min over n of min_ratio
    double worst_high = 0.0;   // max over n of max_ratio
    double check_C = 0, check_D = 0;
    int samples = 0;
};

// Samples ||f_n(z)||/||z|| on quasi-random ball points for each n <= n_max
// and compares against [C - tol, D + tol].
AttractionReport verify_uniform_attraction(const MapSequence& seq, double C, double D, int n_max,
                                           int samples, double tol = 1e-9);

struct ContactOrderResult {
    int k = 2;
    bool at_cutoff = false; // no nonlinear term found up to the cutoff
};

ContactOrderResult order_of_contact(const MapSequence& seq, int n_max, double tol = 1e-14);

} // namespace basinforge
