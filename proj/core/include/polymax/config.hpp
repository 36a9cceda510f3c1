#pragma once

#include <cstddef>

namespace polymax {

// Central tolerance record. Acceptance tests pin these defaults; override per
// call only when a caller documents why.
struct Tolerances {
    double normalization = 1e-7;      // |pE[1] - 1|
    double consistency = 1e-7;        // moment entries sharing a product monomial
    double psd_min_eig = 1e-6;        // block min eigenvalue >= -psd_min_eig
    double domain_identity = 1e-6;    // sphere identities pE[|x|^2 m] = pE[m]
    double reweight_min = 1e-9;       // pE[r] below this is a degenerate reweight
    double extraction_obj_rel = 1e-4; // extraction may move the objective by this x |T|_1
};

// Knobs with paper-unpinned constants, surfaced so tests and the CLI can
// reference one place.
struct Constants {
    double grothendieck_k = 1.783;          // Krivine constant upper bound
    double rounding_gate = 0.125;           // c in value >= c * sqrt(k/n) * SOS
    double hitting_const = 3.0 / 32.0;      // explicit hitting-set direction constant
    double net_eps = 0.1;                   // eps for sphere nets (Lemma-style fixed value)
    double threesat_c = 0.1;                // c in delta = c / (sqrt(n) log n)
    double threesat_f2_slack = 4.0;         // C in f2(xbar) >= -C delta
    int trials_per_n = 64;                  // rounding trials = 64 n (x 4^k for k > 1)
    std::size_t basis_cap = 40000;          // monomial basis size cap
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

inline const Constants& default_constants() {
    static const Constants c{};
    return c;
}

}  // namespace polymax
