// Empirical verification of the Besov-space inequalities over seeded random
// corpora: interpolation, bilinear product estimate, the B^{3/2}_{2,1} -> L^inf
// embedding, and the commutator estimate.  Each check reports the max of
// (left side)/(right side) over the corpus and over a doubled corpus; the
// ratios must be finite and stable under doubling.
#pragma once

#include "nsf/dyadic.hpp"
#include "nsf/grid.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nsf {

struct CorpusSpec {
    int n_fields = 100;
    double slope = 1.0; // spectral envelope |coef| ~ |xi|^{-slope}
    std::uint64_t seed = 2024;
};

struct InequalityLine {
    std::string name;
    double max_ratio = 0.0;         // over the base corpus
    double max_ratio_doubled = 0.0; // over the doubled corpus
    double growth() const
    {
        return max_ratio > 0.0 ? (max_ratio_doubled - max_ratio) / max_ratio : 0.0;
    }
};

struct InequalityReport {
    std::vector<InequalityLine> lines;
    double interpolation_single_mode_ratio = 0.0; // achievability probe
};

InequalityReport check_inequalities(const Grid& grid, const DyadicLadder& ladder,
                                    const CorpusSpec& corpus);

} // namespace nsf
