#pragma once

#include "mlz/bernoulli.hpp"
#include "mlz/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace mlz {

// Symbolic k-set of one hyperplane family H_{i,k}, optionally minus an
// exceptional Bernoulli zero set.
struct KSet {
    enum class Base { all, even, odd };
    Base base = Base::all;
    int k_min = 0;
    int k_max = -1;            // -1 = unbounded
    ZeroIndexSet excluded;     // kind empty when nothing is excluded

    bool contains(int k) const {
        if (k < k_min) return false;
        if (k_max >= 0 && k > k_max) return false;
        if (base == Base::even && k % 2 != 0) return false;
        if (base == Base::odd && k % 2 != 1) return false;
        return !excluded.contains(k);
    }

    std::vector<int> enumerate(int bound) const {
        std::vector<int> out;
        for (int k = 0; k <= bound; ++k)
            if (contains(k)) out.push_back(k);
        return out;
    }

    std::string describe() const;

    static KSet from_zero_set(const ZeroIndexSet& z);
};

enum class Certainty { proven_pole, possible, removable };

struct PolarFamily {
    int i = 1;
    KSet k_set;
    Certainty certainty = Certainty::possible;
};

// Singularity structure of one parameter tuple. For Hurwitz inputs the
// families are exact (proven-pole or removable); for Lerch inputs only a
// containing set of possible poles is known.
struct SingularityReport {
    enum class Status { entire, possible_poles, exact_poles };
    Status status = Status::entire;
    std::vector<PolarFamily> families;
    std::vector<int> integer_indices;   // i_1 < ... < i_m with mu_{i_j} integer
    bool k_set_indeterminate = false;   // numeric K scan could not be exact

    // Hyperplanes that can actually carry a pole (excludes removable ones).
    bool may_be_polar(const Hyperplane& h) const {
        for (const auto& f : families)
            if (f.certainty != Certainty::removable && f.i == h.i && f.k_set.contains(h.k))
                return true;
        return false;
    }
};

SingularityReport classify_lerch(const TwistParams& params, double integer_test_eps = 1e-12);

SingularityReport classify_hurwitz(const TwistParams& params, int numeric_nmax = 64,
                                   double numeric_threshold = 1e-12);

const char* to_string(Certainty c);
const char* to_string(SingularityReport::Status s);

} // namespace mlz
