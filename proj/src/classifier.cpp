#include "mlz/classifier.hpp"

#include <cmath>

namespace mlz {

std::string KSet::describe() const {
    std::string s;
    switch (base) {
        case Base::all: s = "k >= " + std::to_string(k_min); break;
        case Base::even: s = "even k >= " + std::to_string(k_min); break;
        case Base::odd: s = "odd k >= " + std::to_string(k_min); break;
    }
    if (k_max >= 0) s = (k_min == k_max) ? "k = " + std::to_string(k_min)
                                         : s + " with k <= " + std::to_string(k_max);
    if (excluded.kind != ZeroSetKind::empty || !excluded.indeterminate.empty())
        s += " except { " + excluded.describe() + " }";
    return s;
}

KSet KSet::from_zero_set(const ZeroIndexSet& z) {
    KSet out;
    switch (z.kind) {
        case ZeroSetKind::empty:
            out.base = Base::all;
            out.k_min = 1;    // impossible range: contains nothing
            out.k_max = 0;
            break;
        case ZeroSetKind::odd_ge1:
            out.base = Base::odd;
            out.k_min = 1;
            break;
        case ZeroSetKind::odd_ge3:
            out.base = Base::odd;
            out.k_min = 3;
            break;
        case ZeroSetKind::numeric: {
            // Only the scanned indeterminate indices are kept.
            out.base = Base::all;
            out.k_min = 0;
            out.k_max = z.nmax;
            ZeroIndexSet inv;
            inv.kind = ZeroSetKind::numeric;
            inv.nmax = z.nmax;
            for (int k = 0; k <= z.nmax; ++k)
                if (!z.contains(k)) inv.indeterminate.push_back(k);
            out.excluded = inv;
            break;
        }
    }
    return out;
}

namespace {

std::vector<int> integer_mu_indices(const TwistParams& params, double eps) {
    std::vector<int> idx;
    bool all_exact = true;
    for (const auto& e : params.lambdas_exact)
        if (!e) { all_exact = false; break; }

    if (all_exact) {
        Rational acc(0);
        for (int i = 0; i < params.depth; ++i) {
            acc += *params.lambdas_exact[i];
            if (acc.is_integer()) idx.push_back(i + 1);
        }
        return idx;
    }
    for (int i = 0; i < params.depth; ++i) {
        double mu = params.mus[i];
        if (std::abs(mu - std::round(mu)) <= eps) idx.push_back(i + 1);
    }
    return idx;
}

} // namespace

SingularityReport classify_lerch(const TwistParams& params, double integer_test_eps) {
    SingularityReport rep;
    rep.integer_indices = integer_mu_indices(params, integer_test_eps);
    const auto& idx = rep.integer_indices;
    if (idx.empty()) {
        rep.status = SingularityReport::Status::entire;
        return rep;
    }
    rep.status = SingularityReport::Status::possible_poles;

    const bool first_is_one = idx.front() == 1;
    if (first_is_one) {
        PolarFamily h10;
        h10.i = 1;
        h10.k_set.k_min = 0;
        h10.k_set.k_max = 0;
        h10.certainty = params.is_hurwitz() ? Certainty::proven_pole : Certainty::possible;
        rep.families.push_back(h10);
    }
    // H_{i_j,k} for (i_j - k) <= j, i.e. k >= i_j - j, clamped to k >= 0.
    const int j_start = first_is_one ? 2 : 1;
    for (int j = j_start; j <= static_cast<int>(idx.size()); ++j) {
        PolarFamily fam;
        fam.i = idx[j - 1];
        fam.k_set.base = KSet::Base::all;
        fam.k_set.k_min = std::max(0, idx[j - 1] - j);
        fam.certainty = Certainty::possible;
        rep.families.push_back(fam);
    }
    return rep;
}

SingularityReport classify_hurwitz(const TwistParams& params, int numeric_nmax,
                                   double numeric_threshold) {
    SingularityReport rep;
    rep.status = SingularityReport::Status::exact_poles;
    for (int i = 1; i <= params.depth; ++i) rep.integer_indices.push_back(i);

    PolarFamily h10;
    h10.i = 1;
    h10.k_set.k_min = 0;
    h10.k_set.k_max = 0;
    h10.certainty = Certainty::proven_pole;
    rep.families.push_back(h10);

    if (params.depth >= 2) {
        ZeroIndexSet K;
        if (params.alphas_exact[0] && params.alphas_exact[1]) {
            K = zero_index_set(*params.alphas_exact[1] - *params.alphas_exact[0]);
        } else {
            K = zero_index_set_numeric(params.alphas[1] - params.alphas[0], numeric_nmax,
                                       numeric_threshold);
            if (K.kind == ZeroSetKind::numeric) rep.k_set_indeterminate = true;
        }

        PolarFamily h2;
        h2.i = 2;
        h2.k_set.base = KSet::Base::all;
        h2.k_set.k_min = 0;
        h2.k_set.excluded = K;
        h2.certainty = Certainty::proven_pole;
        rep.families.push_back(h2);

        bool k_nonempty = K.kind != ZeroSetKind::empty &&
                          !(K.kind == ZeroSetKind::numeric && K.indeterminate.empty());
        if (k_nonempty) {
            PolarFamily removed;
            removed.i = 2;
            removed.k_set = KSet::from_zero_set(K);
            removed.certainty = Certainty::removable;
            rep.families.push_back(removed);
        }
    }
    for (int i = 3; i <= params.depth; ++i) {
        PolarFamily fam;
        fam.i = i;
        fam.k_set.base = KSet::Base::all;
        fam.k_set.k_min = 0;
        fam.certainty = Certainty::proven_pole;
        rep.families.push_back(fam);
    }
    return rep;
}

const char* to_string(Certainty c) {
    switch (c) {
        case Certainty::proven_pole: return "proven-pole";
        case Certainty::possible: return "possible";
        case Certainty::removable: return "removable";
    }
    return "?";
}

const char* to_string(SingularityReport::Status s) {
    switch (s) {
        case SingularityReport::Status::entire: return "entire";
        case SingularityReport::Status::possible_poles: return "possible-poles";
        case SingularityReport::Status::exact_poles: return "exact-poles";
    }
    return "?";
}

} // namespace mlz
