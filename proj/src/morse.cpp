#include "fermat/morse.hpp"

#include "fermat/types.hpp"

#include <algorithm>

namespace fermat {

std::vector<int> betti_profile(bool contractible, int degree) {
    std::vector<int> betti(degree + 1, 0);
    if (contractible && degree >= 0)
        betti[0] = 1;
    return betti;
}

IndexSeries assemble_series(const std::vector<int>& ray_indices,
                            const std::vector<int>& betti) {
    int max_index = 0;
    for (int idx : ray_indices) {
        if (idx < 0)
            throw Error(ErrorCode::Validation, "ray indices must be nonnegative");
        max_index = std::max(max_index, idx);
    }
    // Pad two slots past the largest observed index so an audit sees the
    // trailing zeros it needs to certify the tail of the relations.
    const int degree = std::max(max_index + 2, static_cast<int>(betti.size()) - 1);
    IndexSeries series;
    series.counts.assign(degree + 1, 0);
    for (int idx : ray_indices)
        ++series.counts[idx];
    series.betti.assign(degree + 1, 0);
    for (std::size_t i = 0; i < betti.size(); ++i)
        series.betti[i] = betti[i];
    return series;
}

RelationCheck check_relations(const IndexSeries& series) {
    if (series.counts.size() != series.betti.size())
        throw Error(ErrorCode::Validation, "count and Betti series lengths differ");
    RelationCheck check;
    long long s = 0;
    for (std::size_t l = 0; l < series.counts.size(); ++l) {
        // S_l = (c_l - b_l) - S_{l-1}, the alternating partial sum.
        s = (static_cast<long long>(series.counts[l]) - series.betti[l]) - s;
        check.partial_sums.push_back(s);
        if (s < 0 && check.first_violation < 0) {
            check.consistent = false;
            check.first_violation = static_cast<int>(l);
        }
    }
    check.excess = check.partial_sums.empty() ? 0 : check.partial_sums.back();
    return check;
}

ParityResult parity_check(int n_rays, bool contractible, bool any_degenerate) {
    ParityResult result;
    if (any_degenerate) {
        result.consistent = true;
        result.message = "parity not audited: a degenerate ray is present";
        return result;
    }
    if (contractible) {
        if (n_rays % 2 == 1) {
            result.message = "ray count is odd, as expected in a contractible region";
        } else {
            result.consistent = false;
            result.message = "ray count is even; the inventory is odd or undercounted";
        }
        return result;
    }
    if (n_rays >= 2) {
        result.message = "ray count meets the floor of two for a noncontractible region";
    } else {
        result.consistent = false;
        result.message = "fewer than two rays found in a noncontractible region";
    }
    return result;
}

} // namespace fermat
