#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fermat {

// Count ledger for the index audit: c_l = number of found rays of geometric
// index l, beta_l = Betti numbers of the space of connecting curves (for a
// contractible region: 1, 0, 0, ...).
struct IndexSeries {
    std::vector<int> counts;   // c_0 .. c_L
    std::vector<int> betti;    // b_0 .. b_L (zero-padded to match)
    int degree() const { return static_cast<int>(counts.size()) - 1; }
};

// Alternating partial sums S_l = sum_{j<=l} (-1)^{l-j} (c_j - b_j).  The
// counts are consistent with a complete critical-point inventory iff every
// S_l >= 0; the first negative S_l pinpoints the undercounted index.
struct RelationCheck {
    bool consistent = true;
    std::vector<long long> partial_sums;
    int first_violation = -1;        // index l of the first S_l < 0, or -1
    long long excess = 0;            // S_L: total found minus minimal count
};

// Assemble the series from per-ray indices and the Betti profile, padding to
// max(index)+2 so a stray high index is visible in the audit.
IndexSeries assemble_series(const std::vector<int>& ray_indices,
                            const std::vector<int>& betti);

RelationCheck check_relations(const IndexSeries& series);

// Parity audit of the total ray count.  In a contractible region the count
// of nondegenerate rays is odd when the inventory is complete; an even count
// is flagged as "odd or undercounted".  In a noncontractible region the
// guaranteed floor is two.
struct ParityResult {
    bool consistent = true;
    std::string message;
};

ParityResult parity_check(int n_rays, bool contractible,
                          bool any_degenerate = false);

// Betti profile for the supported topology classes of the connecting-curve
// space: contractible -> (1,0,0,...), else caller-supplied.
std::vector<int> betti_profile(bool contractible, int degree);

} // namespace fermat
