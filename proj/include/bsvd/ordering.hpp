#pragma once

#include <utility>
#include <vector>

#include <bsvd/types.hpp>

namespace bsvd {

struct IndexPair {
    index_t i, j; ///< i < j, 0-based

    friend bool operator==(const IndexPair &, const IndexPair &) = default;
};

/// One Jacobi sweep split into iterations of mutually disjoint pairs.
struct Schedule {
    index_t ell = 0;
    std::vector<std::vector<IndexPair>> iterations;

    index_t pair_count() const;
};

/// Round-robin (tournament) ordering over `ell` block columns.
///
/// Even ell gives ell-1 iterations of ell/2 pairs. Odd ell is scheduled as
/// ell+1 with a phantom index whose pairs are dropped, giving ell iterations
/// of (ell-1)/2 pairs. Index 0 stays fixed while the others rotate, so
/// ell = 4 yields {(0,1),(2,3)}, {(0,3),(1,2)}, {(0,2),(1,3)}.
Schedule round_robin_schedule(index_t ell);

} // namespace bsvd
