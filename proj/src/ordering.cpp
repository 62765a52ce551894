#include <bsvd/ordering.hpp>

#include <numeric>

namespace bsvd {

index_t Schedule::pair_count() const {
    index_t total = 0;
    for (const auto &it : iterations)
        total += static_cast<index_t>(it.size());
    return total;
}

Schedule round_robin_schedule(index_t ell) {
    if (ell < 2)
        throw DomainError("round_robin_schedule: need at least two block columns");

    const index_t players = ell + (ell % 2); // phantom index == ell when odd
    const index_t half    = players / 2;

    // Two rows of the tournament table; column c plays top[c] vs bottom[c].
    std::vector<index_t> top(half), bottom(half);
    for (index_t c = 0; c < half; ++c) {
        top[c]    = 2 * c;
        bottom[c] = 2 * c + 1;
    }

    Schedule s;
    s.ell = ell;
    s.iterations.reserve(players - 1);
    for (index_t round = 0; round < players - 1; ++round) {
        std::vector<IndexPair> pairs;
        pairs.reserve(half);
        for (index_t c = 0; c < half; ++c) {
            index_t a = top[c], b = bottom[c];
            if (a >= ell || b >= ell)
                continue;
            if (a > b)
                std::swap(a, b);
            pairs.push_back({a, b});
        }
        s.iterations.push_back(std::move(pairs));

        // Hold top[0]; everyone else moves one seat around the ring
        // top[1..] -> bottom[half-1..0] -> top[1].
        const index_t carry_down = top[half - 1];
        const index_t carry_up   = bottom[0];
        for (index_t c = half - 1; c > 1; --c)
            top[c] = top[c - 1];
        for (index_t c = 0; c + 1 < half; ++c)
            bottom[c] = bottom[c + 1];
        if (half > 1) {
            top[1]            = carry_up;
            bottom[half - 1]  = carry_down;
        }
    }
    return s;
}

} // namespace bsvd
