#pragma once

// Exhaustive enumeration of the reservoir process for tiny pools. Every
// matching and every gate outcome is expanded with its probability, so the
// yield comes out exactly (up to double rounding). Written independently of
// the simulator in core; it shares only the model definition.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

namespace jitcluster::testing {

struct ExactModel {
    bool chain_ends = true;  // false: uniform matching over whole chains
    bool full_cost = false;  // charge c1 on successful joins
};

using PoolState = std::vector<std::uint32_t>;  // sorted lengths
using Distribution = std::map<PoolState, double>;

namespace detail {

using Pairs = std::vector<std::pair<int, int>>;

// Uniform matching: with an odd count one uniformly chosen item idles.
inline void for_each_matching(std::vector<int> items,
                              double weight,
                              Pairs& acc,
                              const std::function<void(double, const Pairs&)>& emit) {
    const std::size_t n = items.size();
    if (n == 0) {
        emit(weight, acc);
        return;
    }
    if (n % 2 == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<int> rest = items;
            rest.erase(rest.begin() + static_cast<long>(i));
            for_each_matching(rest, weight / static_cast<double>(n), acc, emit);
        }
        return;
    }
    const int first = items[0];
    for (std::size_t j = 1; j < n; ++j) {
        std::vector<int> rest;
        for (std::size_t k = 1; k < n; ++k) {
            if (k != j) {
                rest.push_back(items[k]);
            }
        }
        acc.emplace_back(first, items[j]);
        for_each_matching(rest, weight / static_cast<double>(n - 1), acc, emit);
        acc.pop_back();
    }
}

struct Outcome {
    double weight;
    Pairs successes;
    std::vector<int> removed;
};

inline void for_each_outcome(const Pairs& pairs,
                             std::size_t index,
                             double p,
                             int c2,
                             Outcome& acc,
                             const std::function<void(const Outcome&)>& emit) {
    if (index == pairs.size()) {
        emit(acc);
        return;
    }
    const auto [a, b] = pairs[index];
    if (a == b) {
        for_each_outcome(pairs, index + 1, p, c2, acc, emit);
        return;
    }
    const double w = acc.weight;

    acc.weight = w * p;
    acc.successes.emplace_back(a, b);
    for_each_outcome(pairs, index + 1, p, c2, acc, emit);
    acc.successes.pop_back();

    const int half = c2 / 2;
    if (c2 % 2 == 0) {
        acc.weight = w * (1 - p);
        acc.removed[a] += half;
        acc.removed[b] += half;
        for_each_outcome(pairs, index + 1, p, c2, acc, emit);
        acc.removed[a] -= half;
        acc.removed[b] -= half;
    } else {
        for (int side = 0; side < 2; ++side) {
            const int ra = half + (side == 0 ? 1 : 0);
            const int rb = half + (side == 1 ? 1 : 0);
            acc.weight = w * (1 - p) / 2;
            acc.removed[a] += ra;
            acc.removed[b] += rb;
            for_each_outcome(pairs, index + 1, p, c2, acc, emit);
            acc.removed[a] -= ra;
            acc.removed[b] -= rb;
        }
    }
    acc.weight = w;
}

}  // namespace detail

inline Distribution exact_round(const PoolState& state, double p, int c1, int c2, ExactModel model) {
    const int n = static_cast<int>(state.size());
    std::vector<int> items;
    for (int i = 0; i < n; ++i) {
        items.push_back(i);
        if (model.chain_ends && state[i] >= 2) {
            items.push_back(i);
        }
    }
    Distribution out;
    detail::Pairs acc;
    detail::for_each_matching(items, 1.0, acc, [&](double wm, const detail::Pairs& pairs) {
        detail::Outcome o{wm, {}, std::vector<int>(n, 0)};
        detail::for_each_outcome(pairs, 0, p, c2, o, [&](const detail::Outcome& res) {
            std::vector<long> len(n);
            std::vector<int> parent(n);
            std::iota(parent.begin(), parent.end(), 0);
            for (int i = 0; i < n; ++i) {
                len[i] = static_cast<long>(state[i]) - res.removed[i];
            }
            auto find = [&](int x) {
                while (parent[x] != x) {
                    x = parent[x];
                }
                return x;
            };
            for (const auto& [a, b] : res.successes) {
                if (len[a] < 1 || len[b] < 1) {
                    continue;
                }
                const int ra = find(a);
                const int rb = find(b);
                if (ra != rb) {
                    parent[ra] = rb;
                }
            }
            std::map<int, std::pair<long, int>> comps;
            for (int i = 0; i < n; ++i) {
                if (len[i] >= 1) {
                    auto& c = comps[find(i)];
                    c.first += len[i];
                    c.second += 1;
                }
            }
            PoolState next;
            for (const auto& [root, c] : comps) {
                const long joins = c.second - 1;
                long l = c.first;
                if (joins > 0 && model.full_cost) {
                    l = std::max<long>(l - c1 * joins, 2);
                }
                next.push_back(static_cast<std::uint32_t>(l));
            }
            std::sort(next.begin(), next.end());
            out[next] += res.weight;
        });
    });
    return out;
}

inline double exact_yield(std::uint32_t q, double p, int c1, int c2, unsigned tau, ExactModel model) {
    const double m = (1.0 + p * c1 + (1.0 - p) * c2) / p;
    const auto need = static_cast<std::uint32_t>(std::ceil(m - 1e-9));
    Distribution dist{{PoolState(q, 1), 1.0}};
    for (unsigned t = 0; t < tau; ++t) {
        Distribution next;
        for (const auto& [state, w] : dist) {
            for (const auto& [s2, w2] : exact_round(state, p, c1, c2, model)) {
                next[s2] += w * w2;
            }
        }
        dist = std::move(next);
    }
    double y = 0;
    for (const auto& [state, w] : dist) {
        y += w * static_cast<double>(std::count_if(state.begin(), state.end(), [&](std::uint32_t l) { return l >= need; }));
    }
    return y;
}

}  // namespace jitcluster::testing
