#include "chainbound/rng.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace chainbound {

std::vector<int> sample_without_replacement(int n, int k, Rng& rng) {
    if (k < 0 || k > n) throw std::invalid_argument("sample size out of range");
    std::unordered_set<int> chosen;
    chosen.reserve(static_cast<std::size_t>(k) * 2);
    for (int i = n - k; i < n; ++i) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
        if (!chosen.insert(j).second) chosen.insert(i);
    }
    std::vector<int> out(chosen.begin(), chosen.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace chainbound
