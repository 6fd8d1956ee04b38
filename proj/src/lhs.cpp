#include "gpbo/lhs.hpp"

#include <numeric>
#include <vector>

namespace gpbo::sampling {

Eigen::MatrixXd latin_hypercube(int n, const Box& box, Rng& rng) {
    if (n < 1) {
        throw ContractViolation("latin_hypercube: n must be positive");
    }
    box.validate();
    const int d = box.dim();
    Eigen::MatrixXd pts(n, d);
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int k = 0; k < d; ++k) {
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        const double lo = box.lower(k);
        const double width = box.upper(k) - box.lower(k);
        for (int i = 0; i < n; ++i) {
            const double u = (perm[static_cast<std::size_t>(i)] + rng.uniform()) / n;
            pts(i, k) = lo + u * width;
        }
    }
    return pts;
}

int seed_count(int d) {
    if (d < 1) {
        throw ContractViolation("seed_count: d must be positive");
    }
    return 10 * d;
}

} // namespace gpbo::sampling
