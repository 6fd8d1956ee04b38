#pragma once

#include <Eigen/Core>

#include "gpbo/box.hpp"
#include "gpbo/rng.hpp"

namespace gpbo::sampling {

/// Latin-hypercube sample of n points: per dimension, the n samples occupy
/// the n equal-width strata exactly once, positioned uniformly within each
/// stratum. Deterministic given rng.
Eigen::MatrixXd latin_hypercube(int n, const Box& box, Rng& rng);

/// 10 d seed points.
int seed_count(int d);

} // namespace gpbo::sampling
