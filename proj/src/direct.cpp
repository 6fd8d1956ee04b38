#include "gpbo/direct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <vector>

namespace gpbo::direct {

Eigen::VectorXd normalize(const Eigen::VectorXd& x, const Box& box) {
    return ((x - box.lower).array() / (box.upper - box.lower).array()).matrix();
}

Eigen::VectorXd denormalize(const Eigen::VectorXd& u, const Box& box) {
    return (box.lower.array() + u.array() * (box.upper - box.lower).array()).matrix();
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Rect {
    Eigen::VectorXd center;   // normalized coordinates
    Eigen::VectorXi levels;   // trisection count per dimension; side_i = 3^-levels_i
    double f = kInf;
    int id = 0;
};

/// Center-to-vertex distance, computed over sorted levels so that rects with
/// the same level multiset get bit-identical measures.
double rect_measure(const Eigen::VectorXi& levels) {
    std::vector<int> sorted(levels.data(), levels.data() + levels.size());
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (int k : sorted) {
        sum += std::pow(3.0, -2.0 * k);
    }
    return 0.5 * std::sqrt(sum);
}

struct Evaluator {
    const std::function<double(const Eigen::VectorXd&)>& f;
    const Box& box;
    int max_evals;
    int used = 0;
    double best_f = kInf;
    Eigen::VectorXd best_x; // original coordinates

    double eval(const Eigen::VectorXd& u) {
        const Eigen::VectorXd x = denormalize(u, box);
        double v = f(x);
        ++used;
        if (!std::isfinite(v)) {
            v = kInf;
        } else if (v < best_f) {
            best_f = v;
            best_x = x;
        }
        return v;
    }

    bool exhausted() const { return used >= max_evals; }
};

} // namespace

Result minimize(const std::function<double(const Eigen::VectorXd&)>& f, const Box& box,
                int max_evals, double eps) {
    box.validate();
    if (max_evals < 1) {
        throw ContractViolation("direct::minimize: max_evals must be positive");
    }
    const int d = box.dim();
    Evaluator ev{f, box, max_evals};

    std::vector<Rect> rects;
    {
        Rect r0;
        r0.center = Eigen::VectorXd::Constant(d, 0.5);
        r0.levels = Eigen::VectorXi::Zero(d);
        r0.f = ev.eval(r0.center);
        r0.id = 0;
        rects.push_back(std::move(r0));
    }

    while (!ev.exhausted()) {
        // Group rectangles by measure; keep the best representative of each
        // group (lowest f, then lowest id).
        std::map<std::vector<int>, std::size_t> reps;
        std::map<std::vector<int>, double> measures;
        for (std::size_t i = 0; i < rects.size(); ++i) {
            std::vector<int> key(rects[i].levels.data(), rects[i].levels.data() + d);
            std::sort(key.begin(), key.end());
            auto it = reps.find(key);
            if (it == reps.end()) {
                reps[key] = i;
                measures[key] = rect_measure(rects[i].levels);
            } else {
                const Rect& cur = rects[it->second];
                if (rects[i].f < cur.f || (rects[i].f == cur.f && rects[i].id < cur.id)) {
                    it->second = i;
                }
            }
        }

        struct GroupPoint {
            double measure;
            double f;
            std::size_t rect_index;
        };
        std::vector<GroupPoint> groups;
        groups.reserve(reps.size());
        for (const auto& [key, idx] : reps) {
            groups.push_back({measures[key], rects[idx].f, idx});
        }
        std::sort(groups.begin(), groups.end(),
                  [](const GroupPoint& a, const GroupPoint& b) { return a.measure < b.measure; });

        const double f_glob = ev.best_f;
        std::vector<std::size_t> selected;
        for (std::size_t j = 0; j < groups.size(); ++j) {
            const double dj = groups[j].measure;
            const double fj = groups[j].f;
            if (!std::isfinite(fj)) continue;
            // Largest feasible K from smaller-measure groups, smallest from
            // larger-measure groups.
            double k_lo = 0.0;
            bool feasible = true;
            for (std::size_t i = 0; i < j; ++i) {
                if (!std::isfinite(groups[i].f) || groups[i].measure == dj) continue;
                k_lo = std::max(k_lo, (fj - groups[i].f) / (dj - groups[i].measure));
            }
            double k_hi = kInf;
            for (std::size_t i = j + 1; i < groups.size(); ++i) {
                if (!std::isfinite(groups[i].f) || groups[i].measure == dj) continue;
                k_hi = std::min(k_hi, (groups[i].f - fj) / (groups[i].measure - dj));
            }
            if (k_lo > k_hi) feasible = false;
            if (feasible && std::isfinite(f_glob)) {
                // Nontrivial-descent test at the most favorable K.
                const double k_use = std::isfinite(k_hi) ? k_hi : std::max(k_lo, 1.0) * 1e12;
                if (fj - k_use * dj > f_glob - eps * std::fabs(f_glob)) {
                    feasible = false;
                }
            }
            if (feasible) {
                selected.push_back(groups[j].rect_index);
            }
        }
        if (selected.empty()) {
            // All candidate values were +inf (or numerically degenerate);
            // fall back to the largest-measure group so the search always
            // progresses.
            selected.push_back(groups.back().rect_index);
        }

        for (std::size_t sel : selected) {
            if (ev.exhausted()) break;
            // Copy parent fields: push_back below may reallocate the vector.
            const Eigen::VectorXd parent_center = rects[sel].center;
            const Eigen::VectorXi parent_levels = rects[sel].levels;
            const int min_level = parent_levels.minCoeff();
            std::vector<int> long_dims;
            for (int k = 0; k < d; ++k) {
                if (parent_levels(k) == min_level) long_dims.push_back(k);
            }
            const double delta = std::pow(3.0, -(min_level + 1));

            struct Probe {
                int dim;
                double w;
                double f_plus, f_minus;
                Eigen::VectorXd c_plus, c_minus;
            };
            std::vector<Probe> probes;
            for (int k : long_dims) {
                if (ev.exhausted()) break;
                Probe p;
                p.dim = k;
                p.c_plus = parent_center;
                p.c_plus(k) += delta;
                p.f_plus = ev.eval(p.c_plus);
                if (ev.exhausted()) {
                    // Unpaired probe: record nothing, best already tracked.
                    break;
                }
                p.c_minus = parent_center;
                p.c_minus(k) -= delta;
                p.f_minus = ev.eval(p.c_minus);
                p.w = std::min(p.f_plus, p.f_minus);
                probes.push_back(std::move(p));
            }
            if (probes.empty()) break;

            std::stable_sort(probes.begin(), probes.end(), [](const Probe& a, const Probe& b) {
                if (a.w != b.w) return a.w < b.w;
                return a.dim < b.dim;
            });

            // Divide in order of ascending w: children created earlier keep
            // larger sides in the not-yet-divided dimensions.
            Eigen::VectorXi child_levels = parent_levels;
            for (const Probe& p : probes) {
                child_levels(p.dim) += 1;
                Rect plus{p.c_plus, child_levels, p.f_plus, static_cast<int>(rects.size())};
                rects.push_back(std::move(plus));
                Rect minus{p.c_minus, child_levels, p.f_minus, static_cast<int>(rects.size())};
                rects.push_back(std::move(minus));
            }
            rects[sel].levels = child_levels;
        }
    }

    if (!std::isfinite(ev.best_f)) {
        throw std::runtime_error("direct::minimize: objective returned no finite value");
    }
    return {std::move(ev.best_x), ev.best_f, ev.used};
}

} // namespace gpbo::direct
