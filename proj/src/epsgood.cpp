// Copyright 2026 The qtpe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qtpe/epsgood.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "qtpe/error.hpp"

namespace qtpe {

namespace {

constexpr double kDegenerateProbability = 1e-12;
// Slack on interval endpoints so that exact boundary cases survive rounding.
constexpr double kSlack = 1e-12;

void check_shapes(const CMatrix &u, Index d, Index dprime) {
    if (d < 1 || dprime < 1) {
        throw DomainError("d and d' must be positive");
    }
    if (u.rows() != d * dprime || u.cols() != d * dprime) {
        throw DomainError("unitary is " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                          ", expected d*d' = " + std::to_string(d * dprime));
    }
}

void check_unit(const CVector &x, Index n) {
    if (x.size() != n) {
        throw DomainError("vector has length " + std::to_string(x.size()) + ", expected " + std::to_string(n));
    }
    if (std::abs(x.norm() - 1.0) > 1e-10) {
        throw DomainError("vector is not unit norm (|x| = " + std::to_string(x.norm()) + ")");
    }
}

bool probability_ok(double p, Index d, double eps) {
    double lo = (1.0 - 3.0 * eps) / static_cast<double>(d);
    double hi = (1.0 + 3.0 * eps) / static_cast<double>(d);
    return p >= lo - kSlack && p <= hi + kSlack;
}

// Vector condition on y = u x, already computed.
GoodnessDecision vector_decision(const CVector &y, Index d, Index dprime, double eps) {
    GoodnessDecision out;
    double worst_gap = -1.0;
    for (Index v = 0; v < d; v++) {
        double p = y.segment(v * dprime, dprime).squaredNorm();
        double gap = std::abs(p - 1.0 / static_cast<double>(d));
        if (gap > worst_gap) {
            worst_gap = gap;
            out.worst_outcome = v;
            out.worst_probability = p;
        }
        if (!probability_ok(p, d, eps) && out.good) {
            out.good = false;
            std::ostringstream msg;
            msg << "outcome " << v << " has probability " << p << " outside [" << (1.0 - 3.0 * eps) / d << ", "
                << (1.0 + 3.0 * eps) / d << "]";
            out.reason = msg.str();
        }
    }
    return out;
}

}  // namespace

std::vector<ConditionedOutcome> measure_first_factor(const CMatrix &u, const CVector &x, Index d, Index dprime) {
    check_shapes(u, d, dprime);
    check_unit(x, d * dprime);
    CVector y = u * x;
    std::vector<ConditionedOutcome> out;
    out.reserve(static_cast<size_t>(d));
    for (Index v = 0; v < d; v++) {
        ConditionedOutcome o;
        o.outcome = v;
        auto block = y.segment(v * dprime, dprime);
        o.probability = block.squaredNorm();
        o.state = CVector::Zero(d * dprime);
        if (o.probability > kDegenerateProbability) {
            o.state.segment(v * dprime, dprime) = block / std::sqrt(o.probability);
        } else {
            o.degenerate = true;
        }
        out.push_back(std::move(o));
    }
    return out;
}

nlohmann::json to_json(const GoodnessDecision &d) {
    nlohmann::json j{{"good", d.good},
                     {"worst_outcome", d.worst_outcome},
                     {"worst_probability", d.worst_probability},
                     {"worst_overlap", d.worst_overlap}};
    if (d.worst_pair_first >= 0) {
        j["worst_pair"] = {d.worst_pair_first, d.worst_pair_second};
    }
    if (!d.reason.empty()) {
        j["reason"] = d.reason;
    }
    return j;
}

GoodnessDecision is_good_for_vector(const CMatrix &u, const CVector &x, Index d, Index dprime, double eps) {
    check_shapes(u, d, dprime);
    check_unit(x, d * dprime);
    return vector_decision(u * x, d, dprime, eps);
}

GoodnessDecision is_good_for_set(const CMatrix &u, const std::vector<CVector> &xs, Index d, Index dprime, double eps) {
    check_shapes(u, d, dprime);
    const Index n = d * dprime;
    const Index m = static_cast<Index>(xs.size());
    if (m == 0) {
        throw DomainError("is_good_for_set: empty vector set");
    }
    CMatrix x(n, m);
    for (Index i = 0; i < m; i++) {
        check_unit(xs[static_cast<size_t>(i)], n);
        x.col(i) = xs[static_cast<size_t>(i)];
    }
    CMatrix gram = x.adjoint() * x;
    double offdiag = (gram - CMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
    if (offdiag > 1e-8) {
        throw DomainError("is_good_for_set: vectors are not orthonormal (max defect " + std::to_string(offdiag) + ")");
    }

    CMatrix y = u * x;
    GoodnessDecision out;
    double worst_gap = -1.0;
    for (Index i = 0; i < m; i++) {
        GoodnessDecision single = vector_decision(y.col(i), d, dprime, eps);
        double gap = std::abs(single.worst_probability - 1.0 / static_cast<double>(d));
        if (gap > worst_gap) {
            worst_gap = gap;
            out.worst_outcome = single.worst_outcome;
            out.worst_probability = single.worst_probability;
        }
        if (!single.good && out.good) {
            out.good = false;
            out.reason = "vector " + std::to_string(i) + ": " + single.reason;
        }
    }

    const double limit = 8.0 * eps;
    for (Index v = 0; v < d; v++) {
        CMatrix block = y.middleRows(v * dprime, dprime);
        for (Index i = 0; i < m; i++) {
            double norm = block.col(i).norm();
            if (norm * norm > kDegenerateProbability) {
                block.col(i) /= norm;
            } else {
                block.col(i).setZero();
            }
        }
        CMatrix overlaps = block.adjoint() * block;
        for (Index j = 0; j < m; j++) {
            for (Index i = 0; i < j; i++) {
                double value = std::abs(overlaps(i, j));
                if (value > out.worst_overlap) {
                    out.worst_overlap = value;
                    out.worst_pair_first = i;
                    out.worst_pair_second = j;
                }
                if (value > limit + kSlack && out.good) {
                    out.good = false;
                    std::ostringstream msg;
                    msg << "vectors " << i << " and " << j << " overlap " << value << " > " << limit
                        << " after outcome " << v;
                    out.reason = msg.str();
                }
            }
        }
    }
    return out;
}

nlohmann::json to_json(const TupleDecision &d) {
    nlohmann::json j{{"good", d.good},
                     {"coverage", d.coverage},
                     {"branches_checked", d.branches_checked},
                     {"branches_total", d.branches_total},
                     {"failing_stage", d.failing_stage}};
    if (!d.reason.empty()) {
        j["reason"] = d.reason;
    }
    return j;
}

namespace {

// Walks the branch (x0, i_1, ..., i_{k-1}) and checks the vector condition of
// U_j on x_{j-1} for j = 2..k. Returns the failing stage, or 0.
int check_branch(const std::vector<CMatrix> &us, Index d, Index dprime, double eps, Index x0,
                 const std::vector<Index> &path, std::string &reason) {
    const Index n = d * dprime;
    CVector x = CVector::Zero(n);
    x(x0) = 1.0;
    for (size_t stage = 1; stage < us.size(); stage++) {
        CVector y = us[stage - 1] * x;
        Index outcome = path[stage - 1];
        auto block = y.segment(outcome * dprime, dprime);
        double p = block.squaredNorm();
        if (p <= kDegenerateProbability) {
            return 0;
        }
        CVector next = CVector::Zero(n);
        next.segment(outcome * dprime, dprime) = block / std::sqrt(p);
        x = std::move(next);
        GoodnessDecision dec = vector_decision(us[stage] * x, d, dprime, eps);
        if (!dec.good) {
            std::ostringstream msg;
            msg << "stage " << stage + 1 << " from basis vector " << x0 << " via outcomes (";
            for (size_t a = 0; a < stage; a++) {
                msg << (a ? "," : "") << path[a];
            }
            msg << "): " << dec.reason;
            reason = msg.str();
            return static_cast<int>(stage + 1);
        }
    }
    return 0;
}

std::vector<std::uint64_t> sample_without_replacement(std::uint64_t total, std::uint64_t count, std::uint64_t seed) {
    SeededRng rng(seed, 0x65707367);
    std::unordered_map<std::uint64_t, std::uint64_t> swapped;
    auto at = [&](std::uint64_t i) {
        auto it = swapped.find(i);
        return it == swapped.end() ? i : it->second;
    };
    std::vector<std::uint64_t> out;
    out.reserve(static_cast<size_t>(count));
    for (std::uint64_t i = 0; i < count; i++) {
        std::uint64_t j = i + rng.below(total - i);
        std::uint64_t vi = at(i);
        std::uint64_t vj = at(j);
        swapped[j] = vi;
        swapped[i] = vj;
        out.push_back(vj);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TupleDecision is_tuple_good(const std::vector<CMatrix> &us, Index d, Index dprime, double eps, const TupleMode &mode) {
    if (us.empty()) {
        throw DomainError("is_tuple_good: empty tuple");
    }
    for (const auto &u : us) {
        check_shapes(u, d, dprime);
    }
    const Index n = d * dprime;
    const int k = static_cast<int>(us.size());

    double total_real = static_cast<double>(n) * std::pow(static_cast<double>(d), k - 1);
    if (total_real > 9.0e18) {
        throw SizeLimitError("is_tuple_good: branch count overflows");
    }
    std::uint64_t paths = 1;
    for (int j = 1; j < k; j++) {
        paths *= static_cast<std::uint64_t>(d);
    }
    const std::uint64_t total = static_cast<std::uint64_t>(n) * paths;

    TupleDecision out;
    out.branches_total = total;

    std::vector<std::uint64_t> leaves;
    if (mode.kind == TupleMode::Kind::Exhaustive) {
        if (total > kMaxExhaustiveBranches) {
            throw PreconditionError("is_tuple_good: exhaustive enumeration needs " + std::to_string(total) +
                                    " branches (limit " + std::to_string(kMaxExhaustiveBranches) +
                                    "); use sampled mode");
        }
    } else if (mode.budget < total) {
        leaves = sample_without_replacement(total, mode.budget, mode.seed);
    }
    const bool all = leaves.empty() && (mode.kind == TupleMode::Kind::Exhaustive || mode.budget >= total);

    std::vector<CVector> basis;
    basis.reserve(static_cast<size_t>(n));
    for (Index i = 0; i < n; i++) {
        CVector e = CVector::Zero(n);
        e(i) = 1.0;
        basis.push_back(std::move(e));
    }
    GoodnessDecision first = is_good_for_set(us[0], basis, d, dprime, eps);
    if (!first.good) {
        out.good = false;
        out.failing_stage = 1;
        out.reason = "stage 1: " + first.reason;
    }

    std::vector<Index> path(static_cast<size_t>(std::max(k - 1, 0)));
    auto visit = [&](std::uint64_t leaf) {
        Index x0 = static_cast<Index>(leaf / paths);
        std::uint64_t rest = leaf % paths;
        for (int a = k - 2; a >= 0; a--) {
            path[static_cast<size_t>(a)] = static_cast<Index>(rest % static_cast<std::uint64_t>(d));
            rest /= static_cast<std::uint64_t>(d);
        }
        std::string reason;
        int stage = check_branch(us, d, dprime, eps, x0, path, reason);
        out.branches_checked++;
        if (stage != 0 && out.good) {
            out.good = false;
            out.failing_stage = stage;
            out.reason = reason;
        }
    };
    if (all) {
        for (std::uint64_t leaf = 0; leaf < total; leaf++) {
            visit(leaf);
        }
    } else {
        for (std::uint64_t leaf : leaves) {
            visit(leaf);
        }
    }
    out.coverage = static_cast<double>(out.branches_checked) / static_cast<double>(total);
    return out;
}

double epsgood_failure_bound(int k, double s, double d, double dprime, double eps) {
    double base = std::pow(s, k + 1) * std::pow(d, k + 2) * dprime;
    return 4.0 * base * base * std::exp(-eps * eps * dprime / 16.0);
}

DprimeThreshold dprime_threshold(double s, double d, int k, double eps, LogBase base) {
    auto lg = [base](double v) { return base == LogBase::Natural ? std::log(v) : std::log2(v); };
    DprimeThreshold out;
    out.value = 30.0 * lg(s) * (lg(s) + lg(d)) * std::pow(d, 2 * k + 1) / (eps * eps);
    if (s < 4) {
        out.flags.emplace_back("s < 4");
    }
    if (d < 100) {
        out.flags.emplace_back("d < 100");
    }
    return out;
}

}  // namespace qtpe
