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

#ifndef QTPE_EPSGOOD_HPP
#define QTPE_EPSGOOD_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtpe/linalg.hpp"

namespace qtpe {

// Vectors live on V (x) V' = C^d (x) C^d', index v * d' + v'. "Measuring the
// first factor" means reading off v.

struct ConditionedOutcome {
    Index outcome = 0;
    double probability = 0.0;
    /// Normalised post-measurement vector in C^{d d'}; zero when the outcome
    /// has probability <= 1e-12 (see `degenerate`).
    CVector state;
    bool degenerate = false;
};

/// Measures the V factor of u x. Throws DomainError unless ||x|| = 1 within
/// 1e-10 and u, x match d * d'.
std::vector<ConditionedOutcome> measure_first_factor(const CMatrix &u, const CVector &x, Index d, Index dprime);

struct GoodnessDecision {
    bool good = true;
    /// Worst observed case: outcome and its probability (vector checks) or
    /// overlap magnitude (set checks).
    Index worst_outcome = -1;
    double worst_probability = 0.0;
    double worst_overlap = 0.0;
    Index worst_pair_first = -1;
    Index worst_pair_second = -1;
    std::string reason;
};

nlohmann::json to_json(const GoodnessDecision &d);

/// Every outcome probability lies in [(1 - 3 eps)/d, (1 + 3 eps)/d].
GoodnessDecision is_good_for_vector(const CMatrix &u, const CVector &x, Index d, Index dprime, double eps);

/// is_good_for_vector for each x in X, plus |<u x|v, u x'|v>| <= 8 eps for every
/// pair and every outcome v. X must be orthonormal within 1e-8.
GoodnessDecision is_good_for_set(const CMatrix &u, const std::vector<CVector> &xs, Index d, Index dprime, double eps);

struct TupleMode {
    enum class Kind { Exhaustive, Sampled } kind = Kind::Exhaustive;
    std::uint64_t budget = 0;
    std::uint64_t seed = 0;

    static TupleMode exhaustive() { return {}; }
    static TupleMode sampled(std::uint64_t budget, std::uint64_t seed) { return {Kind::Sampled, budget, seed}; }
};

struct TupleDecision {
    bool good = true;
    /// Fraction of (x0, outcome path) branches visited.
    double coverage = 1.0;
    std::uint64_t branches_checked = 0;
    std::uint64_t branches_total = 0;
    /// Stage (1-based) where goodness failed, 0 if none.
    int failing_stage = 0;
    std::string reason;
};

nlohmann::json to_json(const TupleDecision &d);

constexpr std::uint64_t kMaxExhaustiveBranches = 100'000;

/// Inductive eps-goodness of the tuple (U_k, ..., U_1) with us[0] = U_1:
/// U_1 must be good for the set of all computational basis vectors, and each
/// U_j must be good for every x_{j-1} reachable from a basis vector x_0 along
/// an outcome path, where x_j = U_j x_{j-1} | e_{i_j}. Zero-probability
/// branches are skipped. Exhaustive mode visits all d^{k-1} d d' branches
/// (at most 1e5); sampled mode visits `budget` distinct branches drawn
/// uniformly without replacement.
TupleDecision is_tuple_good(const std::vector<CMatrix> &us, Index d, Index dprime, double eps,
                            const TupleMode &mode = TupleMode::exhaustive());

/// 4 (s^{k+1} d^{k+2} d')^2 exp(-eps^2 d' / 16).
double epsgood_failure_bound(int k, double s, double d, double dprime, double eps);

enum class LogBase { Natural, Two };

struct DprimeThreshold {
    double value = 0.0;
    std::vector<std::string> flags;
};

/// 30 log s (log s + log d) d^{2k+1} / eps^2; flags s < 4 and d < 100.
DprimeThreshold dprime_threshold(double s, double d, int k, double eps, LogBase base = LogBase::Natural);

}  // namespace qtpe

#endif
