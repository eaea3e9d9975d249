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

#ifndef QTPE_ZIGZAG_HPP
#define QTPE_ZIGZAG_HPP

#include <string>
#include <vector>

#include "json.hpp"
#include "qtpe/ensemble.hpp"

namespace qtpe {

enum class ZigzagKind { Zigzag, Derandomised, Generalised };

std::string_view to_string(ZigzagKind k);
ZigzagKind zigzag_kind_from_string(std::string_view s);

/// The routing unitary on C^D (x) C^d for an outer ensemble G = {U_b} of
/// degree d: e_a (x) e_b -> (U_b e_a) (x) e_{-b}. The involution of G is used
/// when attached, the identity otherwise.
CMatrix g_dot(const UnitaryEnsemble &g);

/// {(1 (x) V_i) Gdot (1 (x) V_j)} in row-major (i, j) order. When both inputs
/// are explicitly Hermitian the result carries -(i, j) = (-j, -i).
/// Requires dim(h) == degree(g).
UnitaryEnsemble zigzag(const UnitaryEnsemble &g, const UnitaryEnsemble &h);

/// {(1 (x) V_i)(1 (x) V_j^dagger) Gdot (1 (x) V_j)(1 (x) V_k)} in (i, j, k)
/// order. Both inputs must be explicitly Hermitian; the result carries the
/// involution (i, j, k) -> (-k, j, -i).
UnitaryEnsemble zigzag_derandomised(const UnitaryEnsemble &g, const UnitaryEnsemble &h);

/// e_a (x) e_b (x) e_b' -> (U_b e_a) (x) e_b (x) e_b' on C^D (x) C^d (x) C^d'.
/// No involution is applied to b. Requires degree(g) == d.
CMatrix g_dot_general(const UnitaryEnsemble &g, Index d, Index dprime);

/// Generalised product for inner ensembles h_list = (H_1, ..., H_k) on
/// C^{d d'}: members (1 (x) V_{i_k}(k)) Gdot ... Gdot (1 (x) V_{i_1}(1)) with
/// k-1 interleaved copies of Gdot, ordered lexicographically in
/// (i_k, ..., i_1). No involution. Requires s^k <= 4096.
UnitaryEnsemble zigzag_generalised(const UnitaryEnsemble &g, const std::vector<UnitaryEnsemble> &h_list,
                                   Index dprime);

struct BoundResult {
    double value = 0.0;
    /// Names of theorem hypotheses that do not hold for these inputs.
    std::vector<std::string> flags;
    bool vacuous() const noexcept { return value >= 1.0; }
};

nlohmann::json to_json(const BoundResult &b);

/// l1 + l2 + l2^2 + 24 (t(t-1)/d)^{1/4}; flags d < 10 t^2.
BoundResult bound_zigzag(double l1, double l2, int t, double d);

enum class ImprovedVariant { AsPrinted, Squared };

/// 1/2 (1 - m2^2) m1 + 1/2 sqrt(X + 4 m2^2) + 2 (t(t-1)/d)^{1/4} with
/// m1 = l1 + 9 sqrt(t(t-1)/d), m2 = l2 + 2 (t(t-1)/d)^{1/4}, and
/// X = (1 - m2^2) m1^2 as printed or ((1 - m2^2) m1)^2 for the squared variant.
BoundResult bound_zigzag_improved(double l1, double l2, int t, double d, ImprovedVariant variant);

/// m1 + 2 m2^2 + 2 (t(t-1)/d)^{1/4}.
BoundResult bound_zigzag_derandomised(double l1, double l2, int t, double d);

struct GenZigzagBound {
    BoundResult bound;
    double dprime_threshold = 0.0;
    bool dprime_sufficient = false;
};

/// 8 (l1 + 7 eps) + l2^{k-1} + l2^k + 47 (t(t-1)/(d d'))^{1/4}, together with
/// the d' size threshold needed for eps-goodness. Flags s < 4, k > ln s,
/// d d' < 10 t^2, eps >= 1e-2, and k = 1.
GenZigzagBound bound_genzigzag(double l1, double l2, int k, int t, double d, double dprime, double eps, double s);

}  // namespace qtpe

#endif
