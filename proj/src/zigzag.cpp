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

#include "qtpe/zigzag.hpp"

#include <cmath>
#include <sstream>

#include "qtpe/epsgood.hpp"
#include "qtpe/error.hpp"

namespace qtpe {

std::string_view to_string(ZigzagKind k) {
    switch (k) {
        case ZigzagKind::Zigzag:
            return "zigzag";
        case ZigzagKind::Derandomised:
            return "derandomised";
        case ZigzagKind::Generalised:
            return "generalised";
    }
    return "unknown";
}

ZigzagKind zigzag_kind_from_string(std::string_view s) {
    if (s == "zigzag") return ZigzagKind::Zigzag;
    if (s == "derandomised" || s == "derandomized") return ZigzagKind::Derandomised;
    if (s == "generalised" || s == "generalized") return ZigzagKind::Generalised;
    throw DomainError("unknown zigzag kind '" + std::string(s) + "'");
}

namespace {

void require_compatible(const UnitaryEnsemble &g, const UnitaryEnsemble &h) {
    if (h.dim() != g.size()) {
        throw DomainError("zigzag: inner ensemble dimension " + std::to_string(h.dim()) +
                          " must equal outer ensemble degree " + std::to_string(g.size()));
    }
}

CMatrix lift(Index outer, const CMatrix &v) { return kron(CMatrix::Identity(outer, outer), v); }

}  // namespace

CMatrix g_dot(const UnitaryEnsemble &g) {
    const Index big = g.dim();
    const Index d = g.size();
    checked_pow(big * d, 2);
    CMatrix out = CMatrix::Zero(big * d, big * d);
    const auto &inv = g.involution();
    for (Index b = 0; b < d; b++) {
        Index target = inv ? (*inv)[static_cast<size_t>(b)] : b;
        const CMatrix &u = g[b];
        for (Index a = 0; a < big; a++) {
            for (Index a2 = 0; a2 < big; a2++) {
                out(a2 * d + target, a * d + b) = u(a2, a);
            }
        }
    }
    return out;
}

UnitaryEnsemble zigzag(const UnitaryEnsemble &g, const UnitaryEnsemble &h) {
    require_compatible(g, h);
    const Index s = h.size();
    if (s * s > kMaxEnsembleSize) {
        throw SizeLimitError("zigzag: s^2 = " + std::to_string(s * s) + " exceeds " + std::to_string(kMaxEnsembleSize));
    }
    CMatrix gdot = g_dot(g);
    std::vector<CMatrix> lifted;
    for (Index i = 0; i < s; i++) {
        lifted.push_back(lift(g.dim(), h[i]));
    }
    std::vector<CMatrix> members;
    members.reserve(static_cast<size_t>(s * s));
    for (Index i = 0; i < s; i++) {
        CMatrix left = lifted[static_cast<size_t>(i)] * gdot;
        for (Index j = 0; j < s; j++) {
            members.emplace_back(left * lifted[static_cast<size_t>(j)]);
        }
    }
    std::optional<std::vector<int>> inv;
    if (g.explicitly_hermitian() && h.explicitly_hermitian()) {
        const auto &hi = *h.involution();
        inv.emplace(static_cast<size_t>(s * s));
        for (Index i = 0; i < s; i++) {
            for (Index j = 0; j < s; j++) {
                (*inv)[static_cast<size_t>(i * s + j)] = hi[static_cast<size_t>(j)] * static_cast<int>(s) +
                                                         hi[static_cast<size_t>(i)];
            }
        }
    }
    return UnitaryEnsemble(std::move(members), std::move(inv), "zigzag(" + g.label() + "," + h.label() + ")");
}

UnitaryEnsemble zigzag_derandomised(const UnitaryEnsemble &g, const UnitaryEnsemble &h) {
    require_compatible(g, h);
    if (!g.explicitly_hermitian() || !h.explicitly_hermitian()) {
        throw DomainError("zigzag_derandomised: both ensembles must be explicitly Hermitian");
    }
    const Index s = h.size();
    if (s * s * s > kMaxEnsembleSize) {
        throw SizeLimitError("zigzag_derandomised: s^3 = " + std::to_string(s * s * s) + " exceeds " +
                             std::to_string(kMaxEnsembleSize));
    }
    CMatrix gdot = g_dot(g);
    std::vector<CMatrix> lifted;
    std::vector<CMatrix> middle;
    for (Index j = 0; j < s; j++) {
        lifted.push_back(lift(g.dim(), h[j]));
    }
    for (Index j = 0; j < s; j++) {
        const CMatrix &vj = lifted[static_cast<size_t>(j)];
        middle.emplace_back(vj.adjoint() * gdot * vj);
    }
    std::vector<CMatrix> members;
    members.reserve(static_cast<size_t>(s * s * s));
    for (Index i = 0; i < s; i++) {
        for (Index j = 0; j < s; j++) {
            CMatrix left = lifted[static_cast<size_t>(i)] * middle[static_cast<size_t>(j)];
            for (Index k = 0; k < s; k++) {
                members.emplace_back(left * lifted[static_cast<size_t>(k)]);
            }
        }
    }
    const auto &hi = *h.involution();
    std::vector<int> inv(static_cast<size_t>(s * s * s));
    for (Index i = 0; i < s; i++) {
        for (Index j = 0; j < s; j++) {
            for (Index k = 0; k < s; k++) {
                Index target = (hi[static_cast<size_t>(k)] * s + j) * s + hi[static_cast<size_t>(i)];
                inv[static_cast<size_t>((i * s + j) * s + k)] = static_cast<int>(target);
            }
        }
    }
    return UnitaryEnsemble(std::move(members), std::move(inv),
                           "zigzag-derandomised(" + g.label() + "," + h.label() + ")");
}

CMatrix g_dot_general(const UnitaryEnsemble &g, Index d, Index dprime) {
    if (g.size() != d) {
        throw DomainError("g_dot_general: outer ensemble degree " + std::to_string(g.size()) + " must equal d = " +
                          std::to_string(d));
    }
    if (dprime < 1) {
        throw DomainError("g_dot_general: d' must be positive");
    }
    const Index big = g.dim();
    const Index inner = d * dprime;
    checked_pow(big * inner, 2);
    CMatrix out = CMatrix::Zero(big * inner, big * inner);
    for (Index b = 0; b < d; b++) {
        const CMatrix &u = g[b];
        for (Index bp = 0; bp < dprime; bp++) {
            Index c = b * dprime + bp;
            for (Index a = 0; a < big; a++) {
                for (Index a2 = 0; a2 < big; a2++) {
                    out(a2 * inner + c, a * inner + c) = u(a2, a);
                }
            }
        }
    }
    return out;
}

UnitaryEnsemble zigzag_generalised(const UnitaryEnsemble &g, const std::vector<UnitaryEnsemble> &h_list,
                                   Index dprime) {
    if (h_list.empty()) {
        throw DomainError("zigzag_generalised: need at least one inner ensemble");
    }
    const Index d = g.size();
    const Index inner = d * dprime;
    const Index s = h_list.front().size();
    for (size_t j = 0; j < h_list.size(); j++) {
        if (h_list[j].dim() != inner) {
            throw DomainError("zigzag_generalised: inner ensemble " + std::to_string(j + 1) + " has dimension " +
                              std::to_string(h_list[j].dim()) + ", expected d*d' = " + std::to_string(inner));
        }
        if (h_list[j].size() != s) {
            throw DomainError("zigzag_generalised: inner ensemble " + std::to_string(j + 1) + " has degree " +
                              std::to_string(h_list[j].size()) + ", expected " + std::to_string(s));
        }
    }
    const int k = static_cast<int>(h_list.size());
    Index total = checked_pow(s, k, kMaxEnsembleSize);
    CMatrix gdot = g_dot_general(g, d, dprime);
    std::vector<std::vector<CMatrix>> lifted(h_list.size());
    for (size_t j = 0; j < h_list.size(); j++) {
        for (Index i = 0; i < s; i++) {
            lifted[j].push_back(lift(g.dim(), h_list[j][i]));
        }
    }
    std::vector<CMatrix> members;
    members.reserve(static_cast<size_t>(total));
    std::vector<Index> word(static_cast<size_t>(k));  // word[0] = i_k, ..., word[k-1] = i_1
    for (Index m = 0; m < total; m++) {
        Index rest = m;
        for (int p = k - 1; p >= 0; p--) {
            word[static_cast<size_t>(p)] = rest % s;
            rest /= s;
        }
        CMatrix acc = lifted[static_cast<size_t>(k - 1)][static_cast<size_t>(word[0])];
        for (int stage = k - 2; stage >= 0; stage--) {
            acc = acc * gdot;
            acc = acc * lifted[static_cast<size_t>(stage)][static_cast<size_t>(word[static_cast<size_t>(k - 1 - stage)])];
        }
        members.push_back(std::move(acc));
    }
    std::ostringstream label;
    label << "zigzag-generalised(" << g.label() << ",k=" << k << ",d'=" << dprime << ")";
    return UnitaryEnsemble(std::move(members), std::nullopt, label.str());
}

nlohmann::json to_json(const BoundResult &b) {
    return nlohmann::json{{"value", b.value}, {"vacuous", b.vacuous()}, {"flags", b.flags}};
}

namespace {

double closeness_ratio(int t, double d) { return static_cast<double>(t) * (t - 1) / d; }

}  // namespace

BoundResult bound_zigzag(double l1, double l2, int t, double d) {
    BoundResult r;
    r.value = l1 + l2 + l2 * l2 + 24.0 * std::pow(closeness_ratio(t, d), 0.25);
    if (d < 10.0 * t * t) {
        r.flags.emplace_back("d < 10 t^2");
    }
    return r;
}

BoundResult bound_zigzag_improved(double l1, double l2, int t, double d, ImprovedVariant variant) {
    double ratio = closeness_ratio(t, d);
    double m1 = l1 + 9.0 * std::sqrt(ratio);
    double m2 = l2 + 2.0 * std::pow(ratio, 0.25);
    double shrink = 1.0 - m2 * m2;
    double inside = variant == ImprovedVariant::AsPrinted ? shrink * m1 * m1 : (shrink * m1) * (shrink * m1);
    BoundResult r;
    r.value = 0.5 * shrink * m1 + 0.5 * std::sqrt(inside + 4.0 * m2 * m2) + 2.0 * std::pow(ratio, 0.25);
    if (d < 10.0 * t * t) {
        r.flags.emplace_back("d < 10 t^2");
    }
    if (inside + 4.0 * m2 * m2 < 0.0) {
        r.flags.emplace_back("negative radicand");
    }
    return r;
}

BoundResult bound_zigzag_derandomised(double l1, double l2, int t, double d) {
    double ratio = closeness_ratio(t, d);
    double m1 = l1 + 9.0 * std::sqrt(ratio);
    double m2 = l2 + 2.0 * std::pow(ratio, 0.25);
    BoundResult r;
    r.value = m1 + 2.0 * m2 * m2 + 2.0 * std::pow(ratio, 0.25);
    if (d < 10.0 * t * t) {
        r.flags.emplace_back("d < 10 t^2");
    }
    return r;
}

GenZigzagBound bound_genzigzag(double l1, double l2, int k, int t, double d, double dprime, double eps, double s) {
    GenZigzagBound out;
    double ratio = closeness_ratio(t, d * dprime);
    out.bound.value =
        8.0 * (l1 + 7.0 * eps) + std::pow(l2, k - 1) + std::pow(l2, k) + 47.0 * std::pow(ratio, 0.25);
    auto &flags = out.bound.flags;
    if (k == 1) {
        flags.emplace_back("k = 1: l2^(k-1) term equals 1");
    }
    if (s < 4) {
        flags.emplace_back("s < 4");
    }
    if (k > std::log(s)) {
        flags.emplace_back("k > log s");
    }
    if (d * dprime < 10.0 * t * t) {
        flags.emplace_back("d d' < 10 t^2");
    }
    if (eps >= 1e-2) {
        flags.emplace_back("eps >= 1e-2");
    }
    auto threshold = dprime_threshold(s, d, k, eps);
    out.dprime_threshold = threshold.value;
    out.dprime_sufficient = dprime >= threshold.value;
    if (!out.dprime_sufficient) {
        flags.emplace_back("d' below eps-good threshold");
    }
    return out;
}

}  // namespace qtpe
