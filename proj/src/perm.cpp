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

#include "qtpe/perm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qtpe/error.hpp"

namespace qtpe {

Permutation::Permutation(std::vector<int> map) : map_(std::move(map)) {
    std::vector<bool> seen(map_.size(), false);
    for (int v : map_) {
        if (v < 0 || static_cast<size_t>(v) >= map_.size() || seen[static_cast<size_t>(v)]) {
            throw DomainError("not a permutation: " + str());
        }
        seen[static_cast<size_t>(v)] = true;
    }
}

Permutation Permutation::identity(int t) {
    std::vector<int> m(static_cast<size_t>(t));
    std::iota(m.begin(), m.end(), 0);
    return Permutation(std::move(m));
}

Permutation Permutation::compose(const Permutation &other) const {
    if (other.size() != size()) {
        throw DomainError("cannot compose permutations of different degree");
    }
    std::vector<int> m(map_.size());
    for (size_t a = 0; a < m.size(); a++) {
        m[a] = map_[static_cast<size_t>(other.map_[a])];
    }
    return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
    std::vector<int> m(map_.size());
    for (size_t a = 0; a < m.size(); a++) {
        m[static_cast<size_t>(map_[a])] = static_cast<int>(a);
    }
    return Permutation(std::move(m));
}

int Permutation::cycle_count() const noexcept {
    std::vector<bool> seen(map_.size(), false);
    int cycles = 0;
    for (size_t a = 0; a < map_.size(); a++) {
        if (seen[a]) {
            continue;
        }
        cycles++;
        for (size_t b = a; !seen[b]; b = static_cast<size_t>(map_[b])) {
            seen[b] = true;
        }
    }
    return cycles;
}

int Permutation::fixed_point_count() const noexcept {
    int f = 0;
    for (size_t a = 0; a < map_.size(); a++) {
        f += map_[a] == static_cast<int>(a);
    }
    return f;
}

std::string Permutation::str() const {
    std::ostringstream out;
    out << '(';
    for (size_t a = 0; a < map_.size(); a++) {
        out << (a ? " " : "") << map_[a];
    }
    out << ')';
    return out.str();
}

std::vector<Permutation> all_permutations(int t) {
    if (t < 1 || t > kMaxPermutationDegree) {
        throw SizeLimitError("all_permutations: t must lie in [1, 8], got " + std::to_string(t));
    }
    std::vector<int> m(static_cast<size_t>(t));
    std::iota(m.begin(), m.end(), 0);
    std::vector<Permutation> out;
    do {
        out.emplace_back(m);
    } while (std::next_permutation(m.begin(), m.end()));
    return out;
}

std::uint64_t stirling_first(int t, int k) {
    if (t < 1 || t > 20 || k < 1 || k > t) {
        throw DomainError("stirling_first: need 1 <= k <= t <= 20, got t=" + std::to_string(t) +
                          ", k=" + std::to_string(k));
    }
    // row[k] = [[n, k]], advanced by [[n+1, k]] = n [[n, k]] + [[n, k-1]].
    std::vector<std::uint64_t> row(static_cast<size_t>(t) + 1, 0);
    row[1] = 1;
    for (int n = 1; n < t; n++) {
        for (int j = n + 1; j >= 1; j--) {
            row[static_cast<size_t>(j)] =
                static_cast<std::uint64_t>(n) * row[static_cast<size_t>(j)] + row[static_cast<size_t>(j - 1)];
        }
    }
    return row[static_cast<size_t>(k)];
}

std::uint64_t falling_factorial(std::uint64_t d, std::uint64_t t) {
    if (t > d) {
        return 0;
    }
    std::uint64_t r = 1;
    for (std::uint64_t i = 0; i < t; i++) {
        std::uint64_t f = d - i;
        if (r > std::numeric_limits<std::uint64_t>::max() / f) {
            throw DomainError("falling_factorial overflows 64 bits");
        }
        r *= f;
    }
    return r;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    unsigned __int128 r = 1;
    for (std::uint64_t i = 1; i <= k; i++) {
        r = r * (n - k + i) / i;
        if (r > std::numeric_limits<std::uint64_t>::max()) {
            throw DomainError("binomial overflows 64 bits");
        }
    }
    return static_cast<std::uint64_t>(r);
}

DeficitPair distinct_fraction_deficit(int d, int t) {
    if (t < 1 || d < t) {
        throw DomainError("distinct_fraction_deficit: need d >= t >= 1");
    }
    // (d)_t / d^t as the product of (1 - i/d); avoids overflow of d^t.
    double ratio = 1.0;
    for (int i = 1; i < t; i++) {
        ratio *= 1.0 - static_cast<double>(i) / d;
    }
    return {1.0 - ratio, static_cast<double>(t) * (t - 1) / (2.0 * d)};
}

namespace {

template <typename EntryFn>
Eigen::MatrixXd permutation_indexed(int t, EntryFn entry) {
    auto perms = all_permutations(t);
    auto n = static_cast<Eigen::Index>(perms.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; i++) {
        auto inv = perms[static_cast<size_t>(i)].inverse();
        for (Eigen::Index j = 0; j < n; j++) {
            if (i != j) {
                m(i, j) = entry(inv.compose(perms[static_cast<size_t>(j)]));
            }
        }
    }
    return m;
}

}  // namespace

Eigen::MatrixXd cycle_gram_matrix(int t, int d) {
    if (t < 1 || static_cast<long long>(d) <= static_cast<long long>(t) * t) {
        throw PreconditionError("cycle_gram_matrix: requires d > t^2 (t=" + std::to_string(t) +
                                ", d=" + std::to_string(d) + ")");
    }
    return permutation_indexed(t, [&](const Permutation &p) {
        return std::pow(static_cast<double>(d), p.cycle_count() - t);
    });
}

Eigen::MatrixXd fixed_point_matrix(int t, double eps) {
    if (t < 1 || !(eps > 0.0) || !(eps < 1.0 / (2.0 * t))) {
        throw PreconditionError("fixed_point_matrix: requires 0 < eps < 1/(2t)");
    }
    return permutation_indexed(t, [&](const Permutation &p) { return std::pow(eps, t - p.fixed_point_count()); });
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd &m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

double symmetric_spectral_norm(const Eigen::MatrixXd &m) {
    if (m.size() == 0) {
        return 0.0;
    }
    return symmetric_eigenvalues(m).cwiseAbs().maxCoeff();
}

}  // namespace qtpe
