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

#ifndef QTPE_PERM_HPP
#define QTPE_PERM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qtpe {

/// Bijection of {0, ..., t-1} in one-line notation: position a holds sigma(a).
class Permutation {
   public:
    /// Throws DomainError unless `map` is a bijection of {0, ..., map.size()-1}.
    explicit Permutation(std::vector<int> map);

    static Permutation identity(int t);

    int size() const noexcept { return static_cast<int>(map_.size()); }
    int operator[](int a) const { return map_[static_cast<size_t>(a)]; }
    std::span<const int> map() const noexcept { return map_; }

    /// (this o other)(a) = this(other(a)).
    Permutation compose(const Permutation &other) const;
    Permutation inverse() const;

    /// Number of cycles, fixed points counted as 1-cycles.
    int cycle_count() const noexcept;
    int fixed_point_count() const noexcept;

    std::string str() const;

    bool operator==(const Permutation &other) const = default;
    auto operator<=>(const Permutation &other) const = default;

   private:
    std::vector<int> map_;
};

inline int cycle_count(const Permutation &p) { return p.cycle_count(); }
inline int fixed_point_count(const Permutation &p) { return p.fixed_point_count(); }

constexpr int kMaxPermutationDegree = 8;

/// All t! permutations of [t] in lexicographic order of one-line notation.
/// This ordering indexes every t!-sized matrix and basis in the library.
/// Throws SizeLimitError unless 1 <= t <= 8.
std::vector<Permutation> all_permutations(int t);

/// Unsigned Stirling number of the first kind: permutations of [t] with k cycles.
/// Requires 1 <= k <= t <= 20.
std::uint64_t stirling_first(int t, int k);

/// (d)_t = d (d-1) ... (d-t+1); 1 for t = 0 and 0 for t > d.
/// Throws DomainError on uint64 overflow.
std::uint64_t falling_factorial(std::uint64_t d, std::uint64_t t);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

struct DeficitPair {
    double exact;  ///< 1 - (d)_t / d^t
    double bound;  ///< t(t-1) / (2d)
};

/// Fraction of [d]^t index tuples that are not all distinct, with its bound.
/// Requires d >= t.
DeficitPair distinct_fraction_deficit(int d, int t);

/// M[s][s'] = d^(cycles(s^-1 s') - t) off the diagonal, 0 on it. Requires d > t^2.
Eigen::MatrixXd cycle_gram_matrix(int t, int d);

/// N[s][s'] = eps^(t - fixed(s^-1 s')) off the diagonal, 0 on it. Requires 0 < eps < 1/(2t).
Eigen::MatrixXd fixed_point_matrix(int t, double eps);

/// Eigenvalues (ascending) of a real symmetric matrix.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd &m);

/// Largest absolute eigenvalue of a real symmetric matrix.
double symmetric_spectral_norm(const Eigen::MatrixXd &m);

}  // namespace qtpe

#endif
