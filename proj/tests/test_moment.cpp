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


#include <cmath>

#include "doctest.h"
#include "qtpe/error.hpp"
#include "qtpe/moment.hpp"

using namespace qtpe;

namespace {

CMatrix pauli(int k) {
    CMatrix m(2, 2);
    switch (k) {
        case 0:
            m << 1, 0, 0, 1;
            break;
        case 1:
            m << 0, 1, 1, 0;
            break;
        case 2:
            m << 0, cd(0, -1), cd(0, 1), 0;
            break;
        default:
            m << 1, 0, 0, -1;
    }
    return m;
}

UnitaryEnsemble pauli_ensemble() { return UnitaryEnsemble({pauli(0), pauli(1), pauli(2), pauli(3)}, std::nullopt, "pauli"); }

UnitaryEnsemble haar_ensemble(Index d, Index s, std::uint64_t seed) {
    SeededRng rng(seed);
    std::vector<CMatrix> us;
    for (Index i = 0; i < s; i++) {
        us.push_back(haar_unitary(d, rng));
    }
    return UnitaryEnsemble(std::move(us));
}

CMatrix random_matrix(Index n, SeededRng &rng) {
    CMatrix m(n, n);
    for (Index i = 0; i < n; i++) {
        for (Index j = 0; j < n; j++) {
            m(i, j) = rng.complex_normal();
        }
    }
    return m;
}

double hs(const CMatrix &a, const CMatrix &b) { return std::abs((a.adjoint() * b).trace()); }

}  // namespace

TEST_CASE("shuffle operator conventions") {
    CHECK((shuffle_operator(Permutation::identity(3), 2) - CMatrix::Identity(8, 8)).norm() == 0.0);
    CMatrix swap = CMatrix::Zero(4, 4);
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1.0;
    CHECK((shuffle_operator(Permutation({1, 0}), 2) - swap).norm() == 0.0);
    CMatrix c = shuffle_operator(Permutation({1, 2, 0}), 2);
    CHECK((c * c * c - CMatrix::Identity(8, 8)).norm() == 0.0);
    CHECK((c.adjoint() * c - CMatrix::Identity(8, 8)).norm() == 0.0);
    CHECK((c - CMatrix::Identity(8, 8)).norm() > 1.0);
}

TEST_CASE("alpha matrices") {
    CHECK((alpha_sigma(Permutation::identity(2), 3) - CMatrix::Identity(9, 9) / 3.0).norm() < 1e-15);
    CMatrix id = alpha_sigma(Permutation({0, 1}), 2);
    CMatrix sw = alpha_sigma(Permutation({1, 0}), 2);
    CHECK(id.norm() == doctest::Approx(1.0));
    CHECK(hs(id, sw) == doctest::Approx(0.5));
    SeededRng rng(3);
    CMatrix u2 = kron_power(haar_unitary(2, rng), 2);
    CHECK((u2 * sw - sw * u2).norm() < 1e-12);
    for (int t = 1; t <= 4; t++) {
        auto perms = all_permutations(t);
        for (const auto &p : perms) {
            for (const auto &q : perms) {
                double expected = std::pow(3.0, q.inverse().compose(p).cycle_count() - t);
                CHECK(hs(alpha_sigma(q, 3), alpha_sigma(p, 3)) == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("distinct-index alpha matrices") {
    auto p1 = Permutation::identity(1);
    CHECK((alpha_prime_sigma(p1, 2, 3) - alpha_sigma(p1, 6)).norm() < 1e-15);
    auto sw = Permutation({1, 0});
    CHECK(alpha_prime_sigma(sw, 1, 2).squaredNorm() == doctest::Approx(0.5));
    CHECK(alpha_prime_sigma(Permutation::identity(2), 1, 2).squaredNorm() == doctest::Approx(0.5));
    CHECK(hs(alpha_prime_sigma(sw, 1, 3), alpha_sigma(Permutation::identity(2), 3)) == doctest::Approx(0.0));
    CHECK(hs(alpha_prime_sigma(Permutation::identity(2), 1, 3), alpha_sigma(sw, 3)) == doctest::Approx(0.0));
    CHECK(alpha_prime_sigma(Permutation::identity(3), 1, 4).squaredNorm() == doctest::Approx(24.0 / 64.0));
    // Product structure over C^{D^t} (x) C^{d^t}: ||.||^2 multiplies.
    CHECK(alpha_prime_sigma(sw, 2, 3).squaredNorm() == doctest::Approx(6.0 / 9.0));
    CHECK_THROWS_AS(alpha_prime_sigma(Permutation::identity(3), 2, 2), DomainError);
}

TEST_CASE("fixed space basis") {
    CHECK(FixedSpaceBasis(3, 2).rank() == 2);
    CHECK(FixedSpaceBasis(4, 2).rank() == 2);
    CHECK(FixedSpaceBasis(3, 3).rank() == 6);
    CHECK(FixedSpaceBasis(2, 3).rank() == 5);
    CHECK(FixedSpaceBasis(2, 4).rank() == 14);
    FixedSpaceBasis b1(2, 1);
    CHECK(b1.rank() == 1);
    CHECK(b1.ortho_matrix().cols() == 1);
    CVector v = b1.ortho_vec(0);
    CHECK((unvec(v, 2) * v(0) / std::abs(v(0)) - CMatrix::Identity(2, 2) / std::sqrt(2.0)).norm() < 1e-12);

    for (auto [n, t] : std::vector<std::pair<int, int>>{{2, 2}, {3, 2}, {2, 3}, {3, 3}, {4, 3}, {3, 4}}) {
        FixedSpaceBasis b(n, t);
        CHECK(b.gram_check_error() < 1e-10);
        for (size_t i = 0; i < b.permutations().size(); i++) {
            CHECK(b.alpha_vec(i).norm() == doctest::Approx(1.0));
            for (size_t j = 0; j < b.permutations().size(); j++) {
                double expected = std::pow(static_cast<double>(n),
                                           b.permutations()[i].inverse().compose(b.permutations()[j]).cycle_count() - t);
                CHECK(std::abs(b.gram()(static_cast<Index>(i), static_cast<Index>(j)) - expected) < 1e-10);
            }
        }
        CMatrix q = b.ortho_matrix();
        CHECK((q.adjoint() * q - CMatrix::Identity(b.rank(), b.rank())).norm() < 1e-10);
    }
    CHECK_THROWS(FixedSpaceBasis(2, 7));
}

TEST_CASE("rank of the fixed space equals the count of permutations with short increasing runs") {
    // dim span{alpha_sigma} = number of sigma in S_t with no increasing
    // subsequence longer than n (RSK), checked by brute force for t <= 5.
    auto longest_increasing = [](const Permutation &p) {
        int t = p.size();
        std::vector<int> best(static_cast<size_t>(t), 1);
        int out = 0;
        for (int i = 0; i < t; i++) {
            for (int j = 0; j < i; j++) {
                if (p[j] < p[i]) best[static_cast<size_t>(i)] = std::max(best[static_cast<size_t>(i)], best[static_cast<size_t>(j)] + 1);
            }
            out = std::max(out, best[static_cast<size_t>(i)]);
        }
        return out;
    };
    for (int n = 1; n <= 3; n++) {
        for (int t = 1; t <= 5 && checked_pow(n, 2 * t) <= 100000; t++) {
            Index count = 0;
            for (const auto &p : all_permutations(t)) {
                if (longest_increasing(p) <= n) count++;
            }
            CHECK(FixedSpaceBasis(n, t).rank() == count);
        }
    }
}

TEST_CASE("moment operator application") {
    SeededRng rng(5);
    CMatrix m = random_matrix(4, rng);
    MomentOperator id(UnitaryEnsemble({CMatrix::Identity(2, 2)}), 2);
    CHECK((id.apply(m) - m).norm() < 1e-14);

    MomentOperator pa(pauli_ensemble(), 1);
    CMatrix m2 = random_matrix(2, rng);
    CHECK((pa.apply(m2) - m2.trace() / 2.0 * CMatrix::Identity(2, 2)).norm() < 1e-14);
    CMatrix expected_super = CMatrix::Zero(4, 4);
    expected_super(0, 0) = expected_super(0, 3) = expected_super(3, 0) = expected_super(3, 3) = 0.5;
    CHECK((pa.dense() - expected_super).norm() < 1e-14);

    for (std::uint64_t seed = 0; seed < 5; seed++) {
        auto e = haar_ensemble(2, 3, seed);
        for (int t = 1; t <= 2; t++) {
            MomentOperator phi(e, t);
            CMatrix x = random_matrix(phi.side(), rng);
            CMatrix y = phi.apply(x);
            CHECK(std::abs(y.trace() - x.trace()) < 1e-9);
            CHECK(y.norm() <= x.norm() + 1e-9);
            CHECK((phi.dense() * vec(x) - vec(y)).norm() < 1e-10);
            CMatrix z = random_matrix(phi.side(), rng);
            // <z, Phi(x)> = <Phi^dagger(z), x>
            cd lhs = vec(z).dot(vec(y));
            cd rhs = phi.adjoint_vec(vec(z)).dot(vec(x));
            CHECK(std::abs(lhs - rhs) < 1e-10);
        }
    }
}

TEST_CASE("fixed space is invariant") {
    for (Index n = 2; n <= 3; n++) {
        for (int t = 1; t <= 3; t++) {
            FixedSpaceBasis basis(n, t);
            for (std::uint64_t seed = 0; seed < 3; seed++) {
                MomentOperator phi(haar_ensemble(n, 3, seed), t);
                for (size_t i = 0; i < basis.permutations().size(); i++) {
                    CVector a = basis.alpha_vec(i);
                    CHECK((phi.apply_vec(a) - a).norm() < 1e-9);
                }
            }
        }
    }
}

TEST_CASE("explicitly hermitian ensembles give self-adjoint moment operators") {
    SeededRng rng(6);
    for (int t = 1; t <= 3; t++) {
        auto e = sample_random_qtpe(2, 4, rng);
        MomentOperator phi(e, t);
        CMatrix a = random_matrix(phi.side(), rng);
        CMatrix b = random_matrix(phi.side(), rng);
        cd lhs = vec(a).dot(phi.apply_vec(vec(b)));
        cd rhs = phi.apply_vec(vec(a)).dot(vec(b));
        CHECK(std::abs(lhs - rhs) < 1e-9);
    }
}

TEST_CASE("ideal projection") {
    FixedSpaceBasis basis(2, 2);
    CMatrix a = alpha_sigma(Permutation({1, 0}), 2);
    CHECK((ideal_apply(basis, a) - a).norm() < 1e-12);
    FixedSpaceBasis b1(2, 1);
    CMatrix e12 = CMatrix::Zero(2, 2);
    e12(0, 1) = 1.0;
    CHECK(ideal_apply(b1, e12).norm() < 1e-15);
    SeededRng rng(2);
    for (auto [n, t] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {3, 2}}) {
        FixedSpaceBasis b(n, t);
        CMatrix m = random_matrix(b.side(), rng);
        CMatrix p = ideal_apply(b, m);
        CHECK((ideal_apply(b, p) - p).norm() < 1e-10);
        // Residual is orthogonal to every alpha.
        CVector r = vec(m - p);
        CHECK(b.overlaps(r).norm() < 1e-10);
    }
    // The Haar average of U^{(x)2} M U^dagger{(x)2} is the projection: a
    // large random ensemble approaches it.
    FixedSpaceBasis b(2, 2);
    CMatrix m = random_matrix(4, rng);
    MomentOperator phi(haar_ensemble(2, 4000, 17), 2);
    CHECK((phi.apply(m) - ideal_apply(b, m)).norm() < 0.1 * m.norm());
}

TEST_CASE("lambda on reference ensembles") {
    auto id = UnitaryEnsemble({CMatrix::Identity(2, 2)});
    CHECK(lambda(id, 1).lambda == doctest::Approx(1.0));
    CHECK(lambda(pauli_ensemble(), 1).lambda < 1e-12);
    CHECK(lambda(pauli_ensemble(), 2).lambda == doctest::Approx(1.0));
    auto rep = lambda(pauli_ensemble(), 1);
    CHECK(rep.method == SpectralMethod::DenseSvd);
    CHECK(rep.converged);
    auto j = to_json(rep);
    CHECK(j["schema_version"] == 1);
    CHECK(j["method"] == "dense-svd");
    LambdaOptions opts;
    opts.method = SpectralMethod::Lanczos;
    CHECK(lambda(pauli_ensemble(), 1, opts).lambda < 1e-7);
    CHECK(lambda(pauli_ensemble(), 2, opts).lambda == doctest::Approx(1.0).epsilon(1e-7));
    CHECK_THROWS_AS(lambda(id, 5), SizeLimitError);
}

TEST_CASE("dense and matrix-free lambda agree") {
    SeededRng rng(31);
    std::vector<std::pair<UnitaryEnsemble, int>> cases;
    for (std::uint64_t seed = 0; seed < 4; seed++) {
        cases.emplace_back(haar_ensemble(2, 3, seed), 1);
        cases.emplace_back(haar_ensemble(2, 3, seed), 2);
        cases.emplace_back(haar_ensemble(3, 2, seed), 2);
        cases.emplace_back(sample_random_qtpe(4, 4, rng), 2);
    }
    for (const auto &[e, t] : cases) {
        LambdaOptions dense;
        dense.method = SpectralMethod::DenseSvd;
        double ref = lambda(e, t, dense).lambda;
        CHECK(ref <= 1.0 + 1e-9);
        for (auto method : {SpectralMethod::Lanczos, SpectralMethod::PowerIteration}) {
            LambdaOptions it;
            it.method = method;
            it.tol = 1e-10;
            it.max_iters = 20000;
            auto rep = lambda(e, t, it);
            CHECK(rep.converged);
            CHECK(std::abs(rep.lambda - ref) <= 1e-7);
        }
    }
}

TEST_CASE("powers of a hermitian moment operator") {
    SeededRng rng(8);
    for (int rep = 0; rep < 3; rep++) {
        auto e = sample_random_qtpe(2, 4, rng);
        for (int t = 1; t <= 2; t++) {
            double l = lambda(e, t).lambda;
            MomentOperator phi(e, t);
            FixedSpaceBasis basis(2, t);
            for (int k = 2; k <= 3; k++) {
                LinearMap op;
                op.dim = phi.ambient();
                op.self_adjoint = true;
                op.apply = [&, k](const CVector &v) {
                    CVector w = v;
                    for (int i = 0; i < k; i++) w = phi.apply_vec(w);
                    basis.project_out(w);
                    return w;
                };
                SpectralOptions so;
                so.method = SpectralMethod::DenseSvd;
                SeededRng r(1);
                CHECK(std::abs(spectral_norm(op, so, r).value - std::pow(l, k)) <= 1e-6);
            }
        }
    }
}

TEST_CASE("design error") {
    auto pa = pauli_ensemble();
    for (int k = 1; k <= 3; k++) {
        for (Index i = 0; i < 2; i++) {
            for (Index j = 0; j < 2; j++) {
                CHECK(design_error_monomial(pa, 1, k, {i}, {j}) < 1e-12);
            }
        }
    }
    SeededRng rng(10);
    for (int rep = 0; rep < 3; rep++) {
        auto e = haar_ensemble(2, 3, static_cast<std::uint64_t>(rep));
        for (int t = 1; t <= 2; t++) {
            double l = lambda(e, t).lambda;
            Index side = checked_pow(2, t);
            for (int k = 1; k <= 3; k++) {
                for (Index r = 0; r < side; r++) {
                    for (Index c = 0; c < side; c++) {
                        std::vector<Index> ri(static_cast<size_t>(t)), ci(static_cast<size_t>(t));
                        for (int a = 0; a < t; a++) {
                            ri[static_cast<size_t>(a)] = (r >> (t - 1 - a)) & 1;
                            ci[static_cast<size_t>(a)] = (c >> (t - 1 - a)) & 1;
                        }
                        CHECK(design_error_monomial(e, t, k, ri, ci) <= std::pow(l, k) + 1e-9);
                    }
                }
            }
        }
    }
    CHECK_THROWS_AS(design_error_monomial(pa, 1, 0, {0}, {0}), DomainError);
    CHECK_THROWS_AS(design_error_monomial(pa, 1, 1, {2}, {0}), DomainError);
    CHECK_THROWS_AS(design_error_monomial(pa, 2, 1, {0}, {0}), DomainError);
}

TEST_CASE("design iteration count") {
    CHECK(design_iterations_needed(1, 2, 0.5, 0.5) == 2);
    CHECK(design_iterations_needed(2, 4, 1e-3, 0.8) == 44);
    CHECK_THROWS_AS(design_iterations_needed(1, 2, 0.5, 1.0), DomainError);
    CHECK_THROWS_AS(design_iterations_needed(1, 2, 1.5, 0.5), DomainError);
}

TEST_CASE("principal sines from grams agree with explicit bases") {
    // W vs W' for D = 2, d = 3, t = 2 on C^{36 x 36}, built explicitly.
    const Index outer = 2, inner = 3;
    const int t = 2;
    auto perms = all_permutations(t);
    std::vector<CVector> w, wp;
    for (const auto &p : perms) {
        w.push_back(vec(kron(alpha_sigma(p, outer), alpha_sigma(p, inner))));
        wp.push_back(vec(alpha_prime_sigma(p, outer, inner)));
    }
    auto qw = orthonormalize(w);
    auto qwp = orthonormalize(wp);
    double ab = max_principal_sine(qw.basis, qwp.basis);
    double ba = max_principal_sine(qwp.basis, qw.basis);
    // Complements: ||P_{B-perp} restricted to A-perp|| via explicit complement bases.
    auto complement = [](const CMatrix &q) {
        Eigen::JacobiSVD<CMatrix> svd(q, Eigen::ComputeFullU);
        return CMatrix(svd.matrixU().rightCols(q.rows() - q.cols()));
    };
    double perp_ab = max_principal_sine(complement(qw.basis), complement(qwp.basis));

    auto report = subspace_closeness_report(outer, inner, t);
    CHECK(std::abs(report.full.a_to_b - ab) < 1e-9);
    CHECK(std::abs(report.full.b_to_a - ba) < 1e-9);
    CHECK(std::abs(report.full.perp_a_to_b - perp_ab) < 1e-9);
    CHECK(report.full.a_to_b <= report.sqrt_bound);
}

TEST_CASE("subspace closeness") {
    auto one = subspace_closeness_report(2, 4, 1);
    CHECK(one.full.a_to_b < 1e-12);
    CHECK(one.full.b_to_a < 1e-12);
    CHECK(one.full.perp_a_to_b < 1e-12);
    CHECK(one.inner.a_to_b < 1e-12);
    double prev = 2.0;
    for (Index d : {4, 8, 16}) {
        auto r = subspace_closeness_report(2, d, 2);
        double ratio = 2.0 / static_cast<double>(d);
        CHECK(r.sqrt_bound == doctest::Approx(2.0 * std::sqrt(ratio)));
        CHECK(r.claim1);
        CHECK(r.claim2);
        CHECK(r.claim3);
        CHECK(r.claim4);
        CHECK(r.full.a_to_b < prev);
        prev = r.full.a_to_b;
        auto j = to_json(r);
        CHECK(j.contains("claim1"));
    }
    CHECK_THROWS_AS(subspace_closeness_report(2, 2, 3), DomainError);
}
