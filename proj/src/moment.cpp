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

#include "qtpe/moment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qtpe/error.hpp"

namespace qtpe {

namespace {

// Column index paired with row tuple `row` by the shuffle of sigma:
// column digit a is row digit sigma(a), digit 0 most significant.
std::int64_t shuffled_column(std::int64_t row, const Permutation &sigma, Index n, std::vector<Index> &digits) {
    int t = sigma.size();
    for (int a = t - 1; a >= 0; a--) {
        digits[static_cast<size_t>(a)] = row % n;
        row /= n;
    }
    std::int64_t col = 0;
    for (int a = 0; a < t; a++) {
        col = col * n + digits[static_cast<size_t>(sigma[a])];
    }
    return col;
}

bool distinct_digits(const std::vector<Index> &digits) {
    for (size_t a = 0; a < digits.size(); a++) {
        for (size_t b = a + 1; b < digits.size(); b++) {
            if (digits[a] == digits[b]) {
                return false;
            }
        }
    }
    return true;
}

// Flat (row * side + col) support of the shuffle of sigma, optionally keeping
// only rows with pairwise distinct digits. Sorted ascending.
std::vector<std::int64_t> shuffle_support(const Permutation &sigma, Index n, bool distinct_only) {
    int t = sigma.size();
    Index side = checked_pow(n, t);
    checked_pow(n, 2 * t, std::numeric_limits<std::int64_t>::max() / 4);
    std::vector<Index> digits(static_cast<size_t>(t));
    std::vector<std::int64_t> out;
    out.reserve(static_cast<size_t>(side));
    for (std::int64_t r = 0; r < side; r++) {
        std::int64_t c = shuffled_column(r, sigma, n, digits);
        if (distinct_only && !distinct_digits(digits)) {
            continue;
        }
        out.push_back(r * side + c);
    }
    return out;
}

std::int64_t intersection_size(const std::vector<std::int64_t> &a, const std::vector<std::int64_t> &b) {
    std::int64_t count = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            count++;
            ++i;
            ++j;
        }
    }
    return count;
}

CMatrix dense_from_support(const std::vector<std::int64_t> &support, Index side, double value) {
    CMatrix m = CMatrix::Zero(side, side);
    for (auto idx : support) {
        m(idx / side, idx % side) = value;
    }
    return m;
}

struct GramOrthonormalizer {
    Eigen::MatrixXd coeffs;
    Index rank = 0;
};

// Coefficients C with C^T G C = I spanning the range of G. Loewdin G^{-1/2}
// at full rank, canonical V_k L_k^{-1/2} otherwise. Rank counts singular
// values of the spanning set (square roots of Gram eigenvalues) above
// rank_tol times the largest, with eigenvalues inside the eigensolver's
// roundoff (a few ulps of the largest, times the order) treated as zero.
GramOrthonormalizer orthonormalize_gram(const Eigen::MatrixXd &gram, double rank_tol) {
    GramOrthonormalizer out;
    if (gram.size() == 0) {
        out.coeffs = Eigen::MatrixXd(0, 0);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd &ev = eig.eigenvalues();
    const Eigen::MatrixXd &vecs = eig.eigenvectors();
    double top = std::sqrt(std::max(ev.maxCoeff(), 0.0));
    double floor = 64.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(ev.size()) * top * top;
    std::vector<Index> keep;
    for (Index i = 0; i < ev.size(); i++) {
        if (top > 0 && ev(i) > floor && std::sqrt(ev(i)) > rank_tol * top) {
            keep.push_back(i);
        }
    }
    out.rank = static_cast<Index>(keep.size());
    if (out.rank == gram.rows()) {
        out.coeffs = vecs * ev.cwiseSqrt().cwiseInverse().asDiagonal() * vecs.transpose();
    } else {
        out.coeffs.resize(gram.rows(), out.rank);
        for (Index k = 0; k < out.rank; k++) {
            out.coeffs.col(k) = vecs.col(keep[static_cast<size_t>(k)]) / std::sqrt(ev(keep[static_cast<size_t>(k)]));
        }
    }
    return out;
}

}  // namespace

CMatrix shuffle_operator(const Permutation &sigma, Index n) {
    Index side = checked_pow(n, sigma.size());
    checked_pow(side, 2);
    return dense_from_support(shuffle_support(sigma, n, false), side, 1.0);
}

CMatrix alpha_sigma(const Permutation &sigma, Index n) {
    Index side = checked_pow(n, sigma.size());
    checked_pow(side, 2);
    return dense_from_support(shuffle_support(sigma, n, false), side, std::pow(static_cast<double>(n), -0.5 * sigma.size()));
}

CMatrix alpha_prime_sigma(const Permutation &sigma, Index outer_dim, Index inner_dim) {
    int t = sigma.size();
    if (t > inner_dim) {
        throw DomainError("alpha_prime_sigma: t = " + std::to_string(t) + " exceeds inner dimension " +
                          std::to_string(inner_dim) + "; no distinct index tuples");
    }
    Index inner_side = checked_pow(inner_dim, t);
    CMatrix inner = dense_from_support(shuffle_support(sigma, inner_dim, true), inner_side,
                                       std::pow(static_cast<double>(inner_dim), -0.5 * t));
    return kron(alpha_sigma(sigma, outer_dim), inner);
}

FixedSpaceBasis::FixedSpaceBasis(Index n, int t) : n_(n), t_(t) {
    if (n < 1) {
        throw DomainError("fixed_space_basis: n must be positive");
    }
    if (t < 1 || t > 6) {
        throw SizeLimitError("fixed_space_basis: t must lie in [1, 6], got " + std::to_string(t));
    }
    side_ = checked_pow(n, t);
    checked_pow(n, 2 * t, std::numeric_limits<std::int64_t>::max() / 4);
    value_ = std::pow(static_cast<double>(n), -0.5 * t);
    perms_ = all_permutations(t);
    auto count = static_cast<Index>(perms_.size());
    supports_.reserve(perms_.size());
    for (const auto &p : perms_) {
        supports_.push_back(shuffle_support(p, n, false));
    }
    gram_.resize(count, count);
    for (Index a = 0; a < count; a++) {
        auto inv = perms_[static_cast<size_t>(a)].inverse();
        for (Index b = 0; b < count; b++) {
            int cycles = inv.compose(perms_[static_cast<size_t>(b)]).cycle_count();
            gram_(a, b) = std::pow(static_cast<double>(n), cycles - t);
            double direct = static_cast<double>(intersection_size(supports_[static_cast<size_t>(a)],
                                                                  supports_[static_cast<size_t>(b)])) *
                            value_ * value_;
            gram_check_error_ = std::max(gram_check_error_, std::abs(direct - gram_(a, b)));
        }
    }
    auto ortho = orthonormalize_gram(gram_, 1e-8);
    coeffs_ = std::move(ortho.coeffs);
    rank_ = ortho.rank;
    projector_coeffs_ = coeffs_ * coeffs_.transpose();
}

CMatrix FixedSpaceBasis::alpha(size_t index) const {
    return dense_from_support(supports_.at(index), side_, value_);
}

CVector FixedSpaceBasis::alpha_vec(size_t index) const {
    CVector v = CVector::Zero(ambient());
    for (auto idx : supports_.at(index)) {
        v(idx) = value_;
    }
    return v;
}

CVector FixedSpaceBasis::ortho_vec(Index j) const {
    CVector v = CVector::Zero(ambient());
    for (size_t s = 0; s < supports_.size(); s++) {
        double c = coeffs_(static_cast<Index>(s), j) * value_;
        for (auto idx : supports_[s]) {
            v(idx) += c;
        }
    }
    return v;
}

CMatrix FixedSpaceBasis::ortho_matrix() const {
    CMatrix q(ambient(), rank_);
    for (Index j = 0; j < rank_; j++) {
        q.col(j) = ortho_vec(j);
    }
    return q;
}

Eigen::VectorXcd FixedSpaceBasis::overlaps(const CVector &v) const {
    if (v.size() != ambient()) {
        throw DomainError("fixed space: vector length " + std::to_string(v.size()) + ", expected " +
                          std::to_string(ambient()));
    }
    Eigen::VectorXcd a(static_cast<Index>(supports_.size()));
    for (size_t s = 0; s < supports_.size(); s++) {
        cd acc = 0.0;
        for (auto idx : supports_[s]) {
            acc += v(idx);
        }
        a(static_cast<Index>(s)) = acc * value_;
    }
    return a;
}

void FixedSpaceBasis::project(CVector &v) const {
    Eigen::VectorXcd c = projector_coeffs_ * overlaps(v);
    v.setZero();
    for (size_t s = 0; s < supports_.size(); s++) {
        cd w = c(static_cast<Index>(s)) * value_;
        for (auto idx : supports_[s]) {
            v(idx) += w;
        }
    }
}

void FixedSpaceBasis::project_out(CVector &v) const {
    Eigen::VectorXcd c = projector_coeffs_ * overlaps(v);
    for (size_t s = 0; s < supports_.size(); s++) {
        cd w = c(static_cast<Index>(s)) * value_;
        for (auto idx : supports_[s]) {
            v(idx) -= w;
        }
    }
}

MomentOperator::MomentOperator(UnitaryEnsemble ensemble, int t) : ensemble_(std::move(ensemble)), t_(t) {
    if (t < 1) {
        throw DomainError("moment operator: t must be positive");
    }
    side_ = checked_pow(ensemble_.dim(), t);
    checked_pow(side_, 2);
    for (const auto &u : ensemble_.unitaries()) {
        conj_.push_back(u.conjugate());
        adj_.push_back(u.adjoint());
        trans_.push_back(u.transpose());
    }
}

CVector MomentOperator::conjugate_sum(const CVector &v, bool adjoint) const {
    if (v.size() != ambient()) {
        throw DomainError("moment operator: argument has length " + std::to_string(v.size()) + ", expected " +
                          std::to_string(ambient()));
    }
    const Index n = ensemble_.dim();
    const int modes = 2 * t_;
    CVector acc = CVector::Zero(v.size());
    CVector a(v.size());
    CVector b(v.size());
    for (Index i = 0; i < ensemble_.size(); i++) {
        const CMatrix &rows = adjoint ? adj_[static_cast<size_t>(i)] : ensemble_[i];
        const CMatrix &cols = adjoint ? trans_[static_cast<size_t>(i)] : conj_[static_cast<size_t>(i)];
        a = v;
        for (int mode = 0; mode < modes; mode++) {
            mode_apply_into(mode < t_ ? rows : cols, a.data(), b.data(), mode, n, modes);
            a.swap(b);
        }
        acc += a;
    }
    acc /= static_cast<double>(ensemble_.size());
    return acc;
}

CVector MomentOperator::apply_vec(const CVector &v) const { return conjugate_sum(v, false); }

CVector MomentOperator::adjoint_vec(const CVector &v) const { return conjugate_sum(v, true); }

CMatrix MomentOperator::apply(const CMatrix &m) const {
    if (m.rows() != side_ || m.cols() != side_) {
        throw DomainError("moment operator: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                          ", expected " + std::to_string(side_) + "x" + std::to_string(side_));
    }
    return unvec(apply_vec(vec(m)), side_);
}

CMatrix MomentOperator::dense() const {
    checked_pow(ambient(), 2);
    CMatrix s = CMatrix::Zero(ambient(), ambient());
    for (const auto &u : ensemble_.unitaries()) {
        CMatrix k = kron_power(u, t_);
        s += kron(k, k.conjugate());
    }
    return s / static_cast<double>(ensemble_.size());
}

CMatrix ideal_apply(const FixedSpaceBasis &basis, const CMatrix &m) {
    if (m.rows() != basis.side() || m.cols() != basis.side()) {
        throw DomainError("ideal_apply: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                          ", expected " + std::to_string(basis.side()) + "x" + std::to_string(basis.side()));
    }
    CVector v = vec(m);
    basis.project(v);
    return unvec(v, basis.side());
}

nlohmann::json to_json(const SpectralReport &r) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["lambda"] = r.lambda;
    j["method"] = std::string(to_string(r.method));
    j["iterations"] = r.iterations;
    j["residual"] = r.residual;
    j["converged"] = r.converged;
    j["bound_reference"] = r.bound_reference ? nlohmann::json(*r.bound_reference) : nlohmann::json(nullptr);
    j["seed"] = r.seed;
    j["ensemble_label"] = r.ensemble_label;
    j["t"] = r.t;
    return j;
}

LinearMap lambda_operator(const MomentOperator &phi, const FixedSpaceBasis &basis) {
    LinearMap op;
    op.dim = phi.ambient();
    op.self_adjoint = phi.ensemble().explicitly_hermitian();
    op.apply = [&phi, &basis](const CVector &v) {
        CVector w = phi.apply_vec(v);
        CVector p = v;
        basis.project(p);
        return CVector(w - p);
    };
    op.adjoint = [&phi, &basis](const CVector &v) {
        CVector w = phi.adjoint_vec(v);
        CVector p = v;
        basis.project(p);
        return CVector(w - p);
    };
    return op;
}

SpectralReport lambda(const UnitaryEnsemble &e, int t, const LambdaOptions &opts) {
    if (t < 1 || t > kMaxLambdaT) {
        throw SizeLimitError("lambda: t must lie in [1, " + std::to_string(kMaxLambdaT) + "], got " +
                             std::to_string(t));
    }
    Index ambient = checked_pow(e.dim(), 2 * t, kMaxIterativeAmbient);
    SpectralMethod method = opts.method;
    if (method == SpectralMethod::Auto) {
        method = ambient <= dense_limit() ? SpectralMethod::DenseSvd : SpectralMethod::Lanczos;
    }
    if (method == SpectralMethod::DenseSvd && ambient > dense_limit()) {
        throw SizeLimitError("lambda: ambient dimension " + std::to_string(ambient) + " exceeds dense limit " +
                             std::to_string(dense_limit()));
    }
    MomentOperator phi(e, t);
    FixedSpaceBasis basis(e.dim(), t);

    SpectralReport report;
    report.t = t;
    report.seed = opts.seed;
    report.ensemble_label = e.label();
    report.method = method;
    if (method == SpectralMethod::DenseSvd) {
        CMatrix q = basis.ortho_matrix();
        CMatrix s = phi.dense() - q * q.adjoint();
        report.lambda = dense_spectral_norm(s);
        report.converged = true;
        return report;
    }
    LinearMap op = lambda_operator(phi, basis);
    SpectralOptions so;
    so.method = method;
    so.tol = opts.tol > 0 ? opts.tol : 1e-7;
    so.max_iters = opts.max_iters;
    if (opts.deflate) {
        so.deflate = [&basis](CVector &v) { basis.project_out(v); };
    }
    SeededRng rng(opts.seed, 0x6c616d626461ULL);
    auto est = spectral_norm(op, so, rng);
    report.lambda = est.value;
    report.iterations = est.iterations;
    report.residual = est.residual;
    report.converged = est.converged;
    report.method = est.method;
    return report;
}

double design_error_monomial(const UnitaryEnsemble &e, int t, int k, const std::vector<Index> &row_indices,
                             const std::vector<Index> &col_indices) {
    if (k < 1) {
        throw DomainError("design_error_monomial: k must be at least 1");
    }
    if (static_cast<int>(row_indices.size()) != t || static_cast<int>(col_indices.size()) != t) {
        throw DomainError("design_error_monomial: index tuples must have length t");
    }
    const Index n = e.dim();
    auto flatten = [n](const std::vector<Index> &idx) {
        Index f = 0;
        for (Index i : idx) {
            if (i < 0 || i >= n) {
                throw DomainError("design_error_monomial: index " + std::to_string(i) + " outside [0, " +
                                  std::to_string(n) + ")");
            }
            f = f * n + i;
        }
        return f;
    };
    Index row = flatten(row_indices);
    Index col = flatten(col_indices);
    MomentOperator phi(e, t);
    FixedSpaceBasis basis(n, t);
    const Index side = phi.side();
    CVector m = CVector::Zero(phi.ambient());
    m(col * side + col) = 1.0;
    CVector ideal = m;
    basis.project(ideal);
    CVector x = m;
    for (int i = 0; i < k; i++) {
        x = phi.apply_vec(x);
    }
    return std::abs(x(row * side + row) - ideal(row * side + row));
}

int design_iterations_needed(int t, Index n, double alpha, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        throw DomainError("design_iterations_needed: lambda must lie in (0, 1)");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("design_iterations_needed: alpha must lie in (0, 1)");
    }
    if (t < 1 || n < 1) {
        throw DomainError("design_iterations_needed: t and n must be positive");
    }
    double k = (t * std::log(static_cast<double>(n)) + std::log(1.0 / alpha)) / std::log(1.0 / lambda);
    return static_cast<int>(std::ceil(k));
}

PrincipalSines principal_sines_from_grams(const Eigen::MatrixXd &gram_aa, const Eigen::MatrixXd &gram_bb,
                                          const Eigen::MatrixXd &gram_ab, double rank_tol) {
    auto a = orthonormalize_gram(gram_aa, rank_tol);
    auto b = orthonormalize_gram(gram_bb, rank_tol);
    PrincipalSines out;
    if (a.rank == 0 || b.rank == 0) {
        out.a_to_b = a.rank == 0 ? 0.0 : 1.0;
        out.b_to_a = b.rank == 0 ? 0.0 : 1.0;
        out.perp_a_to_b = out.b_to_a;
        out.perp_b_to_a = out.a_to_b;
        return out;
    }
    // Cosines of the principal angles.
    Eigen::MatrixXd k = a.coeffs.transpose() * gram_ab * b.coeffs;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(k);
    double smallest = svd.singularValues().minCoeff();
    double sine = std::sqrt(std::max(0.0, 1.0 - std::min(1.0, smallest * smallest)));
    out.a_to_b = a.rank > b.rank ? 1.0 : sine;
    out.b_to_a = b.rank > a.rank ? 1.0 : sine;
    // ||P_B (1 - P_A)|| = ||(1 - P_A) P_B||: the complement of A into the
    // complement of B has the same sine as B into A.
    out.perp_a_to_b = out.b_to_a;
    out.perp_b_to_a = out.a_to_b;
    return out;
}

nlohmann::json to_json(const ClosenessReport &r) {
    auto sines = [](const PrincipalSines &s) {
        return nlohmann::json{{"a_to_b", s.a_to_b},
                              {"b_to_a", s.b_to_a},
                              {"perp_a_to_b", s.perp_a_to_b},
                              {"perp_b_to_a", s.perp_b_to_a}};
    };
    return nlohmann::json{{"outer_dim", r.outer_dim},
                          {"inner_dim", r.inner_dim},
                          {"t", r.t},
                          {"w_vs_wprime", sines(r.full)},
                          {"w2_vs_w2prime", sines(r.inner)},
                          {"sqrt_bound", r.sqrt_bound},
                          {"quartic_bound", r.quartic_bound},
                          {"claim1", r.claim1},
                          {"claim2", r.claim2},
                          {"claim3", r.claim3},
                          {"claim4", r.claim4}};
}

ClosenessReport subspace_closeness_report(Index outer_dim, Index inner_dim, int t) {
    if (t < 1 || t > 3) {
        throw SizeLimitError("subspace_closeness_report: t must lie in [1, 3]");
    }
    if (outer_dim < 1 || inner_dim < t) {
        throw DomainError("subspace_closeness_report: need D >= 1 and d >= t");
    }
    checked_pow(outer_dim * inner_dim, 2 * t);

    auto perms = all_permutations(t);
    auto count = static_cast<Index>(perms.size());
    std::vector<std::vector<std::int64_t>> full;
    std::vector<std::vector<std::int64_t>> distinct;
    for (const auto &p : perms) {
        full.push_back(shuffle_support(p, inner_dim, false));
        distinct.push_back(shuffle_support(p, inner_dim, true));
    }
    const double scale = std::pow(static_cast<double>(inner_dim), -static_cast<double>(t));
    Eigen::MatrixXd g1(count, count);
    Eigen::MatrixXd g2(count, count);
    Eigen::MatrixXd g2p(count, count);
    Eigen::MatrixXd g2x(count, count);
    for (Index a = 0; a < count; a++) {
        auto inv = perms[static_cast<size_t>(a)].inverse();
        for (Index b = 0; b < count; b++) {
            int cycles = inv.compose(perms[static_cast<size_t>(b)]).cycle_count();
            g1(a, b) = std::pow(static_cast<double>(outer_dim), cycles - t);
            auto ua = static_cast<size_t>(a);
            auto ub = static_cast<size_t>(b);
            g2(a, b) = scale * static_cast<double>(intersection_size(full[ua], full[ub]));
            g2p(a, b) = scale * static_cast<double>(intersection_size(distinct[ua], distinct[ub]));
            g2x(a, b) = scale * static_cast<double>(intersection_size(full[ua], distinct[ub]));
        }
    }
    ClosenessReport r;
    r.outer_dim = outer_dim;
    r.inner_dim = inner_dim;
    r.t = t;
    // Inner products of Kronecker products factor.
    r.full = principal_sines_from_grams(g1.cwiseProduct(g2), g1.cwiseProduct(g2p), g1.cwiseProduct(g2x));
    r.inner = principal_sines_from_grams(g2, g2p, g2x);
    double ratio = static_cast<double>(t) * (t - 1) / static_cast<double>(inner_dim);
    r.sqrt_bound = 2.0 * std::sqrt(ratio);
    r.quartic_bound = 2.0 * std::pow(ratio, 0.25);
    constexpr double slack = 1e-12;
    r.claim1 = r.full.a_to_b <= r.sqrt_bound + slack && r.full.b_to_a <= r.sqrt_bound + slack;
    r.claim2 = r.inner.b_to_a <= r.sqrt_bound + slack;
    r.claim3 = r.full.perp_a_to_b <= r.quartic_bound + slack && r.full.perp_b_to_a <= r.quartic_bound + slack;
    r.claim4 = r.inner.perp_b_to_a <= r.quartic_bound + slack;
    return r;
}

}  // namespace qtpe
