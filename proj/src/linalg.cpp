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

#include "qtpe/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <numbers>
#include <string>

#include "qtpe/error.hpp"

namespace qtpe {

using RowMat = Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::int64_t checked_pow(std::int64_t base, int exp, std::int64_t limit) {
    std::int64_t r = 1;
    for (int i = 0; i < exp; i++) {
        if (base != 0 && r > limit / base) {
            throw SizeLimitError(std::to_string(base) + "^" + std::to_string(exp) + " exceeds size limit " +
                                 std::to_string(limit));
        }
        r *= base;
    }
    if (r > limit) {
        throw SizeLimitError(std::to_string(base) + "^" + std::to_string(exp) + " exceeds size limit " +
                             std::to_string(limit));
    }
    return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

SeededRng::SeededRng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

SeededRng SeededRng::derive(std::uint64_t substream) const {
    return SeededRng(seed_, splitmix64(stream_ * 0x100000001B3ULL + substream + 1));
}

double SeededRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t SeededRng::below(std::uint64_t n) {
    // Rejection sampling keeps the draw exactly uniform.
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double SeededRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u1;
    do {
        u1 = uniform();
    } while (u1 == 0.0);
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double phi = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(phi);
    has_spare_ = true;
    return r * std::cos(phi);
}

cd SeededRng::complex_normal() {
    double re = normal();
    double im = normal();
    return {re * std::numbers::sqrt2 / 2, im * std::numbers::sqrt2 / 2};
}

CMatrix haar_unitary(Index dim, SeededRng &rng) {
    if (dim < 1) {
        throw DomainError("haar_unitary: dim must be positive");
    }
    checked_pow(dim, 2);
    CMatrix z(dim, dim);
    for (Index i = 0; i < dim; i++) {
        for (Index j = 0; j < dim; j++) {
            z(i, j) = rng.complex_normal();
        }
    }
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ() * CMatrix::Identity(dim, dim);
    const CMatrix &r = qr.matrixQR();
    for (Index j = 0; j < dim; j++) {
        double mag = std::abs(r(j, j));
        cd phase = mag > 0 ? r(j, j) / mag : cd{1.0, 0.0};
        q.col(j) *= phase;
    }
    return q;
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    std::int64_t rows = static_cast<std::int64_t>(a.rows()) * b.rows();
    std::int64_t cols = static_cast<std::int64_t>(a.cols()) * b.cols();
    if (rows != 0 && cols > kMaxEntries / rows) {
        throw SizeLimitError("kron: result exceeds 2^31 entries");
    }
    CMatrix out(rows, cols);
    for (Index i = 0; i < a.rows(); i++) {
        for (Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix kron_power(const CMatrix &a, int t) {
    if (t < 1) {
        throw DomainError("kron_power: t must be positive");
    }
    CMatrix out = a;
    for (int i = 1; i < t; i++) {
        out = kron(out, a);
    }
    return out;
}

double unitarity_defect(const CMatrix &u) {
    if (u.rows() != u.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    CMatrix g = u.adjoint() * u - CMatrix::Identity(u.rows(), u.cols());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(g, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

void mode_apply_into(const CMatrix &u, const cd *in, cd *out, int mode, Index n, int m) {
    Index left = checked_pow(n, mode);
    Index right = checked_pow(n, m - mode - 1);
    if (right == 1) {
        Eigen::Map<const RowMat> x(in, left, n);
        Eigen::Map<RowMat> y(out, left, n);
        y.noalias() = x * u.transpose();
        return;
    }
    for (Index l = 0; l < left; l++) {
        Eigen::Map<const RowMat> x(in + l * n * right, n, right);
        Eigen::Map<RowMat> y(out + l * n * right, n, right);
        y.noalias() = u * x;
    }
}

CVector mode_apply(const CMatrix &u, const CVector &x, int mode, Index n, int m) {
    if (n < 1 || m < 1 || mode < 0 || mode >= m) {
        throw DomainError("mode_apply: need n >= 1, m >= 1 and 0 <= mode < m");
    }
    if (u.rows() != n || u.cols() != n) {
        throw DomainError("mode_apply: operator is " + std::to_string(u.rows()) + "x" + std::to_string(u.cols()) +
                          ", expected " + std::to_string(n) + "x" + std::to_string(n));
    }
    if (x.size() != checked_pow(n, m)) {
        throw DomainError("mode_apply: vector length " + std::to_string(x.size()) + " is not n^m");
    }
    CVector out(x.size());
    mode_apply_into(u, x.data(), out.data(), mode, n, m);
    return out;
}

CVector vec(const CMatrix &m) {
    CVector v(m.size());
    Eigen::Map<RowMat>(v.data(), m.rows(), m.cols()) = m;
    return v;
}

CMatrix unvec(const CVector &v, Index rows) {
    if (rows <= 0 || v.size() % rows != 0) {
        throw DomainError("unvec: length is not a multiple of the row count");
    }
    return Eigen::Map<const RowMat>(v.data(), rows, v.size() / rows);
}

std::string_view to_string(SpectralMethod m) {
    switch (m) {
        case SpectralMethod::Auto:
            return "auto";
        case SpectralMethod::DenseSvd:
            return "dense-svd";
        case SpectralMethod::PowerIteration:
            return "power-iteration";
        case SpectralMethod::Lanczos:
            return "lanczos";
    }
    return "unknown";
}

SpectralMethod spectral_method_from_string(std::string_view s) {
    if (s == "auto") return SpectralMethod::Auto;
    if (s == "dense" || s == "dense-svd") return SpectralMethod::DenseSvd;
    if (s == "power" || s == "power-iteration") return SpectralMethod::PowerIteration;
    if (s == "lanczos") return SpectralMethod::Lanczos;
    throw DomainError("unknown spectral method '" + std::string(s) + "'");
}

Index dense_limit() {
    if (const char *env = std::getenv("QTPE_DENSE_LIMIT")) {
        char *end = nullptr;
        long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && v >= 0) {
            return static_cast<Index>(v);
        }
    }
    return 4096;
}

double dense_spectral_norm(const CMatrix &a) {
    if (a.size() == 0) {
        return 0.0;
    }
    // sigma_max^2 is the top eigenvalue of the Hermitian Gram matrix of the
    // thinner side; Eigen 3.4's divide-and-conquer SVD misreports it on some
    // complex inputs.
    CMatrix gram = a.rows() < a.cols() ? CMatrix(a * a.adjoint()) : CMatrix(a.adjoint() * a);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0));
}

namespace {

// Relative quantities are taken against max(|theta|, kFloor) so that a
// (numerically) zero operator converges instead of dividing noise by noise.
constexpr double kFloor = 1e-6;
constexpr int kStableChecks = 3;

struct ChangeTracker {
    std::deque<double> changes;
    double last = std::numeric_limits<double>::quiet_NaN();

    void push(double theta) {
        if (!std::isnan(last)) {
            changes.push_back(std::abs(theta - last) / std::max(std::abs(theta), kFloor));
            if (changes.size() > kStableChecks) {
                changes.pop_front();
            }
        }
        last = theta;
    }
    bool stable(double tol) const {
        return changes.size() == kStableChecks &&
               std::all_of(changes.begin(), changes.end(), [&](double c) { return c <= tol; });
    }
};

class IterativeSolver {
   public:
    IterativeSolver(const LinearMap &op, const SpectralOptions &opts, double tol)
        : op_(op), opts_(opts), tol_(tol), hermitian_(op.self_adjoint) {}

    CVector apply(const CVector &v) const {
        CVector w = op_.apply(v);
        if (!hermitian_) {
            w = op_.adjoint ? op_.adjoint(w) : CVector(w);
        }
        if (opts_.deflate) {
            opts_.deflate(w);
        }
        return w;
    }

    // Converts an eigenvalue of the iterated operator into a singular value.
    double to_value(double theta) const { return hermitian_ ? std::abs(theta) : std::sqrt(std::max(theta, 0.0)); }

    CVector start(SeededRng &rng) const {
        CVector v(op_.dim);
        for (Index i = 0; i < v.size(); i++) {
            v(i) = rng.complex_normal();
        }
        if (opts_.deflate) {
            opts_.deflate(v);
        }
        return v;
    }

    SpectralEstimate power(SeededRng &rng) const {
        SpectralEstimate est;
        est.method = SpectralMethod::PowerIteration;
        CVector v = start(rng);
        double nv = v.norm();
        if (nv == 0.0) {
            est.converged = true;
            return est;
        }
        v /= nv;
        ChangeTracker tracker;
        for (int it = 1; it <= opts_.max_iters; it++) {
            CVector w = hermitian_ ? apply(apply(v)) : apply(v);
            double theta = std::real(v.dot(w));
            double res = (w - theta * v).norm() / std::max(std::abs(theta), kFloor);
            tracker.push(theta);
            est.value = std::sqrt(std::max(theta, 0.0));
            est.residual = res;
            est.iterations = it;
            double nw = w.norm();
            if ((res <= tol_ && tracker.stable(tol_)) || nw == 0.0) {
                est.converged = true;
                return est;
            }
            v = w / nw;
        }
        return est;
    }

    SpectralEstimate lanczos(SeededRng &rng) const {
        SpectralEstimate est;
        est.method = SpectralMethod::Lanczos;
        CVector x = start(rng);
        double nx = x.norm();
        if (nx == 0.0) {
            est.converged = true;
            return est;
        }
        x /= nx;
        const Index max_basis = std::max<Index>(2, std::min<Index>(opts_.krylov_dim, op_.dim));
        int steps = 0;
        ChangeTracker tracker;
        while (steps < opts_.max_iters) {
            std::vector<CVector> basis{x};
            std::vector<double> alpha;
            std::vector<double> beta;
            Eigen::VectorXd ritz;
            double theta = 0.0;
            bool invariant = false;
            bool done = false;
            for (Index j = 0; j < max_basis && steps < opts_.max_iters; j++) {
                CVector w = apply(basis[static_cast<size_t>(j)]);
                steps++;
                double a = std::real(basis[static_cast<size_t>(j)].dot(w));
                w -= a * basis[static_cast<size_t>(j)];
                if (j > 0) {
                    w -= beta.back() * basis[static_cast<size_t>(j - 1)];
                }
                for (int pass = 0; pass < 2; pass++) {
                    for (const auto &q : basis) {
                        w -= q * q.dot(w);
                    }
                }
                alpha.push_back(a);
                double b = w.norm();

                auto k = static_cast<Index>(alpha.size());
                Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), k);
                Eigen::VectorXd sub = k > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), k - 1))
                                            : Eigen::VectorXd(0);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
                tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
                Index pick = k - 1;
                if (hermitian_ && std::abs(tri.eigenvalues()(0)) > std::abs(tri.eigenvalues()(k - 1))) {
                    pick = 0;
                }
                theta = tri.eigenvalues()(pick);
                ritz = tri.eigenvectors().col(pick);
                tracker.push(theta);
                double ritz_res = b * std::abs(ritz(k - 1)) / std::max(std::abs(theta), kFloor);
                invariant = b <= 1e-13;
                if ((ritz_res <= tol_ && tracker.stable(tol_)) || invariant) {
                    done = true;
                    break;
                }
                if (j + 1 < max_basis) {
                    beta.push_back(b);
                    basis.push_back(w / b);
                }
            }
            x.setZero();
            for (Index i = 0; i < ritz.size(); i++) {
                x += ritz(i) * basis[static_cast<size_t>(i)];
            }
            x.normalize();
            est.value = to_value(theta);
            est.iterations = steps;
            if (done || steps >= opts_.max_iters) {
                // Explicit residual of the Ritz pair; guards against lost orthogonality.
                CVector ax = apply(x);
                double t = std::real(x.dot(ax));
                est.residual = (ax - t * x).norm() / std::max(std::abs(t), kFloor);
                est.value = to_value(t);
                if (done && est.residual <= tol_) {
                    est.converged = true;
                    return est;
                }
            }
        }
        return est;
    }

   private:
    const LinearMap &op_;
    const SpectralOptions &opts_;
    double tol_;
    bool hermitian_;
};

}  // namespace

SpectralEstimate spectral_norm(const LinearMap &op, const SpectralOptions &opts, SeededRng &rng) {
    if (op.dim < 1 || !op.apply || (!op.self_adjoint && !op.adjoint)) {
        throw DomainError("spectral_norm: operator needs dim >= 1, apply, and adjoint unless self-adjoint");
    }
    SpectralMethod method = opts.method;
    if (method == SpectralMethod::Auto) {
        method = op.dim <= dense_limit() ? SpectralMethod::DenseSvd : SpectralMethod::Lanczos;
    }
    if (method == SpectralMethod::DenseSvd) {
        if (op.dim > dense_limit()) {
            throw SizeLimitError("spectral_norm: dimension " + std::to_string(op.dim) + " exceeds dense limit " +
                                 std::to_string(dense_limit()));
        }
        CMatrix a(op.dim, op.dim);
        CVector e = CVector::Zero(op.dim);
        for (Index k = 0; k < op.dim; k++) {
            e(k) = 1.0;
            a.col(k) = op.apply(e);
            e(k) = 0.0;
        }
        SpectralEstimate est;
        est.method = SpectralMethod::DenseSvd;
        if (op.self_adjoint) {
            CMatrix h = 0.5 * (a + a.adjoint());
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(h, Eigen::EigenvaluesOnly);
            est.value = eig.eigenvalues().cwiseAbs().maxCoeff();
        } else {
            est.value = dense_spectral_norm(a);
        }
        est.converged = true;
        return est;
    }
    double tol = opts.tol > 0 ? opts.tol : 1e-7;
    IterativeSolver solver(op, opts, tol);
    return method == SpectralMethod::PowerIteration ? solver.power(rng) : solver.lanczos(rng);
}

Orthonormalized orthonormalize(const std::vector<CVector> &vectors, double rank_tol) {
    if (vectors.empty()) {
        throw DomainError("orthonormalize: empty vector list");
    }
    Index n = vectors.front().size();
    CMatrix stacked(n, static_cast<Index>(vectors.size()));
    for (size_t k = 0; k < vectors.size(); k++) {
        if (vectors[k].size() != n) {
            throw DomainError("orthonormalize: vectors have unequal lengths");
        }
        stacked.col(static_cast<Index>(k)) = vectors[k];
    }
    Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeThinU);
    const auto &sv = svd.singularValues();
    Orthonormalized out;
    if (sv.size() == 0 || sv(0) == 0.0) {
        out.basis = CMatrix(n, 0);
        return out;
    }
    double cutoff = rank_tol * sv(0);
    Index rank = (sv.array() > cutoff).count();

    // Prefer Gram-Schmidt in input order; it keeps already-orthonormal inputs
    // unchanged. Fall back to the SVD basis if it disagrees on rank.
    std::vector<CVector> kept;
    for (const auto &v : vectors) {
        CVector w = v;
        for (int pass = 0; pass < 2; pass++) {
            for (const auto &q : kept) {
                w -= q * q.dot(w);
            }
        }
        double nw = w.norm();
        if (nw > cutoff) {
            kept.push_back(w / nw);
        }
    }
    out.rank = rank;
    if (static_cast<Index>(kept.size()) == rank) {
        out.basis.resize(n, rank);
        for (Index k = 0; k < rank; k++) {
            out.basis.col(k) = kept[static_cast<size_t>(k)];
        }
    } else {
        out.basis = svd.matrixU().leftCols(rank);
    }
    return out;
}

double max_principal_sine(const CMatrix &a, const CMatrix &b) {
    if (a.rows() != b.rows()) {
        throw DomainError("max_principal_sine: ambient dimensions differ (" + std::to_string(a.rows()) + " vs " +
                          std::to_string(b.rows()) + ")");
    }
    auto check = [](const CMatrix &q, const char *name) {
        if (q.cols() == 0) {
            return;
        }
        double err = (q.adjoint() * q - CMatrix::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
        if (err > 1e-8) {
            throw DomainError(std::string("max_principal_sine: basis ") + name + " is not orthonormal");
        }
    };
    check(a, "a");
    check(b, "b");
    if (a.cols() == 0) {
        return 0.0;
    }
    if (b.cols() == 0) {
        return 1.0;
    }
    CMatrix residual = a - b * (b.adjoint() * a);
    Eigen::JacobiSVD<CMatrix> svd(residual);
    return std::clamp(svd.singularValues()(0), 0.0, 1.0);
}

}  // namespace qtpe
