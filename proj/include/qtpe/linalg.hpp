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

#ifndef QTPE_LINALG_HPP
#define QTPE_LINALG_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <vector>

namespace qtpe {

using cd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Index = Eigen::Index;

/// Largest number of scalar entries any dense object may hold.
constexpr std::int64_t kMaxEntries = std::int64_t{1} << 31;

/// base^exp as a 64-bit integer; throws SizeLimitError past `limit`.
std::int64_t checked_pow(std::int64_t base, int exp, std::int64_t limit = kMaxEntries);

/// Reproducible random stream. Identical (seed, stream) pairs produce
/// identical sequences on every platform: the engine is mt19937_64 (fully
/// specified by the standard) and all transforms are done here.
class SeededRng {
   public:
    explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    /// Independent stream keyed by (seed, stream, substream).
    SeededRng derive(std::uint64_t substream) const;

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    double normal();
    /// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
    cd complex_normal();

   private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Haar-distributed dim x dim unitary: Ginibre draw, Householder QR, and the
/// phase fix that makes R's diagonal real positive.
CMatrix haar_unitary(Index dim, SeededRng &rng);

/// Kronecker product; index of (i1, i2) is i1 * dim2 + i2.
CMatrix kron(const CMatrix &a, const CMatrix &b);

/// Kronecker power a^{(x) t}.
CMatrix kron_power(const CMatrix &a, int t);

/// Spectral norm of U^dagger U - I.
double unitarity_defect(const CMatrix &u);

/// Applies `u` (n x n) to tensor factor `mode` of x, read as an m-way tensor
/// with all sides n and mode 0 most significant. `in` and `out` must not alias.
void mode_apply_into(const CMatrix &u, const cd *in, cd *out, int mode, Index n, int m);

CVector mode_apply(const CMatrix &u, const CVector &x, int mode, Index n, int m);

/// Row-major flattening of a square matrix and its inverse.
CVector vec(const CMatrix &m);
CMatrix unvec(const CVector &v, Index rows);

/// Matrix-free linear operator on C^dim. `adjoint` may be left empty when
/// `self_adjoint` is set.
struct LinearMap {
    Index dim = 0;
    std::function<CVector(const CVector &)> apply;
    std::function<CVector(const CVector &)> adjoint;
    bool self_adjoint = false;
};

enum class SpectralMethod { Auto, DenseSvd, PowerIteration, Lanczos };

std::string_view to_string(SpectralMethod m);
SpectralMethod spectral_method_from_string(std::string_view s);

/// Dense threshold: QTPE_DENSE_LIMIT from the environment, else 4096.
Index dense_limit();

struct SpectralOptions {
    SpectralMethod method = SpectralMethod::Auto;
    /// Negative selects the method default: 1e-9 dense, 1e-7 iterative.
    double tol = -1.0;
    int max_iters = 5000;
    /// Krylov subspace size before a Lanczos restart.
    int krylov_dim = 80;
    /// Optional in-place projection applied to every iterate (deflation).
    std::function<void(CVector &)> deflate;
};

struct SpectralEstimate {
    double value = 0.0;
    double residual = 0.0;
    int iterations = 0;
    SpectralMethod method = SpectralMethod::DenseSvd;
    bool converged = false;
};

/// Largest singular value of a dense matrix.
double dense_spectral_norm(const CMatrix &a);

/// Largest singular value of `op`.
///
/// Dense: materialises op column by column (dim <= dense_limit()) and runs a
/// full SVD, or a Hermitian eigensolve when op is self-adjoint. Iterative: power iteration or restarted Lanczos on op^dagger op,
/// or directly on op when it is self-adjoint. Convergence requires the
/// relative residual ||A v - theta v|| / theta <= tol and a relative change
/// of theta <= tol over 3 consecutive checks. A run that exhausts max_iters
/// comes back with converged = false and the best estimate so far.
SpectralEstimate spectral_norm(const LinearMap &op, const SpectralOptions &opts, SeededRng &rng);

struct Orthonormalized {
    CMatrix basis;  ///< columns
    Index rank = 0;
};

/// Orthonormal basis of span(vectors). rank counts singular values of the
/// stacked matrix above rank_tol * sigma_max.
Orthonormalized orthonormalize(const std::vector<CVector> &vectors, double rank_tol = 1e-8);

/// Sine of the largest principal angle from span(a) into span(b), i.e.
/// max over unit w in span(a) of ||w - P_b w||. Columns must be orthonormal.
double max_principal_sine(const CMatrix &a, const CMatrix &b);

}  // namespace qtpe

#endif
