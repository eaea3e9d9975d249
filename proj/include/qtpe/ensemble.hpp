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

#ifndef QTPE_ENSEMBLE_HPP
#define QTPE_ENSEMBLE_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qtpe/linalg.hpp"

namespace qtpe {

/// A degree-s family of n x n unitaries with uniform weights 1/s.
///
/// When an involution is attached, member involution[i] is the adjoint of
/// member i ("explicitly Hermitian"); the moment operator is then self-adjoint.
/// Ensembles are immutable once built.
class UnitaryEnsemble {
   public:
    /// Checks shapes only (nonempty, square, common dimension, involution length
    /// and range). Unitarity is checked by validate().
    UnitaryEnsemble(std::vector<CMatrix> unitaries, std::optional<std::vector<int>> involution = std::nullopt,
                    std::string label = "");

    Index dim() const noexcept { return dim_; }
    Index size() const noexcept { return static_cast<Index>(unitaries_.size()); }
    const CMatrix &operator[](Index i) const { return unitaries_[static_cast<size_t>(i)]; }
    const std::vector<CMatrix> &unitaries() const noexcept { return unitaries_; }
    const std::optional<std::vector<int>> &involution() const noexcept { return involution_; }
    bool explicitly_hermitian() const noexcept { return involution_.has_value(); }
    const std::string &label() const noexcept { return label_; }

    UnitaryEnsemble with_label(std::string label) const;

   private:
    Index dim_;
    std::vector<CMatrix> unitaries_;
    std::optional<std::vector<int>> involution_;
    std::string label_;
};

struct ValidationReport {
    double unitarity_defect = 0.0;   ///< max over members of ||U^dagger U - I||_2
    double involution_defect = 0.0;  ///< max entrywise |U_{-i} - U_i^dagger|
    bool dims_consistent = true;
    bool involution_well_formed = true;  ///< bijective and self-inverse
    bool pass = true;
    std::string message;
};

ValidationReport validate(const UnitaryEnsemble &e, double tol);

/// s/2 independent Haar unitaries followed by their adjoints, with involution
/// i <-> i + s/2. Requires s even and s >= 4.
UnitaryEnsemble sample_random_qtpe(Index d, Index s, SeededRng &rng);

/// {U_i} followed by {U_i^dagger}, duplicates kept, involution i <-> i + s.
UnitaryEnsemble hermitian_double(const UnitaryEnsemble &e);

/// All products U_i U_j in row-major (i, j) order, no involution. Requires s^2 <= 4096.
UnitaryEnsemble square_compose(const UnitaryEnsemble &e);

/// All U_i (x) U_j in row-major (i, j) order.
UnitaryEnsemble tensor_ensemble(const UnitaryEnsemble &e);

constexpr Index kMaxEnsembleSize = 4096;

/// Binary format: "QTPE", version 0x01, u32 dim, u32 count, u8 involution
/// flag, optional u32 involution targets, then count * dim^2 complex entries
/// as little-endian f64 pairs (real, imag), row-major per unitary.
void save(const UnitaryEnsemble &e, const std::filesystem::path &path);

/// Parses the binary file; the label comes from the sidecar when present,
/// otherwise the file stem. Throws ParseError naming the bad field, or
/// ValidationError for an involution that is not a bijective involution.
UnitaryEnsemble load(const std::filesystem::path &path);

/// Sidecar path: same stem with a ".json" extension.
std::filesystem::path sidecar_path(const std::filesystem::path &path);

/// Writes the sidecar document {schema_version, label, seed, provenance}.
void save_sidecar(const UnitaryEnsemble &e, const std::filesystem::path &path, std::optional<std::uint64_t> seed,
                  const nlohmann::json &provenance);

std::vector<std::uint8_t> encode(const UnitaryEnsemble &e);
UnitaryEnsemble decode(const std::vector<std::uint8_t> &bytes, std::string label = "");

/// Bitwise equality of dimensions, involution and every float.
bool bit_identical(const UnitaryEnsemble &a, const UnitaryEnsemble &b);

}  // namespace qtpe

#endif
