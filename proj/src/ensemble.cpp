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

#include "qtpe/ensemble.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "qtpe/error.hpp"

namespace qtpe {

static_assert(std::endian::native == std::endian::little, "ensemble I/O assumes a little-endian host");

UnitaryEnsemble::UnitaryEnsemble(std::vector<CMatrix> unitaries, std::optional<std::vector<int>> involution,
                                 std::string label)
    : dim_(0), unitaries_(std::move(unitaries)), involution_(std::move(involution)), label_(std::move(label)) {
    if (unitaries_.empty()) {
        throw DomainError("ensemble must have at least one member");
    }
    dim_ = unitaries_.front().rows();
    if (dim_ < 1) {
        throw DomainError("ensemble members must be at least 1x1");
    }
    for (size_t i = 0; i < unitaries_.size(); i++) {
        if (unitaries_[i].rows() != dim_ || unitaries_[i].cols() != dim_) {
            throw DomainError("ensemble member " + std::to_string(i) + " is " + std::to_string(unitaries_[i].rows()) +
                              "x" + std::to_string(unitaries_[i].cols()) + ", expected " + std::to_string(dim_) +
                              "x" + std::to_string(dim_));
        }
    }
    if (involution_) {
        if (involution_->size() != unitaries_.size()) {
            throw DomainError("involution length differs from ensemble size");
        }
        for (int j : *involution_) {
            if (j < 0 || static_cast<size_t>(j) >= unitaries_.size()) {
                throw DomainError("involution target out of range");
            }
        }
    }
}

UnitaryEnsemble UnitaryEnsemble::with_label(std::string label) const {
    UnitaryEnsemble copy = *this;
    copy.label_ = std::move(label);
    return copy;
}

ValidationReport validate(const UnitaryEnsemble &e, double tol) {
    ValidationReport r;
    for (Index i = 0; i < e.size(); i++) {
        r.unitarity_defect = std::max(r.unitarity_defect, unitarity_defect(e[i]));
    }
    if (const auto &inv = e.involution()) {
        for (size_t i = 0; i < inv->size(); i++) {
            auto j = static_cast<size_t>((*inv)[i]);
            if (static_cast<size_t>((*inv)[j]) != i) {
                r.involution_well_formed = false;
            }
            double d = (e[static_cast<Index>(j)] - e[static_cast<Index>(i)].adjoint()).cwiseAbs().maxCoeff();
            r.involution_defect = std::max(r.involution_defect, d);
        }
    }
    std::ostringstream msg;
    if (r.unitarity_defect > tol) {
        msg << "unitarity defect " << r.unitarity_defect << " exceeds " << tol << "; ";
    }
    if (!r.involution_well_formed) {
        msg << "involution is not a bijective involution; ";
    }
    if (r.involution_defect > tol) {
        msg << "involution defect " << r.involution_defect << " exceeds " << tol << "; ";
    }
    r.message = msg.str();
    r.pass = r.message.empty() && r.dims_consistent;
    return r;
}

UnitaryEnsemble sample_random_qtpe(Index d, Index s, SeededRng &rng) {
    if (s < 4 || s % 2 != 0) {
        throw DomainError("sample_random_qtpe: degree must be even and at least 4, got " + std::to_string(s));
    }
    if (d < 1) {
        throw DomainError("sample_random_qtpe: dimension must be positive");
    }
    Index half = s / 2;
    std::vector<CMatrix> members(static_cast<size_t>(s));
    std::vector<int> inv(static_cast<size_t>(s));
    // One draw from the caller's stream keys the per-member streams, so
    // successive calls on the same generator give fresh ensembles.
    const SeededRng base(rng.next_u64(), rng.stream());
    for (Index i = 0; i < half; i++) {
        SeededRng member_rng = base.derive(static_cast<std::uint64_t>(i));
        members[static_cast<size_t>(i)] = haar_unitary(d, member_rng);
        members[static_cast<size_t>(i + half)] = members[static_cast<size_t>(i)].adjoint();
        inv[static_cast<size_t>(i)] = static_cast<int>(i + half);
        inv[static_cast<size_t>(i + half)] = static_cast<int>(i);
    }
    std::ostringstream label;
    label << "random-qtpe(d=" << d << ",s=" << s << ",seed=" << rng.seed() << ")";
    return UnitaryEnsemble(std::move(members), std::move(inv), label.str());
}

UnitaryEnsemble hermitian_double(const UnitaryEnsemble &e) {
    Index s = e.size();
    std::vector<CMatrix> members;
    members.reserve(static_cast<size_t>(2 * s));
    std::vector<int> inv(static_cast<size_t>(2 * s));
    for (Index i = 0; i < s; i++) {
        members.push_back(e[i]);
    }
    for (Index i = 0; i < s; i++) {
        members.push_back(e[i].adjoint());
        inv[static_cast<size_t>(i)] = static_cast<int>(i + s);
        inv[static_cast<size_t>(i + s)] = static_cast<int>(i);
    }
    return UnitaryEnsemble(std::move(members), std::move(inv), "double(" + e.label() + ")");
}

UnitaryEnsemble square_compose(const UnitaryEnsemble &e) {
    Index s = e.size();
    if (s * s > kMaxEnsembleSize) {
        throw SizeLimitError("square_compose: s^2 = " + std::to_string(s * s) + " exceeds " +
                             std::to_string(kMaxEnsembleSize));
    }
    checked_pow(e.dim(), 2, kMaxEntries / (s * s));
    std::vector<CMatrix> members;
    members.reserve(static_cast<size_t>(s * s));
    for (Index i = 0; i < s; i++) {
        for (Index j = 0; j < s; j++) {
            members.emplace_back(e[i] * e[j]);
        }
    }
    return UnitaryEnsemble(std::move(members), std::nullopt, "square(" + e.label() + ")");
}

UnitaryEnsemble tensor_ensemble(const UnitaryEnsemble &e) {
    Index s = e.size();
    if (s * s > kMaxEnsembleSize) {
        throw SizeLimitError("tensor_ensemble: s^2 = " + std::to_string(s * s) + " exceeds " +
                             std::to_string(kMaxEnsembleSize));
    }
    checked_pow(e.dim(), 4, kMaxEntries / (s * s));
    std::vector<CMatrix> members;
    members.reserve(static_cast<size_t>(s * s));
    for (Index i = 0; i < s; i++) {
        for (Index j = 0; j < s; j++) {
            members.push_back(kron(e[i], e[j]));
        }
    }
    return UnitaryEnsemble(std::move(members), std::nullopt, "tensor(" + e.label() + ")");
}

namespace {

constexpr char kMagic[4] = {'Q', 'T', 'P', 'E'};
constexpr std::uint8_t kVersion = 0x01;

template <typename T>
void put(std::vector<std::uint8_t> &out, T value) {
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

class Reader {
   public:
    explicit Reader(const std::vector<std::uint8_t> &bytes) : bytes_(bytes) {}

    template <typename T>
    T take(const std::string &field) {
        if (bytes_.size() - pos_ < sizeof(T)) {
            throw ParseError(field, "unexpected end of file at byte " + std::to_string(pos_));
        }
        T value;
        std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }
    size_t remaining() const { return bytes_.size() - pos_; }

   private:
    const std::vector<std::uint8_t> &bytes_;
    size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> encode(const UnitaryEnsemble &e) {
    std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
    out.push_back(kVersion);
    put(out, static_cast<std::uint32_t>(e.dim()));
    put(out, static_cast<std::uint32_t>(e.size()));
    out.push_back(e.involution() ? 1 : 0);
    if (const auto &inv = e.involution()) {
        for (int j : *inv) {
            put(out, static_cast<std::uint32_t>(j));
        }
    }
    out.reserve(out.size() + static_cast<size_t>(e.size() * e.dim() * e.dim()) * 16);
    for (const auto &u : e.unitaries()) {
        for (Index r = 0; r < u.rows(); r++) {
            for (Index c = 0; c < u.cols(); c++) {
                put(out, u(r, c).real());
                put(out, u(r, c).imag());
            }
        }
    }
    return out;
}

UnitaryEnsemble decode(const std::vector<std::uint8_t> &bytes, std::string label) {
    Reader in(bytes);
    for (char m : kMagic) {
        if (in.take<char>("magic") != m) {
            throw ParseError("magic", "expected \"QTPE\"");
        }
    }
    auto version = in.take<std::uint8_t>("version");
    if (version != kVersion) {
        throw ParseError("version", "unsupported version " + std::to_string(version));
    }
    auto dim = in.take<std::uint32_t>("dim");
    auto count = in.take<std::uint32_t>("count");
    if (dim == 0) {
        throw ParseError("dim", "must be positive");
    }
    if (count == 0) {
        throw ParseError("count", "must be positive");
    }
    auto flag = in.take<std::uint8_t>("involution_flag");
    if (flag > 1) {
        throw ParseError("involution_flag", "must be 0 or 1, got " + std::to_string(flag));
    }
    std::optional<std::vector<int>> inv;
    if (flag == 1) {
        inv.emplace(count);
        for (std::uint32_t i = 0; i < count; i++) {
            auto j = in.take<std::uint32_t>("involution");
            if (j >= count) {
                throw ParseError("involution", "target " + std::to_string(j) + " out of range");
            }
            (*inv)[i] = static_cast<int>(j);
        }
        for (std::uint32_t i = 0; i < count; i++) {
            if ((*inv)[static_cast<size_t>((*inv)[i])] != static_cast<int>(i)) {
                throw ValidationError("involution is not a bijective involution at index " + std::to_string(i));
            }
        }
    }
    unsigned __int128 need = static_cast<unsigned __int128>(count) * dim * dim * 16;
    if (need != in.remaining()) {
        throw ParseError("entries", "expected " + std::to_string(static_cast<std::uint64_t>(need)) +
                                        " bytes of matrix data, found " + std::to_string(in.remaining()));
    }
    std::vector<CMatrix> members(count, CMatrix(dim, dim));
    for (auto &u : members) {
        for (Index r = 0; r < dim; r++) {
            for (Index c = 0; c < dim; c++) {
                double re = in.take<double>("entries");
                double im = in.take<double>("entries");
                u(r, c) = {re, im};
            }
        }
    }
    return UnitaryEnsemble(std::move(members), std::move(inv), std::move(label));
}

std::filesystem::path sidecar_path(const std::filesystem::path &path) {
    auto p = path;
    p.replace_extension(".json");
    if (p == path) {
        p += ".json";
    }
    return p;
}

void save(const UnitaryEnsemble &e, const std::filesystem::path &path) {
    auto bytes = encode(e);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

UnitaryEnsemble load(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::string label = path.stem().string();
    auto side = sidecar_path(path);
    if (std::filesystem::exists(side)) {
        std::ifstream s(side);
        auto doc = nlohmann::json::parse(s, nullptr, false);
        if (!doc.is_discarded() && doc.contains("label") && doc["label"].is_string()) {
            label = doc["label"].get<std::string>();
        }
    }
    return decode(bytes, label);
}

void save_sidecar(const UnitaryEnsemble &e, const std::filesystem::path &path, std::optional<std::uint64_t> seed,
                  const nlohmann::json &provenance) {
    nlohmann::json doc;
    doc["schema_version"] = 1;
    doc["label"] = e.label();
    doc["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
    doc["dim"] = e.dim();
    doc["count"] = e.size();
    doc["explicitly_hermitian"] = e.explicitly_hermitian();
    doc["provenance"] = provenance;
    auto side = sidecar_path(path);
    std::ofstream out(side, std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + side.string() + "' for writing");
    }
    out << doc.dump(2) << '\n';
}

bool bit_identical(const UnitaryEnsemble &a, const UnitaryEnsemble &b) {
    return encode(a) == encode(b);
}

}  // namespace qtpe
