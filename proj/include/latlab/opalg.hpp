#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "latlab/sparse.hpp"

namespace latlab {

/// General (not necessarily Hermitian) square sparse matrix. Construction
/// scaffolding for second-quantized operators: ladder operators, link
/// raising/lowering, and their products, which are only Hermitian after
/// adding the conjugate. Not part of the operator API proper.
class GeneralSparse {
public:
    GeneralSparse() = default;
    GeneralSparse(index_t dim, std::vector<Entry> entries)
        : dim_(dim), entries_(std::move(entries)) {
        canonicalize();
    }

    static GeneralSparse identity(index_t dim) {
        std::vector<Entry> e;
        e.reserve(static_cast<std::size_t>(dim));
        for (index_t i = 0; i < dim; ++i) e.push_back({i, i, 1.0});
        return GeneralSparse(dim, std::move(e));
    }

    static GeneralSparse zero(index_t dim) { return GeneralSparse(dim, {}); }

    static GeneralSparse from_hermitian(const SparseHermitian& a) {
        return GeneralSparse(a.dim(), detail::full_entries(a));
    }

    index_t dim() const { return dim_; }
    const std::vector<Entry>& entries() const { return entries_; }

    GeneralSparse adjoint() const {
        std::vector<Entry> e;
        e.reserve(entries_.size());
        for (const Entry& x : entries_) e.push_back({x.col, x.row, std::conj(x.val)});
        return GeneralSparse(dim_, std::move(e));
    }

    GeneralSparse scaled(cplx f) const {
        std::vector<Entry> e = entries_;
        for (Entry& x : e) x.val *= f;
        return GeneralSparse(dim_, std::move(e));
    }

    friend GeneralSparse operator+(const GeneralSparse& a, const GeneralSparse& b) {
        if (a.dim_ != b.dim_) throw ContractViolation("GeneralSparse +: dimension mismatch");
        std::vector<Entry> e = a.entries_;
        e.insert(e.end(), b.entries_.begin(), b.entries_.end());
        return GeneralSparse(a.dim_, std::move(e));
    }

    friend GeneralSparse operator*(const GeneralSparse& a, const GeneralSparse& b) {
        if (a.dim_ != b.dim_) throw ContractViolation("GeneralSparse *: dimension mismatch");
        // Index b by row for the sparse-sparse product.
        std::vector<std::size_t> start(static_cast<std::size_t>(b.dim_) + 1, 0);
        for (const Entry& e : b.entries_) ++start[static_cast<std::size_t>(e.row) + 1];
        for (std::size_t i = 1; i < start.size(); ++i) start[i] += start[i - 1];
        std::vector<Entry> out;
        out.reserve(a.entries_.size());
        for (const Entry& ea : a.entries_) {
            const std::size_t lo = start[static_cast<std::size_t>(ea.col)];
            const std::size_t hi = start[static_cast<std::size_t>(ea.col) + 1];
            for (std::size_t k = lo; k < hi; ++k) {
                const Entry& eb = b.entries_[k];
                out.push_back({ea.row, eb.col, ea.val * eb.val});
            }
        }
        return GeneralSparse(a.dim_, std::move(out));
    }

    GeneralSparse kron(const GeneralSparse& b) const {
        std::vector<Entry> out;
        out.reserve(entries_.size() * b.entries_.size());
        for (const Entry& ea : entries_)
            for (const Entry& eb : b.entries_)
                out.push_back({ea.row * b.dim_ + eb.row, ea.col * b.dim_ + eb.col, ea.val * eb.val});
        return GeneralSparse(dim_ * b.dim_, std::move(out));
    }

    /// A + A^dagger as a SparseHermitian.
    SparseHermitian plus_adjoint() const {
        // Route through the full-matrix Hermitian check so mirrored pairs are
        // represented once; SparseHermitian::build would fold each pair twice.
        return (*this + adjoint()).as_hermitian(1e-9);
    }

    /// Interprets an already-Hermitian matrix; throws if it is not one.
    SparseHermitian as_hermitian(double tol = 1e-12) const {
        // Verify M == M^dagger entrywise, then keep the upper triangle.
        std::unordered_map<std::uint64_t, cplx> map;
        map.reserve(entries_.size() * 2);
        for (const Entry& e : entries_)
            map[key(e.row, e.col)] += e.val;
        double scale = 0.0;
        for (const auto& [k, v] : map) scale = std::max(scale, std::abs(v));
        std::vector<Entry> upper;
        upper.reserve(map.size() / 2 + 1);
        for (const auto& [k, v] : map) {
            const index_t r = static_cast<index_t>(k >> 32);
            const index_t c = static_cast<index_t>(k & 0xffffffffull);
            const auto it = map.find(key(c, r));
            const cplx mirror = it == map.end() ? cplx(0.0) : it->second;
            if (std::abs(v - std::conj(mirror)) > tol * std::max(1.0, scale))
                throw ContractViolation("as_hermitian: matrix is not Hermitian");
            if (r <= c) upper.push_back({r, c, v});
        }
        return SparseHermitian::build(dim_, std::move(upper));
    }

private:
    static std::uint64_t key(index_t r, index_t c) {
        return (static_cast<std::uint64_t>(r) << 32) | static_cast<std::uint64_t>(c);
    }

    void canonicalize() {
        std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        std::vector<Entry> merged;
        merged.reserve(entries_.size());
        for (const Entry& e : entries_) {
            if (!merged.empty() && merged.back().row == e.row && merged.back().col == e.col)
                merged.back().val += e.val;
            else
                merged.push_back(e);
        }
        std::erase_if(merged, [](const Entry& e) { return e.val == cplx(0.0); });
        entries_ = std::move(merged);
    }

    index_t dim_ = 0;
    std::vector<Entry> entries_;
};

} // namespace latlab
