#include <catch2/catch_amalgamated.hpp>

#include "latlab/entanglement.hpp"
#include "support/oracle.hpp"
#include "support/testutil.hpp"

using namespace latlab;

namespace {

ChainLayout two_qudits(index_t dl, index_t dr) {
    // generic left/right factors built from boson sites of matching dims
    ChainLayout layout;
    layout.sites = {boson_site(dl - 1), boson_site(dr - 1)};
    return layout;
}

StateVector bell_state() {
    StateVector psi(4);
    psi.amp[0] = 1.0 / std::sqrt(2.0);
    psi.amp[3] = 1.0 / std::sqrt(2.0);
    return psi;
}

/// Apply a random unitary (product of Givens rotations with phases) to the
/// left factor only.
StateVector rotate_left(const StateVector& psi, index_t dl, index_t dr, Rng& rng) {
    StateVector out = psi;
    for (int sweep = 0; sweep < 3; ++sweep) {
        for (index_t a = 0; a + 1 < dl; ++a) {
            const double th = rng.uniform(0.0, 6.28);
            const double ph = rng.uniform(0.0, 6.28);
            const cplx c = std::cos(th), s = std::sin(th) * std::exp(cplx(0, ph));
            for (index_t j = 0; j < dr; ++j) {
                const cplx x = out.amp[static_cast<std::size_t>(a * dr + j)];
                const cplx y = out.amp[static_cast<std::size_t>((a + 1) * dr + j)];
                out.amp[static_cast<std::size_t>(a * dr + j)] = c * x + s * y;
                out.amp[static_cast<std::size_t>((a + 1) * dr + j)] = -std::conj(s) * x + std::conj(c) * y;
            }
        }
    }
    return out;
}

} // namespace

TEST_CASE("schmidt: product and bell states") {
    const ChainLayout layout = two_qudits(2, 2);
    StateVector prod(4);
    prod.amp[1] = 1.0; // |0> x |1>
    const SchmidtProfile p1 = schmidt_cut(prod, layout, 1);
    CHECK(p1.entropy == Catch::Approx(0.0).margin(1e-12));
    CHECK(p1.rank_eps(1e-8) == 1);

    const SchmidtProfile p2 = schmidt_cut(bell_state(), layout, 1);
    CHECK(p2.entropy == Catch::Approx(1.0).margin(1e-12));
    CHECK(p2.coefficients[0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(p2.coefficients[1] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("schmidt: random state respects the dimension bound") {
    Rng rng(3);
    const ChainLayout layout = two_qudits(4, 4);
    const StateVector psi = StateVector::random(16, rng);
    const SchmidtProfile p = schmidt_cut(psi, layout, 1);
    CHECK(p.entropy <= 2.0 + 1e-12);
    double sum = 0;
    for (const double l : p.coefficients) sum += l;
    CHECK(sum == Catch::Approx(1.0).margin(1e-10));
    for (std::size_t i = 1; i < p.coefficients.size(); ++i)
        CHECK(p.coefficients[i] <= p.coefficients[i - 1] + 1e-14);
}

TEST_CASE("schmidt coefficients agree with the singular-value oracle") {
    Rng rng(5);
    const StateVector psi = StateVector::random(6 * 5, rng);
    const ChainLayout layout = two_qudits(6, 5);
    const SchmidtProfile p = schmidt_cut(psi, layout, 1);
    const std::vector<double> ref = oracle::schmidt_coefficients(psi, 6, 5);
    REQUIRE(p.coefficients.size() <= ref.size());
    for (std::size_t i = 0; i < p.coefficients.size(); ++i)
        CHECK(p.coefficients[i] == Catch::Approx(ref[i]).margin(1e-11));
}

TEST_CASE("schmidt tails") {
    const ChainLayout layout = two_qudits(2, 2);
    const SchmidtProfile bell = schmidt_cut(bell_state(), layout, 1);
    CHECK(schmidt_tail(bell, 2) == 0.0);
    CHECK(schmidt_tail(bell, 1) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("viability: trivial and bell cases") {
    Rng rng(7);
    const StateVector psi = StateVector::random(12, rng);
    std::vector<StateVector> full;
    for (index_t i = 0; i < 3; ++i) full.push_back(StateVector::basis(3, i));
    CHECK(viability(full, psi, 3) <= 1e-12);

    const StateVector bell = bell_state();
    std::vector<StateVector> top1{StateVector::basis(2, 0)};
    CHECK(viability(top1, bell, 2) == Catch::Approx(0.5).margin(1e-12));

    std::vector<StateVector> skew{StateVector(std::vector<cplx>{0.9, 0.1})};
    CHECK_THROWS_AS(viability(skew, bell, 2), ContractViolation);
}

TEST_CASE("property: schmidt tail lemma on random subspaces") {
    Rng rng(11);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const index_t dl = 3 + static_cast<index_t>(rng.index(4));
        const index_t dr = 3 + static_cast<index_t>(rng.index(4));
        const StateVector psi = StateVector::random(dl * dr, rng);
        // random orthonormal subspace of the left factor
        const std::size_t v = 1 + rng.index(static_cast<std::uint64_t>(dl - 1));
        std::vector<StateVector> basis;
        for (std::size_t i = 0; i < v; ++i) {
            StateVector b = StateVector::random(dl, rng);
            for (const StateVector& prev : basis) axpy(b, -inner(prev, b), prev);
            b.normalize();
            basis.push_back(std::move(b));
        }
        const double delta = viability(basis, psi, dl);
        const ChainLayout layout = two_qudits(dl, dr);
        const SchmidtProfile prof = schmidt_cut(psi, layout, 1);
        CHECK(schmidt_tail(prof, v) <= delta + 1e-12);
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("property: tail matches delta when the subspace comes from a perturbed copy") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const index_t dl = 5, dr = 6;
        StateVector psi = StateVector::random(dl * dr, rng);
        // perturbed copy supplies the top Schmidt vectors
        StateVector noisy = psi;
        for (cplx& z : noisy.amp) z += 0.05 * rng.normal_complex();
        noisy.normalize();
        const ChainLayout layout = two_qudits(dl, dr);
        const SchmidtProfile approx = schmidt_cut(noisy, layout, 1);
        const std::size_t v = 2;
        std::vector<StateVector> basis(approx.left_vectors.begin(),
                                       approx.left_vectors.begin() + v);
        // re-orthonormalize defensively before measuring
        for (std::size_t i = 0; i < basis.size(); ++i) {
            for (std::size_t l = 0; l < i; ++l) axpy(basis[i], -inner(basis[l], basis[i]), basis[l]);
            basis[i].normalize();
        }
        const double delta = viability(basis, psi, dl);
        const SchmidtProfile exact = schmidt_cut(psi, layout, 1);
        CHECK(schmidt_tail(exact, v) <= delta + 1e-12);
    }
}

TEST_CASE("entropy is invariant under one-sided rotations") {
    Rng rng(17);
    const index_t dl = 4, dr = 5;
    const StateVector psi = StateVector::random(dl * dr, rng);
    const ChainLayout layout = two_qudits(dl, dr);
    const double s0 = schmidt_cut(psi, layout, 1).entropy;
    for (int trial = 0; trial < 5; ++trial) {
        const StateVector rot = rotate_left(psi, dl, dr, rng);
        CHECK(schmidt_cut(rot, layout, 1).entropy == Catch::Approx(s0).margin(1e-10));
    }
}

TEST_CASE("operator schmidt rank") {
    ChainLayout layout = two_qudits(3, 3);
    CHECK(operator_schmidt_rank_eps(SparseHermitian::identity(9), layout, 1, 1e-10) == 1);

    Rng rng(19);
    const auto a = testutil::random_hermitian(3, 0.9, rng);
    const auto b = testutil::random_hermitian(3, 0.9, rng);
    const auto c = testutil::random_hermitian(3, 0.9, rng);
    const auto d = testutil::random_hermitian(3, 0.9, rng);
    const auto ab = kron_compose({a, b});
    CHECK(operator_schmidt_rank_eps(ab, layout, 1, 1e-10) == 1);
    const auto abcd = add(ab, kron_compose({c, d}));
    CHECK(operator_schmidt_rank_eps(abcd, layout, 1, 1e-10) == 2);

    // rank_eps is non-increasing in eps
    std::size_t prev = 100;
    for (const double eps : {1e-12, 1e-6, 1e-2, 0.5}) {
        const std::size_t r = operator_schmidt_rank_eps(abcd, layout, 1, eps);
        CHECK(r <= prev);
        prev = r;
    }

    Caps caps;
    caps.op_svd_cap = 4;
    CHECK_THROWS_AS(operator_schmidt_rank_eps(abcd, layout, 1, 1e-10, caps), CapExceeded);
}
