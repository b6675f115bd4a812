#include <catch2/catch_amalgamated.hpp>

#include "latlab/hilbert.hpp"
#include "support/testutil.hpp"

using namespace latlab;

TEST_CASE("u1 link sites") {
    CHECK(u1_link_site(0).dim() == 1);
    const LocalSite s2 = u1_link_site(2);
    CHECK(s2.dim() == 5);
    for (std::int64_t k = -2; k <= 2; ++k)
        CHECK(s2.lambda[static_cast<std::size_t>(k + 2)] == HalfInt::from_int(k));
    CHECK(u1_link_site(6).dim() == 13);
}

TEST_CASE("boson sites") {
    CHECK(boson_site(0).dim() == 1);
    const LocalSite s = boson_site(8);
    CHECK(s.dim() == 9);
    CHECK(s.lambda.back() == HalfInt::from_int(8));
    const auto n_op = quantum_number_operator(s);
    const auto d = n_op.diagonal_values();
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i] == static_cast<double>(i));
}

TEST_CASE("su2 link sites: dimension sums over blocks") {
    CHECK(su2_link_site(HalfInt::from_int(0)).dim() == 1);
    CHECK(su2_link_site(HalfInt::from_twice(1)).dim() == 5);  // 1 + 4
    CHECK(su2_link_site(HalfInt::from_int(1)).dim() == 14);   // 1 + 4 + 9
}

TEST_CASE("site projectors: rank and algebra") {
    const LocalSite link = u1_link_site(2);
    const auto all = site_projector(link, HalfIntInterval::symmetric(HalfInt::from_int(2)));
    CHECK(all.max_abs_diff(SparseHermitian::identity(5)) == 0.0);

    const auto mid = site_projector(link, HalfIntInterval::symmetric(HalfInt::from_int(1)));
    double rank = 0;
    for (const double v : mid.diagonal_values()) rank += v;
    CHECK(rank == 3.0);

    const LocalSite su2 = su2_link_site(HalfInt::from_int(1));
    const auto low = site_projector(su2, [](HalfInt j) { return j <= HalfInt::from_twice(1); });
    double r2 = 0;
    for (const double v : low.diagonal_values()) r2 += v;
    CHECK(r2 == 5.0); // blocks j=0 (1) and j=1/2 (4)
}

TEST_CASE("projector algebra: products intersect, singletons resolve the identity") {
    const LocalSite link = u1_link_site(3);
    const auto pa = site_projector(link, HalfIntInterval{HalfInt::from_int(-2), HalfInt::from_int(1)});
    const auto pb = site_projector(link, HalfIntInterval{HalfInt::from_int(0), HalfInt::from_int(3)});
    const auto pab = site_projector(link, HalfIntInterval{HalfInt::from_int(0), HalfInt::from_int(1)});
    // diagonal product entrywise
    const auto da = pa.diagonal_values();
    const auto db = pb.diagonal_values();
    const auto dab = pab.diagonal_values();
    for (std::size_t i = 0; i < da.size(); ++i) CHECK(da[i] * db[i] == dab[i]);

    std::vector<double> acc(static_cast<std::size_t>(link.dim()), 0.0);
    for (std::int64_t k = -3; k <= 3; ++k) {
        const auto pk = site_projector(link, [k](HalfInt l) { return l == HalfInt::from_int(k); });
        const auto dk = pk.diagonal_values();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += dk[i];
    }
    for (const double v : acc) CHECK(v == 1.0);
}

TEST_CASE("local dimension is monotone in the cutoff for every site kind") {
    index_t prev = 0;
    for (std::int64_t lam = 0; lam <= 6; ++lam) {
        const index_t d = u1_link_site(lam).dim();
        CHECK(d >= prev);
        prev = d;
    }
    prev = 0;
    for (std::int64_t lam = 0; lam <= 6; ++lam) {
        const index_t d = boson_site(lam).dim();
        CHECK(d >= prev);
        prev = d;
    }
    prev = 0;
    for (std::int64_t tw = 0; tw <= 6; ++tw) {
        const index_t d = su2_link_site(HalfInt::from_twice(tw)).dim();
        CHECK(d >= prev);
        prev = d;
    }
}

TEST_CASE("quantum number operators") {
    const auto e = quantum_number_operator(u1_link_site(1));
    CHECK(e.max_abs_diff(SparseHermitian::diagonal({-1.0, 0.0, 1.0})) == 0.0);
    const auto z = quantum_number_operator(fermion_site(1));
    CHECK(z.nnz() == 0);
}

TEST_CASE("lift_to_chain: identities, commutation, and product ranks") {
    ChainLayout layout;
    layout.sites = {fermion_site(1), u1_link_site(1), fermion_site(1)};
    const auto lifted_id = lift_to_chain(layout, 1, SparseHermitian::identity(3));
    CHECK(lifted_id.max_abs_diff(SparseHermitian::identity(12)) == 0.0);

    // two lifted diagonals commute exactly (both diagonal on the chain)
    const auto a = lift_to_chain(layout, 0, SparseHermitian::diagonal({0.5, -0.5}));
    const auto b = lift_to_chain(layout, 1, SparseHermitian::diagonal({1.0, 2.0, 3.0}));
    CHECK(a.is_diagonal());
    CHECK(b.is_diagonal());

    // rank of a product of projectors on different sites multiplies
    ChainLayout two;
    two.sites = {u1_link_site(2), u1_link_site(2)};
    const auto p0 = lift_to_chain(two, 0, site_projector(two.sites[0],
                                                         HalfIntInterval::symmetric(HalfInt::from_int(1))));
    const auto p1 = lift_to_chain(two, 1, site_projector(two.sites[1],
                                                         HalfIntInterval::symmetric(HalfInt::from_int(0))));
    const auto d0 = p0.diagonal_values();
    const auto d1 = p1.diagonal_values();
    double rank = 0;
    for (std::size_t i = 0; i < d0.size(); ++i) rank += d0[i] * d1[i];
    CHECK(rank == 3.0 * 1.0);

    CHECK_THROWS_AS(lift_to_chain(layout, 0, SparseHermitian::identity(3)), ContractViolation);
}

TEST_CASE("jordan-wigner: canonical anticommutation on a mixed chain") {
    // two nodes with two modes each, a link in between: 4 fermionic modes
    ChainLayout layout;
    layout.sites = {fermion_site(2), u1_link_site(1), fermion_site(2)};
    layout.fermion_order = {{0, 0}, {0, 1}, {2, 0}, {2, 1}};
    const std::size_t m = layout.fermion_order.size();

    std::vector<GeneralSparse> c;
    for (std::size_t i = 0; i < m; ++i) c.push_back(fermion::annihilation(layout, i));

    auto max_abs = [](const GeneralSparse& g) {
        double worst = 0.0;
        for (const Entry& e : g.entries()) worst = std::max(worst, std::abs(e.val));
        return worst;
    };

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const GeneralSparse anti_cc = c[i] * c[j] + c[j] * c[i];
            CHECK(max_abs(anti_cc) == 0.0);
            GeneralSparse anti = c[i] * c[j].adjoint() + c[j].adjoint() * c[i];
            if (i == j) anti = anti + GeneralSparse::identity(anti.dim()).scaled(-1.0);
            CHECK(max_abs(anti) == 0.0);
        }
    }
}
