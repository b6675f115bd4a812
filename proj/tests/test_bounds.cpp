#include <catch2/catch_amalgamated.hpp>

#include "latlab/bounds.hpp"
#include "latlab/spectra.hpp"
#include "support/testutil.hpp"

using namespace latlab;

TEST_CASE("gauge-link mean bound formula") {
    CHECK(mean_abs_bound_lgt(1.0, 1.0) == Catch::Approx(2.0));
    CHECK(mean_abs_bound_lgt(0.0, 1.0) == 0.0);
    CHECK(mean_abs_bound_lgt(1.0, 4.0) == Catch::Approx(1.0));
    CHECK(mean_abs_bound_lgt(-1.0, 4.0) == Catch::Approx(1.0));
    CHECK_THROWS_AS(mean_abs_bound_lgt(1.0, 0.0), ContractViolation);
}

TEST_CASE("holstein mean bound formula") {
    CHECK(mean_abs_bound_hh(0.0, 1.0) == Catch::Approx(0.5));
    const double pi = 3.14159265358979323846;
    CHECK(mean_abs_bound_hh(0.5, 1.0) == Catch::Approx(0.5 + 2.0 / std::sqrt(pi) + 1.0).margin(1e-12));
    double prev = 0.0;
    for (const double g : {0.0, 0.25, 0.5, 1.0, 2.0}) {
        const double b = mean_abs_bound_hh(g, 1.0);
        CHECK(b >= prev);
        prev = b;
    }
    CHECK_THROWS_AS(mean_abs_bound_hh(1.0, 0.0), ContractViolation);
}

TEST_CASE("oscillator ground-state |X| expectation against a truncated computation") {
    // <0| |X| |0> = 1/sqrt(pi); evaluate |X| from its eigenbasis at two boson
    // cutoffs. The truncated value is a quadrature of |x| whose kink at zero
    // limits convergence, so the check is a margin plus a shrinking error.
    const double target = 1.0 / std::sqrt(3.14159265358979323846);
    auto measure = [](std::int64_t cutoff) {
        const GeneralSparse x = latlab::detail::boson_ladder_x(cutoff);
        const SparseHermitian xh = x.as_hermitian(1e-12).scaled(1.0 / std::sqrt(2.0));
        const SparseHermitian ax = abs_operator(xh);
        const StateVector vac = StateVector::basis(cutoff + 1, 0);
        return inner(vac, ax.apply(vac)).real();
    };
    const double coarse = measure(60);
    const double fine = measure(200);
    CHECK(std::abs(fine - target) < std::abs(coarse - target));
    CHECK(fine == Catch::Approx(target).margin(3e-3));
    CHECK(ho_ground_mean_2g_abs_x(0.5) ==
          Catch::Approx(2.0 * 0.5 / std::sqrt(3.14159265358979323846)).margin(1e-15));
}

TEST_CASE("tail envelope argument") {
    CHECK(tail_envelope(1.0, 2.0, 0.0, 1.0, 10.0) == Catch::Approx(2.0).margin(1e-12));
    CHECK(tail_envelope(1.0, 2.0, 0.0, 1.0, 2.0) == 0.0);
    double prev = -1.0;
    for (const double lam : {2.0, 4.0, 8.0, 16.0}) {
        const double e = tail_envelope(1.0, 2.0, 0.0, 1.0, lam);
        CHECK(e > prev);
        prev = e;
    }
    CHECK_THROWS_AS(tail_envelope(1.0, 2.0, 0.0, 1.0, 1.0), ContractViolation);
    CHECK_THROWS_AS(tail_envelope(1.0, -1.0, 0.0, 1.0, 10.0), ContractViolation);

    CHECK(multisite_envelope(4, 0.0) == 2.0);
    CHECK(delta2_envelope(4, 3.0, 0.0) == 24.0);
}

TEST_CASE("convex minorants evaluate, invert, and verify their shape") {
    ConvexLowerBound quad{ConvexLowerBound::Form::QuadraticMinusConstant, 2.0, 3.0};
    CHECK(quad.eval(2.0) == 5.0);
    CHECK(quad.inverse(5.0) == Catch::Approx(2.0));
    ConvexLowerBound lin{ConvexLowerBound::Form::LinearMinusConstant, 0.5, 0.25};
    CHECK(lin.eval(1.0) == 0.25);
    CHECK(lin.inverse(0.25) == Catch::Approx(1.0));
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.25 * i);
    CHECK(quad.convex_nondecreasing_on(grid));
    CHECK(lin.convex_nondecreasing_on(grid));
}

TEST_CASE("jensen: mean of a convex function dominates the function of the mean") {
    Rng rng(23);
    ConvexLowerBound quad{ConvexLowerBound::Form::QuadraticMinusConstant, 1.0, 2.0};
    ConvexLowerBound lin{ConvexLowerBound::Form::LinearMinusConstant, 1.0, 0.5};
    for (int trial = 0; trial < 50; ++trial) {
        // diagonal |Xi| with random non-negative eigenvalues, random state
        const index_t dim = 6;
        std::vector<double> xs;
        for (index_t i = 0; i < dim; ++i) xs.push_back(rng.uniform(0.0, 4.0));
        const StateVector psi = StateVector::random(dim, rng);
        double mean_x = 0.0, mean_lq = 0.0, mean_ll = 0.0;
        for (index_t i = 0; i < dim; ++i) {
            const double w = std::norm(psi.amp[static_cast<std::size_t>(i)]);
            mean_x += w * xs[static_cast<std::size_t>(i)];
            mean_lq += w * quad.eval(xs[static_cast<std::size_t>(i)]);
            mean_ll += w * lin.eval(xs[static_cast<std::size_t>(i)]);
        }
        CHECK(mean_lq >= quad.eval(mean_x) - 1e-10);
        CHECK(mean_ll >= lin.eval(mean_x) - 1e-10);
    }
}

TEST_CASE("variational lemma: decoupled system is the equality case") {
    // H = H_A (x) I + I (x) H_B with K_A = 0 and the trial state the local
    // ground state: both sides equal the local ground energy
    ModelSpec spec;
    spec.family = ModelFamily::U1LGT;
    spec.num_nodes = 2;
    spec.cutoff = HalfInt::from_int(2);
    spec.couplings.g_gm = 0.0; // decouple the link from the matter
    spec.couplings.lambda_g = 0.0;
    const ChainModel m = build_hamiltonian(spec);
    const GroundRecord g = ground_and_gap(m.hamiltonian, {1e-11, 2000, 3});

    VariationalWitness w;
    w.h_a = quantum_number_operator(m.layout.sites[1]); // E
    {
        // g_e E^2 on the link
        std::vector<double> e2;
        for (const HalfInt& l : m.layout.sites[1].lambda)
            e2.push_back(spec.couplings.g_e * l.value() * l.value());
        w.h_a = SparseHermitian::diagonal(e2);
    }
    w.k_a = SparseHermitian::zero(w.h_a.dim());
    w.psi_a = StateVector::basis(w.h_a.dim(), 2); // |k=0>
    w.minorant = ConvexLowerBound{ConvexLowerBound::Form::QuadraticMinusConstant,
                                  spec.couplings.g_e, 0.0};
    const VariationalCheck chk = check_variational_lemma(m, g.psi0, 0, w);
    CHECK(chk.holds);
    CHECK(chk.lhs == Catch::Approx(chk.rhs).margin(1e-9));
}

TEST_CASE("variational lemma: U(1) links with the constant dominator") {
    ModelSpec spec;
    spec.family = ModelFamily::U1LGT;
    spec.num_nodes = 3;
    spec.cutoff = HalfInt::from_int(3);
    const ChainModel m = build_hamiltonian(spec);
    const GroundRecord g = ground_and_gap(m.hamiltonian, {1e-11, 4000, 5});
    for (std::size_t p = 0; p < 2; ++p) {
        const LocalSite& link = m.layout.sites[*m.qn_layout_site[p]];
        std::vector<double> e2;
        for (const HalfInt& l : link.lambda)
            e2.push_back(spec.couplings.g_e * l.value() * l.value());
        VariationalWitness w;
        w.h_a = SparseHermitian::diagonal(e2);
        w.k_a = SparseHermitian::identity(link.dim()).scaled(2.0 * std::abs(spec.couplings.g_gm));
        w.psi_a = StateVector::basis(link.dim(), link.dim() / 2); // |k=0>
        w.minorant = ConvexLowerBound{ConvexLowerBound::Form::QuadraticMinusConstant,
                                      spec.couplings.g_e, 2.0 * std::abs(spec.couplings.g_gm)};
        const VariationalCheck chk = check_variational_lemma(m, g.psi0, p, w);
        CHECK(chk.holds);
        // the bound chain: <|lambda|> <= L^{-1}(rhs)
        const double measured = mean_abs_quantum_number(m, g.psi0, p);
        CHECK(measured <= w.minorant.inverse(chk.rhs) + 1e-8);
        CHECK(w.minorant.inverse(2.0 * std::abs(spec.couplings.g_gm)) ==
              Catch::Approx(mean_abs_bound_lgt(spec.couplings.g_gm, spec.couplings.g_e)).margin(1e-12));
    }
}

TEST_CASE("variational lemma: Holstein boson with the |X| dominator") {
    ModelSpec spec;
    spec.family = ModelFamily::HubbardHolstein;
    spec.num_nodes = 2;
    spec.cutoff = HalfInt::from_int(6);
    spec.couplings.g = 0.5;
    const ChainModel m = build_hamiltonian(spec);
    const GroundRecord g = ground_and_gap(m.hamiltonian, {1e-11, 4000, 7});

    const std::int64_t lam = spec.cutoff.twice() / 2;
    VariationalWitness w;
    std::vector<double> nb;
    for (std::int64_t k = 0; k <= lam; ++k) nb.push_back(spec.couplings.omega0 * static_cast<double>(k));
    w.h_a = SparseHermitian::diagonal(nb);
    const SparseHermitian x =
        latlab::detail::boson_ladder_x(lam).as_hermitian(1e-12).scaled(1.0 / std::sqrt(2.0));
    w.k_a = abs_operator(x).scaled(std::sqrt(2.0) * std::abs(spec.couplings.g));
    w.psi_a = StateVector::basis(lam + 1, 0);
    w.minorant = ConvexLowerBound{ConvexLowerBound::Form::LinearMinusConstant,
                                  spec.couplings.omega0 / 2.0,
                                  spec.couplings.omega0 / 4.0 +
                                      2.0 * spec.couplings.g * spec.couplings.g / spec.couplings.omega0};
    for (std::size_t p = 0; p < 2; ++p) {
        const VariationalCheck chk = check_variational_lemma(m, g.psi0, p, w);
        CHECK(chk.holds);
    }
}

TEST_CASE("measured means sit inside the closed-form bounds on a small chain") {
    ModelSpec spec;
    spec.family = ModelFamily::U1LGT;
    spec.num_nodes = 3;
    spec.cutoff = HalfInt::from_int(4);
    const ChainModel m = build_hamiltonian(spec);
    const GroundRecord g = ground_and_gap(m.hamiltonian, {1e-11, 4000, 9});
    const double bound = mean_abs_bound_lgt(spec.couplings.g_gm, spec.couplings.g_e);
    for (std::size_t p = 0; p < 2; ++p)
        CHECK(mean_abs_quantum_number(m, g.psi0, p) <= bound + 1e-8);
}
