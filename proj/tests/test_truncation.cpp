#include <catch2/catch_amalgamated.hpp>

#include "latlab/spectra.hpp"
#include "latlab/truncation.hpp"
#include "support/testutil.hpp"

using namespace latlab;
using testutil::random_hermitian;

namespace {

ModelSpec u1_spec(int n, std::int64_t lam) {
    ModelSpec s;
    s.family = ModelFamily::U1LGT;
    s.num_nodes = n;
    s.cutoff = HalfInt::from_int(lam);
    return s;
}

double projector_rank(const SparseHermitian& p) {
    double r = 0;
    for (const double v : p.diagonal_values()) r += v;
    return r;
}

} // namespace

TEST_CASE("window projector: full window is the identity, ranks count states") {
    const ChainModel m = build_hamiltonian(u1_spec(3, 2));
    Window full{0, 3, HalfInt::from_int(2), HalfInt::from_int(2)};
    CHECK(window_projector(m, full).max_abs_diff(SparseHermitian::identity(m.hamiltonian.dim())) ==
          0.0);

    // single-site window: rank = d(cut) x (dims of everything else)
    Window one{0, 1, HalfInt::from_int(1), HalfInt::from_int(2)};
    const double rank1 = projector_rank(window_projector(m, one));
    CHECK(rank1 == 3.0 * (m.hamiltonian.dim() / 5.0));

    // both links cut to 1: 3 x 3 field values survive out of 5 x 5
    Window both{0, 3, HalfInt::from_int(1), HalfInt::from_int(2)};
    const double rank2 = projector_rank(window_projector(m, both));
    CHECK(rank2 == 9.0 * 8.0); // 2^3 fermion states
}

TEST_CASE("restrict: identity and diagonal examples") {
    const auto proj = SparseHermitian::diagonal({1.0, 0.0, 1.0});
    const Restriction r(proj);
    CHECK(r.sub_dim() == 2);
    CHECK(r.restrict_op(SparseHermitian::identity(3))
              .max_abs_diff(SparseHermitian::identity(2)) == 0.0);
    CHECK(r.restrict_op(SparseHermitian::diagonal({1.0, 2.0, 3.0}))
              .max_abs_diff(SparseHermitian::diagonal({1.0, 3.0})) == 0.0);
    CHECK_THROWS_AS(Restriction(SparseHermitian::diagonal({0.0, 0.0})), ContractViolation);
    CHECK_THROWS_AS(Restriction(SparseHermitian::diagonal({0.5, 1.0})), ContractViolation);
}

TEST_CASE("restrict: variational ordering against the dense oracle") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const index_t dim = 6 + static_cast<index_t>(rng.index(20));
        const auto h = random_hermitian(dim, 0.4, rng);
        std::vector<double> mask(static_cast<std::size_t>(dim), 0.0);
        index_t kept = 0;
        for (double& v : mask)
            if (rng.uniform() < 0.6) {
                v = 1.0;
                ++kept;
            }
        if (kept == 0) mask[0] = 1.0;
        const Restriction r{SparseHermitian::diagonal(mask)};
        const auto sub = r.restrict_op(h);
        const double e0 = dense_oracle(h).eigenvalues[0];
        const double e0p = dense_oracle(sub).eigenvalues[0];
        CHECK(e0 <= e0p + 1e-10);
    }
}

TEST_CASE("spectral truncation: the defining example and the exact early out") {
    const auto a = SparseHermitian::diagonal({1.0, 2.0, 10.0});
    const auto cut = spectral_truncate(a, 5.0);
    CHECK(cut.op.max_abs_diff(SparseHermitian::diagonal({1.0, 2.0, 2.0})) <= 1e-12);
    CHECK(cut.kept_norm == 2.0);

    const auto same = spectral_truncate(a, 10.0);
    CHECK(same.op.max_abs_diff(a) == 0.0); // entrywise identical

    const auto emptied = spectral_truncate(a, 0.5);
    CHECK(emptied.nothing_below);
    CHECK(emptied.op.nnz() == 0);
}

TEST_CASE("spectral truncation: commutes with A and freezes the kept eigenvalues") {
    Rng rng(9);
    const auto a = random_hermitian(30, 0.5, rng);
    const auto full = dense_oracle(a);
    const double t = full.eigenvalues[15];
    const auto cut = spectral_truncate(a, t);

    // [A, A^{<=t}] = 0 via matvecs on random probes
    for (int p = 0; p < 5; ++p) {
        const StateVector v = StateVector::random(30, rng);
        StateVector ab = a.apply(cut.op.apply(v));
        const StateVector ba = cut.op.apply(a.apply(v));
        axpy(ab, -1.0, ba);
        CHECK(ab.norm() <= 1e-10);
    }
    // kept eigenvalues identical, the rest flattened to ||A P_t||
    const auto ceig = dense_oracle(cut.op);
    for (std::size_t i = 0; i <= 15; ++i)
        CHECK(ceig.eigenvalues[i] == Catch::Approx(full.eigenvalues[i]).margin(1e-11));
    for (std::size_t i = 16; i < 30; ++i)
        CHECK(ceig.eigenvalues[i] == Catch::Approx(cut.kept_norm).margin(1e-11));
    // shared eigenvectors: A^{<=t} v_i stays parallel to v_i
    for (const std::size_t i : {3u, 20u}) {
        const StateVector& v = full.eigenvectors[i];
        StateVector w = cut.op.apply(v);
        axpy(w, -inner(v, w), v);
        CHECK(w.norm() <= 1e-10);
    }
}

TEST_CASE("double-prime assembly: trivial regimes") {
    const ChainModel m = build_hamiltonian(u1_spec(3, 1));
    Window w{1, 2, HalfInt::from_int(1), HalfInt::from_int(1)};
    TruncationPipeline pipe(m, w, {1e-11, 4000, 3});
    // enormous t: both boundary blocks keep everything, H'' == H' and the
    // ground data coincide exactly
    const TruncationReport rep = pipe.report_at(1e9);
    CHECK(rep.delta1 == 0.0);
    CHECK(rep.delta2 == 0.0);
    CHECK(rep.dist_p_pp <= 1e-12);
    CHECK(rep.dist_0_pp <= 1e-12);
    CHECK(rep.eps0_pp == Catch::Approx(rep.eps0_p).margin(1e-12));
}

TEST_CASE("double-prime assembly: needs the two-block window shape") {
    std::vector<SparseHermitian> too_few(3, SparseHermitian::identity(4));
    CHECK_THROWS_AS(assemble_double_prime(too_few, 1.0), ContractViolation);
}

TEST_CASE("ground energy of H'' approaches H' as t sweeps the block spectra") {
    const ChainModel m = build_hamiltonian(u1_spec(3, 2));
    Window w{1, 2, HalfInt::from_int(1), HalfInt::from_int(2)};
    TruncationPipeline pipe(m, w, {1e-11, 4000, 5});
    const double e_prime = pipe.prime_record().eps0;
    double prev_err = std::numeric_limits<double>::infinity();
    for (const double t : {1.0, 3.0, 8.0, 20.0, 60.0, 1e4}) {
        const TruncationReport rep = pipe.report_at(t);
        const double err = std::abs(rep.eps0_pp - e_prime);
        CHECK(err <= prev_err + 1e-10);
        prev_err = err;
    }
}

TEST_CASE("truncation error functionals") {
    const ChainModel m = build_hamiltonian(u1_spec(2, 2));
    const GroundRecord g = ground_and_gap(m.hamiltonian, {1e-11, 2000, 2});

    // full window: state entirely inside
    Window full{0, 2, HalfInt::from_int(2), HalfInt::from_int(2)};
    const auto [d1a, d2a] = truncation_errors(m.hamiltonian, g.psi0, window_projector(m, full));
    CHECK(d1a == 0.0);
    CHECK(d2a == 0.0);

    // complement projector kills the whole state -> delta1 = 1
    const auto zero = SparseHermitian::diagonal(
        std::vector<double>(static_cast<std::size_t>(m.hamiltonian.dim()), 0.0));
    const auto [d1b, d2b] = truncation_errors(m.hamiltonian, g.psi0, zero);
    CHECK(d1b == Catch::Approx(1.0).margin(1e-12));
    CHECK(d2b == 0.0); // the projector also annihilates H w

    // delta1 shrinks as the window cutoff grows
    double prev = 2.0;
    for (std::int64_t lam = 0; lam <= 2; ++lam) {
        Window w{0, 2, HalfInt::from_int(lam), HalfInt::from_int(2)};
        const auto [d1, d2] = truncation_errors(m.hamiltonian, g.psi0, window_projector(m, w));
        CHECK(d1 <= prev + 1e-12);
        prev = d1;
    }
}

TEST_CASE("delta2 decreases with the window cutoff on genuine boson tails") {
    // the Holstein boson has unconstrained occupation tails, so both error
    // functionals respond smoothly to the window cutoff
    ModelSpec spec;
    spec.family = ModelFamily::HubbardHolstein;
    spec.num_nodes = 2;
    spec.cutoff = HalfInt::from_int(10);
    spec.couplings.g = 1.2;
    const ChainModel m = build_hamiltonian(spec);
    const GroundRecord g = ground_and_gap(m.hamiltonian, {1e-11, 3000, 7});
    double prev_d1 = std::numeric_limits<double>::infinity();
    double prev_d2 = std::numeric_limits<double>::infinity();
    for (std::int64_t lam_in = 1; lam_in <= 6; ++lam_in) {
        Window w{0, 2, HalfInt::from_int(lam_in), HalfInt::from_int(10)};
        const auto [d1, d2] = truncation_errors(m.hamiltonian, g.psi0, window_projector(m, w));
        CHECK(d1 > 0.0);
        CHECK(d1 <= prev_d1 + 1e-12);
        CHECK(d2 <= prev_d2 + 1e-10);
        prev_d1 = d1;
        prev_d2 = d2;
    }
}

TEST_CASE("parameter schedule: frozen example and monotonicity") {
    std::vector<HalfInt> grid;
    for (std::int64_t l = 1; l <= 64; ++l) grid.push_back(HalfInt::from_int(l));
    auto norm_of = [](HalfInt lam) { return lam.value() * lam.value(); };

    // r=0, lambda_bar=1, gap=1, c1=1, s=4, delta=0.1:
    // threshold = 2 + log^2(40) = 15.608...; first integer cutoff is 16
    const ScheduleResult r = parameter_schedule(1.0, 4, 0.1, 0.0, 1.0, norm_of, grid);
    CHECK(r.lambda == HalfInt::from_int(16));
    CHECK(r.threshold == Catch::Approx(2.0 + std::pow(std::log(40.0), 2)).margin(1e-12));
    CHECK(r.t == Catch::Approx(std::max(256.0 * std::log(10.0), 256.0 * 256.0)).margin(1e-9));

    // smaller delta never shrinks the outputs
    const ScheduleResult r2 = parameter_schedule(1.0, 4, 0.01, 0.0, 1.0, norm_of, grid);
    CHECK(r2.lambda.twice() >= r.lambda.twice());
    CHECK(r2.t >= r.t - 1e-12);

    // lambda_bar = 0 reduces the threshold to the polylog part
    const ScheduleResult r3 = parameter_schedule(1.0, 4, 0.1, 0.0, 0.0, norm_of, grid);
    CHECK(r3.threshold == Catch::Approx(std::pow(std::log(40.0), 2)).margin(1e-12));

    std::vector<HalfInt> small_grid{HalfInt::from_int(1), HalfInt::from_int(2)};
    CHECK_THROWS_AS(parameter_schedule(0.01, 64, 0.001, 0.0, 5.0, norm_of, small_grid), Error);
}
