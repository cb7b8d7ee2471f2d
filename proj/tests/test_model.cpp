#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "triwave/model.hpp"
#include "triwave/random.hpp"
#include "triwave/solver.hpp"

using namespace triwave;

namespace {

GridSpec make_spec(int dim, int n, double L,
                   Discretization d = Discretization::spectral_periodic) {
    GridSpec s;
    s.dimension = dim;
    s.points_per_axis = n;
    s.half_width = L;
    s.discretization = d;
    return s;
}

ModelParams base_params(int dim) {
    ModelParams prm;
    prm.dimension = dim;
    prm.p = 2.5;
    return prm;
}

Field gaussian_field(const GridPtr& g) {
    const int N = g->dimension();
    return sample(g, [N](const double* x) {
        double r2 = 0.0;
        for (int d = 0; d < N; ++d) r2 += x[d] * x[d];
        return std::exp(-0.5 * r2);
    });
}

TriField noise_triple(const GridPtr& g, std::uint64_t seed) {
    TriField t(g);
    for (int i = 0; i < 3; ++i) t.component(i) = band_limited_noise(g, seed + i);
    return t;
}

std::string table_path() {
    return std::string(TRIWAVE_SOURCE_DIR) + "/data/gn_constants.txt";
}

}  // namespace

TEST_CASE("ModelParams validation cites the admissible ranges") {
    ModelParams prm = base_params(3);
    REQUIRE_NOTHROW(prm.validate());
    prm.p = 4.0;  // >= 10/3 for N = 3
    REQUIRE_THROWS_WITH(prm.validate(), Catch::Matchers::ContainsSubstring("2 < p < 2 + 4/N"));
    prm = base_params(1);
    prm.p = 4.0;  // fine for N = 1
    REQUIRE_NOTHROW(prm.validate());
    prm.beta = -1.0;
    REQUIRE_THROWS_AS(prm.validate(), config_error);
    prm = base_params(3);
    prm.mass_b = 0.0;
    REQUIRE_THROWS_AS(prm.validate(), config_error);
    prm = base_params(3);
    prm.mu2 = -0.5;
    REQUIRE_THROWS_AS(prm.validate(), config_error);
}

TEST_CASE("sample_potential") {
    const GridPtr g = build_grid(make_spec(3, 16, 8.0));
    SECTION("zero kind") {
        PotentialOptions opt;
        opt.kind = PotentialKind::zero;
        const PotentialSet pot = sample_potential(opt, g);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(pot.minima[i] == 0.0);
            REQUIRE_FALSE(pot.coercive[i]);
            for (double v : pot[i].values) REQUIRE(v == 0.0);
        }
    }
    SECTION("harmonic: the sampled minimum is V(0) = 0") {
        PotentialOptions opt;
        opt.kind = PotentialKind::harmonic;
        const PotentialSet pot = sample_potential(opt, g);
        for (int i = 0; i < 3; ++i) {
            REQUIRE(pot.minima[i] == 0.0);
            REQUIRE(pot.coercive[i]);
        }
    }
    SECTION("shifted harmonic with a negative offset keeps c_i = offset") {
        PotentialOptions opt;
        opt.kind = PotentialKind::shifted_harmonic;
        opt.offsets = {-5.0, 0.5, 0.0};
        const PotentialSet pot = sample_potential(opt, g);
        REQUIRE(pot.minima[0] == -5.0);
        REQUIRE(pot.minima[1] == 0.5);
        REQUIRE(pot.minima[2] == 0.0);
        // negative c_i stays admissible for the solver-facing validation
        REQUIRE_NOTHROW(base_params(3).validate());
    }
    SECTION("anisotropic weights; zero weight clears the coercive flag") {
        PotentialOptions opt;
        opt.kind = PotentialKind::anisotropic;
        opt.weights[0] = {1.0, 2.0, 3.0};
        opt.weights[1] = {1.0, 0.0, 1.0};
        const PotentialSet pot = sample_potential(opt, g);
        REQUIRE(pot.coercive[0]);
        REQUIRE_FALSE(pot.coercive[1]);
    }
    SECTION("from_file round trip and shape mismatch") {
        const auto dir = std::filesystem::temp_directory_path() / "triwave_model_test";
        std::filesystem::create_directories(dir);
        PotentialOptions harm;
        harm.kind = PotentialKind::harmonic;
        const PotentialSet pot = sample_potential(harm, g);
        for (int i = 0; i < 3; ++i)
            save_field(pot[i], (dir / ("v" + std::to_string(i + 1) + ".bin")).string());
        PotentialOptions from;
        from.kind = PotentialKind::from_file;
        for (int i = 0; i < 3; ++i)
            from.files[i] = (dir / ("v" + std::to_string(i + 1) + ".bin")).string();
        const PotentialSet loaded = sample_potential(from, g);
        REQUIRE(loaded[0].values == pot[0].values);
        REQUIRE(loaded.minima[0] == 0.0);
        REQUIRE_FALSE(loaded.coercive[0]);  // formula unknown

        const GridPtr small = build_grid(make_spec(3, 8, 8.0));
        REQUIRE_THROWS_AS(sample_potential(from, small), input_error);
    }
}

TEST_CASE("energy") {
    SECTION("zero triple has zero energy") {
        const GridPtr g = build_grid(make_spec(2, 16, 4.0));
        ModelParams prm = base_params(2);
        PotentialOptions opt;
        opt.kind = PotentialKind::harmonic;
        const PotentialSet pot = sample_potential(opt, g);
        REQUIRE(energy(TriField(g), pot, prm) == 0.0);
        REQUIRE(energy_free(TriField(g), prm) == 0.0);
    }
    SECTION("constant fields on a periodic box match the closed form") {
        const double L = 3.0;
        const GridPtr g = build_grid(make_spec(1, 32, L));
        ModelParams prm = base_params(1);
        prm.mu1 = 0.7;
        prm.mu2 = 1.3;
        prm.mu3 = 0.4;
        prm.beta = 0.9;
        prm.p = 2.8;
        prm.mass_a = 1.5;
        prm.mass_b = 0.8;
        prm.mass_c = 2.2;
        const double vol = 2.0 * L;
        TriField t(g);
        for (int i = 0; i < 3; ++i)
            for (double& v : t.component(i).values)
                v = std::sqrt(prm.target_mass(i) / vol);
        PotentialOptions opt;
        opt.kind = PotentialKind::zero;
        const PotentialSet pot = sample_potential(opt, g);
        const double expected =
            -(prm.mu1 * std::pow(prm.mass_a, prm.p / 2) + prm.mu2 * std::pow(prm.mass_b, prm.p / 2) +
              prm.mu3 * std::pow(prm.mass_c, prm.p / 2)) /
                prm.p * std::pow(vol, 1.0 - prm.p / 2) -
            prm.beta * std::sqrt(prm.mass_a * prm.mass_b * prm.mass_c / vol);
        REQUIRE(energy(t, pot, prm) == Catch::Approx(expected).epsilon(1e-12));
        REQUIRE(energy_free(t, prm) == Catch::Approx(expected).epsilon(1e-12));
    }
    SECTION("Gaussian triple in the harmonic trap: 3*(3/2)*pi^(3/2)") {
        const GridPtr g = build_grid(make_spec(3, 64, 8.0));
        ModelParams prm = base_params(3);
        prm.mu1 = prm.mu2 = prm.mu3 = 0.0;
        prm.beta = 0.0;
        PotentialOptions opt;
        opt.kind = PotentialKind::harmonic;
        const PotentialSet pot = sample_potential(opt, g);
        TriField t(g);
        for (int i = 0; i < 3; ++i) t.component(i) = gaussian_field(g);
        const double expected = 4.5 * std::pow(std::numbers::pi, 1.5);
        REQUIRE(energy(t, pot, prm) == Catch::Approx(expected).margin(1e-6));
    }
    SECTION("exact trapped/free decomposition on random fields") {
        const GridPtr g = build_grid(make_spec(3, 16, 8.0));
        ModelParams prm = base_params(3);
        PotentialOptions opt;
        opt.kind = PotentialKind::shifted_harmonic;
        opt.offsets = {0.0, -1.0, -2.0};
        const PotentialSet pot = sample_potential(opt, g);
        for (std::uint64_t seed : {1, 2, 3}) {
            const TriField t = noise_triple(g, 100 + seed);
            double vterm = 0.0;
            for (int i = 0; i < 3; ++i) vterm += weighted_sq_integral(pot[i], t.component(i));
            vterm *= 0.5;
            const double e = energy(t, pot, prm);
            const double ef = energy_free(t, prm);
            const double scale = std::max({1.0, std::abs(e), std::abs(ef), std::abs(vterm)});
            REQUIRE(std::abs(e - ef - vterm) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("el_gradient") {
    SECTION("zero triple maps to the zero triple") {
        const GridPtr g = build_grid(make_spec(2, 12, 4.0, Discretization::fd_dirichlet));
        ModelParams prm = base_params(2);
        PotentialOptions opt;
        opt.kind = PotentialKind::harmonic;
        const PotentialSet pot = sample_potential(opt, g);
        const TriField gvec = el_gradient(TriField(g), pot, prm);
        for (int i = 0; i < 3; ++i)
            for (double v : gvec.component(i).values) REQUIRE(v == 0.0);
    }
    SECTION("directional derivative matches central differences at second order") {
        const GridPtr g = build_grid(make_spec(2, 16, 6.0));
        ModelParams prm = base_params(2);
        prm.p = 3.0;
        prm.beta = 0.8;
        prm.mu1 = 1.1;
        prm.mu2 = 0.6;
        prm.mu3 = 0.9;
        PotentialOptions opt;
        opt.kind = PotentialKind::shifted_harmonic;
        opt.offsets = {0.0, -0.5, 1.0};
        const PotentialSet pot = sample_potential(opt, g);

        const TriField t = noise_triple(g, 500);
        const TriField gvec = el_gradient(t, pot, prm);
        for (int dir_seed = 0; dir_seed < 20; ++dir_seed) {
            const TriField phi = noise_triple(g, 900 + 3 * static_cast<std::uint64_t>(dir_seed));
            double pairing = 0.0;
            for (int i = 0; i < 3; ++i) pairing += inner(gvec.component(i), phi.component(i));

            auto perturbed_energy = [&](double eps) {
                TriField s(g);
                for (int i = 0; i < 3; ++i)
                    for (std::size_t j = 0; j < s.component(i).size(); ++j)
                        s.component(i).values[j] =
                            t.component(i).values[j] + eps * phi.component(i).values[j];
                return energy(s, pot, prm);
            };
            double prev_err = 0.0;
            const double eps0 = 1e-2;
            for (int k = 0; k < 3; ++k) {
                const double eps = eps0 / (1 << k);
                const double fd = (perturbed_energy(eps) - perturbed_energy(-eps)) / (2.0 * eps);
                const double err = std::abs(fd - pairing);
                if (k > 0 && prev_err > 1e-10)
                    REQUIRE(err <= prev_err / 3.0);  // second-order decay (ratio 4 up to noise)
                prev_err = err;
            }
        }
    }
    SECTION("oscillator eigenpair: gradient equals N u for the Gaussian") {
        const GridPtr g = build_grid(make_spec(3, 48, 8.0));
        ModelParams prm = base_params(3);
        prm.mu1 = prm.mu2 = prm.mu3 = 0.0;
        prm.beta = 0.0;
        PotentialOptions opt;
        opt.kind = PotentialKind::harmonic;
        const PotentialSet pot = sample_potential(opt, g);
        TriField t(g);
        for (int i = 0; i < 3; ++i) t.component(i) = gaussian_field(g);
        const TriField gvec = el_gradient(t, pot, prm);
        Field diff(g);
        for (std::size_t j = 0; j < diff.size(); ++j)
            diff.values[j] = gvec.u.values[j] - 3.0 * t.u.values[j];
        REQUIRE(norm_l2(diff) < 1e-6);
    }
}

TEST_CASE("multipliers and residuals") {
    SECTION("harmonic ground state: lambda = -3 in 3-D, residuals vanish") {
        const GridPtr g = build_grid(make_spec(3, 48, 8.0));
        ModelParams prm = base_params(3);
        prm.mu1 = prm.mu2 = prm.mu3 = 0.0;
        prm.beta = 0.0;
        PotentialOptions opt;
        opt.kind = PotentialKind::harmonic;
        const PotentialSet pot = sample_potential(opt, g);
        TriField t(g);
        for (int i = 0; i < 3; ++i) t.component(i) = gaussian_field(g);
        t = renormalize(t, {1.0, 1.0, 1.0});

        const Multipliers m = multipliers(t, pot, prm);
        for (int i = 0; i < 3; ++i) REQUIRE(m[i] == Catch::Approx(-3.0).margin(1e-6));

        const std::array<double, 3> r = el_residual(t, pot, prm, m);
        for (int i = 0; i < 3; ++i) REQUIRE(r[i] < 1e-6);

        // with lambda = 0 the residual is exactly 3 |c_i|_2 for the eigenpair
        const std::array<double, 3> r0 = el_residual(t, pot, prm, Multipliers{});
        for (int i = 0; i < 3; ++i)
            REQUIRE(r0[i] == Catch::Approx(3.0 * norm_l2(t.component(i))).margin(1e-6));
    }
    SECTION("1-D oscillator: lambda = -1") {
        const GridPtr g = build_grid(make_spec(1, 256, 8.0));
        ModelParams prm = base_params(1);
        prm.mu1 = prm.mu2 = prm.mu3 = 0.0;
        prm.beta = 0.0;
        PotentialOptions opt;
        opt.kind = PotentialKind::harmonic;
        const PotentialSet pot = sample_potential(opt, g);
        TriField t(g);
        for (int i = 0; i < 3; ++i) t.component(i) = gaussian_field(g);
        const Multipliers m = multipliers(t, pot, prm);
        for (int i = 0; i < 3; ++i) REQUIRE(m[i] == Catch::Approx(-1.0).margin(1e-8));
    }
    SECTION("definition consistency is bit-exact") {
        const GridPtr g = build_grid(make_spec(2, 16, 5.0));
        ModelParams prm = base_params(2);
        prm.beta = 1.2;
        PotentialOptions opt;
        opt.kind = PotentialKind::harmonic;
        const PotentialSet pot = sample_potential(opt, g);
        const TriField t = noise_triple(g, 44);
        const Multipliers m = multipliers(t, pot, prm);
        const double cross = triple_product_integral(t.u, t.v, t.w);
        for (int i = 0; i < 3; ++i) {
            const Field& c = t.component(i);
            const double expected = (prm.mu(i) * lp_norm_pow(c, prm.p) + prm.beta * cross -
                                     grad_sq_integral(c) - weighted_sq_integral(pot[i], c)) /
                                    mass(c);
            REQUIRE(m[i] == expected);
        }
    }
    SECTION("zero-mass component is an error") {
        const GridPtr g = build_grid(make_spec(1, 16, 2.0));
        ModelParams prm = base_params(1);
        PotentialOptions opt;
        opt.kind = PotentialKind::zero;
        const PotentialSet pot = sample_potential(opt, g);
        TriField t(g);
        for (double& v : t.u.values) v = 1.0;  // v, w stay zero
        REQUIRE_THROWS_AS(multipliers(t, pot, prm), solve_error);
    }
    SECTION("zero triple has zero residual for any multipliers") {
        const GridPtr g = build_grid(make_spec(1, 16, 2.0));
        ModelParams prm = base_params(1);
        PotentialOptions opt;
        opt.kind = PotentialKind::harmonic;
        const PotentialSet pot = sample_potential(opt, g);
        Multipliers m;
        m[0] = 4.0;
        m[1] = -7.0;
        const std::array<double, 3> r = el_residual(TriField(g), pot, prm, m);
        for (int i = 0; i < 3; ++i) REQUIRE(r[i] == 0.0);
    }
}

TEST_CASE("gn_quotient") {
    SECTION("gamma_4 is exactly 3/4 in three dimensions") {
        const GridPtr g = build_grid(make_spec(3, 16, 8.0));
        const Field f = band_limited_noise(g, 3);
        const GNReport rep = gn_quotient(f, 4.0);
        REQUIRE(rep.gamma_q == 0.75);
        REQUIRE(rep.quotient >= 0.0);
    }
    SECTION("quotient is invariant under scalar multiplication") {
        const GridPtr g = build_grid(make_spec(2, 16, 6.0));
        Field f = band_limited_noise(g, 9);
        const double q0 = gn_quotient(f, 3.0).quotient;
        for (double& v : f.values) v *= -137.25;
        const double q1 = gn_quotient(f, 3.0).quotient;
        REQUIRE(q1 == Catch::Approx(q0).epsilon(1e-14));
    }
    SECTION("quotient is invariant under dilation of a Gaussian") {
        const GridPtr g = build_grid(make_spec(1, 512, 16.0));
        const Field f = sample(g, [](const double* x) { return std::exp(-0.5 * x[0] * x[0]); });
        const Field f2 = sample(g, [](const double* x) {
            return std::exp(-0.5 * (2.0 * x[0]) * (2.0 * x[0]));
        });
        const double q0 = gn_quotient(f, 2.5).quotient;
        const double q1 = gn_quotient(f2, 2.5).quotient;
        REQUIRE(q1 == Catch::Approx(q0).epsilon(1e-3));
    }
    SECTION("Gaussian quotient at q=4, N=1 matches the quadrature oracle") {
        // independent oracle: fine trapezoid quadrature of the closed-form
        // profile and its analytic derivative on [-12, 12]
        const std::size_t m = 1 << 20;
        const double lo = -12.0, hi = 12.0;
        const double dx = (hi - lo) / static_cast<double>(m);
        double s2 = 0.0, s4 = 0.0, sg = 0.0;
        for (std::size_t i = 0; i <= m; ++i) {
            const double x = lo + dx * static_cast<double>(i);
            const double w = (i == 0 || i == m) ? 0.5 : 1.0;
            const double f = std::exp(-0.5 * x * x);
            const double df = -x * f;
            s2 += w * f * f;
            s4 += w * f * f * f * f;
            sg += w * df * df;
        }
        s2 *= dx;
        s4 *= dx;
        sg *= dx;
        const double oracle =
            std::pow(s4, 0.25) / (std::pow(std::sqrt(sg), 0.25) * std::pow(std::sqrt(s2), 0.75));

        const GridPtr g = build_grid(make_spec(1, 256, 8.0));
        const Field f = sample(g, [](const double* x) { return std::exp(-0.5 * x[0] * x[0]); });
        REQUIRE(gn_quotient(f, 4.0).quotient == Catch::Approx(oracle).margin(1e-8));
        // and the closed form pi^(-1/8) agrees
        REQUIRE(oracle == Catch::Approx(std::pow(std::numbers::pi, -0.125)).margin(1e-10));
    }
    SECTION("zero field and out-of-range q are errors") {
        const GridPtr g = build_grid(make_spec(3, 16, 4.0));
        REQUIRE_THROWS_AS(gn_quotient(Field(g), 3.0), solve_error);
        const Field f = band_limited_noise(g, 1);
        REQUIRE_THROWS_AS(gn_quotient(f, 6.0), config_error);  // = 2N/(N-2) for N=3
        REQUIRE_THROWS_AS(gn_quotient(f, 1.5), config_error);
    }
}

TEST_CASE("GN constant table") {
    SECTION("shipped table loads and answers") {
        const GNConstantTable table = GNConstantTable::load(table_path());
        REQUIRE(table.version() == 1);
        REQUIRE(table.lookup(3, 4.0) > 0.0);
        REQUIRE(table.lookup(1, 2.5) > 0.0);
        REQUIRE(table.contains(2, 3.0));
        REQUIRE_THROWS_AS(table.lookup(3, 2.7), config_error);  // not tabulated
    }
    SECTION("malformed tables are rejected") {
        std::istringstream bad("version = 1\nC 3 oops = 1.0\n");
        REQUIRE_THROWS_AS(GNConstantTable::parse(bad), config_error);
        std::istringstream empty("# nothing\n");
        REQUIRE_THROWS_AS(GNConstantTable::parse(empty), config_error);
        std::istringstream negative("C 3 4 = -2\n");
        REQUIRE_THROWS_AS(GNConstantTable::parse(negative), config_error);
    }
}

TEST_CASE("coercivity_bound") {
    const GNConstantTable table = GNConstantTable::load(table_path());
    const GridPtr g = build_grid(make_spec(3, 16, 8.0));
    PotentialOptions opt;
    opt.kind = PotentialKind::shifted_harmonic;
    opt.offsets = {0.0, -1.0, -2.0};
    const PotentialSet pot = sample_potential(opt, g);

    SECTION("zero-gradient triple leaves only the potential floor") {
        ModelParams prm = base_params(3);
        prm.mass_a = 1.5;
        prm.mass_b = 1.0;
        prm.mass_c = 0.5;
        const double vol = std::pow(2.0 * g->half_width(), 3);
        TriField t(g);
        for (int i = 0; i < 3; ++i)
            for (double& v : t.component(i).values)
                v = std::sqrt(prm.target_mass(i) / vol);
        const double floor = 0.5 * (pot.minima[0] * prm.mass_a + pot.minima[1] * prm.mass_b +
                                    pot.minima[2] * prm.mass_c);
        REQUIRE(coercivity_bound(t, pot, prm, table) == Catch::Approx(floor).margin(1e-12));
        REQUIRE(energy(t, pot, prm) >= coercivity_bound(t, pot, prm, table));
    }
    SECTION("mu = beta = 0: energy exceeds the bound by the (V - c) terms") {
        ModelParams prm = base_params(3);
        prm.mu1 = prm.mu2 = prm.mu3 = 0.0;
        prm.beta = 0.0;
        TriField t = noise_triple(g, 71);
        t = renormalize(t, target_masses(prm));
        const double bound = coercivity_bound(t, pot, prm, table);
        double excess = 0.0;
        for (int i = 0; i < 3; ++i) {
            const Field& c = t.component(i);
            excess += 0.5 * (weighted_sq_integral(pot[i], c) - pot.minima[i] * mass(c));
        }
        REQUIRE(excess >= 0.0);
        REQUIRE(energy(t, pot, prm) == Catch::Approx(bound + excess).margin(1e-10));
    }
    SECTION("randomized smoke sweep holds with the shipped constants") {
        ModelParams prm = base_params(3);
        prm.beta = 1.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            TriField t = noise_triple(g, 1000 + 3 * seed);
            t = renormalize(t, target_masses(prm));
            REQUIRE(energy(t, pot, prm) >= coercivity_bound(t, pot, prm, table));
        }
    }
    SECTION("an un-normalized triple is a misuse") {
        ModelParams prm = base_params(3);
        TriField t = noise_triple(g, 5);
        REQUIRE_THROWS_AS(coercivity_bound(t, pot, prm, table), misuse_error);
    }
    SECTION("missing table entry is a configuration error") {
        ModelParams prm = base_params(3);
        prm.p = 2.6;  // not tabulated
        TriField t = noise_triple(g, 6);
        t = renormalize(t, target_masses(prm));
        REQUIRE_THROWS_AS(coercivity_bound(t, pot, prm, table), config_error);
    }
}

TEST_CASE("symmetrize") {
    const GridPtr g = build_grid(make_spec(3, 12, 6.0, Discretization::fd_dirichlet));
    ModelParams prm = base_params(3);
    prm.beta = 1.0;
    PotentialOptions opt;
    opt.kind = PotentialKind::harmonic;
    const PotentialSet pot = sample_potential(opt, g);

    SECTION("nonnegative triple is unchanged with equal energy") {
        TriField t(g);
        for (int i = 0; i < 3; ++i)
            t.component(i) = sample(g, [](const double* x) {
                return std::exp(-0.25 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
            });
        const TriField s = symmetrize(t);
        for (int i = 0; i < 3; ++i) REQUIRE(s.component(i).values == t.component(i).values);
        REQUIRE(energy(s, pot, prm) == energy(t, pot, prm));
    }
    SECTION("sign flip with beta = 0 leaves the energy unchanged") {
        ModelParams decoupled = prm;
        decoupled.beta = 0.0;
        TriField t(g);
        for (int i = 0; i < 3; ++i) t.component(i) = band_limited_noise(g, 400 + i);
        TriField flipped = t;
        for (double& v : flipped.u.values) v = -v;
        REQUIRE(energy(symmetrize(flipped), pot, decoupled) ==
                Catch::Approx(energy(symmetrize(t), pot, decoupled)).epsilon(1e-15));
        // every J term is even in each component when beta = 0
        REQUIRE(energy(flipped, pot, decoupled) ==
                Catch::Approx(energy(t, pot, decoupled)).epsilon(1e-15));
    }
    SECTION("masses are preserved and energy never increases (beta >= 0)") {
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            TriField t(g);
            for (int i = 0; i < 3; ++i) t.component(i) = band_limited_noise(g, 800 + 3 * seed + i);
            const TriField s = symmetrize(t);
            for (int i = 0; i < 3; ++i)
                REQUIRE(mass(s.component(i)) ==
                        Catch::Approx(mass(t.component(i))).epsilon(1e-15));
            REQUIRE(energy(s, pot, prm) <= energy(t, pot, prm));
        }
    }
    SECTION("spectral grids are unsupported") {
        const GridPtr gs = build_grid(make_spec(3, 12, 6.0));
        TriField t(gs);
        REQUIRE_THROWS_AS(symmetrize(t), unsupported_error);
    }
}
