#include "oracles.hpp"

#include <gtest/gtest.h>

#include <complex>

using namespace crn;
using oracle::parse;

namespace {

RationalMatrix exact(std::initializer_list<std::initializer_list<int>> rows) {
    RationalMatrix m;
    for (const auto& r : rows) {
        RationalVector v;
        for (int x : r) v.emplace_back(x);
        m.push_back(v);
    }
    return m;
}

Eigen::MatrixXd dense(const RationalMatrix& m) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m.size(); ++j)
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = to_double(m[i][j]);
    return out;
}

std::size_t vertex(const ReactionNetwork& net, std::initializer_list<int> coords) {
    return net.vertex_index(oracle::complex_of(coords));
}

const ReactionNetwork& cycle() {
    static const auto net = parse("S3 -> S4 [1]; S4 -> S5 [1]; S5 -> S3 [2]");
    return net;
}

std::vector<std::size_t> cycle_order() {
    return {vertex(cycle(), {1, 0, 0}), vertex(cycle(), {0, 1, 0}), vertex(cycle(), {0, 0, 1})};
}

/// Random certified networks with a random start in the nonnegative orthant.
std::vector<ReactionNetwork> certified_pool(oracle::Rng& rng, std::size_t count) {
    std::vector<ReactionNetwork> out;
    while (out.size() < count) {
        auto net = oracle::random_first_order(rng, static_cast<std::size_t>(oracle::uniform_int(rng, 1, 5)));
        if (first_order_endotactic(net).endotactic()) out.push_back(std::move(net));
    }
    return out;
}

std::vector<double> random_state(oracle::Rng& rng, std::size_t d) {
    std::uniform_real_distribution<double> u(0.0, 5.0);
    std::vector<double> x(d);
    for (auto& v : x) v = u(rng);
    return x;
}

}  // namespace

TEST(Flux, Examples) {
    auto sys = flux_system(parse("0 -> S1 [5]; S1 -> 0 [3]; S1 -> S2 [2]; S2 -> S1 [2]; S2 -> 2 S2 [1]; 0 -> S2 [4]"));
    EXPECT_EQ(sys.A_exact, exact({{-5, 2}, {2, -1}}));
    EXPECT_EQ(sys.b_exact, (RationalVector{5, 4}));

    sys = flux_system(parse("0 <-> S1 [1, 1]; S2 -> S1 [2]; S2 -> 2 S2 [1]"));
    EXPECT_EQ(sys.A_exact, exact({{-1, 0}, {2, -1}}));
    EXPECT_EQ(sys.b_exact, (RationalVector{1, 0}));

    sys = flux_system(oracle::example11());
    EXPECT_EQ(sys.A_exact, exact({{-2, 0, 0, 0, 0},
                                  {2, -2, 0, 0, 0},
                                  {0, 0, -1, 1, 0},
                                  {0, 0, 0, -1, 1},
                                  {0, 0, 2, 0, -2}}));
    EXPECT_EQ(sys.b_exact, (RationalVector{2, 2, 0, 0, 0}));
    EXPECT_EQ(sys.A(1, 0), 2.0);
}

TEST(Flux, MetzlerProperty) {
    oracle::Rng rng(83);
    for (int trial = 0; trial < 200; ++trial) {
        const auto sys = flux_system(oracle::random_first_order(rng, 4));
        for (std::size_t i = 0; i < 4; ++i) {
            EXPECT_GE(sys.b_exact[i], 0);
            for (std::size_t j = 0; j < 4; ++j)
                if (i != j) { EXPECT_GE(sys.A_exact[i][j], 0); }
        }
    }
    EXPECT_THROW(flux_system(parse("2 S1 -> S1")), PreconditionError);
}

TEST(Wcdd, Examples) {
    EXPECT_TRUE(is_wcdd(dense(exact({{-2, 0}, {2, -2}}))));
    Eigen::MatrixXd m = dense(exact({{-1, 0}, {2, -1}}));
    EXPECT_FALSE(is_wcdd(m));
    // Not dominant, yet Hurwitz: the condition is only sufficient.
    Eigen::EigenSolver<Eigen::MatrixXd> es(m);
    for (Eigen::Index i = 0; i < 2; ++i) EXPECT_NEAR(es.eigenvalues()(i).real(), -1.0, 1e-12);
    EXPECT_FALSE(is_wcdd(Eigen::MatrixXd::Zero(1, 1)));
}

TEST(Wcdd, ImpliesNonnegativeInverse) {
    oracle::Rng rng(89);
    int seen = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto sys = flux_system(oracle::random_first_order(rng, static_cast<std::size_t>(oracle::uniform_int(rng, 1, 5))));
        if (!is_wcdd(sys.A)) continue;
        ++seen;
        const Eigen::MatrixXd negA = -sys.A;
        const Eigen::MatrixXd inv = negA.inverse();
        EXPECT_LE((negA * inv - Eigen::MatrixXd::Identity(negA.rows(), negA.cols())).cwiseAbs().maxCoeff(), 1e-9);
        // Nonnegativity needs -A to be a Z-matrix; autocatalysis (S1 -> 2 S1)
        // can make a diagonal entry of A positive.
        if (sys.A.diagonal().maxCoeff() <= 0.0) { EXPECT_GE(inv.minCoeff(), -1e-12); }
    }
    EXPECT_GT(seen, 20);
}

TEST(Spectral, Introductory) {
    const auto rep = spectral_report(flux_system(oracle::example11()), true);
    const std::vector<std::complex<double>> expect = {{-2, -1}, {-2, 0}, {-2, 0}, {-2, 1}, {0, 0}};
    ASSERT_EQ(rep.eigenvalues.size(), expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i) EXPECT_LE(std::abs(rep.eigenvalues[i] - expect[i]), 1e-7);
    ASSERT_TRUE(rep.rho);
    EXPECT_NEAR(*rep.rho, 2.0, 1e-7);
    EXPECT_EQ(rep.n, 3u);
    EXPECT_NEAR(rep.spectral_abscissa, 0.0, 1e-9);
    EXPECT_EQ(rep.zero_multiplicity, 1u);
}

TEST(Spectral, ZeroComponentOnlyIsStable) {
    const auto rep = spectral_report(flux_system(parse("S3 -> S2; S2 -> S1; S1 -> 0; 0 -> 2 S3")), true);
    EXPECT_LT(rep.spectral_abscissa, -1e-9);
    EXPECT_EQ(rep.zero_multiplicity, 0u);
}

TEST(Spectral, CycleAndCharacteristicPolynomial) {
    const auto sys = flux_system(cycle());
    const auto rep = spectral_report(sys, true);
    EXPECT_NEAR(rep.spectral_abscissa, 0.0, 1e-9);
    EXPECT_EQ(rep.zero_multiplicity, 1u);
    ASSERT_TRUE(rep.rho);
    EXPECT_NEAR(*rep.rho, 2.0, 1e-9);
    const auto p = oracle::char_poly(sys.A_exact);
    EXPECT_EQ(p, (RationalVector{0, 5, 4, 1}));
    for (const auto& z : rep.eigenvalues) {
        std::complex<double> v = 0;
        for (std::size_t k = p.size(); k-- > 0;) v = v * z + to_double(p[k]);
        EXPECT_LE(std::abs(v), 1e-9);
    }
}

TEST(Spectral, StabilityProperties) {
    oracle::Rng rng(97);
    for (int trial = 0; trial < 300; ++trial) {
        const auto d = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 5));
        const auto net = oracle::random_first_order(rng, d);
        const auto sys = flux_system(net);
        const bool ones_ok = u_endotactic(net, RationalVector(d, Rational(1))).endotactic();
        const bool certified = first_order_endotactic(net).endotactic();
        const auto rep = spectral_report(sys, certified);
        if (ones_ok) { EXPECT_LE(rep.spectral_abscissa, 1e-9) << serialize_network(net, Format::dsl); }
        // An unused species contributes a zero row of A, hence a zero eigenvalue.
        if (certified && species_support(net).size() == d) {
            const bool bullet_empty = zero_component_split(net).second.empty();
            EXPECT_EQ(rep.spectral_abscissa < -1e-9, bullet_empty) << serialize_network(net, Format::dsl);
        }
    }
}

TEST(Laplacian, Examples) {
    const Eigen::MatrixXd L = laplacian(cycle(), cycle_order());
    EXPECT_EQ(L, dense(exact({{1, -1, 0}, {0, 1, -1}, {-2, 0, 2}})));
    const auto pair = parse("0 <-> S1 [1, 1]");
    const Eigen::MatrixXd P = laplacian(pair, {vertex(pair, {0}), vertex(pair, {1})});
    EXPECT_EQ(P, dense(exact({{1, -1}, {-1, 1}})));
    EXPECT_THROW(laplacian(parse("2 S1 -> S1"), {0, 1}), PreconditionError);
}

TEST(Laplacian, RowSumsVanish) {
    oracle::Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const auto net = oracle::digraph_network(oracle::random_strong_digraph(rng, static_cast<std::size_t>(oracle::uniform_int(rng, 2, 6))));
        for (const auto& b : weakly_connected_components(net).blocks) {
            const Eigen::MatrixXd L = laplacian(net, b);
            EXPECT_LE(L.rowwise().sum().cwiseAbs().maxCoeff(), 1e-12);
        }
    }
}

TEST(TreeConstants, Cycle) {
    const auto t = tree_constants(cycle(), cycle_order());
    EXPECT_NEAR(t.c[0], 2.0, 1e-12);
    EXPECT_NEAR(t.c[1], 2.0, 1e-12);
    EXPECT_NEAR(t.c[2], 1.0, 1e-12);
    const auto n = t.normalized();
    EXPECT_NEAR(n[0], 0.4, 1e-15);
    EXPECT_NEAR(n[1], 0.4, 1e-15);
    EXPECT_NEAR(n[2], 0.2, 1e-15);
    const auto brute = oracle::brute_in_tree_weights({{0, 1, 0}, {0, 0, 1}, {2, 0, 0}});
    EXPECT_EQ(brute, (std::vector<double>{2, 2, 1}));
}

TEST(TreeConstants, TwoVertices) {
    const auto net = parse("0 -> S1 [3]; S1 -> 0 [7]");
    const auto t = tree_constants(net, {vertex(net, {0}), vertex(net, {1})});
    EXPECT_NEAR(t.c[0], 7.0, 1e-12);
    EXPECT_NEAR(t.c[1], 3.0, 1e-12);
    EXPECT_THROW(tree_constants(parse("0 -> S1"), {0, 1}), PreconditionError);
}

TEST(TreeConstants, MatchInTreeEnumeration) {
    oracle::Rng rng(103);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<std::size_t>(oracle::uniform_int(rng, 2, 6));
        const auto w = oracle::random_strong_digraph(rng, n);
        const auto net = oracle::digraph_network(w);
        std::vector<std::size_t> order;
        const std::size_t d = n - 1;
        for (std::size_t i = 0; i < n; ++i)
            order.push_back(net.vertex_index(i == 0 ? Complex::zero(d) : Complex::species(d, i - 1)));
        const auto t = tree_constants(net, order);
        const auto brute = oracle::brute_in_tree_weights(w);
        for (std::size_t i = 0; i < n; ++i) EXPECT_LE(std::abs(t.c[i] - brute[i]), 1e-12 * brute[i]);
    }
}

TEST(Spade, Examples) {
    const auto spade = spade_realization(parse("S3 -> S2; S2 -> S1; S1 -> 0; 0 -> 2 S3"));
    EXPECT_EQ(spade, parse("S3 -> S2; S2 -> S1; S1 -> 0; 0 -> S3 [2]"));
    EXPECT_TRUE(is_weakly_reversible(spade));
    EXPECT_EQ(deficiency(spade), 0);

    const auto mono = parse("0 -> S1 [2]; S1 -> S2 [3]; S2 -> 0 [1]");
    EXPECT_EQ(spade_realization(mono), mono);

    EXPECT_EQ(spade_realization(parse("S1 -> S2; S2 -> 0; 0 -> 2 S1")), parse("S1 -> S2; S2 -> 0; 0 -> S1 [2]"));
    EXPECT_THROW(spade_realization(ReactionNetwork({"S1"}, {})), PreconditionError);
}

TEST(Spade, FluxIdentityIsExact) {
    oracle::Rng rng(107);
    for (int trial = 0; trial < 300; ++trial) {
        auto net = oracle::random_first_order(rng, static_cast<std::size_t>(oracle::uniform_int(rng, 1, 5)));
        const auto spade = spade_realization(net);
        for (const auto& f : flux_match(net, spade)) EXPECT_TRUE(f.equal) << serialize_network(net, Format::dsl);
        EXPECT_EQ(flux_system(spade).A_exact, flux_system(net).A_exact);
        EXPECT_EQ(flux_system(spade).b_exact, flux_system(net).b_exact);
    }
}

TEST(Spade, WrdzExactlyWhenEndotactic) {
    oracle::Rng rng(109);
    for (int trial = 0; trial < 300; ++trial) {
        const auto net = oracle::random_first_order(rng, static_cast<std::size_t>(oracle::uniform_int(rng, 1, 4)));
        const auto spade = spade_realization(net);
        const bool wrdz = is_weakly_reversible(spade) && deficiency(spade) == 0;
        EXPECT_EQ(wrdz, first_order_endotactic(net).endotactic()) << serialize_network(net, Format::dsl);
    }
}

TEST(Equilibrium, Introductory) {
    const auto sys = flux_system(oracle::example11());
    auto res = equilibrium(sys, {5, 5, 0, 0, 0});
    EXPECT_LE((res.x_star - oracle::row({2, 1, 0, 0, 0})).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_FALSE(res.positive);
    EXPECT_TRUE(res.certified);

    res = equilibrium(sys, {5, 5, 1, 2, 7});
    const double a = 10.0;
    EXPECT_LE((res.x_star - oracle::row({2, 1, 2 * a / 5, 2 * a / 5, a / 5})).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_TRUE(res.positive);
    ASSERT_EQ(res.cls.masses.size(), 1u);
    EXPECT_NEAR(res.cls.masses[0], a, 1e-12);
}

TEST(Equilibrium, ForcedRuns) {
    const auto influx = flux_system(parse("0 -> S1 [5]; S1 -> 0 [3]; S1 <-> S2 [2, 2]; S2 -> 2 S2 [1]; 0 -> S2 [4]"));
    EXPECT_THROW(equilibrium(influx, {0, 0}), PreconditionError);
    auto res = equilibrium(influx, {0, 0}, {true});
    EXPECT_TRUE(res.forced);
    EXPECT_FALSE(res.certified);
    EXPECT_LE((res.x_star - oracle::row({13, 30})).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_TRUE(res.positive);

    res = equilibrium(flux_system(parse("0 <-> S1 [1, 1]; S2 -> S1 [2]; S2 -> 2 S2 [1]")), {1, 1}, {true});
    EXPECT_LE((res.x_star - oracle::row({1, 0})).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_FALSE(res.positive);

    EXPECT_THROW(equilibrium(flux_system(parse("S1 -> S2")), {1, 1}, {true}), NumericalError);
}

TEST(Equilibrium, Preconditions) {
    const auto sys = flux_system(oracle::example11());
    EXPECT_THROW(equilibrium(sys, {1, 2}), PreconditionError);
    EXPECT_THROW(equilibrium(sys, {1, 1, -1, 1, 1}), PreconditionError);
}

TEST(Equilibrium, ResidualAndClassProperty) {
    oracle::Rng rng(113);
    for (const auto& net : certified_pool(rng, 150)) {
        const auto sys = flux_system(net);
        const auto x0 = random_state(rng, net.dim());
        const auto res = equilibrium(sys, x0);
        EXPECT_LE((res.x_star * sys.A + sys.b).cwiseAbs().sum(), 1e-10 * (1 + sys.b.cwiseAbs().sum()));
        ASSERT_EQ(res.cls.components.size(), res.cls.masses.size());
        for (std::size_t i = 0; i < res.cls.components.size(); ++i) {
            double mass = 0.0, at_star = 0.0;
            for (auto k : res.cls.components[i]) {
                mass += x0[k];
                at_star += res.x_star(static_cast<Eigen::Index>(k));
            }
            EXPECT_NEAR(res.cls.masses[i], mass, 1e-12 * (1 + mass));
            EXPECT_NEAR(at_star, mass, 1e-12 * (1 + mass));
        }
        EXPECT_GE(res.x_star.minCoeff(), -1e-12);
    }
}

TEST(Equilibrium, ZeroBlockRoutesAgree) {
    oracle::Rng rng(127);
    for (const auto& net : certified_pool(rng, 150)) {
        const auto a = zero_block_equilibrium(flux_system(net));
        const auto b = zero_block_equilibrium_by_trees(net);
        EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-10 * (1 + a.cwiseAbs().maxCoeff()))
            << serialize_network(net, Format::dsl);
    }
}
