#include "oracles.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace crn;
using oracle::parse;

namespace {

using BlockSet = std::set<std::set<std::string>>;

BlockSet blocks(const ReactionNetwork& net, const Partition& p) {
    BlockSet out;
    for (const auto& b : p.blocks) {
        std::set<std::string> s;
        for (auto v : b) s.insert(complex_text(net, net.vertices()[v]));
        out.insert(s);
    }
    return out;
}

std::set<std::string> edges(const ReactionNetwork& net) {
    std::set<std::string> out;
    for (const auto& r : net.reactions()) out.insert(reaction_text(net, r));
    return out;
}

/// Mutual reachability by transitive closure.
std::vector<std::vector<bool>> closure(const ReactionNetwork& net) {
    const std::size_t n = net.vertices().size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) reach[i][i] = true;
    for (std::size_t r = 0; r < net.reactions().size(); ++r) reach[net.source_index(r)][net.target_index(r)] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    return reach;
}

const ReactionNetwork empty2(oracle::species_names(2), {});

}  // namespace

TEST(Components, StrongIntroductory) {
    const auto net = oracle::example11();
    EXPECT_EQ(blocks(net, strongly_connected_components(net)),
              (BlockSet{{"S2"}, {"S1"}, {"0"}, {"S1 + S2"}, {"S3", "S4", "S5"}}));
}

TEST(Components, StrongSmall) {
    const auto net = parse("0 -> S1");
    EXPECT_EQ(strongly_connected_components(net).size(), 2u);
    EXPECT_TRUE(strongly_connected_components(empty2).empty());
}

TEST(Components, Weak) {
    const auto net = oracle::example11();
    EXPECT_EQ(blocks(net, weakly_connected_components(net)),
              (BlockSet{{"S2", "S1", "0", "S1 + S2"}, {"S3", "S4", "S5"}}));
    const auto cyc = parse("S3 -> S4; S4 -> S5; S5 -> S3");
    EXPECT_EQ(weakly_connected_components(cyc).size(), 1u);
    EXPECT_TRUE(weakly_connected_components(empty2).empty());
}

TEST(Components, MatchReachabilityOracle) {
    oracle::Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto net = oracle::random_first_order(rng, static_cast<std::size_t>(oracle::uniform_int(rng, 1, 5)));
        const auto reach = closure(net);
        const auto labels = strongly_connected_components(net).labels(net.vertices().size());
        for (std::size_t i = 0; i < reach.size(); ++i)
            for (std::size_t j = 0; j < reach.size(); ++j)
                ASSERT_EQ(labels[i] == labels[j], reach[i][j] && reach[j][i]);
        // Blocks are disjoint and cover the vertex set.
        std::vector<int> seen(net.vertices().size(), 0);
        for (const auto& b : strongly_connected_components(net).blocks) {
            ASSERT_FALSE(b.empty());
            for (auto v : b) ++seen[v];
        }
        for (int s : seen) ASSERT_EQ(s, 1);
    }
}

TEST(WeakReversibility, Examples) {
    EXPECT_TRUE(is_weakly_reversible(parse("S3 -> S2; S2 -> S1; S1 -> 0; 0 -> S3")));
    EXPECT_FALSE(is_weakly_reversible(oracle::example11()));
    EXPECT_TRUE(is_weakly_reversible(empty2));
}

TEST(Subspace, Dimensions) {
    EXPECT_EQ(stoichiometric_dim(oracle::example11()), 4u);
    EXPECT_EQ(stoichiometric_dim(parse("2 S1 -> S1 + S2; 2 S2 -> S1 + S2")), 1u);
    EXPECT_EQ(stoichiometric_dim(empty2), 0u);
    EXPECT_EQ(stoichiometric_subspace(oracle::example11()).dim(), 4u);
}

TEST(Subspace, ConservationLaws) {
    const auto cyc = parse("S3 -> S4; S4 -> S5; S5 -> S3");
    auto rep = conservation_laws(cyc);
    ASSERT_EQ(rep.basis.dim(), 1u);
    EXPECT_EQ(rep.basis.vectors[0], (RationalVector{1, 1, 1}));
    ASSERT_TRUE(rep.positive.has_value());
    for (const auto& w : *rep.positive) EXPECT_GE(w, 1);

    EXPECT_EQ(conservation_laws(parse("0 -> S1")).basis.dim(), 0u);

    rep = conservation_laws(oracle::example11());
    ASSERT_EQ(rep.basis.dim(), 1u);
    EXPECT_EQ(rep.basis.vectors[0], (RationalVector{0, 0, 1, 1, 1}));
    EXPECT_FALSE(rep.positive.has_value());
}

TEST(Subspace, ConservationIsOrthogonal) {
    oracle::Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto net = oracle::random_any_network(rng, static_cast<std::size_t>(oracle::uniform_int(rng, 1, 5)), true);
        const auto rep = conservation_laws(net);
        EXPECT_EQ(rep.basis.dim() + stoichiometric_dim(net), net.dim());
        for (const auto& w : rep.basis.vectors)
            for (const auto& r : net.reactions()) EXPECT_EQ(dot(w, r.vector()), 0);
        if (rep.positive) {
            for (const auto& r : net.reactions()) EXPECT_EQ(dot(*rep.positive, r.vector()), 0);
            for (const auto& w : *rep.positive) EXPECT_GE(w, 1);
        }
    }
}

TEST(Subspace, RankMatchesNaiveElimination) {
    oracle::Rng rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const auto rows = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 8));
        const auto cols = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 8));
        RationalMatrix m(rows, RationalVector(cols, Rational(0)));
        const bool sparse = oracle::coin(rng);
        for (auto& r : m)
            for (auto& x : r)
                if (!sparse || oracle::coin(rng, 0.3)) x = oracle::random_rational(rng, -3, 3);
        // Occasionally force dependent rows.
        if (rows > 2 && oracle::coin(rng)) {
            for (std::size_t k = 0; k < cols; ++k) m[rows - 1][k] = m[0][k] * Rational(2, 3) - m[1][k];
        }
        EXPECT_EQ(rank(m, cols), oracle::naive_rank(m));
    }
}

TEST(Deficiency, Examples) {
    EXPECT_EQ(deficiency(parse("2 S1 -> S1 + S2; 2 S2 -> S1 + S2")), 2);
    EXPECT_EQ(deficiency(parse("S3 -> S2; S2 -> S1; S1 -> 0; 0 -> S3")), 0);
    const auto one = deficiency_report(parse("0 -> S1"));
    EXPECT_EQ(one.by_sccs, 1);
    EXPECT_EQ(one.standard, 0);
    EXPECT_EQ(deficiency(empty2), 0);
}

TEST(Deficiency, StrongComponentValueCanBeNegative) {
    const auto r = deficiency_report(parse("S1 <-> S2; S2 -> S3; S3 <-> S4"));
    EXPECT_EQ(r.vertices, 4u);
    EXPECT_EQ(r.stoichiometric_dim, 3u);
    EXPECT_EQ(r.nontrivial_sccs, 2u);
    EXPECT_EQ(r.by_sccs, -1);
    EXPECT_EQ(r.standard, 0);
}

TEST(Deficiency, NonnegativityProperty) {
    oracle::Rng rng(29);
    for (int trial = 0; trial < 300; ++trial) {
        const auto net = trial % 2 ? oracle::random_first_order(rng, 4) : oracle::random_any_network(rng, 3, false);
        const auto r = deficiency_report(net);
        EXPECT_GE(r.standard, 0);
        // With at most one nontrivial strong component per linkage class the
        // strong-component count is bounded below by the standard one.
        const auto sccs = strongly_connected_components(net);
        const auto wlab = weakly_connected_components(net).labels(net.vertices().size());
        std::vector<int> per_class(weakly_connected_components(net).size(), 0);
        for (const auto& b : sccs.blocks)
            if (b.size() >= 2) ++per_class[wlab[b[0]]];
        if (std::all_of(per_class.begin(), per_class.end(), [](int c) { return c <= 1; })) {
            EXPECT_GE(r.by_sccs, r.standard);
            EXPECT_GE(r.by_sccs, 0);
        }
    }
}

TEST(Split, Introductory) {
    const auto net = oracle::example11();
    const auto [g0, gb] = zero_component_split(net);
    EXPECT_EQ(edges(g0), (std::set<std::string>{"S1 -> 0 [2]", "S2 -> S1 [2]", "0 -> S1 + S2 [2]"}));
    EXPECT_EQ(edges(gb), (std::set<std::string>{"S3 -> S4 [1]", "S4 -> S5 [1]", "S5 -> S3 [2]"}));
}

TEST(Split, DegenerateCases) {
    const auto cyc = parse("S3 -> S4; S4 -> S5; S5 -> S3");
    auto [g0, gb] = zero_component_split(cyc);
    EXPECT_TRUE(g0.empty());
    EXPECT_EQ(gb, cyc);
    const auto influx = parse("0 -> S1");
    std::tie(g0, gb) = zero_component_split(influx);
    EXPECT_EQ(g0, influx);
    EXPECT_TRUE(gb.empty());
}

TEST(Split, JointReproducesNetwork) {
    oracle::Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto net = trial % 2 ? oracle::random_first_order(rng, 4) : oracle::random_any_network(rng, 3, true);
        const auto [g0, gb] = zero_component_split(net);
        const auto j = joint(g0, gb);
        EXPECT_EQ(j.network, net);
        EXPECT_TRUE(j.edges_disjoint);
        EXPECT_TRUE(j.vertices_disjoint);
    }
}

TEST(Lir, Examples) {
    const auto net = oracle::example11();
    EXPECT_EQ(edges(lir_subgraph(net)),
              (std::set<std::string>{"S1 -> 0 [2]", "S2 -> S1 [2]", "0 -> S1 + S2 [2]"}));
    EXPECT_TRUE(lir_subgraph(parse("S1 <-> S2; S2 -> 0; 0 -> S1")).empty());
    EXPECT_EQ(edges(lir_subgraph(parse("0 -> S1; S1 <-> 2 S1"))), (std::set<std::string>{"0 -> S1 [1]"}));
}

TEST(Lir, EmptyIffWeaklyReversible) {
    oracle::Rng rng(37);
    int wr = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto net = trial % 2 ? oracle::random_first_order(rng, 3) : oracle::random_any_network(rng, 2, false);
        EXPECT_EQ(lir_subgraph(net).empty(), is_weakly_reversible(net));
        wr += is_weakly_reversible(net) ? 1 : 0;
    }
    EXPECT_GT(wr, 10);
}

TEST(HighestOrder, Examples) {
    const auto net = oracle::example11();
    const auto star = highest_order_subgraph(net);
    EXPECT_EQ(star.reactions().size(), 5u);
    EXPECT_EQ(edges(star).count("0 -> S1 + S2 [2]"), 0u);
    const auto cyc = parse("S3 -> S4; S4 -> S5; S5 -> S3");
    EXPECT_EQ(highest_order_subgraph(cyc), cyc);
    EXPECT_TRUE(is_homogeneous(cyc));
    EXPECT_FALSE(is_homogeneous(net));
    const auto influx = parse("0 -> S1");
    EXPECT_EQ(highest_order_subgraph(influx), influx);
    EXPECT_THROW(highest_order_subgraph(empty2), PreconditionError);
}

TEST(Jkl, Examples) {
    const auto s = jkl_sets(parse("S1 -> S2; S2 -> 0; 0 -> 2 S1"));
    EXPECT_EQ(s.J, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(s.K, (std::vector<std::size_t>{0}));
    EXPECT_EQ(s.L, (std::vector<std::size_t>{1}));
    const auto r = jkl_sets(parse("0 <-> S1"));
    EXPECT_EQ(r.J, (std::vector<std::size_t>{0}));
    EXPECT_EQ(r.K, (std::vector<std::size_t>{0}));
    EXPECT_TRUE(r.L.empty());
}

TEST(Jkl, Errors) {
    oracle::Builder b(2);
    b.add(oracle::unit(2, 1), oracle::zero(2));
    b.add(oracle::zero(2), oracle::complex_of({0, 2}));
    EXPECT_THROW(jkl_sets(b.build()), PreconditionError);
    EXPECT_THROW(jkl_sets(parse("2 S1 -> 0; 0 -> S1")), PreconditionError);
    EXPECT_THROW(jkl_sets(parse("S1 <-> S2")), PreconditionError);
}

TEST(Joint, Examples) {
    const auto a = parse("0 -> S1 [1]");
    const auto j = joint(a, a);
    ASSERT_EQ(j.network.reactions().size(), 1u);
    EXPECT_EQ(j.network.reactions()[0].rate.exact, 2);
    EXPECT_FALSE(j.edges_disjoint);
    const ReactionNetwork none({"S1"}, {});
    EXPECT_EQ(joint(a, none).network, a);
    EXPECT_EQ(joint(none, a).network, a);
    EXPECT_THROW(joint(a, empty2), PreconditionError);
}

TEST(Joint, FluxIsAdditive) {
    oracle::Rng rng(41);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = oracle::random_first_order(rng, 3);
        const auto b = oracle::random_first_order(rng, 3);
        const auto j = joint(a, b).network;
        const auto fa = flux_system(a), fb = flux_system(b), fj = flux_system(j);
        for (std::size_t r = 0; r < 3; ++r) {
            EXPECT_EQ(fj.b_exact[r], fa.b_exact[r] + fb.b_exact[r]);
            for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(fj.A_exact[r][c], fa.A_exact[r][c] + fb.A_exact[r][c]);
        }
    }
}
