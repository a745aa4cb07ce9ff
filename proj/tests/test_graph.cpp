#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <unordered_set>

#include "hsaw/graph.hpp"

using namespace hsaw;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream f(path);
    f << content;
    return path;
}

}  // namespace

TEST_CASE("indegree weights are 1/d_in with exact cumulative grid") {
    auto path = write_temp("g_indeg.txt",
                           "# four in-edges into node 4\n"
                           "0 4\n1 4\n2 4\n3 4\n");
    ProbGraph g = load_edge_list(path, WeightMode::InDegree, 0);
    CHECK(g.n == 5);
    CHECK(g.m == 4);
    REQUIRE(g.in_degree(4) == 4);
    std::uint64_t lo = g.in_offsets[4];
    CHECK(g.in_cum[lo] == 0.25);
    CHECK(g.in_cum[lo + 1] == 0.5);
    CHECK(g.in_cum[lo + 2] == 0.75);
    CHECK(g.in_cum[lo + 3] == 1.0);
}

TEST_CASE("given mode rejects in-weight sums above 1") {
    auto path = write_temp("g_oversum.txt", "0 2 0.6\n1 2 0.5\n");
    CHECK_THROWS_AS(load_edge_list(path, WeightMode::Given, 0), DataError);
}

TEST_CASE("random-normalized weights sum to 1") {
    auto path = write_temp("g_rand.txt", "0 2\n1 2\n3 2\n0 1\n");
    ProbGraph g = load_edge_list(path, WeightMode::RandomNormalized, 42);
    CHECK(g.total_in_weight(2) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.total_in_weight(1) == doctest::Approx(1.0).epsilon(1e-12));
    // raw weights differ (no uniform split)
    std::uint64_t lo = g.in_offsets[2];
    CHECK(g.weight[lo] != g.weight[lo + 1]);
    g.validate();
}

TEST_CASE("normalization divides by the raw sum") {
    // direct build path: raw draws 0.2 and 0.6 normalize to 0.25 and 0.75
    std::vector<std::tuple<NodeId, NodeId, double>> edges = {{0, 2, 0.2},
                                                             {1, 2, 0.6}};
    ProbGraph g = build_graph(3, edges, WeightMode::Given, 0);
    double sum = g.weight[0] + g.weight[1];
    CHECK(g.weight[0] / sum == doctest::Approx(0.25));
    CHECK(g.weight[1] / sum == doctest::Approx(0.75));
}

TEST_CASE("loader error paths") {
    SUBCASE("malformed line") {
        auto path = write_temp("g_bad1.txt", "0 1\nnot numbers here\n");
        CHECK_THROWS_AS(load_edge_list(path, WeightMode::InDegree, 0),
                        DataError);
    }
    SUBCASE("weight out of range") {
        auto path = write_temp("g_bad2.txt", "0 1 1.5\n");
        CHECK_THROWS_AS(load_edge_list(path, WeightMode::Given, 0), DataError);
    }
    SUBCASE("zero weight") {
        auto path = write_temp("g_bad3.txt", "0 1 0.0\n");
        CHECK_THROWS_AS(load_edge_list(path, WeightMode::Given, 0), DataError);
    }
    SUBCASE("self-loop") {
        auto path = write_temp("g_bad4.txt", "3 3\n0 1\n");
        CHECK_THROWS_AS(load_edge_list(path, WeightMode::InDegree, 0),
                        DataError);
    }
    SUBCASE("duplicate edge") {
        auto path = write_temp("g_bad5.txt", "0 1\n0 1\n");
        CHECK_THROWS_AS(load_edge_list(path, WeightMode::InDegree, 0),
                        DataError);
    }
    SUBCASE("missing weight in given mode") {
        auto path = write_temp("g_bad6.txt", "0 1\n");
        CHECK_THROWS_AS(load_edge_list(path, WeightMode::Given, 0), DataError);
    }
}

TEST_CASE("arbitrary ids are remapped densely with a map file") {
    auto path = write_temp("g_remap.txt", "100 7\n7 205\n");
    ProbGraph g = load_edge_list(path, WeightMode::InDegree, 0);
    CHECK(g.n == 3);  // ids 7, 100, 205 -> 0, 1, 2
    CHECK(g.m == 2);
    auto [u0, v0] = g.endpoints(0);
    // edge 100->7 becomes 1->0; edge 7->205 becomes 0->2
    CHECK(u0 == 1);
    CHECK(v0 == 0);
    std::ifstream mf(path + ".nodemap");
    REQUIRE(mf.good());
    std::uint64_t raw, dense;
    mf >> raw >> dense;
    CHECK(raw == 7);
    CHECK(dense == 0);
}

TEST_CASE("symmetrize adds reverse edges") {
    auto path = write_temp("g_symm.txt", "0 1\n1 2\n");
    ProbGraph g = load_edge_list(path, WeightMode::InDegree, 0, {true, ""});
    CHECK(g.m == 4);
    CHECK(g.in_degree(0) == 1);
    CHECK(g.in_degree(1) == 2);
}

TEST_CASE("suspect loading") {
    auto gpath = write_temp(
        "g_sus.txt", "0 1\n1 2\n2 3\n3 4\n4 5\n5 6\n6 7\n7 8\n8 9\n");
    ProbGraph g = load_edge_list(gpath, WeightMode::InDegree, 0);
    SUBCASE("parse") {
        auto path = write_temp("s_ok.txt", "5 0.7\n9 1.0\n");
        SuspectSet vi = load_suspects(path, g);
        REQUIRE(vi.members.size() == 2);
        CHECK(vi.p(5) == 0.7);
        CHECK(vi.p(9) == 1.0);
        CHECK_FALSE(vi.is_suspect(0));
    }
    SUBCASE("zero probability rejected") {
        auto path = write_temp("s_zero.txt", "5 0.0\n");
        CHECK_THROWS_AS(load_suspects(path, g), DataError);
    }
    SUBCASE("duplicate rejected") {
        auto path = write_temp("s_dup.txt", "5 0.7\n5 0.2\n");
        CHECK_THROWS_AS(load_suspects(path, g), DataError);
    }
    SUBCASE("unknown node rejected") {
        auto path = write_temp("s_unk.txt", "99 0.5\n");
        CHECK_THROWS_AS(load_suspects(path, g), DataError);
    }
}

TEST_CASE("random_suspects determinism and distinctness") {
    ProbGraph g = synth_graph(10000, 2, 7);
    SUBCASE("count equals n picks every node") {
        ProbGraph small = synth_graph(20, 2, 3);
        SuspectSet vi = random_suspects(small, 20, 11);
        CHECK(vi.members.size() == 20);
    }
    SUBCASE("same seed twice is identical") {
        SuspectSet a = random_suspects(g, 100, 5);
        SuspectSet b = random_suspects(g, 100, 5);
        CHECK(a.members == b.members);
    }
    SUBCASE("distinct ids across many seeds") {
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            SuspectSet vi = random_suspects(g, 1000, seed);
            std::unordered_set<NodeId> ids;
            for (auto [v, p] : vi.members) {
                CHECK(p > 0.0);
                CHECK(p < 1.0);
                ids.insert(v);
            }
            CHECK(ids.size() == 1000);
        }
    }
    SUBCASE("count above n fails") {
        ProbGraph small = synth_graph(5, 2, 3);
        CHECK_THROWS_AS(random_suspects(small, 6, 0), DataError);
    }
}

TEST_CASE("synthetic graph construction") {
    SUBCASE("edge count, no self-loops, no duplicates") {
        ProbGraph g = synth_graph(10, 5, 1);
        CHECK(g.n == 10);
        CHECK(g.m == 50);
        std::set<std::pair<NodeId, NodeId>> seen;
        for (EdgeId e = 0; e < g.m; ++e) {
            auto [u, v] = g.endpoints(e);
            CHECK(u != v);
            CHECK(seen.insert({u, v}).second);
        }
    }
    SUBCASE("two-node complete digraph") {
        ProbGraph g = synth_graph(2, 1, 9);
        CHECK(g.m == 2);
    }
    SUBCASE("deterministic given seed") {
        ProbGraph a = synth_graph(50, 4, 123);
        ProbGraph b = synth_graph(50, 4, 123);
        CHECK(a.in_src == b.in_src);
        CHECK(a.edge_dst == b.edge_dst);
        CHECK(a.weight == b.weight);
    }
    SUBCASE("density above complete digraph fails") {
        CHECK_THROWS_AS(synth_graph(3, 3, 0), DataError);
    }
}

TEST_CASE("every constructed graph passes its validator") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        ProbGraph g = synth_graph(100, 3, seed);
        CHECK_NOTHROW(g.validate());
    }
}

TEST_CASE("edge list round-trips at full precision") {
    ProbGraph g = synth_graph(60, 4, 2024);
    auto path =
        (std::filesystem::temp_directory_path() / "g_round.txt").string();
    save_edge_list(g, path);
    ProbGraph h = load_edge_list(path, WeightMode::Given, 0);
    CHECK(g.n == h.n);
    CHECK(g.m == h.m);
    CHECK(g.in_src == h.in_src);
    CHECK(g.edge_dst == h.edge_dst);
    CHECK(g.weight == h.weight);
    CHECK(g.in_cum == h.in_cum);
}

TEST_CASE("binary cache round-trips") {
    ProbGraph g = synth_graph(80, 5, 77);
    auto path =
        (std::filesystem::temp_directory_path() / "g_cache.bin").string();
    save_cache(g, path);
    ProbGraph h = load_cache(path);
    CHECK(g.n == h.n);
    CHECK(g.m == h.m);
    CHECK(g.in_src == h.in_src);
    CHECK(g.weight == h.weight);
    CHECK(g.in_offsets == h.in_offsets);
}

TEST_CASE("candidate set validation") {
    ProbGraph g = synth_graph(10, 2, 0);
    CHECK_NOTHROW(CandidateSet::all(ItemKind::Edge).validate(g));
    CHECK_THROWS_AS(
        CandidateSet::of(ItemKind::Node, {3, 99}).validate(g), DataError);
    CHECK_THROWS_AS(
        CandidateSet::of(ItemKind::Node, {3, 3}).validate(g), DataError);
    CHECK_THROWS_AS(CandidateSet::of(ItemKind::Edge, {}).validate(g),
                    DataError);
}
