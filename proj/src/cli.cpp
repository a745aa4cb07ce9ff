#include "hsaw/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hsaw/evaluation.hpp"
#include "hsaw/interdiction.hpp"
#include "hsaw/partition.hpp"

namespace hsaw {

namespace {

using nlohmann::json;

struct GraphArgs {
    std::string path;
    std::string weights = "indegree";
    bool symmetrize = false;
    std::uint64_t seed = 0;

    WeightMode mode() const {
        if (weights == "given") return WeightMode::Given;
        if (weights == "indegree") return WeightMode::InDegree;
        if (weights == "random-normalized") return WeightMode::RandomNormalized;
        throw CLI::ValidationError("--weights",
                                   "expected given|indegree|random-normalized");
    }

    ProbGraph load() const {
        {  // binary caches load directly, regardless of the weights flag
            std::ifstream probe(path, std::ios::binary);
            char magic[5] = {};
            if (probe.read(magic, 5) && std::string_view(magic, 5) == "HSAW1")
                return load_cache(path);
        }
        LoadOptions opts;
        opts.symmetrize = symmetrize;
        return load_edge_list(path, mode(), seed, opts);
    }
};

struct SuspectArgs {
    std::string path;
    std::uint32_t random_count = 0;

    SuspectSet load(const ProbGraph& g, std::uint64_t seed) const {
        if (!path.empty()) return load_suspects(path, g);
        if (random_count > 0) return random_suspects(g, random_count, seed);
        throw CLI::ValidationError(
            "suspects", "one of --suspects or --random-suspects is required");
    }
};

void add_graph_flags(CLI::App* cmd, GraphArgs& ga) {
    cmd->add_option("--graph", ga.path, "edge list file")->required();
    cmd->add_option("--weights", ga.weights,
                    "given|indegree|random-normalized");
    cmd->add_flag("--symmetrize", ga.symmetrize,
                  "add the reverse of every edge before weighting");
}

void add_suspect_flags(CLI::App* cmd, SuspectArgs& sa) {
    cmd->add_option("--suspects", sa.path, "suspect file: node prob per line");
    cmd->add_option("--random-suspects", sa.random_count,
                    "draw this many random suspects");
}

std::uint32_t default_workers() {
    if (const char* env = std::getenv("HSAW_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::uint32_t>(v);
    }
    return 1;
}

void emit(const std::string& text, const std::string& output) {
    if (output.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream f(output);
        if (!f) throw DataError("cannot write output: " + output);
        f << text << '\n';
    }
}

std::vector<std::uint32_t> read_item_file(const std::string& path,
                                          ItemKind kind, const ProbGraph& g) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open item file: " + path);
    std::map<std::pair<NodeId, NodeId>, EdgeId> edge_of;
    if (kind == ItemKind::Edge)
        for (EdgeId e = 0; e < g.m; ++e) edge_of[g.endpoints(e)] = e;

    std::vector<std::uint32_t> ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream is(line);
        std::vector<std::uint64_t> nums;
        std::uint64_t x;
        while (is >> x) nums.push_back(x);
        if (nums.empty()) continue;
        if (nums.size() == 1) {
            ids.push_back(static_cast<std::uint32_t>(nums[0]));
        } else if (nums.size() == 2 && kind == ItemKind::Edge) {
            auto key = std::make_pair(static_cast<NodeId>(nums[0]),
                                      static_cast<NodeId>(nums[1]));
            auto it = edge_of.find(key);
            if (it == edge_of.end())
                throw DataError(path + ":" + std::to_string(lineno) +
                                ": unknown edge " + std::to_string(nums[0]) +
                                " -> " + std::to_string(nums[1]));
            ids.push_back(it->second);
        } else {
            throw DataError(path + ":" + std::to_string(lineno) +
                            ": malformed line");
        }
    }
    return ids;
}

ItemKind parse_mode(const std::string& mode) {
    if (mode == "edge") return ItemKind::Edge;
    if (mode == "node") return ItemKind::Node;
    throw CLI::ValidationError("--mode", "expected edge|node");
}

int cmd_interdict(const GraphArgs& ga, const SuspectArgs& sa,
                  const std::string& mode, std::uint32_t k, double eps,
                  double delta, const std::string& candidates,
                  std::uint32_t workers, std::uint64_t seed,
                  std::uint64_t max_attempts, const std::string& output,
                  bool omit_timing) {
    ProbGraph g = ga.load();
    SuspectSet vi = sa.load(g, seed);
    ItemKind kind = parse_mode(mode);
    CandidateSet cand = CandidateSet::all(kind);
    if (!candidates.empty() && candidates != "all")
        cand = CandidateSet::of(kind, read_item_file(candidates, kind, g));

    InterdictionOptions opts;
    opts.workers = workers;
    opts.seed = seed;
    opts.sampler.max_attempts = max_attempts;
    InterdictionResult res =
        kind == ItemKind::Edge ? esia(g, vi, cand, k, eps, delta, opts)
                               : nsia(g, vi, cand, k, eps, delta, opts);
    emit(to_json(res, !omit_timing), output);
    return 0;
}

int cmd_estimate(const GraphArgs& ga, const SuspectArgs& sa,
                 const std::string& mode, const std::string& removal_path,
                 double eps, double delta, std::uint64_t seed,
                 const std::string& output) {
    ProbGraph g = ga.load();
    SuspectSet vi = sa.load(g, seed);
    RemovalSet removal;
    removal.kind = parse_mode(mode);
    removal.ids = read_item_file(removal_path, removal.kind, g);
    removal.validate(g);

    PrgState s = seed_from_worker(seed);
    auto est = estimate_suspension(g, vi, removal, eps, delta, s);
    json j;
    j["kind"] = to_string(removal.kind);
    j["removed"] = removal.ids.size();
    j["epsilon"] = eps;
    j["delta"] = delta;
    j["suspension"] = est.value;
    j["capped"] = est.capped;
    j["runs"] = est.runs;
    emit(j.dump(2), output);
    return 0;
}

BaselineKind parse_baseline(const std::string& name) {
    if (name == "pagerank") return BaselineKind::Pagerank;
    if (name == "maxdegree") return BaselineKind::MaxDegree;
    if (name == "randomized") return BaselineKind::Randomized;
    if (name == "infmax-v") return BaselineKind::InfMaxV;
    if (name == "infmax-vi") return BaselineKind::InfMaxVI;
    throw CLI::ValidationError(
        "--method", "expected pagerank|maxdegree|randomized|infmax-v|infmax-vi");
}

int cmd_baseline(const GraphArgs& ga, const SuspectArgs& sa,
                 const std::string& method, const std::string& mode,
                 std::uint32_t k, double eps, double delta, std::uint64_t seed,
                 std::uint32_t workers, const std::string& sweep,
                 const std::string& csv_path, const std::string& output) {
    ProbGraph g = ga.load();
    SuspectSet vi = sa.load(g, seed);
    ItemKind kind = parse_mode(mode);

    if (!sweep.empty()) {
        // suspension curves for every baseline plus the interdiction
        // algorithm, one row per (method, k)
        std::vector<std::uint32_t> ks;
        std::stringstream ss(sweep);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            ks.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
        }
        const std::pair<std::string, BaselineKind> methods[] = {
            {"pagerank", BaselineKind::Pagerank},
            {"maxdegree", BaselineKind::MaxDegree},
            {"randomized", BaselineKind::Randomized},
            {"infmax-v", BaselineKind::InfMaxV},
            {"infmax-vi", BaselineKind::InfMaxVI},
        };
        std::vector<SweepRow> rows;
        for (std::uint32_t kk : ks) {
            for (const auto& [name, bk] : methods) {
                PrgState s = seed_from_worker(seed);
                RemovalSet r = baseline(g, vi, bk, kind, kk, s);
                auto est = estimate_suspension(g, vi, r, eps, delta, s);
                rows.push_back({name, kk, est.value});
            }
            InterdictionOptions opts;
            opts.workers = workers;
            opts.seed = seed;
            CandidateSet cand = CandidateSet::all(kind);
            auto res = kind == ItemKind::Edge
                           ? esia(g, vi, cand, kk, eps, delta, opts)
                           : nsia(g, vi, cand, kk, eps, delta, opts);
            RemovalSet r{kind, res.solution};
            PrgState s = seed_from_worker(seed);
            auto est = estimate_suspension(g, vi, r, eps, delta, s);
            rows.push_back({kind == ItemKind::Edge ? "esia" : "nsia", kk,
                            est.value});
        }
        std::ofstream f(csv_path.empty() ? "sweep.csv" : csv_path);
        if (!f) throw DataError("cannot write csv");
        write_suspension_csv(f, rows);
        return 0;
    }

    PrgState s = seed_from_worker(seed);
    RemovalSet r = baseline(g, vi, parse_baseline(method), kind, k, s);
    auto est = estimate_suspension(g, vi, r, eps, delta, s);
    json j;
    j["method"] = method;
    j["kind"] = to_string(kind);
    j["k"] = k;
    j["ids"] = r.ids;
    j["suspension"] = est.value;
    if (kind == ItemKind::Node) {
        auto a = analyze_solution(g, vi, r);
        j["ssr"] = a.ssr;
        j["cost"] = a.cost;
    }
    emit(j.dump(2), output);
    return 0;
}

int cmd_sample(const GraphArgs& ga, const SuspectArgs& sa, std::uint64_t target,
               std::uint32_t workers, std::uint64_t seed,
               std::uint64_t max_attempts, const std::string& dump_path,
               const std::string& output) {
    ProbGraph g = ga.load();
    SuspectSet vi = sa.load(g, seed);
    SamplerConfig cfg;
    cfg.max_attempts = max_attempts;
    SamplePool pool = stream_samples(g, vi, workers, target, seed, cfg);
    json j;
    j["target"] = target;
    j["accepted"] = pool.accepted();
    j["attempts"] = pool.attempts;
    j["acceptance_rate"] = static_cast<double>(pool.accepted()) /
                           static_cast<double>(pool.attempts);
    j["est_influence"] = estimate_influence(pool, g.n);
    if (!dump_path.empty()) {
        std::ofstream f(dump_path);
        if (!f) throw DataError("cannot write dump: " + dump_path);
        dump_walks(pool, f);
    }
    emit(j.dump(2), output);
    return 0;
}

int cmd_partition(const GraphArgs& ga, const SuspectArgs& sa, std::uint32_t p,
                  const std::string& method, std::uint32_t hops,
                  const std::string& part_file, std::uint64_t target,
                  std::uint32_t workers, std::uint64_t seed,
                  const std::string& save_path, const std::string& output) {
    ProbGraph g = ga.load();
    PartitionMethod pm;
    if (method == "hash")
        pm = PartitionMethod::Hash;
    else if (method == "labelprop")
        pm = PartitionMethod::LabelProp;
    else if (method == "external")
        pm = PartitionMethod::ExternalFile;
    else
        throw CLI::ValidationError("--method", "expected hash|labelprop|external");

    Partitioning part = partition_graph(g, p, pm, seed, part_file);
    part = extend_partition(g, std::move(part), hops);
    if (!save_path.empty()) save_partition(part, save_path);

    json j;
    j["parts"] = p;
    j["hops"] = hops;
    j["method"] = method;
    std::vector<std::size_t> sizes, ext_sizes;
    for (std::uint32_t i = 0; i < part.p; ++i) {
        sizes.push_back(part.base[i].size());
        ext_sizes.push_back(part.extended_size(i));
    }
    j["part_sizes"] = sizes;
    j["extended_sizes"] = ext_sizes;
    if (target > 0) {
        SuspectSet vi = sa.load(g, seed);
        auto res = distributed_sample(g, vi, part, target, seed, workers);
        j["target"] = target;
        j["per_part_targets"] = res.targets;
        j["accepted"] = res.pool.accepted();
        j["attempts"] = res.attempts;
        j["crossings"] = res.crossings;
        j["crossing_fraction"] = res.crossing_fraction;
    }
    emit(j.dump(2), output);
    return 0;
}

int cmd_synth(NodeId n, std::uint32_t density, std::uint64_t seed,
              const std::string& out_path, const std::string& cache_path) {
    ProbGraph g = synth_graph(n, density, seed);
    if (!out_path.empty()) save_edge_list(g, out_path);
    if (!cache_path.empty()) save_cache(g, cache_path);
    json j;
    j["nodes"] = g.n;
    j["edges"] = g.m;
    j["seed"] = seed;
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_bench(const GraphArgs& ga, const SuspectArgs& sa, NodeId synth_nodes,
              std::uint32_t synth_density, std::uint64_t target,
              std::uint32_t workers, std::uint64_t seed,
              const std::string& output) {
    ProbGraph g = synth_nodes > 0 ? synth_graph(synth_nodes, synth_density, seed)
                                  : ga.load();
    SuspectSet vi = sa.load(g, seed);

    json j;
    j["nodes"] = g.n;
    j["edges"] = g.m;
    j["target"] = target;
    for (std::uint32_t w : {std::uint32_t(1), workers}) {
        auto t0 = std::chrono::steady_clock::now();
        SamplePool pool = stream_samples(g, vi, w, target, seed);
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        json row;
        row["workers"] = w;
        row["seconds"] = secs;
        row["attempts"] = pool.attempts;
        row["accepted"] = pool.accepted();
        row["attempts_per_sec"] = static_cast<double>(pool.attempts) / secs;
        j["runs"].push_back(row);
        if (workers == 1) break;
    }
    emit(j.dump(2), output);
    return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"Influence interdiction via hitting self-avoiding walks"};
    app.require_subcommand(1);

    GraphArgs ga;
    SuspectArgs sa;
    std::string mode = "edge", candidates = "all", output, removal_path;
    std::string method = "pagerank", sweep, csv_path, dump_path, part_file;
    std::string save_path, synth_out, cache_path, part_method = "hash";
    std::uint32_t k = 1, workers = default_workers(), parts = 1, hops = 0;
    std::uint32_t synth_density = 10;
    NodeId synth_nodes = 0;
    double eps = 0.1, delta = 0.1;
    std::uint64_t seed = 0, target = 0;
    std::uint64_t max_attempts = 100'000'000;
    bool omit_timing = false;

    auto* interdict = app.add_subcommand("interdict", "run eSIA or nSIA");
    add_graph_flags(interdict, ga);
    add_suspect_flags(interdict, sa);
    interdict->add_option("--mode", mode, "edge|node");
    interdict->add_option("--k", k, "removal budget")->required();
    interdict->add_option("--epsilon", eps);
    interdict->add_option("--delta", delta);
    interdict->add_option("--candidates", candidates,
                          "candidate file or 'all'");
    interdict->add_option("--workers", workers);
    interdict->add_option("--seed", seed);
    interdict->add_option("--max-attempts", max_attempts,
                          "sampling attempt budget");
    interdict->add_option("--output", output);
    interdict->add_flag("--omit-timing", omit_timing,
                        "suppress wall_time_s for reproducible output");

    auto* estimate = app.add_subcommand("estimate", "suspension of a removal");
    add_graph_flags(estimate, ga);
    add_suspect_flags(estimate, sa);
    estimate->add_option("--mode", mode, "edge|node");
    estimate->add_option("--removal", removal_path, "removal file")->required();
    estimate->add_option("--epsilon", eps);
    estimate->add_option("--delta", delta);
    estimate->add_option("--seed", seed);
    estimate->add_option("--output", output);

    auto* base = app.add_subcommand("baseline", "ranking baselines");
    add_graph_flags(base, ga);
    add_suspect_flags(base, sa);
    base->add_option("--method", method,
                     "pagerank|maxdegree|randomized|infmax-v|infmax-vi");
    base->add_option("--mode", mode, "edge|node");
    base->add_option("--k", k, "removal budget");
    base->add_option("--epsilon", eps);
    base->add_option("--delta", delta);
    base->add_option("--seed", seed);
    base->add_option("--workers", workers);
    base->add_option("--sweep", sweep, "comma list of budgets for CSV export");
    base->add_option("--csv", csv_path, "CSV output path for --sweep");
    base->add_option("--output", output);

    auto* sample = app.add_subcommand("sample", "pool statistics");
    add_graph_flags(sample, ga);
    add_suspect_flags(sample, sa);
    sample->add_option("--target", target, "accepted-sample target")
        ->required();
    sample->add_option("--workers", workers);
    sample->add_option("--seed", seed);
    sample->add_option("--max-attempts", max_attempts,
                       "sampling attempt budget");
    sample->add_option("--dump", dump_path, "walk dump file");
    sample->add_option("--output", output);

    auto* part = app.add_subcommand("partition", "partition and crossing report");
    add_graph_flags(part, ga);
    add_suspect_flags(part, sa);
    part->add_option("--parts", parts)->required();
    part->add_option("--method", part_method, "hash|labelprop|external");
    part->add_option("--hops", hops, "extension hops");
    part->add_option("--part-file", part_file, "external part vector");
    part->add_option("--target", target,
                     "sample this many walks to measure crossings");
    part->add_option("--workers", workers);
    part->add_option("--seed", seed);
    part->add_option("--save", save_path, "write part vector");
    part->add_option("--output", output);

    auto* synth = app.add_subcommand("synth", "generate a random graph");
    synth->add_option("--nodes", synth_nodes)->required();
    synth->add_option("--density", synth_density, "edges per node");
    synth->add_option("--seed", seed);
    synth->add_option("--out", synth_out, "edge list output");
    synth->add_option("--cache", cache_path, "binary cache output");

    auto* bench = app.add_subcommand("bench", "sampling throughput");
    bench->add_option("--graph", ga.path, "edge list file");
    bench->add_option("--weights", ga.weights);
    bench->add_option("--synth-nodes", synth_nodes,
                      "benchmark on a synthetic graph instead");
    bench->add_option("--synth-density", synth_density);
    add_suspect_flags(bench, sa);
    bench->add_option("--target", target)->required();
    bench->add_option("--workers", workers);
    bench->add_option("--seed", seed);
    bench->add_option("--output", output);

    std::vector<const char*> argv;
    argv.push_back("hsaw");
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        if (k < 1 && (interdict->parsed() || base->parsed())) {
            std::cerr << "error: --k must be at least 1\n";
            return 1;
        }
        if (interdict->parsed())
            return cmd_interdict(ga, sa, mode, k, eps, delta, candidates,
                                 workers, seed, max_attempts, output,
                                 omit_timing);
        if (estimate->parsed())
            return cmd_estimate(ga, sa, mode, removal_path, eps, delta, seed,
                                output);
        if (base->parsed())
            return cmd_baseline(ga, sa, method, mode, k, eps, delta, seed,
                                workers, sweep, csv_path, output);
        if (sample->parsed())
            return cmd_sample(ga, sa, target, workers, seed, max_attempts,
                              dump_path, output);
        if (part->parsed())
            return cmd_partition(ga, sa, parts, part_method, hops, part_file,
                                 target, workers, seed, save_path, output);
        if (synth->parsed())
            return cmd_synth(synth_nodes, synth_density, seed, synth_out,
                             cache_path);
        if (bench->parsed())
            return cmd_bench(ga, sa, synth_nodes, synth_density, target,
                             workers, seed, output);
        return 1;
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const CLI::Error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace hsaw
