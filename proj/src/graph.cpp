#include "opdmin/graph.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "opdmin/errors.hpp"
#include "opdmin/rng.hpp"

namespace opdmin {

double WeightedGraph::total_weight() const {
    double s = 0.0;
    for (const Edge& e : edges) s += e.w;
    return s;
}

std::vector<double> WeightedGraph::weighted_degrees() const {
    std::vector<double> d(n, 0.0);
    for (const Edge& e : edges) {
        d[e.u] += e.w;
        d[e.v] += e.w;
    }
    return d;
}

namespace {
int uf_find(std::vector<int>& parent, int x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}
}  // namespace

int WeightedGraph::connected_components() const {
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (const Edge& e : edges) {
        int a = uf_find(parent, e.u);
        int b = uf_find(parent, e.v);
        if (a != b) parent[a] = b;
    }
    std::unordered_set<int> roots;
    for (int i = 0; i < n; ++i) roots.insert(uf_find(parent, i));
    return static_cast<int>(roots.size());
}

WeightedGraph erdos_renyi(int n, double p, std::uint64_t seed) {
    WeightedGraph g;
    g.n = n;
    Rng rng(seed);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (rng.uniform01() < p) g.edges.push_back({i, j, 1.0});
    return g;
}

WeightedGraph sbm_two_community(int n, double frac1, double p_in, double p_out,
                                std::uint64_t seed) {
    WeightedGraph g;
    g.n = n;
    int n1 = static_cast<int>(std::llround(frac1 * n));
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            bool same = (i < n1) == (j < n1);
            double p = same ? p_in : p_out;
            if (rng.uniform01() < p) g.edges.push_back({i, j, 1.0});
        }
    }
    return g;
}

SymMatrix laplacian(const WeightedGraph& g) {
    SymMatrix l(g.n);
    for (const Edge& e : g.edges) {
        l.add(e.u, e.u, e.w);
        l.add(e.v, e.v, e.w);
        l.add(e.u, e.v, -e.w);
    }
    return l;
}

SymMatrix adjacency(const WeightedGraph& g) {
    SymMatrix a(g.n);
    for (const Edge& e : g.edges) a.add(e.u, e.v, e.w);
    return a;
}

WeightedGraph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open edge list: " + path);

    std::unordered_map<std::string, int> ids;
    auto intern = [&](const std::string& name) {
        auto [it, inserted] = ids.emplace(name, static_cast<int>(ids.size()));
        return it->second;
    };

    WeightedGraph g;
    std::unordered_map<std::int64_t, std::size_t> seen;  // canonical pair -> edge slot
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string a, b;
        if (!(ls >> a)) continue;  // blank line
        if (!(ls >> b)) throw ParseError("edge list: missing destination node", line_no);
        double w = 1.0;
        std::string wtok;
        if (ls >> wtok) {
            try {
                std::size_t pos = 0;
                w = std::stod(wtok, &pos);
                if (pos != wtok.size()) throw std::invalid_argument(wtok);
            } catch (const std::exception&) {
                throw ParseError("edge list: bad weight '" + wtok + "'", line_no);
            }
            std::string extra;
            if (ls >> extra) throw ParseError("edge list: trailing token '" + extra + "'", line_no);
        }
        if (!(w > 0.0)) throw ParseError("edge list: weight must be positive", line_no);

        int u = intern(a);
        int v = intern(b);
        if (u == v) {
            std::fprintf(stderr, "warning: skipping self-loop at line %ld\n", line_no);
            continue;
        }
        if (u > v) std::swap(u, v);
        std::int64_t key = static_cast<std::int64_t>(u) << 32 | static_cast<std::uint32_t>(v);
        if (auto it = seen.find(key); it != seen.end()) {
            std::fprintf(stderr, "warning: duplicate edge at line %ld, keeping first weight\n",
                         line_no);
            continue;
        }
        seen.emplace(key, g.edges.size());
        g.edges.push_back({u, v, w});
    }
    g.n = static_cast<int>(ids.size());
    if (g.n == 0) throw EmptyGraph("edge list contains no nodes: " + path);
    return g;
}

}  // namespace opdmin
