#-------------------------------------------------------------------------------
#
#   Copyright 2026 The siot-trust Authors
#
#   Licensed under the Apache License, Version 2.0 (the "License");
#   you may not use this file except in compliance with the License.
#   You may obtain a copy of the License at
#
#       http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS,
#   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
#   See the License for the specific language governing permissions and
#   limitations under the License.
#
#-------------------------------------------------------------------------------

"""Regenerate the bundled graph fixtures and their reference statistics.

The Facebook-like fixture is a synthetic stand-in for the SNAP ego-network
extract: 347 nodes, 5038 undirected edges, community structure plus a sparse
periphery so that diameter, path length and clustering land near the published
subnetwork. Reference statistics are computed with networkx and frozen into
data/*.stats.csv for the C++ tests.
"""
import random
import sys

import networkx as nx

N, E = 347, 5038


def facebook_like(seed, group_min=20, group_max=30, p_in=0.8, tail=4):
    rng = random.Random(seed)
    g = nx.Graph()
    g.add_nodes_from(range(N))
    core = list(range(N - tail))
    groups, start = [], 0
    while start < len(core):
        s = min(len(core) - start, rng.randint(group_min, group_max))
        groups.append(core[start:start + s])
        start += s
    for grp in groups:
        for i, u in enumerate(grp):
            for v in grp[i + 1:]:
                if rng.random() < p_in:
                    g.add_edge(u, v)
    # communities sit on a ring; bridges only join ring neighbours
    while g.number_of_edges() < E - tail:
        a = rng.randrange(len(groups))
        b = (a + 1) % len(groups)
        u, v = rng.choice(groups[a]), rng.choice(groups[b])
        g.add_edge(u, v)
    # a short chain hanging off the core stretches the diameter
    chain = list(range(N - tail, N))
    g.add_edge(groups[0][0], chain[0])
    for u, v in zip(chain, chain[1:]):
        g.add_edge(u, v)
    return g


def stats(g):
    comps = list(nx.connected_components(g))
    lcc = g.subgraph(max(comps, key=len))
    return dict(
        nodes=g.number_of_nodes(),
        edges=g.number_of_edges(),
        avg_degree=2 * g.number_of_edges() / g.number_of_nodes(),
        diameter=nx.diameter(lcc),
        avg_path_length=nx.average_shortest_path_length(lcc),
        avg_clustering=nx.average_clustering(g),
        components=len(comps),
    )


def synthetic50(seed):
    g = nx.connected_watts_strogatz_graph(50, 6, 0.2, seed=seed)
    return g


def write_edges(g, path, header):
    with open(path, "w") as f:
        f.write(header)
        for u, v in sorted(tuple(sorted(e)) for e in g.edges()):
            f.write(f"{u} {v}\n")


def write_stats(s, path):
    keys = ["nodes", "edges", "avg_degree", "diameter", "avg_path_length",
            "avg_clustering", "components"]
    with open(path, "w") as f:
        f.write(",".join(keys) + "\n")
        f.write(",".join(repr(s[k]) for k in keys) + "\n")


def write_features(g, path, k, seed):
    rng = random.Random(seed)
    with open(path, "w") as f:
        for u in sorted(g.nodes()):
            # each node exposes 2-4 of the k profile attributes
            on = set(rng.sample(range(k), rng.randint(2, 4)))
            f.write(" ".join([str(u)] + ["1" if i in on else "0" for i in range(k)]) + "\n")


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "data"
    seed = int(sys.argv[2]) if len(sys.argv) > 2 else 9
    fb = facebook_like(seed)
    s = stats(fb)
    print(s)
    write_edges(fb, f"{out}/facebook_like.edges",
                "# synthetic Facebook-like subnetwork (347 nodes, 5038 edges)\n")
    write_stats(s, f"{out}/facebook_like.stats.csv")
    write_features(fb, f"{out}/facebook_like.feat", 6, seed)
    g50 = synthetic50(seed)
    print(stats(g50))
    write_edges(g50, f"{out}/synthetic50.edges", "# bundled 50-node small-world graph\n")
    write_stats(stats(g50), f"{out}/synthetic50.stats.csv")
