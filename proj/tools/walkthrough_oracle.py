#!/usr/bin/env python3
"""Straight-line reference walkthrough for the worked stick-breaking example.

Re-derives, with no shared code, the values frozen into
tests/test_discrete.cpp (regression block): root, cut indices,
glue indices, edge list, first-hit positions, measure atoms, height,
a distance query, and a stage-Hausdorff value.  Run it and compare its
output against the constants in the test whenever either changes.
"""

# child counts, 1-based vertex labels V1..V11 (deliberately unsorted input)
d = [1, 2, 1, 3, 3, 0, 0, 0, 0, 0, 0]
s = len(d)
assert sum(d) == s - 1

# the walk (1-based labels)
A = [4, 5, 2, 5, 3, 4, 5, 4, 1, 2]
assert len(A) == s - 1
for v in range(1, s + 1):
    assert A.count(v) == d[v - 1], v

# leaves: zero-child vertices in label order
leaves = [v for v in range(1, s + 1) if d[v - 1] == 0]

in_tree = {A[0]}
edges = []
cuts = []          # Y: 1-based walk indices where a repetition occurs
glues = []         # Z: first index z with A_z = A_{Y}
glue_vertex = []   # which vertex the glue lands on
next_leaf = 0
first_hit = {}     # X: vertex -> first 1-based index in A
for idx, v in enumerate(A, start=1):
    if v not in first_hit:
        first_hit[v] = idx

for i in range(2, s + 1):          # steps 2..s, step s is the epilogue
    if i <= s - 1 and A[i - 1] not in in_tree:
        edges.append((A[i - 2], A[i - 1]))
        in_tree.add(A[i - 1])
    else:
        if i <= s - 1:             # genuine repetition: record the cut
            cuts.append(i)
            glues.append(first_hit[A[i - 1]])
            glue_vertex.append(A[i - 1])
        leaf = leaves[next_leaf]
        next_leaf += 1
        edges.append((A[i - 2], leaf))
        in_tree.add(leaf)

root = A[0]

# depths / height / pairwise distance by BFS over the edge list
adj = {}
for a, b in edges:
    adj.setdefault(a, []).append(b)
    adj.setdefault(b, []).append(a)

def bfs(src):
    dist = {src: 0}
    frontier = [src]
    while frontier:
        nxt = []
        for u in frontier:
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    nxt.append(w)
        frontier = nxt
    return dist

depth = bfs(root)
height = max(depth.values())

# measure atoms: mass d_i - 1 at X_i for every vertex with d_i >= 2
atoms = sorted((first_hit[v], d[v - 1] - 1, v)
               for v in range(1, s + 1) if d[v - 1] >= 2)

# Hausdorff gap of the stage after the first cut: tree vertices vs the
# sub-tree present right after step Y_1 (walk prefix + first leaf)
stage = {A[0], A[1], A[2], leaves[0]}
far = max(min(bfs(v)[u] for u in stage) for v in adj)

sigma2 = sum(x * (x - 1) for x in d)

print("root       :", root)
print("Y          :", cuts)
print("Z          :", glues)
print("glue vertex:", glue_vertex)
print("edges      :", edges)
print("n_edges    :", len(edges))
print("X          :", dict(sorted(first_hit.items())))
print("mu atoms   :", atoms)
print("height     :", height)
print("d(V6,V8)   :", bfs(6)[8])
print("stage dH   :", far)
print("sigma^2    :", sigma2)
print("N          :", sum(x - 1 for x in d if x >= 1))
print("leaf count :", len(leaves))
