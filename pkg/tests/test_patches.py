import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phm.cloud import PointCloud
from phm.errors import DegeneratePatch, ShapeError
from phm.patches import (
    PatchGraph,
    build_patch_graph,
    cap_subcloud,
    eigendecompose,
    graph_fourier,
    partition_into_patch_pairs,
)

from conftest import random_cloud


def make_graph(edges, n, weights=None):
    """Hand-assemble a PatchGraph from an undirected edge list."""
    ei = np.array([e[0] for e in edges], dtype=np.intp)
    ej = np.array([e[1] for e in edges], dtype=np.intp)
    w = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=float)
    adj = np.zeros((n, n))
    adj[ei, ej] = w
    adj[ej, ei] = w
    deg = adj.sum(axis=1)
    return PatchGraph(n, ei, ej, w, deg, np.diag(deg) - adj, sigma2=1.0)


def edge_set_oracle(points, k2):
    """Brute-force union-symmetrized KNN edge set."""
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    k = min(k2, n - 1)
    edges = set()
    for i in range(n):
        d2 = ((pts - pts[i]) ** 2).sum(axis=1)
        order = np.lexsort((np.arange(n), d2))
        nbrs = [j for j in order if j != i][:k]
        for j in nbrs:
            edges.add((min(i, j), max(i, j)))
    return edges


# --- partition ---------------------------------------------------------------

def test_single_cell_holds_everything(small_cloud):
    pairs = partition_into_patch_pairs(small_cloud, small_cloud, 1)
    assert len(pairs) == 1
    assert len(pairs[0].ref_points) == len(small_cloud)
    assert len(pairs[0].dist_points) == len(small_cloud)


def test_points_go_to_nearer_seed():
    pos = np.array([[0, 0, 0], [10, 0, 0], [1, 0, 0], [9, 0, 0]], dtype=float)
    cloud = PointCloud.from_arrays(pos, np.zeros((4, 3), dtype=np.uint8))
    pairs = partition_into_patch_pairs(cloud, cloud, 2)
    # FPS from index 0 picks the far end (index 1) as the second seed
    cell_of = {}
    for p in pairs:
        for i in p.ref_points.indices:
            cell_of[int(i)] = p.cell_id
    assert cell_of[2] == cell_of[0]
    assert cell_of[3] == cell_of[1]


def test_partition_matches_bruteforce_assignment():
    ref = random_cloud(500, seed=41)
    dist = random_cloud(480, seed=42)
    pairs = partition_into_patch_pairs(ref, dist, 5)
    from phm.cloud import farthest_point_sample
    seeds = ref.positions[farthest_point_sample(ref, 5)]

    def assign(points):
        out = []
        for p in points:
            d2 = ((seeds - p) ** 2).sum(axis=1)
            out.append(int(d2.argmin()))
        return out

    ref_cells = assign(ref.positions)
    dist_cells = assign(dist.positions)
    seen_ref, seen_dist = set(), set()
    for pair in pairs:
        for i in pair.ref_points.indices:
            assert ref_cells[int(i)] == pair.cell_id
            seen_ref.add(int(i))
        for i in pair.dist_points.indices:
            assert dist_cells[int(i)] == pair.cell_id
            seen_dist.add(int(i))
    assert seen_ref == set(range(len(ref)))
    assert seen_dist == set(range(len(dist)))


def test_partition_default_cell_count():
    ref = random_cloud(2500, seed=1)
    pairs = partition_into_patch_pairs(ref, ref)
    assert len(pairs) == 2


# --- graph construction ------------------------------------------------------

def test_three_collinear_points_k1():
    pts = np.array([[0, 0, 0], [1, 0, 0], [2, 0, 0]], dtype=float)
    g = build_patch_graph(pts, k2=1)
    assert g.num_edges == 2
    assert g.sigma2 == pytest.approx(1.0)
    np.testing.assert_allclose(g.weights, math.exp(-1), rtol=1e-15)


def test_two_point_graph():
    pts = np.array([[0, 0, 0], [0, 3, 0]], dtype=float)
    g = build_patch_graph(pts, k2=10)
    assert g.num_edges == 1
    assert g.sigma2 == pytest.approx(9.0)
    assert g.weights[0] == pytest.approx(math.exp(-1), rel=1e-15)


def test_graph_edges_match_bruteforce_union():
    cloud = random_cloud(40, seed=77)
    g = build_patch_graph(cloud.positions, k2=10)
    got = set(zip(g.edges_i.tolist(), g.edges_j.tolist()))
    assert got == edge_set_oracle(cloud.positions, 10)
    np.testing.assert_allclose(g.laplacian.sum(axis=1), 0.0, atol=1e-10)
    assert np.all(g.weights > 0) and np.all(g.weights <= 1.0)


def test_degenerate_patches_raise():
    with pytest.raises(DegeneratePatch):
        build_patch_graph(np.zeros((1, 3)))
    with pytest.raises(DegeneratePatch):
        build_patch_graph(np.zeros((5, 3)))  # all coincident -> sigma2 == 0


def test_weight_formula_against_oracle():
    cloud = random_cloud(25, seed=13)
    g = build_patch_graph(cloud.positions, k2=4)
    d = cloud.positions[g.edges_i] - cloud.positions[g.edges_j]
    d2 = (d * d).sum(axis=1)
    assert g.sigma2 == pytest.approx(float(d2.mean()), rel=1e-15)
    np.testing.assert_allclose(g.weights, np.exp(-d2 / g.sigma2), rtol=1e-15)


# --- eigendecomposition ------------------------------------------------------

def test_two_node_spectrum_closed_form():
    g = make_graph([(0, 1)], 2, weights=[0.7])
    spec = eigendecompose(g)
    np.testing.assert_allclose(spec.eigenvalues, [0.0, 1.4], atol=1e-12)
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(np.abs(spec.eigenvectors), [[s, s], [s, s]], atol=1e-12)
    # sign convention: largest-magnitude entry (first on ties) is positive
    assert spec.eigenvectors[0, 0] > 0 and spec.eigenvectors[0, 1] > 0


def test_path3_eigenvalues():
    # characteristic polynomial of the unit-weight 3-path Laplacian: 0, 1, 3
    g = make_graph([(0, 1), (1, 2)], 3)
    spec = eigendecompose(g)
    np.testing.assert_allclose(spec.eigenvalues, [0.0, 1.0, 3.0], atol=1e-12)


def test_connected_graph_has_constant_nullvector():
    cloud = random_cloud(30, seed=5)
    g = build_patch_graph(cloud.positions, k2=5)
    spec = eigendecompose(g)
    assert abs(spec.eigenvalues[0]) <= 1e-8
    v0 = spec.eigenvectors[:, 0]
    if spec.eigenvalues[1] > 1e-8:  # connected
        np.testing.assert_allclose(v0, np.full(30, 1 / math.sqrt(30)), atol=1e-8)


def test_spectrum_orthonormal_and_reconstructs():
    cloud = random_cloud(35, seed=6)
    g = build_patch_graph(cloud.positions, k2=6)
    spec = eigendecompose(g)
    v = spec.eigenvectors
    np.testing.assert_allclose(v.T @ v, np.eye(35), atol=1e-8)
    recon = v @ np.diag(spec.eigenvalues) @ v.T
    np.testing.assert_allclose(recon, g.laplacian, atol=1e-6)
    assert np.all(np.diff(spec.eigenvalues) >= -1e-12)
    assert np.all(spec.eigenvalues >= -1e-9)


# --- graph Fourier transform -------------------------------------------------

def test_gft_roundtrip():
    cloud = random_cloud(20, seed=8)
    spec = eigendecompose(build_patch_graph(cloud.positions, k2=4))
    rng = np.random.default_rng(3)
    u = rng.normal(size=20)
    back = graph_fourier(spec, graph_fourier(spec, u, "forward"), "inverse")
    np.testing.assert_allclose(back, u, atol=1e-9)


def test_gft_constant_hits_first_coefficient():
    cloud = random_cloud(16, seed=14)
    spec = eigendecompose(build_patch_graph(cloud.positions, k2=5))
    assert spec.eigenvalues[1] > 1e-8  # need a connected patch for this case
    c = 3.25
    uhat = graph_fourier(spec, np.full(16, c), "forward")
    assert uhat[0] == pytest.approx(c * math.sqrt(16), rel=1e-12)
    np.testing.assert_allclose(uhat[1:], 0.0, atol=1e-9)


@given(st.integers(0, 9999))
def test_gft_parseval(seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0, 5, size=(10, 3))
    spec = eigendecompose(build_patch_graph(pts, k2=3))
    u = rng.normal(size=10)
    uhat = graph_fourier(spec, u, "forward")
    assert np.linalg.norm(u) == pytest.approx(np.linalg.norm(uhat), abs=1e-9)


def test_gft_shape_mismatch():
    cloud = random_cloud(12, seed=2)
    spec = eigendecompose(build_patch_graph(cloud.positions, k2=3))
    with pytest.raises(ShapeError):
        graph_fourier(spec, np.zeros(5))


# --- patch cap ---------------------------------------------------------------

def test_cap_subcloud_noop_below_cap():
    pairs = partition_into_patch_pairs(random_cloud(50, seed=1), random_cloud(50, seed=2), 1)
    sub, capped = cap_subcloud(pairs[0].ref_points, cap=100)
    assert not capped and len(sub) == 50


def test_cap_subcloud_uniform_and_deterministic():
    pairs = partition_into_patch_pairs(random_cloud(100, seed=1), random_cloud(100, seed=2), 1)
    sub1, capped1 = cap_subcloud(pairs[0].ref_points, cap=30)
    sub2, _ = cap_subcloud(pairs[0].ref_points, cap=30)
    assert capped1 and len(sub1) == 30
    assert len(np.unique(sub1.indices)) == 30
    np.testing.assert_array_equal(sub1.indices, sub2.indices)
