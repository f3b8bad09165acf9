import itertools
import json

import pytest

from wronski.netcomb import (
    EdgeId,
    NetClass,
    NetStructureError,
    arc,
    build_complex,
    catalan_u,
    chord,
    distinguished_elements,
    dual_trees,
    enumerate_nets,
    face_order,
    parity_map,
)


# ---------------------------------------------------------------------------
# independent oracle: generate every perfect matching, then filter crossings
# ---------------------------------------------------------------------------

def all_perfect_matchings(points):
    points = list(points)
    if not points:
        yield []
        return
    first = points[0]
    for j in range(1, len(points)):
        rest = points[1:j] + points[j + 1 :]
        for m in all_perfect_matchings(rest):
            yield [(first, points[j])] + m


def crosses(p, q):
    a, b = sorted(p)
    c, e = sorted(q)
    return (a < c < b < e) or (c < a < e < b)


def brute_force_nets(d):
    out = set()
    for m in all_perfect_matchings(range(1, 2 * d - 1)):
        if not any(crosses(p, q) for p, q in itertools.combinations(m, 2)):
            out.add(tuple(sorted(tuple(sorted(p)) for p in m)))
    return sorted(out)


# ---------------------------------------------------------------------------
# catalan_u
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("d,expected", [(1, 1), (4, 5), (9, 1430)])
def test_catalan_values(d, expected):
    assert catalan_u(d) == expected


def test_catalan_rejects_nonpositive():
    with pytest.raises(ValueError):
        catalan_u(0)


# ---------------------------------------------------------------------------
# enumerate_nets
# ---------------------------------------------------------------------------

def test_enumerate_d3_exact():
    nets = enumerate_nets(3)
    assert [n.matching for n in nets] == [((1, 2), (3, 4)), ((1, 4), (2, 3))]


@pytest.mark.parametrize("d", [3, 4, 5, 6, 7, 8])
def test_enumerate_counts_match_catalan(d):
    assert len(enumerate_nets(d)) == catalan_u(d)


@pytest.mark.parametrize("d", [3, 4, 5])
def test_enumerate_matches_brute_force(d):
    assert [n.matching for n in enumerate_nets(d)] == brute_force_nets(d)


def test_crossing_matching_rejected():
    with pytest.raises(NetStructureError):
        NetClass(3, ((1, 3), (2, 4)))


def test_incomplete_matching_rejected():
    with pytest.raises(NetStructureError):
        NetClass(3, ((1, 2), (2, 3)))


def test_netclass_json_roundtrip_byte_identity():
    for net in enumerate_nets(4):
        text = net.to_json()
        assert NetClass.from_json(text).to_json() == text


# ---------------------------------------------------------------------------
# EdgeId
# ---------------------------------------------------------------------------

def test_edgeid_labels_and_parse():
    assert arc(3).label == "t3"
    assert chord(2, 5).label == "c2-5"
    assert EdgeId.parse("t3") == arc(3)
    assert EdgeId.parse("m1-4") == EdgeId("mirror", 1, 4)


def test_edgeid_endpoints_wrap():
    assert arc(1).endpoints(3) == (4, 1)
    assert arc(2).endpoints(3) == (1, 2)


# ---------------------------------------------------------------------------
# build_complex
# ---------------------------------------------------------------------------

def inside_face_signature(cx):
    return sorted(
        (tuple(sorted(e.label for e in f.edges)))
        for f in cx.inside_faces
    )


def test_build_complex_d3_hand_example():
    cx = build_complex(NetClass(3, ((1, 2), (3, 4))))
    assert inside_face_signature(cx) == [
        ("c1-2", "c3-4", "t1", "t3"),
        ("c1-2", "t2"),
        ("c3-4", "t4"),
    ]


@pytest.mark.parametrize("d", [3, 4, 5])
def test_complex_counts_and_degrees(d):
    for net in enumerate_nets(d):
        cx = build_complex(net)
        assert len(cx.faces) == 2 * d
        assert len(cx.edges) == 4 * d - 4
        assert len(cx.inside_faces) == d
        degree = {}
        for f in cx.faces:
            for v, e in zip(f.vertices, f.edges):
                degree[v] = degree.get(v, 0) + 1
        # each vertex appears once per incident (face, outgoing edge) corner,
        # twice per incident edge across all faces: degree 4 means 4 corners
        assert all(c == 4 for c in degree.values())
        assert all(len(f.vertices) % 2 == 0 for f in cx.faces)


# ---------------------------------------------------------------------------
# distinguished elements
# ---------------------------------------------------------------------------

def test_distinguished_d3_first_net():
    cx = build_complex(NetClass(3, ((1, 2), (3, 4))))
    dist = distinguished_elements(cx)
    assert dist.N == 3
    assert dist.e1 == arc(1) == dist.e_prime
    assert dist.e_neg1 == chord(3, 4) == dist.e_double_prime
    assert len(cx.face_by_id[dist.g0].vertices) == 4


def test_distinguished_d3_second_net():
    cx = build_complex(NetClass(3, ((1, 4), (2, 3))))
    dist = distinguished_elements(cx)
    assert dist.N == 3
    assert dist.e1 == chord(1, 4) == dist.e_double_prime
    assert dist.e_neg1 == arc(4) == dist.e_prime


@pytest.mark.parametrize("d", [3, 4, 5, 6, 7])
def test_distinguished_total_and_N_range(d):
    for net in enumerate_nets(d):
        dist = distinguished_elements(build_complex(net))
        assert 3 <= dist.N <= 2 * d - 3
        assert {dist.e1, dist.e_neg1} == {dist.e_prime, dist.e_double_prime}
        assert dist.e_prime.kind == "arc"
        assert dist.e_double_prime.kind != "arc"


# ---------------------------------------------------------------------------
# parity
# ---------------------------------------------------------------------------

def test_parity_d3_values():
    cx = build_complex(NetClass(3, ((1, 2), (3, 4))))
    parity = parity_map(cx)
    g0 = cx.distinguished.g0
    assert parity[g0] == 1
    for f in cx.inside_faces:
        if f.id != g0:
            assert parity[f.id] == -1


@pytest.mark.parametrize("d", [3, 4, 5])
def test_parity_flips_across_mirror(d):
    for net in enumerate_nets(d):
        cx = build_complex(net)
        parity = parity_map(cx)
        for f in cx.inside_faces:
            assert parity[cx.mirror_face_id(f.id)] == -parity[f.id]


# ---------------------------------------------------------------------------
# dual trees
# ---------------------------------------------------------------------------

def test_dual_trees_d3_shape():
    cx = build_complex(NetClass(3, ((1, 2), (3, 4))))
    s, s_hat = dual_trees(cx)
    g0 = cx.distinguished.g0
    assert s.root == g0
    assert sorted(len(s.neighbors[n]) for n in s.nodes) == [1, 1, 2]
    assert len(s.neighbors[g0]) == 2
    # leaf attachment: t1, t3 at the root, t2 and t4 at the lens faces
    attach = {e.label: u for u, v, e in s_hat.edges if isinstance(v, EdgeId)}
    assert attach["t1"] == g0 and attach["t3"] == g0
    assert attach["t2"] != g0 and attach["t4"] != g0
    assert attach["t2"] != attach["t4"]


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_dual_tree_counts(d):
    for net in enumerate_nets(d):
        cx = build_complex(net)
        s, s_hat = dual_trees(cx)
        s.check_tree()
        s_hat.check_tree()
        assert len(s.nodes) == d
        assert len(s.edges) == d - 1
        assert len(s_hat.nodes) == d + (2 * d - 2)
        leaves = [n for n in s_hat.nodes if len(s_hat.neighbors[n]) == 1]
        assert len(leaves) >= 2 * d - 2


# ---------------------------------------------------------------------------
# face order
# ---------------------------------------------------------------------------

def test_face_order_d3():
    cx = build_complex(NetClass(3, ((1, 2), (3, 4))))
    order = face_order(cx)
    assert order[0] == cx.distinguished.g0
    assert len(order) == 3


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_face_order_refines_tree_order(d):
    for net in enumerate_nets(d):
        cx = build_complex(net)
        order = face_order(cx)  # raises if the one-shared-edge property fails
        index = {fid: i for i, fid in enumerate(order)}
        s, _ = dual_trees(cx)
        parents = s.parents()
        for fid in order[1:]:
            parent, _ = parents[fid]
            assert index[parent] < index[fid]
