import random
from fractions import Fraction

import pytest

from dimerbfz.bfz import build_bfz_quiver, build_shuffle
from dimerbfz.cartan import build_gcm, enumerate_weyl
from dimerbfz.cylinder import branch_decompose, build_layout, boundary_arrows_of_sheet, enumerate_faces
from dimerbfz.errors import CapError, ValidationError
from dimerbfz.potential import (
    BruteForceSolver,
    Member,
    NotCertifiedWithinCap,
    NotMemberExact,
    PathContext,
    Potential,
    brute_force_membership,
    cyclic_derivative,
    cyclically_equal,
    face_certificates,
    face_distance,
    jacobian_generators,
    necklace,
    necklace_project,
    potential_from_cycles,
    rigidity_check,
    simple_cycles,
    superpotential,
)
from dimerbfz.quiver import Quiver

A2 = build_gcm("A2")
A3 = build_gcm("A3")
D4 = build_gcm("D4")

# the two-triangle quiver used for the rigid / non-rigid potential example:
# arrows a: 1->2, b: 2->4, c: 4->1, d: 1->3, e: 3->4
A, B, C, D, E = range(5)


def two_triangle_quiver():
    return Quiver([1, 2, 3, 4], [(A, 1, 2), (B, 2, 4), (C, 4, 1), (D, 1, 3), (E, 3, 4)])


def ctx2():
    return PathContext(two_triangle_quiver())


def s1(ctx):
    return potential_from_cycles(ctx, [((A, B, C), 1)])


def s2(ctx):
    return potential_from_cycles(ctx, [((A, B, C), 1), ((C, D, E), 1)])


def dimer_instance(gcm, u):
    w = build_shuffle(gcm, u, ())
    q = build_bfz_quiver(gcm, w)
    deco = branch_decompose(gcm.dynkin_graph())
    lay = build_layout(q, deco)
    faces = enumerate_faces(q.quiver, lay)
    ctx = PathContext(q.quiver)
    S = superpotential(faces, ctx)
    return q, lay, faces, ctx, S


def test_cyclic_derivative_paper_values():
    ctx = ctx2()
    abc = {(A, B, C): Fraction(1)}
    assert cyclic_derivative(abc, A, ctx) == {(B, C): 1}
    both = {(A, B, C): Fraction(1), (C, D, E): Fraction(1)}
    assert cyclic_derivative(both, C, ctx) == {(A, B): 1, (D, E): 1}
    assert cyclic_derivative(abc, 99, ctx) == {}


def test_jacobian_generators_paper_sets():
    ctx = ctx2()
    gens1 = jacobian_generators(s1(ctx))
    assert gens1 == {
        A: {(B, C): 1},
        B: {(C, A): 1},
        C: {(A, B): 1},
    }
    gens2 = jacobian_generators(s2(ctx))
    assert gens2 == {
        A: {(B, C): 1},
        B: {(C, A): 1},
        C: {(A, B): 1, (D, E): 1},
        D: {(E, C): 1},
        E: {(C, D): 1},
    }


def test_derivative_is_linear():
    ctx = ctx2()
    rng = random.Random(3)
    cycles = [(A, B, C), (C, D, E), (B, C, A)]
    for _ in range(20):
        p = {c: Fraction(rng.randint(-4, 4)) for c in cycles}
        q = {c: Fraction(rng.randint(-4, 4)) for c in cycles}
        alpha, beta = Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3))
        combined = {}
        for c in cycles:
            v = alpha * p[c] + beta * q[c]
            if v:
                combined[c] = v
        for arrow in (A, B, C, D, E):
            lhs = cyclic_derivative(combined, arrow, ctx)
            rhs = {}
            for path, coeff in cyclic_derivative(p, arrow, ctx).items():
                rhs[path] = rhs.get(path, 0) + alpha * coeff
            for path, coeff in cyclic_derivative(q, arrow, ctx).items():
                rhs[path] = rhs.get(path, 0) + beta * coeff
            rhs = {k: v for k, v in rhs.items() if v}
            assert lhs == rhs


def test_superpotential_a2_fixture_single_signed_term():
    q, lay, faces, ctx, S = dimer_instance(A2, (1, 2, 1))
    assert len(S.elem) == 1
    ((cycle, coeff),) = S.elem.items()
    assert abs(coeff) == 1
    assert necklace(cycle) == necklace(tuple(faces[0].arrows))


def test_superpotential_empty_when_no_faces():
    q, lay, faces, ctx, S = dimer_instance(A3, ())
    assert S.elem == {}


def test_superpotential_term_count_and_sheet_split():
    q, lay, faces, ctx, S = dimer_instance(A3, (3, 2, 1, 2, 3))
    assert len(S.elem) == len(faces) == 6
    merged = {}
    for r, elem in S.by_sheet.items():
        for p, c in elem.items():
            assert p not in merged
            merged[p] = c
    assert merged == S.elem
    signs = {f.orientation for f in faces}
    assert signs == {"cw", "ccw"}


def test_face_distance_a2_fixture():
    q, lay, faces, ctx, S = dimer_instance(A2, (1, 2, 1))
    boundary = boundary_arrows_of_sheet(q.quiver, lay, 0)
    assert face_distance(faces, boundary) == {0: 0}


def test_face_distance_boundary_fan():
    # a fan of triangles, every arrow on the outer ring: all at distance 0
    q, lay, faces, ctx, S = dimer_instance(A3, (2, 1, 2))
    boundary = boundary_arrows_of_sheet(q.quiver, lay, 0)
    assert len(faces) == 3
    assert face_distance(faces, boundary) == {0: 0, 1: 0, 2: 0}
    # adjacent faces alternate orientation across their shared edges
    assert [f.orientation for f in faces] == ["cw", "ccw", "cw"]


def test_face_certificates_a2_fixture_and_replay():
    q, lay, faces, ctx, S = dimer_instance(A2, (1, 2, 1))
    boundary = boundary_arrows_of_sheet(q.quiver, lay, 0)
    certs = face_certificates(S.sheet(0), faces, boundary, ctx)
    assert set(certs) == {0}
    cert = certs[0]
    assert cert.verified
    assert cert.steps[0].kind == "boundary"


def test_face_certificates_example_36_all_faces():
    q, lay, faces, ctx, S = dimer_instance(A3, (3, 2, 1, 2, 3))
    boundary = boundary_arrows_of_sheet(q.quiver, lay, 0)
    certs = face_certificates(S.sheet(0), faces, boundary, ctx)
    assert len(certs) == 6
    assert all(c.verified for c in certs.values())


def test_simple_cycles_two_triangle_quiver():
    cycles = simple_cycles(two_triangle_quiver())
    assert sorted(necklace(c) for c in cycles) == [necklace((A, B, C)), necklace((C, D, E))]


def test_brute_force_monomial_not_member():
    ctx = ctx2()
    S = s1(ctx)
    cde = (C, D, E)
    assert isinstance(brute_force_membership(cde, S, 9), NotMemberExact)


def test_brute_force_member_abc_in_s1():
    ctx = ctx2()
    S = s1(ctx)
    res = brute_force_membership((A, B, C), S, 3)
    assert isinstance(res, Member)


def test_brute_force_member_both_in_s2():
    ctx = ctx2()
    S = s2(ctx)
    assert isinstance(brute_force_membership((A, B, C), S, 6), Member)
    assert isinstance(brute_force_membership((C, D, E), S, 6), Member)


def test_brute_force_a2_fixture_agrees_with_certificates():
    q, lay, faces, ctx, S = dimer_instance(A2, (1, 2, 1))
    cycle = next(iter(S.elem))
    res = brute_force_membership(cycle, S, 6)
    assert isinstance(res, Member)


def test_brute_force_rejects_overlong_cycle():
    ctx = ctx2()
    with pytest.raises(ValidationError):
        brute_force_membership((A, B, C), s1(ctx), 2)


def test_rigidity_s1_not_rigid_with_witness():
    ctx = ctx2()
    rep = rigidity_check(two_triangle_quiver(), s1(ctx))
    assert not rep.rigid
    assert len(rep.failures) == 1
    bad, reason = rep.failures[0]
    assert necklace(bad) == necklace((C, D, E))
    assert "exact" in reason


def test_rigidity_s2_rigid_all_cycles():
    ctx = ctx2()
    rep = rigidity_check(two_triangle_quiver(), s2(ctx))
    assert rep.rigid
    assert len(rep.cycles) == 2
    assert len(rep.certificates) == 2
    assert all(c.verified for c in rep.certificates.values())


def test_rigidity_a2_fixture_structural():
    q, lay, faces, ctx, S = dimer_instance(A2, (1, 2, 1))
    rep = rigidity_check(q.quiver, S, layout=lay, faces=faces)
    assert rep.rigid
    assert len(rep.cycles) == 1
    assert rep.oracle_only == 0


def test_rigidity_example_36():
    q, lay, faces, ctx, S = dimer_instance(A3, (3, 2, 1, 2, 3))
    rep = rigidity_check(q.quiver, S, layout=lay, faces=faces)
    assert rep.rigid, rep.to_json()["failures"]
    assert rep.cycles


def test_rigidity_cap_error():
    q, lay, faces, ctx, S = dimer_instance(A3, (3, 2, 1, 2, 3))
    longest = max(len(c) for c in simple_cycles(q.quiver))
    with pytest.raises(CapError):
        rigidity_check(q.quiver, S, layout=lay, faces=faces, length_cap=longest - 1)


def test_rigidity_small_sweep_with_oracle_agreement():
    for gcm, max_len in ((A2, 5), (A3, 5)):
        for u in enumerate_weyl(gcm, max_len):
            q, lay, faces, ctx, S = dimer_instance(gcm, u)
            rep = rigidity_check(q.quiver, S, layout=lay, faces=faces)
            assert rep.rigid, (u, rep.to_json()["failures"])
            if not rep.cycles:
                continue
            cap = max(len(c) for c in rep.cycles) + 2 * max(len(p) for p in S.elem)
            solver = BruteForceSolver(S, cap)
            for cycle in rep.cycles:
                assert isinstance(solver.membership(cycle), Member), (u, cycle)


def test_anchor_invariance_of_verdicts():
    q, lay, faces, ctx, S = dimer_instance(A3, (3, 2, 1, 2, 3))
    shifted = {}
    for path, coeff in S.elem.items():
        shifted[path[1:] + path[:1]] = coeff
    S_shifted = Potential(ctx, shifted, {r: {p[1:] + p[:1]: c for p, c in e.items()} for r, e in S.by_sheet.items()})
    rep = rigidity_check(q.quiver, S_shifted, layout=lay, faces=faces)
    base = rigidity_check(q.quiver, S, layout=lay, faces=faces)
    assert rep.rigid == base.rigid
    assert set(rep.certificates) == set(base.certificates)


def test_necklace_projection_merges_rotations():
    ctx = ctx2()
    cyc = (A, B, C)
    rot = (B, C, A)
    assert necklace_project({cyc: Fraction(1), rot: Fraction(-1)}) == {}
    assert cyclically_equal({cyc: Fraction(2)}, {rot: Fraction(2)})


def test_report_json_schema():
    ctx = ctx2()
    rep = rigidity_check(two_triangle_quiver(), s2(ctx))
    blob = rep.to_json()
    assert blob["rigid"] is True
    assert blob["cycles_total"] == 2
    assert blob["certified"] == 2
    assert isinstance(blob["oracle_only"], int)
    assert blob["failures"] == []
    for cert in blob["certificates"]:
        assert set(cert) >= {"cycle", "steps", "verified"}
        for step in cert["steps"]:
            assert step["kind"] in ("boundary", "adjacent", "split", "oracle")
