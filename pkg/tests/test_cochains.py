import json
import random

import pytest

from fillprobe.cochains import (
    EquivariantCochain,
    FiniteGroupTable,
    PlainCochain,
    coboundary,
    eval_at_identity,
    group_table,
    is_equivariant,
    phi,
    psi,
    spread,
    sup_norm,
)
from fillprobe.rationals import Q

rng = random.Random(0)


def random_plain(G, degree, dim=1):
    return PlainCochain.build(
        G, degree, dim,
        lambda cell: tuple(Q(rng.randint(-6, 6), rng.randint(1, 4))
                           for _ in range(dim)))


def random_equivariant(G, degree, dim=1):
    """Assign on orbit representatives, extend by the equivariance law."""
    reps = {}
    values = {}
    for cell in G.cells(degree):
        rep = G.act(G.inverse[cell[0]], cell)
        if rep not in reps:
            reps[rep] = {g: tuple(Q(rng.randint(-5, 5)) for _ in range(dim))
                         for g in range(G.order)}
        base = reps[rep]
        hinv = G.inverse[cell[0]]
        values[cell] = {g: base[G.mult[hinv][g]] for g in range(G.order)}
    return EquivariantCochain(G, degree, dim, values)


def basis_plain_cochains(G, degree):
    cells = list(G.cells(degree))
    zero = (Q(0),)
    one = (Q(1),)
    for marked in cells:
        yield PlainCochain.build(G, degree, 1,
                                 lambda cell, m=marked: one if cell == m else zero)


def test_group_table_validation():
    with pytest.raises(ValueError):
        FiniteGroupTable.from_mult_table([[0, 1], [1, 1]])
    with pytest.raises(ValueError):
        FiniteGroupTable.from_mult_table([[1, 0], [1, 0]])


def test_group_catalog():
    for name, order in (("Z2", 2), ("Z3", 3), ("Z6", 6), ("S3", 6)):
        G = group_table(name)
        assert G.order == order
    with pytest.raises(KeyError):
        group_table("Z5")


def test_s3_nonabelian():
    G = group_table("S3")
    assert any(G.mult[a][b] != G.mult[b][a]
               for a in range(6) for b in range(6))


def test_group_from_json():
    G = FiniteGroupTable.from_json(json.dumps({"table": [[0, 1], [1, 0]]}))
    assert G.order == 2 and G.identity == 0


def test_phi_of_constant_function():
    G = group_table("Z3")
    v0 = (Q(2), Q(-1))
    f = EquivariantCochain.build(G, 1, 2, lambda cell, g: v0)
    assert is_equivariant(f)
    out = phi(f)
    assert all(v == v0 for v in out.values.values())


def test_phi_degree_zero_indicator():
    G = group_table("Z2")
    ind = PlainCochain.build(G, 0, 1,
                             lambda cell: (Q(1),) if cell == (G.identity,) else (Q(0),))
    f = psi(ind)
    # f(identity cell)(g) is the indicator of g = identity
    cell = (G.identity,)
    assert f.values[cell][G.identity] == (Q(1),)
    assert all(f.values[cell][g] == (Q(0),)
               for g in range(G.order) if g != G.identity)
    assert phi(f).values[cell] == (Q(1),)


def test_psi_zero_is_zero():
    G = group_table("Z6")
    z = PlainCochain.zero(G, 1)
    assert psi(z).is_zero()


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z6", "S3"])
@pytest.mark.parametrize("degree", [0, 1, 2])
def test_phi_psi_identities_random(name, degree):
    G = group_table(name)
    theta = random_plain(G, degree, dim=2)
    assert phi(psi(theta)).values == theta.values
    f = random_equivariant(G, degree)
    assert is_equivariant(f)
    assert psi(phi(f)) == f


@pytest.mark.parametrize("name", ["Z2", "Z3"])
@pytest.mark.parametrize("degree", [0, 1])
def test_phi_psi_identity_on_exhaustive_basis(name, degree):
    G = group_table(name)
    for theta in basis_plain_cochains(G, degree):
        assert phi(psi(theta)).values == theta.values


def test_psi_output_is_equivariant_s3():
    G = group_table("S3")
    for _ in range(3):
        theta = random_plain(G, 1)
        assert is_equivariant(psi(theta))


def test_phi_psi_on_cyclic_24():
    G = FiniteGroupTable.cyclic(24)
    theta = random_plain(G, 1)
    assert phi(psi(theta)).values == theta.values
    f = random_equivariant(G, 1)
    assert psi(phi(f)) == f


def test_coboundary_of_constant_degree_zero_vanishes():
    G = group_table("Z2")
    const = PlainCochain.build(G, 0, 1, lambda cell: (Q(7),))
    assert coboundary(const).is_zero()


@pytest.mark.parametrize("name", ["Z2", "Z3"])
def test_coboundary_squares_to_zero(name):
    G = group_table(name)
    for degree in (0, 1):
        theta = random_plain(G, degree)
        assert coboundary(coboundary(theta)).is_zero()
        f = random_equivariant(G, degree)
        assert coboundary(coboundary(f)).is_zero()


def test_coboundary_linear():
    G = group_table("Z3")
    a, b = random_plain(G, 1), random_plain(G, 1)
    lhs = coboundary(a + b.scaled(Q(3, 2)))
    rhs = coboundary(a) + coboundary(b).scaled(Q(3, 2))
    assert lhs.values == rhs.values


@pytest.mark.parametrize("name", ["Z2", "Z3", "S3"])
def test_maps_commute_with_coboundary(name):
    G = group_table(name)
    for degree in (0, 1):
        f = random_equivariant(G, degree)
        assert phi(coboundary(f)).values == coboundary(phi(f)).values
        theta = random_plain(G, degree)
        assert psi(coboundary(theta)) == coboundary(psi(theta))


def test_degree_cap():
    G = group_table("Z2")
    theta = random_plain(G, 3)
    with pytest.raises(ValueError):
        coboundary(theta)


def test_cochains_must_be_total():
    G = group_table("Z2")
    with pytest.raises(ValueError):
        PlainCochain(G, 0, 1, {(0,): (Q(1),)})


def test_sup_norm():
    assert sup_norm((Q(-5), Q(3))) == 5
    assert sup_norm(()) == 0


def test_aliases_match():
    assert phi is eval_at_identity
    assert psi is spread
