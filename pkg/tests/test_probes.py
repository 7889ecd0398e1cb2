import pytest

from fillprobe.probes import (
    EXHAUSTIVE,
    SAMPLED,
    FVEstimate,
    ProbeConfig,
    estimate_fv,
    fit_growth,
    probe_amenability,
    probe_hyperbolicity,
)
from fillprobe.rationals import Q


def test_estimate_fv_f2_all_zero(f2):
    presentation, rws = f2
    est = estimate_fv(presentation, rws, 6)
    assert all(row.value == 0 for row in est.table.values())
    assert not est.capped


def test_estimate_fv_z2_exhaustive(z2):
    presentation, rws = z2
    est = estimate_fv(presentation, rws, 8)
    values = {k: row.value for k, row in est.table.items()}
    assert values == {3: 0, 4: 1, 5: 1, 6: 2, 7: 2, 8: 4}
    # monotone in k
    ordered = [values[k] for k in sorted(values)]
    assert all(a <= b for a, b in zip(ordered, ordered[1:]))
    # witnesses satisfy their mass bound
    for k, row in est.table.items():
        if row.witness_l1 is not None:
            assert row.witness_l1 <= k


def test_estimate_fv_surface(surface):
    presentation, rws = surface
    est = estimate_fv(presentation, rws, 8)
    assert est.table[8].value == 1
    assert all(est.table[k].value == 0 for k in range(3, 8))


def test_estimate_fv_rejects_bad_modes(z2):
    presentation, rws = z2
    with pytest.raises(ValueError):
        estimate_fv(presentation, rws, 2)
    with pytest.raises(ValueError):
        estimate_fv(presentation, rws, 14, EXHAUSTIVE)
    with pytest.raises(ValueError):
        estimate_fv(presentation, rws, 8, "other")


def test_estimate_fv_sampled_mode_subset_of_truth(z2):
    presentation, rws = z2
    est = estimate_fv(presentation, rws, 6, SAMPLED, seed=0,
                      config=ProbeConfig(sample_walks=200))
    exhaustive = estimate_fv(presentation, rws, 6, EXHAUSTIVE)
    for k, row in est.table.items():
        assert row.value <= exhaustive.table[k].value
    # determinism under a fixed seed
    again = estimate_fv(presentation, rws, 6, SAMPLED, seed=0,
                        config=ProbeConfig(sample_walks=200))
    assert {k: r.value for k, r in est.table.items()} == \
        {k: r.value for k, r in again.table.items()}


def test_fit_growth_exact_linear():
    fit = fit_growth(FVEstimate.from_table({4: 1, 8: 2, 12: 3}))
    assert fit.growth_class == "Linear"
    assert fit.K == Q(1, 4)


def test_fit_growth_quadratic():
    fit = fit_growth(FVEstimate.from_table({4: 1, 8: 4, 12: 9}))
    assert fit.growth_class == "Quadratic"


def test_fit_growth_all_zero():
    fit = fit_growth(FVEstimate.from_table({4: 0, 8: 0, 12: 0}))
    assert fit.growth_class == "Linear" and fit.K == 0


def test_fit_growth_superquadratic():
    fit = fit_growth(FVEstimate.from_table({4: 8, 8: 64, 12: 216}))
    assert fit.growth_class == "Superquadratic"


def test_fit_growth_exact_proportional_recovers_K():
    K = Q(7, 3)
    table = {k: K * k for k in (3, 5, 8, 11)}
    fit = fit_growth(FVEstimate.from_table(table))
    assert fit.growth_class == "Linear"
    assert fit.K == K


def test_fit_growth_single_jump_is_linear():
    fit = fit_growth(FVEstimate.from_table({3: 0, 4: 0, 8: 1}))
    assert fit.growth_class == "Linear"


def test_fit_growth_empty_table_rejected():
    with pytest.raises(ValueError):
        fit_growth(FVEstimate("x", 0, EXHAUSTIVE, {}))


def test_probe_hyperbolicity_f2(f2):
    presentation, rws = f2
    report = probe_hyperbolicity(presentation, rws, k_max=6)
    assert report.verdict == "consistent-with-hyperbolic"
    assert report.fit.K == 0


def test_probe_hyperbolicity_z2(z2):
    presentation, rws = z2
    report = probe_hyperbolicity(presentation, rws, k_max=8)
    assert report.verdict == "non-hyperbolic-evidence"
    assert report.witness_ratio() > Q(1, 4)
    assert report.witness_l1 == 8
    data = report.to_dict()
    assert data["verdict"] == "non-hyperbolic-evidence"
    assert data["witness"]["ratio"] == "1/2"
    assert data["max_cell_boundary_mass"] == 4


def test_probe_hyperbolicity_surface(surface):
    presentation, rws = surface
    report = probe_hyperbolicity(presentation, rws, k_max=8)
    assert report.verdict == "consistent-with-hyperbolic"
    assert report.fit.K == Q(1, 8)
    assert report.max_cell_boundary_mass == 8


def test_probe_deterministic(z2):
    presentation, rws = z2
    a = probe_hyperbolicity(presentation, rws, k_max=8, seed=0)
    b = probe_hyperbolicity(presentation, rws, k_max=8, seed=0)
    assert a.to_dict() == b.to_dict()


def test_amenability_f2_exact_values(f2):
    presentation, rws = f2
    probe = probe_amenability(presentation, rws, [2, 3, 4, 5])
    # optimum on the 4-regular tree: 1/2 - 1/(4*3^(R-1)) by flow vs cut
    expected = {radius: Q(1, 2) - Q(1, 4 * 3 ** (radius - 1))
                for radius in (2, 3, 4, 5)}
    for radius, row in probe.table.items():
        assert row.status == "optimal"
        assert row.value == expected[radius]
        assert row.value <= Q(1, 2)
    assert probe.verdict == "BoundedFlow"


def test_amenability_z2_growing(z2):
    presentation, rws = z2
    probe = probe_amenability(presentation, rws, [2, 3, 4, 5, 6])
    values = [probe.table[r].value for r in sorted(probe.table)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert probe.verdict == "GrowingFlow"


def test_amenability_single_radius_inconclusive(z2):
    presentation, rws = z2
    probe = probe_amenability(presentation, rws, [1])
    assert probe.verdict == "Inconclusive"


def test_amenability_finite_group_infeasible():
    # in a finite group the whole Cayley graph is eventually interior and
    # total demand cannot escape
    from fillprobe.presentation import parse_presentation
    from fillprobe.rewriting import knuth_bendix_bounded
    p = parse_presentation("a | a^2")
    rws = knuth_bendix_bounded(p)
    probe = probe_amenability(p, rws, [2, 3])
    assert probe.verdict == "Inconclusive"
    assert any(row.status == "infeasible" for row in probe.table.values())


def test_amenability_rejects_bad_radii(z2):
    presentation, rws = z2
    with pytest.raises(ValueError):
        probe_amenability(presentation, rws, [0, 2])
    with pytest.raises(ValueError):
        probe_amenability(presentation, rws, [])


def test_fv_entries_never_grow_with_radius_headroom(z2):
    presentation, rws = z2
    snug = estimate_fv(presentation, rws, 6,
                       config=ProbeConfig(escalation_margin=1))
    roomy = estimate_fv(presentation, rws, 6,
                        config=ProbeConfig(escalation_margin=3))
    for k in snug.table:
        assert roomy.table[k].value <= snug.table[k].value


def test_worker_pool_matches_serial(z2):
    presentation, rws = z2
    serial = probe_amenability(presentation, rws, [2, 3],
                               config=ProbeConfig(workers=1))
    parallel = probe_amenability(presentation, rws, [2, 3],
                                 config=ProbeConfig(workers=3))
    assert serial.to_dict() == parallel.to_dict()

    fv_serial = estimate_fv(presentation, rws, 6, config=ProbeConfig(workers=1))
    fv_parallel = estimate_fv(presentation, rws, 6, config=ProbeConfig(workers=4))
    assert fv_serial.to_dict() == fv_parallel.to_dict()
