"""Seeded experiments: spec loading, sampling, convergence tables, non-generic probe."""

from fractions import Fraction as F

import pytest

from expsum.errors import SpecFileError
from expsum.experiments import (
    CONVERGENCE_HEADER,
    load_experiment,
    probe_function,
    run_convergence,
    run_nongeneric_probe,
    sample_function,
    tracked_vertices,
    write_reports,
)
from expsum.polygon import hodge_polygon
from expsum.runtime.schemas import ExperimentSpecModel


def _spec(**kw):
    base = {"ell": 1, "orders": [3], "primes": [5, 7], "samples": 2, "seed": 11}
    return ExperimentSpecModel(**{**base, **kw})


# ---------- loading ----------
def test_load_yaml_and_json(tmp_path):
    y = tmp_path / "e.yaml"
    y.write_text("ell: 1\norders: [3]\nprimes: [5]\n")
    j = tmp_path / "e.json"
    j.write_text('{"ell": 1, "orders": [3], "primes": [5]}')
    assert load_experiment(y) == load_experiment(j)
    assert load_experiment(y).samples == 5


@pytest.mark.parametrize(
    "text",
    ["ell: 1\norders: [3]\nprimes: [5]\nbogus: 1\n", "ell: 2\norders: [3]\nprimes: [5]\n", "ell: [\n"],
)
def test_bad_experiment_files(tmp_path, text):
    path = tmp_path / "bad.yaml"
    path.write_text(text)
    with pytest.raises(SpecFileError):
        load_experiment(path)


def test_missing_experiment_file(tmp_path):
    with pytest.raises(SpecFileError):
        load_experiment(tmp_path / "absent.yaml")


# ---------- sampling ----------
def test_sampling_is_seeded():
    spec = _spec()
    f1, _ = sample_function(spec, 5, 0)
    f2, _ = sample_function(spec, 5, 0)
    assert f1 == f2
    assert f1.a(1, 3) != 0
    assert all(abs(c.numerator) <= 20 for c in f1.coeffs[0])


def test_probe_function_has_unit_leading_terms():
    f = probe_function([3, 2])
    assert f.coeffs == ((0, 0, 1), (0, 1))


def test_tracked_vertices():
    assert tracked_vertices(_spec()) == (1, 2)
    assert tracked_vertices(_spec(ell=2, orders=[2, 2])) == (1, 3)
    assert tracked_vertices(_spec(vertices=[2])) == (2,)
    with pytest.raises(ValueError):
        tracked_vertices(_spec(ell=2, orders=[2, 2], vertices=[2]))


# ---------- convergence ----------
def test_convergence_table():
    table = run_convergence(_spec(primes=[3, 5, 7, 9]))
    assert [p for p, _ in table.skipped] == [3, 9]
    assert len(table.rows) == 2 * 2 * 2
    for r in table.rows:
        assert r.np_k >= r.c0
    at5 = [r for r in table.rows if r.p == 5 and r.k == 1]
    assert all(r.np_k == F(1, 2) and r.attained for r in at5)
    assert table.to_csv().splitlines()[0] == ",".join(CONVERGENCE_HEADER)


def test_convergence_needs_prime_field():
    with pytest.raises(ValueError):
        run_convergence(_spec(a=2))


def test_convergence_is_reproducible():
    spec = _spec()
    assert run_convergence(spec).to_csv() == run_convergence(spec, workers=2).to_csv()


def test_write_reports(tmp_path):
    table = run_convergence(_spec(primes=[5]))
    paths = write_reports(table, tmp_path / "out")
    assert [p.name for p in paths] == ["convergence.csv", "convergence.md"]
    md = paths[1].read_text()
    assert md.startswith("# Convergence: ell = 1, orders = 3")
    assert "Seed 11" in md


# ---------- non-generic probe ----------
def test_probe_against_cubic_samples():
    report = run_nongeneric_probe(_spec())
    assert report.comparable
    rows = {r.p: r for r in report.rows}
    assert not rows[5].differs
    assert rows[7].probe_is_hp
    assert rows[7].hp == hodge_polygon(1, [3])


def test_probe_not_comparable_without_fractional_slopes():
    report = run_nongeneric_probe(_spec(ell=3, orders=[1, 1, 1]))
    assert not report.comparable
    assert report.rows == ()
    assert "nothing to compare" in report.to_markdown()
