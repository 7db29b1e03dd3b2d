"""Smoke test for the pyvarwork extension module."""

import math

import pyvarwork as vw


def close(a, b, tol):
    assert abs(a - b) < tol, f"{a} vs {b}"


def main():
    q = vw.Model.quartic(0.1)
    assert q.family == "quartic" and q.lam == 0.1
    assert q.with_dim(3).d == 3

    a = vw.cardano_root(0.1)
    close(a ** 3 - a - 0.6, 0.0, 1e-12)
    close(vw.cardano_root(1.0), 2.0, 1e-12)

    g = vw.Trial.gaussian(a)
    close(g.energy(q), vw.paper_energy("GaussQuartic", g, q), 1e-12)

    e0 = vw.ground_energy(q)
    close(e0, 0.5591463271835196, 1e-10)
    close(vw.fd_levels(q)[0], e0, 1e-6)
    levels = vw.spectrum(vw.Model.harmonic(), k=4)
    for i, e in enumerate(levels):
        close(e, i + 0.5, 1e-12)

    r = vw.minimize(q, family="gaussian")
    close(r["params_opt"]["params"]["alpha"], a, 1e-12)
    assert r["energy_opt"] > e0

    cq = vw.Model.cubic_quartic(0.05, 0.1)
    r = vw.minimize(cq, family="displaced-coherent")
    assert r["params_opt"]["params"]["gamma"]["re"] < 0

    s = vw.Trial.squeezed(0.25)
    n, stable = vw.bargmann_expectation("number", s)
    assert stable
    close(n, 1.0 / 3.0, 1e-10)
    c = vw.Trial.coherent(0.7)
    x3, _ = vw.bargmann_expectation("x3", c)
    close(x3, c.moment(3), 1e-9)

    rows = vw.validate_all(0.1)
    assert {row["formula"] for row in rows} == set(vw.FORMULAS)
    assert all(row["flagged"] or row["abs_dev"] < 1e-8 for row in rows)
    assert all(s["agrees"] for s in vw.series_checks())

    code, out, _ = vw.run_cli(["spectrum", "--model", "harmonic", "-k", "2"])
    assert code == 0 and "values" in out
    code, _, err = vw.run_cli(["nonsense"])
    assert code == 1 and err

    try:
        vw.Model.quartic(-1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative coupling accepted")
    assert not vw.Trial.squeezed(0.6).is_admissible()
    assert math.isfinite(q.potential(1.5))
    print("pyvarwork smoke test: ok")


if __name__ == "__main__":
    main()
