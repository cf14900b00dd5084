"""End-to-end smoke test for the python bindings.

Usage: python smoke_test.py <dir-containing-_geomorse-extension>
"""

import math
import sys

if len(sys.argv) > 1:
    sys.path.insert(0, sys.argv[1])

import _geomorse as gm  # noqa: E402


def check(cond, msg):
    if not cond:
        raise SystemExit(f"smoke test failed: {msg}")


def main():
    s = gm.MetricSurface.round_sphere(1.0)
    n = 256
    eq = gm.DiscreteCurve(
        [
            (math.cos(2 * math.pi * i / n), math.sin(2 * math.pi * i / n), 0.0)
            for i in range(n)
        ]
    )
    check(abs(gm.length(eq, s) - 2 * math.pi) < 1e-3, "great-circle length")
    check(gm.is_embedded(eq), "embeddedness")

    # Flow: a latitude circle collapses to a point.
    lat = gm.DiscreteCurve(
        [
            (
                math.sin(0.4) * math.cos(2 * math.pi * i / n),
                math.sin(0.4) * math.sin(2 * math.pi * i / n),
                math.cos(0.4),
            )
            for i in range(n)
        ]
    )
    st = gm.evolve(lat, s)
    check(st.status == gm.FlowStatus.converged_point, "latitude collapse")

    # Stability spectrum of the great circle.
    spec = gm.stability_spectrum(eq, s, 5)
    check(abs(spec.eigenvalues[0] + 1.0) < 1e-3, "lowest eigenvalue")
    check(spec.index == 1 and spec.nullity == 2, "index/nullity")

    # Fermi chart with the round width cos(y).
    chart = gm.build_chart(eq, s, 0.3, 64, 33)
    check(abs(chart.L - 2 * math.pi) < 1e-3, "chart period")
    # J_at interpolates the tabulated profile, so allow the stencil error.
    check(abs(chart.J_at(0.0, 0.2) - math.cos(0.2)) < 1e-4, "chart width")

    # Conformal bump and the perturbed surface.
    bump = gm.make_bump(chart, 2.0, 0.5)
    ps = s.with_overlay(bump)
    check(abs(ps.gaussian_curvature((1.0, 0.0, 0.0)) + 1.0) < 1e-5,
          "core curvature drop")

    # Distances.
    v = gm.to_varifold(eq, s)
    fb = gm.f_distance(v, v, s)
    check(fb.upper < 1e-6, "self F-distance")

    # Width of the round sphere.
    b = gm.WidthBudget()
    b.refine_resolution = 256
    w = gm.width_estimate(gm.plane_sweepout(s, 1, 9, 64), s, b)
    check(abs(w.value - 2 * math.pi) < 5e-3, "round width")

    # Full pipeline on a small ellipsoid run.
    cfg = gm.PipelineConfig()
    cfg.surface = gm.MetricSurface.ellipsoid(1.0, 1.1, 1.2)
    cfg.lattice = 8
    cfg.random_seeds = 2
    r = gm.run_morse_pipeline(cfg)
    check(len(r.catalog.entries) == 4, "catalog size")
    check(r.report.all_pass(), "inequalities")

    # Error mapping.
    try:
        gm.stability_spectrum(gm.DiscreteCurve.point_curve((0.0, 0.0, 1.0)), s, 3)
    except gm.GeomorseError as e:
        check("degenerate-curve" in str(e), "error kind")
    else:
        check(False, "expected GeomorseError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
