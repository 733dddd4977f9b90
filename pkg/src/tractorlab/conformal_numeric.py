"""
Chart-level numeric conformal calculus, gathered in one namespace.

The implementation lives in :mod:`tractorlab.conformal`; this module adds the
sample-sweep reports that the command line and the acceptance suite use.
"""

from __future__ import annotations

import numpy as np

from .conformal.charts import (ChartError, DensityField, DomainError, MetricChart, ScalarField,
                               builtin_chart, chart_from_spec, flat_chart, poly_chart, rescale,
                               scalar, sphere_chart, upsilon)
from .conformal.curvature import (PointCurvature, SingularMetric, bianchi_residuals, christoffel,
                                  curvature_suite, metric_compatibility, symmetry_residuals)
from .conformal.operators import (TractorField, TractorVec, closure_residual, connection_matrices,
                                  einstein_operator, prolong, thomas_D, tractor_connection_apply,
                                  tractor_metric, yamabe)
from .conformal.rescaling import check_rescale_laws, gamma_hat_formula, tractor_change
from .conformal.transport import (NotFlat, RecoveredScale, Segment, einstein_recover, flatness_probe,
                                  holonomy_loop, holonomy_study, parallel_transport, polyline,
                                  square_loop)

DEFAULT_TEST_SCALAR = "1 + x0*x1/3 + x0**3/5 - x1**2*x{last}/7"


def bianchi_checks(chart: MetricChart, samples, test_scalar: ScalarField = None) -> dict:
    """Max and mean of each Bianchi-type residual over the samples."""
    if test_scalar is None:
        test_scalar = scalar(DEFAULT_TEST_SCALAR.format(last=chart.n - 1), chart.n)
    rows = [bianchi_residuals(chart, chart.check_point(x), test_scalar) for x in samples]
    out = {}
    for key in ("first_bianchi", "second_bianchi", "contracted_bianchi", "laplacian_commutator"):
        vals = [r[key] for r in rows]
        out[key] = {"max": max(vals, default=0.0), "mean": float(np.mean(vals)) if vals else 0.0}
    return {"residuals": out, "samples": len(rows)}


def curvature_checks(chart: MetricChart, samples) -> dict:
    """Symmetry identities and metric compatibility, max over samples."""
    worst = {}
    for x in samples:
        x = chart.check_point(x)
        r = symmetry_residuals(curvature_suite(chart, x))
        r["metric_compatibility"] = metric_compatibility(chart, x)
        for k, v in r.items():
            worst[k] = max(worst.get(k, 0.0), v)
    return {"residuals": worst, "samples": len(samples)}


__all__ = ["bianchi_checks", "bianchi_residuals", "builtin_chart", "chart_from_spec", "ChartError",
           "check_rescale_laws", "christoffel", "closure_residual", "connection_matrices",
           "curvature_checks", "curvature_suite", "DEFAULT_TEST_SCALAR", "DensityField", "DomainError",
           "einstein_operator", "einstein_recover", "flat_chart", "flatness_probe", "gamma_hat_formula",
           "holonomy_loop", "holonomy_study", "metric_compatibility", "MetricChart", "NotFlat",
           "parallel_transport", "PointCurvature", "poly_chart", "polyline", "prolong", "RecoveredScale",
           "rescale", "scalar", "ScalarField", "Segment", "SingularMetric", "sphere_chart", "square_loop",
           "symmetry_residuals", "thomas_D", "tractor_change", "tractor_connection_apply",
           "tractor_metric", "TractorField", "TractorVec", "upsilon", "yamabe"]
