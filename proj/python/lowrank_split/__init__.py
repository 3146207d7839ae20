"""Proximal splitting for low-rank matrix approximation.

Thin re-export of the compiled core: proximal operators of the rank-constrained
objective and its convex envelope, Douglas-Rachford / forward-backward solvers,
dual certificates, and the Hankel rank-sweep benchmark.
"""

from ._core import (
    __version__,
    build_triangle_hankel,
    conjugate_prox_sigma,
    dual_certificate,
    hankel_bench,
    hankel_from_generator,
    hankel_project,
    low_rank_inducing_norm,
    moreau_check,
    numerical_rank,
    prox_conjugate,
    prox_envelope,
    prox_equivalence_conditions,
    prox_nonconvex_rank,
    solve_completion,
    solve_hankel,
    solve_quadratic,
    svd_r,
    truncated_dual_gauge,
)

__all__ = [
    "__version__",
    "build_triangle_hankel",
    "conjugate_prox_sigma",
    "dual_certificate",
    "hankel_bench",
    "hankel_from_generator",
    "hankel_project",
    "low_rank_inducing_norm",
    "moreau_check",
    "numerical_rank",
    "prox_conjugate",
    "prox_envelope",
    "prox_equivalence_conditions",
    "prox_nonconvex_rank",
    "solve_completion",
    "solve_hankel",
    "solve_quadratic",
    "svd_r",
    "truncated_dual_gauge",
]
