"""
Reduced-scale acceptance suite behind `projsum selftest`. Each check returns (passed, detail);
the full-scale runs are the `experiment` modes and the slow tests.
"""
import json
from dataclasses import replace
from typing import Callable

import numpy as np

from projsum import densities, specfun, stats
from projsum.ensembles import EnsembleParams, SeedSpec, sample_sum_matrix, self_adjoint_eigenvalues
from projsum.spectra import Interval, inverse_map, map_jacobi_to_sum

Check = Callable[[int], tuple[bool, str]]


def check_multiplicities(seed: int) -> tuple[bool, str]:
    """Direct eigensolves at (64, 16, 24): 8 eigenvalues at 1 and 24 at 0, both fields."""
    bad = 0
    for beta in (1, 2):
        params = EnsembleParams(64, 16, 24, 1.0, beta)
        for i in range(500):
            values = self_adjoint_eigenvalues(sample_sum_matrix(params, SeedSpec(seed, i)))
            at_one = int(np.count_nonzero(np.abs(values - 1.0) < 1e-8))
            at_zero = int(np.count_nonzero(np.abs(values) < 1e-8))
            bad += (at_one, at_zero) != (8, 24)
    return bad == 0, f"{bad} of 1000 draws with wrong multiplicities"


def check_round_trip(seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for theta in (1.0, 2.0, 0.5, -0.5):
        t = rng.uniform(0.0, 1.0, 2500)
        lo, hi = map_jacobi_to_sum(t, theta)
        worst = max(worst, float(np.max(np.abs(inverse_map(lo, theta) - t))))
        worst = max(worst, float(np.max(np.abs(inverse_map(hi, theta) - t))))
    return worst <= 1e-12, f"max round-trip error {worst:.2e}"


def check_kernel_normalization(seed: int) -> tuple[bool, str]:
    worst = 0.0
    for n, a, b in ((5, 0, 0), (10, 2, 3), (20, 1, 0)):
        jp = specfun.JacobiParams(n, a, b)
        mass = densities.integrate(lambda x: specfun.cd_kernel(jp, x, x), Interval(0.0, 1.0))
        worst = max(worst, abs(mass - n))
    return worst <= 1e-6, f"max |int K(x,x) - n| = {worst:.2e}"


def check_scaling_limit(seed: int) -> tuple[bool, str]:
    n = 200
    worst = 0.0
    for a in (0, 1, 2):
        for b in (0, 1):
            jp = specfun.JacobiParams(n, a, b)
            for t in (0.5, 1.0, 2.0):
                x = specfun.hard_edge_scale(n, t)
                scaled = specfun.cd_kernel(jp, x, x) / (2.0 * n**2)
                worst = max(worst, abs(scaled - specfun.bessel_kernel_diag_complex(a, t)))
    return worst <= 0.02, f"max deviation from the Bessel diagonal {worst:.4f}"


def check_density_mass(seed: int) -> tuple[bool, str]:
    worst = 0.0
    for p, q in ((0.5, 0.5), (0.3, 0.5), (0.25, 0.25), (0.4, 0.7)):
        mass = densities.shape_mass(densities.limit_shape_sum(densities.LimitParams(p, q)))
        worst = max(worst, abs(mass - 1.0))
    return worst <= 1e-6, f"max |mass - 1| = {worst:.2e}"


def check_johnstone_edge(seed: int) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for s, t in rng.uniform(0.0, 5.0, (100, 2)):
        worst = max(worst, abs(densities.johnstone_edge(s, t) - densities.support_jacobi(s, t).hi))
    return worst <= 1e-12, f"max |edge - (c + d)| = {worst:.2e}"


def check_bijection(seed: int) -> tuple[bool, str]:
    cfg = stats.ExperimentConfig(EnsembleParams(64, 16, 24, 1.0, 2), 300, seed, "bijection")
    summary = stats.run_bijection(cfg)
    return summary.ks <= 0.04, f"two-sample KS {summary.ks:.4f} over {summary.n_first} eigenvalues"


def check_hard_edge(seed: int) -> tuple[bool, str]:
    cfg = stats.ExperimentConfig(
        EnsembleParams(128, 64, 64, 1.0, 2), 3000, seed, "hard_edge", t_grid=(1.0,)
    )
    row = stats.run_hard_edge(cfg).rows[0]
    gap = abs(row.empirical - row.theory)
    return gap <= 3 * row.std_error + 0.02, f"mean {row.empirical:.4f} vs theory {row.theory:.4f}"


def check_determinism(seed: int) -> tuple[bool, str]:
    cfg = stats.ExperimentConfig(
        EnsembleParams(64, 16, 16, 1.0, 2), 200, seed, "counting", interval=Interval.open(1.2, 1.7)
    )
    one = json.dumps(stats.run_experiment(cfg).to_dict(), sort_keys=True)
    single = replace(cfg, threads=1)
    two = json.dumps(stats.run_experiment(single).to_dict(), sort_keys=True)
    return one == two, "identical reports" if one == two else "reports differ between thread counts"


CHECKS: list[tuple[str, Check]] = [
    ("multiplicities", check_multiplicities),
    ("map round trip", check_round_trip),
    ("kernel normalization", check_kernel_normalization),
    ("hard-edge scaling limit", check_scaling_limit),
    ("density mass", check_density_mass),
    ("johnstone edge", check_johnstone_edge),
    ("bijection", check_bijection),
    ("hard-edge count", check_hard_edge),
    ("determinism", check_determinism),
]


def run_all(seed: int = 20240601) -> bool:
    failures = 0
    for name, check in CHECKS:
        passed, detail = check(seed)
        print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
        failures += not passed
    print(f"{len(CHECKS) - failures}/{len(CHECKS)} checks passed")
    return failures == 0


if __name__ == "__main__":
    raise SystemExit(0 if run_all() else 1)
