"""Exit criteria for the toolkit, one test per criterion.

Every sub-check is recorded as a PASS/FAIL line and echoed in the pytest
terminal summary. Tolerances are fixed here; seeds are fixed for
reproducibility.
"""

import math
import time

import numpy as np
import pytest

from haarbench import (
    AnalyticPdf,
    BenchmarkConfig,
    RandomStream,
    SchmidtSpectrum,
    analytic_histogram,
    benchmark_sweep,
    empirical_histogram,
    js_divergence,
    kl_divergence,
    Histogram,
    pdf_sep_gamma,
    pdf_sep_maxent,
)
from haarbench.analytic import quad_moment
from haarbench.cli import main
from haarbench.experiments import ExperimentSpec, run_avg
from haarbench.quantum import apply_local, overlap_sq
from haarbench.sampling import haar_states, haar_unitaries, reduced_fidelities, schmidt_fixed_states

from conftest import ACCEPTANCE_LINES

SEED = 2026
N = 100_000
BINS = 50
EPS_GRID = (0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3)
JITTER = 0.005


class Checks:
    def __init__(self, tag):
        self.tag = tag
        self.failed = []

    def __call__(self, label, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {self.tag} {label}" + (f"  ({detail})" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        if not ok:
            self.failed.append(line)

    def verify(self):
        assert not self.failed, "\n".join(self.failed)


def _ket00(d):
    v = np.zeros(d * d, dtype=complex)
    v[0] = 1
    return v


def _js(samples, ref):
    return js_divergence(empirical_histogram(samples, BINS), analytic_histogram(ref, BINS))


def test_ac1_windowed_average_fidelity():
    check = Checks("AC1")
    for d in (2, 3):
        t0 = time.perf_counter()
        table = run_avg(
            ExperimentSpec("avg-fid", dim=d, samples=200_000, window_width=0.02,
                           reference="haar-random", seed=SEED)
        )
        elapsed = time.perf_counter() - t0
        target = 1 / d**2
        windows = [r for r in table.rows if r[2] >= 1000]
        worst = max(abs(mean - target) / sem for _, mean, _, sem, _ in windows)
        check(f"d={d}: {len(windows)} windows with >=1000 samples all within 3 SE of 1/{d*d}",
              worst <= 3.0, f"worst deviation {worst:.2f} SE")
        check(f"d={d}: runtime < 60 s", elapsed < 60, f"{elapsed:.1f} s")
    check.verify()


def test_ac2_analytic_pdf_correctness():
    check = Checks("AC2")
    refs = (
        [AnalyticPdf.sep_gamma(round(0.1 * k, 1)) for k in range(1, 10)]
        + [AnalyticPdf.sep_maxent(d) for d in range(2, 7)]
        + [AnalyticPdf.global_haar(D) for D in (4, 9, 16)]
    )
    norm_err = max(abs(quad_moment(r, 0) - 1) for r in refs)
    mean_err = max(abs(quad_moment(r, 1) - r.mean_fidelity) for r in refs)
    check("normalization = 1 within 1e-9 on the full grid", norm_err <= 1e-9, f"max err {norm_err:.1e}")
    check("mean = 1/d^2 (resp. 1/D) within 1e-9", mean_err <= 1e-9, f"max err {mean_err:.1e}")
    f = np.linspace(0.01, 0.49, 4801)
    sup = np.max(np.abs(pdf_sep_gamma(1e-6, f) - pdf_sep_maxent(2, f)))
    check("gamma->0 limit matches max-ent qubit PDF within 1e-4", sup <= 1e-4, f"sup {sup:.1e}")
    check.verify()


def test_ac3_monte_carlo_vs_analytic():
    check = Checks("AC3")
    cases = [
        ("max-ent qubit ensemble vs max-ent PDF (d=2)",
         lambda r: overlap_sq(_ket00(2), schmidt_fixed_states(SchmidtSpectrum.max_entangled(2), N, r)),
         AnalyticPdf.sep_maxent(2)),
        ("gamma=0.5 ensemble vs gamma PDF",
         lambda r: overlap_sq(_ket00(2), schmidt_fixed_states(SchmidtSpectrum.from_gamma(0.5), N, r)),
         AnalyticPdf.sep_gamma(0.5)),
        ("Haar states d=2 vs 3(1-f)^2",
         lambda r: overlap_sq(_ket00(2), haar_states(2, N, r)),
         AnalyticPdf.global_haar(4)),
    ]
    for k, (label, draw, ref) in enumerate(cases):
        t0 = time.perf_counter()
        js = _js(draw(RandomStream(SEED, k)), ref)
        elapsed = time.perf_counter() - t0
        check(f"{label}: JS <= 0.01", js <= 0.01, f"JS {js:.2e}")
        check(f"{label}: runtime < 30 s", elapsed < 30, f"{elapsed:.2f} s")
    check.verify()


def test_ac4_reduced_sampler_equivalence():
    check = Checks("AC4")
    spectra = {
        "max-ent d=2": SchmidtSpectrum.max_entangled(2),
        "gamma=0.5": SchmidtSpectrum.from_gamma(0.5),
        "max-ent d=3": SchmidtSpectrum.max_entangled(3),
    }
    for k, (label, s) in enumerate(spectra.items()):
        reduced = reduced_fidelities(s, N, RandomStream(SEED, 2 * k))
        full = overlap_sq(_ket00(s.local_dim), schmidt_fixed_states(s, N, RandomStream(SEED, 2 * k + 1)))
        js = js_divergence(empirical_histogram(reduced, BINS), empirical_histogram(full, BINS))
        check(f"{label}: JS(reduced, full) <= 0.01", js <= 0.01, f"JS {js:.2e}")
    check.verify()


def test_ac5_depolarization_identity():
    check = Checks("AC5")
    for d in (2, 3, 4):
        u = haar_unitaries(d, 10_000, RandomStream(SEED, d))
        col = u[:, :, 0]
        avg = np.einsum("ni,nj->ij", col, col.conj()) / len(u)
        err = np.max(np.abs(avg - np.eye(d) / d))
        check(f"d={d}: mean U|0><0|U^dagger within 0.02 of I/d", err < 0.02, f"max err {err:.4f}")
    check.verify()


def test_ac6_local_unitary_invariance():
    check = Checks("AC6")
    s = SchmidtSpectrum.from_gamma(0.5)
    phi = _ket00(2)
    rotations = haar_unitaries(2, 6, RandomStream(SEED, 100))
    base = overlap_sq(phi, schmidt_fixed_states(s, N, RandomStream(SEED, 101)))
    for k in range(3):
        rotated_ref = apply_local(phi, rotations[2 * k], rotations[2 * k + 1])
        other = overlap_sq(rotated_ref, schmidt_fixed_states(s, N, RandomStream(SEED, 102 + k)))
        js = js_divergence(empirical_histogram(base, BINS), empirical_histogram(other, BINS))
        check(f"V pair {k}: JS(|phi>, (Va x Vb)|phi>) <= 0.01", js <= 0.01, f"JS {js:.2e}")
    check.verify()


def _sweep(**kw):
    cfg = BenchmarkConfig(epsilon_grid=EPS_GRID, samples_per_point=N, bin_count=BINS, seed=SEED, **kw)
    return {r.eps: r.js for r in benchmark_sweep(cfg)}


def test_ac7_benchmark_orderings():
    check = Checks("AC7")
    sweeps = {f"max-ent d={d}": _sweep(local_dim=d) for d in (2, 3, 4)}
    sweeps.update({f"gamma={g}": _sweep(gamma=g) for g in (0.2, 0.8)})
    for label, js in sweeps.items():
        check(f"{label}: JS(eps=0) <= 0.005", js[0.0] <= 0.005, f"JS {js[0.0]:.2e}")
        values = [js[e] for e in EPS_GRID]
        drop = max(0.0, max(a - b for a, b in zip(values, values[1:])))
        check(f"{label}: JS nondecreasing in eps within {JITTER}", drop <= JITTER,
              "curve " + ", ".join(f"{v:.4f}" for v in values))
    j4, j2 = sweeps["max-ent d=4"][0.1], sweeps["max-ent d=2"][0.1]
    check("JS(d=4, eps=0.1) > JS(d=2, eps=0.1)", j4 > j2, f"{j4:.4f} vs {j2:.4f}")
    g2, g8 = sweeps["gamma=0.2"][0.2], sweeps["gamma=0.8"][0.2]
    check("JS(gamma=0.2, eps=0.2) > JS(gamma=0.8, eps=0.2)", g2 > g8, f"{g2:.4f} vs {g8:.4f}")
    check.verify()


def test_ac8_divergence_oracle():
    check = Checks("AC8")
    h = lambda *m: Histogram(np.array(m, dtype=float))  # noqa: E731
    js = js_divergence(h(1, 0), h(0.5, 0.5))
    check("JS((1,0),(0.5,0.5)) = 0.311278", abs(js - 0.311278) <= 1e-6, f"{js:.9f}")
    cases = [
        ("KL(p,p) = 0", kl_divergence(h(0.3, 0.7), h(0.3, 0.7)), 0.0),
        ("KL((1,0),(0.75,0.25)) = 0.415037", kl_divergence(h(1, 0), h(0.75, 0.25)), 0.415037),
        ("KL((0.5,0.5),(0.75,0.25)) = 0.207519", kl_divergence(h(0.5, 0.5), h(0.75, 0.25)), 0.207519),
    ]
    for label, got, want in cases:
        check(label, abs(got - want) <= 1e-6, f"{got:.9f}")
    check.verify()


@pytest.mark.parametrize(
    "argv",
    [
        ["scatter", "--samples", "20000", "--reference", "haar-random"],
        ["avg-fid", "--samples", "50000", "--dim", "3"],
        ["pdf-table", "--gamma", "0.5"],
        ["benchmark", "--samples", "20000", "--dim", "3"],
    ],
    ids=lambda a: a[0],
)
def test_ac9_determinism(argv, tmp_path):
    check = Checks("AC9")
    paths = [tmp_path / name for name in ("run1", "run2", "workers")]
    codes = [
        main(argv + ["--seed", str(SEED), "--out", str(paths[0])]),
        main(argv + ["--seed", str(SEED), "--out", str(paths[1])]),
        main(argv + ["--seed", str(SEED), "--out", str(paths[2]), "--workers", "3"]),
    ]
    check(f"{argv[0]}: all runs succeed", codes == [0, 0, 0], str(codes))
    same = paths[0].read_bytes() == paths[1].read_bytes()
    check(f"{argv[0]}: two runs with the same seed are byte-identical", same)
    check(f"{argv[0]}: output independent of worker count", paths[0].read_bytes() == paths[2].read_bytes())
    check.verify()
