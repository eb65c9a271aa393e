"""Volume of a representation computed simplex by simplex and from the census."""

from __future__ import annotations

from dataclasses import dataclass, field

from .census import CERT_SIGMA, alternating_sum, census_all, certify
from .complex import euler_characteristic
from .develop import EquivariantMap, epsilon_sign
from .simplex import (
    DegenerateSimplexError,
    Estimate,
    MCConfig,
    UnsupportedError,
    combine,
    sphere_volume,
    volume_hopf,
    volume_mc,
)

CONTROL_LABEL = "control (theorem hypothesis n>=2 not met)"
EXACT_TOL = 1e-9


def _check_even(m: int):
    if m % 2:
        raise UnsupportedError("volumes of representations are computed in even dimension only")


def rep_volume_simplices(F: EquivariantMap, cfg: MCConfig | None = None) -> Estimate:
    """Sum of eps(f, sigma) Vol(f(sigma)) with each volume from the angle sum."""
    K = F.source
    _check_even(K.dim)
    terms = []
    for s in range(len(K.top)):
        T = F.simplex_image(s)
        eps = epsilon_sign(T, K.orientations[s])
        if eps == 0:
            raise DegenerateSimplexError(f"image of simplex {s} is degenerate")
        sub = None if cfg is None else cfg.child(3, s)
        terms.append((eps, volume_hopf(T, sub)))
    return combine(terms)


def rep_volume_mc(F: EquivariantMap, cfg: MCConfig) -> Estimate:
    """Cross-check of :func:`rep_volume_simplices` by sampling each compact image."""
    K = F.source
    terms = []
    for s in range(len(K.top)):
        T = F.simplex_image(s)
        eps = epsilon_sign(T, K.orientations[s])
        if eps == 0:
            raise DegenerateSimplexError(f"image of simplex {s} is degenerate")
        terms.append((eps, volume_mc(T, cfg.child(4, s))))
    return combine(terms)


def volume_from_census(entries, m: int) -> Estimate:
    bad = [e for e in entries if e.error is not None]
    if bad:
        raise DegenerateSimplexError(f"census failed at face {bad[0].face}: {bad[0].error}")
    n = m // 2
    return alternating_sum(entries).scaled((-1) ** n * sphere_volume(m) / 2)


def rep_volume_census(F: EquivariantMap, cfg: MCConfig | None = None, entries=None, threads: int = 1) -> Estimate:
    _check_even(F.source.dim)
    if entries is None:
        entries = census_all(F, cfg, degree=False, threads=threads)
    return volume_from_census(entries, F.source.dim)


@dataclass
class IntegralityReport:
    normalized: float
    stderr: float
    nearest_int: int
    residual: float
    verdict: str
    denominator_hint: int | None = None
    label: str = ""
    samples: int = 0


def _all_degenerate(F: EquivariantMap) -> bool:
    return all(epsilon_sign(F.simplex_image(s), 1) == 0 for s in range(len(F.source.top)))


def integrality_report(F: EquivariantMap, cfg: MCConfig, denominator: int | None = None,
                       escalations: int = 2, threads: int = 1) -> IntegralityReport:
    """Normalized volume 2 Vol / Vol(S^m) with a 3-stderr certification rule.

    Uncertified results are recomputed with 4 times the samples, at most
    ``escalations`` times.
    """
    m = F.source.dim
    _check_even(m)
    label = CONTROL_LABEL if m == 2 else ""
    if _all_degenerate(F):
        # zero-volume convention: every image lies in a lower dimensional subspace
        return IntegralityReport(0.0, 0.0, 0, 0.0, "integral", denominator, label, 0)
    d = denominator or 1
    cur = cfg
    for attempt in range(escalations + 1):
        vol = rep_volume_census(F, cur, threads=threads)
        norm = 2 * vol.value / sphere_volume(m)
        se = 2 * vol.stderr / sphere_volume(m)
        nearest, separated = certify(norm * d, se * d)
        residual = norm - nearest / d
        slack = CERT_SIGMA * se * d + EXACT_TOL
        if separated and abs(residual) * d <= slack:
            verdict = "integral" if d == 1 else "integral over given denominator"
            return IntegralityReport(norm, se, nearest, residual, verdict, denominator, label, cur.samples)
        if abs(residual) * d > slack:
            verdict = "non-integral (n=1 control)" if m == 2 else "non-integral"
            return IntegralityReport(norm, se, nearest, residual, verdict, denominator, label, cur.samples)
        if attempt < escalations:
            cur = MCConfig(cur.seed, cur.samples * 4)
    return IntegralityReport(norm, se, nearest, residual, "uncertified", denominator, label, cur.samples)


@dataclass
class GaussBonnetReport:
    ok: bool
    volume: Estimate
    expected: float
    chi_closed: int
    cusps: int
    bad_entries: list = field(default_factory=list)
    entries: list = field(default_factory=list)

    @property
    def chi(self) -> int:
        return self.chi_closed - self.cusps


def gauss_bonnet_check(F: EquivariantMap, cfg: MCConfig | None = None, threads: int = 1) -> GaussBonnetReport:
    """For a geometric structure every non-cusp census is 1 and Vol = (-1)^n Vol(S^m)/2 chi(M).

    chi(M) is the Euler characteristic of the compactified complex minus
    one for each cusp point.
    """
    K = F.source
    _check_even(K.dim)
    entries = census_all(F, cfg, degree=False, threads=threads)
    bad = [e for e in entries if not e.cusp and (e.error is not None or not e.certified or e.nearest != 1)]
    chi_closed = euler_characteristic(K)
    cusps = len(K.cusp_classes())
    n = K.dim // 2
    expected = (-1) ** n * sphere_volume(K.dim) / 2 * (chi_closed - cusps)
    if any(e.error for e in entries):
        vol = Estimate(float("nan"), 0.0)
        return GaussBonnetReport(False, vol, expected, chi_closed, cusps, bad, entries)
    vol = volume_from_census(entries, K.dim)
    tol = CERT_SIGMA * vol.stderr + 1e-9 * max(1.0, abs(expected))
    ok = not bad and abs(vol.value - expected) <= tol
    return GaussBonnetReport(ok, vol, expected, chi_closed, cusps, bad, entries)


def normalized(vol: Estimate, m: int) -> Estimate:
    return vol.scaled(2 / sphere_volume(m))


__all__ = [
    "GaussBonnetReport", "IntegralityReport", "gauss_bonnet_check", "integrality_report", "normalized",
    "rep_volume_census", "rep_volume_mc", "rep_volume_simplices", "volume_from_census",
]
