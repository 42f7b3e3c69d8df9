"""Randomized cross-validation campaigns.

Each campaign generates seeded random instances and checks one of the
equivalences the package is built on, counting disagreements. The CLI's
verify command and the acceptance test suite both drive these functions;
a nonzero failure count is always a bug signal (the equivalences are
theorems), never a property of the instance.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .fixed_modes import (
    fixed_spectrum,
    fixed_spectrum_sampled,
    grank_closed_loop,
)
from .generate import (
    deficient_bordered_triple,
    embedded_fixed_mode_system,
    modal_single_channel_system,
    random_bordered_triple,
    random_low_rank,
    random_matrix_family,
    random_pair_family,
    random_system,
    spawn_rng,
)
from .grank import (
    expand_matrix_family,
    grank_constant_plus_family,
    grank_matrix_minformula,
    grank_pairs_matroid,
    grank_pairs_minformula,
    grank_sampled,
    refine_min_subset,
)
from .linalg import (
    ConsistencyError,
    RankTolerance,
    bordered_rank,
    gain_equivalence_check,
    numeric_rank,
    rank_factorize,
    rank_restoring_gains,
)

__all__ = [
    "CampaignResult",
    "pencil_equivalence_campaign",
    "pairs_three_way_campaign",
    "matrix_family_campaign",
    "constant_term_campaign",
    "gain_equivalence_campaign",
    "centralized_campaign",
    "run_all_campaigns",
]

_MAX_DETAILS = 5


@dataclass
class CampaignResult:
    name: str
    instances: int
    failures: int = 0
    seconds: float = 0.0
    details: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record_failure(self, message: str) -> None:
        self.failures += 1
        if len(self.details) < _MAX_DETAILS:
            self.details.append(message)


def _timed(fn):
    def wrapper(*args, **kwargs) -> CampaignResult:
        start = time.perf_counter()
        result = fn(*args, **kwargs)
        result.seconds = time.perf_counter() - start
        return result

    return wrapper


@_timed
def pencil_equivalence_campaign(instances: int = 200, max_n: int = 5,
                                max_k: int = 3, seed: int = 0,
                                tol: RankTolerance | float | None = None,
                                trials: int = 8,
                                match_tol: float = 1e-6) -> CampaignResult:
    """Per eigenvalue, the three fixed-mode verdicts must coincide: pencil
    subset search, feedback sampling, and closed-loop generic rank < n."""
    tol = RankTolerance.coerce(tol)
    result = CampaignResult("pencil equivalence (3-route fixed modes)", instances)
    for i in range(instances):
        rng = spawn_rng(seed, 1, i)
        n = int(rng.integers(1, max_n + 1))
        k = int(rng.integers(1, max_k + 1))
        if rng.random() < 0.5:
            lam = round(float(rng.uniform(-1.0, 1.0)), 2)
            sys, _ = embedded_fixed_mode_system(rng, n, k, lam=lam)
        else:
            sys = random_system(rng, n, k)
        try:
            report = fixed_spectrum(sys, tol)
            sampled = fixed_spectrum_sampled(sys, trials, seed * 1000 + i, match_tol)
            for rec in report.records:
                in_sampled = bool(sampled.size) and bool(
                    np.min(np.abs(sampled - rec.lam)) <= match_tol)
                gr = grank_closed_loop(sys, rec.lam, tol, rng_seed=seed * 1000 + i)
                by_grank = gr < sys.n
                if not (rec.is_fixed == in_sampled == by_grank):
                    result.record_failure(
                        f"instance {i}: lam={rec.lam:.6g} pencil={rec.is_fixed} "
                        f"sampled={in_sampled} grank={by_grank}")
            # every sampled survivor must match some flagged eigenvalue
            flagged = [r.lam for r in report.records if r.is_fixed]
            for mu in sampled:
                if not flagged or min(abs(mu - lam_) for lam_ in flagged) > match_tol:
                    result.record_failure(
                        f"instance {i}: sampled survivor {mu:.6g} not flagged")
        except ConsistencyError as exc:
            result.record_failure(f"instance {i}: {exc}")
    return result


@_timed
def pairs_three_way_campaign(instances: int = 500, max_d: int = 8,
                             max_dim: int = 6, seed: int = 0,
                             tol: RankTolerance | float | None = None,
                             trials: int = 3) -> CampaignResult:
    """Matroid intersection, min-formula, and sampling must agree on vector
    pair families, with the witness cardinality meeting the certificate
    value (weak duality tight at the optimum)."""
    tol = RankTolerance.coerce(tol)
    result = CampaignResult("pair-family generic rank (3 routes)", instances)
    for i in range(instances):
        rng = spawn_rng(seed, 2, i)
        n1 = int(rng.integers(1, max_dim + 1))
        n2 = int(rng.integers(1, max_dim + 1))
        d = int(rng.integers(0, max_d + 1))
        fam = random_pair_family(rng, n1, n2, d)
        v_mat, witness = grank_pairs_matroid(fam, tol)
        v_min, cert = grank_pairs_minformula(fam, tol)
        v_smp = grank_sampled(fam, trials, seed * 1000 + i, tol)
        if not (v_mat == v_min == v_smp == len(witness) == cert.value):
            result.record_failure(
                f"instance {i}: matroid={v_mat} minformula={v_min} "
                f"sampled={v_smp} |witness|={len(witness)} cert={cert.value}")
    return result


@_timed
def matrix_family_campaign(instances: int = 200, max_d: int = 5,
                           max_size: int = 3, max_dim: int = 5, seed: int = 0,
                           tol: RankTolerance | float | None = None,
                           trials: int = 3) -> CampaignResult:
    """Matrix-level min-formula == expanded vector-level min-formula ==
    sampled rank, and subset refinement reproduces the matrix-level value."""
    tol = RankTolerance.coerce(tol)
    result = CampaignResult("matrix-family expansion & refinement", instances)
    for i in range(instances):
        rng = spawn_rng(seed, 3, i)
        n1 = int(rng.integers(1, max_dim + 1))
        n2 = int(rng.integers(1, max_dim + 1))
        d = int(rng.integers(0, max_d + 1))
        fam = random_matrix_family(rng, n1, n2, d, max_size, max_size)
        expanded = expand_matrix_family(fam)
        v_mtx, _cert = grank_matrix_minformula(fam, tol)
        # full expanded enumeration only at sizes where 2^d stays cheap; the
        # matroid route covers larger families (equal by the max-min identity)
        if expanded.d <= 14:
            v_exp, exp_cert = grank_pairs_minformula(expanded, tol)
        else:
            v_exp, _witness = grank_pairs_matroid(expanded, tol)
            exp_cert = None
        v_smp = grank_sampled(fam, trials, seed * 1000 + i, tol)
        ok = v_mtx == v_exp == v_smp
        if ok and exp_cert is not None:
            refined = refine_min_subset(fam, exp_cert.subset, tol)
            ok = refined.value == v_mtx
        if not ok:
            result.record_failure(
                f"instance {i}: matrix={v_mtx} expanded={v_exp} sampled={v_smp}")
    return result


@_timed
def constant_term_campaign(instances: int = 200, max_dim: int = 5,
                           max_rank: int = 4, seed: int = 0,
                           tol: RankTolerance | float | None = None,
                           trials: int = 3) -> CampaignResult:
    """Adding a constant M equals making its rank-factor pairs parameterized:
    combinatorial value == sampled value == prepended-family value."""
    tol = RankTolerance.coerce(tol)
    result = CampaignResult("constant-plus-family generic rank", instances)
    for i in range(instances):
        rng = spawn_rng(seed, 4, i)
        n1 = int(rng.integers(1, max_dim + 1))
        n2 = int(rng.integers(1, max_dim + 1))
        t = int(rng.integers(0, min(max_rank, n1, n2) + 1))
        M = random_low_rank(rng, n1, n2, t)
        fam = random_matrix_family(rng, n1, n2, int(rng.integers(0, 4)), 2, 2)
        try:
            combined = grank_constant_plus_family(M, fam, tol, trials,
                                                  seed * 1000 + i)
        except ConsistencyError as exc:
            result.record_failure(f"instance {i}: {exc}")
            continue
        # independent sampling of M + sum W P R with a different seed
        rng2 = spawn_rng(seed, 40, i)
        sampled = 0
        for _ in range(trials):
            total = M.copy()
            for W, R in fam.members:
                mod = rng2.uniform(0.5, 1.5, (W.shape[1], R.shape[0]))
                ph = rng2.uniform(0, 2 * np.pi, (W.shape[1], R.shape[0]))
                total += W @ (mod * np.exp(1j * ph)) @ R
            sampled = max(sampled, numeric_rank(total, tol))
        # fully parameterized prepended family, evaluated by matroid
        fact = rank_factorize(M, tol)
        prepended = expand_matrix_family(fam).prepend(fact.W, fact.R)
        v_pre, _ = grank_pairs_matroid(prepended, tol)
        if not (combined == sampled == v_pre):
            result.record_failure(
                f"instance {i}: combined={combined} sampled={sampled} "
                f"prepended={v_pre}")
    return result


@_timed
def gain_equivalence_campaign(instances: int = 200, max_n: int = 6,
                              seed: int = 0,
                              tol: RankTolerance | float | None = None,
                              trials: int = 5) -> CampaignResult:
    """Bordered deficiency iff A + BE + KC singular for all gains, checked by
    sampling plus the constructive witness; the constructive gains must
    restore full rank whenever the bordered matrix allows it."""
    tol = RankTolerance.coerce(tol)
    result = CampaignResult("bordered-rank gain equivalence", instances)
    for i in range(instances):
        rng = spawn_rng(seed, 5, i)
        n = int(rng.integers(1, max_n + 1))
        if rng.random() < 0.4:
            A, B, C = deficient_bordered_triple(rng, n)
        else:
            A, B, C = random_bordered_triple(rng, n)
        if not gain_equivalence_check(A, B, C, tol, trials, seed * 1000 + i):
            result.record_failure(f"instance {i}: equivalence check failed (n={n})")
            continue
        if bordered_rank(A, B, C, tol) >= n:
            gains = rank_restoring_gains(A, B, C, tol)
            if gains is None or numeric_rank(A + B @ gains[0] + gains[1] @ C, tol) != n:
                result.record_failure(f"instance {i}: constructive gains deficient")
    return result


@_timed
def centralized_campaign(instances: int = 100, max_n: int = 5, seed: int = 0,
                         tol: RankTolerance | float | None = None) -> CampaignResult:
    """For k = 1 the fixed spectrum is exactly the eigenvalues failing the
    PBH controllability or observability test."""
    tol = RankTolerance.coerce(tol)
    result = CampaignResult("centralized PBH consistency (k=1)", instances)
    for i in range(instances):
        rng = spawn_rng(seed, 6, i)
        n = int(rng.integers(1, max_n + 1))
        m = int(rng.integers(0, 3))
        l = int(rng.integers(0, 3))
        sys, eigs, fixed_mask = modal_single_channel_system(rng, n, m, l)
        report = fixed_spectrum(sys, tol)
        B, C = sys.channels[0]
        for rec in report.records:
            pencil = rec.lam * np.eye(n) - sys.A
            unctrl = numeric_rank(np.hstack([pencil, B]), tol) < n
            unobs = numeric_rank(np.vstack([pencil, C]), tol) < n
            if rec.is_fixed != (unctrl or unobs):
                result.record_failure(
                    f"instance {i}: lam={rec.lam:.6g} fixed={rec.is_fixed} "
                    f"PBH unctrl={unctrl} unobs={unobs}")
        # construction ground truth must match the numeric verdict
        truth = sorted(eigs[fixed_mask])
        flagged = sorted(lam.real for lam in report.fixed)
        if len(truth) != len(flagged) or any(
                abs(a - b) > 1e-6 for a, b in zip(truth, flagged)):
            result.record_failure(f"instance {i}: modal construction mismatch")
    return result


def run_all_campaigns(instances: int = 50, seed: int = 0, max_n: int = 5,
                      max_k: int = 3,
                      tol: RankTolerance | float | None = None) -> list:
    """Every campaign at a common instance count; the CLI verify command."""
    tol = RankTolerance.coerce(tol)
    return [
        pencil_equivalence_campaign(instances, max_n, max_k, seed, tol),
        pairs_three_way_campaign(instances, seed=seed, tol=tol),
        matrix_family_campaign(instances, seed=seed, tol=tol),
        constant_term_campaign(instances, seed=seed, tol=tol),
        gain_equivalence_campaign(instances, max_n=min(max_n + 1, 6), seed=seed, tol=tol),
        centralized_campaign(instances, max_n=max_n, seed=seed, tol=tol),
    ]
