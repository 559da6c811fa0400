"""Betti numbers of Sigma_lambda from the spaces X_{lambda,mu}, with batch checks.

beta_i(Sigma_lambda) = sum over lambda |- mu of beta_{i - 2 l(mu) - 1}(X_{lambda,mu}),
where X_{lambda,lambda} is empty and an unreachable mu contributes a point.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

from ..combinatorics.partitions import NumberPartition, bell_number, coarsenings, is_generic, number_partitions
from ..errors import GuardExceededError, InvalidInputError
from ..oracle.quotient_oracle import is_join_reachable, oracle_betti
from ..schemas import ArnoldReport, SigmaReport, SigmaTerm, SweepReport
from ..settings import DEFAULT_MAX_BELL
from . import logger
from .chain_complex import BettiVector, reduced_betti, x_lambda_mu
from .morse import generic_cone_matching


def _term(lam: NumberPartition, mu: NumberPartition, source: str, max_bell: Optional[int],
          max_forests: Optional[int], strict: bool) -> Tuple[SigmaTerm, BettiVector]:
    shift = 2 * mu.length + 1
    if mu == lam:
        x = BettiVector.empty_space()
        return SigmaTerm(mu=str(mu), shift=shift, reachable=True, x_betti=x.to_json()), x.shifted(shift)

    within_guard = max_bell is None or bell_number(lam.n) <= max_bell
    if not within_guard:
        if strict or source == "oracle":
            raise GuardExceededError("max_bell", max_bell, bell_number(lam.n))
        reachable, assumed = True, True
    else:
        reachable, assumed = is_join_reachable(lam, mu, max_bell=max_bell), False

    if not reachable:
        return SigmaTerm(mu=str(mu), shift=shift, reachable=False), BettiVector()

    if source == "oracle":
        x = oracle_betti(lam, mu, max_bell=max_bell)
    else:
        x = reduced_betti(x_lambda_mu(lam, mu, max_forests=max_forests))
    term = SigmaTerm(mu=str(mu), shift=shift, reachable=True, assumed=assumed, x_betti=x.to_json())
    return term, x.shifted(shift)


def vanishing_ok(lam: NumberPartition, betti: BettiVector) -> bool:
    """Top value 1 at 2 l(lambda), support within [min(3, 2 l(lambda)), 2 l(lambda)]."""
    top = 2 * lam.length
    low = min(3, top)
    return betti[top] == 1 and all(low <= i <= top for i in betti.support())


def betti_sigma(lam: NumberPartition, n: Optional[int] = None, source: str = "forests",
                max_bell: Optional[int] = DEFAULT_MAX_BELL, max_forests: Optional[int] = None,
                strict: bool = False, threads: int = 1) -> SigmaReport:
    """Aggregate the shifted Betti numbers of every X_{lambda,mu}.

    Args:
        lam: the coincidence pattern lambda
        n: optional check that lambda is a partition of n
        source: "forests" for the forest model, "oracle" for the brute-force quotient
        max_bell: oracle guard; above it reachability is assumed (or refused when strict)
        max_forests: forest-count guard per complex
        strict: raise GuardExceededError instead of assuming reachability
        threads: workers for the independent per-mu computations

    Returns:
        SigmaReport: per-mu terms and the aggregated Betti numbers
    """
    if n is not None and lam.n != n:
        raise InvalidInputError(f"({lam}) is not a partition of {n}")
    if source not in ("forests", "oracle"):
        raise InvalidInputError(f"unknown source '{source}'")

    mus = sorted(coarsenings(lam), reverse=True)

    def work(mu: NumberPartition) -> Tuple[SigmaTerm, BettiVector]:
        return _term(lam, mu, source, max_bell, max_forests, strict)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, mus))
    else:
        results = [work(mu) for mu in mus]

    total = BettiVector()
    for _, contribution in results:
        total = total + contribution
    terms = [term for term, _ in results]
    logger.info(f"betti_sigma(({lam})): {total}")
    return SigmaReport(
        lam=str(lam), n=lam.n, source=source, terms=terms,
        betti={str(i): b for i, b in total.terms},
        assumed_reachable=any(t.assumed for t in terms),
        vanishing_ok=vanishing_ok(lam, total),
    )


def sigma_betti_vector(report: SigmaReport) -> BettiVector:
    return BettiVector.from_dict({int(i): b for i, b in report.betti.items()})


def vanishing_check(lam: NumberPartition, n: Optional[int] = None, **kwargs) -> bool:
    """beta_{2l(lambda)}(Sigma_lambda) = 1 and nothing outside [3, 2l(lambda)]."""
    return betti_sigma(lam, n, **kwargs).vanishing_ok


def vanishing_sweep(n: int, **kwargs) -> SweepReport:
    items = []
    for lam in number_partitions(n):
        report = betti_sigma(lam, **kwargs)
        items.append({"lambda": str(lam), "betti": report.betti, "ok": report.vanishing_ok})
    failures = [item for item in items if not item["ok"]]
    return SweepReport(command="vanishing", n=n, count=len(failures), items=items)


def arnold_cases(n_max: int) -> List[Tuple[int, int, NumberPartition]]:
    """(k, m, lambda) with lambda = (k^m, 1^(n-km)), k >= 2, m >= 1, km <= n <= n_max."""
    cases = []
    for n in range(2, n_max + 1):
        for k in range(2, n + 1):
            for m in range(1, n // k + 1):
                cases.append((k, m, NumberPartition.power(k, m, n)))
    return cases


def verify_arnold(n_max: int, **kwargs) -> ArnoldReport:
    """Check beta(Sigma_lambda) = indicator at 2 l(lambda) for every (k^m, 1^(n-km))."""
    if n_max < 2:
        raise InvalidInputError(f"n_max must be at least 2, got {n_max}")
    deviations = []
    cases = arnold_cases(n_max)
    for k, m, lam in cases:
        betti = sigma_betti_vector(betti_sigma(lam, **kwargs))
        expected = BettiVector.from_dict({2 * lam.length: 1})
        if betti != expected:
            deviations.append(f"({lam}): {betti}")
    if deviations:
        logger.warning(f"verify_arnold: {len(deviations)} deviations")
    return ArnoldReport(n_max=n_max, cases=len(cases), deviations=deviations, passed=not deviations)


def generic_sweep(n_max: int, max_forests: Optional[int] = None, **kwargs) -> SweepReport:
    """Cone certificates for every generic lambda |- n <= n_max and every coarsening mu."""
    items = []
    for n in range(1, n_max + 1):
        for lam in number_partitions(n):
            if not is_generic(lam):
                continue
            mus = [mu for mu in coarsenings(lam) if mu != lam]
            for mu in mus:
                generic_cone_matching(lam, mu, max_forests=max_forests)
            betti = sigma_betti_vector(betti_sigma(lam, max_forests=max_forests, **kwargs))
            ok = betti == BettiVector.from_dict({2 * lam.length: 1})
            items.append({"lambda": str(lam), "cones": len(mus), "sigma_ok": ok})
    failures = [item for item in items if not item["sigma_ok"]]
    return SweepReport(command="generic", n=n_max, count=len(failures), items=items)
