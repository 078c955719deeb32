import os
from itertools import product

import pytest
from hypothesis import HealthCheck, settings

from shortpa import apcover, encode
from shortpa.apcover import APCoverInstance, APTriple

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("SHORTPA_HYPOTHESIS", "default"))

REFERENCE = APCoverInstance(1, 5, (APTriple(2, 1, 3),))
COVERED = APCoverInstance(2, 2, (APTriple(2, 1, 3),))


def tiny_instances():
    """Distinct single-progression instances small enough for every brute
    solver: M <= 60 and p*q <= 60 after normalization."""
    seen = {}
    for mu, nu, g, h, e in product(range(4), range(9), range(1, 8), range(4), range(1, 6)):
        if mu > nu:
            continue
        inst = APCoverInstance(mu, nu, (APTriple(g, h, e),))
        norm, shift = apcover.normalize(inst)
        if not norm.triples or not apcover.is_normalized(norm):
            continue
        enc = encode.build_encoding(norm, shift)
        if enc.M <= 60 and enc.cfrac.k > 0 and enc.p * enc.q <= 60:
            seen.setdefault(norm, enc)
    return list(seen.values())


def parity_form_instances(max_pq: int = 20_000):
    """One parity class of J = [mu, nu] covered by a single e = 2 progression."""
    out = []
    for mu, n, off in product(range(1, 5), range(1, 8), (0, 1)):
        nu, g = mu + n, mu + off
        h = (nu - g) // 2
        if g < 2 or h < 1:
            continue
        enc = encode.encode_instance(APCoverInstance(mu, nu, (APTriple(g, h, 2),)))
        if enc.p * enc.q <= max_pq:
            out.append(enc)
    return out


@pytest.fixture(scope="session")
def tiny():
    return tiny_instances()


@pytest.fixture(scope="session")
def ref_enc():
    return encode.encode_instance(REFERENCE)


@pytest.fixture(scope="session")
def covered_enc():
    return encode.encode_instance(COVERED)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
