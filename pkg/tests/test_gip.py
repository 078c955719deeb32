import pytest

from shortpa import apcover, geometry, gip
from shortpa.exactmath import ScaleError


@pytest.fixture(scope="module")
def systems(ref_enc, covered_enc):
    return {
        (name, kind): build(enc)
        for name, enc in (("ref", ref_enc), ("covered", covered_enc))
        for kind, build in (("s1", geometry.build_system1), ("s2", geometry.build_system2))
    }


def test_reference(systems):
    assert gip.decide_gip(systems["ref", "s1"])
    assert gip.qualifying_z(systems["ref", "s1"]) == [1, 3, 4]
    assert gip.count_gip(systems["ref", "s1"]) == 3
    assert gip.decide_gip(systems["ref", "s2"])
    assert gip.qualifying_z(systems["ref", "s2"]) == [1, 3, 4]


def test_covered(systems):
    for kind in ("s1", "s2"):
        assert not gip.decide_gip(systems["covered", kind])
        assert gip.count_gip(systems["covered", kind]) == 0


def test_wider_box_changes_nothing(systems):
    for kind in ("s1", "s2"):
        s = systems["ref", kind]
        assert gip.qualifying_z(s, gip.system_x_box(s, pad=1)) == gip.qualifying_z(s)


def test_scale_guard(systems):
    with pytest.raises(ScaleError):
        gip.count_gip(systems["ref", "s1"], max_scale=10)


def test_tiny_agree(tiny):
    for enc in tiny[::3]:
        want = apcover.uncovered(enc.source)
        assert gip.qualifying_z(geometry.build_system1(enc)) == want
        assert gip.qualifying_z(geometry.build_system2(enc)) == want


def test_backends_agree(systems):
    from shortpa import kernels

    results = {}
    for name in kernels.available_backends():
        kernels.use_backend(name)
        try:
            results[name] = [gip.qualifying_z(s) for s in systems.values()]
        finally:
            kernels.use_backend(kernels.available_backends()[-1])
    assert len(set(map(str, results.values()))) == 1
