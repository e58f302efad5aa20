import hypothesis.strategies as st
import pytest
from hypothesis import settings

from selgame.groups import ComponentGroup, GroupSpec, symmetric_group_3

settings.register_profile("default", max_examples=200, deadline=None)
settings.load_profile("default")

COMPONENTS = {
    "integers": ComponentGroup.integers(),
    "cyclic2": ComponentGroup.cyclic(2),
    "cyclic6": ComponentGroup.cyclic(6),
    "s3": symmetric_group_3(),
}


def values(g, max_rank=6):
    top = max_rank if g.order is None else g.order - 1
    return st.integers(0, top).map(g.unrank)


def elements(spec, indices=range(6), max_size=4):
    @st.composite
    def build(draw):
        idx = draw(st.lists(st.sampled_from(list(indices)), unique=True, max_size=max_size))
        return spec.element([(i, draw(values(spec.component(i)))) for i in idx])

    return build()


def index_sets(indices=range(6)):
    return st.frozensets(st.sampled_from(list(indices)))


@pytest.fixture(params=list(COMPONENTS))
def spec(request):
    return GroupSpec.uniform(COMPONENTS[request.param])


@pytest.fixture
def zspec():
    return GroupSpec.uniform(ComponentGroup.integers())


@pytest.fixture
def c2spec():
    return GroupSpec.uniform(ComponentGroup.cyclic(2))


# acceptance lines, printed once at the end of the run
ACCEPTANCE: dict = {}


def record_acceptance(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[number] = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    print(ACCEPTANCE[number])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])


def box_contained(x, B, O, W, spec, max_rank=4):
    """Every window element of ``x*U_B`` with small value ranks lies in ``O``.

    Brute force over a numpy grid of the free coordinates; constraints off
    the window can never be met by the whole coset.
    """
    import numpy as np

    B = frozenset(B)
    cons = O.as_dict()
    for i, vals in cons.items():
        if i in B:
            if x.get(i, spec.component(i).identity) not in vals:
                return False
        elif i not in W:
            return False
    free = [i for i in W if i not in B]
    if not free:
        return True
    grids = []
    for i in free:
        g = spec.component(i)
        top = max_rank if g.order is None else g.order - 1
        grids.append(np.arange(top + 1))
    mesh = np.stack(np.meshgrid(*grids, indexing="ij"), -1).reshape(-1, len(free))
    ok = np.ones(len(mesh), dtype=bool)
    for col, i in enumerate(free):
        if i in cons:
            g = spec.component(i)
            ok &= np.isin(mesh[:, col], [g.rank(v) for v in cons[i]])
    return bool(ok.all())
