"""Built-in candidate models and the default experiment line-up.

Three candidates for the 15-observable reference generative model of
:func:`semjd.simulate.reference_true_model`:

* ``model1`` - two correlated factor groups, diagonal error volatilities,
  32 free parameters; reproduces the true covariance exactly.
* ``model2`` - model1 plus one extra cross-loading (true value 0),
  33 free parameters; also correctly specified, therefore overfitted.
* ``model3`` - a single second-group factor (31 free parameters); cannot
  reproduce the true covariance.

``model1`` embeds into ``model2`` by inserting a zero at coordinate 8.
"""

import numpy as np

from .estimation import FitConfig, GivenPoint
from .sem import EntryMap, Free, NestingEmbedding, StructuralSpec, validate_spec

THETA_TRUE_MODEL1 = np.array(
    [0.2, 0.4, 0.1, 0.7,
     0.2, 0.9, 1.2, 0.3,
     0.5, 0.6, 0.4, 0.7,
     0.7, -0.5,
     0.49,
     0.81, 0.49, 0.25, 0.16, 0.64,
     0.16, 0.81, 0.09, 0.36, 0.16, 0.25, 0.64, 0.36, 0.49, 0.09,
     0.25, 0.64]
)  # fmt: skip

THETA_TRUE_MODEL2 = np.insert(THETA_TRUE_MODEL1, 8, 0.0)

# fit-friendly starting point for the misspecified candidate: the true-model
# loadings collapsed onto its single second-group factor
INIT_MODEL3 = np.array(
    [0.2, 0.4, 0.1, 0.7,
     0.2, 0.9, 1.2, 0.3, 1.0, 0.5, 0.6, 0.4, 0.7,
     0.7,
     0.49,
     0.81, 0.49, 0.25, 0.16, 0.64,
     0.16, 0.81, 0.09, 0.36, 0.16, 0.25, 0.64, 0.36, 0.49, 0.09,
     0.25]
)  # fmt: skip


def _column_loadings(p, anchored_rows, first_free):
    """p x len(anchored_rows) loading map: each column fixed 1 at its anchor
    row, free below it within its row block, fixed 0 elsewhere."""
    ncol = len(anchored_rows)
    cells = [[0.0] * ncol for _ in range(p)]
    k = first_free
    bounds = anchored_rows + [p]
    for j, start in enumerate(anchored_rows):
        cells[start][j] = 1.0
        for i in range(start + 1, bounds[j + 1]):
            cells[i][j] = Free(k)
            k += 1
    return EntryMap.from_cells(cells), k


def model_1() -> StructuralSpec:
    lam1, k = _column_loadings(5, [0], 0)
    lam2, k = _column_loadings(10, [0, 5], k)
    gamma = EntryMap.from_cells([[Free(k)], [Free(k + 1)]])
    k += 2
    spec = StructuralSpec(
        p1=5, p2=10, k1=1, k2=2,
        lambda1=lam1,
        lambda2=lam2,
        b=EntryMap.fixed(np.zeros((2, 2))),
        gamma=gamma,
        sigma_xi=EntryMap.diag([Free(k)]),
        sigma_delta=EntryMap.diag([Free(k + 1 + i) for i in range(5)]),
        sigma_eps=EntryMap.diag([Free(k + 6 + i) for i in range(10)]),
        sigma_zeta=EntryMap.diag([Free(k + 16 + i) for i in range(2)]),
    )  # fmt: skip
    return validate_spec(spec)


def model_2() -> StructuralSpec:
    spec = model_1()
    lam2 = spec.lambda2
    # extra cross-loading at row 4 of the second factor; renumber the rest
    index = lam2.index.copy()
    index[index >= 8] += 1
    index[4, 1] = 8
    spec.lambda2 = EntryMap(lam2.values.copy(), index)
    for name in ("gamma", "sigma_xi", "sigma_delta", "sigma_eps", "sigma_zeta"):
        m: EntryMap = getattr(spec, name)
        index = m.index.copy()
        index[index >= 8] += 1
        setattr(spec, name, EntryMap(m.values.copy(), index))
    spec.q = None
    return validate_spec(spec)


def model_3() -> StructuralSpec:
    lam1, k = _column_loadings(5, [0], 0)
    lam2, k = _column_loadings(10, [0], k)
    gamma = EntryMap.from_cells([[Free(k)]])
    k += 1
    spec = StructuralSpec(
        p1=5, p2=10, k1=1, k2=1,
        lambda1=lam1,
        lambda2=lam2,
        b=EntryMap.fixed(np.zeros((1, 1))),
        gamma=gamma,
        sigma_xi=EntryMap.diag([Free(k)]),
        sigma_delta=EntryMap.diag([Free(k + 1 + i) for i in range(5)]),
        sigma_eps=EntryMap.diag([Free(k + 6 + i) for i in range(10)]),
        sigma_zeta=EntryMap.diag([Free(k + 16)]),
    )  # fmt: skip
    return validate_spec(spec)


def nesting_model1_in_model2() -> NestingEmbedding:
    """Coordinate embedding that inserts a zero at coordinate 8."""
    f = np.zeros((33, 32))
    for i in range(8):
        f[i, i] = 1.0
    for i in range(8, 32):
        f[i + 1, i] = 1.0
    return NestingEmbedding(f, np.zeros(33))


def builtin_model(name: str):
    """(spec, default init) for a builtin candidate name."""
    table = {
        "model1": (model_1, THETA_TRUE_MODEL1),
        "model2": (model_2, THETA_TRUE_MODEL2),
        "model3": (model_3, INIT_MODEL3),
    }
    if name not in table:
        raise KeyError(f"unknown builtin model {name!r}")
    build, init = table[name]
    return build(), init.copy()


def default_candidates():
    """The three-candidate line-up with protocol starting points."""
    from .experiment import CandidateModel

    return [
        CandidateModel("model1", *builtin_model("model1")),
        CandidateModel("model2", *builtin_model("model2")),
        CandidateModel("model3", *builtin_model("model3")),
    ]


def truth_fit_config(init: np.ndarray) -> FitConfig:
    """Fit configuration matching the experiment protocol (start at truth)."""
    return FitConfig(init=GivenPoint(init))
