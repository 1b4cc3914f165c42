"""Declarative covariance-structure models and the implied volatility matrix.

A model ties the cells of four loading blocks and four latent volatility
blocks either to fixed constants or to coordinates of a free-parameter
vector.  For observables split into two groups of sizes ``p1`` and ``p2``
driven by ``k1`` and ``k2`` latent factors, the implied ``p x p`` covariance
(``p = p1 + p2``) is assembled from the blocks

    sigma11 = L1 @ Sxx @ L1.T + Sdd
    sigma12 = L1 @ Sxx @ G.T @ inv(Psi).T @ L2.T
    sigma22 = L2 @ inv(Psi) @ (G @ Sxx @ G.T + Szz) @ inv(Psi).T @ L2.T + See

with ``Psi = I - B``.  The module also provides the analytic Jacobian of the
half-vectorized covariance, an identifiability rank diagnostic, and a
numerical check that one model embeds into another through an affine
parameter map.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AsymmetricEntryMap,
    DimensionMismatch,
    GapInParamIndices,
    NonOrthonormalF,
    NonzeroBDiagonal,
    NotPositiveDefinite,
    SingularPsi,
)

PD_PIVOT_RTOL = 1e-10
RANK_RTOL = 1e-8
NESTING_ATOL = 1e-10
ORTHONORMAL_ATOL = 1e-12


@dataclass(frozen=True)
class Free:
    """Marks a cell as tied to coordinate ``index`` (0-based) of theta."""

    index: int


@dataclass
class EntryMap:
    """One matrix block: per-cell fixed values plus per-cell parameter indices.

    ``index[i, j] == -1`` means the cell is the constant ``values[i, j]``;
    otherwise the cell takes the value of that theta coordinate.  The same
    index may appear in several cells (an equality constraint).
    """

    values: np.ndarray
    index: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.index = np.asarray(self.index, dtype=np.int64)
        if self.values.shape != self.index.shape or self.values.ndim != 2:
            raise DimensionMismatch("entry map values/index shapes disagree")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    @classmethod
    def fixed(cls, values) -> "EntryMap":
        """Block with every cell fixed to the given constants."""
        values = np.atleast_2d(np.asarray(values, dtype=float))
        return cls(values, np.full(values.shape, -1, dtype=np.int64))

    @classmethod
    def from_cells(cls, rows) -> "EntryMap":
        """Build from nested lists whose cells are floats or :class:`Free`."""
        nr = len(rows)
        nc = len(rows[0])
        values = np.zeros((nr, nc))
        index = np.full((nr, nc), -1, dtype=np.int64)
        for i, row in enumerate(rows):
            if len(row) != nc:
                raise DimensionMismatch("ragged cell rows")
            for j, cell in enumerate(row):
                if isinstance(cell, Free):
                    index[i, j] = cell.index
                else:
                    values[i, j] = float(cell)
        return cls(values, index)

    @classmethod
    def diag(cls, cells) -> "EntryMap":
        """Square block with the given cells on the diagonal, fixed 0 elsewhere."""
        return cls.from_cells(
            [[cells[i] if i == j else 0.0 for j in range(len(cells))] for i in range(len(cells))]
        )

    def materialize(self, theta: np.ndarray) -> np.ndarray:
        out = self.values.copy()
        free = self.index >= 0
        out[free] = theta[self.index[free]]
        return out

    def indicator_stack(self, q: int) -> np.ndarray:
        """(q, rows, cols) stack whose k-th slice is d(block)/d(theta_k)."""
        out = np.zeros((q,) + self.shape)
        ii, jj = np.nonzero(self.index >= 0)
        out[self.index[ii, jj], ii, jj] = 1.0
        return out


@dataclass
class ThetaVector:
    """Free-parameter vector with per-coordinate positivity flags."""

    values: np.ndarray
    positive: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.positive = np.asarray(self.positive, dtype=bool)
        if self.values.shape != self.positive.shape or self.values.ndim != 1:
            raise DimensionMismatch("theta values/flags shapes disagree")
        if np.any(self.values[self.positive] <= 0.0):
            raise ValueError("positivity-flagged coordinates must be strictly positive")

    @classmethod
    def for_spec(cls, spec: "StructuralSpec", values) -> "ThetaVector":
        values = np.asarray(values, dtype=float)
        _require_validated(spec)
        if values.shape != (spec.q,):
            raise DimensionMismatch(f"theta has length {values.size}, model needs {spec.q}")
        return cls(values, spec.positive.copy())

    def __len__(self) -> int:
        return self.values.size


@dataclass
class ImpliedCovariance:
    """Implied covariance with its Cholesky factor when positive definite."""

    sigma: np.ndarray
    chol: np.ndarray | None
    is_pd: bool

    @property
    def p(self) -> int:
        return self.sigma.shape[0]

    def log_det(self) -> float:
        if self.chol is None:
            raise NotPositiveDefinite("no Cholesky factor available")
        return 2.0 * float(np.sum(np.log(np.diagonal(self.chol))))


@dataclass
class NestingEmbedding:
    """Affine parameter map theta_small -> f @ theta_small + c between models."""

    f: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        self.f = np.asarray(self.f, dtype=float)
        self.c = np.asarray(self.c, dtype=float)
        if self.f.ndim != 2 or self.c.shape != (self.f.shape[0],):
            raise DimensionMismatch("embedding shapes disagree")

    def apply(self, theta_small: np.ndarray) -> np.ndarray:
        return self.f @ np.asarray(theta_small, dtype=float) + self.c


_SYMMETRIC_BLOCKS = ("sigma_xi", "sigma_delta", "sigma_eps", "sigma_zeta")


@dataclass
class StructuralSpec:
    """A candidate model: dimensions plus the eight entry-map blocks.

    Call :func:`validate_spec` before use; it derives the parameter count
    ``q``, the positivity mask, and normalizes symmetric blocks.
    """

    p1: int
    p2: int
    k1: int
    k2: int
    lambda1: EntryMap
    lambda2: EntryMap
    b: EntryMap
    gamma: EntryMap
    sigma_xi: EntryMap
    sigma_delta: EntryMap
    sigma_eps: EntryMap
    sigma_zeta: EntryMap
    q: int | None = None
    positive: np.ndarray | None = None
    reused_params: tuple[int, ...] = ()
    _stacks: dict | None = field(default=None, repr=False, compare=False)

    @property
    def p(self) -> int:
        return self.p1 + self.p2

    @property
    def validated(self) -> bool:
        return self.q is not None


def _require_validated(spec: StructuralSpec) -> None:
    if not spec.validated:
        validate_spec(spec)


def _mirror_symmetric(name: str, m: EntryMap) -> None:
    """Copy the lower triangle onto the upper one; reject contradictions.

    An authored upper cell must either equal the mirror of its lower cell or
    be a fixed zero placeholder.
    """
    n = m.shape[0]
    for i in range(n):
        for j in range(i + 1, n):
            lo_idx, up_idx = m.index[j, i], m.index[i, j]
            lo_val, up_val = m.values[j, i], m.values[i, j]
            mirror_ok = up_idx == lo_idx and (lo_idx >= 0 or up_val == lo_val)
            placeholder = up_idx == -1 and up_val == 0.0
            if not (mirror_ok or placeholder):
                raise AsymmetricEntryMap(f"{name}[{i},{j}] contradicts {name}[{j},{i}]")
            m.index[i, j] = lo_idx
            m.values[i, j] = lo_val


def validate_spec(spec: StructuralSpec) -> StructuralSpec:
    """Check shapes and authoring rules; derive q and the positivity mask.

    Returns the same spec object with derived fields filled in.  Raises
    :class:`DimensionMismatch`, :class:`NonzeroBDiagonal`,
    :class:`AsymmetricEntryMap` or :class:`GapInParamIndices`.
    """
    expected = {
        "lambda1": (spec.p1, spec.k1),
        "lambda2": (spec.p2, spec.k2),
        "b": (spec.k2, spec.k2),
        "gamma": (spec.k2, spec.k1),
        "sigma_xi": (spec.k1, spec.k1),
        "sigma_delta": (spec.p1, spec.p1),
        "sigma_eps": (spec.p2, spec.p2),
        "sigma_zeta": (spec.k2, spec.k2),
    }
    if min(spec.p1, spec.p2, spec.k1, spec.k2) < 1:
        raise DimensionMismatch("all dimensions must be positive")
    for name, shape in expected.items():
        m: EntryMap = getattr(spec, name)
        if m.shape != shape:
            raise DimensionMismatch(f"{name} has shape {m.shape}, expected {shape}")

    d = np.arange(spec.k2)
    if np.any(spec.b.index[d, d] != -1) or np.any(spec.b.values[d, d] != 0.0):
        raise NonzeroBDiagonal("diagonal of b must be fixed to zero")

    for name in _SYMMETRIC_BLOCKS:
        _mirror_symmetric(name, getattr(spec, name))

    counts: dict[int, int] = {}
    for name in expected:
        m = getattr(spec, name)
        idx = m.index
        if name in _SYMMETRIC_BLOCKS:
            idx = idx[np.tril_indices(m.shape[0])]
        for k in idx[idx >= 0].ravel():
            counts[int(k)] = counts.get(int(k), 0) + 1
    if counts:
        q = max(counts) + 1
        missing = sorted(set(range(q)) - set(counts))
        if missing:
            raise GapInParamIndices(f"unused parameter indices {missing}")
    else:
        q = 0

    positive = np.zeros(q, dtype=bool)
    for name in _SYMMETRIC_BLOCKS:
        m = getattr(spec, name)
        dd = np.arange(m.shape[0])
        diag_idx = m.index[dd, dd]
        positive[diag_idx[diag_idx >= 0]] = True

    spec.q = q
    spec.positive = positive
    spec.reused_params = tuple(sorted(k for k, c in counts.items() if c > 1))
    spec._stacks = None
    return spec


def _theta_values(spec: StructuralSpec, theta) -> np.ndarray:
    _require_validated(spec)
    values = theta.values if isinstance(theta, ThetaVector) else np.asarray(theta, dtype=float)
    if values.shape != (spec.q,):
        raise DimensionMismatch(f"theta has length {values.size}, model needs {spec.q}")
    return values


def _materialize_blocks(spec: StructuralSpec, t: np.ndarray):
    return (
        spec.lambda1.materialize(t),
        spec.lambda2.materialize(t),
        spec.b.materialize(t),
        spec.gamma.materialize(t),
        spec.sigma_xi.materialize(t),
        spec.sigma_delta.materialize(t),
        spec.sigma_eps.materialize(t),
        spec.sigma_zeta.materialize(t),
    )


def _psi_inverse(b: np.ndarray) -> np.ndarray:
    psi = np.eye(b.shape[0]) - b
    if not np.all(np.isfinite(psi)):
        raise SingularPsi("I - B has non-finite entries")
    sv = np.linalg.svd(psi, compute_uv=False)
    if sv[-1] <= 1e-12 * max(1.0, sv[0]):
        raise SingularPsi("I - B is numerically singular")
    return np.linalg.inv(psi)


def _sigma_blocks(l1, l2, b, g, sxx, sdd, see, szz) -> np.ndarray:
    pinv = _psi_inverse(b)
    # extreme trial points during optimization may overflow; the PD check
    # downstream rejects non-finite results
    with np.errstate(over="ignore", invalid="ignore"):
        s11 = l1 @ sxx @ l1.T + sdd
        s12 = l1 @ sxx @ g.T @ pinv.T @ l2.T
        s22 = l2 @ pinv @ (g @ sxx @ g.T + szz) @ pinv.T @ l2.T + see
        p1 = l1.shape[0]
        p = p1 + l2.shape[0]
        sigma = np.empty((p, p))
        sigma[:p1, :p1] = s11
        sigma[:p1, p1:] = s12
        sigma[p1:, :p1] = s12.T
        sigma[p1:, p1:] = s22
        return (sigma + sigma.T) / 2.0


def _chol_pd(sigma: np.ndarray) -> tuple[np.ndarray | None, bool]:
    """Cholesky factor plus a PD flag using a relative pivot tolerance."""
    if not np.all(np.isfinite(sigma)):
        return None, False
    tol = PD_PIVOT_RTOL * float(np.max(np.diagonal(sigma)))
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError:
        return None, False
    if float(np.min(np.diagonal(chol)) ** 2) <= tol:
        return None, False
    return chol, True


def assemble_sigma(spec: StructuralSpec, theta) -> ImpliedCovariance:
    """Implied covariance at theta.

    Parameters
    ----------
    spec : StructuralSpec
        Validated model.
    theta : ThetaVector or array of length q
        Parameter point; raw arrays skip the positivity check, which the
        finite-difference diagnostics rely on.
    """
    t = _theta_values(spec, theta)
    sigma = _sigma_blocks(*_materialize_blocks(spec, t))
    chol, is_pd = _chol_pd(sigma)
    return ImpliedCovariance(sigma, chol, is_pd)


def _deriv_stacks(spec: StructuralSpec) -> dict[str, np.ndarray]:
    if spec._stacks is None:
        spec._stacks = {
            name: getattr(spec, name).indicator_stack(spec.q)
            for name in (
                "lambda1",
                "lambda2",
                "b",
                "gamma",
                "sigma_xi",
                "sigma_delta",
                "sigma_eps",
                "sigma_zeta",
            )
        }
    return spec._stacks


def sigma_and_partials(spec: StructuralSpec, theta) -> tuple[ImpliedCovariance, np.ndarray]:
    """Implied covariance plus the stack of its partial derivatives.

    Returns ``(cov, dsigma)`` where ``dsigma[k]`` is the symmetric matrix
    d(sigma)/d(theta_k), obtained by the product rule over the block
    formulas with each block derivative an indicator matrix.
    """
    t = _theta_values(spec, theta)
    l1, l2, b, g, sxx, sdd, see, szz = _materialize_blocks(spec, t)
    pinv = _psi_inverse(b)
    st = _deriv_stacks(spec)
    q, p1, p2 = spec.q, spec.p1, spec.p2
    p = p1 + p2

    dl1, dl2, db, dg = st["lambda1"], st["lambda2"], st["b"], st["gamma"]
    dsxx, dsdd, dsee, dszz = st["sigma_xi"], st["sigma_delta"], st["sigma_eps"], st["sigma_zeta"]

    # d(inv(Psi)) = inv(Psi) dB inv(Psi) since dPsi = -dB
    dpinv = pinv @ db @ pinv

    xl1t = sxx @ l1.T
    t11 = dl1 @ xl1t
    d11 = t11 + t11.transpose(0, 2, 1) + l1 @ dsxx @ l1.T + dsdd

    gt_pt_l2t = g.T @ pinv.T @ l2.T
    pt_l2t = pinv.T @ l2.T
    a1 = l1 @ sxx
    d_tail = (
        dg.transpose(0, 2, 1) @ pt_l2t
        + g.T @ dpinv.transpose(0, 2, 1) @ l2.T
        + (g.T @ pinv.T) @ dl2.transpose(0, 2, 1)
    )
    d12 = dl1 @ (sxx @ gt_pt_l2t) + l1 @ dsxx @ gt_pt_l2t + a1 @ d_tail

    mmat = g @ sxx @ g.T + szz
    tm = dg @ (sxx @ g.T)
    dm = tm + tm.transpose(0, 2, 1) + g @ dsxx @ g.T + dszz
    tmat = pinv @ mmat @ pinv.T
    tu = dpinv @ (mmat @ pinv.T)
    dt = tu + tu.transpose(0, 2, 1) + pinv @ dm @ pinv.T
    tv = dl2 @ (tmat @ l2.T)
    d22 = tv + tv.transpose(0, 2, 1) + l2 @ dt @ l2.T + dsee

    dsigma = np.empty((q, p, p))
    dsigma[:, :p1, :p1] = d11
    dsigma[:, :p1, p1:] = d12
    dsigma[:, p1:, :p1] = d12.transpose(0, 2, 1)
    dsigma[:, p1:, p1:] = d22
    dsigma = (dsigma + dsigma.transpose(0, 2, 1)) / 2.0

    sigma = np.empty((p, p))
    s11 = l1 @ xl1t + sdd
    sigma[:p1, :p1] = s11
    sigma[:p1, p1:] = a1 @ gt_pt_l2t
    sigma[p1:, :p1] = sigma[:p1, p1:].T
    sigma[p1:, p1:] = l2 @ tmat @ l2.T + see
    sigma = (sigma + sigma.T) / 2.0
    chol, is_pd = _chol_pd(sigma)
    return ImpliedCovariance(sigma, chol, is_pd), dsigma


def sigma_jacobian(spec: StructuralSpec, theta) -> np.ndarray:
    """Jacobian of the half-vectorized covariance: shape (p(p+1)/2, q).

    Column k is d(vech sigma)/d(theta_k), with vech stacking the lower
    triangle row by row.
    """
    _, dsigma = sigma_and_partials(spec, theta)
    rows, cols = np.tril_indices(spec.p)
    return dsigma[:, rows, cols].T


def identifiability_rank(spec: StructuralSpec, theta) -> int:
    """Numerical rank of the covariance Jacobian at theta."""
    jac = sigma_jacobian(spec, theta)
    if jac.size == 0:
        return 0
    sv = np.linalg.svd(jac, compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > RANK_RTOL * sv[0]))


def random_theta(spec: StructuralSpec, rng: np.random.Generator) -> np.ndarray:
    """Random parameter draw respecting positivity flags.

    Positivity-flagged coordinates are log-uniform on [0.25, 2.5]; the rest
    uniform on [-1.5, 1.5].
    """
    _require_validated(spec)
    t = rng.uniform(-1.5, 1.5, size=spec.q)
    npos = int(spec.positive.sum())
    t[spec.positive] = np.exp(rng.uniform(np.log(0.25), np.log(2.5), size=npos))
    return t


def check_nesting(
    spec_small: StructuralSpec,
    spec_large: StructuralSpec,
    emb: NestingEmbedding,
    trials: int = 20,
    seed: int = 0,
) -> bool:
    """Whether the small model embeds into the large one through ``emb``.

    True iff for ``trials`` random valid parameter draws the two implied
    covariances agree entrywise within a 1e-10 tolerance.  Requires
    strictly fewer parameters in the small model and orthonormal embedding
    columns (otherwise :class:`NonOrthonormalF`).
    """
    _require_validated(spec_small)
    _require_validated(spec_large)
    if emb.f.shape != (spec_large.q, spec_small.q):
        raise DimensionMismatch(
            f"embedding is {emb.f.shape}, expected {(spec_large.q, spec_small.q)}"
        )
    if spec_small.q >= spec_large.q:
        return False
    gram = emb.f.T @ emb.f
    if np.max(np.abs(gram - np.eye(spec_small.q))) > ORTHONORMAL_ATOL:
        raise NonOrthonormalF("embedding columns are not orthonormal")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        t_small = random_theta(spec_small, rng)
        s_small = assemble_sigma(spec_small, t_small).sigma
        s_large = assemble_sigma(spec_large, emb.apply(t_small)).sigma
        if np.max(np.abs(s_small - s_large)) > NESTING_ATOL:
            return False
    return True
