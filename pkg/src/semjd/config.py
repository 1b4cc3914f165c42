"""Line-based config files for models, generative models and experiments.

The format is sectioned plain text (grammar in ``docs/config-format.md``):
``[section]`` headers introduce blocks; inside a block, ``key = value``
lines set scalars/vectors and bare lines are matrix rows.  Matrix cells are
numbers or ``t<k>`` tokens tying the cell to the k-th free parameter
(1-based in files, 0-based in the API).  Symmetric volatility blocks accept
a ``diag`` row as shorthand for a diagonal matrix.
"""

import numpy as np

from .errors import ConfigError
from .estimation import FitConfig, GivenPoint
from .experiment import CandidateModel, ExperimentConfig
from .likelihood import TruncationRule
from .sem import EntryMap, Free, StructuralSpec, validate_spec
from .simulate import LatentSdeSpec, TrueModelSpec, reference_true_model


class _Section:
    def __init__(self):
        self.kv: dict[str, str] = {}
        self.rows: list[list[str]] = []


def _parse_sections(text: str, source: str) -> dict[str, _Section]:
    sections: dict[str, _Section] = {}
    current: _Section | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ConfigError(f"{source}:{lineno}: empty section name")
            current = sections.setdefault(name, _Section())
        elif current is None:
            raise ConfigError(f"{source}:{lineno}: content before any [section]")
        elif "=" in line:
            key, _, value = line.partition("=")
            current.kv[key.strip()] = value.strip()
        else:
            current.rows.append(line.split())
    return sections


def _cell(token: str, source: str):
    if token.startswith("t") and token[1:].isdigit():
        k = int(token[1:])
        if k < 1:
            raise ConfigError(f"{source}: parameter tokens are 1-based, got {token!r}")
        return Free(k - 1)
    try:
        return float(token)
    except ValueError as exc:
        raise ConfigError(f"{source}: bad cell {token!r}") from exc


def _entry_map(sec: _Section, name: str, source: str) -> EntryMap:
    if not sec.rows:
        raise ConfigError(f"{source}: section [{name}] has no rows")
    if sec.rows[0][0] == "diag":
        if len(sec.rows) != 1:
            raise ConfigError(f"{source}: [{name}] diag shorthand must be a single row")
        cells = [_cell(tok, f"{source} [{name}]") for tok in sec.rows[0][1:]]
        return EntryMap.diag(cells)
    rows = [[_cell(tok, f"{source} [{name}]") for tok in row] for row in sec.rows]
    return EntryMap.from_cells(rows)


def _floats(text: str, source: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.replace(",", " ").split()])
    except ValueError as exc:
        raise ConfigError(f"{source}: bad numeric list {text!r}") from exc


def _require(sec_map: dict[str, _Section], name: str, source: str) -> _Section:
    if name not in sec_map:
        raise ConfigError(f"{source}: missing required section [{name}]")
    return sec_map[name]


def load_model_config(filename: str) -> tuple[str, StructuralSpec, np.ndarray | None]:
    """(name, validated spec, starting point or None) from a model file."""
    with open(filename) as fh:
        sections = _parse_sections(fh.read(), filename)
    model = _require(sections, "model", filename)
    try:
        dims = {k: int(model.kv[k]) for k in ("p1", "p2", "k1", "k2")}
    except KeyError as exc:
        raise ConfigError(f"{filename}: [model] needs p1, p2, k1, k2") from exc
    except ValueError as exc:
        raise ConfigError(f"{filename}: bad dimension in [model]") from exc
    name = model.kv.get("name", filename)

    maps = {}
    for block in ("lambda1", "lambda2", "gamma", "sigma_xi", "sigma_delta", "sigma_eps", "sigma_zeta"):
        maps[block] = _entry_map(_require(sections, block, filename), block, filename)
    if "b" in sections:
        maps["b"] = _entry_map(sections["b"], "b", filename)
    else:
        maps["b"] = EntryMap.fixed(np.zeros((dims["k2"], dims["k2"])))

    spec = validate_spec(StructuralSpec(**dims, **maps))

    init = None
    if "init" in sections:
        sec = sections["init"]
        if "theta" in sec.kv:
            init = _floats(sec.kv["theta"], filename)
        elif sec.rows:
            init = np.concatenate([_floats(" ".join(row), filename) for row in sec.rows])
        if init is not None and init.size != spec.q:
            raise ConfigError(f"{filename}: [init] has {init.size} values, model needs {spec.q}")
    return name, spec, init


def _sde_from_sections(sections: dict[str, _Section], prefix: str, source: str) -> LatentSdeSpec:
    head = _require(sections, prefix, source)
    kmat = _require(sections, f"{prefix}.k", source)
    smat = _require(sections, f"{prefix}.s", source)
    k = np.array([[float(tok) for tok in row] for row in kmat.rows])
    s = np.array([[float(tok) for tok in row] for row in smat.rows])
    dim = k.shape[0]

    def vec(key, default=None):
        if key in head.kv:
            v = _floats(head.kv[key], source)
            return np.full(dim, v[0]) if v.size == 1 else v
        if default is None:
            raise ConfigError(f"{source}: [{prefix}] needs {key}")
        return np.full(dim, float(default))

    return LatentSdeSpec(
        dim=dim,
        k=k,
        mu=vec("mu", 0.0),
        s=s,
        jump_rate=vec("jump_rate", 0.0),
        jump_var=vec("jump_var", 1.0),
        x0=vec("x0", 0.0),
    )


def load_true_model_config(filename: str) -> TrueModelSpec:
    """Generative-model spec from a file; ``paper`` preset handled upstream."""
    with open(filename) as fh:
        sections = _parse_sections(fh.read(), filename)

    def const(name):
        sec = _require(sections, name, filename)
        return np.array([[float(tok) for tok in row] for row in sec.rows])

    lambda1 = const("true.lambda1")
    lambda2 = const("true.lambda2")
    gamma = const("true.gamma")
    k2 = lambda2.shape[1]
    b = const("true.b") if "true.b" in sections else np.zeros((k2, k2))
    return TrueModelSpec(
        lambda1=lambda1,
        lambda2=lambda2,
        b=b,
        gamma=gamma,
        sde_xi=_sde_from_sections(sections, "sde.xi", filename),
        sde_delta=_sde_from_sections(sections, "sde.delta", filename),
        sde_eps=_sde_from_sections(sections, "sde.eps", filename),
        sde_zeta=_sde_from_sections(sections, "sde.zeta", filename),
    )


def resolve_true_model(token: str) -> TrueModelSpec:
    """``paper`` or a path to a generative-model config file."""
    if token == "paper":
        return reference_true_model()
    return load_true_model_config(token)


def resolve_candidate(token: str) -> CandidateModel:
    """Builtin name (model1/model2/model3) or a path to a model file."""
    from .presets import builtin_model

    if token in ("model1", "model2", "model3"):
        spec, init = builtin_model(token)
        return CandidateModel(token, spec, init)
    name, spec, init = load_model_config(token)
    if init is None:
        raise ConfigError(f"{token}: candidate model file needs an [init] section")
    return CandidateModel(name, spec, init)


def load_experiment_config(filename: str) -> ExperimentConfig:
    """Experiment driver config: generative model, candidates, protocol."""
    with open(filename) as fh:
        sections = _parse_sections(fh.read(), filename)
    exp = _require(sections, "experiment", filename)

    def get(key, default=None):
        if key in exp.kv:
            return exp.kv[key]
        if default is None:
            raise ConfigError(f"{filename}: [experiment] needs {key}")
        return default

    n_grid = [int(v) for v in _floats(get("n_grid"), filename)]
    cand_sec = _require(sections, "candidates", filename)
    candidates = [resolve_candidate(tok) for row in cand_sec.rows for tok in row]
    if not candidates:
        raise ConfigError(f"{filename}: [candidates] is empty")

    fit_cfg = FitConfig(init=GivenPoint(np.empty(0)))
    if "fit" in sections:
        kv = sections["fit"].kv
        fit_cfg = FitConfig(
            init=GivenPoint(np.empty(0)),
            max_iters=int(kv.get("max_iters", fit_cfg.max_iters)),
            grad_tol=float(kv.get("grad_tol", fit_cfg.grad_tol)),
            step_tol=float(kv.get("step_tol", fit_cfg.step_tol)),
            reparameterize_positives=kv.get("reparameterize_positives", "true").lower()
            in ("1", "true", "yes"),
        )

    try:
        return ExperimentConfig(
            true_model=resolve_true_model(get("true_model", "paper")),
            candidates=candidates,
            replications=int(get("reps")),
            n_grid=n_grid,
            t_end=float(get("t_end", "1.0")),
            rule=TruncationRule(d=float(get("d", "10")), rho=float(get("rho", "0.4"))),
            fit=fit_cfg,
            master_seed=int(get("seed", "0")),
            threads=int(get("threads", "0")),
        )
    except ValueError as exc:
        raise ConfigError(f"{filename}: {exc}") from exc
