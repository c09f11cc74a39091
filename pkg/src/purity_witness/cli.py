"""Command-line entry point.

::

    purity-witness run CONFIG.json --out FILE.csv
    purity-witness suite --seed S --count N --dims DS DE --mode {product,general} --out FILE.csv
    purity-witness study FAMILY --levels L1,L2,... --out FILE.csv

Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 bound or invariant violation.
"""

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from .campaign import MODES, evaluate_instance, random_instance
from .dynamics import HamiltonianDecomposition, decompose_hamiltonian, moment, sample_trajectory
from .errors import (
    ConfigError,
    InvariantViolation,
    NumericalError,
    PurityWitnessError,
)
from .linalg import HermitianMatrix
from .scenarios import FAMILIES, truncation_study, two_qubit_ising
from .states import BipartiteSpace, DensityMatrix, from_pure
from .tables import ResultTable
from .witness import BOUND_RTOL, THRESHOLD_FLOOR

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INVARIANT = 4

TRAJECTORY_COLUMNS = [
    "t", "purity_S", "purity_E", "dpurity_dt_analytic", "dpurity_dt_fd",
    "entropy_S", "entropy_E", "mutual_info", "bound_qe", "bound_m2",
    "witness", "is_product",
]
STUDY_COLUMNS = [
    "level", "m1", "m2", "commutator_trace_norm", "eigen_weighted_energy_sum",
]
SUITE_COLUMNS = [
    "seed", "derivative", "bound_qe", "bound_m2", "intermediate_bound",
    "product_defect", "theorem4_pass",
]

TRAJECTORY_SCENARIOS = ("two_qubit_ising", "custom")
TRUNCATION_SCENARIOS = tuple(FAMILIES)
_OPTIONAL = {"fd_step", "threshold", "seed"}
_FIELDS = {
    "two_qubit_ising": ({"scenario", "times"}, _OPTIONAL),
    "custom": ({"scenario", "dims", "hamiltonian", "initial_state", "times"}, _OPTIONAL),
    "remark_family": ({"scenario", "levels"}, {"seed"}),
    "commuting_family": ({"scenario", "levels"}, {"seed"}),
}


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    times: np.ndarray = None
    levels: tuple = None
    space: BipartiteSpace = None
    decomposition: HamiltonianDecomposition = None
    initial_state: DensityMatrix = None
    fd_step: float = None
    threshold: float = THRESHOLD_FLOOR
    seed: int = None


def _complex_matrix(value, name):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a nested array of [re, im] pairs") from None
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(f"{name}: expected a square matrix of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _complex_vector(value, name):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected an array of [re, im] pairs") from None
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ConfigError(f"{name}: expected an array of [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def _number(doc, key, positive=True):
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        raise ConfigError(f"{key}: expected a finite number, got {value!r}")
    if positive and value <= 0:
        raise ConfigError(f"{key}: must be positive, got {value!r}")
    return float(value)


def _times(doc):
    spec = doc["times"]
    if not isinstance(spec, dict) or set(spec) != {"start", "stop", "steps"}:
        raise ConfigError("times: expected an object with exactly start, stop, steps")
    start = _number(spec, "start", positive=False)
    stop = _number(spec, "stop", positive=False)
    steps = spec["steps"]
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
        raise ConfigError(f"times.steps: expected an integer >= 2, got {steps!r}")
    if not start < stop:
        raise ConfigError(f"times: start {start} must be below stop {stop}")
    return np.linspace(start, stop, steps)


def _levels(value):
    if (not isinstance(value, list) or not value
            or any(isinstance(n, bool) or not isinstance(n, int) or n < 1 for n in value)):
        raise ConfigError("levels: expected a non-empty list of positive integers")
    if any(b <= a for a, b in zip(value, value[1:])):
        raise ConfigError("levels: must be strictly increasing")
    return tuple(value)


def parse_config(doc):
    """Validate a decoded JSON document into a :class:`ScenarioConfig`.

    Raises :class:`ConfigError` with the offending field named.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    scenario = doc.get("scenario")
    if scenario not in _FIELDS:
        raise ConfigError(f"scenario: expected one of {sorted(_FIELDS)}, got {scenario!r}")
    required, optional = _FIELDS[scenario]
    missing = required - set(doc)
    if missing:
        raise ConfigError(f"{scenario}: missing field(s) {sorted(missing)}")
    extra = set(doc) - required - optional
    if extra:
        raise ConfigError(f"{scenario}: unexpected field(s) {sorted(extra)}")

    seed = doc.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ConfigError(f"seed: expected an integer, got {seed!r}")
    if scenario in TRUNCATION_SCENARIOS:
        return ScenarioConfig(scenario, levels=_levels(doc["levels"]), seed=seed)

    kwargs = {"times": _times(doc), "seed": seed}
    if "fd_step" in doc:
        kwargs["fd_step"] = _number(doc, "fd_step")
    if "threshold" in doc:
        kwargs["threshold"] = _number(doc, "threshold")

    try:
        if scenario == "two_qubit_ising":
            rho0, h, space, _ = two_qubit_ising()
            decomp = decompose_hamiltonian(h, space)
        else:
            dims = doc["dims"]
            if (not isinstance(dims, list) or len(dims) != 2
                    or any(isinstance(d, bool) or not isinstance(d, int) or d < 1 for d in dims)):
                raise ConfigError(f"dims: expected [d_S, d_E] positive integers, got {dims!r}")
            space = BipartiteSpace(*dims)
            decomp = _hamiltonian(doc["hamiltonian"], space)
            rho0 = _initial_state(doc["initial_state"], space)
    except ConfigError:
        raise
    except PurityWitnessError as exc:
        raise ConfigError(f"{scenario}: {exc}") from exc
    return ScenarioConfig(scenario, space=space, decomposition=decomp, initial_state=rho0, **kwargs)


def _hamiltonian(value, space):
    if isinstance(value, dict):
        if set(value) != {"h_s", "h_e", "h_int"}:
            raise ConfigError("hamiltonian: decomposition needs exactly h_s, h_e, h_int")
        h_s = _complex_matrix(value["h_s"], "hamiltonian.h_s")
        h_e = _complex_matrix(value["h_e"], "hamiltonian.h_e")
        h_int = _complex_matrix(value["h_int"], "hamiltonian.h_int")
        if h_s.shape[0] != space.dim_s or h_e.shape[0] != space.dim_e:
            raise ConfigError("hamiltonian: local part dimensions do not match dims")
        if h_int.shape[0] != space.dim:
            raise ConfigError("hamiltonian.h_int: dimension does not match dims")
        return HamiltonianDecomposition.from_parts(h_s, h_e, h_int)
    h = _complex_matrix(value, "hamiltonian")
    if h.shape[0] != space.dim:
        raise ConfigError(f"hamiltonian: dimension {h.shape[0]} does not match dims product {space.dim}")
    return decompose_hamiltonian(HermitianMatrix(h), space)


def _initial_state(value, space):
    if isinstance(value, dict):
        if set(value) != {"pure"}:
            raise ConfigError("initial_state: object form must be {\"pure\": vector}")
        rho = from_pure(_complex_vector(value["pure"], "initial_state.pure"))
    else:
        rho = DensityMatrix(_complex_matrix(value, "initial_state"))
    if rho.dim != space.dim:
        raise ConfigError(f"initial_state: dimension {rho.dim} does not match dims product {space.dim}")
    return rho


def load_config(path):
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc)


def run_scenario(config):
    """Execute a trajectory or truncation scenario and return its table."""
    if isinstance(config, dict):
        config = parse_config(config)
    if config.scenario in TRUNCATION_SCENARIOS:
        return run_study(config.scenario, config.levels)

    traj = sample_trajectory(
        config.initial_state,
        config.decomposition,
        config.space,
        config.times,
        fd_step=config.fd_step,
        threshold=config.threshold,
    )
    rows = []
    h = config.decomposition.h_total
    m2 = moment(h, config.initial_state, 2)
    tol = BOUND_RTOL * max(1.0, float(np.sqrt(max(m2, 0.0))))
    for rec in traj.records:
        d = abs(rec.dpurity_analytic)
        if d > rec.bound_qe + tol or d > rec.bound_m2 + tol:
            raise InvariantViolation(
                f"t={rec.t!r}: |dP_S/dt|={d!r} exceeds bound_qe={rec.bound_qe!r} "
                f"or bound_m2={rec.bound_m2!r}"
            )
        rows.append([
            rec.t, rec.purity_s, rec.purity_e, rec.dpurity_analytic, rec.dpurity_fd,
            rec.entropy_s, rec.entropy_e, rec.mutual_info, rec.bound_qe, rec.bound_m2,
            rec.witness, int(rec.is_product),
        ])
    return ResultTable(TRAJECTORY_COLUMNS, rows)


def run_study(family, levels):
    """Truncation study table; the footer row holds the growth classifications."""
    report = truncation_study(family, levels)
    rows = [[n] + [report.values[c][i] for c in STUDY_COLUMNS[1:]] for i, n in enumerate(report.levels)]
    footer = None
    if report.growth:
        footer = ["classification"] + [str(report.growth[c]) for c in STUDY_COLUMNS[1:]]
    return ResultTable(STUDY_COLUMNS, rows, footer)


def run_suite(seed, count, dims, mode="general"):
    """Randomized campaign: one row per seeded instance plus a summary footer.

    Instance ``i`` uses seed ``seed + i``. ``theorem4_pass`` is 1 when the
    flatness implication holds on that row. The footer holds the largest
    ``|derivative|``, the largest excess of ``|derivative|`` over each bound
    (non-positive when every row satisfies it), the largest product defect
    and the smallest ``theorem4_pass``. Seeds of rows that break a bound
    beyond ``1e-9 * max(1, sqrt(m_2))`` or the flatness implication are
    listed in ``table.meta["failures"]``.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    space = BipartiteSpace(*dims)
    rows, results = [], []
    for i in range(count):
        s = seed + i
        rho, h = random_instance(s, space, mode)
        res = evaluate_instance(rho, h, space)
        results.append(res)
        rows.append([
            s, res.derivative, res.bound_qe, res.bound_m2, res.intermediate_bound,
            res.product_defect, int(res.theorem4_pass),
        ])
    viol = [r.violations() for r in results]
    footer = [
        "summary",
        max(abs(r.derivative) for r in results),
        max(v["bound_qe"] for v in viol),
        max(v["bound_m2"] for v in viol),
        max(v["intermediate_bound"] for v in viol),
        max(r.product_defect for r in results),
        min(int(r.theorem4_pass) for r in results),
    ]
    failures = [row[0] for row, r in zip(rows, results) if not r.ok()]
    return ResultTable(SUITE_COLUMNS, rows, footer, meta={"failures": failures})


def _levels_arg(text):
    try:
        levels = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must be comma-separated integers: {text!r}") from None
    if not levels:
        raise argparse.ArgumentTypeError("at least one level is required")
    return levels


def build_parser():
    parser = argparse.ArgumentParser(
        prog="purity-witness",
        description="Reduced-purity dynamics, bounds and correlation witness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a scenario from a JSON config")
    p.add_argument("config")
    p.add_argument("--out", required=True)

    p = sub.add_parser("suite", help="randomized bound / flatness campaign")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--dims", type=int, nargs=2, required=True, metavar=("DS", "DE"))
    p.add_argument("--mode", choices=MODES, default="general")
    p.add_argument("--out", required=True)

    p = sub.add_parser("study", help="truncation-family convergence study")
    p.add_argument("family", choices=sorted(FAMILIES))
    p.add_argument("--levels", type=_levels_arg, required=True)
    p.add_argument("--out", required=True)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command == "run":
            table = run_scenario(load_config(args.config))
        elif args.command == "suite":
            if args.count < 1 or min(args.dims) < 1:
                raise ConfigError("count and dims must be positive")
            table = run_suite(args.seed, args.count, args.dims, args.mode)
            bad = table.meta["failures"]
            if bad:
                raise InvariantViolation(f"{len(bad)} instance(s) violate a bound, first seed {bad[0]}")
        else:
            if any(b <= a for a, b in zip(args.levels, args.levels[1:])) or min(args.levels) < 1:
                raise ConfigError("levels must be positive and strictly increasing")
            table = run_study(args.family, args.levels)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (NumericalError, PurityWitnessError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    table.write(args.out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
