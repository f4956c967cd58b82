"""Experiment configuration and the figure-reproduction runs.

Each run writes CSV files (with the resolved configuration embedded as
``#`` comment lines) and, unless disabled, a PNG rendering of the curves.
"""

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from . import io, plotting
from .channel import ChannelParams, generate_dataset
from .errors import InvalidParameterError
from .lrt import LrtDetector, evaluate_lrt
from .metrics import EMPIRICAL
from .nn import TrainConfig, incremental_training_runs
from .sampling import derive_seed, make_rng
from .scenario import PRESETS, Scenario, preset

log = logging.getLogger(__name__)

# NLoS std (ns) and BS preset for the test-proportion figures
PO_FIGURES = {
    "fig3": (300.0, "bs4"),
    "fig4": (500.0, "bs4"),
    "fig5": (500.0, "bs6"),
}


@dataclass
class ExperimentConfig:
    scenario: object = "bs4"
    thermal_noise_std_ns: float = 300.0
    nlos_std_ns: list = field(default_factory=lambda: [300.0, 500.0, 700.0])
    po_train: float = 0.5
    po_test: list = field(default_factory=lambda: [0.5, 0.1, 0.01, 0.0005])
    n_test: int = 10000
    max_seconds: int = 400
    seed: int = 1
    output_dir: str = "results"
    attacker_common_bias_std_ns: float = 0.0
    lrt_threshold: float = 1.0
    prior_mode: str = EMPIRICAL
    plots: bool = True
    jobs: int = 1
    train: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nlos_std_ns = [float(v) for v in _as_list(self.nlos_std_ns)]
        self.po_test = [float(v) for v in _as_list(self.po_test)]
        if self.n_test < 1 or self.max_seconds < 1 or self.jobs < 1:
            raise InvalidParameterError("n_test, max_seconds and jobs must be >= 1")
        if self.thermal_noise_std_ns <= 0:
            raise InvalidParameterError("thermal_noise_std_ns must be > 0")
        if any(v < 0 for v in self.nlos_std_ns) or self.attacker_common_bias_std_ns < 0:
            raise InvalidParameterError("standard deviations must be >= 0")
        if not all(0.0 <= p <= 1.0 for p in [self.po_train, *self.po_test]):
            raise InvalidParameterError("Po values must lie in [0, 1]")
        if self.prior_mode != EMPIRICAL and not 0.0 <= float(self.prior_mode) <= 1.0:
            raise InvalidParameterError("prior_mode must be 'empirical' or a probability")
        unknown = set(self.train) - {f.name for f in fields(TrainConfig)}
        if unknown:
            raise InvalidParameterError(f"unknown train options: {sorted(unknown)}")
        self.build_scenario()

    @classmethod
    def from_dict(cls, doc):
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        return asdict(self)

    def build_scenario(self, override=None):
        spec = override if override is not None else self.scenario
        if isinstance(spec, Scenario):
            return spec
        if isinstance(spec, str):
            if spec in PRESETS:
                return preset(spec)
            return Scenario.from_json(Path(spec).read_text())
        return Scenario.from_dict(spec)

    def train_config(self, seed):
        return TrainConfig(**{**self.train, "seed": seed})

    def channel(self, nlos):
        return ChannelParams(self.thermal_noise_std_ns, nlos, self.attacker_common_bias_std_ns)

    @property
    def prior(self):
        return EMPIRICAL if self.prior_mode == EMPIRICAL else float(self.prior_mode)


def _as_list(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


def po_tag(po):
    return f"po{po:g}"


def nlos_tag(nlos):
    return f"nlos{nlos:g}"


@dataclass
class CellResult:
    """One training schedule evaluated on one or more test sets."""

    figure: str
    nlos: float
    n_bs: int
    curves: dict  # po_test -> LearningCurve
    lrt: object  # MetricsReport on the Po=0.5 test set, or None
    undecidable: int = 0


@dataclass
class FigureResult:
    figure: str
    files: list
    cells: list

    def plateaus(self):
        """{(nlos, po): plateau Total Error} over all cells."""
        return {(c.nlos, po): curve.plateau() for c in self.cells for po, curve in c.curves.items()}


def _cell_seed(cfg, figure, *keys):
    return derive_seed(cfg.seed, figure, *[str(k) for k in keys])


def run_cell(cfg, figure, nlos, po_tests, scenario_spec=None, with_lrt=True):
    """Simulate one (figure, NLoS, layout) cell and train its learning curves.

    The training stream is drawn at ``cfg.po_train``; one independent test
    set is drawn per entry of ``po_tests``. The LRT reference is scored on
    the Po=0.5 test set, generating one if it is not among ``po_tests``.
    """
    scenario = cfg.build_scenario(scenario_spec)
    params = cfg.channel(nlos)
    cell = f"{nlos_tag(nlos)}/bs{scenario.n_bs}"
    stream = generate_dataset(
        scenario, params, cfg.max_seconds, cfg.po_train,
        rng=make_rng(_cell_seed(cfg, figure, cell, "train")),
    )
    tests = {
        po: generate_dataset(scenario, params, cfg.n_test, po,
                             rng=make_rng(_cell_seed(cfg, figure, cell, "test", po_tag(po))))
        for po in po_tests
    }
    log.info("%s %s: training %d incremental networks", figure, cell, cfg.max_seconds)
    curves = incremental_training_runs(
        stream, list(tests.values()), cfg.train_config(_cell_seed(cfg, figure, cell, "nn")),
        cfg.max_seconds, cfg.prior,
    )
    report, undecidable = None, 0
    if with_lrt:
        ref = tests.get(0.5)
        if ref is None:
            ref = generate_dataset(scenario, params, cfg.n_test, 0.5,
                                   rng=make_rng(_cell_seed(cfg, figure, cell, "test", po_tag(0.5))))
        det = LrtDetector(cfg.thermal_noise_std_ns, cfg.lrt_threshold)
        report, _, flags = evaluate_lrt(det, ref, scenario)
        undecidable = int(flags.sum())
    return CellResult(figure, nlos, scenario.n_bs, dict(zip(po_tests, curves)), report, undecidable)


def _run_cells(cfg, jobs):
    if cfg.jobs == 1 or len(jobs) == 1:
        return [run_cell(cfg, *job) for job in jobs]
    with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
        futures = [pool.submit(run_cell, cfg, *job) for job in jobs]
        return [f.result() for f in futures]


def _header(cfg, **extra):
    return {"config": cfg.to_dict(), **extra}


def _lrt_row(cfg, cell, po=0.5):
    return cell.lrt.csv_row("lrt", cell.n_bs, cfg.thermal_noise_std_ns, cell.nlos, po)


def _fig2_jobs(cfg):
    return [("fig2", nlos, [0.5]) for nlos in cfg.nlos_std_ns]


def _po_job(cfg, figure):
    try:
        nlos, layout = PO_FIGURES[figure]
    except KeyError:
        raise InvalidParameterError(f"unknown figure {figure!r}") from None
    return (figure, nlos, cfg.po_test, layout)


def run_fig2(cfg):
    """NN learning curves and LRT references for each NLoS level, Po = 0.5."""
    return _write_fig2(cfg, _run_cells(cfg, _fig2_jobs(cfg)))


def _write_fig2(cfg, cells):
    out = Path(cfg.output_dir)
    files = []
    for cell in cells:
        header = _header(cfg, figure="fig2", nlos_std_ns=cell.nlos, po_test=0.5)
        files.append(io.atomic_write(out / f"fig2_{nlos_tag(cell.nlos)}.csv",
                                     io.curve_csv(cell.curves[0.5], header)))
    rows = [_lrt_row(cfg, c) for c in cells]
    files.append(io.atomic_write(out / "fig2_lrt.csv", io.metrics_csv(rows, _header(cfg, figure="fig2"))))
    if cfg.plots:
        files.append(plotting.plot_nlos_curves(
            {c.nlos: c.curves[0.5] for c in cells},
            {c.nlos: c.lrt.total_error for c in cells},
            out / "fig2.png",
            title=f"{cells[0].n_bs} BSs, thermal std {cfg.thermal_noise_std_ns:g} ns, Po = 0.5",
        ))
    return FigureResult("fig2", files, cells)


def run_po_figure(cfg, figure):
    """NN curves across test-set Po values for one of ``fig3``/``fig4``/``fig5``."""
    (cell,) = _run_cells(cfg, [_po_job(cfg, figure)])
    return _write_po_figure(cfg, figure, cell)


def _write_po_figure(cfg, figure, cell):
    nlos, layout = PO_FIGURES[figure]
    out = Path(cfg.output_dir)
    files = []
    for po, curve in cell.curves.items():
        header = _header(cfg, figure=figure, nlos_std_ns=nlos, po_test=po, scenario_used=layout)
        files.append(io.atomic_write(out / f"{figure}_{po_tag(po)}.csv", io.curve_csv(curve, header)))
    files.append(io.atomic_write(
        out / f"{figure}_lrt.csv",
        io.metrics_csv([_lrt_row(cfg, cell)], _header(cfg, figure=figure, scenario_used=layout)),
    ))
    if cfg.plots:
        files.append(plotting.plot_po_curves(
            cell.curves, cell.lrt.total_error, out / f"{figure}.png",
            title=f"{cell.n_bs} BSs, NLoS std {nlos:g} ns, thermal std {cfg.thermal_noise_std_ns:g} ns",
        ))
    return FigureResult(figure, files, [cell])


def run_fig3_4_5(cfg):
    cells = _run_cells(cfg, [_po_job(cfg, fig) for fig in PO_FIGURES])
    return [_write_po_figure(cfg, fig, cell) for fig, cell in zip(PO_FIGURES, cells)]


def summary_rows(cfg, results):
    """Metrics rows for every LRT reference and every NN curve plateau."""
    rows = []
    for res in results:
        for cell in res.cells:
            rows.append(_lrt_row(cfg, cell))
            for po, curve in cell.curves.items():
                # plateau is a median over seconds, so alpha/beta have no single value
                rows.append(",".join([
                    f"nn_plateau_{res.figure}", str(cell.n_bs), f"{cfg.thermal_noise_std_ns:.6f}",
                    f"{cell.nlos:.6f}", f"{po:.6f}", "nan", "nan",
                    f"{curve.plateau():.6f}", str(cfg.n_test),
                ]))
    return rows


def run_all(cfg):
    fig2_jobs = _fig2_jobs(cfg)
    cells = _run_cells(cfg, fig2_jobs + [_po_job(cfg, fig) for fig in PO_FIGURES])
    k = len(fig2_jobs)
    results = [_write_fig2(cfg, cells[:k])]
    results += [_write_po_figure(cfg, fig, cell) for fig, cell in zip(PO_FIGURES, cells[k:])]
    path = io.atomic_write(Path(cfg.output_dir) / "summary.csv",
                           io.metrics_csv(summary_rows(cfg, results), _header(cfg, figure="all")))
    return results, path


def with_overrides(cfg, **overrides):
    """Copy of ``cfg`` with the non-None overrides applied."""
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})
