"""
실험 실행 서비스 (Experiment Runner)
검증된 RunConfig를 명령별 계산으로 보내고 CSV 표와 provenance.json을 기록
"""
import logging
import shutil
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from app.config.settings import EtwistSettings, get_settings
from app.models.physics_models import GaussianPacketSpec, SpinState
from app.models.request import Command, RunConfig
from app.models.response import ColumnSpec, Provenance, ResultTable
from app.services.beam_service import (
    analytic_cdf, divergence_profile, gaussian_k_axes, gaussian_packet, sample_divergence,
)
from app.services.coupling_service import coupling_constant, full_twist_voltage, twister_amplitude
from app.services.oam_analysis import envelope_contrast, oam_vs_depth
from app.services.scattering_engine import reflection_scan
from app.services.transverse_engine import envelope_centroid, fig3_surfaces, synthesize_real_space
from app.shared.constants import DEGREE, OUTPUT_FORMAT_VERSION, SYSTEM_VERSION
from app.utils.csv_writer import write_plot_script, write_provenance, write_table
from app.utils.time_tracker import TimeMetrics, TimeTracker
from app.utils.validators import ConfigValidator, config_hash

logger = logging.getLogger(__name__)

Tables = List[ResultTable]
Summary = Dict[str, float]


@dataclass
class RunResult:
    """명령 실행 결과"""
    command: str
    out_dir: Path
    files: List[Path] = field(default_factory=list)
    summary: Summary = field(default_factory=dict)
    metrics: Optional[TimeMetrics] = None


def _col(name: str, unit: str = "1") -> ColumnSpec:
    return ColumnSpec(name=name, unit=unit)


class ExperimentRunner:
    """명령 하나를 실행하고 결과 파일을 관리하는 클래스"""

    def __init__(
        self,
        config: RunConfig,
        out_dir: Path,
        plot_script: bool = False,
        settings: Optional[EtwistSettings] = None,
    ):
        self.config = config
        self.out_dir = Path(out_dir)
        self.plot_script = plot_script
        self.settings = settings or get_settings()
        self._written: List[Path] = []
        self._handlers: Dict[Command, Callable[[TimeTracker], Tuple[Tables, Summary]]] = {
            Command.FIGURE1: self._figure1,
            Command.FIGURE2: self._figure2,
            Command.FIGURE3: self._figure3,
            Command.FIGURE4: self._figure4,
            Command.VOLTAGE: self._voltage,
            Command.DESIGN: self._design,
            Command.SWEEP: self._sweep,
        }

    def run(self) -> RunResult:
        """
        명령 실행

        실패하면 이번 실행이 쓴 파일을 지우고 예외를 다시 던진다.
        """
        command = self.config.command
        tracker = TimeTracker(command.value).start()
        created_dir = not self.out_dir.exists()
        digest = config_hash(self.config)
        logger.info(f"🚀 {command.value} 실행 시작: 출력 {self.out_dir}, config_hash={digest[:12]}")

        try:
            tables, summary = self._handlers[command](tracker)
            for table in tables:
                self._written.append(write_table(table, self.out_dir, digest))
                if self.plot_script:
                    self._written.append(write_plot_script(table, self.out_dir))
            tracker.step("write")
            metrics = tracker.finish()
            provenance = Provenance(
                command=command.value,
                config_hash=digest,
                code_version=SYSTEM_VERSION,
                output_format=OUTPUT_FORMAT_VERSION,
                rng_seed=self.config.rng_seed,
                timestamp=datetime.now(timezone.utc),
                files=[path.relative_to(self.out_dir).as_posix() for path in self._written],
                summary=summary,
                step_times_ms=metrics.step_times,
            )
            self._written.append(write_provenance(provenance, self.out_dir))
        except Exception:
            self._cleanup(created_dir)
            raise

        return RunResult(
            command=command.value, out_dir=self.out_dir, files=list(self._written), summary=summary, metrics=metrics
        )

    def _cleanup(self, created_dir: bool) -> None:
        if created_dir and self.out_dir.exists():
            shutil.rmtree(self.out_dir, ignore_errors=True)
        else:
            for path in self._written:
                if path.is_dir():
                    shutil.rmtree(path, ignore_errors=True)
                elif path.exists():
                    path.unlink()
        logger.warning(f"⚠️  실패한 실행의 부분 결과 삭제: {self.out_dir}")

    # === 명령별 계산 ===

    def _figure1(self, tracker: TimeTracker) -> Tuple[Tables, Summary]:
        params = self.config.figure1
        z = np.linspace(0.0, params.z_max, params.z_points)
        tables, summary = [], {}
        geometries = params.geometries()
        profiles = [divergence_profile(g, panels=params.radial_panels, order=params.radial_order) for g in geometries]
        tracker.step("profiles")

        for geom, profile in zip(geometries, profiles):
            scan = oam_vs_depth(profile, params.C, params.k_z, z, n_phi=params.n_phi)
            name = geom.kind.value
            tables.append(ResultTable.from_columns(
                f"figure1_{name}",
                [_col("z"), _col("A1_flipped"), _col("A0_unconverted"), _col("total")],
                scan.z, scan.flipped, scan.unconverted, scan.total,
            ))
            summary[f"contrast_{name}"] = envelope_contrast(scan.flipped, params.tail_fraction)
            summary[f"max_flipped_{name}"] = float(np.max(scan.flipped))
            logger.info(f"📊 {name}: 후반부 대비 {summary[f'contrast_{name}']:.4f}")
        tracker.step("depth_scan")

        if params.monte_carlo_rays > 0:
            rows = []
            for index, (geom, profile) in enumerate(zip(geometries, profiles)):
                samples = sample_divergence(
                    geom, params.monte_carlo_rays, seed=self.config.rng_seed,
                    max_workers=self.settings.sweep_workers,
                )
                ks = _ks_statistic(samples, lambda k, g=geom: analytic_cdf(g, k))
                rows.append([index, float(np.mean(samples)), profile.mean_k, ks])
                summary[f"ks_{geom.kind.value}"] = ks
            tables.append(ResultTable(
                name="figure1_monte_carlo",
                columns=[_col("profile", "index"), _col("mean_k_sampled"), _col("mean_k_quadrature"), _col("ks")],
                rows=rows,
            ))
            tracker.step("monte_carlo")
        return tables, summary

    def _figure2(self, tracker: TimeTracker) -> Tuple[Tables, Summary]:
        params = self.config.figure2
        thetas = np.linspace(params.theta_min, params.theta_max, params.theta_points)
        scan = reflection_scan(thetas, params.wavelength, params.E, params.incident_spin, ctx=self.config.physics)
        tracker.step("reflection_scan")
        table = ResultTable.from_columns(
            "figure2",
            [_col("theta", "deg"), _col("P_flip"), _col("P_nonflip")],
            scan.theta / DEGREE, scan.p_flip, scan.p_nonflip,
        )
        summary = {
            "peak_angle_deg": scan.peak_angle / DEGREE,
            "critical_angle_deg": scan.critical / DEGREE,
            "peak_p_flip": float(np.max(scan.p_flip)),
        }
        return [table], summary

    def _figure3(self, tracker: TimeTracker) -> Tuple[Tables, Summary]:
        params = self.config.figure3
        surfaces = fig3_surfaces(
            params.sigma_y, params.R, k_y_mean=params.k_y_mean, n_phi=params.n_phi,
            panels=params.radial_panels, order=params.radial_order,
            exact=params.exact, C=params.C, t=params.t,
        )
        tracker.step("oam_surfaces")
        S, R = np.meshgrid(surfaces.sigma_y, surfaces.R, indexing="ij")
        table = ResultTable.from_columns(
            "figure3",
            [_col("sigma_y"), _col("R"), _col("A1"), _col("log_sigma_ell")],
            S, R, surfaces.A1, surfaces.log_sigma_ell,
        )
        return [table], {"max_A1": float(np.max(surfaces.A1)), "min_sigma_ell": float(np.min(surfaces.sigma_ell))}

    def _figure4(self, tracker: TimeTracker) -> Tuple[Tables, Summary]:
        params = self.config.figure4
        spec = GaussianPacketSpec(k_y_mean=params.k_y_mean, sigma_y=float(np.sqrt(params.sigma_y_squared)), R=params.R)
        kx, ky = gaussian_k_axes(spec, params.k_points)
        packet = gaussian_packet(spec, kx, ky, spin=params.spin)
        axis = np.linspace(-params.x_extent, params.x_extent, params.x_points)
        tracker.step("packet")

        tables, summary = [], {}
        for name, raised in (("unraised", False), ("raised", True)):
            field_ = synthesize_real_space(packet, axis, axis, raised=raised)
            psi = field_.psi_plus if params.spin == SpinState.UP else field_.psi_minus
            X, Y = np.meshgrid(field_.axis0, field_.axis1, indexing="ij")
            tables.append(ResultTable.from_columns(
                f"figure4_{name}",
                [_col("x"), _col("y"), _col("re_psi"), _col("im_psi")],
                X, Y, psi.real, psi.imag,
            ))
            cx, cy = envelope_centroid(field_)
            summary[f"centroid_x_{name}"] = cx
            summary[f"centroid_y_{name}"] = cy
        tracker.step("synthesis")
        return tables, summary

    def _voltage(self, tracker: TimeTracker) -> Tuple[Tables, Summary]:
        alpha = self.config.voltage.alpha
        voltage = full_twist_voltage(self.config.physics, alpha)
        tracker.step("voltage")
        logger.info(f"⚡ alpha={alpha / DEGREE:.6g}° → 완전 트위스트 전압 {voltage:.6e} V")
        table = ResultTable.from_columns(
            "voltage",
            [_col("alpha", "rad"), _col("alpha_deg", "deg"), _col("voltage", "V")],
            [alpha], [alpha / DEGREE], [voltage],
        )
        return [table], {"voltage_V": voltage}

    def _design(self, tracker: TimeTracker) -> Tuple[Tables, Summary]:
        rows = []
        for E, L in self.config.design.plan():
            C = coupling_constant(self.config.physics, E).value
            rows.append([E, L, C, twister_amplitude(self.config.physics, E, L)])
        tracker.step("design")
        table = ResultTable(
            name="design",
            columns=[_col("E", "V/m"), _col("L", "m"), _col("C", "1/m"), _col("amplitude")],
            rows=rows,
        )
        amplitudes = table.rows[:, 3]
        return [table], {"min_amplitude": float(np.min(amplitudes)), "max_amplitude": float(np.max(amplitudes))}

    def _sweep(self, tracker: TimeTracker) -> Tuple[Tables, Summary]:
        validator = ConfigValidator()
        points = validator.expand_sweep(self.config)
        point_dirs = [self.out_dir / f"point_{index:03d}" for index in range(len(points))]
        self._written.extend(point_dirs)
        tracker.step("plan")

        def _run_point(item):
            point_dir, (_, point_config) = item
            return ExperimentRunner(point_config, point_dir, self.plot_script, self.settings).run()

        workers = min(self.settings.sweep_workers, len(points))
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(_run_point, zip(point_dirs, points)))
        tracker.step("points")

        target = self.config.sweep.target.value
        columns = [_col("point", "index")]
        data = [np.arange(len(points), dtype=float)]
        for key in sorted(self.config.sweep.axes):
            values = self.config.sweep.axes[key]
            numeric = all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values)
            qualified = validator.qualify_key(key, target)
            columns.append(_col(qualified, "1" if numeric else "index"))
            column = [
                overrides[qualified] if numeric else values.index(overrides[qualified])
                for overrides, _ in points
            ]
            data.append(np.asarray(column, dtype=float))
        table = ResultTable.from_columns("sweep_index", columns, *data)

        logger.info(f"✅ 스윕 완료: {len(results)}개 점")
        return [table], {"points": float(len(results))}


def _ks_statistic(samples: np.ndarray, cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """경험 누적분포와 해석적 누적분포의 최대 차"""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    F = cdf(x)
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(0, n) / n
    return float(max(np.max(upper), np.max(lower)))


def run(config: RunConfig, out_dir: Path, plot_script: bool = False) -> RunResult:
    """RunConfig 하나를 out_dir에 실행"""
    return ExperimentRunner(config, out_dir, plot_script=plot_script).run()
