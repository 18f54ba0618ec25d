"""
处理器管理器
把一次 RunConfig 分派给各服务，并渲染为 text / csv / json
"""

import asyncio
import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Sequence, Tuple

from loguru import logger

from ..config import Config, RunConfig, UsageError
from ..services import homology_rep, proof_replay, scl_bounds, trace_words
from ..utils.formatting import rational_to_dict, render_approx, render_decimal, render_rational
from ..utils.ranges import expand_h


CSV_COLUMNS = [
    "g", "h", "k", "r",
    "bound_num", "bound_den", "bound_decimal",
    "lower_num", "lower_den",
    "nonsep_num", "nonsep_den",
]


class HandlerManager:
    """处理器管理器"""

    def __init__(self, config: Config):
        self.config = config

    def run(self, run_config: RunConfig) -> Tuple[int, str]:
        """执行命令，返回 (退出码, 输出文本)

        0 表示成功且全部检查通过，1 表示有检查未通过
        """
        handlers = {
            "bound": self.bound_command,
            "table": self.table_command,
            "verify-homology": self.verify_homology_command,
            "verify-lemma8": self.verify_lemma8_command,
            "verify-identity": self.verify_identity_command,
            "replay": self.replay_command,
        }
        logger.info(f"执行命令: {run_config.command}")
        passed, output = handlers[run_config.command](run_config)
        if not output.endswith("\n"):
            output += "\n"
        return (0 if passed else 1), output

    def _map_cells(self, func: Callable, cells: Sequence[Tuple]) -> List[Any]:
        """逐格计算；WORKERS > 1 时交给进程池，结果按提交顺序返回"""
        if self.config.WORKERS <= 1 or len(cells) <= 1:
            return [func(*cell) for cell in cells]

        async def gather_cells():
            loop = asyncio.get_running_loop()
            with ProcessPoolExecutor(max_workers=self.config.WORKERS) as executor:
                tasks = [loop.run_in_executor(executor, func, *cell) for cell in cells]
                return await asyncio.gather(*tasks)

        logger.debug(f"使用 {self.config.WORKERS} 个进程并行计算 {len(cells)} 个单元")
        return list(asyncio.run(gather_cells()))

    # ---- bound / table ----

    def bound_command(self, run_config: RunConfig) -> Tuple[bool, str]:
        g = run_config.g_range[0]
        h = run_config.h_spec[0]
        result = scl_bounds.bound(g, h)
        precision = run_config.decimal_precision

        if run_config.output_format == "json":
            data = result.to_dict()
            data["decimal"] = render_decimal(result.value, precision)
            return True, _dump_json(data)
        if run_config.output_format == "csv":
            rows = scl_bounds.table_rows_for_genus(g, [h], precision)
            return True, _rows_to_csv(rows)

        lines = [render_approx(result.value, precision)]
        lines.extend(f"note: {note}" for note in result.notes)
        return True, "\n".join(lines)

    def table_command(self, run_config: RunConfig) -> Tuple[bool, str]:
        g_min, g_max = run_config.g_range
        precision = run_config.decimal_precision
        cells = []
        for g in range(g_min, g_max + 1):
            hs = [h for h in expand_h(run_config.h_spec, g) if 0 <= h <= g]
            if hs:
                cells.append((g, hs, precision))
        if not cells:
            raise UsageError("--h", f"table {g_min}..{g_max} is empty for the requested h")

        rows = [row for chunk in self._map_cells(scl_bounds.table_rows_for_genus, cells) for row in chunk]
        rows.sort(key=lambda row: (row.g, row.h))

        if run_config.output_format == "csv":
            return True, _rows_to_csv(rows)
        if run_config.output_format == "json":
            return True, _dump_json([_row_to_dict(row) for row in rows])
        return True, _rows_to_text(rows)

    # ---- verify-* ----

    def verify_homology_command(self, run_config: RunConfig) -> Tuple[bool, str]:
        g_min, g_max = run_config.g_range
        suites = self._map_cells(homology_rep.verification_suite, [(g,) for g in range(g_min, g_max + 1)])
        passed = all(check.passed for suite in suites for check in suite)

        if run_config.output_format == "json":
            data = {
                "label": homology_rep.VERIFICATION_LABEL,
                "genera": [
                    {"g": g, "checks": [check.to_dict() for check in suite]}
                    for g, suite in zip(range(g_min, g_max + 1), suites)
                ],
                "passed": passed,
            }
            return passed, _dump_json(data)

        lines = [homology_rep.VERIFICATION_LABEL + " (necessary conditions only)"]
        for g, suite in zip(range(g_min, g_max + 1), suites):
            ok = sum(1 for check in suite if check.passed)
            lines.append(f"g={g}: {ok}/{len(suite)} checks passed")
            for check in suite:
                if not check.passed:
                    params = ", ".join(f"{key}={value}" for key, value in check.params.items())
                    lines.append(f"  FAIL {check.name}({params}) residual={check.residual}")
        lines.append("all checks passed" if passed else "SOME CHECKS FAILED")
        return passed, "\n".join(lines)

    def verify_lemma8_command(self, run_config: RunConfig) -> Tuple[bool, str]:
        n_min, n_max = run_config.n_range
        cells = [(n, self.config.ORACLE_MAX_N, self.config.ORACLE_MAX_STATES) for n in range(n_min, n_max + 1)]
        certificates = self._map_cells(trace_words.lemma8_verify, cells)
        passed = all(certificate.valid for certificate in certificates)

        if run_config.output_format == "json":
            return passed, _dump_json([certificate.to_dict() for certificate in certificates])
        if len(certificates) == 1:
            return passed, certificates[0].render_text()
        lines = [certificate.summary() for certificate in certificates]
        lines.append(f"{sum(1 for c in certificates if c.valid)}/{len(certificates)} certificates valid")
        return passed, "\n".join(lines)

    def verify_identity_command(self, run_config: RunConfig) -> Tuple[bool, str]:
        g_min, g_max = run_config.g_range
        checks = scl_bounds.identity_sweep(g_min, g_max)
        passed = all(check.passed for check in checks)

        if run_config.output_format == "json":
            return passed, _dump_json({"g_min": g_min, "g_max": g_max,
                                       "checks": [check.to_dict() for check in checks],
                                       "passed": passed})
        lines = [f"exact sweep g={g_min}..{g_max}"]
        for check in checks:
            line = f"  [{'pass' if check.passed else 'FAIL'}] {check.name} ({check.checked} cases)"
            if check.detail:
                line += f": {check.detail}"
            lines.append(line)
        return passed, "\n".join(lines)

    # ---- replay ----

    def replay_command(self, run_config: RunConfig) -> Tuple[bool, str]:
        g_min, g_max = run_config.g_range
        cells = [
            (g, h, self.config.ORACLE_MAX_N, self.config.HOMOLOGY_MAX_GENUS)
            for g in range(g_min, g_max + 1)
            for h in expand_h(run_config.h_spec, g, replay=True)
        ]
        reports = self._map_cells(proof_replay.replay_report, cells)
        reports.sort(key=lambda report: (report.g, report.h))
        passed = all(report.passed for report in reports)

        if run_config.output_format == "json":
            if len(reports) == 1:
                return passed, _dump_json(reports[0].to_dict())
            return passed, _dump_json([report.to_dict() for report in reports])
        text = "\n\n".join(report.render_text() for report in reports)
        if len(reports) > 1:
            text += f"\n\n{sum(1 for r in reports if r.passed)}/{len(reports)} replays passed"
        return passed, text


def _dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False)


def _row_to_dict(row: scl_bounds.BoundRow) -> Dict[str, Any]:
    return {
        "g": row.g,
        "h": row.h,
        "k": row.k,
        "r": row.r,
        "bound": rational_to_dict(row.bound),
        "bound_decimal": row.decimal,
        "lower_ref": rational_to_dict(row.lower_ref),
        "nonsep_ref": rational_to_dict(row.nonsep_ref),
        "via_symmetry": row.via_symmetry,
    }


def _rows_to_csv(rows: List[scl_bounds.BoundRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([
            row.g, row.h,
            "" if row.k is None else row.k,
            "" if row.r is None else row.r,
            row.bound.numerator, row.bound.denominator, row.decimal,
            row.lower_ref.numerator, row.lower_ref.denominator,
            row.nonsep_ref.numerator, row.nonsep_ref.denominator,
        ])
    return buffer.getvalue()


def _rows_to_text(rows: List[scl_bounds.BoundRow]) -> str:
    header = f"{'g':>4} {'h':>4} {'k':>4} {'r':>4}  {'bound':<24} {'decimal':<14} {'1/(18g+6)':<12} {'nonsep':<12}"
    lines = [header]
    for row in rows:
        k = "-" if row.k is None else str(row.k)
        r = "-" if row.r is None else str(row.r)
        bound = render_rational(row.bound) + (" *" if row.via_symmetry else "")
        lines.append(
            f"{row.g:>4} {row.h:>4} {k:>4} {r:>4}  {bound:<24} {row.decimal:<14} "
            f"{render_rational(row.lower_ref):<12} {render_rational(row.nonsep_ref):<12}"
        )
    if any(row.via_symmetry for row in rows):
        lines.append("* via symmetry B(g,h) = B(g,g-h)")
    return "\n".join(lines)
