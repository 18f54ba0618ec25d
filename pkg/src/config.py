"""
配置管理模块
环境变量配置（Config）与单次运行配置（RunConfig）
"""

import os
from dataclasses import dataclass
from typing import Any, Optional, Tuple

from dotenv import load_dotenv

from .utils.ranges import HSpec, parse_h_spec, parse_int, parse_range


COMMANDS = ("bound", "table", "verify-homology", "verify-lemma8", "verify-identity", "replay")
FORMATS = ("text", "csv", "json")
CSV_COMMANDS = ("bound", "table")


class UsageError(ValueError):
    """命令行参数错误，flag 为出错的参数"""

    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag
        self.message = message


class Config:
    """配置类"""

    def __init__(self):
        # 先加载 .env，已存在的环境变量优先
        load_dotenv()

        # 日志配置
        self.LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")

        # 输出配置
        self.DECIMAL_PRECISION = self._get_env_int("DECIMAL_PRECISION", 8, minimum=1)

        # 并行扫描的进程数，1 表示顺序执行
        self.WORKERS = self._get_env_int("WORKERS", 1, minimum=1)

        # 共轭证书的暴力对照
        self.ORACLE_MAX_N = self._get_env_int("ORACLE_MAX_N", 6, minimum=0)
        self.ORACLE_MAX_STATES = self._get_env_int("ORACLE_MAX_STATES", 200_000, minimum=1)

        # 省略参数时的默认扫描范围
        self.HOMOLOGY_MAX_GENUS = self._get_env_int("HOMOLOGY_MAX_GENUS", 8, minimum=1)
        self.IDENTITY_MAX_GENUS = self._get_env_int("IDENTITY_MAX_GENUS", 300, minimum=2)
        self.LEMMA8_MAX_N = self._get_env_int("LEMMA8_MAX_N", 12, minimum=1)

    def _get_env_int(self, key: str, default: int, minimum: Optional[int] = None) -> int:
        """获取整数环境变量"""
        raw = os.getenv(key)
        if raw is None or raw.strip() == "":
            return default

        value = parse_int(raw)
        if value is None:
            raise ValueError(f"Environment variable {key} must be an integer, got {raw!r}")
        if minimum is not None and value < minimum:
            raise ValueError(f"Environment variable {key} must be >= {minimum}, got {value}")
        return value


@dataclass(frozen=True)
class RunConfig:
    """一次命令行调用"""
    command: str
    g_range: Optional[Tuple[int, int]] = None
    h_spec: Optional[HSpec] = None
    n_range: Optional[Tuple[int, int]] = None
    output_format: str = "text"
    decimal_precision: int = 8
    out: Optional[str] = None

    @classmethod
    def from_args(cls, args: Any, config: Config) -> "RunConfig":
        """从 argparse 结果构造并校验，任何计算之前完成"""
        command = args.command
        if command not in COMMANDS:
            raise UsageError("command", f"unknown command {command!r}")

        output_format = args.format or "text"
        if output_format not in FORMATS:
            raise UsageError("--format", f"expected one of {', '.join(FORMATS)}, got {output_format!r}")
        if output_format == "csv" and command not in CSV_COMMANDS:
            raise UsageError("--format", f"csv output is only available for {', '.join(CSV_COMMANDS)}")

        precision = config.DECIMAL_PRECISION if args.precision is None else args.precision
        if precision < 1:
            raise UsageError("--precision", f"must be a positive integer, got {precision}")

        g_text = getattr(args, "g", None)
        h_text = getattr(args, "h", None)
        n_text = getattr(args, "n", None)

        g_range = h_spec = n_range = None
        if command == "bound":
            g = cls._single(g_text, "--g")
            h = cls._single(h_text, "--h")
            if g < 2:
                raise UsageError("--g", f"genus must be >= 2, got {g}")
            if not 0 <= h <= g:
                raise UsageError("--h", f"h out of range 0..{g}, got {h}")
            g_range, h_spec = (g, g), [h]
            cls._reject(n_text, "--n", command)

        elif command == "table":
            g_range = cls._range(g_text, "--g", minimum=2)
            h_spec = cls._h_spec(h_text or "all")
            if h_spec != "all" and any(h < 0 for h in h_spec):
                raise UsageError("--h", "h must be non-negative")
            if h_spec != "all" and min(h_spec) > g_range[1]:
                raise UsageError("--h", f"table {g_range[0]}..{g_range[1]} is empty for h={min(h_spec)}")
            cls._reject(n_text, "--n", command)

        elif command == "replay":
            g_range = cls._range(g_text, "--g", minimum=2)
            h_spec = cls._h_spec(h_text)
            if h_spec != "all":
                for g in range(g_range[0], g_range[1] + 1):
                    bad = [h for h in h_spec if not 1 <= h <= g // 2]
                    if bad:
                        raise UsageError("--h", f"h out of range 1..{g // 2} for genus {g}: {bad[0]}")
            cls._reject(n_text, "--n", command)

        elif command == "verify-homology":
            g_range = cls._range(g_text or f"2..{config.HOMOLOGY_MAX_GENUS}", "--g", minimum=1)
            cls._reject(h_text, "--h", command)
            cls._reject(n_text, "--n", command)

        elif command == "verify-identity":
            g_range = cls._range(g_text or f"2..{config.IDENTITY_MAX_GENUS}", "--g", minimum=2)
            cls._reject(h_text, "--h", command)
            cls._reject(n_text, "--n", command)

        elif command == "verify-lemma8":
            n_range = cls._range(n_text or f"1..{config.LEMMA8_MAX_N}", "--n", minimum=1)
            cls._reject(g_text, "--g", command)
            cls._reject(h_text, "--h", command)

        return cls(
            command=command,
            g_range=g_range,
            h_spec=h_spec,
            n_range=n_range,
            output_format=output_format,
            decimal_precision=precision,
            out=cls._out_path(args.out),
        )

    @staticmethod
    def _single(text: Optional[str], flag: str) -> int:
        if text is None:
            raise UsageError(flag, "is required")
        value = parse_int(text)
        if value is None:
            raise UsageError(flag, f"expected an integer, got {text!r}")
        return value

    @staticmethod
    def _range(text: Optional[str], flag: str, minimum: int) -> Tuple[int, int]:
        if text is None:
            raise UsageError(flag, "is required")
        bounds = parse_range(text)
        if bounds is None:
            raise UsageError(flag, f"expected an integer or a non-empty range a..b, got {text!r}")
        if bounds[0] < minimum:
            raise UsageError(flag, f"values must be >= {minimum}, got {bounds[0]}")
        return bounds

    @staticmethod
    def _h_spec(text: Optional[str]) -> HSpec:
        if text is None:
            raise UsageError("--h", "is required")
        h_spec = parse_h_spec(text)
        if h_spec is None:
            raise UsageError("--h", f"expected an integer, a list, a range or 'all', got {text!r}")
        return h_spec

    @staticmethod
    def _out_path(path: Optional[str]) -> Optional[str]:
        if path is None:
            return None
        if os.path.isdir(path):
            raise UsageError("--out", f"{path!r} is a directory")
        directory = os.path.dirname(path) or "."
        if not os.path.isdir(directory):
            raise UsageError("--out", f"directory {directory!r} does not exist")
        if not os.access(directory, os.W_OK):
            raise UsageError("--out", f"directory {directory!r} is not writable")
        return path

    @staticmethod
    def _reject(text: Optional[str], flag: str, command: str):
        if text is not None:
            raise UsageError(flag, f"not accepted by {command}")
