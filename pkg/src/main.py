#!/usr/bin/env python3
"""
scl-twist-bounds 主入口
分离 Dehn 扭转的稳定交换子长度上界与证明验证的命令行
"""

import argparse
import sys
from typing import List, Optional

import psutil
from loguru import logger

from . import __version__
from .config import COMMANDS, FORMATS, Config, RunConfig, UsageError
from .handlers import HandlerManager


def log_memory_usage():
    """记录当前内存使用（诊断用）"""
    try:
        process = psutil.Process()
        memory_mb = process.memory_info().rss / 1024 / 1024
        logger.debug(f"内存使用: {memory_mb:.1f}MB")
    except Exception as e:
        logger.warning(f"获取内存使用情况失败: {e}")


def build_parser() -> argparse.ArgumentParser:
    """构造命令行解析器"""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--g", help="genus: an integer or a range a..b")
    common.add_argument("--h", help="separating type: an integer, a list 1,2,3, a range a..b, or 'all'")
    common.add_argument("--n", help="number of trace-group generators: an integer or a range a..b")
    common.add_argument("--format", choices=FORMATS, help="output format (default: text)")
    common.add_argument("--precision", type=int,
                        help="decimal digits for rendering only; exact rationals are always printed "
                             "(default: DECIMAL_PRECISION or 8)")
    common.add_argument("--out", metavar="FILE", help="write data output to FILE instead of stdout")

    parser = argparse.ArgumentParser(
        prog="scl-twist-bounds",
        description="Exact upper bounds on scl of separating Dehn twists and "
                    "mechanical verification of the algebra behind them.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")
    descriptions = {
        "bound": "recursive upper bound B(g,h)",
        "table": "bound table over a genus range",
        "verify-homology": "homology-level relation checks",
        "verify-lemma8": "conjugation certificates in the trace group",
        "verify-identity": "exact sweep of the coefficient identity and the corollaries",
        "replay": "replay the block decomposition and quasi-morphism ledger",
    }
    for command in COMMANDS:
        subparsers.add_parser(command, parents=[common], help=descriptions[command])
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """主程序入口，返回退出码"""
    try:
        config = Config()
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    # 配置日志
    logger.remove()
    logger.add(
        sys.stderr,
        level=config.LOG_LEVEL,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
    )
    # 日志只输出到 stderr，数据输出保持确定

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    # 版本横幅只在 LOG_LEVEL=INFO 及以下可见
    logger.info(f"scl-twist-bounds {__version__} 启动")

    try:
        run_config = RunConfig.from_args(args, config)
    except UsageError as e:
        print(f"error: {e.flag}: {e.message}", file=sys.stderr)
        return 2

    try:
        status, output = HandlerManager(config).run(run_config)
    except UsageError as e:
        print(f"error: {e.flag}: {e.message}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        logger.info("收到停止信号，正在退出...")
        return 1
    except Exception as e:
        logger.error(f"命令执行失败: {type(e).__name__}: {e}")
        return 1

    if run_config.out:
        try:
            with open(run_config.out, 'w', encoding='utf-8', newline='') as f:
                f.write(output)
        except OSError as e:
            print(f"error: --out: {e}", file=sys.stderr)
            return 2
        logger.info(f"结果已写入 {run_config.out}")
    else:
        sys.stdout.write(output)

    log_memory_usage()
    return status


if __name__ == "__main__":
    sys.exit(main())
