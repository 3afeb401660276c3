# -*- coding: utf-8 -*-

import argparse
import json
import logging
import sys

from core.errors import ConfigError, GeometryError, ScheduleError, SolverError
from core.load_data import MODES, RunConfig, config_to_dict, resolve_run_config
from core.runner import ProbeRunner

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# --- 退出码映射表 ---
# 按顺序匹配，第一个命中的异常类决定退出码；未列出的异常返回 1
EXIT_CODES = (
    (ConfigError, 2),
    (SolverError, 3),
    (ScheduleError, 4),
    (GeometryError, 5),
)


def exit_code_for(error: BaseException) -> int:
    for cls, code in EXIT_CODES:
        if isinstance(error, cls):
            return code
    return 1


def build_parser() -> argparse.ArgumentParser:
    epilog = "默认配置（config/settings.json 中未给出的键取这些值）：\n" + \
             json.dumps(config_to_dict(RunConfig()), indent=2, ensure_ascii=False)
    parser = argparse.ArgumentParser(
        description="探针法数值引擎：二维 Helmholtz 方程的障碍物重建与校验。",
        epilog=epilog,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    # 所有参数默认为 None，表示沿用环境变量 / 配置文件 / 默认值
    parser.add_argument("--config", default=None, help="配置文件路径（环境变量 PROBE_CONFIG，默认 config/settings.json）")
    parser.add_argument("--out", default=None, help="输出目录（PROBE_OUT）")
    parser.add_argument("--threads", type=int, default=None, help="工作线程数（PROBE_THREADS）")
    parser.add_argument("--seed", type=int, default=None, help="随机种子（PROBE_SEED）")
    parser.add_argument("--mode", choices=MODES, default=None, help="运行模式（PROBE_MODE）")
    return parser


def main(argv=None) -> int:
    """
    应用程序主入口。返回进程退出码。
    """
    args = build_parser().parse_args(argv)

    # 1. 加载配置；日志级别来自配置，所以先用默认级别兜底
    try:
        config = resolve_run_config(vars(args))
    except ConfigError as e:
        logging.basicConfig(level=logging.INFO, format=LOG_FORMAT)
        logging.error(f"配置错误: {e}", exc_info=True)
        return exit_code_for(e)

    # 2. 在此统一配置整个应用的日志系统
    logging.basicConfig(level=config.run_config.log_level, format=LOG_FORMAT)

    # 3. 初始化并运行 ProbeRunner
    try:
        ProbeRunner(config).run()
    except Exception as e:
        logging.error("ProbeRunner 执行过程中发生未捕获的顶层异常: %s", e, exc_info=True)
        return exit_code_for(e)
    return 0


if __name__ == "__main__":
    sys.exit(main())
