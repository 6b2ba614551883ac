import argparse
import sys
from logging import DEBUG
from typing import List, Optional

from config import APP_NAME, APP_VERSION, CURVE_STEP, DEFAULT_OUTPUT_DIR, LOG_LEVEL_PROD
from controllers.bounds_controller import BoundsController
from controllers.experiment_controller import ExperimentController, default_boxdim_scales
from controllers.verify_controller import SUITE_NAMES, VerifyController
from models.base_model import ConfigError, KakeyaLabError, VerificationError
from models.fractal_model import FractalKind, FractalSpec
from models.settings_model import ExperimentConfig, load_config
from utils.logger import set_log_level, setup_logger
from utils.number_format import parse_fraction
from views.report_view import render_suite, render_summary

# 2026-10-17 - 제한 카케야 실험실 - 메인 실행 파일
# 파일 위치: main.py - v1
# 목적: 명령행 인터페이스 (bounds, curve, verify, experiment, net, boxdim) 와 종료 코드 규약

LOGGER = setup_logger()

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2


# --- 1. 인자 정의 ---

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=APP_NAME, description="Restricted Kakeya lab: exact dimension "
                                     "bounds and desk-scale geometric experiments.")
    parser.add_argument('--version', action='version', version=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument('--verbose', action='store_true', help="log at DEBUG level")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('bounds', help="best lower bound for dim K_A at one (n, s)")
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--s', type=str, required=True, help="exact rational, e.g. 2 or 7/3")

    p = sub.add_parser('curve', help="write the piecewise lower-bound curve as CSV")
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--step', type=str, default=str(CURVE_STEP))
    p.add_argument('--out', type=str, default=DEFAULT_OUTPUT_DIR)
    p.add_argument('--plot', action='store_true', help="also render curve_n{n}.png")

    p = sub.add_parser('verify', help="run a verification suite")
    p.add_argument('suite', choices=SUITE_NAMES)
    p.add_argument('--seed', type=int, default=None)
    p.add_argument('--workers', type=int, default=None)

    p = sub.add_parser('experiment', help="run a full experiment from a config file")
    p.add_argument('--config', type=str, default=None)
    p.add_argument('--out', type=str, default=None, help="overrides output_dir of the config")

    p = sub.add_parser('net', help="write a seeded maximal delta-separated net")
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--delta', type=float, required=True)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--folded', action='store_true')
    p.add_argument('--out', type=str, required=True)

    p = sub.add_parser('boxdim', help="box-dimension fit of a generated fractal")
    p.add_argument('--kind', choices=[k.value for k in FractalKind], required=True)
    p.add_argument('--n', type=int, default=1)
    p.add_argument('--ratio', type=str, default='1/3')
    p.add_argument('--axes', type=int, default=1)
    p.add_argument('--maps', type=int, default=2)
    p.add_argument('--step', type=float, default=0.25)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--deltas', type=str, default=None, help="comma separated scales, e.g. 1/27,1/81,1/243")
    p.add_argument('--out', type=str, required=True)
    return parser


# --- 2. 명령 처리 ---

def cmd_bounds(args) -> int:
    summary = BoundsController().bound_summary(args.n, args.s)
    print(summary['line'])
    return EXIT_OK


def cmd_curve(args) -> int:
    paths = BoundsController().write_curve(args.n, args.out, parse_fraction(args.step), args.plot)
    if paths is None:
        print(f"error: cannot write curve output to {args.out}", file=sys.stderr)
        return EXIT_USAGE
    for path in paths:
        print(path)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = ExperimentConfig() if args.workers is None else ExperimentConfig(workers=args.workers)
    result = VerifyController(config).run(args.suite, args.seed)
    print(render_suite(result))
    return EXIT_OK if result.passed else EXIT_VERIFICATION


def cmd_experiment(args) -> int:
    controller = ExperimentController(load_config(args.config))
    summary = controller.run(args.out)
    if summary is None:
        print("error: cannot write experiment output", file=sys.stderr)
        return EXIT_USAGE
    print(render_summary(summary), end='')
    return EXIT_OK


def cmd_net(args) -> int:
    controller = ExperimentController(ExperimentConfig(seed=args.seed))
    net = controller.write_net(args.n, args.delta, args.out, args.folded)
    if net is None:
        return EXIT_USAGE
    print(f"{len(net)} directions written to {args.out}")
    return EXIT_OK


def cmd_boxdim(args) -> int:
    spec = FractalSpec(kind=args.kind, n=args.n, step=args.step, ratio=parse_fraction(args.ratio),
                       axes=args.axes, maps=args.maps, seed=args.seed)
    if args.deltas:
        scales = [float(parse_fraction(x)) for x in args.deltas.split(',')]
    else:
        scales = default_boxdim_scales(spec)
    fit = ExperimentController().write_boxdim(spec, scales, args.out)
    if fit is None:
        return EXIT_USAGE
    print(fit.summary())
    return EXIT_OK


COMMANDS = {
    'bounds': cmd_bounds,
    'curve': cmd_curve,
    'verify': cmd_verify,
    'experiment': cmd_experiment,
    'net': cmd_net,
    'boxdim': cmd_boxdim,
}


def main(argv: Optional[List[str]] = None) -> int:
    """ 명령을 실행하고 종료 코드를 반환합니다 (0 성공, 1 검증 실패, 2 사용법/설정 오류). """
    args = build_parser().parse_args(argv)
    set_log_level(DEBUG if args.verbose else LOG_LEVEL_PROD)
    try:
        return COMMANDS[args.command](args)
    except VerificationError as e:
        LOGGER.error(f"Verification failure: {e}")
        print(f"verification failed: {e}", file=sys.stderr)
        return EXIT_VERIFICATION
    except ConfigError as e:
        LOGGER.error(f"Config error: {e}")
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (KakeyaLabError, ValueError, ZeroDivisionError, OSError) as e:
        LOGGER.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
