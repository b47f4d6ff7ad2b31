"""Командная строка eqshapelets.

Коды завершения: 0 - успех, 1 - ошибка использования (аргументы, конфигурация,
одноклассовый набор и т.п.), 2 - ошибка данных (нет файла, повреждённый формат).
"""
import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import pandas as pd

from .. import __version__
from ..classifier import ShapeletForest
from ..config import RunConfig, load_config
from ..core.formats import read_learning_set, read_segments, write_learning_set, write_waveform
from ..detection import read_catalog, write_catalog, write_detections, write_histogram
from ..discovery import ShapeletDocument, load_shapelets, save_shapelets
from ..exceptions import DataError, EqShapeletsException, SeriesTooShortError, UsageError
from ..pipeline import EqShapeletsManager
from ..synth import read_truth, write_truth
from ..types import RunManifest, Shapelet, SweepRow

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def manifest_path(primary: Path) -> Path:
    return Path(f"{primary}.manifest.json")


def _write_manifest(
    args: argparse.Namespace,
    config: RunConfig,
    manager: EqShapeletsManager,
    inputs: Dict[str, Optional[Path]],
    outputs: Dict[str, Optional[Path]],
    primary: Path,
) -> None:
    manifest = RunManifest(
        subcommand=args.command,
        tool_version=__version__,
        config=config.model_dump(mode="json"),
        inputs={name: str(path) for name, path in inputs.items() if path is not None},
        outputs={name: str(path) for name, path in outputs.items() if path is not None},
        timings={stage: round(seconds, 6) for stage, seconds in manager.timings.items()},
        seeds={"synth": config.synth.seed, "forest": config.forest.seed},
        threads=args.threads,
        default_sample_rate_hz=getattr(args, "sample_rate", None),
    )
    path = manifest_path(primary)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(manifest.model_dump_json(indent=2), encoding="utf-8")
    logger.info(f"Манифест запуска записан в {path}")


def write_shapelet_plot_data(shapelets: Sequence[Shapelet], path: Path) -> None:
    """Шейплеты в длинном формате rank, quality, index, value - по строке на отсчёт."""
    rows = [
        {"rank": rank, "quality": shapelet.quality, "index": index, "value": value}
        for rank, shapelet in enumerate(shapelets, start=1)
        for index, value in enumerate(shapelet.values)
    ]
    pd.DataFrame(rows, columns=["rank", "quality", "index", "value"]).to_csv(path, index=False)


def write_sweep(rows: Sequence[SweepRow], path: Path) -> None:
    frame = pd.DataFrame(
        {
            "ig_threshold": [row.ig_threshold for row in rows],
            "shapelet_count": [row.shapelet_count for row in rows],
            "accuracy": [row.test_accuracy for row in rows],
            "runtime_seconds": [row.runtime_seconds for row in rows],
        }
    )
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)


def synth_command(args: argparse.Namespace, config: RunConfig, manager: EqShapeletsManager) -> Path:
    record, truth = manager.synth_record()
    write_waveform(record, args.out)
    args.truth.parent.mkdir(parents=True, exist_ok=True)
    write_truth(truth, args.truth)
    if args.catalog is not None:
        write_catalog(truth.as_catalog(), args.catalog)
    if args.learning_set is not None:
        learning_set, set_truth = manager.synth_learning_set(args.n_event, args.n_other)
        write_learning_set(learning_set, args.learning_set)
        write_truth(set_truth, args.learning_set / "truth.csv")
    _write_manifest(
        args,
        config,
        manager,
        {},
        {"record": args.out, "truth": args.truth, "catalog": args.catalog, "learning_set": args.learning_set},
        args.out,
    )
    return args.out


def preprocess_command(args: argparse.Namespace, config: RunConfig, manager: EqShapeletsManager) -> Path:
    if (args.data is None) == (args.learning_set is None):
        raise UsageError("Укажите ровно один из параметров --data и --learning-set")
    if args.learning_set is not None:
        learning_set = manager.preprocess_learning_set(read_learning_set(args.learning_set, args.sample_rate))
        write_learning_set(learning_set, args.out)
        inputs = {"learning_set": args.learning_set}
    else:
        windows, report = manager.preprocess_record(read_segments(args.data, args.sample_rate))
        for index, window in enumerate(windows):
            write_waveform(window, args.out / f"window-{index:06d}.bin")
        logger.info(f"Пропусков в записи: {report.gap_count}, удалено {report.total_dropped_seconds:.1f} с")
        inputs = {"data": args.data}
    _write_manifest(args, config, manager, inputs, {"windows": args.out}, args.out)
    return args.out


def _shapelet_document(shapelets, learning_set, config: RunConfig, manifest: Path) -> ShapeletDocument:
    return ShapeletDocument(
        window_len=learning_set.window_len,
        sample_rate_hz=learning_set.sample_rate_hz,
        config=config.discovery,
        shapelets=shapelets,
        manifest=manifest.name,
    )


def discover_command(args: argparse.Namespace, config: RunConfig, manager: EqShapeletsManager) -> Path:
    learning_set = read_learning_set(args.train, args.sample_rate)
    shapelets = manager.discover(learning_set)
    save_shapelets(_shapelet_document(shapelets, learning_set, config, manifest_path(args.out)), args.out)
    plot = None
    if args.emit_plot_data:
        plot = args.out.with_suffix(".plot.csv")
        write_shapelet_plot_data(shapelets, plot)
    _write_manifest(args, config, manager, {"train": args.train}, {"shapelets": args.out, "plot": plot}, args.out)
    return args.out


def sweep_command(args: argparse.Namespace, config: RunConfig, manager: EqShapeletsManager) -> Path:
    """Таблица перебора порогов IG: ig_threshold, shapelet_count, accuracy, runtime_seconds."""
    train = read_learning_set(args.train, args.sample_rate)
    if args.test is not None:
        test = read_learning_set(args.test, args.sample_rate)
    else:
        train, test = manager.split(train)
    rows = manager.sweep(train, test)
    write_sweep(rows, args.out)
    _write_manifest(args, config, manager, {"train": args.train, "test": args.test}, {"sweep": args.out}, args.out)
    return args.out


def train_command(args: argparse.Namespace, config: RunConfig, manager: EqShapeletsManager) -> Path:
    learning_set = read_learning_set(args.train, args.sample_rate)
    if args.shapelets is not None:
        document = load_shapelets(args.shapelets)
        longest = max((s.length for s in document.shapelets), default=0)
        if longest > learning_set.window_len:
            raise SeriesTooShortError(f"Шейплет длиной {longest} длиннее окон набора ({learning_set.window_len})")
        shapelets = document.shapelets
    else:
        shapelets = manager.discover(learning_set)
    classifier = manager.train(shapelets, learning_set)
    classifier.save(args.out, manifest=manifest_path(args.out).name)
    _write_manifest(
        args, config, manager, {"train": args.train, "shapelets": args.shapelets}, {"model": args.out}, args.out
    )
    return args.out


def detect_command(args: argparse.Namespace, config: RunConfig, manager: EqShapeletsManager) -> Path:
    manager.load_model(args.model)
    segments = read_segments(args.data, args.sample_rate)
    windows = manager.preprocess_record(segments)[0] if args.raw else segments
    catalog = read_catalog(args.catalog) if args.catalog is not None else []
    truth = read_truth(args.truth).as_catalog() if args.truth is not None else None
    detections, _, report = manager.detect(windows, catalog, truth)
    write_detections(detections, args.out)
    report_path = args.report or args.out.with_suffix(".report.json")
    report.manifest = manifest_path(args.out).name
    report_path.parent.mkdir(parents=True, exist_ok=True)
    report_path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
    histogram = report_path.with_suffix(".histogram.csv")
    write_histogram(report, histogram)
    logger.info(
        f"Детекций: {report.total_detections}, совпало с каталогом: {report.catalog_matched}, "
        f"новых: {report.new_events}, на проверку: {report.review_count}"
    )
    _write_manifest(
        args,
        config,
        manager,
        {"model": args.model, "data": args.data, "catalog": args.catalog, "truth": args.truth},
        {"detections": args.out, "report": report_path, "histogram": histogram},
        args.out,
    )
    return args.out


def evaluate_command(args: argparse.Namespace, config: RunConfig, manager: EqShapeletsManager) -> Path:
    manager.load_model(args.model)
    evaluation = manager.evaluate(read_learning_set(args.test, args.sample_rate))
    document = {**evaluation.model_dump(mode="json"), "manifest": manifest_path(args.out).name}
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(document, indent=2), encoding="utf-8")
    _write_manifest(args, config, manager, {"model": args.model, "test": args.test}, {"evaluation": args.out}, args.out)
    return args.out


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig, EqShapeletsManager], Path]] = {
    "synth": synth_command,
    "preprocess": preprocess_command,
    "discover": discover_command,
    "sweep": sweep_command,
    "train": train_command,
    "detect": detect_command,
    "evaluate": evaluate_command,
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML-файл конфигурации")
    common.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
        help="переопределение параметра конфигурации (можно повторять)",
    )
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1, help="число потоков")
    common.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    common.add_argument("--emit-plot-data", action="store_true", help="писать CSV для графиков")
    common.add_argument(
        "--sample-rate", type=float, metavar="HZ", help="частота дискретизации для CSV без заголовка"
    )

    parser = _Parser(prog="eqshapelets", description="Поиск сейсмических событий по шейплетам")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)

    synth = commands.add_parser("synth", parents=[common], help="синтетическая запись и обучающий набор")
    synth.add_argument("--out", type=Path, required=True, help="файл записи (.bin или .csv)")
    synth.add_argument("--truth", type=Path, required=True, help="CSV внедрённых событий")
    synth.add_argument("--catalog", type=Path, help="CSV каталога из внедрённых событий")
    synth.add_argument("--learning-set", type=Path, help="каталог обучающего набора")
    synth.add_argument("--n-event", type=int, default=52)
    synth.add_argument("--n-other", type=int, default=52)

    preprocess = commands.add_parser("preprocess", parents=[common], help="фильтр, прореживание, окна")
    preprocess.add_argument("--data", type=Path, help="каталог сегментов непрерывной записи")
    preprocess.add_argument("--learning-set", type=Path, help="каталог обучающего набора")
    preprocess.add_argument("--out", type=Path, required=True, help="выходной каталог")

    discover = commands.add_parser("discover", parents=[common], help="поиск шейплетов")
    discover.add_argument("--train", type=Path, required=True, help="каталог обучающего набора")
    discover.add_argument("--out", type=Path, required=True, help="JSON с шейплетами")

    sweep = commands.add_parser("sweep", parents=[common], help="перебор порогов IG")
    sweep.add_argument("--train", type=Path, required=True)
    sweep.add_argument("--test", type=Path, help="тестовый набор; без него train делится 60/40")
    sweep.add_argument("--out", type=Path, required=True, help="CSV с результатами")

    train = commands.add_parser("train", parents=[common], help="обучение случайного леса")
    train.add_argument("--train", type=Path, required=True)
    train.add_argument("--shapelets", type=Path, help="JSON с шейплетами; без него поиск выполняется заново")
    train.add_argument("--out", type=Path, required=True, help="JSON модели")

    detect = commands.add_parser("detect", parents=[common], help="поиск событий в записи")
    detect.add_argument("--model", type=Path, required=True)
    detect.add_argument("--data", type=Path, required=True, help="каталог окон (или сегментов с --raw)")
    detect.add_argument("--raw", action="store_true", help="данные - сырые сегменты, подготовить перед детекцией")
    detect.add_argument("--catalog", type=Path, help="CSV каталога событий")
    detect.add_argument("--truth", type=Path, help="CSV истинных событий для precision и recall")
    detect.add_argument("--out", type=Path, required=True, help="JSON Lines с детекциями")
    detect.add_argument("--report", type=Path, help="JSON отчёта")

    evaluate = commands.add_parser("evaluate", parents=[common], help="оценка модели на размеченном наборе")
    evaluate.add_argument("--model", type=Path, required=True)
    evaluate.add_argument("--test", type=Path, required=True)
    evaluate.add_argument("--out", type=Path, required=True, help="JSON с матрицей ошибок")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Точка входа: разбирает аргументы, выполняет этап и возвращает код завершения."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return 1
    except SystemExit as e:
        return int(e.code or 0)
    if args.command is None:
        parser.print_help(sys.stderr)
        return 1
    logging.basicConfig(format=LOG_FORMAT)
    logging.getLogger().setLevel(args.log_level)
    started = time.perf_counter()
    try:
        if args.threads < 1:
            raise UsageError(f"Число потоков должно быть положительным: {args.threads}")
        if args.sample_rate is not None and args.sample_rate <= 0:
            raise UsageError(f"Частота дискретизации должна быть положительной: {args.sample_rate}")
        config = load_config(args.config, args.overrides)
        manager = EqShapeletsManager(config, n_jobs=args.threads)
        primary = COMMANDS[args.command](args, config, manager)
    except UsageError as e:
        logger.error(f"Ошибка использования: {e}")
        return 1
    except DataError as e:
        logger.error(f"Ошибка данных: {e}")
        return 2
    except EqShapeletsException as e:
        logger.error(f"Ошибка: {e}")
        return 1
    logger.info(f"Команда {args.command} выполнена за {time.perf_counter() - started:.1f} с, результат: {primary}")
    return 0
