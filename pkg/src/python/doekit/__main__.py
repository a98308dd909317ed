import argparse
import logging
from pathlib import Path
import sys

import doekit
from doekit import datasets
from doekit.design import THREE_LEVELS, TWO_LEVELS


class ArgumentParser(argparse.ArgumentParser):
    """Parser exiting with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def split(text):
    """Split a comma separated list."""

    items = [item.strip() for item in text.split(",")]
    if not all(items):
        raise doekit.ValidationError(f"bad list ({text!r})")
    return items


def assignments(text):
    """Parse ``name=value`` pairs, e.g. ``Q=-1,T=0``."""

    result = {}
    for item in split(text):
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise doekit.ValidationError(f"bad assignment ({item!r})")
        result[name.strip()] = value.strip()
    return result


def factors_of(args, names=None):
    """Factor specifications from the --factors, --three-level and --labels
    options."""

    names = split(args.factors) if names is None else names
    three = set(split(args.three_level)) if args.three_level else set()
    labels = assignments(args.labels) if args.labels else {}
    unknown = (three | set(labels)) - set(names)
    if unknown:
        raise doekit.ValidationError(
            f"unknown factors ({', '.join(sorted(unknown))})"
        )

    factors = []
    for name in names:
        levels = THREE_LEVELS if name in three else TWO_LEVELS
        texts = None
        if name in labels:
            texts = labels[name].split("/")
            if len(texts) != len(levels):
                raise doekit.ValidationError(
                    f"expected {len(levels)} labels for factor '{name}'"
                )
            texts = dict(zip(levels, texts))
        factors.append(doekit.FactorSpec(name, levels, texts))
    return factors


def require_seed(args):
    if args.seed is None:
        raise doekit.ValidationError(
            f"{args.command} requires an explicit --seed"
        )
    return args.seed


def main(argv=None):
    """Entry point for the CLI."""

    parser = ArgumentParser(
        prog = "python3 -m doekit",
        description = "Command-line utility for the doekit package."
    )

    parser.add_argument("--verbose",
        help = "log debug messages.",
        action = "store_true"
    )

    subparsers = parser.add_subparsers(
        title = "command",
        help = "Command to execute",
        dest = "command"
    )

    config = subparsers.add_parser("config",
        help = "print configuration data."
    )

    config.add_argument("-p", "--prefix",
        help = "doekit installation prefix.",
        action = "store_true",
    )

    config.add_argument("-v", "--version",
        help = "doekit version.",
        action = "store_true",
    )

    dataset = subparsers.add_parser("dataset",
        help = "write a worked example."
    )

    dataset.add_argument("name",
        help = "example name.",
        choices = ("ofat", "factorial", "screening")
    )

    dataset.add_argument("-o", "--output",
        help = "output CSV file.",
        type = Path,
        required = True
    )

    design = subparsers.add_parser("design",
        help = "generate a design."
    )

    families = design.add_subparsers(
        title = "family",
        help = "Design family",
        dest = "family"
    )

    full = families.add_parser("full",
        help = "full factorial design."
    )

    ofat = families.add_parser("ofat",
        help = "one-factor-at-a-time design."
    )

    pb12 = families.add_parser("pb12",
        help = "12-run Plackett-Burman design."
    )

    for family in (full, ofat, pb12):
        family.add_argument("--factors",
            help = "comma separated factor names.",
            required = True
        )

        family.add_argument("-o", "--output",
            help = "output CSV file.",
            type = Path,
            required = True
        )

        family.add_argument("--labels",
            help = "level labels, e.g. Q=1/2,T=-/0/+.",
        )

        if family is not pb12:
            family.add_argument("--three-level",
                help = "comma separated three-level factors.",
            )
        else:
            family.set_defaults(three_level=None)

    ofat.add_argument("--baseline",
        help = "baseline levels, e.g. Q=-1,T=0 (default: centre or low).",
    )

    ofat.add_argument("-e", "--excursion",
        help = "single factor excursion, e.g. T=1.",
        action = "append",
        default = []
    )

    ofat.add_argument("--cross",
        help = "comma separated two-level factors crossed with the runs.",
    )

    randomize = subparsers.add_parser("randomize",
        help = "randomize the run order of a design."
    )

    randomize.add_argument("design",
        help = "path to a design CSV.",
        type = Path
    )

    randomize.add_argument("-o", "--output",
        help = "output CSV file.",
        type = Path,
        required = True
    )

    randomize.add_argument("-s", "--seed",
        help = "random seed.",
        type = int
    )

    simulate = subparsers.add_parser("simulate",
        help = "simulate responses over a design."
    )

    simulate.add_argument("design",
        help = "path to a design CSV.",
        type = Path
    )

    simulate.add_argument("-m", "--model",
        help = "model configuration (JSON or TOML).",
        type = Path,
        required = True
    )

    simulate.add_argument("-o", "--output",
        help = "output CSV file.",
        type = Path,
        required = True
    )

    simulate.add_argument("-r", "--response",
        help = "response column name.",
        default = "Resp"
    )

    simulate.add_argument("-s", "--seed",
        help = "random seed (overrides the model's).",
        type = int
    )

    analyze = subparsers.add_parser("analyze",
        help = "screen the factors of experimental results."
    )

    analyze.add_argument("results",
        help = "path to a results CSV.",
        type = Path
    )

    analyze.add_argument("-r", "--response",
        help = "response column name.",
        default = "Resp"
    )

    analyze.add_argument("-t", "--threshold",
        help = "relative threshold for active factors.",
        type = float,
        default = 1 / 3
    )

    analyze.add_argument("--floor",
        help = "absolute floor of the threshold.",
        type = float,
        default = 0.0
    )

    analyze.add_argument("-o", "--output",
        help = "output JSON report.",
        type = Path
    )

    analyze.add_argument("--text",
        help = "output text summary (default: the JSON report path, with "
               "a .txt suffix).",
        type = Path
    )

    plot = subparsers.add_parser("plot",
        help = "render an SVG figure."
    )

    figures = plot.add_subparsers(
        title = "figure",
        help = "Figure type",
        dest = "figure"
    )

    main_effects = figures.add_parser("main-effects",
        help = "response vs. each factor."
    )

    structured = figures.add_parser("structured",
        help = "response vs. a focal factor, by two factors."
    )

    geometry = figures.add_parser("geometry",
        help = "flattened design geometry."
    )

    for figure in (main_effects, structured):
        figure.add_argument("results",
            help = "path to a results CSV.",
            type = Path
        )

        figure.add_argument("-r", "--response",
            help = "response column name.",
            default = "Resp"
        )

    main_effects.add_argument("-b", "--benchmark",
        help = "factor drawn rightmost.",
    )

    structured.add_argument("-f", "--focal",
        help = "focal factor (default: largest effect).",
    )

    structured.add_argument("-c", "--conditioners",
        help = "two comma separated factors (default: next largest effects).",
    )

    geometry.add_argument("design",
        help = "path to a design CSV.",
        type = Path
    )

    geometry.add_argument("-a", "--axes",
        help = "horizontal, vertical and slicing factors, e.g. T,Q,M.",
        required = True
    )

    geometry.add_argument("--slice",
        help = "slicing factor (default: last axis).",
    )

    for figure in (main_effects, structured, geometry):
        figure.add_argument("-o", "--output",
            help = "output SVG file.",
            type = Path,
            required = True
        )

        figure.add_argument("--width",
            help = "figure width, in pixels.",
            type = int,
            default = doekit.PlotConfig.width
        )

        figure.add_argument("--height",
            help = "figure height, in pixels.",
            type = int,
            default = doekit.PlotConfig.height
        )

    args = parser.parse_args(argv)

    logging.basicConfig(
        format = "%(levelname)s:%(name)s: %(message)s",
        level = logging.DEBUG if args.verbose else logging.WARNING
    )

    try:
        return run(parser, args)
    except doekit.DoekitError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"{parser.prog}: error: {e}", file=sys.stderr)
        return 2


def run(parser, args):
    """Execute a parsed command."""

    if args.command == "config":
        result = []
        if args.prefix:
            result.append(str(Path(__file__).parent))
        if args.version:
            result.append(doekit.VERSION)
        if result:
            print(" ".join(result))

    elif args.command == "dataset":
        if args.name == "screening":
            data = datasets.screening_results()
            doekit.write_results_csv(data, args.output)
            print(f"wrote {args.output} ({len(data)} runs)")
        else:
            if args.name == "ofat":
                design = datasets.ofat_protocol()
            else:
                design = datasets.factorial_protocol()
            doekit.write_design_csv(design, args.output)
            print(f"wrote {args.output} ({len(design)} runs)")

    elif args.command == "design":
        if args.family is None:
            raise doekit.ValidationError("missing design family")

        if args.family == "full":
            design = doekit.full_factorial(factors_of(args))

        elif args.family == "pb12":
            factors = factors_of(args)
            design = doekit.pb12_design(len(factors), factors)

        else:
            names = split(args.factors)
            crossed = split(args.cross) if args.cross else []
            factors = factors_of(args, names + crossed)
            core, extra = factors[:len(names)], factors[len(names):]

            baseline = {f.name: (0 if 0 in f.levels else -1) for f in core}
            if args.baseline:
                for name, value in assignments(args.baseline).items():
                    if name not in baseline:
                        raise doekit.ValidationError(
                            f"unknown factor ({name!r})"
                        )
                    baseline[name] = value
            excursions = []
            for text in args.excursion:
                excursion = assignments(text)
                if len(excursion) != 1:
                    raise doekit.ValidationError(
                        f"bad excursion ({text!r})"
                    )
                excursions.extend(excursion.items())

            design = doekit.ofat_design(
                core, [baseline[f.name] for f in core], excursions
            )
            for factor in extra:
                if not factor.is_two_level:
                    raise doekit.ValidationError(
                        f"crossed factor '{factor.name}' must be two-level"
                    )
                design = doekit.cross_with_factor(design, factor)

        doekit.write_design_csv(design, args.output)
        print(
            f"wrote {args.output} ({design.kind.value}, {len(design)} runs, "
            f"{len(design.factors)} factors)"
        )

    elif args.command == "randomize":
        seed = require_seed(args)
        design = doekit.parse_design_csv(args.design)
        design = doekit.randomize_order(design, seed)
        doekit.write_design_csv(design, args.output)
        print(f"wrote {args.output} ({len(design)} runs, seed {seed})")

    elif args.command == "simulate":
        seed = require_seed(args)
        model = doekit.SimModel.load(args.model).with_seed(seed)
        design = doekit.parse_design_csv(args.design)
        data = doekit.simulate_response(design, model, args.response)
        doekit.write_results_csv(data, args.output, model.round_decimals)
        print(f"wrote {args.output} ({len(data)} runs, seed {seed})")

    elif args.command == "analyze":
        data = doekit.parse_results_csv(args.results, args.response)
        report = doekit.screen(data, args.threshold, args.floor)
        text = args.text
        if args.output is not None:
            doekit.write_text(args.output, report.to_json())
            if text is None:
                text = args.output.with_suffix(".txt")
        if text is not None:
            doekit.write_text(text, report.summary())
        print(f"active: {', '.join(report.active) or '(none)'}")

    elif args.command == "plot":
        if args.figure is None:
            raise doekit.ValidationError("missing figure type")
        config = doekit.PlotConfig(width=args.width, height=args.height)

        if args.figure == "geometry":
            design = doekit.parse_design_csv(args.design)
            axes = split(args.axes)
            slice_factor = args.slice if args.slice else axes[-1]
            document = doekit.render_design_geometry(
                design, axes, slice_factor, config
            )

        else:
            data = doekit.parse_results_csv(args.results, args.response)
            if args.figure == "main-effects":
                panels = doekit.main_effects_panels(data)
                document = doekit.render_main_effects(
                    panels, config, args.benchmark
                )
            else:
                focal, conditioners = args.focal, None
                if args.conditioners:
                    conditioners = split(args.conditioners)
                if focal is None or conditioners is None:
                    report = doekit.screen(data)
                    default_focal, default_conditioners = \
                        doekit.default_structured_factors(report)
                    if focal is None:
                        focal = default_focal
                    if conditioners is None:
                        conditioners = [n for n in (default_focal,) +
                            default_conditioners if n != focal][:2]
                layout = doekit.structured_plot_layout(
                    data, focal, conditioners
                )
                document = doekit.render_structured(layout, config)

        doekit.write_svg(args.output, document)
        print(f"wrote {args.output} ({args.figure})")

    else:
        parser.print_help()

    return 0


if __name__ == "__main__":
    sys.exit(main())
