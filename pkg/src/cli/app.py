import argparse
import logging
import shlex
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from src.core.basin import Window
from src.core.config import OrbitConfig
from src.core.errors import BundleError, ExpressionError, NumericError, UsageError
from src.core.evaluate import Finite, evaluate
from src.core.expr import depends_on_z, free_params, parse
from src.core.interval import MAX_DEPTH, Interval
from src.core.pipelines import CHECK_DEFAULTS, EXAMPLES

from .commands import COMMANDS, EXIT_NUMERIC, EXIT_USAGE

logger = logging.getLogger(__name__)

# command -> argparse actions in declaration order, used to print the resolved run
COMMAND_ACTIONS: Dict[str, List[argparse.Action]] = {}


# Argument types -------------------------------------------------------------

def parse_number(text):
    """A constant expression such as `0.04`, `-1e-6` or `0.3+0.2i`."""
    e = parse(text)
    if depends_on_z(e.root) or free_params(e):
        raise argparse.ArgumentTypeError(f"{text!r} is not a constant")
    outcome = evaluate(e, 0j)
    if not isinstance(outcome, Finite):
        raise argparse.ArgumentTypeError(f"{text!r} does not evaluate to a finite number")
    return outcome.value


def parse_param(text):
    """`name=re[,im]`; the value may also be a constant such as `0.3+0.2i`."""
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(f"Expected name=value, got {text!r}")
    if "," in value:
        parts = value.split(",")
        if len(parts) != 2:
            raise argparse.ArgumentTypeError(f"Expected name=re,im, got {text!r}")
        re_part, im_part = (_real_number(p) for p in parts)
        return name.strip(), complex(re_part, im_part)
    return name.strip(), parse_number(value)


def _real_number(text):
    value = parse_number(text)
    if value.imag != 0:
        raise argparse.ArgumentTypeError(f"{text!r} must be real")
    return value.real


def parse_interval(text):
    lo, hi = _floats(text, 2)
    return Interval(lo, hi)


def parse_rectangle(text):
    return _floats(text, 4)


def _floats(text, count):
    parts = [float(p) for p in text.split(",")]
    if len(parts) != count:
        raise argparse.ArgumentTypeError(f"Expected {count} comma-separated numbers, got {text!r}")
    return tuple(parts)


def format_number(value):
    z = complex(value)
    if z.imag == 0:
        return repr(z.real)
    sign = "-" if z.imag < 0 else "+"
    return f"{z.real!r}{sign}{abs(z.imag)!r}i"


def _format_param(value):
    z = complex(value)
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r},{z.imag!r}"


def _format_value(value):
    if isinstance(value, (Window, Interval)):
        return ",".join(repr(v) for v in value.to_list())
    if isinstance(value, tuple) and len(value) == 2 and isinstance(value[0], str):
        return f"{value[0]}={_format_param(value[1])}"
    if isinstance(value, tuple):
        return ",".join(repr(v) for v in value)
    if isinstance(value, (complex, float)):
        return format_number(value)
    return str(value)


# Resolved run ---------------------------------------------------------------

@dataclass
class RunConfig:
    command: str
    flags: List[Tuple[str, object]] = field(default_factory=list)

    @classmethod
    def from_namespace(cls, args):
        config = cls(args.command)
        for action in COMMAND_ACTIONS[args.command]:
            value = getattr(args, action.dest)
            if value is None or value is False:
                continue
            flag = action.option_strings[0] if action.option_strings else None
            config.flags.append((flag, value))
        return config

    def to_argv(self):
        argv = [self.command]
        for flag, value in self.flags:
            if value is True:
                argv.append(flag)
            elif isinstance(value, list) and flag == "--param":
                argv += [f"{flag}={_format_value(item)}" for item in value]
            elif isinstance(value, list):
                argv += [flag, *(_format_value(v) for v in value)]
            elif flag is None:
                argv.append(_format_value(value))
            else:
                argv.append(f"{flag}={_format_value(value)}")
        return argv

    def __str__(self):
        return "python bovdyn.py " + shlex.join(self.to_argv())


# Parser ---------------------------------------------------------------------

def _add(sub, command, *names, **kwargs):
    action = sub.add_argument(*names, **kwargs)
    COMMAND_ACTIONS.setdefault(command, []).append(action)
    return action


def _map_options(sub, command, required=True):
    _add(sub, command, "--map", required=required, help="Expresión del mapa, p. ej. 'lambda/(exp(z)+z)'")
    _add(sub, command, "--param", type=parse_param, action="append", default=[],
         help="Valor de un parámetro, name=value (repetible)")


def _orbit_options(sub, command):
    defaults = OrbitConfig()
    _add(sub, command, "--max-iter", type=int, default=defaults.max_iter, help="Iteraciones máximas por semilla")
    _add(sub, command, "--tol", type=float, default=defaults.conv_eps, help="Tolerancia cordal de convergencia")
    _add(sub, command, "--escape-eps", type=float, default=defaults.escape_eps,
         help="Distancia cordal a infinito que cuenta como escape")
    _add(sub, command, "--period-max", type=int, default=defaults.period_max, help="Periodo máximo detectado")


def create_parser():
    COMMAND_ACTIONS.clear()
    parser = argparse.ArgumentParser(
        prog="bovdyn.py",
        description="🌀 Dinámica de funciones meromorfas con valor omitido de Baker",
    )
    parser.add_argument("--verbose", action="store_true", help="Registro detallado (DEBUG)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    sub = subparsers.add_parser("analyze", help="Puntos fijos, ciclos y puntos críticos")
    _map_options(sub, "analyze")
    _add(sub, "analyze", "--seed", type=parse_number, help="Refina el punto periódico cercano a esta semilla")
    _add(sub, "analyze", "--interval", type=parse_interval, help="Busca puntos fijos reales en lo,hi")
    _add(sub, "analyze", "--period", type=int, default=1, help="Periodo (1 o 2 con --interval)")
    _add(sub, "analyze", "--critical", type=parse_rectangle,
         help="Ventana re0,re1,im0,im1 para buscar puntos críticos por Newton")
    _add(sub, "analyze", "--grid", type=int, default=64, help="Semillas por lado para --critical")
    _add(sub, "analyze", "--real-line", action="store_true", help="Polo, puntos fijos y preimagen del polo")
    _add(sub, "analyze", "--out", help="Guarda los resultados en un bundle JSON")

    sub = subparsers.add_parser("orbit", help="Clasifica la órbita de una semilla")
    _map_options(sub, "orbit")
    _add(sub, "orbit", "--seed", type=parse_number, required=True, help="Semilla z0")
    _orbit_options(sub, "orbit")
    _add(sub, "orbit", "--prefix", type=int, default=20, help="Número de iterados del prefijo")
    _add(sub, "orbit", "--csv", help="Copia el CSV de la órbita en este fichero")
    _add(sub, "orbit", "--json", action="store_true", help="Salida JSON en lugar de CSV")

    sub = subparsers.add_parser("verify", help="Certifica el signo de una expresión en un intervalo")
    _map_options(sub, "verify")
    _add(sub, "verify", "--interval", type=parse_interval, required=True, help="Intervalo lo,hi")
    _add(sub, "verify", "--cascade", type=int, help="Orden de la derivada de partida para la cascada")
    _add(sub, "verify", "--max-depth", type=int, default=MAX_DEPTH, help="Profundidad máxima de bisección")
    _add(sub, "verify", "--out", help="Guarda el certificado en un bundle JSON")

    sub = subparsers.add_parser("check", help="Comprueba las hipótesis de un ejemplo")
    _add(sub, "check", "name", choices=list(CHECK_DEFAULTS), help="Comprobación a ejecutar")
    _map_options(sub, "check", required=False)
    _add(sub, "check", "--out", help="Guarda el informe en un bundle JSON")

    sub = subparsers.add_parser("render", help="Imagen de cuencas de atracción (PPM)")
    _map_options(sub, "render")
    _add(sub, "render", "--window", type=Window.parse, default=Window(0.0, 0.0, 4.0, 4.0),
         help="Ventana cx,cy,w,h")
    _add(sub, "render", "--res", type=int, default=256, help="Píxeles por lado")
    _orbit_options(sub, "render")
    _add(sub, "render", "--out", default="basin.ppm", help="Imagen PPM de salida")
    _add(sub, "render", "--stats", help="CSV con la fracción de píxeles por código")
    _add(sub, "render", "--bundle", help="Guarda el resumen en un bundle JSON")

    sub = subparsers.add_parser("probe", help="Sonda de conectividad del conjunto de Julia")
    _map_options(sub, "probe")
    _add(sub, "probe", "--window", type=Window.parse, default=Window(0.0, 0.0, 4.0, 4.0),
         help="Ventana cx,cy,w,h")
    _add(sub, "probe", "--res", type=int, nargs="+", default=[128, 256, 512],
         help="Escalera de resoluciones crecientes")
    _orbit_options(sub, "probe")
    _add(sub, "probe", "--out", help="Guarda el informe en un bundle JSON")

    sub = subparsers.add_parser("repro", help="Reproduce un ejemplo completo en un bundle")
    _add(sub, "repro", "example", choices=list(EXAMPLES), help="Ejemplo a reproducir")
    _add(sub, "repro", "--no-render", action="store_true", help="Omite la imagen y la sonda")
    _add(sub, "repro", "--out", help="Ruta del bundle (por defecto <ejemplo>.bundle.json)")

    sub = subparsers.add_parser("replay", help="Recalcula cada artefacto de un bundle")
    _add(sub, "replay", "bundle", help="Bundle JSON a verificar")

    return parser


def main(argv=None):
    parser = create_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    run_config = RunConfig.from_namespace(args)
    print(f"⚙️  {run_config}", file=sys.stderr)

    try:
        return COMMANDS[args.command](args)
    except (ExpressionError, BundleError, UsageError, KeyError, OSError) as exc:
        logger.debug("Aborted", exc_info=True)
        print(f"❌ Error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, ArithmeticError, ValueError) as exc:
        logger.debug("Numeric abort", exc_info=True)
        print(f"❌ Error numérico: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
