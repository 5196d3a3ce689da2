import json
import logging
import sys
from pathlib import Path

import pandas as pd

from src.core.basin import render
from src.core.config import OrbitConfig, RenderConfig
from src.core.errors import UsageError
from src.core.expr import parse
from src.core.orbit import iterate_orbit, orbit_prefix
from src.core.pipelines import (
    map_inputs, render_payload, replay_bundle, repro, resolve_check_options, run_operation,
)
from src.utils.bundle import ExperimentBundle, canonical, load_bundle, save_bundle
from src.utils.image_io import write_ppm, write_stats_csv

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def log_progress(pct, message):
    logger.info(f"{pct:5.1f}% - {message}" if pct is not None else message)


def _emit(payload):
    print(json.dumps(canonical(payload), indent=2, sort_keys=True, ensure_ascii=False))


def _build_map(args):
    return parse(args.map, dict(args.param))


def _orbit_config(args):
    return OrbitConfig().with_overrides(
        max_iter=args.max_iter, conv_eps=args.tol, escape_eps=args.escape_eps,
        period_max=args.period_max,
    )


def _save(bundle, path):
    if path:
        save_bundle(bundle, path)
        print(f"💾 Bundle guardado en {path}", file=sys.stderr)


def _record(bundle, name, kind, operation, inputs, workers=None):
    payload = run_operation(operation, inputs, workers, log_progress)
    return bundle.add(name, kind, operation, inputs, payload).payload


def analyze(args):
    e = _build_map(args)
    bundle = ExperimentBundle(e.source(), e.params)
    base = map_inputs(e)

    if args.seed is not None:
        _record(bundle, f"periodic point near {args.seed}", "FixedPointRecord", "analyze_fixed_point",
                {**base, "x0": args.seed, "period": args.period, "provenance": f"seed {args.seed}"})

    if args.interval is not None:
        interval = args.interval.to_list()
        if args.period == 1:
            roots = _record(bundle, f"real fixed points on {interval}", "Summary", "real_fixed_points",
                            {**base, "interval": interval})["roots"]
            for i, x in enumerate(roots):
                _record(bundle, f"fixed point #{i}", "FixedPointRecord", "analyze_fixed_point",
                        {**base, "x0": [x, 0.0], "period": 1,
                         "provenance": f"sign change on {interval}"})
        elif args.period == 2:
            _record(bundle, f"2-cycle on {interval}", "FixedPointRecord", "find_two_cycle",
                    {**base, "interval": interval})
        else:
            raise UsageError("--interval admite solo --period 1 o 2")

    if args.critical is not None:
        _record(bundle, "critical points (Newton)", "CriticalSet", "find_critical_points_newton",
                {**base, "window": list(args.critical), "grid": args.grid})

    if args.real_line:
        _record(bundle, "real-line structure", "Summary", "real_line_summary", base)

    if not bundle.artifacts:
        raise UsageError("Indica al menos una de --seed, --interval, --critical o --real-line")

    _emit([a.to_dict() for a in bundle.artifacts])
    _save(bundle, args.out)
    return EXIT_PASS


def orbit_frame(points, result):
    """Prefix rows (`kind=z`) followed by one `kind=fate` row with the final point."""
    final = result.final_point
    rows = [{"kind": "z", "n": n, "re": z.real, "im": z.imag, "abs": abs(z), "fate": "", "period": None}
            for n, z in enumerate(points)]
    rows.append({"kind": "fate", "n": result.index, "re": final.real, "im": final.imag,
                 "abs": abs(final), "fate": result.fate.value, "period": result.period or None})
    frame = pd.DataFrame(rows, columns=["kind", "n", "re", "im", "abs", "fate", "period"])
    return frame.astype({"n": "Int64", "period": "Int64"})


def orbit(args):
    e = _build_map(args)
    cfg = _orbit_config(args)
    result = iterate_orbit(e, args.seed, cfg)
    points = orbit_prefix(e, args.seed, args.prefix, cfg.pole_eps)
    print(f"🔁 Destino de la órbita: {result.fate.value} tras {result.iterations_used} iteraciones",
          file=sys.stderr)

    frame = orbit_frame(points, result)
    if args.csv:
        Path(args.csv).parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(args.csv, index=False, float_format="%.17g")
        print(f"📄 Órbita de {len(points)} puntos escrita en {args.csv}", file=sys.stderr)

    if args.json:
        _emit({**result.to_dict(), "prefix": [[z.real, z.imag] for z in points]})
    else:
        sys.stdout.write(frame.to_csv(index=False, float_format="%.17g"))
    return EXIT_PASS


def verify(args):
    e = _build_map(args)
    bundle = ExperimentBundle(e.source(), e.params)
    inputs = {**map_inputs(e), "domain": args.interval.to_list(), "max_depth": args.max_depth}
    if args.cascade:
        cert = _record(bundle, "sign cascade", "SignCertificate", "cascade_sign",
                       {**inputs, "order": args.cascade})
    else:
        cert = _record(bundle, "sign certificate", "SignCertificate", "certify_sign", inputs)
    _emit(cert)
    _save(bundle, args.out)

    if cert["verdict"] == "Indeterminate":
        print("⚠️ Signo no certificado", file=sys.stderr)
        return EXIT_FAIL
    print(f"✅ Signo certificado: {cert['verdict']}", file=sys.stderr)
    return EXIT_PASS


def check(args):
    overrides = {name: value.real if value.imag == 0 else value for name, value in args.param}
    if args.map is not None:
        overrides["map"] = args.map
    options = resolve_check_options(args.name, overrides)
    bundle = ExperimentBundle(args.map or "", {})
    report = _record(bundle, args.name, "HypothesisReport", "check", {"check": args.name, "options": options})
    _emit(report)
    _save(bundle, args.out)

    for clause in report["clauses"]:
        icon = {"Pass": "✅", "Fail": "❌"}.get(clause["verdict"], "⚠️")
        tag = " (muestreado)" if clause["sampled"] else ""
        print(f"{icon} {clause['description']}{tag}", file=sys.stderr)
    return EXIT_PASS if report["overall"] == "Pass" else EXIT_FAIL


def render_basins(args):
    e = _build_map(args)
    cfg = RenderConfig(orbit=_orbit_config(args))
    image = render(e, args.window, (args.res, args.res), cfg=cfg, progress_callback=log_progress)
    write_ppm(image, args.out)
    print(f"🖼️ Imagen {args.res}x{args.res} escrita en {args.out}", file=sys.stderr)
    if args.stats:
        write_stats_csv(image, args.stats)
        print(f"📊 Estadísticas escritas en {args.stats}", file=sys.stderr)

    payload = render_payload(image)
    if args.bundle:
        bundle = ExperimentBundle(e.source(), e.params)
        inputs = {
            **map_inputs(e),
            "window": args.window.to_list(),
            "resolution": [args.res, args.res],
            "orbit": cfg.orbit.to_dict(),
            "match_eps": cfg.match_eps,
            "attractors": [],
        }
        bundle.add("basin image", "BasinStats", "render", inputs, payload)
        _save(bundle, args.bundle)
    _emit(payload)
    return EXIT_PASS


def probe(args):
    e = _build_map(args)
    bundle = ExperimentBundle(e.source(), e.params)
    inputs = {
        **map_inputs(e),
        "window": args.window.to_list(),
        "resolutions": args.res,
        "orbit": _orbit_config(args).to_dict(),
        "match_eps": RenderConfig().match_eps,
        "attractors": [],
    }
    report = _record(bundle, "connectivity probe", "ConnectivityReport", "connectivity_probe", inputs)
    _emit(report)
    _save(bundle, args.out)

    messages = {
        "Shrinking": "🔬 El diámetro máximo disminuye: compatible con Julia totalmente disconexo",
        "Stabilizing": "🔬 El diámetro máximo se estabiliza: Julia no totalmente disconexo",
        "Mixed": "🔬 Tendencia de diámetros mixta",
        "Unresolved": "⚠️  Algún escalón no tiene píxeles de Julia: la sonda no concluye nada",
    }
    print(messages[report["trend"]], file=sys.stderr)
    return EXIT_PASS


def repro_example(args):
    result = repro(args.example, with_render=not args.no_render, progress_callback=log_progress)
    path = args.out or f"{args.example}.bundle.json"
    _save(result.bundle, path)
    for label, ok in result.criteria.items():
        print(f"{'✅' if ok else '❌'} {label}", file=sys.stderr)
    for label in result.unresolved:
        print(f"⚠️  {label}", file=sys.stderr)
    if result.accepted:
        suffix = f" ({len(result.unresolved)} sin resolver)" if result.unresolved else ""
        print(f"🎉 {args.example}: todos los criterios se cumplen{suffix}", file=sys.stderr)
        return EXIT_PASS
    print(f"❌ {args.example}: hay criterios sin cumplir", file=sys.stderr)
    return EXIT_FAIL


def replay(args):
    bundle = load_bundle(args.bundle)
    outcomes = replay_bundle(bundle, progress_callback=log_progress)
    for outcome in outcomes:
        icon = "✅" if outcome.reproduced else "❌"
        print(f"{icon} {outcome.name} ({outcome.operation}) {outcome.detail}".rstrip(), file=sys.stderr)
    reproduced = sum(o.reproduced for o in outcomes)
    print(f"🔁 {reproduced}/{len(outcomes)} artefactos reproducidos", file=sys.stderr)
    return EXIT_PASS if reproduced == len(outcomes) else EXIT_FAIL


COMMANDS = {
    "analyze": analyze,
    "orbit": orbit,
    "verify": verify,
    "check": check,
    "render": render_basins,
    "probe": probe,
    "repro": repro_example,
    "replay": replay,
}
