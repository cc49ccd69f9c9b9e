"""Command-line front end: a thin client for the HTTP service.

By default requests are served in-process (no network); --server sends them
to a running instance instead. Exit codes: 0 success, 2 usage error, 3 data
error, 4 numerical error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .errors import DataError

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

_KIND_TO_EXIT = {"data": EXIT_DATA, "numerical": EXIT_NUMERICAL, "usage": EXIT_USAGE}


def _client(server: str | None):
    if server:
        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app)


def _post(server, path, payload):
    with _client(server) as client:
        response = client.post(path, json=payload)
    body = response.json()
    if response.status_code != 200:
        kind = body.get("error_kind", "data")
        detail = body.get("detail", str(body))
        _fail(kind, detail)
    return body


def _fail(kind: str, detail: str):
    click.echo(f"E_{kind.upper()}: {detail}", err=True)
    sys.exit(_KIND_TO_EXIT.get(kind, EXIT_DATA))


def _load_config_file(path: str) -> dict:
    values = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            _fail("usage", f"bad config line {line_no}: {line!r} (expected key=value)")
        key, _, value = line.partition("=")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(ctx: click.Context, config_path: str | None, required=()):
    """Fill parameters from a key=value file; explicit flags win.

    Options named in ``required`` must be set by a flag or the file; they are
    checked here (not by click) so the file can supply them.
    """
    if config_path:
        if not Path(config_path).exists():
            _fail("usage", f"config file not found: {config_path}")
        values = _load_config_file(config_path)
        for param in ctx.command.params:
            name = param.name
            if name in ("config",) or name not in values:
                continue
            source = ctx.get_parameter_source(name)
            if source is not None and source.name != "DEFAULT":
                continue
            try:
                ctx.params[name] = param.type.convert(values[name], param, ctx)
            except click.UsageError as exc:
                _fail("usage", f"config key {name}: {exc}")
    for name in required:
        if ctx.params.get(name) is None:
            _fail("usage", f"missing required option --{name.replace('_', '-')}")


def _load_dataset_payload(data: str, target: str, task: str):
    from .dataio import LABEL, NUMERIC, load_csv

    kind = NUMERIC if task == "regression" else LABEL
    try:
        dataset = load_csv(data, target, target_kind=kind)
    except DataError as exc:
        _fail("data", str(exc))
    return {
        "columns": dataset.column_names,
        "rows": dataset.X.tolist(),
        "target": dataset.target.tolist(),
        "task": task,
    }


def _emit(document: dict, out: str | None, fmt: str = "json"):
    if fmt == "json":
        text = json.dumps(document, indent=2)
    else:
        text = _flatten_csv(document)
    if out:
        Path(out).write_text(text + "\n")
    return text


def _flatten_csv(document: dict) -> str:
    rows = document.get("rows")
    if rows is None:
        report = document["report"]
        rows = [{
            "method": document["method"],
            "n_selected": len(report["selected"]),
            "selected": ";".join(report["selected_names"]),
            "backward_steps_taken": report["backward_steps_taken"],
            "criterion_evals": report["criterion_evals"],
            "wall_time_seconds": report["wall_time_seconds"],
            "final_criterion_value": report["final_criterion_value"],
        }]
    else:
        rows = [{
            "method": r["method"],
            "test_error": r["test_error"],
            "n_selected": r["n_selected"],
            "selected": ";".join(r["selected_names"]),
            "criterion_evals": r["criterion_evals"],
            "wall_time_seconds": r["wall_time_seconds"],
        } for r in rows]
    header = list(rows[0].keys())
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(str(row[h]) for h in header))
    return "\n".join(lines)


@click.group()
def main():
    """Feature selection toolkit: selectors, benchmarks and comparisons."""


server_option = click.option("--server", default=None,
                             help="URL of a running service; default is in-process")
config_option = click.option("--config", default=None,
                             help="key=value config file; explicit flags win")


@main.command()
@click.option("--data", default=None, help="CSV file with a header row")
@click.option("--target", default=None, help="name of the target column")
@click.option("--task", type=click.Choice(["regression", "classification"]),
              default="regression", show_default=True)
@click.option("--method", type=click.Choice(["forward", "backward", "stepwise", "fb", "dfb"]),
              default="dfb", show_default=True)
@click.option("--criterion", type=click.Choice(["cp", "trace"]), default=None,
              help="default: cp for regression, trace for classification")
@click.option("--alpha", type=float, default=0.01, show_default=True)
@click.option("--beta", type=float, default=0.01, show_default=True)
@click.option("--drop-beta", type=float, default=None)
@click.option("--max-features", type=int, default=None)
@click.option("--sigma2", type=float, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", default=None, help="write the report document here")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default="json", show_default=True)
@server_option
@config_option
@click.pass_context
def select(ctx, data, target, task, method, criterion, alpha, beta, drop_beta,
           max_features, sigma2, seed, out, fmt, server, config):
    """Run one selector on a CSV dataset and emit a report document."""
    _apply_config(ctx, config, required=("data", "target"))
    p = ctx.params
    criterion = p["criterion"] or ("cp" if p["task"] == "regression" else "trace")
    if criterion == "cp" and p["task"] == "classification":
        _fail("usage", "the cp criterion requires --task regression")
    if criterion == "trace" and p["task"] == "regression":
        _fail("usage", "the trace criterion requires --task classification")
    payload = {
        "dataset": _load_dataset_payload(p["data"], p["target"], p["task"]),
        "method": p["method"],
        "options": {
            "alpha": p["alpha"], "beta": p["beta"], "drop_beta": p["drop_beta"],
            "max_features": p["max_features"], "criterion": criterion,
            "sigma2": p["sigma2"], "seed": p["seed"],
        },
    }
    document = _post(p["server"], "/select", payload)
    text = _emit(document, p["out"], p["fmt"])
    click.echo(text)
    report = document["report"]
    click.echo(
        f"# selected {len(report['selected'])} features: "
        f"{', '.join(report['selected_names']) or '(none)'}",
        err=True,
    )


@main.command()
@click.option("--table", type=click.Choice(["1", "2", "3"]), default=None,
              help="benchmark row family: 1 model size, 2 correlation, 3 dimension")
@click.option("--n", type=int, default=80, show_default=True)
@click.option("--p", "p_dim", type=int, default=80, show_default=True)
@click.option("--max-corr", type=float, default=0.0, show_default=True)
@click.option("--model-size", type=int, default=None)
@click.option("--reps", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--methods", default="dfb,fb,stepwise", show_default=True)
@click.option("--alpha", type=float, default=0.01, show_default=True)
@click.option("--beta", type=float, default=0.01, show_default=True)
@click.option("--sigma2", type=float, default=2.0, show_default=True)
@click.option("--out", default=None, help="write the JSON summary here")
@server_option
@config_option
@click.pass_context
def simulate(ctx, table, n, p_dim, max_corr, model_size, reps, seed, methods,
             alpha, beta, sigma2, out, server, config):
    """Monte Carlo benchmark on simulated regression data."""
    _apply_config(ctx, config)
    p = ctx.params
    method_list = [m.strip() for m in p["methods"].split(",") if m.strip()]
    payload = {
        "table": int(p["table"]) if p["table"] else None,
        "n": p["n"], "p": p["p_dim"], "max_corr": p["max_corr"],
        "model_size": p["model_size"], "reps": p["reps"], "seed": p["seed"],
        "methods": method_list, "alpha": p["alpha"], "beta": p["beta"],
        "sigma2": p["sigma2"],
    }
    document = _post(p["server"], "/simulate", payload)
    if p["out"]:
        Path(p["out"]).write_text(json.dumps(document, indent=2) + "\n")
    click.echo(f"n={document['n']} p={document['p']} reps={document['replications']} "
               f"seed={document['seed']}")
    header = f"{'method':<10} {'avg selected':>12} {'avg backward':>12} " \
             f"{'avg evals':>10} {'avg time (s)':>12}"
    click.echo(header)
    for row in document["methods"]:
        click.echo(
            f"{row['method']:<10} {row['mean_selected']:>12.3f} "
            f"{row['mean_backward_steps']:>12.4f} "
            f"{row['mean_criterion_evals']:>10.1f} {row['mean_wall_time']:>12.6f}"
        )
    click.echo(f"# {document['environment_note']}", err=True)


@main.command()
@click.option("--data", default=None, help="CSV file with a header row")
@click.option("--target", default=None, help="name of the label column")
@click.option("--methods", default="dfb,stepwise,fb", show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--beta", type=float, default=0.05, show_default=True)
@click.option("--drop-beta", type=float, default=None)
@click.option("--with-all-features", is_flag=True, default=False)
@click.option("--with-pca", is_flag=True, default=False)
@click.option("--pca-target", type=float, default=0.985, show_default=True)
@click.option("--split", type=float, default=0.3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", default=None, help="write the JSON comparison here")
@click.option("--plot-data", default=None, help="write method,error CSV here")
@server_option
@config_option
@click.pass_context
def compare(ctx, data, target, methods, alpha, beta, drop_beta,
            with_all_features, with_pca, pca_target, split, seed, out,
            plot_data, server, config):
    """Compare selectors (and optional baselines) on a classification CSV."""
    _apply_config(ctx, config, required=("data", "target"))
    p = ctx.params
    method_list = [m.strip() for m in p["methods"].split(",") if m.strip()]
    payload = {
        "dataset": _load_dataset_payload(p["data"], p["target"], "classification"),
        "methods": method_list,
        "alpha": p["alpha"], "beta": p["beta"], "drop_beta": p["drop_beta"],
        "split": p["split"], "seed": p["seed"],
        "with_all_features": p["with_all_features"], "with_pca": p["with_pca"],
        "pca_target": p["pca_target"],
    }
    document = _post(p["server"], "/compare", payload)
    if p["out"]:
        Path(p["out"]).write_text(json.dumps(document, indent=2) + "\n")
    if p["plot_data"]:
        lines = ["method,test_error"]
        lines += [f"{r['method']},{r['test_error']}" for r in document["rows"]]
        Path(p["plot_data"]).write_text("\n".join(lines) + "\n")
    click.echo(f"train={document['train_samples']} test={document['test_samples']} "
               f"seed={document['seed']}")
    header = f"{'method':<14} {'test error':>10} {'selected':>9} " \
             f"{'evals':>8} {'time (s)':>10}"
    click.echo(header)
    for row in document["rows"]:
        click.echo(
            f"{row['method']:<14} {row['test_error']:>10.4f} "
            f"{row['n_selected']:>9} {row['criterion_evals']:>8} "
            f"{row['wall_time_seconds']:>10.6f}"
        )
    click.echo(f"# {document['environment_note']}", err=True)


if __name__ == "__main__":
    main()
