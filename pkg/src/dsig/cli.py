"""Thin-client command line for the signature service.

Every subcommand builds a request and sends it to the HTTP service: a remote
one when ``--server`` (or DSIG_SERVER) is set, otherwise an in-process
instance of the app driven through the ASGI interface, so the CLI works
offline with identical behavior.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import sys
from pathlib import Path
from typing import Optional

import click
import httpx

from .errors import DataError, NumericError


def _make_client(server: Optional[str]):
    if server:
        return httpx.Client(base_url=server, timeout=httpx.Timeout(600.0))
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        from fastapi.testclient import TestClient

    from .service.app import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _post(ctx: click.Context, path: str, payload: dict) -> dict:
    client = ctx.obj["client"]
    response = client.post(path, json=payload)
    if response.status_code == 200:
        return response.json()
    try:
        body = response.json()
    except ValueError:
        body = {"detail": response.text}
    detail = body.get("detail", "request failed")
    if not isinstance(detail, str):
        detail = "; ".join(str(e.get("msg", e)) for e in detail) if isinstance(detail, list) else str(detail)
    if response.status_code == 422:
        raise click.UsageError(detail)
    if response.status_code == 400:
        raise DataError(detail)
    if body.get("error") == "numeric":
        raise NumericError(detail)
    raise NumericError(f"service error {response.status_code}: {detail}")


def _write_output(text: str, out: str) -> None:
    if out == "-":
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text)


def _split_csv(value: Optional[str]) -> Optional[list[str]]:
    if value is None:
        return None
    items = [item.strip() for item in value.split(",") if item.strip()]
    if not items:
        raise click.UsageError(f"empty list option: {value!r}")
    return items


@click.group()
@click.option("--server", envvar="DSIG_SERVER", default=None, metavar="URL",
              help="Base URL of a running dsig service; default is an in-process instance.")
@click.version_option()
@click.pass_context
def cli(ctx, server):
    """Discrete signatures: word universes, signature computation, market
    ingestion, synthetic sessions and the session classification experiment."""
    ctx.ensure_object(dict)
    ctx.obj["client"] = _make_client(server)


@cli.command()
@click.option("-d", "--alphabet", "alphabet_size", type=int, default=4, show_default=True,
              help="Number of components; labels are 1..d.")
@click.option("--restrict", default=None, metavar="LABELS",
              help="Comma-separated component labels to keep, e.g. '2,4'.")
@click.option("-k", "--max-len", type=int, required=True, help="Maximum word length.")
@click.option("--half/--full", default=True, show_default=True,
              help="Pin first letters to the head sign (flat feature sets).")
@click.option("--pattern", default=None, metavar="LETTERS",
              help="Keep only words containing one of these letters, e.g. '4-,4+'.")
@click.pass_context
def words(ctx, alphabet_size, restrict, max_len, half, pattern):
    """Enumerate a word universe; prints the count and then one word per line."""
    body = _post(ctx, "/words", {
        "alphabet_size": alphabet_size,
        "max_len": max_len,
        "restrict": _split_csv(restrict),
        "half": half,
        "pattern": _split_csv(pattern),
    })
    click.echo(body["count"])
    for word in body["words"]:
        click.echo(word)


@cli.command()
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--mu", type=float, default=0.0, show_default=True, help="Decay rate.")
@click.option("-k", "--max-len", type=int, required=True)
@click.option("--from", "from_time", type=float, default=None, help="Start time (must be observed).")
@click.option("--to", "to_time", type=float, default=None, help="End time (must be observed).")
@click.option("--restrict", default=None, metavar="LABELS")
@click.option("--pattern", default=None, metavar="LETTERS")
@click.option("--half/--full", "half", default=None,
              help="Word universe style; default: half exactly when mu is 0.")
@click.option("--out", default="-", show_default=True, help="Output TSV path, '-' for stdout.")
@click.pass_context
def compute(ctx, input_path, mu, max_len, from_time, to_time, restrict, pattern, half, out):
    """Signature of an event-stream file as a two-line TSV."""
    try:
        events = Path(input_path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {input_path}: {exc}") from None
    body = _post(ctx, "/signature", {
        "events": events,
        "mu": mu,
        "max_len": max_len,
        "from_time": from_time,
        "to_time": to_time,
        "restrict": _split_csv(restrict),
        "pattern": _split_csv(pattern),
        "half": half,
    })
    _write_output(body["tsv"], out)


@cli.command("ingest-market")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--label", type=click.Choice(["morning", "afternoon"]), default=None,
              help="Session label; default inferred from the .am/.pm suffix.")
@click.option("--n-minutes", type=int, default=150, show_default=True)
@click.option("--out", default="-", show_default=True)
@click.pass_context
def ingest_market(ctx, input_path, label, n_minutes, out):
    """Subsample and normalize one snapshot file into a session feature path."""
    path = Path(input_path)
    if label is None:
        from .ingest import label_from_filename

        label = label_from_filename(path.name)
    body = _post(ctx, "/sessions/normalize", {
        "snapshots": path.read_text(),
        "label": label,
        "n_minutes": n_minutes,
    })
    if body["discarded"]:
        raise DataError(f"session discarded: {body['reason']}")
    _write_output(body["tsv"], out)


@cli.command()
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
@click.option("--sessions", type=int, required=True, help="Sessions per class.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--n-minutes", type=int, default=150, show_default=True)
@click.pass_context
def synth(ctx, out_dir, sessions, seed, n_minutes):
    """Generate a deterministic synthetic session dataset."""
    body = _post(ctx, "/synth", {
        "out_dir": out_dir,
        "sessions_per_class": sessions,
        "seed": seed,
        "n_minutes": n_minutes,
    })
    click.echo(f"wrote {body['count']} sessions, manifest {body['manifest_path']}")


@cli.command()
@click.option("--data-dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("-k", "--max-len", type=int, default=3, show_default=True)
@click.option("--mu", type=float, default=0.0, show_default=True)
@click.option("--restrict", default=None, metavar="LABELS")
@click.option("--pattern", default=None, metavar="LETTERS")
@click.option("--half/--full", "half", default=None)
@click.option("--train-fraction", type=float, default=0.8, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--rate", type=float, default=0.1, show_default=True, help="Learning rate.")
@click.option("--iterations", type=int, default=5000, show_default=True)
@click.option("--l2", type=float, default=1e-4, show_default=True)
@click.option("--raw", is_flag=True, help="Use the raw normalized path values as features.")
@click.option("--shuffle-labels", is_flag=True, help="Null experiment: permute labels.")
@click.option("--threads", type=int, default=None, envvar="DSIG_THREADS",
              help="Feature-extraction parallelism; defaults to machine parallelism.")
@click.option("--n-minutes", type=int, default=150, show_default=True)
@click.option("--out", default=None, help="Write the summary TSV here.")
@click.option("--coefficients", "coefficients_out", default=None, help="Write per-feature coefficients TSV here.")
@click.pass_context
def experiment(ctx, data_dir, max_len, mu, restrict, pattern, half, train_fraction, seed,
               rate, iterations, l2, raw, shuffle_labels, threads, n_minutes, out, coefficients_out):
    """Morning/afternoon classification over a directory of session files."""
    body = _post(ctx, "/experiment", {
        "data_dir": data_dir,
        "max_len": max_len,
        "mu": mu,
        "restrict": _split_csv(restrict),
        "pattern": _split_csv(pattern),
        "half": half,
        "train_fraction": train_fraction,
        "seed": seed,
        "settings": {"learning_rate": rate, "iterations": iterations, "l2": l2},
        "raw": raw,
        "shuffle_labels": shuffle_labels,
        "threads": threads,
        "n_minutes": n_minutes,
    })
    click.echo(body["text"], nl=False)
    if out:
        Path(out).write_text(body["summary_tsv"])
    if coefficients_out:
        lines = ["feature\tcoefficient"]
        lines += [f"{c}\t{w:.17g}" for c, w in zip(body["columns"], body["coefficients"])]
        lines.append(f"(intercept)\t{body['intercept']:.17g}")
        Path(coefficients_out).write_text("\n".join(lines) + "\n")


@cli.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("dsig.service.app:app", host=host, port=port)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        click.echo(f"error: {exc.format_message()}", err=True)
        return 1
    except click.Abort:
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except NumericError as exc:
        click.echo(f"numeric error: {exc}", err=True)
        return 3
    except DataError as exc:
        click.echo(f"data error: {exc}", err=True)
        return 2
    except OSError as exc:
        click.echo(f"i/o error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
