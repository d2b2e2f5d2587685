"""Command-line client for the experiment service.

The CLI is deliberately thin: every command round-trips through the HTTP
API, mounted in-process by default so single-box use needs no running
server; `--server` points the same commands at a remote instance.

PHOTONLAB_THREADS caps the BLAS/FFT thread pools.  It must take effect
before numpy is first imported, which is why this module keeps the heavy
imports inside command bodies.

Exit codes: 0 all declared tolerances met, 1 a tolerance violated or the
run recorded a propagation error, 2 usage or configuration error.
"""

from __future__ import annotations

import asyncio
import base64
import json
import os
import sys
from pathlib import Path

import click

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS")


def _apply_thread_env() -> None:
    val = os.environ.get("PHOTONLAB_THREADS")
    if not val:
        return
    if not val.isdigit() or int(val) < 1:
        raise click.UsageError(
            f"PHOTONLAB_THREADS must be a positive integer, got {val!r}")
    for var in _THREAD_VARS:
        os.environ.setdefault(var, val)


def _load_config(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise click.UsageError(f"cannot read config {path}: {e}")
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise click.UsageError(f"config {path} is not valid JSON: {e}")
    if not isinstance(cfg, dict):
        raise click.UsageError(f"config {path} must hold a JSON object")
    return cfg


async def _request_async(server: str | None, method: str, path: str,
                         payload: dict | None):
    import httpx

    if server is None:
        from .service import app
        client = httpx.AsyncClient(transport=httpx.ASGITransport(app=app),
                                   base_url="http://photonlab.internal",
                                   timeout=None)
    else:
        client = httpx.AsyncClient(base_url=server, timeout=None)
    async with client:
        return await client.request(method, path, json=payload)


def _request(server: str | None, method: str, path: str,
             payload: dict | None = None):
    import httpx

    try:
        return asyncio.run(_request_async(server, method, path, payload))
    except httpx.HTTPError as e:
        raise click.UsageError(f"service request failed: {e}")


def _print_summary(report: dict) -> None:
    cfg = report.get("config", {})
    click.echo(f"experiment: {report['experiment']}  (seed {cfg.get('seed')})")
    if report.get("error"):
        click.echo(f"[FAIL] {report['error']}")
    tolerances = report.get("tolerances", {})
    passed = report.get("passed", {})
    for name in sorted(report.get("metrics", {})):
        value = report["metrics"][name]
        if name in tolerances:
            bound = tolerances[name]
            desc = ", ".join(f"{side} {bound[side]:g}"
                             for side in ("min", "max") if side in bound)
            tag = "PASS" if passed.get(name) else "FAIL"
            click.echo(f"[{tag}] {name} = {value:.6g}  ({desc})")
        else:
            click.echo(f"[info] {name} = {value:.6g}")
    n_ok = sum(1 for v in passed.values() if v)
    verdict = "PASS" if report.get("all_passed") else "FAIL"
    click.echo(f"result: {verdict} ({n_ok}/{len(passed)} tolerances met)")


@click.group()
def main() -> None:
    """Numerical experiments on the oscillator model of the radiation field."""
    _apply_thread_env()


@main.command()
@click.option("--config", "config_path", required=True,
              type=click.Path(), help="JSON experiment configuration.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False),
              default=None, help="Directory for report.json and field dumps.")
@click.option("--seed", type=click.IntRange(min=0), default=None,
              help="Override the config seed.")
@click.option("--server", default=None,
              help="Remote service URL; default runs in-process.")
def run(config_path: str, out_dir: str | None, seed: int | None,
        server: str | None) -> None:
    """Run one experiment and print its pass/fail summary."""
    cfg = _load_config(config_path)
    payload: dict = {"config": cfg, "include_artifacts": out_dir is not None}
    if seed is not None:
        payload["seed"] = seed
    resp = _request(server, "POST", "/experiments/run", payload)
    if resp.status_code == 400:
        detail = resp.json().get("detail", {})
        raise click.UsageError(
            f"invalid config, {detail.get('field')}: {detail.get('message')}")
    if resp.status_code != 200:
        raise click.UsageError(f"service error {resp.status_code}: {resp.text}")
    body = resp.json()
    _print_summary(body["report"])

    if out_dir is not None:
        from .experiments import report_json

        target = Path(out_dir)
        target.mkdir(parents=True, exist_ok=True)
        (target / "report.json").write_text(report_json(body["report"]))
        for art in body["artifacts"]:
            name = Path(art["name"]).name
            (target / name).write_bytes(base64.b64decode(art["content_base64"]))
        click.echo(f"wrote {target / 'report.json'}"
                   + (f" and {len(body['artifacts'])} artifact(s)"
                      if body["artifacts"] else ""))
    sys.exit(0 if body["all_passed"] else 1)


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--server", default=None,
              help="Remote service URL; default runs in-process.")
def validate(config_path: str, server: str | None) -> None:
    """Check a config against the experiment schema; exit 2 on problems."""
    cfg = _load_config(config_path)
    resp = _request(server, "POST", "/experiments/validate", {"config": cfg})
    if resp.status_code != 200:
        raise click.UsageError(f"service error {resp.status_code}: {resp.text}")
    body = resp.json()
    if body["valid"]:
        click.echo("config valid")
        return
    for err in body["errors"]:
        click.echo(f"invalid config, {err['field']}: {err['message']}", err=True)
    sys.exit(2)


@main.command()
@click.option("--show", "show_name", default=None,
              help="Print the default config JSON for one experiment.")
@click.option("--server", default=None,
              help="Remote service URL; default runs in-process.")
def experiments(show_name: str | None, server: str | None) -> None:
    """List available experiments, or show one default config."""
    resp = _request(server, "GET", "/experiments")
    if resp.status_code != 200:
        raise click.UsageError(f"service error {resp.status_code}: {resp.text}")
    entries = resp.json()
    if show_name is not None:
        for entry in entries:
            if entry["name"] == show_name:
                click.echo(json.dumps(entry["default_config"], indent=2))
                return
        raise click.UsageError(f"unknown experiment {show_name!r}")
    for entry in entries:
        click.echo(f"{entry['name']:24s} {entry['description']}")


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, type=int, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("photonlab.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
