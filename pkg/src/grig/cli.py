"""Command-line front end.

The CLI is a thin client of the service: every verb issues an HTTP request
against either a remote server (--server URL) or the app mounted
in-process, so batch use needs no running daemon while the wire format
stays identical.  Output is machine-readable JSON; --pretty indents it.

Exit codes: 0 success, 1 "not conjugate" on decision verbs, 2 input
errors, 3 resource guards.
"""

from __future__ import annotations

import asyncio
import json
import sys

import click
import httpx

_EXIT_INPUT = 2
_EXIT_RESOURCE = 3


def _inprocess_call(method: str, path: str, payload):
    from .service.app import create_app

    app = _app_singleton()

    async def go():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://grig.internal", timeout=None
        ) as client:
            r = await client.request(method, path, json=payload)
            return r.status_code, r.json()

    return asyncio.run(go())


_APP = None


def _app_singleton():
    global _APP
    if _APP is None:
        from .service.app import create_app

        _APP = create_app()
    return _APP


def _call(ctx, method: str, path: str, payload=None):
    server = ctx.obj.get("server")
    if server:
        r = httpx.request(
            method, server.rstrip("/") + path, json=payload, timeout=None
        )
        status, body = r.status_code, r.json()
    else:
        status, body = _inprocess_call(method, path, payload)
    if status == 400 or status == 422:
        click.echo(json.dumps({"error": body.get("detail", body)}), err=True)
        sys.exit(_EXIT_INPUT)
    if status == 413:
        click.echo(json.dumps({"error": body.get("detail", body)}), err=True)
        sys.exit(_EXIT_RESOURCE)
    if status != 200:
        click.echo(json.dumps({"error": body}), err=True)
        sys.exit(1)
    return body


def _emit(ctx, payload):
    click.echo(json.dumps(payload, indent=2 if ctx.obj.get("pretty") else None))


def _write_text(path: str, text: str):
    with open(path, "w") as fh:
        fh.write(text)


@click.group()
@click.option("--server", default=None, help="URL of a running grig service; "
              "without it the service runs in-process.")
@click.option("--pretty", is_flag=True, help="Indent JSON output.")
@click.option("--threads", default=1, show_default=True,
              help="Worker cap for parallelizable verification suites.")
@click.pass_context
def main(ctx, server, pretty, threads):
    """Decision procedures for the group generated by a, b, c, d acting on
    the binary rooted tree, and a finite wreath-product centralizer lab."""
    ctx.ensure_object(dict)
    ctx.obj.update(server=server, pretty=pretty, threads=threads)


@main.command()
@click.argument("word")
@click.pass_context
def reduce(ctx, word):
    """Reduced form of WORD."""
    _emit(ctx, _call(ctx, "POST", "/words/reduce", {"word": word}))


@main.command()
@click.argument("g")
@click.argument("h")
@click.pass_context
def mul(ctx, g, h):
    """Product of two words."""
    _emit(ctx, _call(ctx, "POST", "/words/multiply", {"g": g, "h": h}))


@main.command()
@click.argument("word")
@click.pass_context
def inv(ctx, word):
    """Inverse of WORD."""
    _emit(ctx, _call(ctx, "POST", "/words/invert", {"word": word}))


@main.command()
@click.argument("word")
@click.argument("vertex")
@click.pass_context
def section(ctx, word, vertex):
    """Restriction of WORD at a binary VERTEX."""
    _emit(ctx, _call(ctx, "POST", "/words/section",
                     {"word": word, "vertex": vertex}))


@main.command()
@click.argument("word")
@click.argument("vertex")
@click.pass_context
def act(ctx, word, vertex):
    """Image of VERTEX under WORD."""
    _emit(ctx, _call(ctx, "POST", "/words/act", {"word": word, "vertex": vertex}))


@main.command()
@click.argument("word")
@click.pass_context
def order(ctx, word):
    """Order of WORD (always a power of two)."""
    _emit(ctx, _call(ctx, "POST", "/words/order", {"word": word}))


@main.command()
@click.argument("word")
@click.pass_context
def coset(ctx, word):
    """Coset z_0..z_15 of WORD."""
    _emit(ctx, _call(ctx, "POST", "/cosets/coset-of", {"word": word}))


@main.command("km-coset")
@click.argument("word")
@click.option("--level", default=1, show_default=True)
@click.pass_context
def km_coset(ctx, word, level):
    """Tower-coset descriptor of WORD at the given level."""
    _emit(ctx, _call(ctx, "POST", "/cosets/km-coset",
                     {"word": word, "level": level}))


@main.command()
@click.argument("g")
@click.argument("h")
@click.pass_context
def conj(ctx, g, h):
    """Decide conjugacy of G and H; exit 1 when not conjugate."""
    body = _call(ctx, "POST", "/conjugacy/decide", {"g": g, "h": h})
    _emit(ctx, body)
    if not body["conjugate"]:
        sys.exit(1)


@main.command("conj-sub")
@click.argument("g")
@click.argument("h")
@click.option("--subgroup-gens", default="a,b,c,d", show_default=True,
              help="Comma-separated generator words of the subgroup H.")
@click.option("--km-level", default=0, show_default=True,
              help="Level m of the declared tower subgroup inside H.")
@click.pass_context
def conj_sub(ctx, g, h, subgroup_gens, km_level):
    """Decide conjugacy inside a finite-index subgroup H.

    The declaration that the level-m tower subgroup lies in H is trusted;
    exit 1 when not conjugate in H."""
    gens = [w for w in subgroup_gens.split(",") if w.strip()]
    body = _call(ctx, "POST", "/conjugacy/decide-km",
                 {"g": g, "h": h, "generators": gens, "km_level": km_level})
    _emit(ctx, body)
    if not body["conjugate"]:
        sys.exit(1)


@main.command()
@click.argument("g")
@click.argument("h")
@click.option("--depth", default=4, show_default=True)
@click.pass_context
def qfin(ctx, g, h, depth):
    """Finite-depth conjugator coset set at the given depth."""
    _emit(ctx, _call(ctx, "POST", "/conjugacy/qfin",
                     {"g": g, "h": h, "depth": depth}))


@main.command()
@click.argument("g")
@click.argument("h")
@click.option("--max-depth", default=14, show_default=True)
@click.pass_context
def stabilize(ctx, g, h, max_depth):
    """Empirical stabilization depth of the coset sets."""
    _emit(ctx, _call(ctx, "POST", "/conjugacy/stabilize",
                     {"g": g, "h": h, "max_depth": max_depth}))


@main.command("splitting-tree")
@click.argument("g")
@click.argument("h")
@click.option("--depth", default=6, show_default=True, help="Root depth label.")
@click.option("--dot", is_flag=True, help="Also emit DOT text.")
@click.option("--out", default=None, help="Write DOT to this file.")
@click.pass_context
def splitting_tree(ctx, g, h, depth, dot, out):
    """The recursion tree of the finite-depth computation."""
    body = _call(ctx, "POST", "/conjugacy/splitting-tree",
                 {"g": g, "h": h, "depth": depth, "dot": dot or bool(out)})
    if out:
        _write_text(out, body["dot"])
        body = {k: v for k, v in body.items() if k != "dot"}
        body["dot_file"] = out
    _emit(ctx, body)


@main.group()
def quotient():
    """Finite quotient operations."""


@quotient.command("enumerate")
@click.option("--depth", required=True, type=int)
@click.pass_context
def quotient_enumerate(ctx, depth):
    """Order of the level-DEPTH quotient (guarded by GRIG_MAX_DEPTH)."""
    _emit(ctx, _call(ctx, "POST", "/quotient/enumerate", {"depth": depth}))


@main.command()
@click.argument("suite", type=click.Choice(
    ["lift-table", "schreier", "base-cong", "q-agreement", "structure",
     "wreath", "all"]))
@click.option("--groups", default=None,
              help='Wreath products to check, e.g. "C2xC3,S3xC2".')
@click.option("--out", default=None,
              help="Write the Schreier DOT export to this file (schreier suite).")
@click.pass_context
def verify(ctx, suite, groups, out):
    """Run a table-verification suite (or all of them)."""
    payload = {"workers": ctx.obj.get("threads", 1)}
    if groups:
        payload["groups"] = [pair.split("x") for pair in groups.split(",")]
    body = _call(ctx, "POST", f"/verify/{suite}", payload)
    if suite == "schreier" and out:
        dot = _call(ctx, "GET", "/cosets/schreier-dot")["dot"]
        _write_text(out, dot)
        body["dot_file"] = out
    _emit(ctx, body)
    passed = body["passed"] if "passed" in body else all(
        r["passed"] for r in body.get("reports", []))
    if not passed:
        sys.exit(1)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8797, show_default=True)
def serve(host, port):
    """Run the service under uvicorn."""
    import uvicorn

    uvicorn.run(_app_singleton(), host=host, port=port)


if __name__ == "__main__":
    main()
