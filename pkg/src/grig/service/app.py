"""FastAPI service wrapping the engines.

A long-running process amortizes the expensive immutable caches (finite
quotients, coset tables, memoized Q-sets) across requests; the CLI is a
thin client of this app, either over HTTP or mounted in-process.

Error mapping: malformed input -> 400, configured resource guards -> 413.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import InputError, ResourceLimitError
from ..words import (
    Word,
    act,
    in_stab,
    invert,
    length,
    multiply,
    order,
    parse,
    section,
)
from .. import conjugacy as cj
from .. import cosets as cs
from .. import quotient as qt
from .. import verify as vf
from . import models as m


def _word(text: str) -> Word:
    return parse(text)


def _tree_model(node: cj.SplitNode) -> m.TreeNodeModel:
    return m.TreeNodeModel(
        depth_label=node.depth_label,
        g=node.g.letters or "1",
        h=node.h.letters or "1",
        case=node.case,
        children=[_tree_model(c) for c in node.children],
    )


def create_app(engine: cj.ConjugacyEngine | None = None) -> FastAPI:
    app = FastAPI(
        title="grig",
        description="Conjugacy decision service for the group generated by "
        "a, b, c, d acting on the binary rooted tree, plus a finite "
        "wreath-product centralizer lab.",
    )
    app.state.engine = engine or cj.ConjugacyEngine()

    @app.exception_handler(InputError)
    async def _input_error(request: Request, exc: InputError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ResourceLimitError)
    async def _resource_error(request: Request, exc: ResourceLimitError):
        return JSONResponse(status_code=413, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok"}

    # ------------------------------------------------------------- words

    @app.post("/words/reduce", response_model=m.WordResponse)
    def words_reduce(req: m.WordRequest):
        return m.WordResponse(word=_word(req.word).letters)

    @app.post("/words/multiply", response_model=m.WordResponse)
    def words_multiply(req: m.PairRequest):
        return m.WordResponse(word=multiply(_word(req.g), _word(req.h)).letters)

    @app.post("/words/invert", response_model=m.WordResponse)
    def words_invert(req: m.WordRequest):
        return m.WordResponse(word=invert(_word(req.word)).letters)

    @app.post("/words/section", response_model=m.WordResponse)
    def words_section(req: m.SectionRequest):
        return m.WordResponse(word=section(_word(req.word), req.vertex).letters)

    @app.post("/words/act", response_model=m.ActResponse)
    def words_act(req: m.SectionRequest):
        return m.ActResponse(vertex=act(_word(req.word), req.vertex))

    @app.post("/words/order", response_model=m.OrderResponse)
    def words_order(req: m.WordRequest):
        return m.OrderResponse(order=order(_word(req.word)))

    @app.post("/words/length", response_model=m.LengthResponse)
    def words_length(req: m.WordRequest):
        return m.LengthResponse(length=length(_word(req.word)))

    @app.post("/words/in-stab", response_model=m.BoolResponse)
    def words_in_stab(req: m.StabRequest):
        return m.BoolResponse(value=in_stab(_word(req.word), req.level))

    # ------------------------------------------------------------ cosets

    @app.post("/cosets/coset-of", response_model=m.CosetResponse)
    def coset_of(req: m.WordRequest):
        i = cs.coset_of(_word(req.word))
        return m.CosetResponse(coset=cs.coset_label(i), index=i)

    @app.post(
        "/cosets/km-coset",
        response_model=m.KmCosetResponse,
        response_model_exclude_none=True,
    )
    def km_coset(req: m.KmCosetRequest):
        d = cs.km_coset_of(_word(req.word), req.level)
        return m.KmCosetResponse(
            descriptor=m.DescriptorModel.model_validate(d.to_json())
        )

    @app.get("/cosets/schreier-dot", response_model=m.SchreierDotResponse)
    def schreier_dot():
        return m.SchreierDotResponse(dot=cs.schreier_dot())

    # --------------------------------------------------------- conjugacy

    @app.post("/conjugacy/decide", response_model=m.ConjugacyResponse)
    def conjugacy_decide(req: m.ConjugacyRequest):
        res = app.state.engine.q_exact(_word(req.g), _word(req.h))
        return m.ConjugacyResponse(**res.to_json())

    @app.post("/conjugacy/decide-km", response_model=m.ConjugacyResponse)
    def conjugacy_decide_km(req: m.SubgroupConjugacyRequest):
        if req.generators:
            res = app.state.engine.is_conjugate_in_subgroup(
                _word(req.g),
                _word(req.h),
                [_word(w) for w in req.generators],
                req.km_level,
            )
        else:
            res = app.state.engine.q_exact_km(_word(req.g), _word(req.h), req.km_level)
        return m.ConjugacyResponse(**res.to_json())

    @app.post("/conjugacy/qfin", response_model=m.QFinResponse)
    def conjugacy_qfin(req: m.QFinRequest):
        s = app.state.engine.q_fin(_word(req.g), _word(req.h), req.depth)
        return m.QFinResponse(depth=req.depth, cosets=s.labels())

    @app.post("/conjugacy/stabilize", response_model=m.StabilizeResponse)
    def conjugacy_stabilize(req: m.StabilizeRequest):
        rep = app.state.engine.stabilization_depth(
            _word(req.g), _word(req.h), req.max_depth
        )
        return m.StabilizeResponse(
            depth=rep.depth,
            bound=rep.bound,
            within_bound=rep.within_bound,
            max_depth=rep.max_depth,
        )

    @app.post(
        "/conjugacy/splitting-tree",
        response_model=m.SplittingTreeResponse,
        response_model_exclude_none=True,
    )
    def conjugacy_splitting_tree(req: m.SplittingTreeRequest):
        tree = app.state.engine.build_splitting_tree(
            _word(req.g), _word(req.h), req.depth
        )
        return m.SplittingTreeResponse(
            tree=_tree_model(tree),
            depth=tree.depth(),
            dot=cj.export_dot(tree) if req.dot else None,
        )

    # ---------------------------------------------------------- quotient

    @app.post("/quotient/enumerate", response_model=m.QuotientEnumerateResponse)
    def quotient_enumerate(req: m.QuotientEnumerateRequest):
        q = qt.enumerate_quotient(req.depth)
        return m.QuotientEnumerateResponse(depth=req.depth, order=q.order)

    # ------------------------------------------------------------ verify

    @app.post("/verify/all", response_model=m.VerifyAllResponse)
    def verify_all(req: m.VerifyRequest):
        reports = vf.verify_all(workers=req.workers)
        return m.VerifyAllResponse(
            passed=all(r.passed for r in reports),
            reports=[m.VerifyResponse(**r.to_json()) for r in reports],
        )

    @app.post("/verify/{suite}", response_model=m.VerifyResponse)
    def verify_suite(suite: str, req: m.VerifyRequest):
        groups = [tuple(g) for g in req.groups] if req.groups else None
        rep = vf.verify_suite(suite, workers=req.workers, groups=groups)
        return m.VerifyResponse(**rep.to_json())

    return app
