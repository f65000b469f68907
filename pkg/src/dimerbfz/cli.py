"""Command-line interface and the HTTP serve mode backing the explorer UI.

Exit codes: 0 success, 1 property failure (failed axiom, non-rigid), 2 input
error.  All JSON output is deterministic (sorted keys, sorted collections).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .bfz import ShuffledWord, build_bfz_quiver, build_shuffle
from .cartan import GeneralizedCartanMatrix, build_gcm
from .cylinder import CylinderLayout, branch_decompose, build_layout, check_dimer, enumerate_faces
from .errors import DimerBfzError, ValidationError
from .emit import to_dot, to_tikz
from .potential import PathContext, Potential, potential_from_cycles, rigidity_check, superpotential
from .quiver import Quiver, Seed, mutate_seed

log = logging.getLogger("dimerbfz")


def _setup_logging():
    level = os.environ.get("DIMERBFZ_LOG", "error").lower()
    levels = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}
    if level not in levels:
        raise ValidationError(f"DIMERBFZ_LOG must be one of {sorted(levels)}")
    logging.basicConfig(level=levels[level], stream=sys.stderr)


def _parse_word(text: str):
    text = (text or "").strip()
    return tuple(int(x) for x in text.split()) if text else ()


def _parse_interleave(text):
    if text is None or not text.strip():
        return None
    return tuple(int(c) for c in text.strip())


def _gcm_from_args(args) -> GeneralizedCartanMatrix:
    if args.matrix:
        return build_gcm(json.loads(args.matrix))
    if args.type:
        return build_gcm(args.type)
    raise ValidationError("either --type or --matrix is required")


def _add_build_args(p: argparse.ArgumentParser):
    p.add_argument("--type", help="named Kac-Moody type, e.g. A3, D4, E7")
    p.add_argument("--matrix", help="explicit symmetric Cartan matrix as JSON")
    p.add_argument("--u", default="", help="reduced word for u, space separated")
    p.add_argument("--v", default="", help="reduced word for v, space separated")
    p.add_argument("--interleave", help="shuffle pattern of 0 (u) and 1 (v)")


def _build_instance(args):
    gcm = _gcm_from_args(args)
    word = build_shuffle(gcm, _parse_word(args.u), _parse_word(args.v), _parse_interleave(args.interleave))
    q = build_bfz_quiver(gcm, word)
    deco = branch_decompose(gcm.dynkin_graph())
    layout = build_layout(q, deco)
    return gcm, word, q, deco, layout


def _layout_json(layout):
    return {
        "string": {str(v): s for v, s in sorted(layout.string.items())},
        "height": {str(v): h for v, h in sorted(layout.height.items())},
        "sheets": [list(b) for b in layout.decomposition.branches],
    }


def _dump(blob) -> str:
    return json.dumps(blob, indent=2, sort_keys=True) + "\n"


def cmd_build(args) -> int:
    gcm, word, q, deco, layout = _build_instance(args)
    if args.format == "json":
        sys.stdout.write(_dump({"quiver": q.to_json(), "layout": _layout_json(layout)}))
    elif args.format == "dot":
        sys.stdout.write(to_dot(q))
    else:
        sys.stdout.write(to_tikz(q, layout))
    return 0


def _layout_from_annotated_quiver(gcm: GeneralizedCartanMatrix, blob: dict) -> CylinderLayout:
    """Layout recovered from per-vertex letter/position annotations."""
    deco = branch_decompose(gcm.dynkin_graph())
    try:
        string = {int(v["id"]): int(v["letter"]) for v in blob["vertices"]}
        positions = sorted(int(v["position"]) for v in blob["vertices"])
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"quiver JSON lacks letter/position annotations: {exc}") from exc
    height = {k: i for i, k in enumerate(positions)}
    return CylinderLayout(string, height, deco)


def cmd_verify(args) -> int:
    if args.quiver:
        gcm = _gcm_from_args(args)
        with open(args.quiver, "r", encoding="utf-8") as fh:
            blob = json.load(fh)
        quiver = Quiver.from_json(blob)
        layout = _layout_from_annotated_quiver(gcm, blob)
    else:
        gcm, word, q, deco, layout = _build_instance(args)
        quiver = q.quiver
    report = check_dimer(quiver, layout)
    sys.stdout.write(_dump(report.to_json()))
    return 0 if report.passed else 1


def _potential_from_file(ctx: PathContext, path: str) -> Potential:
    with open(path, "r", encoding="utf-8") as fh:
        blob = json.load(fh)
    cycles = [(tuple(term["arrows"]), term.get("coeff", 1)) for term in blob["cycles"]]
    return potential_from_cycles(ctx, cycles)


def cmd_rigidity(args) -> int:
    if args.quiver:
        with open(args.quiver, "r", encoding="utf-8") as fh:
            quiver = Quiver.from_json(json.load(fh))
        ctx = PathContext(quiver)
        if not args.potential:
            raise ValidationError("--potential is required with --quiver")
        S = _potential_from_file(ctx, args.potential)
        report = rigidity_check(quiver, S, length_cap=args.cap)
    else:
        gcm, word, q, deco, layout = _build_instance(args)
        faces = enumerate_faces(q.quiver, layout)
        ctx = PathContext(q.quiver)
        S = superpotential(faces, ctx)
        report = rigidity_check(q.quiver, S, layout=layout, faces=faces, length_cap=args.cap)
    sys.stdout.write(_dump(report.to_json()))
    return 0 if report.rigid else 1


class Session:
    """Single mutable seed session; mutations applied strictly serially."""

    def __init__(self, quiver: Quiver, gcm=None, word=None, layout=None, kinds=None):
        self.gcm = gcm
        self.word = word
        self.layout = layout
        self.kinds = kinds or {}
        self.initial_seed = Seed.initial(quiver)
        self.seed = self.initial_seed
        self.history: list[int] = []
        self.lock = threading.Lock()

    @staticmethod
    def from_build(gcm, word, q, deco, layout) -> "Session":
        return Session(q.quiver, gcm=gcm, word=word, layout=layout, kinds=q.kinds)

    def mutate(self, k: int):
        with self.lock:
            self.seed = mutate_seed(self.seed, k)
            self.history.append(k)

    def reset(self):
        with self.lock:
            self.seed = self.initial_seed
            self.history = []

    def replay_consistent(self) -> bool:
        seed = self.initial_seed
        for k in self.history:
            seed = mutate_seed(seed, k)
        return seed == self.seed

    def quiver_json(self) -> dict:
        base = self.seed.quiver.to_json()
        if self.word is not None:
            for rec in base["vertices"]:
                k = rec["id"]
                rec["letter"] = self.word.letter(k)
                rec["position"] = k
                rec["exchangeable"] = not rec["frozen"]
        if not self.history:
            for rec in base["arrows"]:
                if rec["id"] in self.kinds:
                    rec["kind"] = self.kinds[rec["id"]]
        return base

    def snapshot(self) -> dict:
        return {
            "quiver": self.quiver_json(),
            "variables": {str(k): v for k, v in self.seed.variable_strings().items()},
            "history": list(self.history),
        }

    def layout_json(self) -> dict:
        if self.layout is None:
            return {"valid": False, "reason": "session has no cylinder layout"}
        blob = _layout_json(self.layout)
        blob["valid"] = True
        return blob

    def faces_payload(self) -> dict:
        if self.layout is None:
            return {"valid": False, "reason": "session has no cylinder layout", "faces": []}
        try:
            faces = enumerate_faces(self.seed.quiver, self.layout)
        except DimerBfzError as exc:
            return {"valid": False, "reason": str(exc), "faces": []}
        return {"valid": True, "faces": [f.to_json() for f in faces]}

    def certificate_payload(self) -> dict:
        try:
            if self.layout is None:
                ctx = PathContext(self.seed.quiver)
                report = rigidity_check(self.seed.quiver, superpotential((), ctx))
            else:
                faces = enumerate_faces(self.seed.quiver, self.layout)
                ctx = PathContext(self.seed.quiver)
                S = superpotential(faces, ctx)
                report = rigidity_check(self.seed.quiver, S, layout=self.layout, faces=faces)
        except DimerBfzError as exc:
            return {"valid": False, "reason": str(exc)}
        blob = report.to_json()
        blob["valid"] = True
        return blob

    def save_state(self) -> dict:
        state = {"history": list(self.history)}
        if self.word is not None:
            state["matrix"] = [list(r) for r in self.gcm.entries]
            state["word"] = list(self.word.word)
        else:
            state["quiver"] = self.initial_seed.quiver.to_json()
        return state


def session_from_state(blob: dict) -> Session:
    if "quiver" in blob:
        session = Session(Quiver.from_json(blob["quiver"]))
    else:
        gcm = build_gcm(blob["matrix"])
        word = ShuffledWord(gcm.rank, tuple(blob["word"]))
        q = build_bfz_quiver(gcm, word)
        deco = branch_decompose(gcm.dynkin_graph())
        layout = build_layout(q, deco)
        session = Session.from_build(gcm, word, q, deco, layout)
    for k in blob.get("history", []):
        session.mutate(k)
    return session


def _session_from_args(args) -> Session:
    if getattr(args, "load", None):
        with open(args.load, "r", encoding="utf-8") as fh:
            return session_from_state(json.load(fh))
    if getattr(args, "quiver", None):
        with open(args.quiver, "r", encoding="utf-8") as fh:
            return Session(Quiver.from_json(json.load(fh)))
    return Session.from_build(*_build_instance(args))


def cmd_mutate(args) -> int:
    session = _session_from_args(args)
    for k in args.at or []:
        session.mutate(k)
    if args.save:
        with open(args.save, "w", encoding="utf-8") as fh:
            fh.write(_dump(session.save_state()))
    sys.stdout.write(_dump(session.snapshot()))
    return 0


def make_handler(session: Session):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):
            log.info("serve: " + fmt, *args)

        def _send(self, code: int, blob: dict):
            payload = _dump(blob).encode()
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(payload)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(payload)

        def do_GET(self):
            if self.path == "/quiver":
                self._send(200, session.snapshot())
            elif self.path == "/layout":
                self._send(200, session.layout_json())
            elif self.path == "/faces":
                self._send(200, session.faces_payload())
            elif self.path == "/certificate":
                self._send(200, session.certificate_payload())
            else:
                self._send(404, {"error": f"unknown path {self.path}"})

        def do_POST(self):
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length) if length else b""
            if self.path == "/mutate":
                try:
                    body = json.loads(raw.decode() or "null")
                    vertex = body["vertex"]
                    if not isinstance(vertex, int):
                        raise TypeError("vertex must be an integer")
                except (ValueError, TypeError, KeyError) as exc:
                    self._send(400, {"error": f"malformed body: {exc}"})
                    return
                try:
                    session.mutate(vertex)
                except ValidationError as exc:
                    self._send(409, {"error": str(exc)})
                    return
                self._send(200, session.snapshot())
            elif self.path == "/reset":
                session.reset()
                self._send(200, session.snapshot())
            else:
                self._send(404, {"error": f"unknown path {self.path}"})

    return Handler


def serve(session: Session, port: int, ready_line=True):
    server = ThreadingHTTPServer(("127.0.0.1", port), make_handler(session))
    if ready_line:
        print(f"serving on http://127.0.0.1:{server.server_address[1]}", flush=True)
    return server


def cmd_serve(args) -> int:
    session = _session_from_args(args)
    server = serve(session, args.port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dimerbfz")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a quiver and its cylinder layout")
    _add_build_args(p)
    p.add_argument("--format", choices=("json", "dot", "tikz"), default="json")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="check the dimer-model axioms")
    _add_build_args(p)
    p.add_argument("--quiver", help="annotated quiver JSON file (instead of words)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("rigidity", help="certify rigidity of the superpotential")
    _add_build_args(p)
    p.add_argument("--quiver", help="quiver JSON file (instead of build args)")
    p.add_argument("--potential", help="potential JSON file, used with --quiver")
    p.add_argument("--cap", type=int, default=None, help="simple-cycle length cap")
    p.set_defaults(func=cmd_rigidity)

    p = sub.add_parser("mutate", help="apply seed mutations")
    _add_build_args(p)
    p.add_argument("--quiver", help="plain quiver JSON file (instead of words)")
    p.add_argument("--at", type=int, action="append", help="vertex to mutate, repeatable")
    p.add_argument("--save", help="write session state JSON here")
    p.add_argument("--load", help="load session state JSON")
    p.set_defaults(func=cmd_mutate)

    p = sub.add_parser("serve", help="serve the engine over HTTP for the explorer UI")
    _add_build_args(p)
    p.add_argument("--quiver", help="plain quiver JSON file (instead of words)")
    p.add_argument("--port", type=int, default=8642)
    p.add_argument("--load", help="load session state JSON")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    try:
        _setup_logging()
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DimerBfzError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
