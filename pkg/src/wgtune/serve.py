"""Prediction daemon: newline-delimited JSON over localhost TCP.

Requests::

    {"type": "predict", "scenario": {"device": {...}, "kernel": {...}, "dataset": {...}},
     "max_wgsize": 256, "refused": [[32, 8], ...]}
    {"type": "refused", "scenario_id": "...", "w_c": 32, "w_r": 4}

Both are answered with ``{"type": "wgsize", "scenario_id": ..., "w_c": ..., "w_r": ...}``
or ``{"type": "error", "message": ...}``. Refusals are remembered per
connection, so a refusal report yields the next best proposal.
"""
from __future__ import annotations

import json
import logging
import socketserver
from dataclasses import dataclass, field

from .datastore import scenario_from_json
from .errors import InvalidArgument, WgTuneError
from .features import extract
from .space import ConstraintContext, Probe, WorkgroupSize
from .techniques import TrainedTuner
from .tuner import rank_candidates, tune_classify

log = logging.getLogger(__name__)

MAX_LINE = 1 << 20


@dataclass
class _Pending:
    scenario: object
    features: object
    max_wgsize: int
    refused: set = field(default_factory=set)


class Session:
    """Per-connection state: the scenarios asked about and their refusals."""

    def __init__(self, tuner: TrainedTuner):
        self.tuner = tuner
        self.pending: dict[str, _Pending] = {}

    def handle(self, msg) -> dict:
        try:
            if not isinstance(msg, dict):
                raise InvalidArgument("message must be a JSON object")
            kind = msg.get("type")
            if kind == "predict":
                return self._predict(msg)
            if kind == "refused":
                return self._refused(msg)
            raise InvalidArgument(f"unknown message type {kind!r}")
        except (WgTuneError, KeyError, TypeError, ValueError) as e:
            return {"type": "error", "message": str(e) or type(e).__name__}

    def _predict(self, msg) -> dict:
        s = scenario_from_json(msg.get("scenario"))
        m = msg.get("max_wgsize")
        if isinstance(m, bool) or not isinstance(m, int) or m < 4:
            raise InvalidArgument("max_wgsize must be an integer >= 4")
        refused = {_size(pair) for pair in msg.get("refused", [])}
        entry = _Pending(s, extract(s), m, refused)
        self.pending[s.id] = entry
        return self._propose(entry)

    def _refused(self, msg) -> dict:
        sid = msg.get("scenario_id")
        if sid not in self.pending:
            raise InvalidArgument(f"no prediction was requested for scenario {sid!r} on this connection")
        entry = self.pending[sid]
        entry.refused.add(_size([msg.get("w_c"), msg.get("w_r")]))
        return self._propose(entry)

    def _propose(self, entry: _Pending) -> dict:
        # sizes over the maximum are illegal anyway, not refusals
        refused = frozenset(w for w in entry.refused if w.area() <= entry.max_wgsize)
        ctx = ConstraintContext(entry.max_wgsize, entry.max_wgsize, refused)
        t = self.tuner
        if t.technique.is_classifier:
            w, _ = tune_classify(t.model, entry.scenario, ctx, t.strategy, lambda w: Probe.LEGAL, entry.features)
        else:
            ranked = rank_candidates(t.model, entry.scenario, ctx, t.technique.mode, entry.features)
            if not ranked:
                raise InvalidArgument(f"every workgroup size under {entry.max_wgsize} has been refused")
            w = ranked[0]
        return {"type": "wgsize", "scenario_id": entry.scenario.id, "w_c": w.w_c, "w_r": w.w_r}


def _size(pair) -> WorkgroupSize:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise InvalidArgument(f"expected a [w_c, w_r] pair, got {pair!r}")
    c, r = pair
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (c, r)):
        raise InvalidArgument(f"workgroup dimensions must be integers, got {pair!r}")
    return WorkgroupSize(c, r)


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        session = Session(self.server.tuner)
        while True:
            line = self.rfile.readline(MAX_LINE + 1)
            if not line:
                return
            if len(line) > MAX_LINE:
                self._send({"type": "error", "message": "message too long"})
                return
            if not line.strip():
                continue
            try:
                msg = json.loads(line.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as e:
                reply = {"type": "error", "message": f"malformed JSON: {e}"}
            else:
                reply = session.handle(msg)
            try:
                self._send(reply)
            except OSError:
                return

    def _send(self, doc):
        self.wfile.write(json.dumps(doc).encode("utf-8") + b"\n")
        self.wfile.flush()


class PredictionServer(socketserver.ThreadingTCPServer):
    daemon_threads = True
    allow_reuse_address = False

    def __init__(self, tuner: TrainedTuner, host: str = "127.0.0.1", port: int = 0):
        self.tuner = tuner
        super().__init__((host, port), _Handler)

    @property
    def port(self) -> int:
        return self.server_address[1]
