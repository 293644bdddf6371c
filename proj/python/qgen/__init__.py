"""Question-generation pipeline: chunking, key terms, quiz assembly, metrics and feedback."""

import json

from ._qgen import (
    BackendError,
    ConflictError,
    IoError,
    NotFoundError,
    QgenError,
    ValidationError,
    clean_text,
    keyterms,
    rouge_l,
    segment_sentences,
    tokenize_eval,
    vqg_prompts,
    _Service,
)
from . import _qgen

__all__ = [
    "BackendError",
    "ConflictError",
    "IoError",
    "NotFoundError",
    "QgenError",
    "ValidationError",
    "Service",
    "bleu4",
    "clean_text",
    "keyterms",
    "mock_respond",
    "rouge_l",
    "segment_sentences",
    "tokenize_eval",
    "vqg_prompts",
]


def bleu4(candidates, references):
    """Corpus BLEU-4 plus mean ROUGE-L F1 as a dict."""
    return json.loads(_qgen.bleu4_json(list(candidates), list(references)))


def mock_respond(op, payload, seed=0):
    """Response of the deterministic mock backend for one op."""
    return json.loads(_qgen.mock_respond_json(op, json.dumps(payload), seed))


class Service:
    """Store-backed pipeline: upload, generate, grade, rate, export."""

    def __init__(self, store, backend_seed=0, **config):
        cfg = dict(config)
        cfg["store"] = str(store)
        cfg.setdefault("backend", {"mode": "mock", "seed": backend_seed})
        self._svc = _Service(json.dumps(cfg))

    def upload(self, body, format="detect", title=""):
        if isinstance(body, str):
            body = body.encode("utf-8")
        return json.loads(self._svc.upload(body, format, title))

    def generate(self, doc_id, spec=None, created_at=""):
        return json.loads(self._svc.generate(doc_id, json.dumps(spec or {}), created_at))

    def get_quiz(self, quiz_id, include_keys=False):
        return json.loads(self._svc.get_quiz(quiz_id, include_keys))

    def submit(self, quiz_id, answers):
        return json.loads(self._svc.submit(quiz_id, json.dumps(answers)))

    def rate(self, question_id, stars, session):
        return json.loads(self._svc.rate(question_id, stars, session))

    def export_feedback(self, min_records=0):
        text, warning = self._svc.export_feedback(min_records)
        rows = [json.loads(line) for line in text.splitlines() if line]
        return rows, warning

    def feedback_stats(self):
        return json.loads(self._svc.feedback_stats())
