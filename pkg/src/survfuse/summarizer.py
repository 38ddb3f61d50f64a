"""Pathology report summarization client.

Builds the fixed two-system-message prompt and drives batch summarization
through a chat-completions-style HTTP endpoint with greedy decoding
(temperature 0, max_tokens 1024, fixed seed).

Environment variables used by the CLI:
  SURVFUSE_LLM_ENDPOINT  chat-completions URL
  SURVFUSE_LLM_TOKEN     bearer auth token
  SURVFUSE_LLM_MODEL     model name string
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import requests

SYSTEM_ROLE_MESSAGE = "You are a helpful assistant for digital pathology."

INSTRUCTION_MESSAGE = (
    "Instructions:\n"
    "Extract and repeat the results of the following pathology report in a single paragraph.\n"
    "Focus on test results, diagnoses and clinical history.\n"
    "Include results of the microscopic description.\n"
    "Omit the gross or macroscopic description.\n"
    "Do not acknowledge this prompt.\n"
    "Do not give additional comments after your final answer."
)


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "system" or "user"
    content: str

    def __post_init__(self):
        if not self.content:
            raise ValueError("message content must be nonempty")


@dataclass(frozen=True)
class DecodingParams:
    temperature: float = 0.0
    max_tokens: int = 1024
    seed: int = 0
    greedy: bool = True


def build_prompt(report_text: str):
    """The fixed summarization prompt: two system messages, then the report."""
    if not report_text:
        raise ValueError("empty report")
    return [
        ChatMessage("system", SYSTEM_ROLE_MESSAGE),
        ChatMessage("system", INSTRUCTION_MESSAGE),
        ChatMessage("user", report_text),
    ]


def build_request_body(report_text: str, model: str, params: DecodingParams) -> dict:
    messages = build_prompt(report_text)
    return {
        "model": model,
        "messages": [{"role": m.role, "content": m.content} for m in messages],
        "temperature": params.temperature,
        "max_tokens": params.max_tokens,
        "seed": params.seed,
    }


def _request_once(session, endpoint, token, body, timeout):
    headers = {"Content-Type": "application/json"}
    if token:
        headers["Authorization"] = f"Bearer {token}"
    resp = session.post(endpoint, json=body, headers=headers, timeout=timeout)
    resp.raise_for_status()
    payload = resp.json()
    return payload["choices"][0]["message"]["content"]


def summarize_one(
    session,
    endpoint: str,
    token: str | None,
    model: str,
    report_text: str,
    params: DecodingParams,
    attempts: int = 3,
    backoff: float = 1.0,
):
    """Single report with exponential-backoff retries; returns summary text."""
    body = build_request_body(report_text, model, params)
    last_err = None
    for attempt in range(attempts):
        try:
            return _request_once(session, endpoint, token, body, timeout=120)
        except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
            last_err = exc
            if attempt < attempts - 1:
                time.sleep(backoff * (2**attempt))
    raise RuntimeError(f"summarization failed after {attempts} attempts: {last_err}")


def summarize_batch(
    reports,
    endpoint: str,
    token: str | None = None,
    model: str = "",
    params: DecodingParams | None = None,
    max_in_flight: int = 4,
    attempts: int = 3,
    backoff: float = 1.0,
    session=None,
):
    """Summarize (case_id, text) pairs; one request each, bounded concurrency.

    Per-case failures never abort the batch. Returns (successes, failures):
    successes is [(case_id, summary)] in input order; failures is
    [(case_id, reason)] for the remainder.
    """
    if not reports:
        raise ValueError("empty report batch")
    if params is None:
        params = DecodingParams()
    own_session = session is None
    if own_session:
        session = requests.Session()
    try:
        def work(item):
            case_id, text = item
            try:
                summary = summarize_one(
                    session, endpoint, token, model, text, params,
                    attempts=attempts, backoff=backoff,
                )
                return case_id, summary, None
            except Exception as exc:  # noqa: BLE001 - failure isolation by design
                return case_id, None, str(exc)

        with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
            results = list(pool.map(work, reports))
    finally:
        if own_session:
            session.close()

    successes = [(cid, summary) for cid, summary, err in results if err is None]
    failures = [(cid, err) for cid, _, err in results if err is not None]
    return successes, failures


def read_reports_jsonl(path):
    """reports.jsonl lines of {case_id, text} -> list of (case_id, text)."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            out.append((obj["case_id"], obj["text"]))
    return out


def write_summaries_jsonl(successes, failures, out_dir):
    """Write summaries.jsonl ({case_id, summary}) and failures.jsonl."""
    from pathlib import Path

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "summaries.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for case_id, summary in successes:
            fh.write(json.dumps({"case_id": case_id, "summary": summary}) + "\n")
    with open(out_dir / "failures.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for case_id, reason in failures:
            fh.write(json.dumps({"case_id": case_id, "reason": reason}) + "\n")
