"""External parser hook.

Matching with an entailment reranker needs dependency parses.  Parsing is
delegated to an external tool through one of two transports:

  command:  the target command reads raw sentences on stdin (one per line)
            and writes CoNLL-U on stdout
  http:     POST text/plain to the target URL; the response body is CoNLL-U

With mode "none" no parsing is available and only fast-filter matching
works.
"""

from __future__ import annotations

import shlex
import subprocess
from dataclasses import dataclass
from typing import Optional

import httpx

from .errors import MalformedParse

MODES = ("none", "command", "http")


@dataclass(frozen=True)
class ParserHook:
    mode: str = "none"
    target: Optional[str] = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown parser hook mode {self.mode!r}")
        if self.mode != "none" and not self.target:
            raise ValueError(f"parser hook mode {self.mode!r} requires a target")

    @classmethod
    def from_config(cls, config: dict) -> "ParserHook":
        section = config.get("parser", {})
        return cls(mode=section.get("mode", "none"),
                   target=section.get("target"))

    def available(self) -> bool:
        return self.mode != "none"

    def parse(self, texts) -> str:
        """CoNLL-U output for the given sentences, one block per sentence."""
        payload = "\n".join(texts)
        if self.mode == "command":
            proc = subprocess.run(
                shlex.split(self.target), input=payload,
                capture_output=True, text=True,
            )
            if proc.returncode != 0:
                raise MalformedParse(
                    f"parser command failed ({proc.returncode}): {proc.stderr.strip()}"
                )
            return proc.stdout
        if self.mode == "http":
            resp = httpx.post(self.target, content=payload,
                              headers={"content-type": "text/plain"})
            if resp.status_code != 200:
                raise MalformedParse(f"parser service returned {resp.status_code}")
            return resp.text
        raise MalformedParse("no parser hook configured")
