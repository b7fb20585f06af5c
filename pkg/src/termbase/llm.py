"""Chat-completion-style HTTP backend for semantic sense mapping.

Vendor-neutral: any endpoint speaking the common ``POST /chat/completions``
shape works; URL, model, and key env var come from config.  The model is
instructed (prompt template in ``data/llm_prompt.txt``) to reply with
strictly one JSON object ``{"sense_ordinal": n, "confidence": x}``.
Non-conforming replies and transport failures are retried with
exponential backoff up to ``max_retries``, then surface as a retryable
error that leaves the entry unmapped.  Every call is logged with token
counts when the endpoint reports usage.
"""

from __future__ import annotations

import json
import logging
import os
import time
from dataclasses import dataclass
from importlib import resources
from typing import Callable

import requests

from .errors import ConfigError, RetryableBackendError
from .models import Sense

logger = logging.getLogger(__name__)


@dataclass
class LlmConfig:
    endpoint_url: str = ""
    model: str = ""
    key_env_var: str = "TERMBASE_LLM_KEY"
    max_retries: int = 3
    timeout_ms: int = 30000


def _load_prompt_template() -> str:
    return resources.files("termbase.data").joinpath(
        "llm_prompt.txt").read_text(encoding="utf-8")


class LlmBackend:
    name = "llm"
    requires_definition = False

    def __init__(self, config: LlmConfig,
                 session: requests.Session | None = None,
                 sleep: Callable[[float], None] = time.sleep,
                 backoff_base_s: float = 0.5):
        if not config.endpoint_url:
            raise ConfigError("llm.endpoint_url is not configured")
        if not config.model:
            raise ConfigError("llm.model is not configured")
        self.config = config
        self._session = session or requests.Session()
        self._sleep = sleep
        self._backoff_base_s = backoff_base_s
        self._template = _load_prompt_template()

    def score_batch(self, definition: str | None,
                    senses: list[Sense]) -> list[float]:
        ordinal, confidence = self._classify(definition, senses)
        return [confidence if s.ordinal == ordinal else 0.0 for s in senses]

    def _classify(self, definition: str | None,
                  senses: list[Sense]) -> tuple[int, float]:
        term = senses[0].source_term_key
        listing = "\n".join(
            f"{s.ordinal}. {s.gloss}" + (f" [{s.domain_tag}]" if s.domain_tag else "")
            for s in senses
        )
        prompt = self._template.format(
            term=term,
            definition=definition or "(no definition provided)",
            senses=listing,
        )
        valid_ordinals = {s.ordinal for s in senses}

        last_error = "no attempt made"
        for attempt in range(self.config.max_retries + 1):
            if attempt:
                self._sleep(self._backoff_base_s * (2 ** (attempt - 1)))
            try:
                content, usage = self._post(prompt)
            except requests.RequestException as exc:
                last_error = f"transport error: {exc}"
                logger.warning("llm call failed (attempt %d): %s",
                               attempt + 1, last_error)
                continue
            except (KeyError, IndexError, TypeError, ValueError) as exc:
                last_error = f"malformed response body: {exc}"
                logger.warning("llm response unusable (attempt %d): %s",
                               attempt + 1, last_error)
                continue
            parsed = self._parse_reply(content, valid_ordinals)
            if parsed is None:
                last_error = f"non-conforming reply: {content[:200]!r}"
                logger.warning("llm reply rejected (attempt %d): %s",
                               attempt + 1, last_error)
                continue
            logger.info(
                "llm mapped term=%r model=%s prompt_tokens=%s "
                "completion_tokens=%s", term, self.config.model,
                usage.get("prompt_tokens"), usage.get("completion_tokens"),
            )
            return parsed
        raise RetryableBackendError(
            f"llm backend gave no usable reply after "
            f"{self.config.max_retries + 1} attempts: {last_error}"
        )

    def _post(self, prompt: str) -> tuple[str, dict]:
        headers = {}
        key = os.environ.get(self.config.key_env_var, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        response = self._session.post(
            self.config.endpoint_url,
            json={
                "model": self.config.model,
                "messages": [{"role": "user", "content": prompt}],
                "temperature": 0,
            },
            headers=headers,
            timeout=self.config.timeout_ms / 1000.0,
        )
        response.raise_for_status()
        body = response.json()
        content = body["choices"][0]["message"]["content"]
        usage = body.get("usage") or {}
        return content, usage

    @staticmethod
    def _parse_reply(content: str,
                     valid_ordinals: set[int]) -> tuple[int, float] | None:
        try:
            obj = json.loads(content.strip())
        except json.JSONDecodeError:
            return None
        if not isinstance(obj, dict) or set(obj) != {"sense_ordinal", "confidence"}:
            return None
        ordinal = obj["sense_ordinal"]
        confidence = obj["confidence"]
        if not isinstance(ordinal, int) or ordinal not in valid_ordinals:
            return None
        if not isinstance(confidence, (int, float)):
            return None
        return ordinal, min(1.0, max(0.0, float(confidence)))
