"""Provider implementations behind one completion contract.

A provider turns a prompt into raw text. Identity (provider name + model
name) is recorded in every transcript so audits can tell which backend
produced an artifact.
"""

from __future__ import annotations

import threading
from typing import Any, Mapping, Protocol, Sequence

import httpx

from .errors import ProviderError, ProviderTimeoutError
from .prompts import task_from_prompt


class Provider(Protocol):
    name: str
    model: str

    def complete(self, prompt: str, params: Mapping[str, Any]) -> str: ...


class MockProvider:
    """Script-driven provider for hermetic tests and offline runs.

    The script maps task name -> queue of canned raw responses. Routing
    reads the task marker line the templates embed, so the mock stays a
    plain text-in/text-out provider with no knowledge of the calling code.
    """

    name = "mock"

    def __init__(self, script: Mapping[str, Sequence[str]], model: str = "scripted-1"):
        self.model = model
        self._queues = {task: list(responses) for task, responses in script.items()}
        self._lock = threading.Lock()
        self.calls: list[str] = []

    def complete(self, prompt: str, params: Mapping[str, Any]) -> str:
        task = task_from_prompt(prompt)
        if task is None:
            raise ProviderError("mock provider cannot route a prompt without a task marker")
        with self._lock:
            self.calls.append(task.value)
            queue = self._queues.get(task.value)
            if not queue:
                raise ProviderError(
                    f"mock script has no response left for task {task.value!r}"
                )
            return queue.pop(0)


class HttpProvider:
    """OpenAI-style chat-completions client over HTTP."""

    def __init__(
        self,
        base_url: str,
        api_key: str,
        model: str,
        timeout_seconds: float = 60.0,
        name: str = "http",
    ):
        self.name = name
        self.model = model
        self._base_url = base_url.rstrip("/")
        self._api_key = api_key
        self._timeout = timeout_seconds

    def complete(self, prompt: str, params: Mapping[str, Any]) -> str:
        body = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            **params,
        }
        try:
            response = httpx.post(
                f"{self._base_url}/chat/completions",
                json=body,
                headers={"Authorization": f"Bearer {self._api_key}"},
                timeout=self._timeout,
            )
            response.raise_for_status()
            payload = response.json()
            return payload["choices"][0]["message"]["content"]
        except httpx.TimeoutException as exc:
            raise ProviderTimeoutError(f"provider timed out after {self._timeout}s") from exc
        except httpx.HTTPError as exc:
            raise ProviderError(f"provider request failed: {exc}") from exc
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderError(f"provider returned an unexpected response shape: {exc}") from exc
