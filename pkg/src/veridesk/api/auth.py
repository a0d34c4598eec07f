"""Bearer-token authentication and role checks.

Tokens are configured as a comma-separated table, e.g.

    VERIDESK_TOKENS="s3cret:instructor:prof-rivera,tok2:student:stu-001"

Each entry is ``token:role:actor_ref``. Roles:

* ``instructor`` — full access to every case and operation
* ``service``    — same access as instructor, for automation
* ``student``    — may view their own case and post responses to it
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import VerideskError

ROLES = ("instructor", "student", "service")

REVIEW_ROLES = frozenset({"instructor", "service"})


class AuthenticationError(VerideskError):
    """Missing or unrecognised credential."""

    code = "unauthorized"


class ForbiddenError(VerideskError):
    """Recognised credential lacking the required access."""

    code = "forbidden"


@dataclass(frozen=True)
class TokenInfo:
    token: str
    role: str
    actor_ref: str


def parse_token_table(raw: str) -> dict[str, TokenInfo]:
    """Parse ``token:role:actor_ref`` entries separated by commas."""
    table: dict[str, TokenInfo] = {}
    for entry in raw.split(","):
        entry = entry.strip()
        if not entry:
            continue
        parts = entry.split(":")
        if len(parts) != 3 or not all(part.strip() for part in parts):
            raise ValueError(
                f"token entry must be token:role:actor_ref, got {entry!r}"
            )
        token, role, actor_ref = (part.strip() for part in parts)
        if role not in ROLES:
            raise ValueError(f"unknown role {role!r}; expected one of {ROLES}")
        if token in table:
            raise ValueError("duplicate token in token table")
        table[token] = TokenInfo(token=token, role=role, actor_ref=actor_ref)
    return table


def authenticate(authorization: str | None, table: dict[str, TokenInfo]) -> TokenInfo:
    """Resolve an ``Authorization`` header value to a token entry."""
    if not authorization:
        raise AuthenticationError("missing bearer token")
    scheme, _, credential = authorization.partition(" ")
    if scheme.lower() != "bearer" or not credential.strip():
        raise AuthenticationError("authorization header must be 'Bearer <token>'")
    info = table.get(credential.strip())
    if info is None:
        raise AuthenticationError("unrecognised token")
    return info


def require_reviewer(info: TokenInfo) -> TokenInfo:
    """Gate for instructor-side actions (everything except student flows)."""
    if info.role not in REVIEW_ROLES:
        raise ForbiddenError(f"role {info.role!r} may not perform this action")
    return info
