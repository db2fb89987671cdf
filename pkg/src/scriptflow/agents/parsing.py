"""Intermediate reply formats between pipeline stages.

Stage 1 produces a design brief, stage 2 a component chain; both are
plain-text section formats chosen to survive chat-model quirks.  The
parsers are deliberately order-insensitive about "key: value" fields
but hard-fail on anything structurally wrong, because a reply that
parses cleanly here is the only thing the next stage gets to see.
"""
from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass

__all__ = [
    "AgentParseError",
    "BriefInput",
    "ChainBinding",
    "ChainStep",
    "ComponentChain",
    "DesignBrief",
    "canonical_prompt",
    "extract_json",
    "key_for",
    "parse_brief",
    "parse_chain",
    "render_brief",
    "render_chain",
]


class AgentParseError(ValueError):
    """A stage reply that does not follow the expected format."""


_NUMBER = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_HEADER = re.compile(r"^([A-Z][A-Z ]*):\s*(.*)$")
_LIST_ITEM = re.compile(r"^[-*]\s+(.*)$")
_NUMBERED = re.compile(r"^\d+[.)]\s+(.*)$")
_LABEL = re.compile(r"^[a-z][a-z0-9_]*$")


def canonical_prompt(text: str) -> str:
    """Whitespace-collapsed, lowercased prompt with trailing .!? removed."""
    collapsed = " ".join(text.split()).lower()
    return collapsed.rstrip(".!? ")


def key_for(material: str) -> str:
    """Replay key: first 16 hex chars of the payload hash."""
    return hashlib.sha256(material.encode("utf-8")).hexdigest()[:16]


def _canonical_json(data: object) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


@dataclass(frozen=True)
class BriefInput:
    name: str
    minimum: float
    maximum: float
    default: float

    def __post_init__(self) -> None:
        if not self.name.strip():
            raise AgentParseError("brief input needs a name")
        # normalize to float so authored and reparsed briefs hash alike
        object.__setattr__(self, "minimum", float(self.minimum))
        object.__setattr__(self, "maximum", float(self.maximum))
        object.__setattr__(self, "default", float(self.default))
        if not (self.minimum <= self.default <= self.maximum):
            raise AgentParseError(
                f"brief input {self.name!r}: default {self.default:g} outside "
                f"[{self.minimum:g}, {self.maximum:g}]"
            )


@dataclass(frozen=True)
class DesignBrief:
    intent: str
    inputs: tuple[BriefInput, ...]
    logic: tuple[str, ...]
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.intent.strip():
            raise AgentParseError("brief intent must be non-empty")
        if not self.logic:
            raise AgentParseError("brief needs at least one logic step")

    def to_json(self) -> dict:
        return {
            "intent": self.intent,
            "inputs": [
                {"name": i.name, "min": i.minimum, "max": i.maximum, "default": i.default}
                for i in self.inputs
            ],
            "logic": list(self.logic),
            "notes": list(self.notes),
        }

    def key_material(self) -> str:
        return _canonical_json(self.to_json())


@dataclass(frozen=True)
class ChainBinding:
    """One input binding: either a reference to an earlier step or a literal."""

    port: str
    ref: str | None = None
    value: float | str | None = None

    def __post_init__(self) -> None:
        if not self.port.strip():
            raise AgentParseError("chain binding needs a port name")
        if (self.ref is None) == (self.value is None):
            raise AgentParseError(
                f"binding {self.port!r} must carry exactly one of ref or value"
            )
        if self.value is not None and not isinstance(self.value, str):
            object.__setattr__(self, "value", float(self.value))

    def to_json(self) -> dict:
        if self.ref is not None:
            return {"port": self.port, "ref": self.ref}
        return {"port": self.port, "value": self.value}


@dataclass(frozen=True)
class ChainStep:
    label: str
    component: str
    inputs: tuple[ChainBinding, ...] = ()

    def __post_init__(self) -> None:
        if not _LABEL.match(self.label):
            raise AgentParseError(
                f"step label {self.label!r} must be lowercase [a-z0-9_] starting with a letter"
            )
        if not self.component.strip():
            raise AgentParseError(f"step {self.label!r} needs a component name")
        # a port may be bound several times, but only by references:
        # repeated refs concatenate into list ports, repeated literals
        # would just shadow each other
        seen: set[str] = set()
        for binding in self.inputs:
            if binding.port in seen and binding.ref is None:
                raise AgentParseError(
                    f"step {self.label!r} binds port {binding.port!r} twice with a literal"
                )
            if binding.ref is None:
                seen.add(binding.port)

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "component": self.component,
            "inputs": [b.to_json() for b in self.inputs],
        }


@dataclass(frozen=True)
class ComponentChain:
    steps: tuple[ChainStep, ...]
    notes: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.steps:
            raise AgentParseError("chain needs at least one step")
        labels: set[str] = set()
        for step in self.steps:
            if step.label in labels:
                raise AgentParseError(f"duplicate step label {step.label!r}")
            for binding in step.inputs:
                if binding.ref is not None and binding.ref not in labels:
                    raise AgentParseError(
                        f"step {step.label!r} references {binding.ref!r} which is not "
                        "an earlier step"
                    )
            labels.add(step.label)

    def to_json(self) -> dict:
        return {"steps": [s.to_json() for s in self.steps], "notes": list(self.notes)}

    def key_material(self) -> str:
        return _canonical_json(self.to_json())


def _format_number(value: float) -> str:
    return f"{value:g}"


def render_brief(brief: DesignBrief) -> str:
    lines = [f"INTENT: {brief.intent}", "INPUTS:"]
    for item in brief.inputs:
        lines.append(
            f"- name: {item.name} | min: {_format_number(item.minimum)} | "
            f"max: {_format_number(item.maximum)} | default: {_format_number(item.default)}"
        )
    lines.append("LOGIC:")
    for index, step in enumerate(brief.logic, start=1):
        lines.append(f"{index}. {step}")
    if brief.notes:
        lines.append("NOTES:")
        for note in brief.notes:
            lines.append(f"- {note}")
    return "\n".join(lines) + "\n"


def _render_binding(binding: ChainBinding) -> str:
    if binding.ref is not None:
        return f"{binding.port}=@{binding.ref}"
    if isinstance(binding.value, str):
        return f'{binding.port}="{binding.value}"'
    return f"{binding.port}={_format_number(binding.value)}"


def render_chain(chain: ComponentChain) -> str:
    lines = ["CHAIN:"]
    for step in chain.steps:
        parts = [f"label: {step.label}", f"component: {step.component}"]
        if step.inputs:
            parts.append("inputs: " + ", ".join(_render_binding(b) for b in step.inputs))
        lines.append("- " + " | ".join(parts))
    if chain.notes:
        lines.append("NOTES:")
        for note in chain.notes:
            lines.append(f"- {note}")
    return "\n".join(lines) + "\n"


def _sections(text: str) -> dict[str, list[str]]:
    """Split a reply into ALLCAPS-header sections, preserving line order."""
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        header = _HEADER.match(line)
        if header:
            current = header.group(1).strip()
            sections.setdefault(current, [])
            remainder = header.group(2).strip()
            if remainder:
                sections[current].append(remainder)
            continue
        if current is not None:
            sections[current].append(line)
    return sections


def _number_or_fail(raw: str, where: str) -> float:
    if not _NUMBER.match(raw):
        raise AgentParseError(f"{where}: {raw!r} is not a number")
    return float(raw)


def _fields(line: str, where: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for chunk in line.split("|"):
        if ":" not in chunk and "=" not in chunk:
            raise AgentParseError(f"{where}: expected 'key: value' fields, got {chunk.strip()!r}")
        key, _, value = chunk.partition(":")
        out[key.strip().lower()] = value.strip()
    return out


def parse_brief(text: str) -> DesignBrief:
    sections = _sections(text)
    if "INTENT" not in sections or not sections["INTENT"]:
        raise AgentParseError("brief is missing an INTENT section")
    if "INPUTS" not in sections:
        raise AgentParseError("brief is missing an INPUTS section")
    if "LOGIC" not in sections or not sections["LOGIC"]:
        raise AgentParseError("brief is missing LOGIC steps")
    intent = " ".join(sections["INTENT"])
    inputs: list[BriefInput] = []
    for line in sections["INPUTS"]:
        item = _LIST_ITEM.match(line)
        if not item:
            raise AgentParseError(f"INPUTS entries must be '- ...' lines, got {line!r}")
        fields = _fields(item.group(1), "INPUTS")
        missing = {"name", "min", "max", "default"} - set(fields)
        if missing:
            raise AgentParseError(f"INPUTS entry missing {sorted(missing)}: {line!r}")
        inputs.append(
            BriefInput(
                fields["name"],
                _number_or_fail(fields["min"], "INPUTS min"),
                _number_or_fail(fields["max"], "INPUTS max"),
                _number_or_fail(fields["default"], "INPUTS default"),
            )
        )
    logic: list[str] = []
    for line in sections["LOGIC"]:
        numbered = _NUMBERED.match(line)
        item = _LIST_ITEM.match(line)
        if numbered:
            logic.append(numbered.group(1))
        elif item:
            logic.append(item.group(1))
        else:
            raise AgentParseError(f"LOGIC entries must be numbered or '-' lines, got {line!r}")
    notes = []
    for line in sections.get("NOTES", []):
        item = _LIST_ITEM.match(line)
        notes.append(item.group(1) if item else line)
    return DesignBrief(intent, tuple(inputs), tuple(logic), tuple(notes))


def _parse_binding(raw: str, where: str) -> ChainBinding:
    if "=" not in raw:
        raise AgentParseError(f"{where}: binding {raw!r} needs port=value")
    port, _, value = raw.partition("=")
    port = port.strip()
    value = value.strip()
    if not value:
        raise AgentParseError(f"{where}: binding {port!r} has no value")
    if value.startswith("@"):
        return ChainBinding(port, ref=value[1:])
    if len(value) >= 2 and value[0] == '"' and value[-1] == '"':
        return ChainBinding(port, value=value[1:-1])
    if _NUMBER.match(value):
        return ChainBinding(port, value=float(value))
    return ChainBinding(port, value=value)


def parse_chain(text: str) -> ComponentChain:
    sections = _sections(text)
    if "CHAIN" not in sections or not sections["CHAIN"]:
        raise AgentParseError("chain reply is missing a CHAIN section")
    steps: list[ChainStep] = []
    for line in sections["CHAIN"]:
        item = _LIST_ITEM.match(line)
        if not item:
            raise AgentParseError(f"CHAIN entries must be '- ...' lines, got {line!r}")
        fields = _fields(item.group(1), "CHAIN")
        if "label" not in fields or "component" not in fields:
            raise AgentParseError(f"CHAIN entry needs label and component: {line!r}")
        bindings: list[ChainBinding] = []
        raw_inputs = fields.get("inputs", "")
        if raw_inputs:
            for chunk in raw_inputs.split(","):
                bindings.append(_parse_binding(chunk.strip(), f"step {fields['label']!r}"))
        steps.append(ChainStep(fields["label"], fields["component"], tuple(bindings)))
    notes = []
    for line in sections.get("NOTES", []):
        item = _LIST_ITEM.match(line)
        notes.append(item.group(1) if item else line)
    return ComponentChain(tuple(steps), tuple(notes))


def extract_json(text: str) -> str:
    """The longest balanced top-level {...} block, string-escape aware.

    Chat replies wrap JSON in prose or fences; this recovers the
    payload without trusting anything around it.
    """
    best: tuple[int, int] | None = None
    depth = 0
    start = -1
    in_string = False
    escaped = False
    for index, char in enumerate(text):
        if in_string:
            if escaped:
                escaped = False
            elif char == "\\":
                escaped = True
            elif char == '"':
                in_string = False
            continue
        if char == '"':
            if depth > 0:
                in_string = True
            continue
        if char == "{":
            if depth == 0:
                start = index
            depth += 1
        elif char == "}":
            if depth == 0:
                continue  # stray closer outside any object
            depth -= 1
            if depth == 0:
                if best is None or index + 1 - start > best[1] - best[0]:
                    best = (start, index + 1)
    if best is None:
        raise AgentParseError("reply contains no JSON object")
    return text[best[0]:best[1]]
