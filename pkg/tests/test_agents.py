"""Pipeline stages: structured-text round-trips, mock replay, retries."""
import json

import pytest

from scriptflow.agents.backends import BackendConfig, BackendError, MockBackend, make_backend
from scriptflow.agents.parsing import (
    AgentParseError,
    BriefInput,
    ChainBinding,
    ChainStep,
    ComponentChain,
    DesignBrief,
    canonical_prompt,
    extract_json,
    key_for,
    parse_brief,
    parse_chain,
    render_brief,
    render_chain,
)
from scriptflow.agents.pipeline import StageError, run_pipeline, transcript_to_json
from scriptflow.wire import dumps_canonical, serialize


def test_canonical_prompt():
    assert canonical_prompt("  Make   a TRUSS!  ") == "make a truss"
    assert canonical_prompt("a truss") == "a truss"
    assert canonical_prompt("Bridge...") == "bridge"


def test_key_is_short_stable_hex():
    key = key_for(canonical_prompt("a truss"))
    assert key == key_for("a truss")
    assert len(key) == 16
    int(key, 16)


def test_brief_input_validation():
    made = BriefInput("width", 1, 10, 5)
    assert made.minimum == 1.0 and isinstance(made.minimum, float)
    with pytest.raises(AgentParseError):
        BriefInput("width", 10.0, 1.0, 5.0)
    with pytest.raises(AgentParseError):
        BriefInput("width", 1.0, 10.0, 99.0)


def test_brief_render_parse_round_trip():
    brief = DesignBrief(
        intent="A small test scene.",
        inputs=(BriefInput("width", 1.0, 10.0, 5.0), BriefInput("count", 2.0, 8.0, 4.0)),
        logic=("Make a base point.", "Sweep it upward."),
        notes=("Nothing fancy.",),
    )
    parsed = parse_brief(render_brief(brief))
    assert parsed == brief
    assert parsed.key_material() == brief.key_material()


def test_brief_requires_intent_and_logic():
    with pytest.raises(AgentParseError):
        parse_brief("INPUTS:\n- a: min 0 max 1 default 0\n")


def test_chain_binding_exactly_one_of_ref_value():
    with pytest.raises(AgentParseError):
        ChainBinding("X", ref="a", value=1.0)
    with pytest.raises(AgentParseError):
        ChainBinding("X")
    assert ChainBinding("X", value=3).value == 3.0


def test_chain_step_label_rules():
    with pytest.raises(AgentParseError):
        ChainStep("Bad Label", "Circle", ())
    with pytest.raises(AgentParseError):
        ChainStep("9lives", "Circle", ())
    ChainStep("ok_label2", "Circle", ())


def test_chain_rejects_duplicate_literal_binding():
    with pytest.raises(AgentParseError, match="twice"):
        ChainStep("c", "Circle", (
            ChainBinding("Radius", value=1.0), ChainBinding("Radius", value=2.0),
        ))


def test_chain_allows_repeated_ref_bindings():
    step = ChainStep("p", "Polyline", (
        ChainBinding("Vertices", ref="a"), ChainBinding("Vertices", ref="b"),
    ))
    assert len(step.inputs) == 2


def test_chain_refs_must_point_backward():
    with pytest.raises(AgentParseError, match="later|unknown|earlier"):
        ComponentChain((
            ChainStep("a", "Circle", (ChainBinding("Radius", ref="b"),)),
            ChainStep("b", "Number Slider", ()),
        ))


def test_chain_rejects_duplicate_labels():
    with pytest.raises(AgentParseError, match="label"):
        ComponentChain((
            ChainStep("a", "Circle", ()), ChainStep("a", "Circle", ()),
        ))


def test_chain_render_parse_round_trip():
    chain = ComponentChain((
        ChainStep("width", "Number Slider", (
            ChainBinding("min", value=1.0), ChainBinding("max", value=10.0),
            ChainBinding("value", value=4.0),
        )),
        ChainStep("base", "Construct Point", (ChainBinding("X", value=2.5),)),
        ChainStep("tag", "Panel", (ChainBinding("Content", value="hello world"),)),
        ChainStep("ring", "Circle", (
            ChainBinding("Center", ref="base"), ChainBinding("Radius", ref="width"),
        )),
    ))
    parsed = parse_chain(render_chain(chain))
    assert parsed == chain
    assert parsed.key_material() == chain.key_material()


def test_extract_json_plain_and_fenced():
    body = '{"a": [1, 2], "b": {"c": "}"}}'
    assert extract_json(body) == body
    assert extract_json(f"```json\n{body}\n```") == body
    assert extract_json(f"Here you go:\n\n{body}\n\nEnjoy!") == body


def test_extract_json_picks_largest_block():
    text = 'first {"x": 1} then {"y": {"z": [1,2,3]}, "w": "ok"}'
    assert json.loads(extract_json(text))["w"] == "ok"


def test_extract_json_rejects_no_object():
    with pytest.raises(AgentParseError):
        extract_json("no json here at all")


def test_mock_backend_miss_raises(fixtures_dir):
    backend = MockBackend(fixtures_dir)
    with pytest.raises(StageError) as err:
        run_pipeline("sculpt a dragon", backend)
    assert err.value.stage == 1
    assert "no recorded reply" in str(err.value)


def test_mock_backend_echo_fallback(fixtures_dir):
    backend = MockBackend(fixtures_dir, fallback="echo")
    with pytest.raises(StageError) as err:
        run_pipeline("sculpt a dragon", backend)
    # stage 1 echoes the prompt, which fails brief parsing after retries
    assert err.value.stage == 1
    assert err.value.attempts == 3


def test_empty_prompt_rejected(fixtures_dir):
    with pytest.raises(StageError) as err:
        run_pipeline("   ", MockBackend(fixtures_dir))
    assert err.value.stage == 1


def test_pipeline_replays_scene(catalog, fixtures_dir):
    backend = MockBackend(fixtures_dir)
    result = run_pipeline("a truss", backend, catalog)
    assert [r.stage for r in result.transcript.stages] == [1, 2, 3]
    assert all(r.attempts == 1 for r in result.transcript.stages)
    assert len(result.document.nodes) == 11
    assert result.document.prompt == "a truss"
    assert result.brief is not None and result.chain is not None


def test_pipeline_deterministic(catalog, fixtures_dir):
    backend = MockBackend(fixtures_dir)
    a = run_pipeline("a beach umbrella", backend, catalog)
    b = run_pipeline("a beach umbrella", backend, catalog)
    ta = dumps_canonical(transcript_to_json(a.transcript))
    tb = dumps_canonical(transcript_to_json(b.transcript))
    assert ta == tb
    assert serialize(a.document) == serialize(b.document)


def test_make_backend_from_config(fixtures_dir):
    backend = make_backend(BackendConfig(backend="mock", fixtures_dir=fixtures_dir))
    assert isinstance(backend, MockBackend)
    with pytest.raises(BackendError):
        make_backend(BackendConfig(backend="carrier-pigeon"))


class FlakyBackend:
    """Garbage twice, then delegates: exercises the retry loop."""

    def __init__(self, inner):
        self.inner = inner
        self.calls = 0

    def complete(self, request):
        self.calls += 1
        if self.calls <= 2:
            return "?????"
        return self.inner.complete(request)


def test_stage_retries_up_to_three(catalog, fixtures_dir):
    flaky = FlakyBackend(MockBackend(fixtures_dir))
    result = run_pipeline("a truss", flaky, catalog)
    records = result.transcript.stages
    assert records[0].attempts == 3
    assert records[1].attempts == 1


class AlwaysGarbage:
    def complete(self, request):
        return "not parseable as anything"


def test_stage_fails_after_three_attempts(catalog):
    with pytest.raises(StageError) as err:
        run_pipeline("a truss", AlwaysGarbage(), catalog)
    assert err.value.stage == 1
    assert err.value.attempts == 3
