import { describe, expect, it } from "vitest";

import { SequenceGate } from "../src/sequence.js";

describe("SequenceGate", () => {
  it("renders an uncontested response", () => {
    const gate = new SequenceGate();
    const t = gate.next();
    expect(gate.shouldRender(t)).toBe(true);
  });

  it("renders each ticket at most once", () => {
    const gate = new SequenceGate();
    const t = gate.next();
    expect(gate.shouldRender(t)).toBe(true);
    expect(gate.shouldRender(t)).toBe(false);
  });

  it("discards a response once a newer request exists", () => {
    const gate = new SequenceGate();
    const slow = gate.next();
    const fast = gate.next();
    expect(gate.shouldRender(fast)).toBe(true);
    expect(gate.shouldRender(slow)).toBe(false);
  });

  it("discards the older response even when it lands first", () => {
    const gate = new SequenceGate();
    const first = gate.next();
    const second = gate.next();
    // first completes before second: still stale, a newer request is out
    expect(gate.shouldRender(first)).toBe(false);
    expect(gate.shouldRender(second)).toBe(true);
  });

  it("never renders out of order under random completion", () => {
    const gate = new SequenceGate();
    const tickets: number[] = [];
    for (let i = 0; i < 200; i++) {
      tickets.push(gate.next());
    }
    // shuffle deterministically
    let seed = 12345;
    const shuffled = [...tickets].sort(() => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return (seed / 2147483648) - 0.5;
    });
    const rendered = shuffled.filter((t) => gate.shouldRender(t));
    expect(rendered).toEqual([200]);
  });
});
