/** Renderer checks: server-supplied values appear verbatim, never recomputed. */

import { describe, expect, it } from "vitest";

import { labelIndexForKey } from "../src/keyboard";
import {
  renderAgreement,
  renderInstance,
  renderLabelPanel,
  renderProgress,
} from "../src/render";
import { STUB_SCHEMA, stubInstance } from "./stub-server";

describe("agreement dashboard", () => {
  it("renders the backend's 0.82 as an 82% bar without recomputation", () => {
    const perLabel = Object.fromEntries(
      STUB_SCHEMA.labels.map((label) => [label.key, { accuracy: 0.9, kappa: 0.5 }]),
    );
    perLabel["change_topic"] = { accuracy: 0.82, kappa: 0.602 };
    const html = renderAgreement(
      { complete: true, n_instances: 100, per_label: perLabel },
      STUB_SCHEMA,
    );
    expect(html).toContain(">82%<");
    expect(html).toContain('width:82.0%');
    expect(html).toContain('data-n="100"');
    expect(html).toContain("κ 0.602");
  });

  it("identical annotators render as all-100% bars", () => {
    const perLabel = Object.fromEntries(
      STUB_SCHEMA.labels.map((label) => [label.key, { accuracy: 1.0, kappa: null }]),
    );
    const html = renderAgreement(
      { complete: true, n_instances: 50, per_label: perLabel },
      STUB_SCHEMA,
    );
    expect(html.match(/>100%</g)).toHaveLength(STUB_SCHEMA.labels.length);
    expect(html).toContain("κ n/a"); // undefined kappa sentinel displayed, not invented
  });

  it("incomplete subset shows the empty state, never a partial table", () => {
    const html = renderAgreement(
      { complete: false, n_instances: 100, missing: [{ instance_id: "i-1", annotator_id: "b" }] },
      STUB_SCHEMA,
    );
    expect(html).toContain("empty-state");
    expect(html).not.toContain("agreement-row");
  });
});

describe("instance view", () => {
  it("shows speakers, colors tokens by language, and marks switch points", () => {
    const html = renderInstance(stubInstance("i-9"));
    expect(html).toContain('class="speaker"');
    expect(html).toContain("lang-spa");
    expect(html).toContain("lang-eng");
    // two switch points in the stub: before token 0 and token 2 of the focus line
    expect(html.match(/switch-marker/g)).toHaveLength(2);
    // the focus line is highlighted
    expect(html).toContain('class="utterance focus"');
  });

  it("escapes HTML in token text", () => {
    const instance = stubInstance("i-x");
    instance.context[0]!.tokens[0]!.text = "<script>";
    expect(renderInstance(instance)).toContain("&lt;script&gt;");
  });
});

describe("label panel", () => {
  it("renders all labels in schema order with shortcuts and tooltips", () => {
    const html = renderLabelPanel(STUB_SCHEMA, new Set(["borrowing"]));
    const order = [...html.matchAll(/data-key="([a-z_]+)"/g)].map((match) => match[1]);
    expect(order).toEqual(STUB_SCHEMA.labels.map((label) => label.key));
    expect(html).toContain("<kbd>1</kbd>");
    expect(html).toContain("<kbd>-</kbd>"); // the 11th label
    expect(html).toContain('aria-pressed="true"');
    expect(html).toContain("title=");
  });
});

describe("keyboard mapping", () => {
  it("maps 1-9, 0, - onto the 11 schema positions", () => {
    expect(labelIndexForKey("1")).toBe(0);
    expect(labelIndexForKey("9")).toBe(8);
    expect(labelIndexForKey("0")).toBe(9);
    expect(labelIndexForKey("-")).toBe(10);
    expect(labelIndexForKey("x")).toBeNull();
  });
});

describe("progress", () => {
  it("renders the server counts verbatim", () => {
    const html = renderProgress({ annotator: "ann1", completed: 7, remaining: 93, total: 100 });
    expect(html).toContain("7 / 100 annotated");
    expect(html).toContain("93 remaining");
  });
});
