import { describe, expect, it } from "vitest";

import { containmentLayout, renderEntityGraph } from "../src/render/entityGraph.js";
import { initialViewState, type ViewState } from "../src/state.js";
import { mugTableGraph, sessionState } from "./fixtures.js";
import type { WireGraph } from "../src/types.js";

function view(graph: WireGraph): ViewState {
  return { ...initialViewState(), session: sessionState({ graph }) };
}

describe("containmentLayout", () => {
  it("nests the containment subject inside the object", () => {
    const layout = containmentLayout(mugTableGraph());
    expect(layout.parents.get("mug")).toBe("table");
    expect(layout.cyclic).toBe(false);
  });

  it("detects cycles", () => {
    const graph = mugTableGraph();
    graph.relations.push({
      id: "r2", subject: "table", object: "mug", description: "the table under the mug",
      containment: true, alt: [["under", 1.0]],
    });
    expect(containmentLayout(graph).cyclic).toBe(true);
  });

  it("ignores non-containment relations", () => {
    const graph = mugTableGraph();
    graph.relations[0].containment = false;
    expect(containmentLayout(graph).parents.size).toBe(0);
  });
});

describe("renderEntityGraph", () => {
  it("renders the mug box inside the table boundary", () => {
    const html = renderEntityGraph(view(mugTableGraph()));
    const table = html.indexOf('data-entity-id="table"');
    const tableClose = html.indexOf("</div>", table);
    const mug = html.indexOf('data-entity-id="mug"');
    expect(table).toBeGreaterThan(-1);
    expect(mug).toBeGreaterThan(table); // mug markup opens inside table's box
    expect(html).toContain('class="nested"');
    expect(tableClose).toBeGreaterThan(mug);
  });

  it("implicit entities are dashed, explicit solid", () => {
    const html = renderEntityGraph(view(mugTableGraph()));
    expect(html).toContain('class="entity-box implicit"');
    expect(html).toContain('class="entity-box explicit"');
  });

  it("falls back to a flat layout with a warning on cycles", () => {
    const graph = mugTableGraph();
    graph.relations.push({
      id: "r2", subject: "table", object: "mug", description: "d",
      containment: true, alt: [["under", 1.0]],
    });
    const html = renderEntityGraph(view(graph));
    expect(html).toContain("warning-badge");
    expect(html).toContain('class="canvas flat"');
    expect(html).not.toContain('class="nested"');
  });

  it("cards offer status toggles and probability-ordered attribute dropdowns", () => {
    const html = renderEntityGraph(view(mugTableGraph()));
    expect(html).toContain('data-edit="status"');
    expect(html).toContain('data-edit="attr"');
    expect(html.indexOf("white (60%)")).toBeLessThan(html.indexOf("blue (40%)"));
  });

  it("explains when the profile hides the graph", () => {
    const html = renderEntityGraph({ ...initialViewState(),
                                     session: sessionState({ graph: undefined }) });
    expect(html).toContain("does not expose");
  });
});
