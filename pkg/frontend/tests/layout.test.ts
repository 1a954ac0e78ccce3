import { describe, expect, it } from "vitest";

import { layoutGraph } from "../src/layout.js";
import type { GraphOverview } from "../src/types.js";

const overview: GraphOverview = {
  data_flow: [
    { id: "n1", kind: "collect", label: "Collect data" },
    { id: "n2", kind: "process", label: "Process data" },
    { id: "n3", kind: "store", label: "Store data" },
  ],
  interactions: [
    { id: "n4", kind: "consent", label: "Ask permission", attached_to: "n1" },
    { id: "n5", kind: "notice", label: "Inform users", attached_to: "n1" },
    { id: "n6", kind: "control", label: "Settings", attached_to: "n3" },
  ],
};

describe("layoutGraph", () => {
  it("places data actions left to right on row 0 in flow order", () => {
    const placed = layoutGraph(overview);
    const flow = placed.filter((n) => n.row === 0);
    expect(flow.map((n) => [n.id, n.column])).toEqual([
      ["n1", 0],
      ["n2", 1],
      ["n3", 2],
    ]);
  });

  it("stacks interactions beneath their attachment target in order", () => {
    const placed = layoutGraph(overview);
    const byId = new Map(placed.map((n) => [n.id, n]));
    expect(byId.get("n4")).toMatchObject({ column: 0, row: 1, attachedTo: "n1" });
    expect(byId.get("n5")).toMatchObject({ column: 0, row: 2, attachedTo: "n1" });
    expect(byId.get("n6")).toMatchObject({ column: 2, row: 1, attachedTo: "n3" });
  });

  it("is deterministic: identical snapshots produce identical layouts", () => {
    expect(layoutGraph(overview)).toEqual(layoutGraph(overview));
    const clone = JSON.parse(JSON.stringify(overview)) as GraphOverview;
    expect(layoutGraph(clone)).toEqual(layoutGraph(overview));
  });

  it("skips interactions whose target is not in the flow", () => {
    const broken: GraphOverview = {
      data_flow: overview.data_flow,
      interactions: [
        { id: "nx", kind: "consent", label: "Dangling", attached_to: "ghost" },
      ],
    };
    expect(layoutGraph(broken).map((n) => n.id)).toEqual(["n1", "n2", "n3"]);
  });

  it("handles the empty graph", () => {
    expect(layoutGraph({ data_flow: [], interactions: [] })).toEqual([]);
  });
});
