/** Deterministic two-layer graph layout: data actions form a left-to-right
 * sequence on row 0; interaction nodes stack beneath their attachment target
 * in the order the server reports them. Pure function of the snapshot, so the
 * same graph always renders identically. */

import type { GraphOverview } from "./types.js";

export interface PlacedNode {
  id: string;
  kind: string;
  label: string;
  /** column index: the data action's position in the flow */
  column: number;
  /** row 0 for data actions; 1..n for stacked interactions */
  row: number;
  attachedTo: string | null;
}

export function layoutGraph(overview: GraphOverview): PlacedNode[] {
  const placed: PlacedNode[] = overview.data_flow.map((node, index) => ({
    id: node.id,
    kind: node.kind,
    label: node.label,
    column: index,
    row: 0,
    attachedTo: null,
  }));
  const columnOf = new Map(overview.data_flow.map((node, index) => [node.id, index]));
  const depth = new Map<string, number>();
  for (const interaction of overview.interactions) {
    const column = columnOf.get(interaction.attached_to);
    if (column === undefined) {
      // dangling attachment would violate a server invariant; skip defensively
      continue;
    }
    const row = (depth.get(interaction.attached_to) ?? 0) + 1;
    depth.set(interaction.attached_to, row);
    placed.push({
      id: interaction.id,
      kind: interaction.kind,
      label: interaction.label,
      column,
      row,
      attachedTo: interaction.attached_to,
    });
  }
  return placed;
}
