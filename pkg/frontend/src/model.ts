/**
 * Canvas-side mirror of a script document: box layout, port rows,
 * diagnostic badges, slider widget state. Pure data in, pure data
 * out; painting lives in graphview.ts and the DOM layer.
 */
import type {
  ComponentSpec,
  DiagnosticJson,
  RegistryResponse,
  SliderPin,
  WireDocument,
  WireEdge,
} from "./api.js";

export const HEADER_H = 24;
export const ROW_H = 18;
export const MIN_WIDTH = 140;

export interface Badge {
  rule: string;
  severity: "error" | "warning" | "info" | "failure";
  message: string;
  repairId?: string;
}

export interface NodeBox {
  id: number;
  component: string;
  x: number;
  y: number;
  width: number;
  height: number;
  inputs: string[];
  outputs: string[];
  badges: Badge[];
  failed: boolean;
}

export interface EdgeView {
  edge: WireEdge;
  fromIndex: number;
  toIndex: number;
}

export interface SliderState {
  node: number;
  port: string;
  min: number;
  max: number;
  value: number;
}

export interface CanvasModel {
  boxes: NodeBox[];
  edges: EdgeView[];
  sliders: SliderState[];
  /** Node id highlighted on the canvas; null when nothing is picked. */
  selection: number | null;
}

function isSliderPin(pin: unknown): pin is SliderPin {
  return typeof pin === "object" && pin !== null && "slider" in pin;
}

function specByName(registry: RegistryResponse | null): Map<string, ComponentSpec> {
  const specs = new Map<string, ComponentSpec>();
  if (registry) {
    for (const spec of registry.components) {
      specs.set(spec.name, spec);
    }
  }
  return specs;
}

/** Port rows for a node: registry spec when known, else reconstructed
 * from whatever the document references (pins and edge endpoints). */
function portRows(
  node: WireDocument["nodes"][number],
  spec: ComponentSpec | undefined,
  edges: WireEdge[],
): { inputs: string[]; outputs: string[] } {
  if (spec) {
    return {
      inputs: spec.inputs.map((p) => p.name),
      outputs: spec.outputs.map((p) => p.name),
    };
  }
  const inputs = new Set<string>(Object.keys(node.pins ?? {}));
  const outputs = new Set<string>();
  for (const edge of edges) {
    if (edge.to.id === node.id) {
      inputs.add(edge.to.port);
    }
    if (edge.from.id === node.id) {
      outputs.add(edge.from.port);
    }
  }
  return { inputs: [...inputs], outputs: [...outputs] };
}

function portIndex(names: string[], spec: ComponentSpec | undefined, raw: string, side: "inputs" | "outputs"): number {
  const direct = names.indexOf(raw);
  if (direct >= 0) {
    return direct;
  }
  if (spec) {
    const ports = side === "inputs" ? spec.inputs : spec.outputs;
    for (let i = 0; i < ports.length; i++) {
      const port = ports[i]!;
      if (port.name === raw || port.aliases.includes(raw)) {
        return i;
      }
    }
  }
  return 0;
}

/** Layered fallback placement, same formula the server uses when a
 * document arrives without positions: x by depth, y by row. */
export function layeredLayout(document: WireDocument): Map<number, { x: number; y: number }> {
  const depth = new Map<number, number>();
  for (const node of document.nodes) {
    depth.set(node.id, 0);
  }
  // relax along edges; documents are acyclic so |nodes| passes suffice
  for (let pass = 0; pass < document.nodes.length; pass++) {
    let changed = false;
    for (const edge of document.edges) {
      const want = (depth.get(edge.from.id) ?? 0) + 1;
      if (want > (depth.get(edge.to.id) ?? 0)) {
        depth.set(edge.to.id, want);
        changed = true;
      }
    }
    if (!changed) {
      break;
    }
  }
  const rows = new Map<number, number>();
  const positions = new Map<number, { x: number; y: number }>();
  for (const node of document.nodes) {
    const d = depth.get(node.id) ?? 0;
    const row = rows.get(d) ?? 0;
    rows.set(d, row + 1);
    positions.set(node.id, { x: d * 220.0, y: row * 120.0 });
  }
  return positions;
}

function boxWidth(component: string): number {
  return Math.max(MIN_WIDTH, 24 + component.length * 8);
}

export function buildModel(
  document: WireDocument,
  registry: RegistryResponse | null,
  diagnostics: DiagnosticJson[] = [],
  failures: number[] = [],
): CanvasModel {
  const specs = specByName(registry);
  const allZero =
    document.nodes.length > 1 &&
    document.nodes.every((n) => n.position.x === 0 && n.position.y === 0);
  const fallback = allZero ? layeredLayout(document) : null;

  const badges = new Map<number, Badge[]>();
  const push = (node: number, badge: Badge) => {
    const list = badges.get(node) ?? [];
    list.push(badge);
    badges.set(node, list);
  };
  for (const diag of diagnostics) {
    const target = diag.node ?? diag.edge?.to.id;
    if (target === undefined) {
      continue;
    }
    push(target, {
      rule: diag.rule,
      severity: diag.severity,
      message: diag.message,
      repairId: diag.repair?.id,
    });
  }
  const failed = new Set(failures);
  for (const node of failed) {
    push(node, { rule: "failure", severity: "failure", message: "evaluation failed" });
  }

  const boxes: NodeBox[] = [];
  const boxById = new Map<number, NodeBox>();
  for (const node of document.nodes) {
    const spec = specs.get(node.component);
    const { inputs, outputs } = portRows(node, spec, document.edges);
    const pos = fallback?.get(node.id) ?? node.position;
    const rowCount = Math.max(inputs.length, outputs.length, 1);
    const box: NodeBox = {
      id: node.id,
      component: node.component,
      x: pos.x,
      y: pos.y,
      width: boxWidth(node.component),
      height: HEADER_H + rowCount * ROW_H + 8,
      inputs,
      outputs,
      badges: badges.get(node.id) ?? [],
      failed: failed.has(node.id),
    };
    boxes.push(box);
    boxById.set(node.id, box);
  }

  const edges: EdgeView[] = [];
  for (const edge of document.edges) {
    const from = boxById.get(edge.from.id);
    const to = boxById.get(edge.to.id);
    if (!from || !to) {
      continue; // dangling endpoints never reach the canvas
    }
    edges.push({
      edge,
      fromIndex: portIndex(from.outputs, specs.get(from.component), edge.from.port, "outputs"),
      toIndex: portIndex(to.inputs, specs.get(to.component), edge.to.port, "inputs"),
    });
  }

  const sliders: SliderState[] = [];
  for (const node of document.nodes) {
    for (const [port, pin] of Object.entries(node.pins ?? {})) {
      if (isSliderPin(pin)) {
        sliders.push({
          node: node.id,
          port,
          min: pin.slider.min,
          max: pin.slider.max,
          value: pin.slider.value,
        });
      }
    }
  }

  return { boxes, edges, sliders, selection: null };
}

/** Anchor point of a port row on a box edge, in canvas coordinates. */
export function portAnchor(
  box: NodeBox,
  side: "in" | "out",
  index: number,
): { x: number; y: number } {
  return {
    x: side === "in" ? box.x : box.x + box.width,
    y: box.y + HEADER_H + index * ROW_H + ROW_H / 2,
  };
}
