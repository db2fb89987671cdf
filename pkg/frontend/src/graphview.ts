/**
 * Node-graph scene: boxes with port labels, bezier wires, diagnostic
 * badges. buildScene() is pure so tests can assert on it; paint()
 * needs a CanvasRenderingContext2D.
 */
import type { Badge, CanvasModel, NodeBox } from "./model.js";
import { HEADER_H, ROW_H, portAnchor } from "./model.js";

export interface BadgeMark {
  node: number;
  x: number;
  y: number;
  badge: Badge;
}

export interface WirePath {
  x0: number;
  y0: number;
  c0x: number;
  c0y: number;
  c1x: number;
  c1y: number;
  x1: number;
  y1: number;
  label: string;
}

export interface Scene {
  boxes: NodeBox[];
  wires: WirePath[];
  badges: BadgeMark[];
  bounds: { minX: number; minY: number; maxX: number; maxY: number };
}

const BADGE_R = 7;

export function buildScene(model: CanvasModel): Scene {
  const byId = new Map(model.boxes.map((b) => [b.id, b]));
  const wires: WirePath[] = [];
  for (const view of model.edges) {
    const from = byId.get(view.edge.from.id);
    const to = byId.get(view.edge.to.id);
    if (!from || !to) {
      continue;
    }
    const a = portAnchor(from, "out", view.fromIndex);
    const b = portAnchor(to, "in", view.toIndex);
    const reach = Math.max(40, Math.abs(b.x - a.x) / 2);
    wires.push({
      x0: a.x,
      y0: a.y,
      c0x: a.x + reach,
      c0y: a.y,
      c1x: b.x - reach,
      c1y: b.y,
      x1: b.x,
      y1: b.y,
      label: `${view.edge.from.id}.${view.edge.from.port} -> ${view.edge.to.id}.${view.edge.to.port}`,
    });
  }

  const badges: BadgeMark[] = [];
  for (const box of model.boxes) {
    box.badges.forEach((badge, i) => {
      badges.push({
        node: box.id,
        x: box.x + box.width - BADGE_R - i * (BADGE_R * 2 + 3),
        y: box.y - BADGE_R - 2,
        badge,
      });
    });
  }

  let minX = Infinity;
  let minY = Infinity;
  let maxX = -Infinity;
  let maxY = -Infinity;
  for (const box of model.boxes) {
    minX = Math.min(minX, box.x);
    minY = Math.min(minY, box.y - 20);
    maxX = Math.max(maxX, box.x + box.width);
    maxY = Math.max(maxY, box.y + box.height);
  }
  if (model.boxes.length === 0) {
    minX = minY = 0;
    maxX = maxY = 1;
  }
  return { boxes: model.boxes, wires, badges, bounds: { minX, minY, maxX, maxY } };
}

const SEVERITY_COLOR: Record<Badge["severity"], string> = {
  error: "#d64545",
  failure: "#d64545",
  warning: "#d69e2e",
  info: "#4a7dd6",
};

export interface ViewTransform {
  scale: number;
  tx: number;
  ty: number;
}

/** Uniform scale-to-fit of the scene bounds inside a canvas. */
export function fitTransform(scene: Scene, width: number, height: number, margin = 24): ViewTransform {
  const w = scene.bounds.maxX - scene.bounds.minX;
  const h = scene.bounds.maxY - scene.bounds.minY;
  const scale = Math.min(1.25, (width - margin * 2) / Math.max(w, 1), (height - margin * 2) / Math.max(h, 1));
  return {
    scale,
    tx: margin - scene.bounds.minX * scale + (width - margin * 2 - w * scale) / 2,
    ty: margin - scene.bounds.minY * scale + (height - margin * 2 - h * scale) / 2,
  };
}

export function paint(
  ctx: CanvasRenderingContext2D,
  scene: Scene,
  view: ViewTransform,
  width: number,
  height: number,
  selection: number | null = null,
): void {
  ctx.save();
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#fafaf7";
  ctx.fillRect(0, 0, width, height);
  ctx.translate(view.tx, view.ty);
  ctx.scale(view.scale, view.scale);

  ctx.lineWidth = 1.4 / view.scale;
  ctx.strokeStyle = "#8a8a83";
  for (const wire of scene.wires) {
    ctx.beginPath();
    ctx.moveTo(wire.x0, wire.y0);
    ctx.bezierCurveTo(wire.c0x, wire.c0y, wire.c1x, wire.c1y, wire.x1, wire.y1);
    ctx.stroke();
  }

  for (const box of scene.boxes) {
    const picked = box.id === selection;
    ctx.fillStyle = picked ? "#eef4ff" : "#ffffff";
    ctx.strokeStyle = box.failed ? SEVERITY_COLOR.failure : picked ? "#4a7dd6" : "#55554f";
    ctx.lineWidth = (box.failed || picked ? 2.4 : 1.2) / view.scale;
    ctx.beginPath();
    ctx.rect(box.x, box.y, box.width, box.height);
    ctx.fill();
    ctx.stroke();

    ctx.fillStyle = "#22221f";
    ctx.font = `bold ${12}px system-ui, sans-serif`;
    ctx.textBaseline = "middle";
    ctx.textAlign = "center";
    ctx.fillText(box.component, box.x + box.width / 2, box.y + HEADER_H / 2);
    ctx.strokeStyle = "#d8d8d2";
    ctx.lineWidth = 1 / view.scale;
    ctx.beginPath();
    ctx.moveTo(box.x, box.y + HEADER_H);
    ctx.lineTo(box.x + box.width, box.y + HEADER_H);
    ctx.stroke();

    ctx.font = `${10}px system-ui, sans-serif`;
    ctx.fillStyle = "#44443f";
    box.inputs.forEach((name, i) => {
      const a = portAnchor(box, "in", i);
      ctx.textAlign = "left";
      ctx.fillText(name, a.x + 6, a.y);
      dot(ctx, a.x, a.y, view.scale);
    });
    box.outputs.forEach((name, i) => {
      const a = portAnchor(box, "out", i);
      ctx.textAlign = "right";
      ctx.fillText(name, a.x - 6, a.y);
      dot(ctx, a.x, a.y, view.scale);
    });
  }

  for (const mark of scene.badges) {
    ctx.fillStyle = SEVERITY_COLOR[mark.badge.severity];
    ctx.beginPath();
    ctx.arc(mark.x, mark.y, BADGE_R, 0, Math.PI * 2);
    ctx.fill();
    ctx.fillStyle = "#ffffff";
    ctx.font = `bold ${9}px system-ui, sans-serif`;
    ctx.textAlign = "center";
    ctx.fillText(badgeGlyph(mark.badge), mark.x, mark.y + 0.5);
  }
  ctx.restore();
}

function badgeGlyph(badge: Badge): string {
  if (badge.severity === "failure") {
    return "!";
  }
  return badge.rule.startsWith("R") ? badge.rule.slice(1) : "i";
}

function dot(ctx: CanvasRenderingContext2D, x: number, y: number, scale: number): void {
  ctx.save();
  ctx.fillStyle = "#55554f";
  ctx.beginPath();
  ctx.arc(x, y, 2.4 / Math.sqrt(scale), 0, Math.PI * 2);
  ctx.fill();
  ctx.restore();
}

/** Topmost node box under the cursor (canvas pixel coordinates). */
export function hitBox(scene: Scene, view: ViewTransform, px: number, py: number): number | null {
  const x = (px - view.tx) / view.scale;
  const y = (py - view.ty) / view.scale;
  for (let i = scene.boxes.length - 1; i >= 0; i--) {
    const box = scene.boxes[i]!;
    if (x >= box.x && x <= box.x + box.width && y >= box.y && y <= box.y + box.height) {
      return box.id;
    }
  }
  return null;
}

/** Badge under the cursor, if any (canvas pixel coordinates). */
export function hitBadge(scene: Scene, view: ViewTransform, px: number, py: number): BadgeMark | null {
  const x = (px - view.tx) / view.scale;
  const y = (py - view.ty) / view.scale;
  for (const mark of scene.badges) {
    const dx = x - mark.x;
    const dy = y - mark.y;
    if (dx * dx + dy * dy <= BADGE_R * BADGE_R * 1.8) {
      return mark;
    }
  }
  return null;
}
