/**
 * Minimal software 3D preview: drawable values become world-space
 * polyline strokes, an orbit camera projects them to screen space,
 * and a 2D canvas paints the result. No WebGL, no dependencies; the
 * geometry shown is exactly what the server returned.
 */
import type { DrawableJson, ValueJson } from "./api.js";

export type Vec3 = [number, number, number];
export type Stroke = Vec3[];

const CIRCLE_SAMPLES = 48;
const CURVE_SAMPLES = 32;

function sub(a: Vec3, b: Vec3): Vec3 {
  return [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
}

function add(a: Vec3, b: Vec3): Vec3 {
  return [a[0] + b[0], a[1] + b[1], a[2] + b[2]];
}

function scale(a: Vec3, s: number): Vec3 {
  return [a[0] * s, a[1] * s, a[2] * s];
}

function cross(a: Vec3, b: Vec3): Vec3 {
  return [
    a[1] * b[2] - a[2] * b[1],
    a[2] * b[0] - a[0] * b[2],
    a[0] * b[1] - a[1] * b[0],
  ];
}

function norm(a: Vec3): number {
  return Math.hypot(a[0], a[1], a[2]);
}

function normalize(a: Vec3): Vec3 {
  const n = norm(a);
  return n === 0 ? [0, 0, 1] : scale(a, 1 / n);
}

function planeBasis(normal: Vec3): [Vec3, Vec3] {
  const n = normalize(normal);
  const seed: Vec3 = Math.abs(n[2]) < 0.9 ? [0, 0, 1] : [1, 0, 0];
  const u = normalize(cross(seed, n));
  const v = cross(n, u);
  return [u, v];
}

function circleStroke(center: Vec3, normal: Vec3, radius: number): Stroke {
  const [u, v] = planeBasis(normal);
  const points: Stroke = [];
  for (let i = 0; i <= CIRCLE_SAMPLES; i++) {
    const t = (i / CIRCLE_SAMPLES) * Math.PI * 2;
    points.push(
      add(center, add(scale(u, Math.cos(t) * radius), scale(v, Math.sin(t) * radius))),
    );
  }
  return points;
}

/** Clamped-uniform B-spline point, Cox-de Boor over the basis. */
function splinePoint(control: Vec3[], degree: number, t: number): Vec3 {
  const n = control.length;
  const knotCount = n + degree + 1;
  const knots: number[] = [];
  for (let i = 0; i < knotCount; i++) {
    if (i <= degree) {
      knots.push(0);
    } else if (i >= n) {
      knots.push(1);
    } else {
      knots.push((i - degree) / (n - degree));
    }
  }
  const u = t >= 1 ? 1 - 1e-12 : t;
  let basis: number[] = knots
    .slice(0, -1)
    .map((k, i) => (u >= k && u < knots[i + 1]! ? 1 : 0));
  for (let d = 1; d <= degree; d++) {
    const next: number[] = [];
    for (let i = 0; i < basis.length - 1; i++) {
      const leftDen = knots[i + d]! - knots[i]!;
      const rightDen = knots[i + d + 1]! - knots[i + 1]!;
      const left = leftDen > 0 ? ((u - knots[i]!) / leftDen) * basis[i]! : 0;
      const right = rightDen > 0 ? ((knots[i + d + 1]! - u) / rightDen) * basis[i + 1]! : 0;
      next.push(left + right);
    }
    basis = next;
  }
  let point: Vec3 = [0, 0, 0];
  for (let i = 0; i < n; i++) {
    point = add(point, scale(control[i]!, basis[i] ?? 0));
  }
  return point;
}

function curveStroke(control: Vec3[], degree: number): Stroke {
  const points: Stroke = [];
  for (let i = 0; i <= CURVE_SAMPLES; i++) {
    points.push(splinePoint(control, degree, i / CURVE_SAMPLES));
  }
  return points;
}

function asVec(xyz: number[] | undefined): Vec3 {
  return [xyz?.[0] ?? 0, xyz?.[1] ?? 0, xyz?.[2] ?? 0];
}

/**
 * World-space strokes for one value. Surfaces are sketched from
 * their construction curves (profile/sections plus rails) instead of
 * a triangle soup, so the preview stays light. Error values and list
 * items that failed contribute nothing, matching partial evaluation.
 */
export function worldStrokes(value: ValueJson): Stroke[] {
  switch (value.kind) {
    case "point": {
      const p = asVec(value.xyz);
      const d = 0.08;
      return [
        [add(p, [-d, 0, 0]), add(p, [d, 0, 0])],
        [add(p, [0, -d, 0]), add(p, [0, d, 0])],
        [add(p, [0, 0, -d]), add(p, [0, 0, d])],
      ];
    }
    case "line":
      return [[asVec(value.a), asVec(value.b)]];
    case "polyline":
      return [(value.vertices ?? []).map(asVec)];
    case "circle":
      return [circleStroke(asVec(value.center), asVec(value.normal), value.radius ?? 1)];
    case "nurbs":
      return [curveStroke((value.control ?? []).map(asVec), value.degree ?? 1)];
    case "extrusion": {
      if (!value.profile) {
        return [];
      }
      const base = worldStrokes(value.profile);
      const dir = asVec(value.direction);
      const lifted = base.map((stroke) => stroke.map((p) => add(p, dir)));
      const rails: Stroke[] = [];
      for (const stroke of base) {
        const count = stroke.length;
        for (const f of [0, 0.25, 0.5, 0.75]) {
          const p = stroke[Math.min(count - 1, Math.round(f * (count - 1)))];
          if (p) {
            rails.push([p, add(p, dir)]);
          }
        }
      }
      return [...base, ...lifted, ...rails];
    }
    case "loft": {
      const sections = value.sections ?? [];
      const outlines = sections.map((s) => worldStrokes(s)[0] ?? []);
      const rails: Stroke[] = [];
      for (const f of [0, 0.25, 0.5, 0.75]) {
        const rail: Stroke = [];
        for (const outline of outlines) {
          const p = outline[Math.min(outline.length - 1, Math.round(f * (outline.length - 1)))];
          if (p) {
            rail.push(p);
          }
        }
        if (rail.length > 1) {
          rails.push(rail);
        }
      }
      return [...outlines.filter((o) => o.length > 0), ...rails];
    }
    case "list":
      return (value.items ?? []).flatMap(worldStrokes);
    default:
      return []; // numbers, text, vectors and errors have no preview
  }
}

export function drawableStrokes(drawables: DrawableJson[]): Stroke[] {
  return drawables.flatMap((d) => worldStrokes(d.value));
}

export interface Camera {
  yaw: number;
  pitch: number;
  dist: number;
  target: Vec3;
}

export function boundsCenter(strokes: Stroke[]): { center: Vec3; radius: number } {
  let min: Vec3 = [Infinity, Infinity, Infinity];
  let max: Vec3 = [-Infinity, -Infinity, -Infinity];
  for (const stroke of strokes) {
    for (const p of stroke) {
      min = [Math.min(min[0], p[0]), Math.min(min[1], p[1]), Math.min(min[2], p[2])];
      max = [Math.max(max[0], p[0]), Math.max(max[1], p[1]), Math.max(max[2], p[2])];
    }
  }
  if (min[0] > max[0]) {
    return { center: [0, 0, 0], radius: 1 };
  }
  const center = scale(add(min, max), 0.5);
  const radius = Math.max(norm(sub(max, center)), 1e-6);
  return { center, radius };
}

export function fitCamera(strokes: Stroke[]): Camera {
  const { center, radius } = boundsCenter(strokes);
  return { yaw: Math.PI / 5, pitch: Math.PI / 7, dist: radius * 3.2, target: center };
}

/** Perspective projection of a world point; null when behind the eye. */
export function project(
  camera: Camera,
  width: number,
  height: number,
  p: Vec3,
): [number, number] | null {
  const r = sub(p, camera.target);
  const cy = Math.cos(camera.yaw);
  const sy = Math.sin(camera.yaw);
  const cp = Math.cos(camera.pitch);
  const sp = Math.sin(camera.pitch);
  // yaw about world z, then pitch about the camera's x
  const x1 = r[0] * cy - r[1] * sy;
  const y1 = r[0] * sy + r[1] * cy;
  const y2 = y1 * cp - r[2] * sp;
  const z2 = y1 * sp + r[2] * cp;
  const depth = camera.dist - y2;
  if (depth <= 1e-6) {
    return null;
  }
  const f = (Math.min(width, height) * 1.1) / (camera.dist / 2);
  const s = f * (camera.dist / (depth + camera.dist));
  return [width / 2 + x1 * s, height / 2 - z2 * s];
}

export function paintStrokes(
  ctx: CanvasRenderingContext2D,
  strokes: Stroke[],
  camera: Camera,
  width: number,
  height: number,
): void {
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#1d1f24";
  ctx.fillRect(0, 0, width, height);
  ctx.strokeStyle = "#9fd2a8";
  ctx.lineWidth = 1.2;
  ctx.lineJoin = "round";
  for (const stroke of strokes) {
    let drawing = false;
    ctx.beginPath();
    for (const p of stroke) {
      const s = project(camera, width, height, p);
      if (!s) {
        drawing = false;
        continue;
      }
      if (drawing) {
        ctx.lineTo(s[0], s[1]);
      } else {
        ctx.moveTo(s[0], s[1]);
        drawing = true;
      }
    }
    ctx.stroke();
  }
}
