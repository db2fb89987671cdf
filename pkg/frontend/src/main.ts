import { Client } from "./api.js";
import { Controller, type ViewState } from "./controller.js";
import { fitTransform, hitBadge, hitBox, paint } from "./graphview.js";
import { fitCamera, paintStrokes, type Camera, type Stroke } from "./viewport.js";

function el<T extends HTMLElement>(selector: string): T {
  const found = document.querySelector<T>(selector);
  if (!found) {
    throw new Error(`missing element ${selector}`);
  }
  return found;
}

const promptForm = el<HTMLFormElement>("#prompt-form");
const promptInput = el<HTMLInputElement>("#prompt");
const graphCanvas = el<HTMLCanvasElement>("#graph");
const previewCanvas = el<HTMLCanvasElement>("#preview");
const sliderPanel = el<HTMLDivElement>("#sliders");
const diagnosticsPanel = el<HTMLUListElement>("#diagnostics");
const statusLine = el<HTMLElement>("#status");

let camera: Camera | null = null;
let cameraStrokes: Stroke[] = [];
let lastState: ViewState | null = null;

function sized(canvas: HTMLCanvasElement): CanvasRenderingContext2D {
  const ratio = window.devicePixelRatio || 1;
  const rect = canvas.getBoundingClientRect();
  canvas.width = Math.max(1, Math.round(rect.width * ratio));
  canvas.height = Math.max(1, Math.round(rect.height * ratio));
  const ctx = canvas.getContext("2d")!;
  ctx.setTransform(ratio, 0, 0, ratio, 0, 0);
  return ctx;
}

function paintGraph(state: ViewState): void {
  const ctx = sized(graphCanvas);
  const rect = graphCanvas.getBoundingClientRect();
  const view = fitTransform(state.scene, rect.width, rect.height);
  paint(ctx, state.scene, view, rect.width, rect.height, state.model.selection);
  graphCanvas.onmousemove = (event) => {
    const mark = hitBadge(state.scene, view, event.offsetX, event.offsetY);
    graphCanvas.title = mark ? `${mark.badge.rule}: ${mark.badge.message}` : "";
  };
  graphCanvas.onclick = (event) => {
    const mark = hitBadge(state.scene, view, event.offsetX, event.offsetY);
    if (mark?.badge.repairId) {
      void controller.acceptRepair(mark.badge.repairId);
      return;
    }
    controller.select(hitBox(state.scene, view, event.offsetX, event.offsetY));
  };
}

function paintPreview(state: ViewState): void {
  const ctx = sized(previewCanvas);
  const rect = previewCanvas.getBoundingClientRect();
  if (state.strokes !== cameraStrokes) {
    // new geometry: refit, but keep the user's orbit between slider nudges
    const fitted = fitCamera(state.strokes);
    if (!camera || Math.abs(fitted.dist - camera.dist) / fitted.dist > 0.5) {
      camera = fitted;
    } else {
      camera.target = fitted.target;
    }
    cameraStrokes = state.strokes;
  }
  if (state.strokes.length === 0) {
    ctx.fillStyle = "#1d1f24";
    ctx.fillRect(0, 0, rect.width, rect.height);
    ctx.fillStyle = "#777d89";
    ctx.font = "13px system-ui, sans-serif";
    ctx.textAlign = "center";
    ctx.fillText("no drawable geometry", rect.width / 2, rect.height / 2);
    return;
  }
  paintStrokes(ctx, state.strokes, camera!, rect.width, rect.height);
}

function renderSliders(state: ViewState): void {
  sliderPanel.replaceChildren();
  for (const slider of state.sliders) {
    const row = document.createElement("label");
    row.className = "slider-row";
    const caption = document.createElement("span");
    caption.textContent = `node ${slider.node} (${slider.min}..${slider.max})`;
    const value = document.createElement("output");
    value.textContent = `${slider.value}`;
    const input = document.createElement("input");
    input.type = "range";
    input.min = `${slider.min}`;
    input.max = `${slider.max}`;
    input.step = "1";
    input.value = `${slider.value}`;
    input.addEventListener("input", () => {
      value.textContent = input.value;
      controller.setSliderValue(slider.node, Number(input.value));
    });
    input.addEventListener("change", () => {
      controller.flushSliders();
      void controller.commitSlider(slider.node, Number(input.value));
    });
    row.append(caption, input, value);
    sliderPanel.append(row);
  }
}

function renderDiagnostics(state: ViewState): void {
  diagnosticsPanel.replaceChildren();
  if (state.diagnostics.length === 0 && state.document) {
    const item = document.createElement("li");
    item.className = "diag ok";
    item.textContent = "no findings";
    diagnosticsPanel.append(item);
    return;
  }
  for (const diag of state.diagnostics) {
    const item = document.createElement("li");
    item.className = `diag ${diag.severity}`;
    const text = document.createElement("span");
    text.textContent = `${diag.rule}${diag.node !== undefined ? ` node ${diag.node}` : ""}: ${diag.message}`;
    item.append(text);
    if (diag.repair) {
      const button = document.createElement("button");
      button.textContent = `fix (${diag.repair.kind})`;
      button.addEventListener("click", () => {
        void controller.acceptRepair(diag.repair!.id);
      });
      item.append(button);
    }
    diagnosticsPanel.append(item);
  }
}

function present(state: ViewState): void {
  lastState = state;
  statusLine.textContent = state.status;
  promptForm.classList.toggle("busy", state.busy);
  paintGraph(state);
  paintPreview(state);
  renderSliders(state);
  renderDiagnostics(state);
}

const controller = new Controller(new Client(""), present);

promptForm.addEventListener("submit", (event) => {
  event.preventDefault();
  void controller.submitPrompt(promptInput.value).then((ok) => {
    if (ok && controller.state.sessionId) {
      location.hash = controller.state.sessionId;
    }
  });
});

previewCanvas.addEventListener("mousedown", (down) => {
  const startCamera = camera ? { ...camera } : null;
  if (!startCamera) {
    return;
  }
  const move = (event: MouseEvent) => {
    camera = {
      ...startCamera,
      yaw: startCamera.yaw + (event.clientX - down.clientX) * 0.01,
      pitch: Math.max(
        -1.4,
        Math.min(1.4, startCamera.pitch + (event.clientY - down.clientY) * 0.01),
      ),
    };
    if (lastState) {
      paintPreview(lastState);
    }
  };
  const up = () => {
    window.removeEventListener("mousemove", move);
    window.removeEventListener("mouseup", up);
  };
  window.addEventListener("mousemove", move);
  window.addEventListener("mouseup", up);
});

previewCanvas.addEventListener("wheel", (event) => {
  if (!camera) {
    return;
  }
  event.preventDefault();
  camera.dist = Math.max(0.1, camera.dist * (event.deltaY > 0 ? 1.1 : 0.9));
  if (lastState) {
    paintPreview(lastState);
  }
});

window.addEventListener("resize", () => {
  if (lastState) {
    paintGraph(lastState);
    paintPreview(lastState);
  }
});

const restored = location.hash.slice(1) || undefined;
void controller.init(restored).then(() => {
  if (controller.state.sessionId) {
    location.hash = controller.state.sessionId;
  }
});
