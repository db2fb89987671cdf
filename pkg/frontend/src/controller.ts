/**
 * Steering logic between the service client and the view. Owns the
 * session, the mirrored document and all round-trips; the DOM layer
 * only forwards events here and paints whatever `present` receives.
 *
 * Concurrency rules: at most one /generate in flight; slider
 * evaluations are debounced and go through a sequence gate so a
 * stale response can never overwrite a newer render.
 */
import type {
  DiagnosticJson,
  EvalResponse,
  GenerateResponse,
  RegistryResponse,
  RepairResponse,
  WireDocument,
} from "./api.js";
import { debounce, type Debounced } from "./debounce.js";
import { buildModel, type CanvasModel, type SliderState } from "./model.js";
import { buildScene, type Scene } from "./graphview.js";
import { SequenceGate } from "./sequence.js";
import { drawableStrokes, type Stroke } from "./viewport.js";

/** The slice of the HTTP client the controller needs; api.Client
 * satisfies it, tests may substitute fakes. */
export interface ServiceClient {
  registry(): Promise<RegistryResponse>;
  generate(prompt: string, session?: string): Promise<GenerateResponse>;
  validate(document: WireDocument): Promise<DiagnosticJson[]>;
  repair(document: WireDocument, repairIds?: string[]): Promise<RepairResponse>;
  evaluate(
    document: WireDocument,
    overrides?: Record<number, number>,
    meshes?: boolean,
  ): Promise<EvalResponse>;
  createSession(document?: WireDocument): Promise<string>;
  getSession(id: string): Promise<WireDocument>;
  putSession(id: string, document: WireDocument): Promise<void>;
}

export interface ViewState {
  sessionId: string | null;
  document: WireDocument | null;
  model: CanvasModel;
  scene: Scene;
  sliders: SliderState[];
  diagnostics: DiagnosticJson[];
  evalResult: EvalResponse | null;
  strokes: Stroke[];
  status: string;
  busy: boolean;
}

const EMPTY_MODEL: CanvasModel = { boxes: [], edges: [], sliders: [], selection: null };

function emptyState(): ViewState {
  return {
    sessionId: null,
    document: null,
    model: EMPTY_MODEL,
    scene: buildScene(EMPTY_MODEL),
    sliders: [],
    diagnostics: [],
    evalResult: null,
    strokes: [],
    status: "describe a model to begin",
    busy: false,
  };
}

export class Controller {
  readonly state: ViewState = emptyState();

  private registry: RegistryResponse | null = null;
  private readonly gate = new SequenceGate();
  private generating = false;
  private overrides: Record<number, number> = {};
  private readonly slideLater: Debounced<[]>;

  constructor(
    private readonly client: ServiceClient,
    private readonly present: (state: ViewState) => void,
    debounceMs = 150,
  ) {
    this.slideLater = debounce(() => {
      void this.evaluateOverrides();
    }, debounceMs);
  }

  private show(status?: string): void {
    if (status !== undefined) {
      this.state.status = status;
    }
    this.present(this.state);
  }

  /** Load the catalog and attach to (or create) a server session. */
  async init(sessionId?: string): Promise<void> {
    this.registry = await this.client.registry();
    if (sessionId) {
      try {
        const document = await this.client.getSession(sessionId);
        this.state.sessionId = sessionId;
        await this.adopt(document, null, "session restored");
        return;
      } catch {
        this.show("stored session is gone; starting fresh");
      }
    }
    this.state.sessionId = await this.client.createSession();
    this.show("ready");
  }

  /** Replace the mirrored document and re-run validate + evaluate. */
  private async adopt(
    document: WireDocument,
    diagnostics: DiagnosticJson[] | null,
    status: string,
  ): Promise<void> {
    this.overrides = {};
    this.slideLater.cancel();
    const ticket = this.gate.next();
    const [checked, evaluated] = await Promise.all([
      diagnostics === null ? this.client.validate(document) : Promise.resolve(diagnostics),
      this.client.evaluate(document),
    ]);
    if (!this.gate.shouldRender(ticket)) {
      return;
    }
    this.state.document = document;
    this.state.diagnostics = checked;
    this.applyEvaluation(evaluated, document, checked);
    this.show(status);
  }

  private applyEvaluation(
    evaluated: EvalResponse,
    document: WireDocument,
    diagnostics: DiagnosticJson[],
  ): void {
    const kept = this.state.model.selection;
    this.state.evalResult = evaluated;
    this.state.model = buildModel(document, this.registry, diagnostics, evaluated.failures);
    if (kept !== null && this.state.model.boxes.some((b) => b.id === kept)) {
      this.state.model.selection = kept;
    }
    this.state.scene = buildScene(this.state.model);
    this.state.sliders = this.state.model.sliders;
    this.state.strokes = drawableStrokes(evaluated.drawables);
  }

  async submitPrompt(prompt: string): Promise<boolean> {
    if (!prompt.trim()) {
      this.show("type a prompt first");
      return false;
    }
    if (this.generating) {
      this.show("still generating...");
      return false;
    }
    this.generating = true;
    this.state.busy = true;
    this.show("generating...");
    try {
      const response = await this.client.generate(
        prompt,
        this.state.sessionId ?? undefined,
      );
      await this.adopt(response.document, null, "generated");
      return true;
    } catch (error) {
      this.show(`generation failed: ${(error as Error).message}`);
      return false;
    } finally {
      this.generating = false;
      this.state.busy = false;
      this.show();
    }
  }

  /** Slider drag: remember the override and re-evaluate after a pause. */
  setSliderValue(node: number, value: number): void {
    this.overrides[node] = value;
    for (const slider of this.state.sliders) {
      if (slider.node === node) {
        slider.value = value;
      }
    }
    this.slideLater();
  }

  /** Run a pending slider evaluation immediately (drag released). */
  flushSliders(): void {
    this.slideLater.flush();
  }

  private async evaluateOverrides(): Promise<void> {
    const document = this.state.document;
    if (!document) {
      return;
    }
    const ticket = this.gate.next();
    let evaluated: EvalResponse;
    try {
      evaluated = await this.client.evaluate(document, { ...this.overrides });
    } catch (error) {
      this.show(`evaluation failed: ${(error as Error).message}`);
      return;
    }
    if (!this.gate.shouldRender(ticket)) {
      return; // a newer request superseded this one
    }
    this.applyEvaluation(evaluated, document, this.state.diagnostics);
    this.show("re-evaluated");
  }

  /**
   * Persist a released slider into the document itself, so the
   * session (the source of truth) reproduces this canvas on reload.
   */
  async commitSlider(node: number, value: number): Promise<void> {
    const document = this.state.document;
    if (!document) {
      return;
    }
    const committed: WireDocument = {
      ...document,
      nodes: document.nodes.map((n) => {
        if (n.id !== node || !n.pins) {
          return n;
        }
        const pins = { ...n.pins };
        for (const [port, pin] of Object.entries(pins)) {
          if (typeof pin === "object" && pin !== null && "slider" in pin) {
            pins[port] = { slider: { ...pin.slider, value } };
          }
        }
        return { ...n, pins };
      }),
    };
    delete this.overrides[node];
    if (this.state.sessionId) {
      await this.client.putSession(this.state.sessionId, committed);
    }
    await this.adopt(committed, this.state.diagnostics, "slider committed");
  }

  /** Apply one suggested repair on the server and adopt the result. */
  async acceptRepair(repairId: string): Promise<boolean> {
    const document = this.state.document;
    if (!document) {
      return false;
    }
    this.show("repairing...");
    try {
      const response = await this.client.repair(document, [repairId]);
      if (this.state.sessionId) {
        await this.client.putSession(this.state.sessionId, response.document);
      }
      await this.adopt(response.document, response.diagnostics, `applied ${repairId}`);
      return true;
    } catch (error) {
      this.show(`repair failed: ${(error as Error).message}`);
      return false;
    }
  }

  /** Repairs currently on offer, taken from the diagnostics overlay. */
  select(node: number | null): void {
    this.state.model.selection = node;
    if (node === null) {
      this.show();
      return;
    }
    const box = this.state.model.boxes.find((b) => b.id === node);
    this.show(box ? `node ${node}: ${box.component}` : undefined);
  }

  suggestedRepairs(): { id: string; rule: string; message: string }[] {
    return this.state.diagnostics
      .filter((d) => d.repair !== undefined)
      .map((d) => ({ id: d.repair!.id, rule: d.rule, message: d.message }));
  }
}
