// Controller: owns the last fetched snapshot and re-renders the whole page
// from it after every server round trip. One mutation may be in flight at a
// time; inputs render disabled while it is pending.

import { ApiClient, ApiError, ModelDoc, Snapshot, ViewKind } from "./api.js";
import {
  h,
  Handlers,
  renderAutomatonCard,
  renderBanner,
  renderHistory,
  renderReplayControls,
  renderSessionControls,
  renderTransitionList,
  renderVectorPanel,
} from "./render.js";

export interface Route {
  model?: string;
  view?: ViewKind;
  session?: string;
}

export class App implements Handlers {
  private models: string[] = [];
  private modelDoc: ModelDoc | null = null;
  private sessionId: string | null = null;
  private snapshot: Snapshot | null = null;
  private selected: string | null = null;
  private pending = false;
  private error: string | null = null;
  private chosenModel = "";
  private chosenView: ViewKind = "sda3";

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private onRoute: (route: Route) => void = () => undefined,
  ) {}

  async init(route: Route = {}): Promise<void> {
    this.models = (await this.api.listModels()).models;
    this.chosenModel = route.model ?? this.models[0] ?? "";
    this.chosenView = route.view ?? "sda3";
    if (route.session && route.model) {
      this.modelDoc = await this.api.getModel(route.model);
      const restored = await this.api.getSession(route.session);
      this.sessionId = route.session;
      this.snapshot = restored.snapshot;
      this.chosenView = restored.snapshot.view;
    }
    this.render();
  }

  async newSession(model: string, view: ViewKind): Promise<void> {
    await this.mutate(async () => {
      this.modelDoc = await this.api.getModel(model);
      const created = await this.api.createSession(model, view);
      this.sessionId = created.session;
      this.snapshot = created.snapshot;
      this.selected = null;
      this.chosenModel = model;
      this.chosenView = view;
      this.onRoute({ model, view, session: created.session });
    });
  }

  onSelectAutomaton(id: string): void {
    this.selected = this.selected === id ? null : id;
    this.render();
  }

  async onFire(action: number): Promise<void> {
    await this.mutate(async () => {
      if (!this.sessionId) return;
      const response = await this.api.step(this.sessionId, action);
      this.snapshot = response.snapshot;
      if (response.focus) this.selected = response.focus;
    });
  }

  async onUndo(): Promise<void> {
    await this.mutate(async () => {
      if (!this.sessionId) return;
      this.snapshot = (await this.api.undo(this.sessionId)).snapshot;
    });
  }

  async onReset(): Promise<void> {
    await this.mutate(async () => {
      if (!this.sessionId) return;
      this.snapshot = (await this.api.reset(this.sessionId)).snapshot;
    });
  }

  async onLoadVerdict(verdictId: string): Promise<void> {
    await this.mutate(async () => {
      if (!this.sessionId) return;
      this.snapshot = (await this.api.loadTrace(this.sessionId,
        { verdict: verdictId })).snapshot;
    });
  }

  async onAdvance(): Promise<void> {
    await this.mutate(async () => {
      if (!this.sessionId || !this.snapshot) return;
      const pinned = this.snapshot.pinned_trace;
      if (pinned === null || this.snapshot.cursor >= pinned.length) return;
      const next = pinned[this.snapshot.cursor];
      const response = await this.api.step(this.sessionId, next);
      this.snapshot = response.snapshot;
      if (response.focus) this.selected = response.focus;
    });
  }

  /** Refetch the snapshot, e.g. after a 409 left the display stale. */
  async refresh(): Promise<void> {
    if (!this.sessionId) return;
    this.snapshot = (await this.api.getSession(this.sessionId)).snapshot;
    this.render();
  }

  private async mutate(body: () => Promise<void>): Promise<void> {
    if (this.pending) return;
    this.pending = true;
    this.error = null;
    this.render();
    try {
      await body();
    } catch (err) {
      this.error = err instanceof ApiError
        ? `${err.message} (HTTP ${err.status})`
        : String(err);
      if (err instanceof ApiError && err.status === 409 && this.sessionId) {
        // a lost race: re-sync the display with the authoritative snapshot
        this.snapshot = (await this.api.getSession(this.sessionId)).snapshot;
      }
    } finally {
      this.pending = false;
      this.render();
    }
  }

  render(): void {
    const doc = this.root.ownerDocument;
    this.root.textContent = "";
    this.root.append(this.renderToolbar(doc));
    if (this.error !== null) {
      this.root.append(h(doc, "div", { class: "error", role: "alert" },
        this.error));
    }
    if (!this.modelDoc || !this.snapshot) {
      this.root.append(h(doc, "p", { class: "hint" },
        "Pick a model and view, then start a session."));
      return;
    }
    const banner = renderBanner(doc, this.modelDoc, this.snapshot);
    if (banner) this.root.append(banner);

    const automata = this.snapshot.view === "sda3"
      ? this.modelDoc.automata.sda3.automata
      : this.modelDoc.automata.ada3.automata;
    const board = h(doc, "div", { class: "board" });
    for (const automaton of automata) {
      board.append(renderAutomatonCard(doc, automaton, this.snapshot,
        this.selected, this));
    }
    this.root.append(board);
    if (this.snapshot.view === "ada3") {
      this.root.append(renderVectorPanel(doc, this.snapshot));
    }
    this.root.append(renderTransitionList(doc, this.snapshot, this.selected,
      this.pending, this));
    this.root.append(renderSessionControls(doc, this.snapshot, this.pending,
      this));
    this.root.append(renderReplayControls(doc, this.modelDoc, this.snapshot,
      this.pending, this));
    this.root.append(renderHistory(doc, this.modelDoc, this.snapshot));
  }

  private renderToolbar(doc: Document): HTMLElement {
    const bar = h(doc, "header", { class: "toolbar" });
    bar.append(h(doc, "strong", { class: "brand" }, "imdskit"));
    const modelSelect = h(doc, "select", { class: "model-select" }) as HTMLSelectElement;
    for (const id of this.models) {
      modelSelect.append(h(doc, "option", {
        value: id,
        selected: id === this.chosenModel,
      }, id));
    }
    modelSelect.addEventListener("change", () => {
      this.chosenModel = modelSelect.value;
    });
    const viewSelect = h(doc, "select", { class: "view-select" }) as HTMLSelectElement;
    for (const view of ["sda3", "ada3"] as ViewKind[]) {
      viewSelect.append(h(doc, "option", {
        value: view,
        selected: view === this.chosenView,
      }, view));
    }
    viewSelect.addEventListener("change", () => {
      this.chosenView = viewSelect.value as ViewKind;
    });
    const start = h(doc, "button", {
      class: "new-session",
      disabled: this.pending || this.models.length === 0,
    }, "new session") as HTMLButtonElement;
    start.addEventListener("click", () => {
      void this.newSession(modelSelect.value || this.chosenModel,
        (viewSelect.value as ViewKind) || this.chosenView);
    });
    bar.append(modelSelect, viewSelect, start);
    if (this.sessionId) {
      bar.append(h(doc, "span", { class: "session-id" },
        ` session ${this.sessionId.slice(0, 8)}`));
    }
    return bar;
  }
}

export function parseHash(hash: string): Route {
  const params = new URLSearchParams(hash.replace(/^#/, ""));
  const view = params.get("view");
  return {
    model: params.get("model") ?? undefined,
    view: view === "sda3" || view === "ada3" ? view : undefined,
    session: params.get("session") ?? undefined,
  };
}

export function formatHash(route: Route): string {
  const params = new URLSearchParams();
  if (route.model) params.set("model", route.model);
  if (route.view) params.set("view", route.view);
  if (route.session) params.set("session", route.session);
  return "#" + params.toString();
}
