// Scripted walkthrough of the UI against the real simulation service: the
// Python server is started once for the file and the client code runs
// unmodified against a DOM document, driven through real clicks.

import { spawn, type ChildProcess } from "node:child_process";
import { resolve } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { App, formatHash, parseHash } from "../src/app.js";

const PORT = 8731 + (process.pid % 211);
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = resolve(process.cwd(), "..");

let server: ChildProcess;

async function until(cond: () => boolean, timeout = 8000): Promise<void> {
  const deadline = Date.now() + timeout;
  while (Date.now() < deadline) {
    if (cond()) return;
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
  throw new Error("condition not reached in time");
}

beforeAll(async () => {
  server = spawn("python3",
    ["-m", "imdskit", "serve", "models", "--bind", `127.0.0.1:${PORT}`],
    { cwd: REPO_ROOT, stdio: ["ignore", "ignore", "pipe"] });
  const errors: string[] = [];
  server.stderr?.on("data", (chunk: Buffer) => errors.push(String(chunk)));
  const deadline = Date.now() + 45_000;
  while (Date.now() < deadline) {
    if (server.exitCode !== null) {
      throw new Error(`service exited early:\n${errors.join("")}`);
    }
    try {
      const response = await fetch(`${BASE}/models`);
      if (response.ok) return;
    } catch {
      // not listening yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error(`service did not come up:\n${errors.join("")}`);
});

afterAll(() => {
  server?.kill();
});

function mount(): { root: HTMLElement; app: App } {
  const root = document.createElement("main");
  document.body.append(root);
  const app = new App(root, new ApiClient(BASE));
  return { root, app };
}

function enabledCount(root: HTMLElement): number {
  return root.querySelectorAll(".transition-list li.enabled").length;
}

function fireButton(root: HTMLElement, action: number): HTMLButtonElement {
  const button = root.querySelector(
    `button.fire[data-action="${action}"]:not([disabled])`);
  if (!button) throw new Error(`no enabled fire button for action ${action}`);
  return button as HTMLButtonElement;
}

function boardHtml(root: HTMLElement): string {
  const parts = [".board", ".vector-panel", ".transitions", ".history"]
    .map((sel) => root.querySelector(sel)?.innerHTML ?? "");
  return parts.join("\n---\n");
}

describe("crossed/ada3 walkthrough", () => {
  it("clicking into the deadlock shows zero enabled transitions and the banner",
    async () => {
      const { root, app } = mount();
      await app.init();
      await app.newSession("crossed", "ada3");
      expect(enabledCount(root)).toBe(2);

      fireButton(root, 0).click(); // a1 takes sem1, now waits for sem2
      await until(() => root.querySelectorAll(".history-list li").length === 1);
      fireButton(root, 3).click(); // a2 takes sem2, now waits for sem1
      await until(() => root.querySelectorAll(".history-list li").length === 2);

      expect(enabledCount(root)).toBe(0);
      const banner = root.querySelector(".banner.deadlock");
      expect(banner).not.toBeNull();
      expect(banner!.textContent).toContain("total-deadlock");
      expect(root.querySelector(".config-line")!.textContent)
        .toContain("sem1.down, sem2.down");
    });

  it("replaying the total-deadlock witness reaches the dead rendering",
    async () => {
      // reference rendering: the witness actions clicked by hand
      const api = new ApiClient(BASE);
      const model = await api.getModel("crossed");
      const witness = model.report.verdicts.find(
        (v) => v.kind === "total-deadlock")!.witness!;
      expect(witness.actions).toHaveLength(2);

      const manual = mount();
      await manual.app.init();
      await manual.app.newSession("crossed", "ada3");
      for (const action of witness.actions) {
        fireButton(manual.root, action).click();
        await until(() => enabledCount(manual.root) === 0
          || manual.root.querySelector(".session-controls .undo:not([disabled])") !== null);
      }
      await until(() => manual.root.querySelector(".banner") !== null);

      // fresh session: load the witness through the UI and advance through it
      const replay = mount();
      await replay.app.init();
      await replay.app.newSession("crossed", "ada3");
      const select = replay.root.querySelector(
        ".verdict-select") as HTMLSelectElement;
      select.value = "total-deadlock";
      (replay.root.querySelector(".load-trace") as HTMLButtonElement).click();
      await until(() => replay.root.querySelector(".cursor")!.textContent!
        .includes("0/2"));
      for (let i = 1; i <= 2; i++) {
        (replay.root.querySelector(".advance") as HTMLButtonElement).click();
        await until(() => replay.root.querySelector(".cursor")!.textContent!
          .includes(`${i}/2`));
      }
      expect(enabledCount(replay.root)).toBe(0);
      expect(replay.root.querySelector(".banner.deadlock")).not.toBeNull();
      expect(boardHtml(replay.root)).toBe(boardHtml(manual.root));
      expect((replay.root.querySelector(".advance") as HTMLButtonElement)
        .disabled).toBe(true);
    });

  it("an explicit action trace replays to the clicked A-then-C rendering",
    async () => {
      const clicked = mount();
      await clicked.app.init();
      await clicked.app.newSession("crossed", "ada3");
      fireButton(clicked.root, 0).click();
      await until(() => clicked.root.querySelectorAll(".history-list li").length === 1);
      fireButton(clicked.root, 3).click();
      await until(() => clicked.root.querySelectorAll(".history-list li").length === 2);

      const api = new ApiClient(BASE);
      const created = await api.createSession("crossed", "ada3");
      await api.loadTrace(created.session, { actions: [0, 3] });
      const replayed = mount();
      await replayed.app.init({ model: "crossed", session: created.session });
      for (let i = 1; i <= 2; i++) {
        (replayed.root.querySelector(".advance") as HTMLButtonElement).click();
        await until(() => replayed.root.querySelector(".cursor")!.textContent!
          .includes(`${i}/2`));
      }
      expect(boardHtml(replayed.root)).toBe(boardHtml(clicked.root));
    });

  it("reload mid-session reproduces the identical view from the snapshot",
    async () => {
      // the App publishes its route through the callback, as the browser
      // shell would write it into location.hash
      const original = document.createElement("main");
      document.body.append(original);
      let hash = "";
      const app = new App(original, new ApiClient(BASE), (route) => {
        hash = formatHash(route);
      });
      await app.init();
      await app.newSession("crossed", "ada3");
      fireButton(original, 0).click();
      await until(() =>
        original.querySelectorAll(".history-list li").length === 1);
      expect(hash).toContain("session=");

      // simulate a reload: a brand-new App restored from the route alone
      const reloaded = mount();
      await reloaded.app.init(parseHash(hash));
      expect(reloaded.root.innerHTML).toBe(original.innerHTML);
    });

  it("a lost click race resolves to a consistent display after refresh",
    async () => {
      const { root, app } = mount();
      await app.init();
      await app.newSession("crossed", "ada3");
      fireButton(root, 0).click();
      await until(() => root.querySelectorAll(".history-list li").length === 1);
      // fire an already-disabled transition straight at the controller,
      // as a racing click that lost would
      await app.onFire(0);
      await until(() => root.querySelector(".error") !== null);
      expect(root.querySelector(".error")!.textContent).toContain("not enabled");
      expect(root.querySelectorAll(".history-list li")).toHaveLength(1);
    });
});
