// Browser entry point: session form, board mount, replay file input.

import { App, ReplayApp } from "./app.js";
import { renderBoard } from "./render.js";
import { circularLayout } from "./viewmodel.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderReplayFrame(replay: ReplayApp, vertices: number): void {
  const frame = replay.frame();
  const layout = circularLayout(vertices);
  const container = el<HTMLDivElement>("board");
  // reconstruct a minimal board model from the ownership frame
  const edges = [...frame.ownership.entries()].map(([id, owner], i) => ({
    id,
    x1: layout[i % vertices].x,
    y1: layout[i % vertices].y,
    x2: layout[(i + 1) % vertices].x,
    y2: layout[(i + 1) % vertices].y,
    state: owner === "avoider" ? ("mine" as const) : ("machine" as const),
    clickable: false,
  }));
  renderBoard(container, {
    vertices: layout,
    edges,
    banner: frame.verdict ? `replay verdict: ${frame.verdict}` : null,
    canMove: false,
    moveLog: [`move ${frame.position}/${frame.length}`],
  }, { onEdgeClick: () => undefined });
}

export function boot(): void {
  const app = new App(
    window.location.origin,
    el("board"),
    el("toast"),
  );
  el<HTMLButtonElement>("start").addEventListener("click", () => {
    void app.start({
      board: `kn ${el<HTMLInputElement>("n").value}`,
      pattern: el<HTMLInputElement>("pattern").value,
      bias: parseInt(el<HTMLInputElement>("bias").value, 10),
      policy: el<HTMLSelectElement>("policy").value,
      seed: parseInt(el<HTMLInputElement>("seed").value, 10),
      human: "avoider",
    });
  });

  const fileInput = el<HTMLInputElement>("replay-file");
  let replay: ReplayApp | null = null;
  let replayVertices = 6;
  fileInput.addEventListener("change", async () => {
    const file = fileInput.files?.[0];
    if (!file) return;
    replay = new ReplayApp(await file.text());
    const desc = replay.stepper.transcript.boardDesc;
    const m = desc.match(/kn (\d+)/);
    replayVertices = m ? parseInt(m[1], 10) : 6;
    renderReplayFrame(replay, replayVertices);
  });
  el<HTMLButtonElement>("step-forward").addEventListener("click", () => {
    if (replay) {
      replay.forward();
      renderReplayFrame(replay, replayVertices);
    }
  });
  el<HTMLButtonElement>("step-back").addEventListener("click", () => {
    if (replay) {
      replay.back();
      renderReplayFrame(replay, replayVertices);
    }
  });

  void app.client.policies().then((p) => {
    const select = el<HTMLSelectElement>("policy");
    select.innerHTML = "";
    for (const name of p.enforcer) {
      const opt = document.createElement("option");
      opt.value = name;
      opt.textContent = name;
      select.appendChild(opt);
    }
  });
}

if (typeof window !== "undefined" && document.getElementById("board")) {
  boot();
}
