// Scripted client test against a live play service.
//
// Creates a K6 / P3 / bias-2 session, plays human moves through real DOM
// clicks (including a deliberate threat click), asserts the loss banner
// and witness highlighting, and replays a harness transcript to its
// recorded verdict.

import { execFileSync, spawn, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, readdirSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { App, ReplayApp } from "../src/app.js";

const PORT = 8741;
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;

async function waitForService(): Promise<void> {
  for (let i = 0; i < 100; i++) {
    try {
      const res = await fetch(`${BASE}/policies`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error("play service did not come up");
}

beforeAll(async () => {
  server = spawn(
    "python3",
    ["-m", "aegame.cli", "serve", "--port", String(PORT), "--max-n", "30"],
    { stdio: "ignore" },
  );
  await waitForService();
});

afterAll(() => {
  server.kill();
});

function clickEdge(board: HTMLElement, edgeId: number): void {
  const el = board.querySelector(`[data-edge-id="${edgeId}"]`);
  expect(el, `edge ${edgeId} rendered`).toBeTruthy();
  el!.dispatchEvent(new window.MouseEvent("click", { bubbles: true }));
}

function edgeClass(board: HTMLElement, edgeId: number): string {
  return board.querySelector(`[data-edge-id="${edgeId}"]`)!.getAttribute("class")!;
}

async function settle(app: App): Promise<void> {
  // one in-flight request at a time; poll until the click's round trip lands
  for (let i = 0; i < 200; i++) {
    if (!(app as unknown as { pending: boolean }).pending) return;
    await new Promise((resolve) => setTimeout(resolve, 25));
  }
  throw new Error("move request never settled");
}

describe("live session", () => {
  it("plays to a threat click and shows the loss banner with the witness", async () => {
    const board = document.createElement("div");
    const toast = document.createElement("div");
    document.body.append(board, toast);
    const app = new App(BASE, board, toast, document);
    await app.start({ board: "kn 6", pattern: "P3", bias: 2, policy: "endgame", seed: 3 });

    expect(board.querySelectorAll("[data-edge-id]").length).toBe(15);
    // Five scripted human interactions.  On this board any four Avoider
    // edges already contain two sharing a vertex, so at most three claims
    // can be safe; interactions without a safe claim exercise the
    // documented owned-edge no-op instead, and the fifth is always the
    // deliberate threat click that ends the game.
    let humanMoves = 0;
    const interact = async () => {
      const view = app.view!;
      const free = [...view.edges.values()].filter((e) => e.owner === "free");
      const safe = free.filter((e) => !view.threats.has(e.id));
      if (humanMoves !== 1 && safe.length > 0) {
        clickEdge(board, safe[0].id);
      } else {
        // clicking an owned edge must be a no-op
        const owned = [...view.edges.values()].find((e) => e.owner !== "free")!;
        const roundBefore = view.round;
        clickEdge(board, owned.id);
        await settle(app);
        expect(app.view!.round).toBe(roundBefore);
      }
      await settle(app);
      humanMoves++;
    };
    for (let i = 0; i < 4; i++) {
      await interact();
      expect(app.view!.verdict).toBe("ongoing");
    }

    // 5th: the deliberate threat click — outlined edge completing a copy
    const threats = [...app.view!.threats.keys()];
    expect(threats.length).toBeGreaterThan(0);
    expect(edgeClass(board, threats[0])).toBe("edge-threat");
    clickEdge(board, threats[0]);
    await settle(app);
    humanMoves++;

    expect(humanMoves).toBe(5);
    expect(app.view!.verdict).toBe("avoider_loses");
    const banner = board.querySelector(".banner");
    expect(banner).toBeTruthy();
    expect(banner!.textContent).toMatch(/loses/);
    // the witness copy is highlighted
    expect(app.view!.witness.length).toBeGreaterThan(0);
    for (const eid of app.view!.witness) {
      expect(edgeClass(board, eid)).toBe("edge-witness");
    }
  }, 120000);
});

describe("harness transcript replay", () => {
  it("reaches the recorded verdict", () => {
    const dir = mkdtempSync(join(tmpdir(), "aet-"));
    execFileSync("python3", [
      "-m", "aegame.cli", "simulate",
      "--pattern", "K3", "--board", "kn 72", "--bias", "1",
      "--avoider", "random", "--enforcer", "odd-unicyclic",
      "--seeds", "0", "--transcripts", dir, "--out", join(dir, "rows.csv"),
    ]);
    const file = readdirSync(dir).find((f) => f.endsWith(".aet"))!;
    const text = readFileSync(join(dir, file), "utf8");
    const replay = new ReplayApp(text);
    expect(replay.stepper.length).toBeGreaterThan(0);
    const final = replay.toEnd();
    expect(final.verdict).toBe("avoider_loses");
    // the final frame carries the winning copy: recorded witness edges are
    // all Avoider-owned at the end of the stepper
    expect(replay.stepper.witnessConsistent()).toBe(true);
  }, 120000);
});
