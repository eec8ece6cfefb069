// View model layer: parse server views and derive everything the renderer
// needs. Thin-client contract: no rule logic lives here — legality, threats
// and verdicts all come from server fields.

export type EdgeOwner = "free" | "avoider" | "enforcer";

export interface EdgeView {
  id: number;
  u: number;
  v: number;
  owner: EdgeOwner;
}

export interface ServerView {
  session: string;
  pattern: string;
  vertices: number;
  bias: number;
  human: string;
  round: number;
  turn: "avoider" | "enforcer" | "over";
  verdict: string;
  warning: string;
  edges: Map<number, EdgeView>;
  threats: Map<number, number[]>; // threat edge -> witness edge ids
  witness: number[];
  machine: { actor: string; ids: number[] } | null;
}

export function parseView(text: string): ServerView {
  const view: ServerView = {
    session: "",
    pattern: "",
    vertices: 0,
    bias: 0,
    human: "avoider",
    round: 1,
    turn: "avoider",
    verdict: "ongoing",
    warning: "",
    edges: new Map(),
    threats: new Map(),
    witness: [],
    machine: null,
  };
  const lines = text.split("\n");
  if (!lines[0] || !lines[0].startsWith("aeview ")) {
    throw new Error("malformed view: missing aeview header");
  }
  for (const line of lines.slice(1)) {
    const tok = line.trim().split(/\s+/);
    if (!tok[0] || tok[0] === "end") continue;
    switch (tok[0]) {
      case "session":
        view.session = tok[1];
        break;
      case "pattern":
        view.pattern = tok.slice(1).join(" ");
        break;
      case "vertices":
        view.vertices = parseInt(tok[1], 10);
        break;
      case "bias":
        view.bias = parseInt(tok[1], 10);
        break;
      case "human":
        view.human = tok[1];
        break;
      case "round":
        view.round = parseInt(tok[1], 10);
        break;
      case "turn":
        view.turn = tok[1] as ServerView["turn"];
        break;
      case "verdict":
        view.verdict = tok[1];
        break;
      case "warning":
        view.warning = tok.slice(1).join(" ");
        break;
      case "edge": {
        const id = parseInt(tok[1], 10);
        view.edges.set(id, {
          id,
          u: parseInt(tok[2], 10),
          v: parseInt(tok[3], 10),
          owner: tok[4] as EdgeOwner,
        });
        break;
      }
      case "threat": {
        const id = parseInt(tok[1], 10);
        const wit = tok.slice(3).map((x) => parseInt(x, 10));
        view.threats.set(id, wit);
        break;
      }
      case "witness":
        view.witness = tok.slice(1).map((x) => parseInt(x, 10));
        break;
      case "machine":
        view.machine = {
          actor: tok[1],
          ids: tok.slice(2).map((x) => parseInt(x, 10)),
        };
        break;
      default:
        break; // forward compatibility: ignore unknown lines
    }
  }
  return view;
}

export type VisualState = "free" | "mine" | "machine" | "threat" | "witness";

export interface EdgeVisual {
  id: number;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  state: VisualState;
  clickable: boolean;
}

export interface BoardViewModel {
  vertices: { x: number; y: number }[];
  edges: EdgeVisual[];
  banner: string | null; // verdict banner text when the game is over
  canMove: boolean;
  moveLog: string[];
}

export function circularLayout(
  n: number,
  width = 640,
  height = 640,
  margin = 40,
): { x: number; y: number }[] {
  const cx = width / 2;
  const cy = height / 2;
  const r = Math.min(width, height) / 2 - margin;
  const out = [];
  for (let i = 0; i < n; i++) {
    const angle = (2 * Math.PI * i) / n - Math.PI / 2;
    out.push({ x: cx + r * Math.cos(angle), y: cy + r * Math.sin(angle) });
  }
  return out;
}

export function bannerText(view: ServerView): string | null {
  switch (view.verdict) {
    case "avoider_loses":
      return view.human === "avoider"
        ? "You completed a copy — Avoider loses"
        : "Avoider completed a copy — you win";
    case "avoider_wins":
      return view.human === "avoider"
        ? "Board exhausted with no copy — Avoider wins"
        : "Avoider survived — Enforcer loses";
    default:
      return null;
  }
}

export function deriveBoard(view: ServerView, moveLog: string[] = []): BoardViewModel {
  const layout = circularLayout(view.vertices);
  const witness = new Set(view.witness);
  const over = view.verdict !== "ongoing";
  const mySide = view.human === "avoider" ? "avoider" : "enforcer";
  const edges: EdgeVisual[] = [];
  for (const e of view.edges.values()) {
    let state: VisualState;
    if (witness.has(e.id)) {
      state = "witness";
    } else if (e.owner === "free") {
      state = view.threats.has(e.id) ? "threat" : "free";
    } else {
      state = e.owner === mySide ? "mine" : "machine";
    }
    edges.push({
      id: e.id,
      x1: layout[e.u].x,
      y1: layout[e.u].y,
      x2: layout[e.v].x,
      y2: layout[e.v].y,
      state,
      clickable: !over && e.owner === "free" && view.turn === view.human,
    });
  }
  edges.sort((a, b) => a.id - b.id);
  return {
    vertices: layout,
    edges,
    banner: bannerText(view),
    canMove: !over && view.turn === view.human,
    moveLog,
  };
}

export function describeMachineMove(view: ServerView): string | null {
  if (!view.machine) return null;
  const who = view.machine.actor === "A" ? "avoider" : "enforcer";
  return `machine (${who}) claimed ${view.machine.ids.join(", ")}`;
}
