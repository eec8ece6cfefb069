// Application shell: wires the client, view models and renderer together.
// At most one move request is in flight per session; a rejected move shows
// a toast and re-renders the authoritative server state.

import { ApiError, PlayClient } from "./api.js";
import { ReplayStepper, parseTranscript } from "./replay.js";
import {
  ServerView,
  deriveBoard,
  describeMachineMove,
  parseView,
} from "./viewmodel.js";
import { renderBoard } from "./render.js";

export class App {
  client: PlayClient;
  view: ServerView | null = null;
  moveLog: string[] = [];
  private pending = false;

  constructor(
    base: string,
    private board: HTMLElement,
    private toastEl: HTMLElement,
    private doc: Document = document,
  ) {
    this.client = new PlayClient(base);
  }

  async start(opts: Parameters<PlayClient["createSession"]>[0]): Promise<void> {
    this.view = await this.client.createSession(opts);
    this.noteMachine();
    this.render();
  }

  private noteMachine(): void {
    if (!this.view) return;
    const line = describeMachineMove(this.view);
    if (line) this.moveLog.push(line);
  }

  toast(message: string): void {
    this.toastEl.textContent = message;
  }

  async handleEdgeClick(edgeId: number): Promise<void> {
    if (!this.view || this.pending) return;
    const edge = this.view.edges.get(edgeId);
    if (!edge || edge.owner !== "free") return; // owned edges are no-ops
    this.pending = true;
    try {
      this.moveLog.push(`you claimed ${edgeId}`);
      this.view = await this.client.submitMove(this.view.session, [edgeId]);
      this.noteMachine();
      this.toast("");
    } catch (err) {
      this.moveLog.pop(); // reverted: the server rejected the move
      if (err instanceof ApiError) {
        this.toast(`rejected: ${err.message}`);
        this.view = await this.client.getState(this.view.session);
      } else {
        throw err;
      }
    } finally {
      this.pending = false;
      this.render();
    }
  }

  render(): void {
    if (!this.view) return;
    const model = deriveBoard(this.view, this.moveLog);
    renderBoard(
      this.board,
      model,
      { onEdgeClick: (id) => void this.handleEdgeClick(id) },
      this.doc,
    );
  }
}

export interface ReplayFrameView {
  position: number;
  length: number;
  ownership: Map<number, "avoider" | "enforcer">;
  verdict: string | null; // shown only on the final frame
}

export class ReplayApp {
  stepper: ReplayStepper;

  constructor(text: string) {
    this.stepper = new ReplayStepper(parseTranscript(text));
  }

  frame(): ReplayFrameView {
    return {
      position: this.stepper.at,
      length: this.stepper.length,
      ownership: this.stepper.current(),
      verdict: this.stepper.atEnd ? this.stepper.finalVerdict() : null,
    };
  }

  forward(): ReplayFrameView {
    this.stepper.forward();
    return this.frame();
  }

  back(): ReplayFrameView {
    this.stepper.back();
    return this.frame();
  }

  toEnd(): ReplayFrameView {
    this.stepper.toEnd();
    return this.frame();
  }
}

export { parseView };
